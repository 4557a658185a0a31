#include "splitann/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "splitann/error.hpp"

namespace splitann {

namespace {

void require_compatible(const SplitMetric& g, const SplitMetric& h) {
    if (!compatible(g, h)) {
        throw Error(ErrorCode::IncompatibleMetrics, std::string("metrics differ in reference or chart: ") +
                                                        to_string(g.reference()) + "/" + to_string(g.chart()) +
                                                        " vs " + to_string(h.reference()) + "/" +
                                                        to_string(h.chart()));
    }
}

template <class F>
auto rethrow_integrand(F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NonFiniteDensity) throw Error(ErrorCode::NonFiniteIntegrand, e.what());
        throw;
    }
}

ActionValue refined_action(const QuadratureGrid& grid, const Density& density, const Density& band_density,
                           const char* formula) {
    const RefinedIntegral r = rethrow_integrand([&] { return integrate_refined(grid, density, band_density); });
    ActionValue a;
    a.value = r.value;
    a.error_estimate = r.error_estimate;
    a.richardson = r.richardson;
    a.grid = grid.descriptor();
    a.formula = formula;
    a.trail = {{grid.level() - 1, r.coarse}, {grid.level(), r.value}};
    return a;
}

double integrate_checked(const QuadratureGrid& grid, const Density& density, const Density& band_density = {}) {
    return rethrow_integrand([&] { return integrate(grid, density, band_density); });
}

bool usable_node(const QuadratureGrid& grid, std::size_t i, std::size_t j) {
    return !grid.in_band(i, j) && grid.diagonal_distance(i, j) > 0.0;
}

struct NodeStats {
    double sup_u = 0.0;
    double linf_dal = 0.0;
    double l1_dal = 0.0;
    std::vector<double> band_sup;
};

NodeStats node_stats(const SplitMetric& g, const ScalarField& u, const QuadratureGrid& grid,
                     const std::vector<double>& widths) {
    NodeStats s;
    s.band_sup.assign(widths.size(), 0.0);
    std::vector<double> l1_rows;
    std::vector<double> row;
    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.nx(); ++i) {
        row.clear();
        for (std::size_t j = 0; j < grid.ny(); ++j) {
            if (!usable_node(grid, i, j)) continue;
            const double x = grid.node_x(i), y = grid.node_y(j);
            double value, dal, rho;
            try {
                const Jet uj = u.jet(x, y);
                value = std::fabs(uj.v);
                dal = std::fabs(2.0 * uj.xy);
                rho = g.density(x, y);
            } catch (const Error&) {
                value = dal = inf;
                rho = 1.0;
            }
            if (!std::isfinite(value)) value = inf;
            if (!std::isfinite(dal)) dal = inf;
            s.sup_u = std::max(s.sup_u, value);
            s.linf_dal = std::max(s.linf_dal, dal / rho);
            row.push_back(dal * grid.weight(i, j));
            const double d = grid.diagonal_distance(i, j);
            for (std::size_t k = 0; k < widths.size(); ++k) {
                if (d < widths[k]) s.band_sup[k] = std::max(s.band_sup[k], value);
            }
        }
        l1_rows.push_back(pairwise_sum(row.data(), row.size()));
    }
    s.l1_dal = pairwise_sum(l1_rows.data(), l1_rows.size());
    return s;
}

bool bounded_growth(double fine, double coarse, double tol, double cap) {
    if (!std::isfinite(fine) || !std::isfinite(coarse) || fine > cap) return false;
    return fine - coarse <= tol * std::max(1.0, fine);
}

double schwarzian_of(const Taylor3& t) {
    const double r2 = t[2] / t[1];
    return t[3] / t[1] - 1.5 * r2 * r2;
}

}  // namespace

ScalarField relative_factor(const SplitMetric& g, const SplitMetric& h) {
    require_compatible(g, h);
    return h.u() - g.u();
}

double action_density(const SplitMetric& g, const SplitMetric& h, const AnnulusPoint& p) {
    const Jet u = h.u().jet(p.x, p.y) - g.u().jet(p.x, p.y);
    const double fg = -2.0 * g.total_factor(p.x, p.y).xy;
    return -0.5 * u.v * fg + 0.5 * u.v * u.xy;
}

double action_monotone_density(const SplitMetric& g, const SplitMetric& h, const AnnulusPoint& p) {
    const double u = h.u().value(p.x, p.y) - g.u().value(p.x, p.y);
    return -0.25 * u * (curvature(g).F(p) + curvature(h).F(p));
}

ActionValue action(const SplitMetric& g, const SplitMetric& h, const QuadratureGrid& grid,
                   const Density& band_density) {
    require_compatible(g, h);
    auto density = [&g, &h](const AnnulusPoint& p) { return action_density(g, h, p); };
    return refined_action(grid, density, band_density, "definition");
}

ActionValue action_monotone(const SplitMetric& g, const SplitMetric& h, const QuadratureGrid& grid,
                            const Density& band_density) {
    require_compatible(g, h);
    const CurvatureReport kg(g), kh(h);
    auto density = [&](const AnnulusPoint& p) {
        const double u = h.u().value(p.x, p.y) - g.u().value(p.x, p.y);
        return -0.25 * u * (kg.F(p) + kh.F(p));
    };
    return refined_action(grid, density, band_density, "monotone");
}

double chasles_residual(const SplitMetric& g, const SplitMetric& h, const SplitMetric& k, const QuadratureGrid& grid) {
    require_compatible(g, h);
    require_compatible(h, k);
    auto value = [&grid](const SplitMetric& a, const SplitMetric& b) {
        return integrate_checked(grid, [&](const AnnulusPoint& p) { return action_density(a, b, p); });
    };
    return std::fabs(value(g, h) + value(h, k) - value(g, k));
}

double vb_at_refinement(const PointFunction& f, const PolygonalCurve& p, int refinement) {
    const auto& v = p.vertices();
    const int pieces = 1 << refinement;
    std::vector<double> terms;
    for (std::size_t i = 0; i + 1 < v.size(); i += 2) {
        const double x = v[i].x;
        const double y0 = v[i].y, y1 = v[i + 1].y;
        double prev = f({x, y0, v[i].chart_id});
        for (int k = 1; k <= pieces; ++k) {
            const double y = y0 + (y1 - y0) * k / pieces;
            const double cur = f({x, y, v[i].chart_id});
            terms.push_back(std::fabs(cur - prev));
            prev = cur;
        }
    }
    return pairwise_sum(terms.data(), terms.size());
}

double vb(const PointFunction& f, const PolygonalCurve& p, int max_refinement, double stop_tol) {
    double prev = vb_at_refinement(f, p, 0);
    for (int r = 1; r <= max_refinement; ++r) {
        const double cur = vb_at_refinement(f, p, r);
        if (!std::isfinite(cur)) return cur;
        if (std::fabs(cur - prev) <= stop_tol) return std::max(prev, cur);
        prev = std::max(prev, cur);
    }
    return prev;
}

PolygonalCurve default_sclass_curve(const QuadratureGrid& grid) {
    if (grid.periodic()) {
        constexpr int steps = 8;
        const double pi = std::numbers::pi;
        const double a0 = grid.node_x(0) - 0.5 * (grid.node_x(1) - grid.node_x(0));
        const double offset = 0.5 * pi;
        std::vector<AnnulusPoint> pts;
        for (int k = 0; k < steps; ++k) {
            const double a = a0 + k * pi / steps;
            const double b = a0 + (k + 1) * pi / steps;
            pts.push_back({a, a + offset, 0});
            pts.push_back({a, b + offset, 0});
        }
        return PolygonalCurve(pts, pi);
    }
    const double x0 = grid.node_x(0), x1 = grid.node_x(grid.nx() - 1);
    const double y0 = grid.node_y(0), y1 = grid.node_y(grid.ny() - 1);
    const double xa = x0 + 0.25 * (x1 - x0), xb = x1 - 0.25 * (x1 - x0);
    const double ya = y0 + 0.25 * (y1 - y0), yb = y1 - 0.25 * (y1 - y0);
    return PolygonalCurve({{xa, ya, 0}, {xa, yb, 0}, {xb, yb, 0}, {xb, ya, 0}});
}

SClassReport sclass_report(const SplitMetric& g, const SplitMetric& h, const QuadratureGrid& grid,
                           const SClassParams& params) {
    const ScalarField u = relative_factor(g, h);
    SClassReport r;
    for (int j = params.first_band; j <= params.first_band + params.bands; ++j) {
        r.band_widths.push_back(std::ldexp(1.0, -j));
    }
    const NodeStats fine = node_stats(g, u, grid, r.band_widths);
    const NodeStats coarse = node_stats(g, u, grid.at_level(grid.level() - 1), r.band_widths);
    r.sup_u = fine.sup_u;
    r.sup_u_coarse = coarse.sup_u;
    r.boundary_decay = fine.band_sup;
    r.linf_dal = fine.linf_dal;
    r.linf_dal_coarse = coarse.linf_dal;
    r.l1_dal = fine.l1_dal;
    r.l1_dal_coarse = coarse.l1_dal;

    r.clause[0] = bounded_growth(r.sup_u, r.sup_u_coarse, params.growth_tol, params.linf_max);

    bool decays = std::all_of(r.boundary_decay.begin(), r.boundary_decay.end(),
                              [](double s) { return std::isfinite(s); });
    for (std::size_t k = 0; k + 1 < r.boundary_decay.size(); ++k) {
        const double s0 = r.boundary_decay[k], s1 = r.boundary_decay[k + 1];
        const double ratio = s1 > 0.0 ? s0 / s1 : std::numeric_limits<double>::infinity();
        r.decay_ratios.push_back(ratio);
        if (!(s1 <= params.floor || ratio >= params.decay_factor)) decays = false;
    }
    r.clause[1] = decays;

    r.clause[2] = bounded_growth(r.linf_dal, r.linf_dal_coarse, params.growth_tol, params.linf_max) &&
                  bounded_growth(r.l1_dal, r.l1_dal_coarse, params.growth_tol, params.linf_max);

    const PolygonalCurve curve = params.curve ? *params.curve : default_sclass_curve(grid);
    try {
        r.vb = vb([&u](const AnnulusPoint& p) { return u.value(p.x, p.y); }, curve, params.vb_refinement);
    } catch (const Error&) {
        r.vb = std::numeric_limits<double>::infinity();
    }
    r.clause[3] = std::isfinite(r.vb);

    r.pass = true;
    for (std::size_t k = 0; k < r.clause.size(); ++k) {
        if (!r.clause[k]) {
            r.pass = false;
            if (r.failing_clause.empty()) r.failing_clause = std::to_string(k + 1);
        }
    }
    return r;
}

VariationalResult variational_residual(const SplitMetric& g, const ScalarField& u, double dt,
                                       const QuadratureGrid& grid) {
    const SplitMetric plus = g.scaled(u.scaled(dt));
    const SplitMetric minus = g.scaled(u.scaled(-dt));
    auto value = [&](const SplitMetric& h) {
        return integrate_checked(grid, [&](const AnnulusPoint& p) { return action_density(g, h, p); });
    };
    const CurvatureReport kg(g);
    VariationalResult r;
    r.derivative = (value(plus) - value(minus)) / (2.0 * dt);
    r.target = -0.5 * integrate_checked(grid, [&](const AnnulusPoint& p) { return u.value(p.x, p.y) * kg.F(p); });
    r.residual = std::fabs(r.derivative - r.target);
    return r;
}

CriticalityResult criticality_test(const SplitMetric& g, const ScalarField& u, const QuadratureGrid& grid) {
    const CurvatureReport kg(g);
    CriticalityResult r;
    r.area_deriv =
        integrate_checked(grid, [&](const AnnulusPoint& p) { return u.value(p.x, p.y) * g.density(p.x, p.y); });
    r.action_deriv =
        -0.5 * integrate_checked(grid, [&](const AnnulusPoint& p) { return u.value(p.x, p.y) * kg.F(p); });
    return r;
}

CounterexampleResult find_criticality_counterexample(const SplitMetric& g, const std::vector<ScalarField>& candidates,
                                                     const QuadratureGrid& grid) {
    std::vector<CriticalityResult> base;
    for (const auto& b : candidates) base.push_back(criticality_test(g, b, grid));
    CounterexampleResult best;
    double best_score = -1.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        for (std::size_t j = 0; j < candidates.size(); ++j) {
            if (i == j || base[j].area_deriv == 0.0) continue;
            const double c = base[i].area_deriv / base[j].area_deriv;
            const double score = std::fabs(base[i].action_deriv - c * base[j].action_deriv);
            if (score > best_score) {
                best_score = score;
                best.u = candidates[i] - candidates[j].scaled(c);
                best.first = static_cast<int>(i);
                best.second = static_cast<int>(j);
            }
        }
    }
    if (best.first < 0) throw Error(ErrorCode::InvalidArgument, "counterexample search needs two bumps with nonzero area");
    best.result = criticality_test(g, best.u, grid);
    return best;
}

double uniformizing_limit(const CircleMap& phi, double a) {
    const Taylor3 t = phi.eval(a);
    const double s = schwarzian_of(t);
    if (phi.chart() == Chart::Affine) return s / 12.0;
    return s / 12.0 + (t[1] * t[1] - 1.0) / 6.0;
}

ActionValue uniformizing_action(const CircleMap& phi, int level, int band_cells) {
    if (phi.smoothness() != Smoothness::Smooth) {
        throw Error(ErrorCode::NotC3, "uniformizing action needs a C3 circle map");
    }
    if (phi.chart() != Chart::Angular) {
        throw Error(ErrorCode::OutOfChart, "uniformizing action is computed on the angular torus");
    }
    const SplitMetric g = SplitMetric::desitter(reference_pullback_factor(Reference::DeSitter, phi), Chart::Angular);
    const SplitMetric g0 = SplitMetric::desitter(ScalarField::zero(Chart::Angular), Chart::Angular);
    auto density = [&](const AnnulusPoint& p) { return action_density(g, g0, p); };
    auto band = [&phi](const AnnulusPoint& p) { return uniformizing_limit(phi, p.x); };

    const QuadratureGrid top = QuadratureGrid::torus(level, phi.breakpoints(), band_cells);
    ActionValue a;
    for (int l = 0; l <= level; ++l) {
        a.trail.push_back({l, integrate_checked(top.at_level(l), density, band)});
    }
    a.value = a.trail.back().value;
    if (a.trail.size() > 1) {
        const double coarse = a.trail[a.trail.size() - 2].value;
        a.error_estimate = std::fabs(a.value - coarse);
        a.richardson = a.value + (a.value - coarse) / 3.0;
    } else {
        a.richardson = a.value;
    }
    a.grid = top.descriptor();
    a.formula = "definition";
    return a;
}

}  // namespace splitann
