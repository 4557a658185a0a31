#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "splitann/adsgeom.hpp"
#include "splitann/curves.hpp"
#include "splitann/error.hpp"
#include "splitann/forms.hpp"
#include "splitann/liouville.hpp"

namespace splitann::cli {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

Json trail_json(const std::vector<TrailEntry>& trail) {
    Json out = Json::array();
    for (const auto& t : trail) out.push_back({{"level", t.level}, {"value", t.value}});
    return out;
}

Json number_or_null(std::optional<double> v) { return v ? Json(*v) : Json(nullptr); }

Json sclass_json(const SClassReport& r) {
    Json clauses = Json::array();
    for (bool c : r.clause) clauses.push_back(c);
    return {{"pass", r.pass},
            {"failing_clause", r.pass ? Json(nullptr) : Json(r.failing_clause)},
            {"clauses", clauses},
            {"sup_u", r.sup_u},
            {"sup_u_coarse", r.sup_u_coarse},
            {"band_widths", r.band_widths},
            {"boundary_decay", r.boundary_decay},
            {"decay_ratios", r.decay_ratios},
            {"linf_dal", r.linf_dal},
            {"linf_dal_coarse", r.linf_dal_coarse},
            {"l1_dal", r.l1_dal},
            {"l1_dal_coarse", r.l1_dal_coarse},
            {"vb", r.vb}};
}

std::vector<TrailEntry> trail_over_levels(const QuadratureGrid& top,
                                          const std::function<double(const QuadratureGrid&)>& value) {
    std::vector<TrailEntry> trail;
    for (int l = 0; l <= top.level(); ++l) trail.push_back({l, value(top.at_level(l))});
    return trail;
}

// Estimated convergence order when both residuals are resolvable.
std::optional<double> order_estimate(double coarse, double fine) {
    if (!(coarse > 1e-12 && fine > 1e-12)) return std::nullopt;
    return std::log2(coarse / fine);
}

struct Check {
    explicit Check(std::string n) : name(std::move(n)) {}

    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    std::optional<double> step;
    std::optional<double> order;
    bool order_required = false;
    bool pass = false;
};

Json check_json(const Check& c) {
    return {{"name", c.name},
            {"residual", c.residual},
            {"tolerance", c.tolerance},
            {"step", number_or_null(c.step)},
            {"order", number_or_null(c.order)},
            {"pass", c.pass}};
}

void finish(Check& c) {
    c.pass = std::isfinite(c.residual) && c.residual <= c.tolerance;
    if (c.order_required && c.order) c.pass = c.pass && std::fabs(*c.order - 2.0) <= 0.3;
}

class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
    std::mt19937_64& rng() { return rng_; }

    AnnulusPoint off_diagonal(double lo, double hi, double min_gap) {
        for (;;) {
            const double x = uniform(lo, hi), y = uniform(lo, hi);
            if (std::fabs(x - y) >= min_gap) return {x, y};
        }
    }

    // Bump supported inside [1, 2] × [−1, 0], away from the diagonal.
    ScalarField bump() {
        return ScalarField::bump(uniform(1.35, 1.65), uniform(-0.65, -0.35), uniform(0.2, 0.3), uniform(0.2, 0.3),
                                 uniform(-0.5, 0.5));
    }

    // Increasing rationals with denominator 16.
    std::vector<double> ordered_rationals(int n, int max_numerator) {
        std::vector<int> v;
        while (static_cast<int>(v.size()) < n) {
            const int k = std::uniform_int_distribution<int>(0, max_numerator)(rng_);
            if (std::find(v.begin(), v.end(), k) == v.end()) v.push_back(k);
        }
        std::sort(v.begin(), v.end());
        std::vector<double> out;
        for (int k : v) out.push_back(k / 16.0);
        return out;
    }

private:
    std::mt19937_64 rng_;
};

double relative_gap(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); }

std::vector<Check> verify_checks(const RunConfig& cfg) {
    Sampler rs(cfg.seed);
    std::vector<Check> checks;
    const SplitMetric g0 = SplitMetric::desitter();

    {
        Check c{"curvature_anchor"};
        c.tolerance = cfg.tolerance(c.name, 1e-10);
        const CurvatureReport k(g0);
        for (int i = 0; i < 200; ++i) c.residual = std::max(c.residual, std::fabs(k.K(rs.off_diagonal(-2, 2, 0.05)) - 1.0));
        finish(c);
        checks.push_back(c);
    }
    {
        Check c{"conformal_change"};
        c.tolerance = cfg.tolerance(c.name, 1e-8);
        for (int b = 0; b < 3; ++b) {
            const ScalarField u = ScalarField::bump(rs.uniform(-1, 1), rs.uniform(-1, 1), rs.uniform(0.3, 0.8),
                                                    rs.uniform(0.3, 0.8), rs.uniform(-0.5, 0.5));
            std::vector<AnnulusPoint> pts;
            for (int i = 0; i < 50; ++i) pts.push_back(rs.off_diagonal(-2, 2, 0.05));
            c.residual = std::max(c.residual, conformal_change_residual(g0, u, pts));
        }
        finish(c);
        checks.push_back(c);
    }
    const ScalarField u1 = rs.bump() + rs.bump();
    const ScalarField u2 = rs.bump();
    const Box box{1.0, 2.0, -1.0, 0.0};
    const QuadratureGrid grid = QuadratureGrid::rectangle(box, 2);
    {
        Check c{"liouville_formulas"};
        c.tolerance = cfg.tolerance(c.name, 1e-6);
        const SplitMetric h = g0.scaled(u1);
        c.residual = std::fabs(action(g0, h, grid).value - action_monotone(g0, h, grid).value);
        finish(c);
        checks.push_back(c);
    }
    {
        Check c{"chasles"};
        c.tolerance = cfg.tolerance(c.name, 1e-6);
        c.residual = chasles_residual(g0, g0.scaled(u1), g0.scaled(u2), grid);
        finish(c);
        checks.push_back(c);
    }
    {
        Check c{"variational_2d"};
        c.tolerance = cfg.tolerance(c.name, 1e-5);
        c.step = 1e-3;
        const double r1 = variational_residual(g0, u1, 1e-3, grid).residual;
        const double r2 = variational_residual(g0, u1, 5e-4, grid).residual;
        c.residual = r1;
        c.order = order_estimate(r1, r2);
        finish(c);
        checks.push_back(c);
    }
    {
        Check dbeta{"fundamental_dbeta"}, dalpha{"fundamental_dalpha"};
        dbeta.tolerance = cfg.tolerance(dbeta.name, 1e-5);
        dalpha.tolerance = cfg.tolerance(dalpha.name, 1e-5);
        dbeta.step = dalpha.step = 1e-3;
        dbeta.order_required = dalpha.order_required = true;
        double b_fine = 0.0, a_fine = 0.0;
        const bool flip = default_sign_flip();
        auto& rng = rs.rng();
        for (int k = 0; k < 10; ++k) {
            const auto F = random_point(Manifold::Frames, rng);
            const std::vector<Eigen::VectorXd> fv{random_tangent(Manifold::Frames, F, rng),
                                                  random_tangent(Manifold::Frames, F, rng)};
            const auto P = random_point(Manifold::UnitTangent, rng);
            const std::vector<Eigen::VectorXd> uv{random_tangent(Manifold::UnitTangent, P, rng),
                                                  random_tangent(Manifold::UnitTangent, P, rng),
                                                  random_tangent(Manifold::UnitTangent, P, rng)};
            const auto r = fundamental_equations_residual(F, fv, P, uv, 1e-3, flip);
            const auto rh = fundamental_equations_residual(F, fv, P, uv, 5e-4, flip);
            dbeta.residual = std::max(dbeta.residual, r.r1);
            dalpha.residual = std::max(dalpha.residual, r.r2);
            b_fine = std::max(b_fine, rh.r1);
            a_fine = std::max(a_fine, rh.r2);
        }
        dbeta.order = order_estimate(dbeta.residual, b_fine);
        dalpha.order = order_estimate(dalpha.residual, a_fine);
        finish(dbeta);
        finish(dalpha);
        checks.push_back(dbeta);
        checks.push_back(dalpha);
    }
    {
        Check iso{"isotropic_relations"}, real{"metric_realization"}, env{"envelope_incidence"},
            ep{"epstein_constraints"};
        iso.tolerance = cfg.tolerance(iso.name, 1e-9);
        real.tolerance = cfg.tolerance(real.name, 1e-9);
        env.tolerance = cfg.tolerance(env.name, 1e-9);
        ep.tolerance = cfg.tolerance(ep.name, 1e-9);
        for (const SplitMetric& g : {g0, g0.scaled(u1)}) {
            const IsotropicSurface s(g);
            for (int i = 0; i < 100; ++i) {
                const AnnulusPoint p = i % 2 == 0 ? rs.off_diagonal(-2, 2, 0.05)
                                                  : AnnulusPoint{rs.uniform(1, 2), rs.uniform(-1, 0)};
                const SurfacePoint sp = s.at(p.x, p.y);
                iso.residual = std::max(iso.residual, isotropic_relations_residual(sp));
                real.residual = std::max(real.residual, metric_realization_residual(s, p.x, p.y));
                env.residual = std::max(env.residual, envelope_incidence_residual(sp));
                ep.residual = std::max(ep.residual, epstein_residual(epstein_lift(sp)));
            }
        }
        for (Check* c : {&iso, &real, &env, &ep}) {
            finish(*c);
            checks.push_back(*c);
        }
    }
    {
        Check c{"cocycles"};
        c.tolerance = cfg.tolerance(c.name, 1e-10);
        const std::vector<std::pair<Crossratio, int>> families{
            {reference_crossratio(Chart::Affine), 48},
            {psl3_crossratio(psl3_conic(Chart::Affine)), 48},
            {po22_crossratio(CircleMap::sine(0.15, 2)), 49},
            {po22_crossratio(PiecewiseMobius::four_piece().circle_map()), 49}};
        for (const auto& [b, max_num] : families) {
            for (int i = 0; i < 20; ++i) {
                const auto v = rs.ordered_rationals(5, max_num);
                const double x = v[0], w = v[1], y = v[2], X = v[3], Y = v[4];
                c.residual = std::max(c.residual, relative_gap(b(x, w, X, Y) * b(w, y, X, Y), b(x, y, X, Y)));
                const auto u = rs.ordered_rationals(5, max_num);
                c.residual =
                    std::max(c.residual, relative_gap(b(u[0], u[1], u[3], u[4]) * b(u[0], u[1], u[2], u[3]),
                                                      b(u[0], u[1], u[2], u[4])));
            }
        }
        finish(c);
        checks.push_back(c);
    }
    {
        Check c{"diamond_area"};
        c.tolerance = cfg.tolerance(c.name, 1e-10);
        const double exact = 2.0 * std::log(4.0 / 3.0);
        const Crossratio b = reference_crossratio();
        const Diamond d(0, 1, 2, 3);
        c.residual = std::max(std::fabs(diamond_area(b, d) - exact), std::fabs(diamond_area_quadrature(b, d) - exact));
        finish(c);
        checks.push_back(c);
    }
    return checks;
}

}  // namespace

std::string dump(const Json& report) { return report.dump(2) + "\n"; }

CommandResult cmd_action(const RunConfig& cfg) {
    if (cfg.metrics.size() < 2 || cfg.metrics.size() > 3) fail("action: the config needs two or three metrics");
    const SplitMetric& g = cfg.metrics[0].metric;
    const SplitMetric& h = cfg.metrics[1].metric;
    for (const auto& m : cfg.metrics) {
        if (!compatible(g, m.metric)) fail("action: metrics must share reference and chart");
    }

    Density band;
    std::optional<QuadratureGrid> top;
    if (g.chart() == Chart::Angular) {
        std::vector<double> bps;
        for (const auto& m : cfg.metrics) {
            if (m.uniformizing) bps.insert(bps.end(), m.uniformizing->breakpoints().begin(), m.uniformizing->breakpoints().end());
        }
        top = QuadratureGrid::torus(cfg.grid.level, bps, cfg.grid.band_cells);
        if (cfg.metrics[0].uniformizing && h.u().is_zero()) {
            const CircleMap phi = *cfg.metrics[0].uniformizing;
            band = [phi](const AnnulusPoint& p) { return uniformizing_limit(phi, p.x); };
        }
    } else {
        std::optional<Box> box = cfg.grid.box;
        if (!box) box = relative_factor(g, h).support();
        if (!box) fail("action: grid.box is required when the conformal factors are not compactly supported");
        if (!(box->x1 > box->x0 && box->y1 > box->y0)) fail("action: grid.box is empty");
        top = QuadratureGrid::rectangle(*box, cfg.grid.level);
    }

    const ActionValue def = action(g, h, *top, band);
    const ActionValue mono = action_monotone(g, h, *top, band);
    const auto trail = trail_over_levels(*top, [&](const QuadratureGrid& gr) { return action(g, h, gr, band).value; });

    Json report{{"schema_version", kSchemaVersion},
                {"command", "action"},
                {"grid", def.grid},
                {"formula", def.formula},
                {"value", def.value},
                {"error_estimate", def.error_estimate},
                {"richardson", def.richardson},
                {"monotone", {{"formula", mono.formula}, {"value", mono.value}, {"error_estimate", mono.error_estimate}}},
                {"formula_difference", std::fabs(def.value - mono.value)}};
    if (cfg.metrics.size() == 3) report["chasles_residual"] = chasles_residual(g, h, cfg.metrics[2].metric, *top);
    report["refinement_trail"] = trail_json(trail);

    if (cfg.grid.csv) {
        std::ofstream os(*cfg.grid.csv);
        if (!os) fail("cannot write grid CSV '" + *cfg.grid.csv + "'");
        top->write_csv(os);
    }
    return {report, kExitOk};
}

CommandResult cmd_verify(const RunConfig& cfg) {
    const auto checks = verify_checks(cfg);
    Json list = Json::array();
    bool all = true;
    for (const auto& c : checks) {
        list.push_back(check_json(c));
        all = all && c.pass;
    }
    Json report{{"schema_version", kSchemaVersion},
                {"command", "verify"},
                {"seed", cfg.seed},
                {"tolerance_scale", cfg.tolerance_scale},
                {"sign_flip", default_sign_flip()},
                {"checks", list},
                {"all_pass", all}};
    return {report, all ? kExitOk : kExitVerifyFailed};
}

CommandResult cmd_epstein(const RunConfig& cfg, const std::string& csv_path) {
    const MetricSpec spec = cfg.epstein.metric.value_or(MetricSpec{});
    if (spec.metric.chart() != Chart::Affine) fail("epstein: the metric must use the affine chart");
    if (!cfg.epstein.box) fail("epstein: box is required");
    const Box box = *cfg.epstein.box;
    if (!(box.x1 > box.x0 && box.y1 > box.y0)) fail("epstein: box is empty");
    if (cfg.epstein.samples < 1) fail("epstein: samples must be positive");

    const IsotropicSurface surface(spec.metric);
    const auto samples = sample_epstein(surface, box, cfg.epstein.samples);

    std::ofstream os(csv_path);
    if (!os) fail("cannot write Epstein CSV '" + csv_path + "'");
    os << "s,t,x1,x2,x3,x4,n1,n2,n3,n4\n" << std::setprecision(17);
    double r_epstein = 0.0, r_iso = 0.0, r_env = 0.0, r_real = 0.0;
    for (const auto& s : samples) {
        os << s.s << ',' << s.t;
        for (int i = 0; i < 4; ++i) os << ',' << s.x[i];
        for (int i = 0; i < 4; ++i) os << ',' << s.n[i];
        os << '\n';
        const SurfacePoint sp = surface.at(s.s, s.t);
        r_epstein = std::max(r_epstein, epstein_residual(epstein_lift(sp)));
        r_iso = std::max(r_iso, isotropic_relations_residual(sp));
        r_env = std::max(r_env, envelope_incidence_residual(sp));
        r_real = std::max(r_real, metric_realization_residual(surface, s.s, s.t));
    }
    const double tol = cfg.tolerance("epstein", 1e-8);
    const double worst = std::max({r_epstein, r_iso, r_env, r_real});
    const bool pass = std::isfinite(worst) && worst <= tol;
    Json report{{"schema_version", kSchemaVersion},
                {"command", "epstein"},
                {"csv", csv_path},
                {"box", {box.x0, box.x1, box.y0, box.y1}},
                {"samples", cfg.epstein.samples},
                {"max_residuals",
                 {{"epstein_constraints", r_epstein},
                  {"isotropic_relations", r_iso},
                  {"envelope_incidence", r_env},
                  {"metric_realization", r_real}}},
                {"tolerance", tol},
                {"pass", pass}};
    return {report, pass ? kExitOk : kExitNumerical};
}

CommandResult cmd_curve(const RunConfig& cfg) {
    if (!cfg.curve) fail("curve: the config needs a curve section");
    const CurveAction a = curve_action(*cfg.curve, cfg.grid.level, {}, false);
    Json report{{"schema_version", kSchemaVersion},
                {"family", to_string(cfg.curve->family)},
                {"action", a.action.value},
                {"error_estimate", a.action.error_estimate},
                {"richardson", a.action.richardson},
                {"grid", a.action.grid},
                {"sclass", sclass_json(a.sclass)},
                {"refinement_trail", trail_json(a.action.trail)}};
    return {report, a.sclass.pass ? kExitOk : kExitSClassFail};
}

}  // namespace splitann::cli
