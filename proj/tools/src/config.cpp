#include "config.hpp"

#include <algorithm>
#include <set>

#include "splitann/error.hpp"

namespace splitann::cli {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

void check_keys(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& where) {
    if (!node.IsMap()) fail(where + ": expected a mapping");
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key)) fail(where + ": unknown key '" + key + "'");
    }
}

template <typename T>
T get(const YAML::Node& node, const std::string& key, const std::string& where) {
    const YAML::Node v = node[key];
    if (!v) fail(where + ": missing key '" + key + "'");
    try {
        return v.as<T>();
    } catch (const YAML::Exception&) {
        fail(where + ": bad value for '" + key + "'");
    }
}

template <typename T>
T get_or(const YAML::Node& node, const std::string& key, T fallback, const std::string& where) {
    return node[key] ? get<T>(node, key, where) : fallback;
}

std::vector<double> get_vector(const YAML::Node& node, const std::string& key, std::size_t n, const std::string& where) {
    const auto v = get<std::vector<double>>(node, key, where);
    if (n != 0 && v.size() != n) fail(where + ": '" + key + "' needs " + std::to_string(n) + " numbers");
    return v;
}

Mobius parse_matrix(const std::vector<double>& m, const std::string& where) {
    if (m.size() != 4) fail(where + ": a Möbius matrix has 4 entries in row-major order");
    return {m[0], m[1], m[2], m[3]};
}

Chart parse_chart(const std::string& s, const std::string& where) {
    if (s == "affine") return Chart::Affine;
    if (s == "angular") return Chart::Angular;
    fail(where + ": unknown chart '" + s + "'");
}

Reference parse_reference(const std::string& s, const std::string& where) {
    if (s == "flat") return Reference::Flat;
    if (s == "desitter") return Reference::DeSitter;
    fail(where + ": unknown reference '" + s + "'");
}

Box parse_box(const YAML::Node& node, const std::string& key, const std::string& where) {
    const auto v = get_vector(node, key, 4, where);
    return {v[0], v[1], v[2], v[3]};
}

}  // namespace

double RunConfig::tolerance(const std::string& name, double fallback) const {
    const auto it = tolerances.find(name);
    return (it == tolerances.end() ? fallback : it->second) * tolerance_scale;
}

const std::vector<std::string>& known_tolerances() {
    static const std::vector<std::string> names{
        "curvature_anchor",  "conformal_change",  "liouville_formulas", "chasles",
        "variational_2d",    "fundamental_dbeta", "fundamental_dalpha", "isotropic_relations",
        "metric_realization", "envelope_incidence", "epstein_constraints", "cocycles",
        "diamond_area",      "epstein"};
    return names;
}

CircleMap parse_circle_map(const YAML::Node& node, Chart chart) {
    const std::string where = "map";
    if (!node || !node.IsMap()) fail(where + ": expected a mapping");
    const auto kind = get<std::string>(node, "kind", where);
    auto need_chart = [&](Chart c) {
        if (c != chart) fail(where + ": '" + kind + "' is not available in the " + to_string(chart) + " chart");
    };
    if (kind == "identity") {
        check_keys(node, {"kind"}, where);
        return CircleMap::identity(chart);
    }
    if (kind == "mobius") {
        check_keys(node, {"kind", "matrix"}, where);
        return CircleMap::mobius(parse_matrix(get_vector(node, "matrix", 4, where), where), chart);
    }
    if (kind == "sine") {
        check_keys(node, {"kind", "amplitude", "frequency"}, where);
        need_chart(Chart::Angular);
        return CircleMap::sine(get<double>(node, "amplitude", where), get<int>(node, "frequency", where));
    }
    if (kind == "tangent") {
        check_keys(node, {"kind"}, where);
        need_chart(Chart::Affine);
        return CircleMap::tangent();
    }
    if (kind == "exponential") {
        check_keys(node, {"kind"}, where);
        need_chart(Chart::Affine);
        return CircleMap::exponential();
    }
    if (kind == "piecewise_mobius") {
        check_keys(node, {"kind", "breakpoints", "pieces"}, where);
        need_chart(Chart::Angular);
        const auto bps = get<std::vector<double>>(node, "breakpoints", where);
        const auto raw = get<std::vector<std::vector<double>>>(node, "pieces", where);
        std::vector<Mobius> pieces;
        for (const auto& m : raw) pieces.push_back(parse_matrix(m, where));
        return PiecewiseMobius(bps, pieces).circle_map();
    }
    if (kind == "four_piece") {
        check_keys(node, {"kind"}, where);
        need_chart(Chart::Angular);
        return PiecewiseMobius::four_piece().circle_map();
    }
    if (kind == "compose") {
        check_keys(node, {"kind", "outer", "inner"}, where);
        return CircleMap::compose(parse_circle_map(node["outer"], chart), parse_circle_map(node["inner"], chart));
    }
    fail(where + ": unknown kind '" + kind + "'");
}

ScalarField parse_field(const YAML::Node& node, Chart chart, Reference reference,
                        std::optional<CircleMap>* uniformizing) {
    const std::string where = "factor";
    if (!node) return ScalarField::zero(chart);
    if (!node.IsMap()) fail(where + ": expected a mapping");
    const auto kind = get<std::string>(node, "kind", where);
    if (kind == "zero") {
        check_keys(node, {"kind"}, where);
        return ScalarField::zero(chart);
    }
    if (kind == "constant") {
        check_keys(node, {"kind", "value"}, where);
        return ScalarField::constant(get<double>(node, "value", where), chart);
    }
    if (kind == "bump") {
        check_keys(node, {"kind", "center", "radius", "amplitude"}, where);
        const auto c = get_vector(node, "center", 2, where);
        const auto r = get_vector(node, "radius", 2, where);
        if (!(r[0] > 0.0 && r[1] > 0.0)) fail(where + ": bump radii must be positive");
        return ScalarField::bump(c[0], c[1], r[0], r[1], get<double>(node, "amplitude", where), chart);
    }
    if (kind == "polynomial") {
        check_keys(node, {"kind", "terms"}, where);
        std::vector<std::pair<std::pair<int, int>, double>> terms;
        for (const auto& t : get<std::vector<std::vector<double>>>(node, "terms", where)) {
            if (t.size() != 3) fail(where + ": polynomial terms are [i, j, coefficient]");
            terms.push_back({{static_cast<int>(t[0]), static_cast<int>(t[1])}, t[2]});
        }
        return ScalarField::polynomial(terms, chart);
    }
    if (kind == "log_conformal") {
        check_keys(node, {"kind", "value"}, where);
        const double c = get<double>(node, "value", where);
        if (!(c > 0.0)) fail(where + ": log_conformal needs a positive value");
        return ScalarField::log_conformal(c, chart);
    }
    if (kind == "log_distance") {
        check_keys(node, {"kind"}, where);
        return ScalarField::log_distance(chart);
    }
    if (kind == "uniformizing") {
        check_keys(node, {"kind", "map"}, where);
        const CircleMap phi = parse_circle_map(node["map"], chart);
        if (uniformizing) *uniformizing = phi;
        return reference_pullback_factor(reference, phi);
    }
    if (kind == "sum") {
        check_keys(node, {"kind", "terms"}, where);
        const YAML::Node terms = node["terms"];
        if (!terms || !terms.IsSequence() || terms.size() == 0) fail(where + ": sum needs a list of terms");
        ScalarField f = parse_field(terms[0], chart, reference);
        for (std::size_t i = 1; i < terms.size(); ++i) f = f + parse_field(terms[i], chart, reference);
        return f;
    }
    fail(where + ": unknown kind '" + kind + "'");
}

MetricSpec parse_metric(const YAML::Node& node) {
    const std::string where = "metric";
    check_keys(node, {"reference", "chart", "factor"}, where);
    const Reference ref = parse_reference(get_or<std::string>(node, "reference", "desitter", where), where);
    const Chart chart = parse_chart(get_or<std::string>(node, "chart", "affine", where), where);
    MetricSpec spec;
    std::optional<CircleMap> map;
    ScalarField u = parse_field(node["factor"], chart, ref, &map);
    spec.metric = SplitMetric(ref, u, chart);
    spec.uniformizing = map;
    return spec;
}

PositiveCurve parse_curve(const YAML::Node& node) {
    const std::string where = "curve";
    check_keys(node, {"family", "psi", "phi"}, where);
    PositiveCurve c;
    c.family = curve_family_from_string(get_or<std::string>(node, "family", "po22", where));
    if (node["psi"]) c.psi = parse_circle_map(node["psi"], Chart::Angular);
    if (node["phi"]) {
        if (c.family == CurveFamily::PSL3) fail(where + ": the PSL3 family takes only psi");
        c.phi = parse_circle_map(node["phi"], Chart::Angular);
    }
    return c;
}

RunConfig parse_config(const YAML::Node& root) {
    RunConfig cfg;
    if (!root || root.IsNull()) return cfg;
    try {
        check_keys(root, {"grid", "metrics", "epstein", "curve", "tolerances", "seed"}, "config");
        if (const YAML::Node g = root["grid"]) {
            check_keys(g, {"level", "band_cells", "box", "csv"}, "grid");
            cfg.grid.level = get_or<int>(g, "level", cfg.grid.level, "grid");
            cfg.grid.band_cells = get_or<int>(g, "band_cells", cfg.grid.band_cells, "grid");
            if (g["box"]) cfg.grid.box = parse_box(g, "box", "grid");
            if (g["csv"]) cfg.grid.csv = get<std::string>(g, "csv", "grid");
        }
        if (const YAML::Node m = root["metrics"]) {
            if (!m.IsSequence()) fail("metrics: expected a list");
            for (const auto& item : m) cfg.metrics.push_back(parse_metric(item));
        }
        if (const YAML::Node e = root["epstein"]) {
            check_keys(e, {"metric", "box", "samples"}, "epstein");
            if (e["metric"]) cfg.epstein.metric = parse_metric(e["metric"]);
            if (e["box"]) cfg.epstein.box = parse_box(e, "box", "epstein");
            cfg.epstein.samples = get_or<int>(e, "samples", cfg.epstein.samples, "epstein");
        }
        if (const YAML::Node c = root["curve"]) cfg.curve = parse_curve(c);
        if (const YAML::Node t = root["tolerances"]) {
            if (!t.IsMap()) fail("tolerances: expected a mapping");
            const auto& names = known_tolerances();
            for (const auto& kv : t) {
                const auto key = kv.first.as<std::string>();
                if (std::find(names.begin(), names.end(), key) == names.end()) {
                    fail("tolerances: unknown key '" + key + "'");
                }
                const double v = get<double>(t, key, "tolerances");
                if (!(v > 0.0)) fail("tolerances: '" + key + "' must be positive");
                cfg.tolerances[key] = v;
            }
        }
        if (root["seed"]) cfg.seed = get<std::uint64_t>(root, "seed", "config");
    } catch (const YAML::Exception& e) {
        fail(std::string("malformed config: ") + e.what());
    }
    if (cfg.grid.level < 0 || cfg.grid.level > 8) fail("grid: level must lie in [0, 8]");
    if (cfg.grid.band_cells < 0) fail("grid: band_cells must be non-negative");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::Exception& e) {
        fail("cannot read config '" + path + "': " + e.what());
    }
    return parse_config(root);
}

}  // namespace splitann::cli
