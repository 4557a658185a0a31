#pragma once

#include <yaml-cpp/yaml.h>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "splitann/curves.hpp"
#include "splitann/fields.hpp"
#include "splitann/lorentz.hpp"

namespace splitann::cli {

struct GridSpec {
    int level = 3;
    int band_cells = 1;
    std::optional<Box> box;
    std::optional<std::string> csv;
};

struct MetricSpec {
    SplitMetric metric = SplitMetric::desitter();
    // Set when the factor is the uniformizing factor of this map.
    std::optional<CircleMap> uniformizing;
};

struct EpsteinSpec {
    std::optional<MetricSpec> metric;
    std::optional<Box> box;
    int samples = 32;
};

struct RunConfig {
    GridSpec grid;
    std::vector<MetricSpec> metrics;
    EpsteinSpec epstein;
    std::optional<PositiveCurve> curve;
    std::map<std::string, double> tolerances;
    std::uint64_t seed = 20240611;
    double tolerance_scale = 1.0;

    // Named tolerance times tolerance_scale.
    double tolerance(const std::string& name, double fallback) const;
};

// Tolerance names accepted under `tolerances:`.
const std::vector<std::string>& known_tolerances();

// Throws Error(ConfigError) on unknown keys, bad values or missing sections.
RunConfig parse_config(const YAML::Node& root);
RunConfig load_config(const std::string& path);

CircleMap parse_circle_map(const YAML::Node& node, Chart chart = Chart::Angular);
ScalarField parse_field(const YAML::Node& node, Chart chart, Reference reference,
                        std::optional<CircleMap>* uniformizing = nullptr);
MetricSpec parse_metric(const YAML::Node& node);
PositiveCurve parse_curve(const YAML::Node& node);

}  // namespace splitann::cli
