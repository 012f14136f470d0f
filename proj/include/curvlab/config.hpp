#pragma once
#include <filesystem>
#include <string>
#include <vector>

#include "curvlab/fourier.hpp"
#include "curvlab/geometry.hpp"
#include "curvlab/prescriber.hpp"
#include "json.hpp"

namespace curvlab {

using Json = nlohmann::json;

struct RunConfig {
  std::string subcommand;
  Json params = Json::object();
  std::string out_dir = "out";
  unsigned seed = 7;
};

const std::vector<std::string>& subcommands();

// JSON text: {"subcommand": ..., "seed": ..., "out": ..., "params": {...}}; parse errors carry line and column
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

// explicit flag, then CURVLAB_OUT, then the configured directory
std::string resolve_out_dir(const std::string& explicit_dir = {}, const std::string& configured = "out");

// typed lookups with field diagnostics
double get_double(const Json& p, const std::string& key, double fallback);
int get_int(const Json& p, const std::string& key, int fallback);
std::string get_string(const Json& p, const std::string& key, const std::string& fallback);
std::vector<double> get_doubles(const Json& p, const std::string& key, const std::vector<double>& fallback);
std::vector<int> get_ints(const Json& p, const std::string& key, const std::vector<int>& fallback);

// {"a0": c, "a": [...], "b": [...]} or {"samples": [f(2 pi j / N)]}
TrigSeries parse_trig(const Json& j);
Json trig_to_json(const TrigSeries& f);
// "a0;a1,a2,...;b1,b2,..." shorthand used on the command line
TrigSeries parse_trig_text(const std::string& s);

// cylinder targets: {"name": "zero" | "one" | "cos2pit"} or
// {"coeffs": [[...], ...]}: row k is the Chebyshev degree in 2t - 1, columns [a0, a1, b1, a2, b2, ...] in theta
struct CylinderSpec {
  CylinderTarget f;
  bool axial = true;
  std::string label;
};
CylinderSpec parse_cylinder_target(const Json& j);

// {"name": "unit-ball" | "hemisphere" | "spherical-cap" | "hyperbolic-cap" | "euclidean-ball" |
//           "flat-cylinder" | "hyperbolic-product" | "neck", "n": 3, "R": 1, "nodes": 40}
WarpedMetric parse_metric(const Json& j);
WarpedMetric parse_metric_name(const std::string& name, int n);

}  // namespace curvlab
