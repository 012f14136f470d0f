#include "curvlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unsupported/Eigen/FFT>

#include "curvlab/errors.hpp"
#include "curvlab/models.hpp"

namespace curvlab {

namespace {

constexpr double pi = std::numbers::pi;

[[noreturn]] void field_error(const std::string& key, const std::string& what) {
  throw CurvError(ErrorKind::Parse, "field '" + key + "': " + what);
}

std::pair<int, int> line_col(const std::string& text, size_t byte) {
  int line = 1, col = 1;
  for (size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

std::vector<double> split_doubles(const std::string& s, char sep) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CurvError(ErrorKind::Parse, "not a number: '" + item + "'");
    }
  }
  return v;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {
      "verify-vstatic", "spectra",        "solve-bvp",          "yamabe",          "continuity-check", "kobayashi",
      "prescribe-disk", "prescribe-cylinder", "local-prescribe", "min-max",         "report-all"};
  return names;
}

RunConfig parse_config(const std::string& text) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos)
    throw CurvError(ErrorKind::Parse, "empty configuration");
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    throw CurvError(ErrorKind::Parse,
                    "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
  }
  if (!j.is_object()) throw CurvError(ErrorKind::Parse, "configuration must be a JSON object");
  RunConfig c;
  if (!j.contains("subcommand")) field_error("subcommand", "missing");
  if (!j["subcommand"].is_string()) field_error("subcommand", "expected a string");
  c.subcommand = j["subcommand"];
  const auto& names = subcommands();
  if (std::find(names.begin(), names.end(), c.subcommand) == names.end())
    field_error("subcommand", "unknown value '" + c.subcommand + "'");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "subcommand" && it.key() != "seed" && it.key() != "out" && it.key() != "params")
      field_error(it.key(), "unknown field");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) field_error("seed", "expected a non-negative integer");
    c.seed = j["seed"];
  }
  if (j.contains("out")) {
    if (!j["out"].is_string()) field_error("out", "expected a string");
    c.out_dir = j["out"];
  }
  if (j.contains("params")) {
    if (!j["params"].is_object()) field_error("params", "expected an object");
    c.params = j["params"];
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CurvError(ErrorKind::Parse, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const CurvError& e) {
    throw CurvError(ErrorKind::Parse, path.string() + ": " + e.what());
  }
}

std::string resolve_out_dir(const std::string& explicit_dir, const std::string& configured) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (const char* env = std::getenv("CURVLAB_OUT"); env && *env) return env;
  return configured.empty() ? "out" : configured;
}

double get_double(const Json& p, const std::string& key, double fallback) {
  if (!p.contains(key)) return fallback;
  if (!p[key].is_number()) field_error(key, "expected a number");
  return p[key].get<double>();
}

int get_int(const Json& p, const std::string& key, int fallback) {
  if (!p.contains(key)) return fallback;
  if (!p[key].is_number_integer()) field_error(key, "expected an integer");
  return p[key].get<int>();
}

std::string get_string(const Json& p, const std::string& key, const std::string& fallback) {
  if (!p.contains(key)) return fallback;
  if (!p[key].is_string()) field_error(key, "expected a string");
  return p[key].get<std::string>();
}

std::vector<double> get_doubles(const Json& p, const std::string& key, const std::vector<double>& fallback) {
  if (!p.contains(key)) return fallback;
  const auto& v = p[key];
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) field_error(key, "expected a number or an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) field_error(key, "expected numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<int> get_ints(const Json& p, const std::string& key, const std::vector<int>& fallback) {
  if (!p.contains(key)) return fallback;
  const auto& v = p[key];
  if (v.is_number_integer()) return {v.get<int>()};
  if (!v.is_array()) field_error(key, "expected an integer or an array of integers");
  std::vector<int> out;
  for (const auto& x : v) {
    if (!x.is_number_integer()) field_error(key, "expected integers");
    out.push_back(x.get<int>());
  }
  return out;
}

TrigSeries parse_trig(const Json& j) {
  if (!j.is_object()) field_error("target", "expected an object");
  TrigSeries f;
  if (j.contains("samples")) {
    auto s = get_doubles(j, "samples", {});
    const int N = static_cast<int>(s.size());
    if (N < 1) field_error("samples", "empty table");
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> c;
    std::vector<double> in(s.begin(), s.end());
    fft.fwd(c, in);
    f.a0 = c[0].real() / N;
    for (int k = 1; 2 * k < N; ++k) {
      f.a.push_back(2.0 * c[k].real() / N);
      f.b.push_back(-2.0 * c[k].imag() / N);
    }
    return f;
  }
  f.a0 = get_double(j, "a0", 0.0);
  f.a = get_doubles(j, "a", {});
  f.b = get_doubles(j, "b", {});
  return f;
}

Json trig_to_json(const TrigSeries& f) { return Json{{"a0", f.a0}, {"a", f.a}, {"b", f.b}}; }

TrigSeries parse_trig_text(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';')) parts.push_back(item);
  if (parts.empty() || parts.size() > 3) throw CurvError(ErrorKind::Parse, "expected 'a0;a1,a2,...;b1,b2,...'");
  TrigSeries f;
  auto a0 = split_doubles(parts[0], ',');
  if (a0.size() != 1) throw CurvError(ErrorKind::Parse, "a0 must be a single number");
  f.a0 = a0[0];
  if (parts.size() > 1) f.a = split_doubles(parts[1], ',');
  if (parts.size() > 2) f.b = split_doubles(parts[2], ',');
  return f;
}

CylinderSpec parse_cylinder_target(const Json& j) {
  CylinderSpec s;
  if (j.is_string() || (j.is_object() && j.contains("name"))) {
    const std::string name = j.is_string() ? j.get<std::string>() : get_string(j, "name", "");
    s.label = name;
    if (name == "zero")
      s.f = [](double, double) { return 0.0; };
    else if (name == "one")
      s.f = [](double, double) { return 1.0; };
    else if (name == "cos2pit")
      s.f = [](double t, double) { return std::cos(2.0 * pi * t); };
    else
      field_error("name", "unknown cylinder target '" + name + "'");
    return s;
  }
  if (!j.is_object() || !j.contains("coeffs") || !j["coeffs"].is_array())
    field_error("target", "expected {\"name\": ...} or {\"coeffs\": [[...]]}");
  std::vector<std::vector<double>> c;
  for (const auto& row : j["coeffs"]) {
    if (!row.is_array()) field_error("coeffs", "rows must be arrays");
    std::vector<double> r;
    for (const auto& x : row) {
      if (!x.is_number()) field_error("coeffs", "expected numbers");
      r.push_back(x.get<double>());
    }
    if (r.size() > 1) s.axial = false;
    c.push_back(r);
  }
  s.label = "fourier-chebyshev";
  s.f = [c](double t, double th) {
    const double x = 2.0 * t - 1.0;
    double Tkm1 = 1.0, Tk = x, val = 0.0;
    for (size_t k = 0; k < c.size(); ++k) {
      double T = k == 0 ? 1.0 : (k == 1 ? x : 2.0 * x * Tk - Tkm1);
      if (k >= 2) {
        Tkm1 = Tk;
        Tk = T;
      }
      double ang = c[k].empty() ? 0.0 : c[k][0];
      for (size_t m = 1; 2 * m - 1 < c[k].size(); ++m) {
        ang += c[k][2 * m - 1] * std::cos(m * th);
        if (2 * m < c[k].size()) ang += c[k][2 * m] * std::sin(m * th);
      }
      val += T * ang;
    }
    return val;
  };
  return s;
}

WarpedMetric parse_metric_name(const std::string& name, int n) {
  Json j{{"name", name}, {"n", n}};
  return parse_metric(j);
}

WarpedMetric parse_metric(const Json& j) {
  if (j.is_string()) return parse_metric(Json{{"name", j}});
  if (!j.is_object()) field_error("metric", "expected a name or an object");
  const std::string name = get_string(j, "name", "unit-ball");
  const int n = get_int(j, "n", 3);
  if (n < 3) field_error("n", "dimension must be at least 3");
  const int nodes = get_int(j, "nodes", 40);
  const double R = get_double(j, "R", 1.0);
  if (name == "unit-ball") return unit_ball(n, nodes);
  if (name == "hemisphere") return hemisphere(n, nodes);
  if (name == "spherical-cap") return spherical_cap(n, R, nodes);
  if (name == "hyperbolic-cap") return hyperbolic_cap(n, R, nodes);
  if (name == "euclidean-ball") return euclidean_ball(n, R, nodes);
  if (name == "flat-cylinder") return flat_cylinder(n, R, nodes);
  if (name == "hyperbolic-product") return hyperbolic_product(n, R, get_double(j, "area", 1.0), nodes);
  if (name == "neck") return scalar_flat_neck(n, get_double(j, "half_width", 0.5), get_double(j, "phi_b", 0.9));
  field_error("name", "unknown metric '" + name + "'");
}

}  // namespace curvlab
