#include "curvlab/report.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "curvlab/errors.hpp"

namespace curvlab {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

nlohmann::json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  return num(v);
}

void write_file(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw CurvError(ErrorKind::Invalid, "cannot write " + p.string());
  out << s;
}

}  // namespace

bool RunReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return !c.required || c.pass; });
}

void RunReport::bound(const std::string& name, double value, double tol, const std::string& note) {
  add({name, std::isfinite(value) && value < tol, value, tol, note, true});
}

void RunReport::flag(const std::string& name, bool ok, const std::string& note, double value) {
  add({name, ok, value, 0.0, note, true});
}

const Check* RunReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::string environment_stamp() {
  std::ostringstream s;
  s << "g++ " << __VERSION__ << "; Eigen " << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.'
    << EIGEN_MINOR_VERSION << "; C++ " << __cplusplus;
#ifdef NDEBUG
  s << "; release";
#else
  s << "; debug";
#endif
  return s.str();
}

std::string to_csv(const Table& t) {
  std::string out;
  for (size_t j = 0; j < t.columns.size(); ++j) out += (j ? "," : "") + t.columns[j];
  out += '\n';
  for (const auto& row : t.rows) {
    for (size_t j = 0; j < row.size(); ++j) out += (j ? "," : "") + num(row[j]);
    out += '\n';
  }
  return out;
}

std::string to_svg(const Plot& p) {
  const double W = 640, H = 400, L = 70, R = 20, T = 40, B = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  auto ty = [&](double y) { return p.logy ? std::log10(std::max(y, 1e-300)) : y; };
  for (const auto& s : p.series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  auto X = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto Y = [&](double y) { return H - B - (ty(y) - y0) / (y1 - y0) * (H - T - B); };
  static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << p.title << "</text>\n";
  s << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << p.xlabel << "</text>\n";
  s << "<text x=\"16\" y=\"" << H / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << H / 2 << ")\">"
    << p.ylabel << (p.logy ? " (log10)" : "") << "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    double xv = x0 + (x1 - x0) * k / 4, yv = y0 + (y1 - y0) * k / 4;
    double py = H - B - (H - T - B) * k / 4.0;
    s << "<text x=\"" << X(xv) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << short_num(xv) << "</text>\n";
    s << "<text x=\"" << L - 6 << "\" y=\"" << py + 4 << "\" text-anchor=\"end\">" << short_num(yv) << "</text>\n";
  }
  for (size_t k = 0; k < p.series.size(); ++k) {
    const auto& sr = p.series[k];
    const char* col = colours[k % 6];
    s << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < sr.x.size(); ++i) {
      if (!std::isfinite(sr.x[i]) || !std::isfinite(sr.y[i])) continue;
      s << short_num(X(sr.x[i])) << ',' << short_num(Y(sr.y[i])) << ' ';
    }
    s << "\"/>\n";
    s << "<text x=\"" << W - R - 4 << "\" y=\"" << T + 14 * (k + 1) << "\" text-anchor=\"end\" fill=\"" << col
      << "\">" << sr.name << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

nlohmann::json to_json(const RunReport& r) {
  nlohmann::json j;
  j["subcommand"] = r.subcommand;
  j["status"] = r.pass() ? "pass" : "fail";
  j["environment"] = environment_stamp();
  auto& cs = j["checks"] = nlohmann::json::array();
  for (const auto& c : r.checks)
    cs.push_back({{"name", c.name},
                  {"status", c.pass ? "pass" : "fail"},
                  {"value", finite_or_string(c.value)},
                  {"tol", finite_or_string(c.tol)},
                  {"required", c.required},
                  {"note", c.note}});
  j["details"] = r.details;
  return j;
}

std::vector<std::filesystem::path> write_artifacts(const RunReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> files;
  auto put = [&](const std::string& name, const std::string& body) {
    auto p = dir / name;
    write_file(p, body);
    files.push_back(p);
  };
  put(r.subcommand + ".json", to_json(r).dump(2) + "\n");
  for (const auto& t : r.tables) put(r.subcommand + "_" + t.name + ".csv", to_csv(t));
  for (const auto& p : r.plots) put(r.subcommand + "_" + p.name + ".svg", to_svg(p));
  for (const auto& part : r.parts) {
    auto sub = write_artifacts(part, dir);
    files.insert(files.end(), sub.begin(), sub.end());
  }
  return files;
}

std::string format_check(const Check& c) {
  std::ostringstream s;
  s << (c.pass ? "PASS " : "FAIL ") << c.name;
  if (c.tol > 0.0) s << "  value " << short_num(c.value) << " (tol " << short_num(c.tol) << ")";
  if (!c.required) s << "  [supplementary]";
  if (!c.note.empty()) s << "  " << c.note;
  return s.str();
}

}  // namespace curvlab
