#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "curvlab/errors.hpp"
#include "curvlab/pipelines.hpp"

using namespace curvlab;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  int id;
  std::string title;
  std::string subcommand;
  std::vector<std::string> checks;  // a trailing '*' matches a prefix
  double limit;                     // seconds
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {1, "V-static certification", "verify-vstatic",
       {"vstatic.certified", "vstatic.interior", "vstatic.boundary", "certify.*"}, 5.0},
      {2, "Green identity", "verify-vstatic", {"green.relative"}, 10.0},
      {3, "trace identity", "verify-vstatic", {"trace.interior", "trace.boundary"}, 5.0},
      {4, "Steklov ground truth", "spectra", {"steklov.ground_truth", "steklov.affine_shift"}, 2.0},
      {5, "monotone iteration on the unit ball", "solve-bvp",
       {"monotone.bracket", "monotone.residual", "monotone.agreement"}, 30.0},
      {6, "derivative equation", "solve-bvp", {"derivative.order", "derivative.gap"}, 20.0},
      {7, "conformal consistency", "yamabe", {"consistency.relative"}, 5.0},
      {8, "continuity of the Yamabe estimate", "continuity-check", {"continuity.distance", "continuity.inside"}, 60.0},
      {9, "sphere factor", "kobayashi", {"factor.*"}, 10.0},
      {10, "disk, f = 2 pi + sin", "prescribe-disk", {"disk.length", "disk.curvature", "disk.gauss_bonnet"}, 10.0},
      {11, "cylinder, f = cos 2 pi t", "prescribe-cylinder", {"cylinder.*"}, 30.0},
      {12, "local prescription", "local-prescribe", {"local.*"}, 20.0},
      {13, "approximation by pullback", "min-max", {"pullback.*"}, 5.0},
  };
  return list;
}

bool matches(const std::string& pattern, const std::string& name) {
  if (!pattern.empty() && pattern.back() == '*') return name.rfind(pattern.substr(0, pattern.size() - 1), 0) == 0;
  return pattern == name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// byte comparison of the CSV and JSON artifacts of two directories
std::string compare_dirs(const fs::path& a, const fs::path& b, int& compared) {
  std::set<std::string> na, nb;
  for (const auto& e : fs::directory_iterator(a))
    if (e.path().extension() == ".csv" || e.path().extension() == ".json") na.insert(e.path().filename().string());
  for (const auto& e : fs::directory_iterator(b))
    if (e.path().extension() == ".csv" || e.path().extension() == ".json") nb.insert(e.path().filename().string());
  if (na != nb) return "artifact sets differ";
  if (na.empty()) return "no artifacts";
  compared = static_cast<int>(na.size());
  for (const auto& n : na)
    if (slurp(a / n) != slurp(b / n)) return n + " differs";
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite"};
  std::vector<int> known;
  std::string out;
  unsigned seed = 7;
  app.add_option("--known-infeasible", known, "criteria excluded from the exit status")->delimiter(',');
  app.add_option("--out", out, "artifact directory (default: a temporary directory)");
  app.add_option("--seed", seed, "seed for the sweeps");
  CLI11_PARSE(app, argc, argv);

  const fs::path root = out.empty() ? fs::temp_directory_path() / ("curvlab-acceptance-" + std::to_string(getpid()))
                                    : fs::path(out);
  fs::create_directories(root);

  std::map<std::string, RunReport> reports;
  std::map<std::string, std::string> errors;
  auto report_for = [&](const std::string& sub) -> const RunReport* {
    if (!reports.count(sub) && !errors.count(sub)) {
      RunConfig cfg;
      cfg.subcommand = sub;
      cfg.seed = seed;
      try {
        reports[sub] = run(cfg);
        write_artifacts(reports[sub], root / "runs");
      } catch (const std::exception& e) {
        errors[sub] = e.what();
      }
    }
    return reports.count(sub) ? &reports[sub] : nullptr;
  };

  int failed_required = 0, failed = 0;
  auto verdict = [&](int id, bool pass, const std::string& title, const std::string& detail) {
    const bool excused = std::find(known.begin(), known.end(), id) != known.end();
    std::printf("%s %2d %s: %s%s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str(),
                !pass && excused ? "  [known infeasible]" : "");
    if (!pass) {
      ++failed;
      if (!excused) ++failed_required;
    }
  };

  for (const auto& c : criteria()) {
    const RunReport* r = report_for(c.subcommand);
    if (!r) {
      verdict(c.id, false, c.title, "run aborted: " + errors[c.subcommand]);
      continue;
    }
    bool pass = true;
    std::ostringstream detail;
    int used = 0;
    for (const auto& pat : c.checks)
      for (const auto& k : r->checks) {
        if (!matches(pat, k.name)) continue;
        ++used;
        if (!k.pass) {
          pass = false;
          detail << k.name << " failed (" << k.note << "); ";
        }
      }
    if (used == 0) {
      pass = false;
      detail << "no matching checks; ";
    }
    const bool in_time = r->runtime < c.limit;
    pass = pass && in_time;
    char t[96];
    std::snprintf(t, sizeof t, "%d checks, %.2f s (limit %.0f s)", used, r->runtime, c.limit);
    detail << t << (in_time ? "" : " over the time limit");
    verdict(c.id, pass, c.title, detail.str());
    for (const auto& k : r->checks)
      if (!k.required && ((c.id == 5 && k.name.rfind("monotone.neck", 0) == 0) ||
                          (c.id == 10 && k.name.rfind("disk.four_vertex", 0) == 0)))
        std::printf("        supplementary %s\n", format_check(k).c_str());
  }

  // determinism: report-all twice with the same seed
  {
    const auto t0 = std::chrono::steady_clock::now();
    std::string err;
    int compared = 0;
    try {
      for (const char* d : {"report-a", "report-b"}) {
        RunConfig cfg;
        cfg.subcommand = "report-all";
        cfg.seed = 7;
        fs::remove_all(root / d);
        write_artifacts(run(cfg), root / d);
      }
      err = compare_dirs(root / "report-a", root / "report-b", compared);
    } catch (const std::exception& e) {
      err = e.what();
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char t[96];
    std::snprintf(t, sizeof t, "%d CSV/JSON files byte-identical, %.2f s", compared, dt);
    verdict(14, err.empty(), "determinism of report-all --seed 7", err.empty() ? t : err);
  }

  std::printf("%d of 14 criteria failed; %d outside the known-infeasible list\n", failed, failed_required);
  if (out.empty())
    fs::remove_all(root);
  else
    std::printf("artifacts in %s\n", root.string().c_str());
  return failed_required == 0 ? 0 : 1;
}
