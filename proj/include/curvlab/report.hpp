#pragma once
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace curvlab {

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tol = 0.0;
  std::string note;
  bool required = true;  // supplementary checks do not enter the overall status
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Series {
  std::string name;
  std::vector<double> x, y;
};

struct Plot {
  std::string name, title, xlabel, ylabel;
  std::vector<Series> series;
  bool logy = false;
};

struct RunReport {
  std::string subcommand;
  std::vector<Check> checks;
  std::vector<Table> tables;
  std::vector<Plot> plots;
  nlohmann::json details = nlohmann::json::object();
  double runtime = 0.0;  // seconds; printed, never written to artifacts
  std::vector<RunReport> parts;  // sub-runs of an aggregate report

  bool pass() const;
  void add(Check c) { checks.push_back(std::move(c)); }
  // value < tol
  void bound(const std::string& name, double value, double tol, const std::string& note = {});
  void flag(const std::string& name, bool ok, const std::string& note = {}, double value = 0.0);
  const Check* find(const std::string& name) const;
};

std::string environment_stamp();
std::string to_csv(const Table& t);
std::string to_svg(const Plot& p);
// no runtime, so equal inputs give equal bytes
nlohmann::json to_json(const RunReport& r);
// <dir>/<subcommand>.json, <dir>/<subcommand>_<table>.csv, <dir>/<subcommand>_<plot>.svg, then the parts
std::vector<std::filesystem::path> write_artifacts(const RunReport& r, const std::filesystem::path& dir);
std::string format_check(const Check& c);

}  // namespace curvlab
