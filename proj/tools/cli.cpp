#include <cstdio>
#include <iostream>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "curvlab/config.hpp"
#include "curvlab/errors.hpp"
#include "curvlab/pipelines.hpp"

using namespace curvlab;

namespace {

// subcommand options land in params only when given
struct Overrides {
  std::map<std::string, std::string> text;
  std::map<std::string, double> num;
  std::map<std::string, int> ints;
  std::vector<int> dims;
  std::string metric, target, f, h;
  std::optional<int> n;
};

void apply_overrides(const Overrides& o, Json& p) {
  for (const auto& [k, v] : o.text) p[k] = v;
  for (const auto& [k, v] : o.num) p[k] = v;
  for (const auto& [k, v] : o.ints) p[k] = v;
  if (!o.metric.empty()) {
    Json m = p.contains("metric") && p["metric"].is_object() ? p["metric"] : Json::object();
    m["name"] = o.metric;
    if (o.n) m["n"] = *o.n;
    p["metric"] = m;
  } else if (o.n && p.contains("metric") && p["metric"].is_object()) {
    p["metric"]["n"] = *o.n;
  }
  if (!o.dims.empty()) p["n"] = o.dims;
  if (!o.f.empty()) p["f"] = trig_to_json(parse_trig_text(o.f));
  if (!o.h.empty()) p["h"] = trig_to_json(parse_trig_text(o.h));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curvlab: curvature prescription and V-static metric laboratory"};
  app.fallthrough();
  app.require_subcommand(0, 1);
  std::string config_path, out_flag;
  unsigned seed = 7;
  bool seed_given = false;
  std::vector<std::string> raw_params;
  bool quiet = false;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", out_flag, "artifact directory (overrides CURVLAB_OUT)");
  app.add_option_function<unsigned>("--seed", [&](unsigned s) { seed = s; seed_given = true; }, "random seed for sweeps");
  app.add_option("--param", raw_params, "extra parameter key=<json value>");
  app.add_flag("--quiet", quiet, "print only the overall status");

  Overrides ov;
  std::map<std::string, CLI::App*> subs;
  auto sub = [&](const std::string& name, const std::string& help) {
    auto* s = app.add_subcommand(name, help);
    subs[name] = s;
    return s;
  };
  auto num = [&](CLI::App* s, const std::string& flag, const std::string& key, const std::string& help) {
    s->add_option_function<double>(flag, [&, key](double v) { ov.num[key] = v; }, help);
  };
  auto integer = [&](CLI::App* s, const std::string& flag, const std::string& key, const std::string& help) {
    s->add_option_function<int>(flag, [&, key](int v) { ov.ints[key] = v; }, help);
  };
  auto text = [&](CLI::App* s, const std::string& flag, const std::string& key, const std::string& help) {
    s->add_option_function<std::string>(flag, [&, key](const std::string& v) { ov.text[key] = v; }, help);
  };
  auto metric = [&](CLI::App* s) {
    s->add_option("--metric", ov.metric, "model metric name");
    s->add_option_function<int>("--n", [&](int v) { ov.n = v; }, "dimension");
  };

  auto* vs = sub("verify-vstatic", "certify the V-static catalogue, the traced system and the Green identity");
  text(vs, "--family", "family", "family name or 'all'");
  vs->add_option("--dims", ov.dims, "dimensions to sweep");
  integer(vs, "--draws", "draws", "random parameter draws per family and dimension");
  integer(vs, "--green-triples", "green_triples", "random (g, h, V) triples");

  auto* sp = sub("spectra", "Steklov or Neumann spectrum of a model metric");
  metric(sp);
  num(sp, "--c", "c", "constant c");
  integer(sp, "--kmax", "kmax", "largest mode");
  text(sp, "--problem", "problem", "steklov or neumann");

  auto* bvp = sub("solve-bvp", "monotone iteration for the conformal factor and its linearization");
  metric(bvp);
  num(bvp, "--c", "c", "class constant (default: H of the base metric)");
  integer(bvp, "--draws", "draws", "random radial perturbations");
  num(bvp, "--fd-t", "fd_t", "step of the symmetric difference probe");

  auto* ya = sub("yamabe", "conformal consistency of the Yamabe energy");
  integer(ya, "--draws", "draws", "random positive u per base metric");

  auto* co = sub("continuity-check", "continuity of the radial Yamabe estimate");
  metric(co);
  integer(co, "--pairs", "pairs", "number of perturbed pairs");
  num(co, "--dmax", "dmax", "largest admitted metric distance");

  auto* ko = sub("kobayashi", "sphere factor with a neck");
  integer(ko, "--dim", "n", "dimension");
  num(ko, "--eps1", "eps1", "neck parameter");
  num(ko, "--eps2", "eps2", "support radius");

  auto* pd = sub("prescribe-disk", "flat disk with prescribed geodesic curvature");
  std::string disk_target;
  pd->add_option("--target", disk_target, "trig series 'a0;a1,a2,...;b1,b2,...'");
  integer(pd, "--N", "N", "boundary nodes");

  auto* pc = sub("prescribe-cylinder", "cylinder with prescribed Gauss curvature and geodesic boundary");
  text(pc, "--target", "target", "zero, one or cos2pit");
  integer(pc, "--nt", "nt", "axial nodes");
  integer(pc, "--ntheta", "ntheta", "angular nodes");

  auto* lp = sub("local-prescribe", "local prescription of scalar curvature near a base metric");
  metric(lp);
  num(lp, "--amplitude", "amplitude", "bump amplitude");
  num(lp, "--eta", "eta", "admitted distance");

  auto* mm = sub("min-max", "approximation by pullback and the min-max disk pipeline");
  mm->add_option("--f", ov.f, "trig series for f");
  mm->add_option("--toward", ov.h, "trig series for h, the function approximated by f o phi");
  num(mm, "--eps", "eps", "approximation tolerance");
  num(mm, "--p", "p", "Lebesgue exponent");

  sub("report-all", "run every pipeline with its defaults");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    std::string chosen;
    for (const auto& [name, s] : subs)
      if (s->parsed()) chosen = name;
    if (chosen.empty() && config_path.empty()) {
      std::cout << app.help();
      return 2;
    }
    if (!chosen.empty()) {
      if (!config_path.empty() && cfg.subcommand != chosen)
        throw CurvError(ErrorKind::Parse, "configuration is for '" + cfg.subcommand + "', not '" + chosen + "'");
      cfg.subcommand = chosen;
    }
    if (seed_given) cfg.seed = seed;
    cfg.out_dir = resolve_out_dir(out_flag, cfg.out_dir);
    if (!disk_target.empty()) cfg.params["target"] = trig_to_json(parse_trig_text(disk_target));
    if (cfg.subcommand == "prescribe-cylinder" && ov.text.count("target")) {
      cfg.params["target"] = Json{{"name", ov.text["target"]}};
      ov.text.erase("target");
    }
    apply_overrides(ov, cfg.params);
    for (const auto& kv : raw_params) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw CurvError(ErrorKind::Parse, "--param expects key=value: '" + kv + "'");
      try {
        cfg.params[kv.substr(0, eq)] = Json::parse(kv.substr(eq + 1));
      } catch (const Json::parse_error&) {
        cfg.params[kv.substr(0, eq)] = kv.substr(eq + 1);
      }
    }
  } catch (const CurvError& e) {
    std::cerr << "error (" << error_kind_name(e.kind()) << "): " << e.what() << "\n";
    return 2;
  }

  try {
    const RunReport r = run(cfg);
    const auto files = write_artifacts(r, cfg.out_dir);
    if (!quiet)
      for (const auto& c : r.checks) std::cout << format_check(c) << "\n";
    std::printf("%s %s  (%zu checks, %.2f s, %zu artifacts in %s)\n", r.pass() ? "PASS" : "FAIL",
                cfg.subcommand.c_str(), r.checks.size(), r.runtime, files.size(), cfg.out_dir.c_str());
    return r.pass() ? 0 : 1;
  } catch (const CurvError& e) {
    std::cerr << "error (" << error_kind_name(e.kind()) << "): " << e.what() << "\n";
    return e.kind() == ErrorKind::Parse ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
