#include <cmath>

#include "curvlab/errors.hpp"
#include "curvlab/prescriber.hpp"
#include "curvlab/spectra.hpp"

namespace curvlab {

namespace {

struct Problem {
  GeneralRadialMetric g0;
  Vec f1;
  std::vector<double> H0;
  int m = 0;
};

GeneralRadialMetric apply(const Problem& p, const Vec& x) {
  Vec A = p.g0.A.array() * (2.0 * x.head(p.m)).array().exp();
  Vec B = p.g0.B.array() * (2.0 * x.tail(p.m)).array().exp();
  return make_general(p.g0.n, p.g0.cross, p.g0.grid, A, B);
}

Vec residual(const Problem& p, const Vec& x) {
  auto g = apply(p, x);
  auto rep = curvature_report(g);
  const int nb = static_cast<int>(p.H0.size());
  const bool cap = p.g0.grid.is_cap();
  Vec F(p.m + nb + 1 + (cap ? 1 : 0));
  F.head(p.m) = rep.scal - p.f1;
  for (int b = 0; b < nb; ++b) F(p.m + b) = rep.boundaries[b].H - p.H0[b];
  F(p.m + nb) = rep.volume - 1.0;
  if (cap) F(p.m + nb + 1) = p.g0.grid.interpolate(x.head(p.m), 0.0) - p.g0.grid.interpolate(x.tail(p.m), 0.0);
  return F;
}

// linearisation must be injective for the local solve to be stable
void injectivity(const GeneralRadialMetric& g0, const CurvatureReport& rep, LocalResult& out) {
  const int n = g0.n;
  const double R0 = rep.scal.mean();
  double H0 = 0.0;
  for (const auto& b : rep.boundaries) H0 = std::max(H0, std::abs(b.H));
  const double tiny = 1e-10;
  if (H0 < tiny) {
    if (std::abs(R0) < tiny) {
      double ric = rep.ric_rad.cwiseAbs().maxCoeff() + rep.ric_tan.cwiseAbs().maxCoeff();
      out.proxy = "ricci";
      out.injectivity_witness = ric;
      if (ric > tiny) return;
    } else {
      out.proxy = "neumann";
      out.injectivity_witness = neumann_spectrum(g0, R0, 3, 2).min_eigenvalue() / (n - 1);
      if (out.injectivity_witness > tiny) return;
    }
  } else if (std::abs(R0) < tiny) {
    out.proxy = "steklov";
    out.injectivity_witness = steklov_spectrum(g0, rep.boundaries.front().H, 3).min_eigenvalue();
    if (out.injectivity_witness > tiny) return;
  } else {
    out.proxy = "none";
    out.injectivity_witness = 0.0;
  }
  throw CurvError(ErrorKind::Obstruction, "linearised prescription map is not injective (" + out.proxy + ")",
                  out.injectivity_witness);
}

}  // namespace

LocalResult local_prescribe_radial(const WarpedMetric& w0, const Vec& f1, double eta, const LocalOptions& opt) {
  Problem p;
  auto gw = to_general(w0);
  p.g0 = make_general(gw.n, gw.cross, gw.grid, gw.A, gw.B);
  p.m = p.g0.grid.size();
  if (f1.size() != p.m) throw CurvError(ErrorKind::GridMismatch, "target does not match the metric grid");
  if (!(eta > 0.0)) throw CurvError(ErrorKind::Domain, "eta must be positive", eta);
  auto rep0 = curvature_report(p.g0);
  if (std::abs(rep0.volume - 1.0) > 1e-8)
    throw CurvError(ErrorKind::Precondition, "base metric must have unit volume", rep0.volume);
  const double dist = (f1 - rep0.scal).cwiseAbs().maxCoeff();
  if (!(dist < eta)) throw CurvError(ErrorKind::Precondition, "target is not within eta of R(g0)", dist);
  for (const auto& b : rep0.boundaries) p.H0.push_back(b.H);
  p.f1 = f1;

  LocalResult out;
  injectivity(p.g0, rep0, out);

  const int nx = 2 * p.m;
  Vec x = Vec::Zero(nx);
  Vec F = residual(p, x);
  double res = F.cwiseAbs().maxCoeff();
  out.history.push_back(res);
  const double h = 1e-6;
  while (res > opt.tol && out.steps < opt.max_iter) {
    Mat J(F.size(), nx);
    for (int k = 0; k < nx; ++k) {
      Vec xp = x, xm = x;
      xp(k) += h;
      xm(k) -= h;
      J.col(k) = (residual(p, xp) - residual(p, xm)) / (2.0 * h);
    }
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(J);
    cod.setThreshold(1e-10);
    Vec d = cod.solve(-F);
    double step = 1.0, trial = res;
    Vec xn, Fn;
    for (int k = 0; k < 30; ++k) {
      xn = x + step * d;
      Fn = residual(p, xn);
      trial = Fn.cwiseAbs().maxCoeff();
      if (std::isfinite(trial) && trial < res) break;
      step *= 0.5;
    }
    if (!(trial < res)) break;
    x = xn;
    F = Fn;
    res = trial;
    ++out.steps;
    out.history.push_back(res);
    const double size = x.cwiseAbs().maxCoeff();
    if (size > opt.trust)
      throw CurvError(ErrorKind::EtaTooLarge, "correction left the trust region; reduce eta", size);
  }
  if (!(res < opt.tol * 100.0))
    throw CurvError(ErrorKind::EtaTooLarge, "local Newton did not converge; reduce eta", res);

  out.g = apply(p, x);
  const int nb = static_cast<int>(p.H0.size());
  out.res_R = F.head(p.m).cwiseAbs().maxCoeff();
  out.res_H = nb ? F.segment(p.m, nb).cwiseAbs().maxCoeff() : 0.0;
  out.res_vol = std::abs(F(p.m + nb));
  return out;
}

}  // namespace curvlab
