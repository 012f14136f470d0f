#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <unsupported/Eigen/FFT>

#include "curvlab/errors.hpp"
#include "curvlab/prescriber.hpp"

namespace curvlab {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * pi;

Vec min_norm_step(const Mat& J, const Vec& F) {
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(J);
  cod.setThreshold(1e-12);
  return cod.solve(-F);
}

ArcDensity make_density(const Vec& y, int K, int M) {
  ArcDensity d;
  d.v.a.assign(y.data(), y.data() + K);
  d.v.b.assign(y.data() + K, y.data() + 2 * K);
  Vec th = circle_nodes(M);
  Vec r(M);
  for (int j = 0; j < M; ++j) r(j) = std::exp(d.v(th(j)));
  d.v.a0 = -std::log(two_pi * r.mean());
  r /= two_pi * r.mean();
  Eigen::FFT<double> fft;
  std::vector<double> in(r.data(), r.data() + M);
  std::vector<std::complex<double>> out;
  fft.fwd(out, in);
  d.coef = Eigen::Map<CVec>(out.data(), M) / static_cast<double>(M);
  return d;
}

// turning defect and closure of the curve with curvature f o sigma
Vec curve_equations(const Vec& y, int K, int M, const Vec& fth) {
  ArcDensity d = make_density(y, K, M);
  Vec th = circle_nodes(M);
  Vec rho(M), g(M);
  for (int j = 0; j < M; ++j) {
    rho(j) = d.rho(th(j));
    g(j) = fth(j) * rho(j);
  }
  Vec T = primitive(g);
  std::complex<double> c = 0.0;
  for (int j = 0; j < M; ++j) c += rho(j) * std::polar(1.0, T(j));
  c *= two_pi / M;
  Vec E(3);
  E << two_pi * g.mean() - two_pi, c.real(), c.imag();
  return E;
}

struct DiskSystem {
  int N;
  Mat dtn, S;
  const ArcDensity* density;
  const CircleFn* f;
};

Vec disk_residual(const DiskSystem& s, const Vec& u, Vec* arc) {
  Vec eu = u.array().exp();
  Vec sv = s.S * eu;
  Vec k = (Vec::Ones(s.N) + s.dtn * u).cwiseQuotient(eu);
  Vec F(s.N + 1);
  for (int i = 0; i < s.N; ++i) F(i) = k(i) - (*s.f)(s.density->sigma(sv(i)));
  F(s.N) = two_pi / s.N * eu.sum() - 1.0;
  *arc = sv;
  return F;
}

// curve-based re-evaluation on the 4x grid
void certify(DiskBoundaryFactor& out, const CircleFn& f) {
  Vec uf = upsample(out.u, 4);
  double gb = 0.0, cl = 0.0;
  Vec k = disk_curvature_by_curve(uf, &gb, &cl);
  Vec sf = primitive(Vec(uf.array().exp()));
  double err = 0.0, slope = std::numeric_limits<double>::infinity();
  for (int i = 0; i < uf.size(); ++i) {
    double th = out.density.sigma(sf(i));
    err = std::max(err, std::abs(k(i) - f(th)));
    slope = std::min(slope, std::exp(uf(i)) / out.density.rho(th));
  }
  out.curvature_error = err;
  out.gauss_bonnet = gb;
  out.closure = cl;
  out.min_dpsi = slope;
}

// strict local maxima of a sampled periodic function
int count_maxima(const Vec& v) {
  const int M = static_cast<int>(v.size());
  const double tol = 1e-12 * std::max(1.0, v.cwiseAbs().maxCoeff());
  int n = 0;
  for (int j = 0; j < M; ++j) {
    double a = v((j + M - 1) % M), b = v(j);
    int k = (j + 1) % M;
    while (k != j && std::abs(v(k) - b) <= tol) k = (k + 1) % M;  // plateaus count once
    if (b > a + tol && b > v(k) + tol) ++n;
  }
  return n;
}

}  // namespace

int curvature_vertices(const CircleFn& f, int samples) {
  Vec th = circle_nodes(samples), v(samples);
  for (int j = 0; j < samples; ++j) v(j) = f(th(j));
  if (v.maxCoeff() - v.minCoeff() <= 1e-12 * std::max(1.0, v.cwiseAbs().maxCoeff())) return -1;
  return 2 * count_maxima(v);
}

double ArcDensity::tau(double theta) const {
  const int M = static_cast<int>(coef.size());
  double s = coef(0).real() * theta;
  for (int k = 1; k < M / 2; ++k) {
    std::complex<double> c = coef(k);
    if (std::abs(c) < 1e-18) continue;
    std::complex<double> e = std::polar(1.0, k * theta) - 1.0;
    s += 2.0 * (c * e / std::complex<double>(0.0, k)).real();
  }
  return s;
}

double ArcDensity::sigma(double s) const {
  const double wrap = std::floor(s);
  const double t = s - wrap;
  double lo = 0.0, hi = two_pi, th = two_pi * t;
  for (int it = 0; it < 100; ++it) {
    double g = tau(th) - t;
    if (std::abs(g) < 1e-15) break;
    (g < 0.0 ? lo : hi) = th;
    double next = th - g / rho(th);
    th = (next > lo && next < hi) ? next : 0.5 * (lo + hi);
    if (hi - lo < 1e-15) break;
  }
  return th + two_pi * wrap;
}

CurveReport close_curve(const CircleFn& f, const DiskOptions& opt, const CircleFn& log_density_guess) {
  const int K = opt.density_modes, M = opt.density_nodes;
  Vec th = circle_nodes(M);
  Vec fth(M);
  for (int j = 0; j < M; ++j) fth(j) = f(th(j));
  Vec guess = Vec::Zero(2 * K);
  if (log_density_guess) {
    std::vector<double> in(M);
    for (int j = 0; j < M; ++j) in[j] = log_density_guess(th(j));
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> c;
    fft.fwd(c, in);
    for (int k = 1; k <= K && k < M / 2; ++k) {
      guess(k - 1) = 2.0 * c[k].real() / M;
      guess(K + k - 1) = -2.0 * c[k].imag() / M;
    }
  }
  // spread of log rho beyond which the boundary is not resolved
  auto resolved = [&](const Vec& y) {
    if (y.cwiseAbs().maxCoeff() > 20.0) return false;
    ArcDensity d = make_density(y, K, M);
    Vec v = th.unaryExpr([&](double t) { return d.v(t); });
    return v.maxCoeff() - v.minCoeff() < 20.0;
  };
  // H^1 weights keep log rho smooth
  Vec w(2 * K);
  for (int k = 0; k < K; ++k) w(k) = w(K + k) = k + 1.0;
  const double h = 1e-7;
  CurveReport rep;
  std::mt19937 rng(7);
  std::normal_distribution<double> Z(0.0, 0.5);
  double best = std::numeric_limits<double>::infinity();
  for (int start = 0; start < 12; ++start) {
    Vec y = guess;
    if (start > 0)
      for (int k = 0; k < 2 * K; ++k) y(k) = Z(rng) / w(k);
    Vec E = curve_equations(y, K, M, fth);
    double res = E.norm(), lambda = 1e-3;
    int it = 0;
    // Levenberg-Marquardt: near uniform density the closure rows are almost flat
    for (; it < 400 && res > 1e-14; ++it) {
      Mat J(3, 2 * K);
      for (int k = 0; k < 2 * K; ++k) {
        Vec yp = y, ym = y;
        yp(k) += h;
        ym(k) -= h;
        J.col(k) = (curve_equations(yp, K, M, fth) - curve_equations(ym, K, M, fth)) / (2.0 * h);
      }
      bool moved = false;
      for (int tries = 0; tries < 20 && !moved; ++tries) {
        Mat A = J.transpose() * J;
        A.diagonal() += lambda * w.cwiseProduct(w);
        Vec d = A.ldlt().solve(-J.transpose() * E);
        Vec yn = y + d;
        Vec En = curve_equations(yn, K, M, fth);
        double rn = En.norm();
        if (std::isfinite(rn) && rn < res) {
          y = yn;
          E = En;
          res = rn;
          lambda = std::max(lambda / 3.0, 1e-14);
          moved = true;
        } else {
          lambda *= 4.0;
        }
      }
      if (!moved || y.cwiseAbs().maxCoeff() > 20.0) break;  // runaway concentration
    }
    rep.iterations += it;
    best = std::min(best, res);
    if (res < 1e-12 && resolved(y)) {
      rep.density = make_density(y, K, M);
      rep.turning = E(0);
      rep.closure = std::hypot(E(1), E(2));
      return rep;
    }
  }
  throw CurvError(ErrorKind::NonConvergence, "no resolved closing boundary curve found", best);
}

Vec disk_curvature(const Vec& u) {
  return (Vec::Ones(u.size()) + dirichlet_to_neumann(u)).cwiseQuotient(Vec(u.array().exp()));
}

Vec disk_curvature_by_curve(const Vec& u, double* gauss_bonnet, double* closure) {
  const int N = static_cast<int>(u.size());
  Vec th = circle_nodes(N);
  Vec v = harmonic_conjugate(u);
  CVec g1(N);
  const std::complex<double> I(0.0, 1.0);
  for (int j = 0; j < N; ++j) g1(j) = I * std::exp(std::complex<double>(u(j), th(j) + v(j)));
  CVec g2 = fourier_derivative(g1);
  Vec k(N);
  double gb = 0.0;
  std::complex<double> sum = 0.0;
  for (int j = 0; j < N; ++j) {
    double speed = std::abs(g1(j));
    k(j) = (std::conj(g1(j)) * g2(j)).imag() / (speed * speed * speed);
    gb += k(j) * speed * two_pi / N;
    sum += g1(j) * (two_pi / N);
  }
  if (gauss_bonnet) *gauss_bonnet = gb - two_pi;
  if (closure) *closure = std::abs(sum);
  return k;
}

double boundary_map(const DiskBoundaryFactor& d, double x) {
  return x + trig_interpolate(d.psi - d.theta, x);
}

DiskBoundaryFactor solve_disk(const CircleFn& f, const CircleFn& df, const DiskOptions& opt,
                              const CircleFn& log_density_guess) {
  const int vertices = curvature_vertices(f, std::max(1024, opt.density_nodes));
  if (vertices >= 0 && vertices < 4)
    throw CurvError(ErrorKind::Infeasible, "a flat disk boundary needs at least four curvature vertices", vertices);
  CurveReport curve = close_curve(f, opt, log_density_guess);
  const int N = opt.N;
  DiskSystem s{N, dtn_matrix(N), primitive_matrix(N), &curve.density, &f};
  DiskBoundaryFactor out;
  out.theta = circle_nodes(N);
  out.density = curve.density;

  Vec u = Vec::Constant(N, -std::log(two_pi));
  Vec arc;
  Vec F = disk_residual(s, u, &arc);
  double res = F.cwiseAbs().maxCoeff();
  out.history.push_back(res);
  for (int it = 0; it < opt.max_iter && res > 1e-14; ++it) {
    Vec eu = u.array().exp();
    Vec emu = eu.cwiseInverse();
    Mat J(N + 1, N);
    J.topRows(N) = emu.asDiagonal() * s.dtn;
    J.topRows(N).diagonal() -= emu.cwiseProduct(Vec::Ones(N) + s.dtn * u);
    // the target moves with the arclength s(x) = int_0^x e^u
    for (int i = 0; i < N; ++i) {
      double th = curve.density.sigma(arc(i));
      double dk = df(th) / curve.density.rho(th);
      J.row(i).head(N) -= dk * s.S.row(i).cwiseProduct(eu.transpose());
    }
    J.row(N) = two_pi / N * eu.transpose();
    Vec d = min_norm_step(J, F);
    double step = 1.0, trial = res;
    Vec un, Fn, an;
    for (int k = 0; k < 40; ++k) {
      un = u + step * d;
      Fn = disk_residual(s, un, &an);
      trial = Fn.cwiseAbs().maxCoeff();
      if (std::isfinite(trial) && trial < res) break;
      step *= 0.5;
    }
    if (!(trial < res)) break;
    u = un;
    F = Fn;
    arc = an;
    res = trial;
    out.history.push_back(res);
    out.iterations = it + 1;
  }
  out.residual = res;
  if (!(res < opt.tol)) throw CurvError(ErrorKind::NonConvergence, "disk Newton stagnated", res);
  // closing rescale to length exactly 1
  double L = two_pi / N * u.array().exp().sum();
  out.scale = -std::log(L);
  out.u = u.array() + out.scale;
  out.length = two_pi / N * out.u.array().exp().sum();
  Vec sv = s.S * Vec(out.u.array().exp());
  out.psi.resize(N);
  out.target.resize(N);
  for (int i = 0; i < N; ++i) {
    out.psi(i) = curve.density.sigma(sv(i));
    out.target(i) = f(out.psi(i));
  }
  certify(out, f);
  return out;
}

DiskBoundaryFactor prescribe_disk_geodesic_curvature(const TrigSeries& f, const DiskOptions& opt) {
  auto v = validate_range(f, two_pi);
  if (v.verdict == RangeCase::Infeasible)
    throw CurvError(ErrorKind::Precondition, "target violates the range condition for the disk", v.min);
  DiskOptions o = opt;
  o.N = std::max(opt.N, 8 * f.degree());
  o.density_nodes = std::max(opt.density_nodes, 32 * f.degree());
  return solve_disk([&](double t) { return f(t); }, [&](double t) { return f.derivative(t); }, o);
}

MinMaxReport min_max_prescribe_disk(const TrigSeries& f, const DiskOptions& opt) {
  MinMaxReport rep;
  auto v = validate_range(f, two_pi);
  if (v.verdict != RangeCase::Straddle)
    throw CurvError(ErrorKind::Precondition, "min-max needs min f < 2 pi < max f", v.min);
  try {
    rep.stage = "vertices";
    const int vertices = curvature_vertices([&](double t) { return f(t); });
    if (vertices >= 0 && vertices < 4)
      throw CurvError(ErrorKind::Infeasible, "a flat disk boundary needs at least four curvature vertices",
                      vertices);

    rep.stage = "constant";
    rep.constant = solve_disk([](double) { return two_pi; }, [](double) { return 0.0; }, opt);

    // smooth, mildly concentrating pullback: f o phi must stay resolved on the grid
    rep.stage = "pullback";
    PullbackOptions po;
    po.sigma = 0.5;
    po.floor = 0.5;
    po.cells = 256;
    po.candidates = 256;
    po.attempts = 1;
    const double p = 2.0;
    const double eps = lp_distance(f, CircleDiffeo{}, TrigSeries::constant(two_pi), p);
    rep.pullback = approx_by_pullback(f, TrigSeries::constant(two_pi), eps, p, po);

    rep.stage = "local";
    const auto& phi = rep.pullback.phi;
    auto fphi = [&](double x) { return f(phi(x)); };
    auto dfphi = [&](double x) { return f.derivative(phi(x)) * phi.derivative(x); };
    // closing density of f pushed through phi: rho(phi(x)) phi'(x) closes f o phi
    const CurveReport direct_curve = close_curve([&](double t) { return f(t); }, opt);
    DiskOptions lo = opt;
    lo.density_modes = 2 * opt.density_modes;
    lo.density_nodes = std::max(opt.density_nodes, 32 * lo.density_modes);
    auto guess = [&](double x) { return std::log(direct_curve.density.rho(phi(x)) * phi.derivative(x)); };
    rep.local = solve_disk(fphi, dfphi, lo, guess);
    rep.end_to_end = rep.local.curvature_error;

    rep.stage = "compare";
    auto direct = prescribe_disk_geodesic_curvature(f, opt);
    rep.direct_gap = std::max(std::abs(direct.length - rep.local.length),
                              std::abs(direct.gauss_bonnet - rep.local.gauss_bonnet));
    rep.stage = "done";
  } catch (const CurvError& e) {
    throw CurvError(e.kind(), std::string("[") + rep.stage + "] " + e.what(), e.value());
  }
  return rep;
}

}  // namespace curvlab
