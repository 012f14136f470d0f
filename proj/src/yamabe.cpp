#include "curvlab/yamabe.hpp"

#include <cmath>

#include "curvlab/errors.hpp"

namespace curvlab {

namespace {

double beta_of(int n) { return (n - 2.0) / (4.0 * (n - 1.0)); }

// quadratic form of E together with the quadrature weights it uses
struct Forms {
  int n = 3;
  Vec W;    // int f dv = W . f for radial f
  Mat S;    // E(u) = u^T S u
  Mat P;    // H^1 inner product used as preconditioner
  std::vector<std::pair<int, double>> bnd;  // (node, area)
};

Forms build_forms(const GeneralRadialMetric& g) {
  RadialGeometry geo = radial_geometry(g);
  Forms f;
  f.n = g.n;
  f.W = g.grid.weights(geo.dv_parity).cwiseProduct(geo.dv);
  const Mat& D = g.grid.D(1);
  Vec wa = f.W.cwiseQuotient(geo.A);
  Mat K = D.transpose() * wa.asDiagonal() * D;
  const double beta = beta_of(g.n);
  f.S = K;
  f.S.diagonal() += beta * f.W.cwiseProduct(geo.scal);
  f.P = K;
  f.P.diagonal() += f.W;
  for (const auto& b : boundary_data(geo)) {
    f.S(b.index, b.index) += 2.0 * beta * b.H * b.area;
    f.P(b.index, b.index) += b.area;
    f.bnd.emplace_back(b.index, b.area);
  }
  f.S = 0.5 * (f.S + f.S.transpose());
  f.P = 0.5 * (f.P + f.P.transpose());
  return f;
}

double norm_of(const Forms& f, const Vec& u, int lambda, Vec* grad = nullptr) {
  const int n = f.n;
  if (lambda == 1) {
    const double p = 2.0 * n / (n - 2.0);
    Vec up = u.array().pow(p - 1.0);
    double J = f.W.dot(up.cwiseProduct(u));
    double N = std::pow(J, 2.0 / p);
    if (grad) *grad = 2.0 * std::pow(J, 2.0 / p - 1.0) * f.W.cwiseProduct(up);
    return N;
  }
  const double q = 2.0 * (n - 1.0) / (n - 2.0);
  double J = 0.0;
  for (auto [i, a] : f.bnd) J += a * std::pow(u(i), q);
  double N = std::pow(J, 2.0 / q);
  if (grad) {
    grad->setZero(u.size());
    for (auto [i, a] : f.bnd) (*grad)(i) = 2.0 * std::pow(J, 2.0 / q - 1.0) * a * std::pow(u(i), q - 1.0);
  }
  return N;
}

void check_lambda(int lambda) {
  if (lambda != 0 && lambda != 1) throw CurvError(ErrorKind::Domain, "lambda must be 0 or 1");
}

void check_u(const GeneralRadialMetric& g, const Vec& u) {
  if (u.size() != g.grid.size()) throw CurvError(ErrorKind::GridMismatch, "u does not match the grid");
  if (!u.allFinite()) throw CurvError(ErrorKind::Domain, "u is not finite");
  if (u.cwiseAbs().maxCoeff() == 0.0) throw CurvError(ErrorKind::Domain, "u vanishes identically");
}

}  // namespace

double yamabe_energy(const GeneralRadialMetric& g, const Vec& u) {
  check_u(g, u);
  Forms f = build_forms(g);
  return u.dot(f.S * u);
}

double yamabe_norm(const GeneralRadialMetric& g, const Vec& u, int lambda) {
  check_lambda(lambda);
  check_u(g, u);
  return norm_of(build_forms(g), u.cwiseAbs(), lambda);
}

YamabeReport yamabe_quotient(const GeneralRadialMetric& g, const Vec& u, int lambda) {
  check_lambda(lambda);
  check_u(g, u);
  Forms f = build_forms(g);
  YamabeReport r;
  r.lambda = lambda;
  r.u = u;
  r.E = u.dot(f.S * u);
  r.N = norm_of(f, u.cwiseAbs(), lambda);
  if (!(r.N > 0.0)) throw CurvError(ErrorKind::Domain, "normalisation vanishes for this u");
  r.I = r.E / r.N;
  r.estimate = r.I;
  r.label = "quotient";
  return r;
}

YamabeReport yamabe_quotient(const WarpedMetric& w, const Vec& u, int lambda) {
  return yamabe_quotient(to_general(w), u, lambda);
}

double direct_functional(const GeneralRadialMetric& g, const Vec& u) {
  check_u(g, u);
  if (u.minCoeff() <= 0.0) throw CurvError(ErrorKind::Domain, "u must be positive");
  Vec w = u.array().pow(4.0 / (g.n - 2.0));
  GeneralRadialMetric gc = make_general(g.n, g.cross, g.grid, g.A.cwiseProduct(w), g.B.cwiseProduct(w));
  RadialGeometry geo = radial_geometry(gc);
  double total = geo.integrate(geo.scal, 1);
  for (const auto& b : boundary_data(geo)) total += 2.0 * b.H * b.area;
  return beta_of(g.n) * total;
}

YamabeReport yamabe_minimize_radial(const GeneralRadialMetric& g, int lambda, const MinimizeOptions& opt) {
  check_lambda(lambda);
  Forms f = build_forms(g);
  Eigen::LLT<Mat> pre(f.P);
  if (pre.info() != Eigen::Success) throw CurvError(ErrorKind::InternalConsistency, "H1 form is not definite");

  const int m = g.grid.size();
  const double R = g.grid.R();
  Vec u(m);
  for (int i = 0; i < m; ++i) {
    double x = g.grid.r()(i) / R;
    u(i) = 1.0 + 0.5 * x * x;
  }
  auto normalise = [&](Vec& v) { v /= std::sqrt(norm_of(f, v, lambda)); };
  normalise(u);

  YamabeReport rep;
  rep.lambda = lambda;
  rep.label = "upper bound (radial class)";
  double I = u.dot(f.S * u);
  double step = 1.0;
  Vec gN;
  for (int it = 0; it < opt.max_iter; ++it) {
    norm_of(f, u, lambda, &gN);
    Vec grad = 2.0 * (f.S * u) - I * gN;
    Vec d = -pre.solve(grad);
    double slope = grad.dot(d);
    rep.grad_norm = std::sqrt(std::max(0.0, -slope));
    rep.history.push_back(I);
    rep.iterations = it;
    if (rep.grad_norm < opt.grad_tol) break;
    if (!std::isfinite(slope)) throw CurvError(ErrorKind::NonConvergence, "non-finite gradient");
    bool accepted = false;
    step = std::min(1.0, 2.0 * step);
    for (int k = 0; k < 60; ++k) {
      Vec v = u + step * d;
      const double floor = 1e-12 * v.cwiseAbs().maxCoeff();
      v = v.cwiseMax(floor);
      normalise(v);
      double Iv = v.dot(f.S * v);
      if (Iv <= I + 1e-4 * step * slope || (Iv <= I && step < 1e-12)) {
        u = v;
        I = Iv;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (rep.grad_norm < 1e3 * opt.grad_tol) break;  // roundoff plateau
      throw CurvError(ErrorKind::NonConvergence, "line search failed", rep.grad_norm);
    }
  }
  if (rep.grad_norm >= 1e3 * opt.grad_tol)
    throw CurvError(ErrorKind::NonConvergence, "radial minimisation did not converge", rep.grad_norm);
  rep.u = u;
  rep.E = I;
  rep.N = norm_of(f, u, lambda);
  rep.I = rep.E / rep.N;
  rep.estimate = rep.I;
  if (!std::isfinite(rep.estimate)) throw CurvError(ErrorKind::NonConvergence, "non-finite estimate");
  return rep;
}

YamabeReport yamabe_minimize_radial(const WarpedMetric& w, int lambda, int resolution, const MinimizeOptions& opt) {
  WarpedMetric v = w;
  if (resolution > 0) v.nodes = resolution;
  return yamabe_minimize_radial(to_general(v), lambda, opt);
}

MetricDistance metric_distance(const GeneralRadialMetric& g1, const GeneralRadialMetric& g2) {
  if (g1.n != g2.n || !g1.grid.same_as(g2.grid))
    throw CurvError(ErrorKind::GridMismatch, "metrics live on different grids");
  MetricDistance d;
  d.d_second = std::max((g2.A.array() / g1.A.array()).log().abs().maxCoeff(),
                        (g2.B.array() / g1.B.array()).log().abs().maxCoeff());
  Vec dA = g2.A - g1.A, dB = g2.B - g1.B;
  const auto& grid = g1.grid;
  auto sup = [](const Vec& v) { return v.cwiseAbs().maxCoeff(); };
  double p[3] = {std::max(sup(dA), sup(dB)), std::max(sup(grid.D(1) * dA), sup(grid.D(1) * dB)),
                 std::max(sup(grid.D2(1) * dA), sup(grid.D2(1) * dB))};
  for (double pk : p) d.d_prime += pk / (1.0 + pk);
  d.total = d.d_prime + d.d_second;
  return d;
}

ContinuityReport continuity_ratio_check(const GeneralRadialMetric& g, const GeneralRadialMetric& g_prime,
                                        const MinimizeOptions& opt) {
  ContinuityReport c;
  c.d = metric_distance(g, g_prime).total;
  c.Y = yamabe_minimize_radial(g, 1, opt).estimate;
  c.Y_prime = yamabe_minimize_radial(g_prime, 1, opt).estimate;
  if (!std::isfinite(c.Y) || !std::isfinite(c.Y_prime))
    throw CurvError(ErrorKind::NonConvergence, "non-finite Yamabe estimate");
  c.ratio = c.Y_prime / c.Y;
  c.bound = (g.n + 1) * c.d;
  c.slack = c.ratio > 0.0 ? c.bound - std::abs(std::log(c.ratio)) : -1.0;
  c.inside = c.ratio > std::exp(-c.bound) && c.ratio < std::exp(c.bound);
  return c;
}

}  // namespace curvlab
