#include "curvlab/models.hpp"

#include <cmath>
#include <numbers>

#include "curvlab/errors.hpp"

namespace curvlab {

namespace {
WarpedMetric make(int n, int eps, WarpTag tag, double r0, double R, int nodes, double amp = 1.0,
                  double rate = 1.0) {
  WarpedMetric w;
  w.n = n;
  w.cross.eps = eps;
  w.cross.area = 1.0;
  w.warp.tag = tag;
  w.warp.amp = amp;
  w.warp.rate = rate;
  w.r0 = r0;
  w.R = R;
  w.nodes = nodes;
  return w;
}
}  // namespace

WarpedMetric unit_ball(int n, int nodes) { return make(n, 1, WarpTag::Identity, 0.0, 1.0, nodes); }
WarpedMetric euclidean_ball(int n, double R, int nodes) { return make(n, 1, WarpTag::Identity, 0.0, R, nodes); }
WarpedMetric hemisphere(int n, int nodes) { return make(n, 1, WarpTag::Sin, 0.0, std::numbers::pi / 2, nodes); }
WarpedMetric spherical_cap(int n, double R, int nodes) { return make(n, 1, WarpTag::Sin, 0.0, R, nodes); }
WarpedMetric hyperbolic_cap(int n, double R, int nodes) { return make(n, 1, WarpTag::Sinh, 0.0, R, nodes); }
WarpedMetric flat_cylinder(int n, double L, int nodes) { return make(n, 0, WarpTag::Constant, 0.0, L, nodes); }

WarpedMetric hyperbolic_product(int n, double L, double areaN, int nodes) {
  WarpedMetric w = make(n, -1, WarpTag::Constant, 0.0, L, nodes);
  w.cross.area = areaN;
  return w;
}

WarpedMetric scalar_flat_neck(int n, double half_width, double phi_b, double areaN, int nodes) {
  if (n < 3) throw CurvError(ErrorKind::Domain, "the neck needs n >= 3");
  const double r0 = 1.0, R = 1.0 + 2.0 * half_width;
  RadialGrid grid = RadialGrid::annulus(r0, R, nodes);
  const int m = grid.size();
  const Mat& D = grid.D();
  const Mat& D2 = grid.D2();
  const Vec& r = grid.r();
  const double mid = 0.5 * (r0 + R);
  Vec phi(m);
  for (int i = 0; i < m; ++i) {
    double x = (r(i) - mid) / half_width;
    phi(i) = phi_b + 0.25 * (n - 2) * half_width * half_width * (1.0 - x * x) / phi_b;
  }
  // Newton on 2 phi phi'' + (n-2)(1 + phi'^2) = 0 with Dirichlet ends
  for (int it = 0; it < 60; ++it) {
    Vec p1 = D * phi, p2 = D2 * phi;
    Vec F = 2.0 * phi.cwiseProduct(p2) + (n - 2) * (Vec::Ones(m) + p1.cwiseProduct(p1));
    Mat J = 2.0 * phi.asDiagonal() * D2;
    J.diagonal() += 2.0 * p2;
    J += 2.0 * (n - 2) * p1.asDiagonal() * D;
    F(0) = phi(0) - phi_b;
    F(m - 1) = phi(m - 1) - phi_b;
    J.row(0).setZero();
    J.row(m - 1).setZero();
    J(0, 0) = 1.0;
    J(m - 1, m - 1) = 1.0;
    Vec step = J.partialPivLu().solve(F);
    phi -= step;
    if (step.cwiseAbs().maxCoeff() < 1e-14 && it > 2) break;
    if (phi.minCoeff() <= 0.0) throw CurvError(ErrorKind::NonConvergence, "neck profile collapsed");
  }
  Vec p1 = D * phi, p2 = D2 * phi;
  double res = (2.0 * phi.cwiseProduct(p2) + (n - 2) * (Vec::Ones(m) + p1.cwiseProduct(p1))).cwiseAbs().maxCoeff();
  if (res > 1e-8) throw CurvError(ErrorKind::NonConvergence, "neck profile did not converge", res);
  WarpedMetric w = make(n, -1, WarpTag::Chebyshev, r0, R, nodes);
  w.cross.area = areaN;
  w.warp.series.lo = r0;
  w.warp.series.hi = R;
  w.warp.series.c = grid.coefficients(phi);
  return w;
}

GeneralRadialMetric random_metric(std::mt19937& rng, int n, bool cap, int nodes) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  CrossSection cs;
  cs.area = 0.5 + U(rng);
  if (cap) {
    cs.eps = 1;
    double R = 0.5 + 1.5 * U(rng);
    double a1 = 0.3 * (U(rng) - 0.5), b1 = 0.3 * (U(rng) - 0.5), kind = U(rng);
    RadialGrid grid = RadialGrid::cap(R, nodes);
    Vec A(grid.size()), B(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
      double x = grid.r()(i), x2 = x * x;
      double s = kind < 0.5 ? std::sin(x) : std::sinh(x);
      A(i) = 1.0 + a1 * x2;
      B(i) = s * s * (1.0 + a1 * x2) * std::exp(b1 * x2);
    }
    return make_general(n, cs, grid, A, B);
  }
  cs.eps = static_cast<int>(std::floor(3.0 * U(rng))) - 1;
  double r0 = 0.2 + U(rng), L = 0.4 + U(rng);
  RadialGrid grid = RadialGrid::annulus(r0, r0 + L, nodes);
  double a1 = 0.4 * (U(rng) - 0.5), w1 = 1.0 + 2.0 * U(rng);
  double c0 = 0.6 + U(rng), c1 = 0.5 * (U(rng) - 0.5), c2 = 0.5 * (U(rng) - 0.5);
  Vec A(grid.size()), B(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    double x = grid.r()(i);
    A(i) = 1.0 + a1 * std::sin(w1 * x);
    double p = c0 + c1 * x + c2 * std::cos(2.0 * x);
    B(i) = p * p;
  }
  return make_general(n, cs, grid, A, B);
}

RadialPerturbation random_perturbation(const GeneralRadialMetric& g, std::mt19937& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const Vec& r = g.grid.r();
  double p0 = U(rng), p1 = U(rng), p2 = U(rng), q0 = U(rng), q1 = U(rng), w = 1.0 + U(rng);
  RadialPerturbation h;
  h.a.resize(r.size());
  h.b.resize(r.size());
  for (int i = 0; i < r.size(); ++i) {
    double x = r(i), x2 = x * x;
    if (g.grid.is_cap()) {
      // a - b = O(r^2) keeps h smooth through the pole
      h.a(i) = p0 + p1 * x2 + p2 * std::cos(w * x);
      h.b(i) = h.a(i) + x2 * (q0 + q1 * x2);
    } else {
      h.a(i) = p0 + p1 * x + p2 * std::cos(w * x);
      h.b(i) = q0 + q1 * std::sin(w * x) + p1 * x2;
    }
  }
  return h;
}

PotentialTriple random_potential(const GeneralRadialMetric& g, std::mt19937& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const Vec& r = g.grid.r();
  double c0 = U(rng), c1 = U(rng), c2 = U(rng), w = 0.5 + U(rng);
  PotentialTriple p;
  p.V.resize(r.size());
  for (int i = 0; i < r.size(); ++i) {
    double x = r(i);
    p.V(i) = g.grid.is_cap() ? c0 + c1 * x * x + c2 * std::cos(w * x) : c0 + c1 * x + c2 * std::sin(w * x);
  }
  p.kappa = U(rng);
  p.tau = U(rng);
  return p;
}

Vec random_positive(const GeneralRadialMetric& g, std::mt19937& rng) {
  std::uniform_real_distribution<double> U(-0.4, 0.4);
  double c1 = U(rng), c2 = U(rng), c3 = U(rng);
  const double R = g.grid.R();
  Vec u(g.grid.size());
  for (int i = 0; i < u.size(); ++i) {
    double x = g.grid.r()(i) / R;
    u(i) = std::exp(c1 * x * x + c2 * x * x * x * x + c3 * std::cos(std::numbers::pi * x));
  }
  return u;
}

GeneralRadialMetric random_nearby_metric(const GeneralRadialMetric& g, double eps, std::mt19937& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double a = U(rng), b = U(rng), c = U(rng);
  GeneralRadialMetric h = g;
  h.exact.reset();
  const double R = g.grid.R();
  for (int i = 0; i < h.A.size(); ++i) {
    double x = g.grid.r()(i) / R;
    double w = a * std::cos(std::numbers::pi * x * x) + b * x * x;
    h.A(i) *= std::exp(2.0 * eps * w) * (1.0 + eps * c * x * x);
    h.B(i) *= std::exp(2.0 * eps * w);
  }
  return h;
}

Vec interior_bump(const RadialGrid& grid, double center, double width) {
  Vec v = Vec::Zero(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    double x = (grid.r()(i) - center) / width;
    if (std::abs(x) < 1.0) v(i) = std::exp(1.0 - 1.0 / (1.0 - x * x));
  }
  return v;
}

}  // namespace curvlab
