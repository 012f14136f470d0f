#include "curvlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "curvlab/errors.hpp"

namespace curvlab {

namespace {
constexpr double kPi = std::numbers::pi;

double binom(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}
}  // namespace

const char* warp_tag_name(WarpTag t) {
  switch (t) {
    case WarpTag::Sin: return "sin";
    case WarpTag::Sinh: return "sinh";
    case WarpTag::Cosh: return "cosh";
    case WarpTag::Identity: return "identity";
    case WarpTag::Constant: return "constant";
    case WarpTag::Chebyshev: return "chebyshev";
  }
  return "?";
}

WarpTag warp_tag_from(const std::string& s) {
  if (s == "sin") return WarpTag::Sin;
  if (s == "sinh") return WarpTag::Sinh;
  if (s == "cosh") return WarpTag::Cosh;
  if (s == "identity" || s == "r") return WarpTag::Identity;
  if (s == "constant") return WarpTag::Constant;
  if (s == "chebyshev") return WarpTag::Chebyshev;
  throw CurvError(ErrorKind::Parse, "unknown warp tag '" + s + "'");
}

double Warp::value(double r) const {
  const double x = rate * r;
  switch (tag) {
    case WarpTag::Sin: return amp * std::sin(x);
    case WarpTag::Sinh: return amp * std::sinh(x);
    case WarpTag::Cosh: return amp * std::cosh(x);
    case WarpTag::Identity: return amp * r;
    case WarpTag::Constant: return amp;
    case WarpTag::Chebyshev: return series(r);
  }
  return 0.0;
}

double Warp::d1(double r) const {
  const double x = rate * r;
  switch (tag) {
    case WarpTag::Sin: return amp * rate * std::cos(x);
    case WarpTag::Sinh: return amp * rate * std::cosh(x);
    case WarpTag::Cosh: return amp * rate * std::sinh(x);
    case WarpTag::Identity: return amp;
    case WarpTag::Constant: return 0.0;
    case WarpTag::Chebyshev: return series.derivative()(r);
  }
  return 0.0;
}

double Warp::d2(double r) const {
  const double x = rate * r;
  switch (tag) {
    case WarpTag::Sin: return -amp * rate * rate * std::sin(x);
    case WarpTag::Sinh: return amp * rate * rate * std::sinh(x);
    case WarpTag::Cosh: return amp * rate * rate * std::cosh(x);
    case WarpTag::Identity: return 0.0;
    case WarpTag::Constant: return 0.0;
    case WarpTag::Chebyshev: return series.derivative().derivative()(r);
  }
  return 0.0;
}

double Warp::defect(double r, int eps) const {
  const double x = rate * r;
  const double ak2 = amp * amp * rate * rate;
  switch (tag) {
    case WarpTag::Sin: {
      double s = std::sin(x);
      return (eps - ak2) + ak2 * s * s;
    }
    case WarpTag::Sinh: {
      double s = std::sinh(x);
      return (eps - ak2) - ak2 * s * s;
    }
    case WarpTag::Cosh: {
      double s = std::sinh(x);
      return eps - ak2 * s * s;
    }
    case WarpTag::Identity: return eps - amp * amp;
    case WarpTag::Constant: return eps;
    case WarpTag::Chebyshev: {
      double d = d1(r);
      return eps - d * d;
    }
  }
  return 0.0;
}

double unit_sphere_area(int dim) {
  const double k = (dim + 1) / 2.0;
  return 2.0 * std::pow(kPi, k) / std::tgamma(k);
}

double CrossSection::area_for(int n) const {
  if (eps == 1) return unit_sphere_area(n - 1);
  if (eps == 0) return 1.0;
  if (!(area > 0.0))
    throw CurvError(ErrorKind::Domain, "hyperbolic cross-sections need a user-supplied area");
  return area;
}

std::vector<std::pair<double, int>> CrossSection::spectrum(int n, int k_max) const {
  std::vector<std::pair<double, int>> out;
  const int d = n - 1;
  if (eps == 1) {
    for (int k = 0; k <= k_max; ++k) {
      int mult = static_cast<int>(binom(k + d, d) - binom(k + d - 2, d));
      if (d == 1) mult = (k == 0) ? 1 : 2;
      out.push_back({double(k) * (k + d - 1), mult});
    }
    return out;
  }
  if (eps == 0) {
    // distinct values of 4 pi^2 |m|^2 over the integer lattice Z^d
    std::map<long, int> counts;
    const int B = d >= 2 ? static_cast<int>(std::ceil(std::sqrt(2.0 * k_max + 2.0))) + 1 : k_max + 1;
    std::vector<int> m(d, -B);
    while (true) {
      long s = 0;
      for (int v : m) s += long(v) * v;
      counts[s] += 1;
      int i = 0;
      while (i < d && ++m[i] > B) {
        m[i] = -B;
        ++i;
      }
      if (i == d) break;
    }
    for (auto& [s, c] : counts) {
      if (static_cast<int>(out.size()) > k_max || s > long(B) * B) break;
      out.push_back({4.0 * kPi * kPi * double(s), c});
    }
    return out;
  }
  if (user_spectrum.empty()) return {{0.0, 1}};
  std::vector<double> v = user_spectrum;
  std::sort(v.begin(), v.end());
  for (double mu : v) {
    if (static_cast<int>(out.size()) > k_max) break;
    if (!out.empty() && std::abs(out.back().first - mu) < 1e-12) {
      out.back().second += 1;
    } else {
      out.push_back({mu, 1});
    }
  }
  return out;
}

void validate(const WarpedMetric& w) {
  if (w.n < 2) throw CurvError(ErrorKind::Domain, "dimension must be >= 2");
  if (w.cross.eps < -1 || w.cross.eps > 1) throw CurvError(ErrorKind::Domain, "eps must be -1, 0 or +1");
  if (!(w.R > w.r0) || w.r0 < 0.0) throw CurvError(ErrorKind::Domain, "radial domain must satisfy 0 <= r0 < R");
  const double phi0 = w.warp.value(w.r0);
  const bool cap = (w.r0 == 0.0 && std::abs(phi0) < 1e-14);
  const int S = 400;
  for (int i = 0; i <= S; ++i) {
    double r = w.r0 + (w.R - w.r0) * i / S;
    if (cap && i == 0) continue;
    if (!(w.warp.value(r) > 0.0))
      throw CurvError(ErrorKind::Domain, "warping function is not positive at r = " + std::to_string(r), r);
  }
  if (cap) {
    if (w.cross.eps != 1)
      throw CurvError(ErrorKind::Regularity, "a pole closes smoothly only over the round sphere (eps = +1)");
    double d = w.warp.d1(0.0);
    if (std::abs(d - 1.0) > 1e-10)
      throw CurvError(ErrorKind::Regularity, "cap regularity needs phi'(0) = 1, got " + std::to_string(d), d);
    if (w.warp.tag == WarpTag::Chebyshev) {
      const auto& s = w.warp.series;
      if (std::abs(s.lo + w.R) > 1e-14 || std::abs(s.hi - w.R) > 1e-14)
        throw CurvError(ErrorKind::Regularity, "cap Chebyshev warps must live on [-R, R]");
      for (int k = 0; k < s.c.size(); k += 2)
        if (std::abs(s.c(k)) > 1e-13)
          throw CurvError(ErrorKind::Regularity, "cap Chebyshev warps must be odd");
    }
  }
}

GeneralRadialMetric to_general(const WarpedMetric& w) {
  validate(w);
  const bool cap = (w.r0 == 0.0 && std::abs(w.warp.value(0.0)) < 1e-14);
  GeneralRadialMetric g;
  g.n = w.n;
  g.cross = w.cross;
  g.grid = cap ? RadialGrid::cap(w.R, w.nodes) : RadialGrid::annulus(w.r0, w.R, w.nodes);
  const int m = g.grid.size();
  g.A = Vec::Ones(m);
  g.B.resize(m);
  for (int i = 0; i < m; ++i) {
    double p = w.warp.value(g.grid.r()(i));
    g.B(i) = p * p;
  }
  g.exact = w.warp;
  return g;
}

GeneralRadialMetric make_general(int n, const CrossSection& cross, const RadialGrid& grid, const Vec& A,
                                 const Vec& B) {
  if (A.size() != grid.size() || B.size() != grid.size())
    throw CurvError(ErrorKind::GridMismatch, "coefficient vectors do not match the grid");
  if (A.minCoeff() <= 0.0 || B.minCoeff() <= 0.0)
    throw CurvError(ErrorKind::Domain, "A and B must be positive");
  GeneralRadialMetric g;
  g.n = n;
  g.cross = cross;
  g.grid = grid;
  g.A = A;
  g.B = B;
  return g;
}

Vec RadialGeometry::ds(const Vec& v, int parity) const {
  return (grid->D(parity) * v).cwiseQuotient(sqrtA);
}

Vec RadialGeometry::dss(const Vec& v, int parity) const {
  Vec d1 = grid->D(parity) * v;
  Vec d2 = grid->D2(parity) * v;
  return (d2 - (Ar.cwiseQuotient(2.0 * A)).cwiseProduct(d1)).cwiseQuotient(A);
}

Mat RadialGeometry::laplacian(double mu, int parity) const {
  const int m = grid->size();
  const Mat& D = grid->D(parity);
  const Mat& D2 = grid->D2(parity);
  Mat L(m, m);
  for (int i = 0; i < m; ++i) {
    double c1 = -Ar(i) / (2.0 * A(i) * A(i)) + (n - 1) * phi_s(i) / (phi(i) * sqrtA(i));
    L.row(i) = D2.row(i) / A(i) + c1 * D.row(i);
    L(i, i) -= mu / (phi(i) * phi(i));
  }
  return L;
}

Vec RadialGeometry::laplacian_apply(const Vec& u, double mu, int parity) const {
  Vec us = ds(u, parity);
  Vec uss = dss(u, parity);
  Vec out = uss + (n - 1) * phi_s.cwiseQuotient(phi).cwiseProduct(us);
  if (mu != 0.0) out -= mu * u.cwiseQuotient(phi.cwiseProduct(phi));
  return out;
}

double RadialGeometry::integrate(const Vec& f, int f_parity) const {
  return grid->integrate(f.cwiseProduct(dv), f_parity * dv_parity);
}

RadialGeometry radial_geometry(const GeneralRadialMetric& g) {
  RadialGeometry geo;
  geo.n = g.n;
  geo.eps = g.eps();
  geo.grid = &g.grid;
  const int m = g.grid.size();
  const bool cap = g.grid.is_cap();
  const int odd = cap ? -1 : 1;
  geo.A = g.A;
  geo.sqrtA = g.A.cwiseSqrt();
  geo.Ar = g.grid.D(1) * g.A;
  geo.phi.resize(m);
  geo.phi_s.resize(m);
  geo.phi_ss.resize(m);
  geo.defect.resize(m);
  bool flat_A = (g.A.array() == 1.0).all();
  if (g.exact && flat_A) {
    for (int i = 0; i < m; ++i) {
      double r = g.grid.r()(i);
      geo.phi(i) = g.exact->value(r);
      geo.phi_s(i) = g.exact->d1(r);
      geo.phi_ss(i) = g.exact->d2(r);
      geo.defect(i) = g.exact->defect(r, g.eps());
    }
  } else {
    geo.phi = g.B.cwiseSqrt();
    Vec pr = g.grid.D(odd) * geo.phi;
    Vec prr = g.grid.D2(odd) * geo.phi;
    geo.phi_s = pr.cwiseQuotient(geo.sqrtA);
    geo.phi_ss = (prr - geo.Ar.cwiseQuotient(2.0 * g.A).cwiseProduct(pr)).cwiseQuotient(g.A);
    geo.defect = (double(g.eps()) - geo.phi_s.array().square()).matrix();
  }
  const int n = g.n;
  geo.ric_rad = -(n - 1) * geo.phi_ss.cwiseQuotient(geo.phi);
  geo.ric_tan = -geo.phi_ss.cwiseQuotient(geo.phi) +
                (n - 2) * geo.defect.cwiseQuotient(geo.phi.cwiseProduct(geo.phi));
  geo.scal = geo.ric_rad + (n - 1) * geo.ric_tan;
  geo.areaN = g.cross.area_for(n);
  geo.dv = geo.sqrtA.cwiseProduct(geo.phi.array().pow(n - 1).matrix()) * geo.areaN;
  geo.dv_parity = cap ? ((n - 1) % 2 == 0 ? 1 : -1) : 1;
  return geo;
}

std::vector<BoundaryData> boundary_data(const RadialGeometry& geo) {
  std::vector<BoundaryData> out;
  const int n = geo.n;
  auto make = [&](int idx, int sign) {
    BoundaryData b;
    b.index = idx;
    b.r = geo.grid->r()(idx);
    b.sign = sign;
    b.phi = geo.phi(idx);
    b.pi0 = sign * geo.phi_s(idx) / geo.phi(idx);
    b.H = (n - 1) * b.pi0;
    b.ric_nn = geo.ric_rad(idx);
    b.R_sigma = (n - 1) * (n - 2) * geo.eps / (b.phi * b.phi);
    b.area = std::pow(b.phi, n - 1) * geo.areaN;
    return b;
  };
  out.push_back(make(geo.grid->outer(), 1));
  if (!geo.grid->is_cap()) out.push_back(make(0, -1));
  return out;
}

CurvatureReport curvature_report(const GeneralRadialMetric& g) {
  RadialGeometry geo = radial_geometry(g);
  CurvatureReport rep;
  rep.r = g.grid.r();
  rep.scal = geo.scal;
  rep.ric_rad = geo.ric_rad;
  rep.ric_tan = geo.ric_tan;
  rep.boundaries = boundary_data(geo);
  rep.volume = geo.integrate(Vec::Ones(g.grid.size()), 1);
  rep.area = 0.0;
  for (auto& b : rep.boundaries) rep.area += b.area;
  return rep;
}

CurvatureReport curvature_report(const WarpedMetric& w) { return curvature_report(to_general(w)); }

double gauss_identity_residual(const GeneralRadialMetric& g) {
  CurvatureReport rep = curvature_report(g);
  const auto& b = rep.outer();
  const int n = g.n;
  double lhs = b.R_sigma - (n - 2.0) / (n - 1.0) * b.H * b.H;
  double rhs = rep.scal(b.index) - 2.0 * b.ric_nn;
  return std::abs(lhs - rhs);
}

double gauss_identity_residual(const WarpedMetric& w) { return gauss_identity_residual(to_general(w)); }

std::pair<double, double> volume_area(const GeneralRadialMetric& g) {
  CurvatureReport rep = curvature_report(g);
  return {rep.volume, rep.area};
}

std::pair<double, double> volume_area(const WarpedMetric& w) { return volume_area(to_general(w)); }

GeneralRadialMetric scaled(const GeneralRadialMetric& g, double c) {
  GeneralRadialMetric s = g;
  s.A *= c * c;
  s.B *= c * c;
  s.exact.reset();
  return s;
}

WarpedMetric scaled(const WarpedMetric& w, double c) {
  WarpedMetric s = w;
  s.r0 = w.r0 * c;
  s.R = w.R * c;
  switch (w.warp.tag) {
    case WarpTag::Identity: break;
    case WarpTag::Constant: s.warp.amp = w.warp.amp * c; break;
    case WarpTag::Chebyshev:
      s.warp.series.lo = w.warp.series.lo * c;
      s.warp.series.hi = w.warp.series.hi * c;
      s.warp.series.c = w.warp.series.c * c;
      break;
    default:
      s.warp.amp = w.warp.amp * c;
      s.warp.rate = w.warp.rate / c;
  }
  return s;
}

}  // namespace curvlab
