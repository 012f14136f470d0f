#include "curvlab/vstatic_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "curvlab/errors.hpp"
#include "curvlab/models.hpp"

namespace curvlab {

const char* family_name(Family f) {
  switch (f) {
    case Family::SphericalCap: return "spherical-cap";
    case Family::EuclideanBall: return "euclidean-ball";
    case Family::HyperbolicCap: return "hyperbolic-cap";
    case Family::HyperbolicHalfspace: return "hyperbolic-halfspace";
    case Family::RicciFlatProduct: return "ricci-flat-product";
  }
  return "?";
}

Family family_from(const std::string& s) {
  for (Family f : {Family::SphericalCap, Family::EuclideanBall, Family::HyperbolicCap, Family::HyperbolicHalfspace,
                   Family::RicciFlatProduct})
    if (s == family_name(f)) return f;
  throw CurvError(ErrorKind::Invalid, "unknown example family '" + s + "'");
}

void validate(const ExampleSpec& s) {
  if (s.n < 2) throw CurvError(ErrorKind::Invalid, "dimension must be at least 2", s.n);
  if (s.nodes < 8) throw CurvError(ErrorKind::Invalid, "too few grid nodes", s.nodes);
  switch (s.family) {
    case Family::SphericalCap:
      if (!(s.R > 0.0 && s.R < std::numbers::pi))
        throw CurvError(ErrorKind::Invalid, "spherical caps need R in (0, pi)", s.R);
      break;
    case Family::HyperbolicCap:
    case Family::EuclideanBall:
    case Family::RicciFlatProduct:
      if (!(s.R > 0.0)) throw CurvError(ErrorKind::Invalid, "radius/length must be positive", s.R);
      break;
    case Family::HyperbolicHalfspace: break;
  }
  if (!s.b.empty() && (s.family != Family::EuclideanBall || static_cast<int>(s.b.size()) != s.n))
    throw CurvError(ErrorKind::Invalid, "b is an n-vector and only applies to the euclidean ball");
  if (s.family == Family::RicciFlatProduct && s.kappa != 0.0)
    throw CurvError(ErrorKind::Invalid, "the flat product only carries kappa = 0");
}

// ---- polynomials

Polynomial Polynomial::constant(int dim, double c) {
  Polynomial p(dim);
  p.add(std::vector<int>(dim, 0), c);
  return p;
}

Polynomial Polynomial::coordinate(int dim, int i) {
  Polynomial p(dim);
  std::vector<int> e(dim, 0);
  e[i] = 1;
  p.add(e, 1.0);
  return p;
}

void Polynomial::add(const std::vector<int>& e, double c) {
  if (c == 0.0) return;
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_[e] = c;
  } else {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial p = *this;
  for (auto& [e, c] : o.terms_) p.add(e, c);
  return p;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o * -1.0; }

Polynomial Polynomial::operator*(double s) const {
  Polynomial p(dim_);
  for (auto& [e, c] : terms_) p.add(e, c * s);
  return p;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial p(dim_);
  for (auto& [e1, c1] : terms_)
    for (auto& [e2, c2] : o.terms_) {
      std::vector<int> e(dim_);
      for (int i = 0; i < dim_; ++i) e[i] = e1[i] + e2[i];
      p.add(e, c1 * c2);
    }
  return p;
}

Polynomial Polynomial::derivative(int i) const {
  Polynomial p(dim_);
  for (auto& [e, c] : terms_) {
    if (e[i] == 0) continue;
    std::vector<int> d = e;
    d[i] -= 1;
    p.add(d, c * e[i]);
  }
  return p;
}

double Polynomial::eval(const std::vector<double>& x) const {
  double s = 0.0;
  for (auto& [e, c] : terms_) {
    double t = c;
    for (int i = 0; i < dim_; ++i) t *= std::pow(x[i], e[i]);
    s += t;
  }
  return s;
}

Polynomial Polynomial::reduce_sphere(double rho) const {
  // x_1^2 -> rho^2 - x_2^2 - ... - x_dim^2 until every exponent of x_1 is 0 or 1
  Polynomial sub = constant(dim_, rho * rho);
  for (int i = 1; i < dim_; ++i) sub = sub - coordinate(dim_, i) * coordinate(dim_, i);
  Polynomial cur = *this;
  while (true) {
    Polynomial next(dim_);
    bool changed = false;
    for (auto& [e, c] : cur.terms_) {
      if (e[0] < 2) {
        next.add(e, c);
        continue;
      }
      std::vector<int> low = e;
      low[0] -= 2;
      Polynomial mono(dim_);
      mono.add(low, c);
      next = next + mono * sub;
      changed = true;
    }
    cur = next;
    if (!changed) return cur;
  }
}

double Polynomial::max_coeff() const {
  double m = 0.0;
  for (auto& [e, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

// ---- examples

namespace {

double sup_abs(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

Polynomial ball_polynomial(const ExampleSpec& s) {
  const int n = s.n;
  Polynomial V = Polynomial::constant(n, -s.tau);
  for (int i = 0; i < n; ++i) {
    auto xi = Polynomial::coordinate(n, i);
    V = V + xi * xi * (-s.kappa / (2.0 * (n - 1)));
    if (!s.b.empty()) V = V + xi * s.b[i];
  }
  return V;
}

// boundary constant of the radial part; the linear part cancels on the sphere
double ball_tau(const ExampleSpec& s) { return s.tau / s.R - s.kappa * s.R / (2.0 * (s.n - 1)); }

}  // namespace

double tabulated_tau(const ExampleSpec& s) {
  const double k = s.kappa / (s.n - 1.0);
  switch (s.family) {
    case Family::SphericalCap: return s.a * std::cos(2 * s.R) / std::sin(s.R) - k * std::cos(s.R) / std::sin(s.R);
    case Family::HyperbolicCap:
      return s.a * std::cosh(2 * s.R) / std::sinh(s.R) + k * std::cosh(s.R) / std::sinh(s.R);
    case Family::EuclideanBall: return s.tau;
    default: return 0.0;
  }
}

Example build_example(const ExampleSpec& s) {
  validate(s);
  Example ex;
  ex.spec = s;
  ex.tabulated_tau = tabulated_tau(s);
  const int n = s.n;
  const double k = s.kappa / (n - 1.0);
  PotentialTriple& p = ex.potential;
  p.kappa = s.kappa;
  switch (s.family) {
    case Family::SphericalCap: ex.metric = spherical_cap(n, s.R, s.nodes); break;
    case Family::HyperbolicCap:
    case Family::HyperbolicHalfspace: ex.metric = hyperbolic_cap(n, s.R, s.nodes); break;
    case Family::EuclideanBall: ex.metric = euclidean_ball(n, s.R, s.nodes); break;
    case Family::RicciFlatProduct: ex.metric = flat_cylinder(n, s.R, s.nodes); break;
  }
  GeneralRadialMetric g = to_general(ex.metric);
  const Vec& r = g.grid.r();
  const int m = static_cast<int>(r.size());
  p.V.resize(m);
  p.Vs.resize(m);
  p.Vss.resize(m);
  for (int i = 0; i < m; ++i) {
    double x = r(i);
    switch (s.family) {
      case Family::SphericalCap:
        p.V(i) = s.a * std::cos(x) - k;
        p.Vs(i) = -s.a * std::sin(x);
        p.Vss(i) = -s.a * std::cos(x);
        break;
      case Family::HyperbolicCap:
      case Family::HyperbolicHalfspace:
        p.V(i) = s.a * std::cosh(x) + k;
        p.Vs(i) = s.a * std::sinh(x);
        p.Vss(i) = s.a * std::cosh(x);
        break;
      case Family::EuclideanBall:
        p.V(i) = -0.5 * k * x * x - s.tau;
        p.Vs(i) = -k * x;
        p.Vss(i) = -k;
        break;
      case Family::RicciFlatProduct:
        p.V(i) = s.a;
        p.Vs(i) = 0.0;
        p.Vss(i) = 0.0;
        break;
    }
  }
  switch (s.family) {
    case Family::SphericalCap: p.tau = -s.a / std::sin(s.R) + k * std::cos(s.R) / std::sin(s.R); break;
    case Family::HyperbolicCap:
    case Family::HyperbolicHalfspace: p.tau = -s.a / std::sinh(s.R) - k * std::cosh(s.R) / std::sinh(s.R); break;
    case Family::EuclideanBall:
      p.tau = ball_tau(s);
      ex.poly = ball_polynomial(s);
      break;
    case Family::RicciFlatProduct: p.tau = 0.0; break;
  }
  ex.sign_change = p.V.minCoeff() < 0.0 && p.V.maxCoeff() > 0.0;
  return ex;
}

PolynomialCheck polynomial_check(const ExampleSpec& s) {
  if (s.family != Family::EuclideanBall) throw CurvError(ErrorKind::Invalid, "polynomial check is for the flat ball");
  const int n = s.n;
  Polynomial V = ball_polynomial(s);
  Polynomial lap(n);
  for (int i = 0; i < n; ++i) lap = lap + V.derivative(i).derivative(i);
  PolynomialCheck out;
  // flat metric: A*V = -Lap V g + Hess V
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Polynomial e = V.derivative(i).derivative(j);
      if (i == j) e = e - lap - Polynomial::constant(n, s.kappa);
      out.interior = std::max(out.interior, e.max_coeff());
    }
  // trace: Lap V + kappa n/(n-1)
  out.trace = (lap + Polynomial::constant(n, s.kappa * n / (n - 1.0))).max_coeff();
  // on |x| = R: nu = x/R, Pi = g/R, so B*V = (x.grad V)/R - V/R
  Polynomial radial(n);
  for (int i = 0; i < n; ++i) radial = radial + Polynomial::coordinate(n, i) * V.derivative(i);
  Polynomial B = (radial - V) * (1.0 / s.R) - Polynomial::constant(n, ball_tau(s));
  out.boundary = B.reduce_sphere(s.R).max_coeff();
  return out;
}

HalfspaceCheck halfspace_check(int n, int samples, unsigned seed) {
  // hyperboloid -t^2 + |x|^2 = -1 in Minkowski space; wall {x_n = 0}, outward normal -e_n
  HalfspaceCheck out;
  out.n = n;
  std::mt19937 rng(seed);
  std::normal_distribution<double> N(0.0, 0.7);
  for (int s = 0; s < samples; ++s) {
    std::vector<double> x(n + 1, 0.0);  // x_1..x_n, then t
    double q = 0.0;
    for (int i = 0; i < n - 1; ++i) {
      x[i] = N(rng);
      q += x[i] * x[i];
    }
    x[n - 1] = 0.0;
    x[n] = std::sqrt(1.0 + q);
    // outward unit normal of the half-space {x_n >= 0} along the wall is -e_n (Minkowski unit, tangent)
    std::vector<double> nu(n + 1, 0.0);
    nu[n - 1] = -1.0;
    auto geo = [&](double t) {
      std::vector<double> y(n + 1);
      for (int i = 0; i <= n; ++i) y[i] = std::cosh(t) * x[i] + std::sinh(t) * nu[i];
      return y;
    };
    const double h = 1e-3;
    auto yp = geo(h), ym = geo(-h), yp2 = geo(2 * h), ym2 = geo(-2 * h);
    for (int i = 0; i < n; ++i) {
      // V_(i) = x_i; outward derivative is -delta_in in this orientation, the Neumann clause is i != n
      double expect = (i == n - 1) ? -1.0 : 0.0;
      out.neumann = std::max(out.neumann, std::abs(nu[i] - expect));
      double fd = (8.0 * (yp[i] - ym[i]) - (yp2[i] - ym2[i])) / (12.0 * h);
      out.geodesic = std::max(out.geodesic, std::abs(fd - expect));
    }
    // reflection across the wall: x_n -> -x_n; test on an off-wall point
    std::vector<double> p = geo(0.37), pr = p;
    pr[n - 1] = -p[n - 1];
    for (int i = 0; i <= n; ++i) {
      double par = (i == n - 1) ? -1.0 : 1.0;
      out.reflection = std::max(out.reflection, std::abs(pr[i] - par * p[i]));
    }
    double norm = -pr[n] * pr[n];
    for (int i = 0; i < n; ++i) norm += pr[i] * pr[i];
    out.reflection = std::max(out.reflection, std::abs(norm + 1.0));
  }
  ExampleSpec cap;
  cap.family = Family::HyperbolicCap;
  cap.n = n;
  cap.R = 1.0;
  cap.a = 1.0;
  cap.kappa = 0.0;
  Example ex = build_example(cap);
  auto res = vstatic_residual(to_general(ex.metric), ex.potential);
  out.radial_member = std::max(res.interior, res.boundary);
  return out;
}

Example rescale(const Example& e, double c) {
  if (!(c > 0.0)) throw CurvError(ErrorKind::Domain, "scale factor must be positive", c);
  Example s = e;
  s.metric = scaled(e.metric, c);
  s.potential.Vs = e.potential.Vs / c;
  s.potential.Vss = e.potential.Vss / (c * c);
  s.potential.kappa = e.potential.kappa / (c * c);
  s.potential.tau = e.potential.tau / c;
  s.spec.R = e.spec.R * c;
  s.poly.reset();
  return s;
}

Certificate certify(const Example& e, double tol) {
  Certificate c;
  c.name = e.spec.name.empty() ? family_name(e.spec.family) : e.spec.name;
  c.family = e.spec.family;
  c.n = e.spec.n;
  c.sign_change = e.sign_change;
  GeneralRadialMetric g = to_general(e.metric);
  c.residual = vstatic_residual(g, e.potential);
  RadialGeometry geo = radial_geometry(g);
  c.scal_osc = geo.scal.maxCoeff() - geo.scal.minCoeff();
  auto bd = boundary_data(geo);
  double hmin = bd.front().H, hmax = hmin;
  for (auto& b : bd) {
    hmin = std::min(hmin, b.H);
    hmax = std::max(hmax, b.H);
    // Pi = pi0 g on Sigma in the radial class; compare its trace with H
    c.umbilic = std::max(c.umbilic, std::abs((e.spec.n - 1) * b.pi0 - b.H));
  }
  c.H_osc = hmax - hmin;
  c.gauss = gauss_identity_residual(g);
  if (e.spec.family == Family::EuclideanBall && e.poly) c.poly = polynomial_check(e.spec);
  if (e.spec.family == Family::HyperbolicHalfspace) c.halfspace = halfspace_check(e.spec.n);

  auto fail = [&](const char* what) {
    if (c.failed.empty()) c.failed = what;
  };
  if (c.residual.weak_potential) fail("trivial potential");
  if (!(c.residual.interior < tol)) fail("interior equation");
  if (!(c.residual.boundary < tol)) fail("boundary equation");
  if (!(c.residual.trace_interior < tol)) fail("traced interior equation");
  if (!(c.residual.trace_boundary < tol)) fail("traced boundary equation");
  if (!(c.scal_osc < tol)) fail("scalar curvature not constant");
  if (!(c.H_osc < tol)) fail("mean curvature not constant");
  if (!(c.umbilic < tol)) fail("boundary not umbilical");
  if (!(c.gauss < tol)) fail("Gauss identity");
  if (c.poly && !(std::max({c.poly->interior, c.poly->boundary, c.poly->trace}) < tol)) fail("polynomial algebra");
  if (c.halfspace) {
    if (!(c.halfspace->neumann < tol && c.halfspace->reflection < tol)) fail("halfspace Neumann property");
    if (!(c.halfspace->geodesic < 1e-8)) fail("halfspace normal derivative");
    if (!(c.halfspace->radial_member < tol)) fail("halfspace radial member");
  }
  c.pass = c.failed.empty();
  return c;
}

Certificate certify_example(const ExampleSpec& s, double tol) { return certify(build_example(s), tol); }

std::vector<ExampleSpec> random_specs(Family f, int n, int count, std::mt19937& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<ExampleSpec> out;
  for (int j = 0; j < count; ++j) {
    ExampleSpec s;
    s.family = f;
    s.n = n;
    s.a = 0.5 + 1.5 * U(rng);
    if (U(rng) < 0.5) s.a = -s.a;
    s.kappa = 4.0 * U(rng) - 2.0;
    switch (f) {
      case Family::SphericalCap: s.R = 0.3 + 2.5 * U(rng); break;
      case Family::HyperbolicCap:
      case Family::HyperbolicHalfspace:
        s.R = 0.3 + 1.7 * U(rng);
        if (f == Family::HyperbolicHalfspace) s.kappa = 0.0;
        break;
      case Family::EuclideanBall:
        s.R = 0.5 + 1.5 * U(rng);
        s.tau = 2.0 * U(rng) - 1.0;
        s.b.resize(n);
        for (auto& v : s.b) v = 2.0 * U(rng) - 1.0;
        break;
      case Family::RicciFlatProduct:
        s.R = 0.5 + 1.5 * U(rng);
        s.kappa = 0.0;
        break;
    }
    s.name = std::string(family_name(f)) + "-n" + std::to_string(n) + "-" + std::to_string(j);
    out.push_back(s);
  }
  return out;
}

const char* verdict_name(Verdict v) {
  return v == Verdict::NoPotentialPossible ? "no-potential-possible" : "obstruction-inconclusive";
}

ObstructionReport obstruction_verdict(const WarpedMetric& w, ObstructionMode mode, int k_max) {
  GeneralRadialMetric g = to_general(w);
  RadialGeometry geo = radial_geometry(g);
  auto bd = boundary_data(geo);
  const int n = w.n;
  const double tol = 1e-8;
  double hmin = bd.front().H, hmax = hmin;
  for (auto& b : bd) {
    hmin = std::min(hmin, b.H);
    hmax = std::max(hmax, b.H);
  }
  const double smin = geo.scal.minCoeff(), smax = geo.scal.maxCoeff();
  ObstructionReport out;
  out.mode = mode;
  if (mode == ObstructionMode::Steklov) {
    if (std::max(std::abs(smin), std::abs(smax)) > tol)
      throw CurvError(ErrorKind::Mode, "steklov mode needs a scalar flat metric", std::max(std::abs(smin), std::abs(smax)));
    if (hmax - hmin > tol) throw CurvError(ErrorKind::Mode, "steklov mode needs constant mean curvature", hmax - hmin);
    if (std::abs(hmax) < tol) throw CurvError(ErrorKind::Mode, "steklov mode needs nonzero mean curvature", hmax);
    out.target = hmax / (n - 1.0);
    out.spectrum = steklov_spectrum(g, 0.0, k_max);
    out.nearest = std::numeric_limits<double>::infinity();
    for (auto& e : out.spectrum.pairs) out.nearest = std::min(out.nearest, std::abs(e.sigma - out.target));
    double um = 0.0;
    for (auto& b : bd) um = std::max(um, std::abs((n - 1) * b.pi0 - b.H));
    out.umbilic_or_einstein = um < tol;
  } else {
    if (smax - smin > tol) throw CurvError(ErrorKind::Mode, "neumann mode needs constant scalar curvature", smax - smin);
    if (std::abs(smax) < tol) throw CurvError(ErrorKind::Mode, "neumann mode needs nonzero scalar curvature", smax);
    if (std::max(std::abs(hmin), std::abs(hmax)) > tol)
      throw CurvError(ErrorKind::Mode, "neumann mode needs a minimal boundary", std::max(std::abs(hmin), std::abs(hmax)));
    out.target = smax / (n - 1.0);
    out.spectrum = neumann_spectrum(g, 0.0, k_max, 6);
    out.nearest = std::numeric_limits<double>::infinity();
    // Lambda = (n-1) lambda with -Lap f = lambda f
    for (auto& e : out.spectrum.pairs) out.nearest = std::min(out.nearest, std::abs(e.sigma / (n - 1.0) - out.target));
    out.umbilic_or_einstein = sup_abs(geo.ric_rad - geo.ric_tan) < tol;
  }
  out.member = out.nearest < tol;
  out.verdict = (!out.member && !out.umbilic_or_einstein) ? Verdict::NoPotentialPossible : Verdict::Inconclusive;
  return out;
}

}  // namespace curvlab
