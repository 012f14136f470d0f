#include "curvlab/conformal.hpp"

#include <algorithm>
#include <cmath>

#include "curvlab/errors.hpp"

namespace curvlab {

const char* kind_name(ConformalKind k) { return k == ConformalKind::Boundary ? "boundary" : "interior"; }

namespace {

// a Lap phi + q phi + ci phi^pi = 0 in M,  d_nu phi + hb phi + cb phi^pb = 0 on Sigma
struct Problem {
  RadialGeometry geo;
  Mat L;
  std::vector<Eigen::RowVectorXd> rows;
  std::vector<int> bn;
  std::vector<bool> isb;
  double a = 1.0, ci = 0.0, pi = 1.0, cb = 0.0, pb = 1.0;
  Vec q;
  std::vector<double> hb;
};

Problem make_problem(const GeneralRadialMetric& g, double c, ConformalKind kind) {
  Problem p;
  p.geo = radial_geometry(g);
  const int n = g.n;
  if (n < 3) throw CurvError(ErrorKind::Domain, "conformal factors need n >= 3", n);
  const double beta = (n - 2.0) / (4.0 * (n - 1.0));
  p.L = p.geo.laplacian(0.0, 1);
  p.rows = normal_derivative_rows(p.geo, 1);
  p.bn = boundary_nodes(g.grid);
  p.isb.assign(g.grid.size(), false);
  for (int b : p.bn) p.isb[b] = true;
  auto bd = boundary_data(p.geo);
  for (auto& b : bd) p.hb.push_back(2.0 * beta * b.H);
  if (kind == ConformalKind::Boundary) {
    p.q = -beta * p.geo.scal;
    p.cb = -2.0 * beta * c;
    p.pb = n / (n - 2.0);
  } else {
    p.a = 4.0 * (n - 1.0) / (n - 2.0);
    p.q = -p.geo.scal;
    p.ci = c;
    p.pi = (n + 2.0) / (n - 2.0);
  }
  return p;
}

Vec residual_vec(const Problem& p, const Vec& phi) {
  Vec F = p.a * (p.L * phi) + p.q.cwiseProduct(phi);
  if (p.ci != 0.0) F += p.ci * phi.array().pow(p.pi).matrix();
  for (size_t k = 0; k < p.bn.size(); ++k) {
    const int b = p.bn[k];
    F(b) = p.rows[k].dot(phi) + p.hb[k] * phi(b) + p.cb * std::pow(phi(b), p.pb);
  }
  return F;
}

double sup(const Vec& v) { return v.cwiseAbs().maxCoeff(); }

// interior sign of L(v) and boundary sign of B(v): super needs L <= 0 <= B
bool is_super(const Problem& p, const Vec& v, double slack) {
  Vec F = residual_vec(p, v);
  for (int i = 0; i < F.size(); ++i) {
    if (p.isb[i] ? F(i) < -slack : F(i) > slack) return false;
  }
  return true;
}

bool is_sub(const Problem& p, const Vec& v, double slack) {
  Vec F = residual_vec(p, v);
  for (int i = 0; i < F.size(); ++i) {
    if (p.isb[i] ? F(i) > slack : F(i) < -slack) return false;
  }
  return true;
}

struct Bracket {
  bool ok = false;
  double scale = 1.0;
};

// smallest power-of-two rescaling of u for which 1 -+ |t| s u are sub/super-solutions
Bracket find_bracket(const GeneralRadialMetric& g0, const RadialPerturbation& h, double t, double c,
                     ConformalKind kind, const Vec& u) {
  Problem p = make_problem(perturbed(g0, h, t), c, kind);
  const double at = std::abs(t);
  const double slack = 1e-10;
  Bracket out;
  for (double s = 1.0; s < 1e9; s *= 2.0) {
    Vec hi = Vec::Ones(u.size()) + at * s * u;
    Vec lo = Vec::Ones(u.size()) - at * s * u;
    if (lo.minCoeff() <= 0.0) return out;
    if (is_super(p, hi, slack) && is_sub(p, lo, slack)) {
      out.ok = true;
      out.scale = s;
      return out;
    }
  }
  return out;
}

Vec principal_u(const GeneralRadialMetric& g0, double c, ConformalKind kind) {
  try {
    return kind == ConformalKind::Boundary ? principal_positive_solution(g0, c).u
                                           : principal_positive_neumann(g0, c).u;
  } catch (const CurvError& e) {
    if (e.kind() == ErrorKind::Precondition) throw CurvError(ErrorKind::Solvability, e.what(), e.value());
    throw;
  }
}

void check_class(const GeneralRadialMetric& g0, double c, ConformalKind kind) {
  RadialGeometry geo = radial_geometry(g0);
  auto bd = boundary_data(geo);
  // numerically built bases carry curvature noise near 1e-9
  const double tol = 1e-7;
  if (kind == ConformalKind::Boundary) {
    double r = sup(geo.scal);
    if (r > tol) throw CurvError(ErrorKind::Precondition, "boundary kind needs a scalar flat base metric", r);
    for (auto& b : bd)
      if (std::abs(b.H - c) > tol)
        throw CurvError(ErrorKind::Precondition, "boundary kind needs H = c on every boundary component", b.H - c);
  } else {
    double r = sup(geo.scal.array() - c);
    if (r > tol) throw CurvError(ErrorKind::Precondition, "interior kind needs R = c", r);
    for (auto& b : bd)
      if (std::abs(b.H) > tol) throw CurvError(ErrorKind::Precondition, "interior kind needs a minimal boundary", b.H);
  }
}

bool is_zero(const RadialPerturbation& h) {
  return (h.a.size() == 0 || sup(h.a) == 0.0) && (h.b.size() == 0 || sup(h.b) == 0.0);
}

// sub/super iteration plus optional Newton; returns false when the iterate leaves the bracket
bool iterate(const Problem& p, ConformalFactorPath& path, const ConformalOptions& opt) {
  const int m = static_cast<int>(path.phi.size());
  const double lo = path.lower.minCoeff(), hi = path.upper.maxCoeff();
  // monotone shifts: F(s) + K s and G(s) + M s nondecreasing on [lo, hi]
  double K = 0.0, M = 0.0;
  for (double s : {lo, hi}) {
    for (int i = 0; i < m; ++i) {
      if (p.isb[i]) continue;
      double dF = p.q(i) + p.ci * p.pi * std::pow(s, p.pi - 1.0);
      K = std::max(K, -dF);
    }
    for (size_t k = 0; k < p.bn.size(); ++k) {
      double dG = -p.hb[k] - p.cb * p.pb * std::pow(s, p.pb - 1.0);
      M = std::max(M, -dG);
    }
  }
  K = 1.05 * K + 1e-2;
  M = 1.05 * M + 1e-2;
  Mat S = -p.a * p.L;
  S.diagonal().array() += K;
  for (size_t k = 0; k < p.bn.size(); ++k) {
    S.row(p.bn[k]) = p.rows[k];
    S(p.bn[k], p.bn[k]) += M;
  }
  Eigen::PartialPivLU<Mat> lu(S);
  const double slack = 1e-9;
  auto inside = [&](const Vec& v) {
    double viol = std::max((path.lower - v).maxCoeff(), (v - path.upper).maxCoeff());
    path.bracket_violation = std::max(path.bracket_violation, std::max(0.0, viol));
    return viol <= slack;
  };
  Vec& phi = path.phi;
  double res = sup(residual_vec(p, phi));
  for (int it = 0; it < opt.max_sweeps; ++it) {
    if (res < opt.tol || (opt.newton && res < opt.newton_switch)) break;
    Vec rhs = p.q.cwiseProduct(phi) + K * phi;
    if (p.ci != 0.0) rhs += p.ci * phi.array().pow(p.pi).matrix();
    for (size_t k = 0; k < p.bn.size(); ++k) {
      const int b = p.bn[k];
      rhs(b) = M * phi(b) - p.hb[k] * phi(b) - p.cb * std::pow(phi(b), p.pb);
    }
    phi = lu.solve(rhs);
    ++path.sweeps;
    res = sup(residual_vec(p, phi));
    path.history.push_back(res);
    if (!inside(phi)) return false;
  }
  if (opt.newton) {
    double prev = res;
    for (int it = 0; it < opt.max_newton && res >= opt.tol; ++it) {
      Mat J = p.a * p.L;
      J.diagonal() += p.q;
      if (p.ci != 0.0) J.diagonal() += (p.ci * p.pi * phi.array().pow(p.pi - 1.0)).matrix();
      for (size_t k = 0; k < p.bn.size(); ++k) {
        const int b = p.bn[k];
        J.row(b) = p.rows[k];
        J(b, b) += p.hb[k] + p.cb * p.pb * std::pow(phi(b), p.pb - 1.0);
      }
      Vec step = J.partialPivLu().solve(residual_vec(p, phi));
      phi -= step;
      ++path.newton_steps;
      res = sup(residual_vec(p, phi));
      path.history.push_back(res);
      if (!inside(phi)) return false;
      // stalled at the roundoff floor
      if (sup(step) < 1e-15 || (it > 1 && res > 0.5 * prev)) break;
      prev = res;
    }
  }
  path.residual = res;
  return true;
}

bool attempt(const GeneralRadialMetric& g0, const RadialPerturbation& h, double t, double c, ConformalKind kind,
             const Vec& u0, const ConformalOptions& opt, ConformalFactorPath& path) {
  Bracket br = find_bracket(g0, h, t, c, kind, u0);
  if (!br.ok) return false;
  path = ConformalFactorPath{};
  path.kind = kind;
  path.h = h;
  path.t = t;
  path.c = c;
  path.g = perturbed(g0, h, t);
  path.u_scale = br.scale;
  path.u = br.scale * u0;
  const double at = std::abs(t);
  path.lower = Vec::Ones(u0.size()) - at * path.u;
  path.upper = Vec::Ones(u0.size()) + at * path.u;
  path.lower_const = 1.0 - at * path.u.maxCoeff();
  path.upper_const = 1.0 + at * path.u.maxCoeff();
  path.phi = opt.start == Start::Super ? path.upper : path.lower;
  Problem p = make_problem(path.g, c, kind);
  return iterate(p, path, opt);
}

}  // namespace

double conformal_residual(const GeneralRadialMetric& g, const Vec& phi, double c, ConformalKind kind) {
  return sup(residual_vec(make_problem(g, c, kind), phi));
}

ConformalFactorPath solve_conformal_bvp(const GeneralRadialMetric& g0, const RadialPerturbation& h, double t,
                                        double c, ConformalKind kind, const ConformalOptions& opt) {
  check_class(g0, c, kind);
  const int m = g0.grid.size();
  if (h.a.size() != m || h.b.size() != m) throw CurvError(ErrorKind::GridMismatch, "h does not match the grid");
  Vec u0 = principal_u(g0, c, kind);
  if (t == 0.0 || is_zero(h)) {
    // g(t) = g0 already solves the problem
    ConformalFactorPath path;
    path.kind = kind;
    path.h = h;
    path.t = t;
    path.c = c;
    path.g = perturbed(g0, h, t);
    path.u = u0;
    path.lower = path.upper = path.phi = Vec::Ones(m);
    path.sweeps = 1;
    path.residual = conformal_residual(path.g, path.phi, c, kind);
    path.history.push_back(path.residual);
    return path;
  }
  ConformalFactorPath path;
  if (attempt(g0, h, t, c, kind, u0, opt, path)) return path;
  // largest admissible |t| by bisection
  double good = 0.0, bad = std::abs(t);
  const double sgn = t > 0 ? 1.0 : -1.0;
  for (int it = 0; it < 30 && bad - good > 1e-6 * bad; ++it) {
    double mid = 0.5 * (good + bad);
    ConformalFactorPath trial;
    if (attempt(g0, h, sgn * mid, c, kind, u0, opt, trial))
      good = mid;
    else
      bad = mid;
  }
  throw CurvError(ErrorKind::TTooLarge, "bracket fails at t = " + std::to_string(t), good);
}

ConformalFactorPath solve_conformal_bvp(const WarpedMetric& g0, const RadialPerturbation& h, double t, double c,
                                        ConformalKind kind, const ConformalOptions& opt) {
  return solve_conformal_bvp(to_general(g0), h, t, c, kind, opt);
}

LinearizedFactor linearized_factor(const GeneralRadialMetric& g0, const RadialPerturbation& h, double c,
                                   ConformalKind kind, double fd_t) {
  const int n = g0.n;
  const double beta = (n - 2.0) / (4.0 * (n - 1.0));
  RadialGeometry geo = radial_geometry(g0);
  const int m = g0.grid.size();
  // the linear problem must be nondegenerate on the radial mode
  if (kind == ConformalKind::Boundary) {
    double w = 1e300;
    for (auto& e : steklov_spectrum(g0, c, 0, Exec::Serial).pairs) w = std::min(w, std::abs(e.sigma));
    if (w < 1e-10) throw CurvError(ErrorKind::Solvability, "radial Steklov eigenvalue vanishes", w);
  } else {
    double w = 1e300;
    for (auto& e : neumann_spectrum(g0, c, 0, 8, Exec::Serial).pairs) w = std::min(w, std::abs(e.sigma));
    if (w < 1e-10) throw CurvError(ErrorKind::Solvability, "radial Neumann eigenvalue vanishes", w);
  }
  Linearization lin = linearize_closed(g0, h);
  LinearizedFactor out;
  out.dR = lin.dR;
  std::vector<RobinRow> bc;
  for (auto& d : lin.dH) {
    out.dH.push_back(d.value);
    if (kind == ConformalKind::Boundary)
      bc.push_back({c / (n - 1.0), -2.0 * beta * d.value});
    else
      bc.push_back({0.0, -2.0 * beta * d.value});
  }
  Vec q = kind == ConformalKind::Boundary ? Vec::Zero(m) : Vec::Constant(m, -c / (n - 1.0));
  out.phi_hat = solve_radial_bvp(geo, q, beta * lin.dR, bc);
  if (fd_t > 0.0) {
    auto gap = [&](double t) {
      Vec p = solve_conformal_bvp(g0, h, t, c, kind).phi;
      Vec mnus = solve_conformal_bvp(g0, h, -t, c, kind).phi;
      return sup((p - mnus) / (2.0 * t) - out.phi_hat);
    };
    out.t = fd_t;
    out.gap = gap(fd_t);
    out.gap_half = gap(0.5 * fd_t);
    out.order = std::log2(out.gap / out.gap_half);
  }
  return out;
}

LinearizedFactor linearized_factor(const WarpedMetric& g0, const RadialPerturbation& h, double c, ConformalKind kind,
                                   double fd_t) {
  return linearized_factor(to_general(g0), h, c, kind, fd_t);
}

RadialPerturbation homothety(const GeneralRadialMetric& g, double s) {
  RadialPerturbation h;
  h.a = Vec::Constant(g.grid.size(), s);
  h.b = Vec::Constant(g.grid.size(), s);
  return h;
}

}  // namespace curvlab
