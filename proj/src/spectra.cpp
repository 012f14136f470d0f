#include "curvlab/spectra.hpp"

#include <algorithm>
#include <cmath>

#include "curvlab/errors.hpp"

namespace curvlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// same metric on a finer grid; used for the per-eigenvalue residual estimates
GeneralRadialMetric refine(const GeneralRadialMetric& g, int extra) {
  GeneralRadialMetric f = g;
  const int m = g.grid.size() + extra;
  f.grid = g.grid.is_cap() ? RadialGrid::cap(g.grid.R(), m) : RadialGrid::annulus(g.grid.r0(), g.grid.R(), m);
  f.A.resize(m);
  f.B.resize(m);
  for (int i = 0; i < m; ++i) {
    double r = f.grid.r()(i);
    if (g.exact && (g.A.array() == 1.0).all()) {
      double p = g.exact->value(r);
      f.A(i) = 1.0;
      f.B(i) = p * p;
    } else {
      f.A(i) = g.grid.interpolate(g.A, r, 1);
      f.B(i) = g.grid.interpolate(g.B, r, 1);
    }
  }
  return f;
}

// entry of largest magnitude, with its sign
double signed_max(const Vec& v) {
  Eigen::Index i;
  v.cwiseAbs().maxCoeff(&i);
  return v(i);
}

int mode_parity(const RadialGeometry& geo, int k) {
  if (!geo.grid->is_cap()) return 1;
  return (k % 2 == 0) ? 1 : -1;
}

struct StekMode {
  std::vector<double> sigma;
  std::vector<Vec> f;
  bool degenerate = false;
};

StekMode steklov_mode(const RadialGeometry& geo, double mu, int parity, double c) {
  const int m = geo.grid->size();
  const int n = geo.n;
  Mat L = geo.laplacian(mu, parity);
  auto rows = normal_derivative_rows(geo, parity);
  auto bn = boundary_nodes(*geo.grid);
  const int nb = static_cast<int>(bn.size());
  Mat rhs = Mat::Zero(m, nb);
  for (int k = 0; k < nb; ++k) {
    L.row(bn[k]).setZero();
    L(bn[k], bn[k]) = 1.0;
    rhs(bn[k], k) = 1.0;
  }
  Eigen::FullPivLU<Mat> lu(L);
  StekMode out;
  if (lu.rcond() < 1e-15) {
    out.degenerate = true;
    out.sigma.assign(nb, kInf);
    out.f.assign(nb, Vec::Zero(m));
    return out;
  }
  Mat F = lu.solve(rhs);
  // Dirichlet-to-Neumann matrix on the boundary components
  Mat N(nb, nb);
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j) N(i, j) = rows[i].dot(F.col(j));
  const double shift = c / (n - 1.0);
  if (nb == 1) {
    out.sigma.push_back(N(0, 0) - shift);
    out.f.push_back(F.col(0));
    return out;
  }
  Eigen::EigenSolver<Mat> es(N);
  std::vector<std::pair<double, Vec>> ev;
  for (int k = 0; k < nb; ++k) {
    Vec x = es.eigenvectors().col(k).real();
    ev.push_back({es.eigenvalues()(k).real() - shift, F * (x / signed_max(x))});
  }
  std::sort(ev.begin(), ev.end(), [](auto& a, auto& b) { return a.first < b.first; });
  for (auto& [s, p] : ev) {
    out.sigma.push_back(s);
    out.f.push_back(p);
  }
  return out;
}

// reduced operator after eliminating boundary nodes with the given boundary rows
struct Reduced {
  Mat K;
  std::vector<int> interior;
  std::vector<int> bnodes;
  Mat lift;  // f_B = lift * f_I
};

Reduced eliminate(const Mat& Op, const std::vector<Eigen::RowVectorXd>& brows, const std::vector<int>& bn) {
  const int m = static_cast<int>(Op.rows());
  Reduced r;
  r.bnodes = bn;
  std::vector<bool> isb(m, false);
  for (int b : bn) isb[b] = true;
  for (int i = 0; i < m; ++i)
    if (!isb[i]) r.interior.push_back(i);
  const int ni = static_cast<int>(r.interior.size()), nb = static_cast<int>(bn.size());
  Mat RBB(nb, nb), RBI(nb, ni);
  for (int a = 0; a < nb; ++a) {
    for (int b = 0; b < nb; ++b) RBB(a, b) = brows[a](bn[b]);
    for (int j = 0; j < ni; ++j) RBI(a, j) = brows[a](r.interior[j]);
  }
  r.lift = -RBB.fullPivLu().solve(RBI);
  Mat OII(ni, ni), OIB(ni, nb);
  for (int i = 0; i < ni; ++i) {
    for (int j = 0; j < ni; ++j) OII(i, j) = Op(r.interior[i], r.interior[j]);
    for (int b = 0; b < nb; ++b) OIB(i, b) = Op(r.interior[i], bn[b]);
  }
  r.K = OII + OIB * r.lift;
  return r;
}

Vec expand(const Reduced& r, const Vec& fi, int m) {
  Vec f(m);
  Vec fb = r.lift * fi;
  for (size_t j = 0; j < r.interior.size(); ++j) f(r.interior[j]) = fi(j);
  for (size_t b = 0; b < r.bnodes.size(); ++b) f(r.bnodes[b]) = fb(b);
  return f;
}

struct EigenList {
  std::vector<double> vals;
  std::vector<Vec> vecs;
};

// eigenvalues Lambda of -K with small imaginary parts, ascending
EigenList real_spectrum(const Reduced& r, int m) {
  Eigen::EigenSolver<Mat> es(-r.K);
  std::vector<std::pair<double, Vec>> ev;
  for (int k = 0; k < es.eigenvalues().size(); ++k) {
    auto lam = es.eigenvalues()(k);
    if (std::abs(lam.imag()) > 1e-8 * (1.0 + std::abs(lam.real()))) continue;
    Vec v = es.eigenvectors().col(k).real();
    Vec f = expand(r, v, m);
    ev.push_back({lam.real(), f / signed_max(f)});
  }
  std::sort(ev.begin(), ev.end(), [](auto& a, auto& b) { return a.first < b.first; });
  EigenList out;
  for (auto& [l, f] : ev) {
    out.vals.push_back(l);
    out.vecs.push_back(f);
  }
  return out;
}

EigenList neumann_mode(const RadialGeometry& geo, double mu, int parity, double c) {
  const int n = geo.n;
  Mat Op = (n - 1.0) * geo.laplacian(mu, parity);
  Op.diagonal().array() += c;
  Reduced r = eliminate(Op, normal_derivative_rows(geo, parity), boundary_nodes(*geo.grid));
  return real_spectrum(r, geo.grid->size());
}

template <class Body>
void for_modes(int count, Exec exec, Body body) {
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < count; ++k) body(k);
  } else {
    for (int k = 0; k < count; ++k) body(k);
  }
}

}  // namespace

std::vector<int> boundary_nodes(const RadialGrid& grid) {
  if (grid.is_cap()) return {grid.outer()};
  return {grid.outer(), 0};
}

std::vector<Eigen::RowVectorXd> normal_derivative_rows(const RadialGeometry& geo, int parity) {
  const Mat& D = geo.grid->D(parity);
  std::vector<Eigen::RowVectorXd> rows;
  const int o = geo.grid->outer();
  rows.push_back(D.row(o) / geo.sqrtA(o));
  if (!geo.grid->is_cap()) rows.push_back(-D.row(0) / geo.sqrtA(0));
  return rows;
}

double SpectrumResult::min_eigenvalue() const {
  double m = kInf;
  for (auto& p : pairs) m = std::min(m, p.sigma);
  return m;
}

std::vector<ModeEigen> SpectrumResult::mode(int k) const {
  std::vector<ModeEigen> out;
  for (auto& p : pairs)
    if (p.mode == k) out.push_back(p);
  return out;
}

SpectrumResult steklov_spectrum(const GeneralRadialMetric& g, double c, int k_max, Exec exec) {
  auto modes = g.cross.spectrum(g.n, k_max);
  GeneralRadialMetric gf = refine(g, 12);
  RadialGeometry geo = radial_geometry(g), geof = radial_geometry(gf);
  const int count = static_cast<int>(modes.size());
  std::vector<std::vector<ModeEigen>> slots(count);
  for_modes(count, exec, [&](int k) {
    const int par = mode_parity(geo, k);
    StekMode a = steklov_mode(geo, modes[k].first, par, c);
    StekMode b = steklov_mode(geof, modes[k].first, par, c);
    for (size_t j = 0; j < a.sigma.size(); ++j) {
      ModeEigen e;
      e.mode = k;
      e.mu = modes[k].first;
      e.multiplicity = modes[k].second;
      e.sigma = a.sigma[j];
      e.f = a.f[j];
      e.degenerate = a.degenerate;
      e.residual = a.degenerate ? 0.0 : std::abs(a.sigma[j] - b.sigma[j]);
      slots[k].push_back(e);
    }
  });
  SpectrumResult out;
  out.k_max = k_max;
  for (auto& s : slots)
    for (auto& e : s) out.pairs.push_back(e);
  return out;
}

SpectrumResult steklov_spectrum(const WarpedMetric& w, double c, int k_max, Exec exec) {
  return steklov_spectrum(to_general(w), c, k_max, exec);
}

SpectrumResult neumann_spectrum(const GeneralRadialMetric& g, double c, int k_max, int per_mode, Exec exec) {
  auto modes = g.cross.spectrum(g.n, k_max);
  GeneralRadialMetric gf = refine(g, 12);
  RadialGeometry geo = radial_geometry(g), geof = radial_geometry(gf);
  const int count = static_cast<int>(modes.size());
  std::vector<std::vector<ModeEigen>> slots(count);
  for_modes(count, exec, [&](int k) {
    const int par = mode_parity(geo, k);
    EigenList a = neumann_mode(geo, modes[k].first, par, c);
    EigenList b = neumann_mode(geof, modes[k].first, par, c);
    for (size_t j = 0; j < a.vals.size() && static_cast<int>(slots[k].size()) < per_mode; ++j) {
      // keep eigenvalues reproduced on the refined grid; the rest are discretization artefacts
      double best = kInf;
      for (double v : b.vals) best = std::min(best, std::abs(v - a.vals[j]));
      if (best > 1e-8 * (1.0 + std::abs(a.vals[j]))) continue;
      ModeEigen e;
      e.mode = k;
      e.mu = modes[k].first;
      e.multiplicity = modes[k].second;
      e.sigma = a.vals[j];
      e.f = a.vecs[j];
      e.residual = best;
      slots[k].push_back(e);
    }
  });
  SpectrumResult out;
  out.k_max = k_max;
  for (auto& s : slots)
    for (auto& e : s) out.pairs.push_back(e);
  return out;
}

SpectrumResult neumann_spectrum(const WarpedMetric& w, double c, int k_max, int per_mode, Exec exec) {
  return neumann_spectrum(to_general(w), c, k_max, per_mode, exec);
}

Vec solve_radial_bvp(const RadialGeometry& geo, const Vec& q, const Vec& F, const std::vector<RobinRow>& bc,
                     double mu, int parity) {
  const int m = geo.grid->size();
  Mat L = geo.laplacian(mu, parity);
  L.diagonal() -= q;
  Vec rhs = F;
  auto rows = normal_derivative_rows(geo, parity);
  auto bn = boundary_nodes(*geo.grid);
  if (bc.size() != bn.size())
    throw CurvError(ErrorKind::Invalid, "one Robin row is needed per boundary component");
  for (size_t k = 0; k < bn.size(); ++k) {
    L.row(bn[k]) = rows[k];
    L(bn[k], bn[k]) -= bc[k].p;
    rhs(bn[k]) = bc[k].G;
  }
  (void)m;
  return L.partialPivLu().solve(rhs);
}

namespace {
// first sign-definite eigenpair of -(Lap + shift) u = lambda u, d_nu u = k u; normalised to max u = 1
std::pair<double, Vec> robin_ground_state(const RadialGeometry& geo, double shift, double k) {
  const int m = geo.grid->size();
  auto rows = normal_derivative_rows(geo, 1);
  auto bn = boundary_nodes(*geo.grid);
  for (size_t b = 0; b < bn.size(); ++b) rows[b](bn[b]) -= k;
  Mat Op = geo.laplacian(0.0, 1);
  Op.diagonal().array() += shift;
  Reduced r = eliminate(Op, rows, bn);
  EigenList ev = real_spectrum(r, m);
  for (size_t j = 0; j < ev.vals.size(); ++j) {
    Vec u = ev.vecs[j];
    if (u.minCoeff() > 0.0 || u.maxCoeff() < 0.0) {
      u /= u.cwiseAbs().maxCoeff();
      if (u.minCoeff() < 0.0) u = -u;
      return {ev.vals[j], u};
    }
  }
  throw CurvError(ErrorKind::NonConvergence, "no sign-definite Robin ground state");
}

void fill_residuals(const RadialGeometry& geo, double shift, double k, PrincipalPair& out) {
  out.res_interior = (geo.laplacian_apply(out.u) + (shift + out.delta0) * out.u).cwiseAbs().maxCoeff();
  auto nrows = normal_derivative_rows(geo, 1);
  auto bn = boundary_nodes(*geo.grid);
  out.res_boundary = 0.0;
  for (size_t b = 0; b < bn.size(); ++b)
    out.res_boundary = std::max(out.res_boundary, std::abs(nrows[b].dot(out.u) - k * out.u(bn[b])));
}
}  // namespace

PrincipalPair principal_positive_solution(const GeneralRadialMetric& g, double c) {
  const int n = g.n;
  SpectrumResult st = steklov_spectrum(g, c, 4);
  const double s1 = st.min_eigenvalue();
  // sigma1 at roundoff level counts as zero
  if (!(s1 > 1e-10))
    throw CurvError(ErrorKind::Precondition,
                    "first Steklov eigenvalue of d/dnu - c/(n-1) is " + std::to_string(s1) + " <= 0", s1);
  PrincipalPair out;
  out.sigma1 = s1;
  out.delta = 0.5 * (n - 1) * s1;
  const double k = (c + out.delta) / (n - 1.0);
  RadialGeometry geo = radial_geometry(g);
  auto [lam, u] = robin_ground_state(geo, 0.0, k);
  out.u = u;
  out.delta0 = lam;
  if (!(out.delta0 > 0.0))
    throw CurvError(ErrorKind::NonConvergence, "Robin ground state has a nonpositive eigenvalue", out.delta0);
  fill_residuals(geo, 0.0, k, out);
  return out;
}

PrincipalPair principal_positive_neumann(const GeneralRadialMetric& g, double c) {
  const int n = g.n;
  const double lam = neumann_spectrum(g, c, 4).min_eigenvalue();
  if (!(lam > 1e-10))
    throw CurvError(ErrorKind::Precondition,
                    "first Neumann eigenvalue of (n-1) Lap + c is " + std::to_string(lam) + " <= 0", lam);
  RadialGeometry geo = radial_geometry(g);
  auto [vol, area] = volume_area(g);
  const double shift = c / (n - 1.0);
  PrincipalPair out;
  out.sigma1 = lam;
  // a positive Robin constant lowers the ground state by about delta * Area / Vol
  double k = 0.5 * lam / (n - 1.0) * vol / area;
  for (int it = 0; it < 40; ++it, k *= 0.5) {
    auto [mu, u] = robin_ground_state(geo, shift, k);
    if (mu > 0.0) {
      out.u = u;
      out.delta0 = mu;
      out.delta = k;
      fill_residuals(geo, shift, k, out);
      return out;
    }
  }
  throw CurvError(ErrorKind::NonConvergence, "no positive interior constant found");
}

PrincipalPair principal_positive_neumann(const WarpedMetric& w, double c) {
  return principal_positive_neumann(to_general(w), c);
}

PrincipalPair principal_positive_solution(const WarpedMetric& w, double c) {
  return principal_positive_solution(to_general(w), c);
}

LinearSolution solve_linear_boundary(const GeneralRadialMetric& g, double c, const LinearData& data) {
  const int n = g.n;
  RadialGeometry geo = radial_geometry(g);
  auto bn = boundary_nodes(g.grid);
  const int m = g.grid.size();
  LinearSolution out;
  std::vector<RobinRow> bc(bn.size());
  Vec q = Vec::Zero(m), F = Vec::Zero(m);
  if (data.kind == LinearKind::RobinBoundary) {
    if (data.boundary.size() != bn.size())
      throw CurvError(ErrorKind::Invalid, "Robin data needs one value per boundary component");
    StekMode s = steklov_mode(geo, 0.0, 1, c);
    double wit = kInf;
    for (double v : s.sigma) wit = std::min(wit, std::abs(v));
    out.eigenvalue = wit;
    if (wit < 1e-10)
      throw CurvError(ErrorKind::Solvability,
                      "Steklov eigenvalue " + std::to_string(wit) + " of d/dnu - c/(n-1) vanishes on the radial mode",
                      wit);
    for (size_t k = 0; k < bn.size(); ++k) bc[k] = {c / (n - 1.0), data.boundary[k] / (n - 1.0)};
  } else {
    if (data.interior.size() != m) throw CurvError(ErrorKind::GridMismatch, "interior data does not match the grid");
    EigenList ev = neumann_mode(geo, 0.0, 1, c);
    double wit = kInf;
    for (double v : ev.vals) wit = std::min(wit, std::abs(v));
    out.eigenvalue = wit;
    if (wit < 1e-10)
      throw CurvError(ErrorKind::Solvability,
                      "Neumann eigenvalue " + std::to_string(wit) + " of (n-1) Lap + c vanishes on the radial mode",
                      wit);
    q.setConstant(-c / (n - 1.0));
    F = data.interior;
  }
  out.V = solve_radial_bvp(geo, q, F, bc, 0.0, 1);
  Vec res = geo.laplacian_apply(out.V) - q.cwiseProduct(out.V) - F;
  out.residual = res.cwiseAbs().maxCoeff();
  auto rows = normal_derivative_rows(geo, 1);
  for (size_t k = 0; k < bn.size(); ++k)
    out.residual = std::max(out.residual, std::abs(rows[k].dot(out.V) - bc[k].p * out.V(bn[k]) - bc[k].G));
  return out;
}

LinearSolution solve_linear_boundary(const WarpedMetric& w, double c, const LinearData& data) {
  return solve_linear_boundary(to_general(w), c, data);
}

}  // namespace curvlab
