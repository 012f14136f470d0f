#include <cmath>
#include <numbers>

#include "curvlab/errors.hpp"
#include "curvlab/prescriber.hpp"

namespace curvlab {

namespace {

constexpr double pi = std::numbers::pi;

Vec min_norm_step(const Mat& J, const Vec& F) {
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(J);
  cod.setThreshold(1e-12);
  return cod.solve(-F);
}

// cap bounds the largest single-coordinate update
template <class Res, class Jac>
void newton(Vec& x, Res residual, Jac jacobian, const CylinderOptions& opt, CylinderFactor& out,
            double cap = 1e300) {
  Vec F = residual(x);
  double res = F.cwiseAbs().maxCoeff(), merit = F.norm();
  out.history.push_back(res);
  for (int it = 0; it < opt.max_iter && res > 1e-14; ++it) {
    Vec d = min_norm_step(jacobian(x), F);
    double step = std::min(1.0, cap / std::max(d.cwiseAbs().maxCoeff(), 1e-300)), trial = merit;
    Vec xn, Fn;
    for (int k = 0; k < 40; ++k) {
      xn = x + step * d;
      Fn = residual(xn);
      trial = Fn.norm();
      if (std::isfinite(trial) && trial < merit) break;
      step *= 0.5;
    }
    if (!(trial < merit)) break;
    merit = trial;
    trial = Fn.cwiseAbs().maxCoeff();
    x = xn;
    F = Fn;
    res = trial;
    out.history.push_back(res);
    out.iterations = it + 1;
  }
  out.residual = res;
  if (!(res < opt.tol)) throw CurvError(ErrorKind::NonConvergence, "cylinder Newton stagnated", res);
}

// ---- axial: A = e^{2a}, B = e^{2b}, K = -e^{-2a}(b_t^2 - a_t b_t + b_tt) ----

Vec axial_curvature(const Vec& a, const Vec& b, const Mat& D, const Mat& D2) {
  Vec at = D * a, bt = D * b, btt = D2 * b;
  return -(bt.cwiseProduct(bt) - at.cwiseProduct(bt) + btt).cwiseProduct(Vec((-2.0 * a).array().exp()));
}

void solve_axial(const CylinderTarget& f, const CylinderOptions& opt, CylinderFactor& out) {
  const RadialGrid& g = out.grid;
  const int m = g.size();
  const Mat& D = g.D(1);
  const Mat& D2 = g.D2(1);
  const Vec& w = g.weights(1);
  Vec fv(m);
  for (int i = 0; i < m; ++i) fv(i) = f(g.r()(i), 0.0);

  auto residual = [&](const Vec& x) {
    Vec a = x.head(m), b = x.tail(m);
    Vec F(m + 3);
    F.head(m) = axial_curvature(a, b, D, D2) - fv;
    Vec bt = D * b;
    F(m) = bt(0);
    F(m + 1) = bt(m - 1);
    F(m + 2) = 2.0 * pi * w.dot(Vec((a + b).array().exp())) - 1.0;
    return F;
  };
  auto jacobian = [&](const Vec& x) {
    Vec a = x.head(m), b = x.tail(m);
    Vec at = D * a, bt = D * b;
    Vec e = (-2.0 * a).array().exp();
    Vec K = axial_curvature(a, b, D, D2);
    Mat J = Mat::Zero(m + 3, 2 * m);
    J.topLeftCorner(m, m) = (e.cwiseProduct(bt)).asDiagonal() * D;
    J.topLeftCorner(m, m).diagonal() -= 2.0 * K;
    J.topRightCorner(m, m) = -(e.asDiagonal() * (Mat((2.0 * bt - at).asDiagonal()) * D + D2));
    J.block(m, m, 1, m) = D.row(0);
    J.block(m + 1, m, 1, m) = D.row(m - 1);
    Vec ea = (a + b).array().exp();
    J.block(m + 2, 0, 1, m) = 2.0 * pi * w.cwiseProduct(ea).transpose();
    J.block(m + 2, m, 1, m) = 2.0 * pi * w.cwiseProduct(ea).transpose();
    return J;
  };
  // gauge: a = -b + P c with a few cosine modes, which keeps the solution family smooth
  constexpr int kGauge = 4;
  Mat P(m, kGauge);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < kGauge; ++j) P(i, j) = std::cos(j * pi * g.r()(i));
  auto lift = [&](const Vec& y) {
    Vec x(2 * m);
    x.tail(m) = y.head(m);
    x.head(m) = -y.head(m) + P * y.tail(kGauge);
    return x;
  };
  auto gauge_residual = [&](const Vec& y) { return residual(lift(y)); };
  auto gauge_jacobian = [&](const Vec& y) {
    Mat Jx = jacobian(lift(y));
    Mat Jy(Jx.rows(), m + kGauge);
    Jy.leftCols(m) = Jx.rightCols(m) - Jx.leftCols(m);
    Jy.rightCols(kGauge) = Jx.leftCols(m) * P;
    return Jy;
  };
  Vec y = Vec::Zero(m + kGauge);
  y(m) = -std::log(2.0 * pi);
  newton(y, gauge_residual, gauge_jacobian, opt, out);
  Vec x = lift(y);
  out.A = (2.0 * x.head(m)).array().exp();
  out.B = (2.0 * x.tail(m)).array().exp();
  out.area = 2.0 * pi * w.dot(Vec((x.head(m) + x.tail(m)).array().exp()));

  // refined re-evaluation
  RadialGrid fine = RadialGrid::annulus(0.0, 1.0, m + m / 2 + 1);
  const int mf = fine.size();
  const double abar = x.head(m).mean(), bbar = x.tail(m).mean();
  Vec a(mf), b(mf);
  for (int i = 0; i < mf; ++i) {
    a(i) = g.interpolate(Vec(x.head(m).array() - abar), fine.r()(i));
    b(i) = g.interpolate(Vec(x.tail(m).array() - bbar), fine.r()(i));
  }
  Vec K = axial_curvature(a, b, fine.D(1), fine.D2(1)) * std::exp(-2.0 * abar);
  double err = 0.0;
  for (int i = 0; i < mf; ++i) err = std::max(err, std::abs(K(i) - f(fine.r()(i), 0.0)));
  Vec dA = (a + b).array().exp() * std::exp(abar + bbar);
  out.gauss_bonnet = 2.0 * pi * fine.weights(1).dot(K.cwiseProduct(dA));
  Vec bt = fine.D(1) * b;
  out.boundary_curvature =
      std::max(std::abs(bt(0) * std::exp(-a(0) - abar)), std::abs(bt(mf - 1) * std::exp(-a(mf - 1) - abar)));
  out.curvature_error = err;
}

// ---- general: e^{2u}(l^2 dt^2 + dtheta^2), x = (u, log l) ----

void solve_conformal(const CylinderTarget& f, const CylinderOptions& opt, CylinderFactor& out) {
  const RadialGrid& g = out.grid;
  const int m = g.size(), q = out.ntheta, n = m * q;
  const Mat& Dt = g.D(1);
  const Mat& Dt2 = g.D2(1);
  const Mat Dth2 = fourier_matrix(q, 2);
  const Vec& w = g.weights(1);
  Mat tt = Mat::Zero(n, n), th = Mat::Zero(n, n);
  Vec fv = Vec::Zero(n), area(n), interior(n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < q; ++j) {
      const int row = i * q + j;
      const bool bnd = (i == 0 || i == m - 1);
      interior(row) = bnd ? 0.0 : 1.0;
      area(row) = w(i) * 2.0 * pi / q;
      for (int k = 0; k < m; ++k) tt(row, k * q + j) = bnd ? Dt(i, k) : Dt2(i, k);
      if (!bnd) {
        for (int l = 0; l < q; ++l) th(row, i * q + l) = Dth2(j, l);
        fv(row) = f(g.r()(i), 2.0 * pi * j / q);
      }
    }
  // boundary rows carry the Neumann condition, unscaled by the modulus
  auto tscale = [&](double il2) { return Vec((interior.array() * (il2 - 1.0) + 1.0).matrix()); };

  // interior rows f - K, boundary rows u_t
  Vec target = fv;
  auto weight = [&](const Vec& u) {
    return Vec((interior.array() * ((-2.0 * u).array().exp() - 1.0) + 1.0).matrix());
  };
  // constants are in the kernel; centring keeps them out of the roundoff
  auto centred = [](const Vec& u) { return Vec(u.array() - u.mean()); };
  auto residual = [&](const Vec& x) {
    Vec u = x.head(n), uc = centred(u);
    Vec F(n + 1);
    F.head(n) = weight(u).cwiseProduct(th * uc + tscale(std::exp(-2.0 * x(n))).cwiseProduct(tt * uc)) + target;
    F(n) = std::exp(x(n)) * area.dot(Vec((2.0 * u).array().exp())) - 1.0;
    return F;
  };
  auto jacobian = [&](const Vec& x) {
    Vec u = x.head(n);
    const double il2 = std::exp(-2.0 * x(n));
    Vec e2 = (2.0 * u).array().exp();
    Vec wu = weight(u);
    Vec uc = centred(u);
    Vec Lu = th * uc + tscale(il2).cwiseProduct(tt * uc);
    Mat J = Mat::Zero(n + 1, n + 1);
    J.topLeftCorner(n, n) = wu.asDiagonal() * (th + tscale(il2).asDiagonal() * tt);
    J.topLeftCorner(n, n).diagonal() -= 2.0 * (wu.cwiseProduct(Lu)).cwiseProduct(interior);
    J.col(n).head(n) = -2.0 * il2 * wu.cwiseProduct(interior.cwiseProduct(tt * uc));
    J.row(n).head(n) = 2.0 * std::exp(x(n)) * area.cwiseProduct(e2).transpose();
    J(n, n) = std::exp(x(n)) * area.dot(e2);
    return J;
  };
  Vec x = Vec::Zero(n + 1);
  // f = 0 has a one-parameter flat family; pin the base modulus
  if (fv.cwiseAbs().maxCoeff() == 0.0) {
    x.head(n).setConstant(-0.5 * std::log(2.0 * pi));
    newton(x, residual, jacobian, opt, out);
  } else {
    // homotopy from the exact curvature of an axial bump metric to f
    for (int i = 0; i < m; ++i) x.segment(i * q, q).setConstant(0.1 * std::cos(pi * g.r()(i)));
    x.head(n).array() -= 0.5 * std::log(area.dot(Vec((2.0 * x.head(n)).array().exp())));
    target.setZero();
    const Vec start = -interior.cwiseProduct(residual(x).head(n));
    CylinderOptions inner = opt;
    inner.tol = std::max(opt.tol, 1e-8);
    inner.max_iter = 20;
    double s = 0.0, ds = 0.25;
    while (s < 1.0) {
      const double sn = std::min(1.0, s + ds);
      target = (1.0 - sn) * start + sn * fv;
      Vec xn = x;
      CylinderFactor scratch;
      try {
        newton(xn, residual, jacobian, inner, scratch, 0.5);
      } catch (const CurvError&) {
        ds *= 0.5;
        if (ds < 1e-4) throw CurvError(ErrorKind::NonConvergence, "cylinder continuation stalled", s);
        continue;
      }
      x = xn;
      s = sn;
      ds = std::min(0.5, 2.0 * ds);
  }
  target = fv;
  newton(x, residual, jacobian, opt, out, 0.5);
  }
  Vec u = x.head(n);
  const double ell = std::exp(x(n));
  out.modulus = ell;
  out.u = Eigen::Map<Mat>(u.data(), q, m).transpose();
  out.area = ell * area.dot(Vec((2.0 * u).array().exp()));

  // K = -e^{-2u} Lap u on a finer t grid; the constant part of u only feeds roundoff into D2
  RadialGrid fine = RadialGrid::annulus(0.0, 1.0, m + m / 2 + 1);
  const int mf = fine.size();
  const double ubar = out.u.mean();
  Mat uf(mf, q);
  for (int j = 0; j < q; ++j) {
    Vec col = out.u.col(j).array() - ubar;
    for (int i = 0; i < mf; ++i) uf(i, j) = g.interpolate(col, fine.r()(i));
  }
  Mat utt = fine.D2(1) * uf;
  Mat ut = fine.D(1) * uf;
  Mat uthth = uf * Dth2.transpose();
  const Vec& wf = fine.weights(1);
  double err = 0.0, gb = 0.0, kg = 0.0;
  for (int i = 0; i < mf; ++i)
    for (int j = 0; j < q; ++j) {
      double e2 = std::exp(2.0 * (uf(i, j) + ubar));
      double K = -(utt(i, j) / (ell * ell) + uthth(i, j)) / e2;
      err = std::max(err, std::abs(K - f(fine.r()(i), 2.0 * pi * j / q)));
      gb += ell * wf(i) * 2.0 * pi / q * K * e2;
    }
  for (int i : {0, mf - 1})
    for (int j = 0; j < q; ++j) kg = std::max(kg, std::abs(std::exp(-uf(i, j) - ubar) * ut(i, j) / ell));
  out.curvature_error = err;
  out.gauss_bonnet = gb;
  out.boundary_curvature = kg;
}

}  // namespace

CylinderFactor prescribe_cylinder_gauss_curvature(const CylinderTarget& f, bool axial, const CylinderOptions& opt) {
  auto v = validate_range(f, 0.0, 129, axial ? 1 : 128);
  if (v.verdict == RangeCase::Infeasible)
    throw CurvError(ErrorKind::Precondition, "Gauss curvature target must change sign or vanish", v.min);
  CylinderFactor out;
  out.axial = axial;
  out.grid = RadialGrid::annulus(0.0, 1.0, opt.nt);
  out.ntheta = axial ? 1 : opt.ntheta;
  if (axial)
    solve_axial(f, opt, out);
  else
    solve_conformal(f, opt, out);
  return out;
}

}  // namespace curvlab
