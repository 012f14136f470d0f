#include <cmath>
#include <numbers>
#include <random>

#include "curvlab/errors.hpp"
#include "curvlab/geometry.hpp"
#include "doctest.h"
#include "fd_oracle.hpp"

using namespace curvlab;
namespace {
constexpr double pi = std::numbers::pi;

WarpedMetric wm(int n, int eps, WarpTag tag, double r0, double R, double amp = 1.0, double rate = 1.0) {
  WarpedMetric w;
  w.n = n;
  w.cross.eps = eps;
  w.cross.area = 1.0;
  w.warp.tag = tag;
  w.warp.amp = amp;
  w.warp.rate = rate;
  w.r0 = r0;
  w.R = R;
  w.nodes = 32;
  return w;
}

double spread(const Vec& v) { return v.maxCoeff() - v.minCoeff(); }
}  // namespace

TEST_CASE("round hemisphere has R = 6 and a totally geodesic equator") {
  auto rep = curvature_report(wm(3, 1, WarpTag::Sin, 0.0, pi / 2));
  CHECK((rep.scal.array() - 6.0).abs().maxCoeff() < 1e-12);
  CHECK(std::abs(rep.H()) < 1e-15);
  CHECK(rep.boundaries.size() == 1);
}

TEST_CASE("flat cylinder over T^2") {
  auto rep = curvature_report(wm(3, 0, WarpTag::Constant, 0.0, 1.0));
  CHECK(rep.scal.cwiseAbs().maxCoeff() == 0.0);
  CHECK(rep.ric_rad.cwiseAbs().maxCoeff() == 0.0);
  CHECK(rep.ric_tan.cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(rep.boundaries.size() == 2);
  CHECK(rep.boundaries[0].H == 0.0);
  CHECK(rep.boundaries[1].H == 0.0);
}

TEST_CASE("unit Euclidean ball") {
  auto rep = curvature_report(wm(3, 1, WarpTag::Identity, 0.0, 1.0));
  CHECK(rep.scal.cwiseAbs().maxCoeff() < 1e-14);
  CHECK(std::abs(rep.H() - 2.0) < 1e-15);
  CHECK(std::abs(rep.pi0() - 1.0) < 1e-15);
}

TEST_CASE("hyperbolic geodesic ball against the Minkowski hyperboloid") {
  // dr^2 + sinh^2 r g_{S^3}: the cross-section is the round sphere
  const int n = 4;
  auto rep = curvature_report(wm(n, 1, WarpTag::Sinh, 0.0, 1.0));
  CHECK((rep.scal.array() + 12.0).abs().maxCoeff() < 1e-12);
  CHECK(std::abs(rep.H() - 3.0 * std::cosh(1.0) / std::sinh(1.0)) < 1e-13);

  // oracle: induced metric of X(r, w) = (cosh r, sinh r w) in R^{1,4}
  auto embed = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd X(n + 1);
    double r = x(0), a = x(1), b = x(2), c = x(3);
    Eigen::VectorXd w(n);
    w << std::cos(a), std::sin(a) * std::cos(b), std::sin(a) * std::sin(b) * std::cos(c),
        std::sin(a) * std::sin(b) * std::sin(c);
    X(0) = std::cosh(r);
    X.tail(n) = std::sinh(r) * w;
    return X;
  };
  fdo::MetricFn g = [&](const Eigen::VectorXd& x) {
    const double h = 1e-3;
    Eigen::MatrixXd J(n + 1, n);
    for (int k = 0; k < n; ++k) J.col(k) = fdo::central4(embed, x, k, h);
    Eigen::MatrixXd eta = Eigen::MatrixXd::Identity(n + 1, n + 1);
    eta(0, 0) = -1.0;
    return (J.transpose() * eta * J).eval();
  };
  for (double r : {0.4, 0.8}) {
    Eigen::VectorXd x = fdo::base_point(n, 1, r);
    double R_fd = fdo::scalar(g, x, 4e-3);
    CHECK(std::abs(R_fd + 12.0) / 12.0 < 1e-6);
  }
  Eigen::VectorXd xb = fdo::base_point(n, 1, 1.0);
  double H_fd = fdo::mean_curvature(g, xb, 1e-3);
  CHECK(std::abs(H_fd - rep.H()) / rep.H() < 1e-6);
}

TEST_CASE("hyperbolic cross-section product with cosh warp is also hyperbolic") {
  auto w = wm(4, -1, WarpTag::Cosh, 0.0, 1.0);
  auto rep = curvature_report(w);
  CHECK((rep.scal.array() + 12.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("Gauss identity at the boundary") {
  CHECK(gauss_identity_residual(wm(3, 1, WarpTag::Identity, 0.0, 1.0)) < 1e-13);
  CHECK(gauss_identity_residual(wm(3, 1, WarpTag::Sin, 0.0, pi / 2)) < 1e-13);
  CHECK(gauss_identity_residual(wm(3, 1, WarpTag::Sinh, 0.0, 1.0)) < 1e-10);
}

TEST_CASE("volumes and areas") {
  auto [v1, a1] = volume_area(wm(3, 1, WarpTag::Identity, 0.0, 1.0));
  CHECK(std::abs(v1 - 4.0 * pi / 3.0) < 1e-13);
  CHECK(std::abs(a1 - 4.0 * pi) < 1e-13);
  auto [v2, a2] = volume_area(wm(3, 1, WarpTag::Sin, 0.0, pi / 2));
  CHECK(std::abs(v2 - pi * pi) < 1e-12);
  CHECK(std::abs(a2 - 4.0 * pi) < 1e-13);
  auto [v3, a3] = volume_area(wm(3, 0, WarpTag::Constant, 0.0, 1.0));
  CHECK(std::abs(v3 - 1.0) < 1e-14);
  CHECK(std::abs(a3 - 2.0) < 1e-14);
}

TEST_CASE("domain and regularity errors") {
  auto bad = wm(3, 1, WarpTag::Sin, 0.0, 4.0);
  CHECK_THROWS_AS(curvature_report(bad), CurvError);
  auto cone = wm(3, 1, WarpTag::Identity, 0.0, 1.0, 0.5);
  try {
    curvature_report(cone);
    CHECK(false);
  } catch (const CurvError& e) {
    CHECK(e.kind() == ErrorKind::Regularity);
  }
  auto flatcap = wm(3, 0, WarpTag::Identity, 0.0, 1.0);
  CHECK_THROWS_AS(curvature_report(flatcap), CurvError);
}

TEST_CASE("closed-form curvature matches finite differences on random radial metrics") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + trial % 3;
    const bool cap = trial % 2 == 0;
    int eps = cap ? 1 : (trial % 3) - 1;
    double R = 0.6 + U(rng);
    double r0 = cap ? 0.0 : 0.2 + 0.3 * U(rng);
    double a1 = 0.4 * (U(rng) - 0.5), a2 = 0.4 * (U(rng) - 0.5), a3 = 0.5 * (U(rng) - 0.5);
    std::function<double(double)> A, B;
    if (cap) {
      A = [=](double r) { return 1.0 + a1 * r * r; };
      B = [=](double r) { return r * r * (1.0 + a1 * r * r + a2 * r * r * r * r) * std::exp(a3 * r * r); };
    } else {
      A = [=](double r) { return 1.0 + a1 * std::sin(2.0 * r) + 0.1; };
      B = [=](double r) { return std::pow(1.0 + a2 * r + a3 * r * r, 2) + 0.5; };
    }
    RadialGrid grid = cap ? RadialGrid::cap(R, 36) : RadialGrid::annulus(r0, R, 36);
    Vec Av(grid.size()), Bv(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
      Av(i) = A(grid.r()(i));
      Bv(i) = B(grid.r()(i));
    }
    CrossSection cs;
    cs.eps = eps;
    cs.area = 1.0;
    auto g = make_general(n, cs, grid, Av, Bv);
    auto rep = curvature_report(g);
    auto metric = fdo::warped(n, eps, A, B);
    for (int idx : {grid.size() / 3, (2 * grid.size()) / 3}) {
      double r = grid.r()(idx);
      Eigen::VectorXd x = fdo::base_point(n, eps, r);
      Eigen::MatrixXd Ric = fdo::ricci(metric, x, 1e-3);
      Eigen::MatrixXd gm = metric(x);
      double Rfd = (gm.inverse() * Ric).trace();
      double rr = Ric(0, 0) / gm(0, 0);
      double rt = Ric(1, 1) / gm(1, 1);
      double scale = 1.0 + std::abs(Rfd);
      CHECK(std::abs(rep.scal(idx) - Rfd) / scale < 1e-6);
      CHECK(std::abs(rep.ric_rad(idx) - rr) / (1.0 + std::abs(rr)) < 1e-6);
      CHECK(std::abs(rep.ric_tan(idx) - rt) / (1.0 + std::abs(rt)) < 1e-6);
    }
    Eigen::VectorXd xb = fdo::base_point(n, eps, R);
    double Hfd = fdo::mean_curvature(metric, xb, 1e-3);
    CHECK(std::abs(rep.H() - Hfd) / (1.0 + std::abs(Hfd)) < 1e-6);
  }
}

TEST_CASE("scaling law under c^2 g") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(0.5, 2.0);
  std::vector<WarpedMetric> ms = {wm(3, 1, WarpTag::Sin, 0.0, 1.2), wm(4, 1, WarpTag::Sinh, 0.0, 0.9),
                                  wm(3, 0, WarpTag::Constant, 0.0, 1.0), wm(5, -1, WarpTag::Cosh, 0.1, 0.8)};
  for (auto& w : ms) {
    for (int k = 0; k < 3; ++k) {
      double c = U(rng);
      auto a = curvature_report(w);
      auto b = curvature_report(scaled(w, c));
      CHECK((b.scal - a.scal / (c * c)).cwiseAbs().maxCoeff() < 1e-12 * (1 + a.scal.cwiseAbs().maxCoeff()));
      CHECK(std::abs(b.H() - a.H() / c) < 1e-12 * (1 + std::abs(a.H())));
      CHECK(std::abs(b.volume - a.volume * std::pow(c, w.n)) < 1e-12 * b.volume);
      CHECK(std::abs(b.area - a.area * std::pow(c, w.n - 1)) < 1e-12 * b.area);
      auto gs = scaled(to_general(w), c);
      auto d = curvature_report(gs);
      CHECK((d.scal - a.scal / (c * c)).cwiseAbs().maxCoeff() < 1e-8 * (1 + a.scal.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("umbilicity contract: Pi = pi0 g on every boundary") {
  auto rep = curvature_report(wm(3, 0, WarpTag::Cosh, 0.2, 1.1));
  for (auto& b : rep.boundaries) CHECK(std::abs(b.H - 2.0 * b.pi0) < 1e-15);
  CHECK(spread(rep.scal) >= 0.0);
}
