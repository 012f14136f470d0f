#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "curvlab/errors.hpp"
#include "curvlab/models.hpp"
#include "curvlab/prescriber.hpp"
#include "doctest.h"

using namespace curvlab;

namespace {
constexpr double pi = std::numbers::pi;

TrigSeries series(double a0, std::vector<double> a, std::vector<double> b) {
  TrigSeries f;
  f.a0 = a0;
  f.a = std::move(a);
  f.b = std::move(b);
  return f;
}

// 2 pi + tanh(3 sin theta), truncated Fourier series: a monotone smoothed step
TrigSeries smoothed_step() {
  TrigSeries f;
  f.a0 = 2.0 * pi;
  const int K = 25, M = 4096;
  f.b.assign(K, 0.0);
  for (int k = 1; k <= K; ++k)
    for (int j = 0; j < M; ++j) {
      double t = 2.0 * pi * j / M;
      f.b[k - 1] += std::tanh(3.0 * std::sin(t)) * std::sin(k * t) * 2.0 / M;
    }
  return f;
}

template <class F>
ErrorKind kind_of(F&& fn) {
  try {
    fn();
  } catch (const CurvError& e) {
    return e.kind();
  }
  return ErrorKind::Invalid;
}
}  // namespace

TEST_CASE("fourier operators on pure modes") {
  const int N = 64;
  Vec th = circle_nodes(N);
  Vec c3 = th.unaryExpr([](double t) { return std::cos(3.0 * t); });
  Vec s3 = th.unaryExpr([](double t) { return std::sin(3.0 * t); });
  CHECK((fourier_derivative(s3) - 3.0 * c3).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((fourier_derivative(s3, 2) + 9.0 * s3).cwiseAbs().maxCoeff() < 1e-11);
  CHECK((dirichlet_to_neumann(c3) - 3.0 * c3).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((harmonic_conjugate(c3) - s3).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((fourier_matrix(N, 1) * s3 - 3.0 * c3).cwiseAbs().maxCoeff() < 1e-11);
  CHECK((dtn_matrix(N) * c3 - 3.0 * c3).cwiseAbs().maxCoeff() < 1e-11);
  Vec up = upsample(s3, 4);
  Vec th4 = circle_nodes(4 * N);
  for (int i = 0; i < up.size(); ++i) CHECK(up(i) == doctest::Approx(std::sin(3.0 * th4(i))).epsilon(1e-12));
  CHECK(trig_interpolate(s3, 0.123) == doctest::Approx(std::sin(0.369)).epsilon(1e-12));
}

TEST_CASE("range conditions") {
  CHECK(validate_range(TrigSeries::constant(2.0 * pi), 2.0 * pi).verdict == RangeCase::Constant);
  CHECK(validate_range(series(2.0 * pi, {}, {1.0}), 2.0 * pi).verdict == RangeCase::Straddle);
  // min is exactly 2 pi: not strict
  auto v = validate_range(series(2.0 * pi + 1.0, {}, {1.0}), 2.0 * pi);
  CHECK(v.verdict == RangeCase::Infeasible);
  CHECK(v.min == doctest::Approx(2.0 * pi).epsilon(1e-14));
  CHECK(validate_range(series(7.0, {}, {0.1}), 2.0 * pi).verdict == RangeCase::Infeasible);
  CHECK(std::string(range_case_name(RangeCase::Straddle)) == "straddle-case");

  CylinderTarget zero = [](double, double) { return 0.0; };
  CylinderTarget wave = [](double t, double) { return std::cos(2.0 * pi * t); };
  CylinderTarget one = [](double, double) { return 1.0; };
  CHECK(validate_range(zero, 0.0).verdict == RangeCase::Constant);
  CHECK(validate_range(wave, 0.0).verdict == RangeCase::Straddle);
  CHECK(validate_range(one, 0.0).verdict == RangeCase::Infeasible);
}

TEST_CASE("pullback approximation") {
  SUBCASE("h = f is the identity") {
    auto f = series(1.0, {0.5}, {0.2});
    auto r = approx_by_pullback(f, f, 1e-6, 2.0);
    CHECK(r.phi.identity);
    CHECK(r.lp < 1e-12);
    CHECK(r.seminorm < 1e-10);
  }
  SUBCASE("sin toward 0 in L^4") {
    auto f = series(0.0, {}, {1.0});
    auto r = approx_by_pullback(f, TrigSeries::constant(0.0), 1e-3, 4.0);
    CHECK(r.lp < 1e-3);
    CHECK_FALSE(r.phi.identity);
    // the diffeomorphism is monotone and degree one
    double prev = r.phi(0.0);
    for (int i = 1; i < 200; ++i) {
      double x = 2.0 * pi * i / 200;
      double y = r.phi(x);
      CHECK(y > prev);
      prev = y;
    }
    CHECK(r.phi.inverse(r.phi.theta0 + 2.0 * pi) == doctest::Approx(2.0 * pi).epsilon(1e-12));
    // L^p cross-check by brute force in x
    const int M = 20000;
    double s = 0.0;
    for (int i = 0; i < M; ++i) s += std::pow(std::abs(f(r.phi(2.0 * pi * (i + 0.5) / M))), 4.0) * 2.0 * pi / M;
    CHECK(std::pow(s, 0.25) == doctest::Approx(r.lp).epsilon(0.05));
  }
  SUBCASE("h outside the range of f") {
    auto f = series(0.0, {}, {1.0});
    CHECK(kind_of([&] { approx_by_pullback(f, TrigSeries::constant(2.0), 1e-3, 2.0); }) ==
          ErrorKind::Precondition);
  }
}

TEST_CASE("disk curvature by symbol and by developed curve agree") {
  std::mt19937 rng(11);
  std::normal_distribution<double> Z(0.0, 1.0);
  const int N = 128;
  Vec th = circle_nodes(N);
  Vec u = Vec::Zero(N);
  for (int k = 1; k <= 6; ++k) {
    double a = 0.3 * Z(rng) / k, b = 0.3 * Z(rng) / k;
    for (int i = 0; i < N; ++i) u(i) += a * std::cos(k * th(i)) + b * std::sin(k * th(i));
  }
  double gb, cl;
  Vec k1 = disk_curvature(u), k2 = disk_curvature_by_curve(u, &gb, &cl);
  CHECK((k1 - k2).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(std::abs(gb) < 1e-10);
  CHECK(cl < 1e-10);
}

TEST_CASE("curvature vertex count") {
  CHECK(curvature_vertices([](double) { return 2.0 * pi; }) == -1);
  CHECK(curvature_vertices([](double t) { return std::sin(t); }) == 2);
  CHECK(curvature_vertices([](double t) { return std::cos(2.0 * t); }) == 4);
  CHECK(curvature_vertices([](double t) { return std::cos(5.0 * t) + 3.0 * std::sin(t); }) >= 4);
}

TEST_CASE("disk geodesic curvature") {
  SUBCASE("constant 2 pi") {
    auto r = prescribe_disk_geodesic_curvature(TrigSeries::constant(2.0 * pi));
    CHECK((r.u.array() + std::log(2.0 * pi)).abs().maxCoeff() < 1e-12);
    CHECK(r.length == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.curvature_error < 1e-10);
  }
  SUBCASE("four-vertex targets") {
    for (auto f : {series(2.0 * pi, {0.0, 0.5}, {0.2}), series(2.0 * pi, {0.0, 0.5, 0.3}, {0.5})}) {
      auto r = prescribe_disk_geodesic_curvature(f);
      CHECK(std::abs(r.length - 1.0) < 1e-10);
      CHECK(r.curvature_error < 1e-8);
      CHECK(std::abs(r.gauss_bonnet) < 1e-9);
      CHECK(r.closure < 1e-9);
      CHECK(r.min_dpsi > 0.0);
      // the reported target is f along the boundary map
      for (int i = 0; i < r.psi.size(); i += 17) CHECK(r.target(i) == doctest::Approx(f(r.psi(i))).epsilon(1e-14));
    }
  }
  SUBCASE("two vertices rule out every flat disk") {
    try {
      prescribe_disk_geodesic_curvature(series(2.0 * pi, {}, {1.0}));
      CHECK(false);
    } catch (const CurvError& e) {
      CHECK(e.kind() == ErrorKind::Infeasible);
      CHECK(e.value() == 2.0);
    }
  }
  SUBCASE("2 pi + 3 sin + cos 5: closings only with unresolved concentration") {
    std::vector<double> a(5, 0.0);
    a[4] = 1.0;
    CHECK(kind_of([&] { prescribe_disk_geodesic_curvature(series(2.0 * pi, a, {3.0})); }) ==
          ErrorKind::NonConvergence);
  }
  SUBCASE("range violations") {
    CHECK(kind_of([] { prescribe_disk_geodesic_curvature(series(2.0 * pi + 1.0, {}, {1.0})); }) ==
          ErrorKind::Precondition);
    CHECK(kind_of([] { prescribe_disk_geodesic_curvature(TrigSeries::constant(1.0)); }) ==
          ErrorKind::Precondition);
  }
}

TEST_CASE("closing density and Kazdan-Warner balance") {
  auto f = series(2.0 * pi, {0.0, 0.5}, {0.2});
  auto c = close_curve([&](double t) { return f(t); });
  CHECK(std::abs(c.turning) < 1e-11);
  CHECK(c.closure < 1e-11);
  // brute-force closure of the curve with curvature f in the sigma parametrisation
  const int M = 4096;
  std::complex<double> z = 0.0;
  double T = 0.0;
  for (int i = 0; i < M; ++i) {
    double th = 2.0 * pi * (i + 0.5) / M;
    double w = c.density.rho(th) * 2.0 * pi / M;
    T += 0.5 * f(th) * w;
    z += w * std::polar(1.0, T);
    T += 0.5 * f(th) * w;
  }
  CHECK(std::abs(z) < 1e-6);
  CHECK(T == doctest::Approx(2.0 * pi).epsilon(1e-9));
  CHECK(c.density.sigma(c.density.tau(1.234)) == doctest::Approx(1.234).epsilon(1e-12));
}

TEST_CASE("disk solution transforms under a Moebius automorphism") {
  auto f = series(2.0 * pi, {0.0, 0.5}, {0.2});
  auto r = prescribe_disk_geodesic_curvature(f);
  const double a = 0.3;
  const int N = static_cast<int>(r.u.size());
  Vec th = circle_nodes(N), v(N), fpsi(N);
  for (int i = 0; i < N; ++i) {
    std::complex<double> z = std::polar(1.0, th(i));
    std::complex<double> w = (z - a) / (1.0 - a * z);
    double m = std::arg(w);
    if (m < 0.0) m += 2.0 * pi;
    double jac = (1.0 - a * a) / std::norm(1.0 - a * z);
    v(i) = trig_interpolate(r.u, m) + std::log(jac);
    fpsi(i) = f(boundary_map(r, m));
  }
  CHECK((disk_curvature(v) - fpsi).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(2.0 * pi / N * v.array().exp().sum() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("min-max pipeline") {
  SUBCASE("four-vertex target") {
    auto f = series(2.0 * pi, {0.0, 0.5}, {0.2});
    auto rep = min_max_prescribe_disk(f);
    CHECK(rep.stage == "done");
    CHECK(rep.end_to_end < 1e-8);
    CHECK(std::abs(rep.local.length - 1.0) < 1e-10);
    CHECK(std::abs(rep.local.gauss_bonnet) < 1e-9);
    CHECK(rep.direct_gap < 1e-9);
    CHECK(rep.pullback.lp <= rep.pullback.eps);
  }
  SUBCASE("two-vertex targets stop before any solve") {
    for (auto f : {series(2.0 * pi, {}, {1.0}), smoothed_step()}) {
      try {
        min_max_prescribe_disk(f);
        CHECK(false);
      } catch (const CurvError& e) {
        CHECK(e.kind() == ErrorKind::Infeasible);
        CHECK(std::string(e.what()).rfind("[vertices]", 0) == 0);
      }
    }
  }
  SUBCASE("min f = 2 pi") {
    CHECK(kind_of([] { min_max_prescribe_disk(series(2.0 * pi + 1.0, {}, {1.0})); }) == ErrorKind::Precondition);
  }
}

TEST_CASE("cylinder Gauss curvature") {
  SUBCASE("flat, axial") {
    auto r = prescribe_cylinder_gauss_curvature([](double, double) { return 0.0; }, true);
    CHECK(std::abs(r.area - 1.0) < 1e-12);
    CHECK(r.curvature_error < 1e-9);
    CHECK(std::abs(r.gauss_bonnet) < 1e-12);
  }
  SUBCASE("flat, conformal") {
    auto r = prescribe_cylinder_gauss_curvature([](double, double) { return 0.0; }, false);
    CHECK((r.u.array() + 0.5 * std::log(2.0 * pi)).abs().maxCoeff() < 1e-12);
    CHECK(r.modulus == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(r.area - 1.0) < 1e-12);
  }
  SUBCASE("cos 2 pi t, axial") {
    auto f = [](double t, double) { return std::cos(2.0 * pi * t); };
    auto r = prescribe_cylinder_gauss_curvature(f, true);
    CHECK(std::abs(r.area - 1.0) < 1e-10);
    CHECK(r.curvature_error < 1e-8);
    CHECK(std::abs(r.gauss_bonnet) < 1e-9);
    CHECK(r.boundary_curvature < 1e-8);
    CHECK(r.ntheta == 1);
    CHECK(r.A.minCoeff() > 0.0);
    CHECK(r.B.minCoeff() > 0.0);
    // independent area: 2 pi int sqrt(A B) dt by the trapezoid rule on the interpolants
    const int M = 2000;
    double area = 0.0;
    Vec ab = (r.A.cwiseProduct(r.B)).cwiseSqrt();
    for (int i = 0; i <= M; ++i) {
      double t = double(i) / M, w = (i == 0 || i == M) ? 0.5 / M : 1.0 / M;
      area += 2.0 * pi * w * r.grid.interpolate(ab, t);
    }
    CHECK(area == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("manufactured non-axial target") {
    // u0 = c + 0.1 cos(pi t)(1 + 0.3 cos theta) with modulus 1.3 has unit area for this c
    const double ell = 1.3, c = -1.0553343253527192;
    auto f = [&](double t, double th) {
      double u = c + 0.1 * std::cos(pi * t) * (1.0 + 0.3 * std::cos(th));
      double utt = -pi * pi * 0.1 * std::cos(pi * t) * (1.0 + 0.3 * std::cos(th));
      double uthth = -0.03 * std::cos(pi * t) * std::cos(th);
      return -std::exp(-2.0 * u) * (utt / (ell * ell) + uthth);
    };
    CylinderOptions o;
    o.nt = 24;
    o.ntheta = 16;
    auto r = prescribe_cylinder_gauss_curvature(f, false, o);
    CHECK(std::abs(r.area - 1.0) < 1e-10);
    CHECK(r.curvature_error < 1e-8);
    CHECK(std::abs(r.gauss_bonnet) < 1e-9);
    CHECK(r.boundary_curvature < 1e-9);
    CHECK(r.modulus == doctest::Approx(ell).epsilon(1e-6));
  }
  SUBCASE("positive target has no solution") {
    CHECK(kind_of([] { prescribe_cylinder_gauss_curvature([](double, double) { return 1.0; }, true); }) ==
          ErrorKind::Precondition);
  }
}

TEST_CASE("local prescription of R") {
  auto g0 = hyperbolic_product(3);
  auto rep0 = curvature_report(g0);
  REQUIRE(rep0.volume == doctest::Approx(1.0).epsilon(1e-12));
  auto grid = to_general(g0).grid;

  SUBCASE("target equal to R(g0)") {
    auto r = local_prescribe_radial(g0, rep0.scal, 0.1);
    CHECK(r.steps == 0);
    CHECK(r.proxy == "neumann");
    CHECK(r.injectivity_witness == doctest::Approx(2.0 / 2.0).epsilon(1e-8));
  }
  SUBCASE("small bump") {
    Vec f1 = rep0.scal + 0.01 * interior_bump(grid, 0.5, 0.3);
    auto r = local_prescribe_radial(g0, f1, 0.1);
    CHECK(r.steps > 0);
    CHECK(r.res_R < 1e-9);
    CHECK(r.res_H < 1e-9);
    CHECK(r.res_vol < 1e-9);
    auto rep = curvature_report(r.g);
    CHECK((rep.scal - f1).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(rep.volume == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("far target") {
    Vec f1 = rep0.scal + 5.0 * interior_bump(grid, 0.5, 0.3);
    CHECK(kind_of([&] { local_prescribe_radial(g0, f1, 10.0); }) == ErrorKind::EtaTooLarge);
    CHECK(kind_of([&] { local_prescribe_radial(g0, f1, 1.0); }) == ErrorKind::Precondition);
  }
  SUBCASE("hemisphere fails the injectivity proxy") {
    auto h = hemisphere(3);
    auto vol = volume_area(h).first;
    auto hs = scaled(h, std::pow(vol, -1.0 / 3.0));
    auto rep = curvature_report(hs);
    try {
      local_prescribe_radial(hs, rep.scal, 0.1);
      CHECK(false);
    } catch (const CurvError& e) {
      CHECK(e.kind() == ErrorKind::Obstruction);
      CHECK(e.value() < 0.0);
    }
  }
}
