#include <cmath>
#include <numbers>
#include <random>

#include "curvlab/errors.hpp"
#include "curvlab/models.hpp"
#include "curvlab/vstatic_lab.hpp"
#include "doctest.h"

using namespace curvlab;

namespace {
ExampleSpec spec(Family f, int n, double R, double a, double kappa) {
  ExampleSpec s;
  s.family = f;
  s.n = n;
  s.R = R;
  s.a = a;
  s.kappa = kappa;
  return s;
}
}  // namespace

TEST_CASE("example builders: closed-form tau values") {
  auto hs = build_example(spec(Family::SphericalCap, 3, std::numbers::pi / 2, 1.0, 0.0));
  CHECK(std::abs(hs.potential.tau + 1.0) < 1e-15);
  CHECK(std::abs(hs.tabulated_tau + 1.0) < 1e-15);

  // the boundary equation d_nu V - V coth R = tau fixes tau = -1/sinh R for V = cosh r
  auto hc = build_example(spec(Family::HyperbolicCap, 3, 1.0, 1.0, 0.0));
  CHECK(std::abs(hc.potential.tau + 1.0 / std::sinh(1.0)) < 1e-15);
  CHECK(std::abs(hc.tabulated_tau - std::cosh(2.0) / std::sinh(1.0)) < 1e-15);
  // the tabulated value leaves a boundary residual equal to the gap
  PotentialTriple p = hc.potential;
  p.tau = hc.tabulated_tau;
  auto r = vstatic_residual(to_general(hc.metric), p);
  CHECK(std::abs(r.boundary - std::abs(hc.tabulated_tau - hc.potential.tau)) < 1e-10);

  auto cyl = build_example(spec(Family::RicciFlatProduct, 4, 1.0, 1.0, 0.0));
  CHECK(cyl.potential.V.cwiseAbs().maxCoeff() == 1.0);
  CHECK(cyl.potential.kappa == 0.0);
  CHECK(cyl.potential.tau == 0.0);
  CHECK(certify(cyl).pass);
}

TEST_CASE("invalid example specs are rejected") {
  CHECK_THROWS_AS(build_example(spec(Family::SphericalCap, 3, 3.5, 1.0, 0.0)), CurvError);
  CHECK_THROWS_AS(build_example(spec(Family::HyperbolicCap, 3, -1.0, 1.0, 0.0)), CurvError);
  CHECK_THROWS_AS(build_example(spec(Family::RicciFlatProduct, 3, 1.0, 1.0, 2.0)), CurvError);
  auto s = spec(Family::SphericalCap, 3, 1.0, 1.0, 0.0);
  s.b = {1.0, 0.0, 0.0};
  CHECK_THROWS_AS(build_example(s), CurvError);
  CHECK_THROWS_AS(family_from("torus"), CurvError);
  CHECK(family_from("hyperbolic-cap") == Family::HyperbolicCap);
}

TEST_CASE("polynomial algebra") {
  auto x1 = Polynomial::coordinate(3, 0), x2 = Polynomial::coordinate(3, 1);
  auto p = x1 * x1 * x2 + x2 * 3.0;
  CHECK(p.derivative(0).eval({2.0, 5.0, 0.0}) == 20.0);
  CHECK(p.derivative(1).eval({2.0, 5.0, 0.0}) == 7.0);
  // x1^2 + x2^2 + x3^2 reduces to rho^2
  auto q = x1 * x1 + x2 * x2 + Polynomial::coordinate(3, 2) * Polynomial::coordinate(3, 2);
  auto red = q.reduce_sphere(2.0);
  CHECK(red.terms().size() == 1);
  CHECK(red.eval({0, 0, 0}) == 4.0);
  // reduction preserves values on the sphere
  auto c = (x1 * x1 * x1 * x1 * x2 - x1 * 2.0).reduce_sphere(1.5);
  std::vector<double> pt = {1.5 * 0.6, 1.5 * 0.8, 0.0};
  CHECK(std::abs(c.eval(pt) - (x1 * x1 * x1 * x1 * x2 - x1 * 2.0).eval(pt)) < 1e-13);
  for (auto& [e, v] : c.terms()) CHECK(e[0] < 2);
}

TEST_CASE("euclidean ball with b != 0 by exact polynomial algebra") {
  auto s = spec(Family::EuclideanBall, 3, 1.0, 1.0, 0.0);
  s.b = {1.0, 0.0, 0.0};
  s.tau = 0.0;
  auto pc = polynomial_check(s);
  CHECK(pc.interior == 0.0);
  CHECK(pc.boundary == 0.0);
  std::mt19937 rng(11);
  for (int n : {3, 4, 5, 6})
    for (auto& sp : random_specs(Family::EuclideanBall, n, 5, rng)) {
      auto c = polynomial_check(sp);
      CHECK(c.interior < 1e-14);
      CHECK(c.boundary < 1e-14);
      CHECK(c.trace < 1e-14);
    }
}

TEST_CASE("all compact families certify at random parameters") {
  std::mt19937 rng(5);
  for (Family f : {Family::SphericalCap, Family::EuclideanBall, Family::HyperbolicCap, Family::RicciFlatProduct})
    for (int n : {3, 4, 5, 6})
      for (auto& s : random_specs(f, n, 5, rng)) {
        auto c = certify_example(s);
        INFO(s.name, " ", c.failed);
        CHECK(c.pass);
        CHECK(c.residual.interior < 1e-10);
        CHECK(c.residual.boundary < 1e-10);
        CHECK(c.residual.trace_interior < 1e-10);
        CHECK(c.residual.trace_boundary < 1e-10);
      }
}

TEST_CASE("perturbed tau breaks certification at the boundary clause") {
  auto ex = build_example(spec(Family::SphericalCap, 3, 1.2, 0.7, 0.4));
  ex.potential.tau += 1e-3;
  auto c = certify(ex);
  CHECK_FALSE(c.pass);
  CHECK(c.failed == "boundary equation");
  CHECK(std::abs(c.residual.boundary - 1e-3) < 1e-10);
}

TEST_CASE("hyperbolic halfspace") {
  for (int n : {3, 4}) {
    auto h = halfspace_check(n);
    CHECK(h.neumann == 0.0);
    CHECK(h.reflection < 1e-12);
    CHECK(h.geodesic < 1e-8);
    CHECK(h.radial_member < 1e-10);
  }
  auto s = spec(Family::HyperbolicHalfspace, 3, 1.0, 1.0, 0.0);
  CHECK(certify_example(s).pass);
}

TEST_CASE("tau minimizes the boundary residual") {
  for (Family f : {Family::SphericalCap, Family::HyperbolicCap}) {
    auto ex = build_example(spec(f, 4, 0.9, 1.3, -0.6));
    auto g = to_general(ex.metric);
    double best = 1e300, arg = 0.0;
    for (int j = -200; j <= 200; ++j) {
      PotentialTriple p = ex.potential;
      p.tau = ex.potential.tau + j * 1e-3;
      double b = vstatic_residual(g, p).boundary;
      if (b < best) {
        best = b;
        arg = p.tau;
      }
    }
    CHECK(arg == ex.potential.tau);
    CHECK(best < 1e-12);
  }
}

TEST_CASE("residuals are affine in kappa with slope -1") {
  auto ex = build_example(spec(Family::SphericalCap, 3, 1.0, 1.0, 0.0));
  auto g = to_general(ex.metric);
  auto at = [&](double dk) {
    PotentialTriple p = ex.potential;
    p.kappa += dk;
    return vstatic_residual(g, p);
  };
  auto r0 = at(0.0), r1 = at(0.5), r2 = at(1.0);
  for (int i = 0; i < r0.rad.size(); ++i) {
    CHECK(std::abs((r1.rad(i) - r0.rad(i)) / 0.5 + 1.0) < 1e-8);
    CHECK(std::abs((r2.rad(i) - 2 * r1.rad(i) + r0.rad(i))) < 1e-12);
    CHECK(std::abs((r1.tan(i) - r0.tan(i)) / 0.5 + 1.0) < 1e-8);
  }
}

TEST_CASE("rescaled examples certify") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> U(0.3, 3.0);
  for (Family f : {Family::SphericalCap, Family::HyperbolicCap, Family::EuclideanBall}) {
    for (auto& s : random_specs(f, 4, 3, rng)) {
      double c = U(rng);
      auto ex = rescale(build_example(s), c);
      auto cert = certify(ex);
      INFO(s.name, " c=", c, " ", cert.failed);
      CHECK(cert.pass);
    }
  }
}

TEST_CASE("obstruction verdicts") {
  // ball: H/(n-1) = 1 = sigma_1 and the boundary is umbilical
  auto ball = obstruction_verdict(unit_ball(3), ObstructionMode::Steklov);
  CHECK(ball.verdict == Verdict::Inconclusive);
  CHECK(ball.member);
  CHECK(ball.nearest < 1e-8);
  CHECK(ball.umbilic_or_einstein);
  auto big = obstruction_verdict(euclidean_ball(4, 2.5), ObstructionMode::Steklov);
  CHECK(big.member);
  CHECK(std::abs(big.target - 0.4) < 1e-12);

  // hemisphere: Einstein and R/(n-1) = n is a Neumann eigenvalue
  auto hs = obstruction_verdict(hemisphere(3), ObstructionMode::Neumann);
  CHECK(hs.umbilic_or_einstein);
  CHECK(hs.member);
  CHECK(hs.verdict == Verdict::Inconclusive);

  // flat product over a hyperbolic quotient: not Einstein, R/(n-1) < 0 outside the spectrum
  auto hp = obstruction_verdict(hyperbolic_product(4), ObstructionMode::Neumann);
  CHECK_FALSE(hp.umbilic_or_einstein);
  CHECK_FALSE(hp.member);
  CHECK(hp.verdict == Verdict::NoPotentialPossible);
  CHECK(std::string(verdict_name(hp.verdict)) == "no-potential-possible");

  // preconditions are checked
  try {
    obstruction_verdict(hemisphere(3), ObstructionMode::Steklov);
    CHECK(false);
  } catch (const CurvError& e) {
    CHECK(e.kind() == ErrorKind::Mode);
  }
  CHECK_THROWS_AS(obstruction_verdict(unit_ball(3), ObstructionMode::Neumann), CurvError);
  CHECK_THROWS_AS(obstruction_verdict(flat_cylinder(3), ObstructionMode::Steklov), CurvError);
}

TEST_CASE("sign changes of V are flagged") {
  auto ex = build_example(spec(Family::SphericalCap, 3, 2.5, 1.0, 0.0));
  CHECK(ex.sign_change);
  CHECK(certify(ex).pass);
  auto pos = build_example(spec(Family::SphericalCap, 3, 1.0, 1.0, -4.0));
  CHECK_FALSE(pos.sign_change);
}
