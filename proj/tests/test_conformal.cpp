#include <cmath>
#include <random>

#include "curvlab/conformal.hpp"
#include "curvlab/errors.hpp"
#include "curvlab/models.hpp"
#include "doctest.h"

using namespace curvlab;

namespace {
struct Neck {
  GeneralRadialMetric g;
  double c;
};
Neck neck(int n = 3) {
  Neck k;
  k.g = to_general(scalar_flat_neck(n));
  k.c = curvature_report(k.g).H();
  return k;
}
}  // namespace

TEST_CASE("interior principal pair") {
  auto hp = hyperbolic_product(4);
  double c = -6.0;
  auto pp = principal_positive_neumann(hp, c);
  CHECK(pp.u.minCoeff() > 0.0);
  CHECK(pp.delta0 > 0.0);
  CHECK(pp.delta > 0.0);
  CHECK(pp.res_interior < 1e-8);
  CHECK(pp.res_boundary < 1e-8);
  CHECK_THROWS_AS(principal_positive_neumann(flat_cylinder(3), 0.0), CurvError);
}

TEST_CASE("h = 0 leaves the factor at 1") {
  auto k = neck();
  RadialPerturbation h{Vec::Zero(k.g.grid.size()), Vec::Zero(k.g.grid.size())};
  auto p = solve_conformal_bvp(k.g, h, 1e-2, k.c, ConformalKind::Boundary);
  CHECK(p.sweeps == 1);
  CHECK((p.phi.array() - 1.0).abs().maxCoeff() == 0.0);
  CHECK(p.residual < 1e-9);
  auto lf = linearized_factor(k.g, h, k.c, ConformalKind::Boundary);
  CHECK(lf.phi_hat.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("preconditions of the conformal solver") {
  auto ball = to_general(unit_ball(3));
  auto h = homothety(ball);
  try {
    solve_conformal_bvp(ball, h, 1e-2, 2.0, ConformalKind::Boundary);
    CHECK(false);
  } catch (const CurvError& e) {
    CHECK(e.kind() == ErrorKind::Solvability);
  }
  // wrong c: the base metric is not in the class
  CHECK_THROWS_AS(solve_conformal_bvp(ball, h, 1e-2, 1.0, ConformalKind::Boundary), CurvError);
  auto cyl = to_general(flat_cylinder(3));
  try {
    solve_conformal_bvp(cyl, homothety(cyl), 1e-2, 0.0, ConformalKind::Interior);
    CHECK(false);
  } catch (const CurvError& e) {
    CHECK(e.kind() == ErrorKind::Solvability);
  }
}

TEST_CASE("boundary kind on the scalar flat neck") {
  auto k = neck();
  std::mt19937 rng(21);
  for (int j = 0; j < 4; ++j) {
    auto h = random_perturbation(k.g, rng);
    for (double t : {1e-2, -5e-3}) {
      ConformalOptions sup_opt, sub_opt;
      sub_opt.start = Start::Sub;
      auto a = solve_conformal_bvp(k.g, h, t, k.c, ConformalKind::Boundary, sup_opt);
      auto b = solve_conformal_bvp(k.g, h, t, k.c, ConformalKind::Boundary, sub_opt);
      CHECK(a.residual < 1e-9);
      CHECK(b.residual < 1e-9);
      CHECK((a.phi - b.phi).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((a.phi - a.lower).minCoeff() >= -1e-12);
      CHECK((a.upper - a.phi).minCoeff() >= -1e-12);
      CHECK(a.phi.minCoeff() >= a.lower_const - 1e-12);
      CHECK(a.phi.maxCoeff() <= a.upper_const + 1e-12);
      CHECK(a.phi.minCoeff() > 0.0);
      // the conformal metric has R = 0 and H = c
      GeneralRadialMetric gc = a.g;
      Vec w = a.phi.array().pow(4.0);
      gc.A = gc.A.cwiseProduct(w);
      gc.B = gc.B.cwiseProduct(w);
      auto rep = curvature_report(gc);
      CHECK(rep.scal.cwiseAbs().maxCoeff() < 1e-7);
      for (auto& bd : rep.boundaries) CHECK(std::abs(bd.H - k.c) < 1e-8);
    }
  }
}

TEST_CASE("sweeps alone converge monotonically from the super-solution") {
  auto k = neck();
  std::mt19937 rng(3);
  auto h = random_perturbation(k.g, rng);
  ConformalOptions opt;
  opt.newton = false;
  opt.tol = 1e-9;
  auto a = solve_conformal_bvp(k.g, h, 1e-2, k.c, ConformalKind::Boundary, opt);
  CHECK(a.newton_steps == 0);
  CHECK(a.residual < 1e-9);
  CHECK(a.history.size() == static_cast<size_t>(a.sweeps));
}

TEST_CASE("interior kind on the hyperbolic product") {
  auto g = to_general(hyperbolic_product(4, 1.0, 1.0, 24));
  const double c = -6.0;
  std::mt19937 rng(8);
  auto h = random_perturbation(g, rng);
  ConformalOptions sub_opt;
  sub_opt.start = Start::Sub;
  auto a = solve_conformal_bvp(g, h, 1e-2, c, ConformalKind::Interior);
  auto b = solve_conformal_bvp(g, h, 1e-2, c, ConformalKind::Interior, sub_opt);
  CHECK(a.residual < 1e-8);
  CHECK((a.phi - b.phi).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((a.phi - a.lower).minCoeff() >= -1e-12);
  CHECK((a.upper - a.phi).minCoeff() >= -1e-12);
}

TEST_CASE("homothety: the linearized factor of h = g on the ball") {
  // Phi^4 (1 + t) = 1 keeps H = 2, so Phi_hat = -1/4
  auto ball = to_general(unit_ball(3, 24));
  auto lf = linearized_factor(ball, homothety(ball), 2.0, ConformalKind::Boundary);
  CHECK(lf.dR.cwiseAbs().maxCoeff() < 1e-9);
  CHECK(std::abs(lf.dH[0] + 1.0) < 1e-12);
  CHECK((lf.phi_hat.array() + 0.25).abs().maxCoeff() < 1e-10);
  // neck: Phi(t) = (1 + t)^{-1/4} exactly, so Phi_hat = -1/4 too
  auto k = neck();
  auto p = solve_conformal_bvp(k.g, homothety(k.g), 1e-2, k.c, ConformalKind::Boundary);
  CHECK((p.phi.array() - std::pow(1.01, -0.25)).abs().maxCoeff() < 1e-9);
}

TEST_CASE("symmetric differences converge to the linearized factor at second order") {
  auto k = neck();
  std::mt19937 rng(17);
  auto h = random_perturbation(k.g, rng);
  auto lf = linearized_factor(k.g, h, k.c, ConformalKind::Boundary, 2e-2);
  CHECK(lf.gap < 1e-2);
  CHECK(lf.gap_half < lf.gap / 3.0);
  CHECK(std::abs(lf.order - 2.0) < 0.2);
}

TEST_CASE("too large t is reported with an admissible bound") {
  auto k = neck();
  std::mt19937 rng(2);
  auto h = random_perturbation(k.g, rng);
  try {
    solve_conformal_bvp(k.g, h, 5.0, k.c, ConformalKind::Boundary);
    CHECK(false);
  } catch (const CurvError& e) {
    CHECK(e.kind() == ErrorKind::TTooLarge);
    CHECK(e.value() > 0.0);
    CHECK(e.value() < 5.0);
    auto ok = solve_conformal_bvp(k.g, h, 0.9 * e.value(), k.c, ConformalKind::Boundary);
    CHECK(ok.residual < 1e-9);
  }
}
