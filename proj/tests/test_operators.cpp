#include <cmath>
#include <numbers>
#include <random>

#include "curvlab/errors.hpp"
#include "curvlab/models.hpp"
#include "curvlab/operators.hpp"
#include "doctest.h"

using namespace curvlab;

namespace {
constexpr double pi = std::numbers::pi;

RadialPerturbation scaled_metric(const GeneralRadialMetric& g) {
  return {Vec::Ones(g.grid.size()), Vec::Ones(g.grid.size())};
}

PotentialTriple potential(const GeneralRadialMetric& g, double (*f)(double), double kappa, double tau) {
  PotentialTriple p;
  p.V = g.grid.r().unaryExpr(f);
  p.kappa = kappa;
  p.tau = tau;
  return p;
}

double sup(const Vec& v) { return v.cwiseAbs().maxCoeff(); }
}  // namespace

TEST_CASE("h = g on the flat cylinder changes nothing") {
  auto g = to_general(flat_cylinder(3));
  // spectral second derivatives leave a ~1e-10 roundoff floor
  auto lin = linearize_curvatures(g, scaled_metric(g));
  CHECK(sup(lin.dR) < 1e-9);
  for (auto& b : lin.dH) CHECK(std::abs(b.value) < 1e-12);
}

TEST_CASE("h = g on the unit ball gives dH = -H/2") {
  auto g = to_general(unit_ball(3));
  auto lin = linearize_curvatures(g, scaled_metric(g));
  CHECK(sup(lin.dR) < 1e-9);
  CHECK(std::abs(lin.dH[0].value + 1.0) < 1e-12);
  auto fd = linearize_fd(g, scaled_metric(g));
  CHECK(std::abs(fd.dH[0].value + 1.0) < 1e-8);
}

TEST_CASE("closed-form and finite-difference linearizations agree") {
  std::mt19937 rng(3);
  auto g = to_general(hemisphere(3));
  for (int k = 0; k < 5; ++k) {
    auto h = random_perturbation(g, rng);
    Linearization lin;
    CHECK_NOTHROW(lin = linearize_curvatures(g, h));
    CHECK(lin.fd_gap < 1e-6);
    for (double d : lin.div_X) CHECK(d == 0.0);
  }
  for (int k = 0; k < 10; ++k) {
    auto gr = random_metric(rng, 3 + k % 4, k % 2 == 0);
    CHECK_NOTHROW(linearize_curvatures(gr, random_perturbation(gr, rng)));
  }
}

TEST_CASE("a corrupted closed form is caught by the cross-check") {
  std::mt19937 rng(9);
  auto g = to_general(hemisphere(3));
  auto h = random_perturbation(g, rng);
  auto c = linearize_closed(g, h);
  auto f = linearize_fd(g, h);
  c.dR(5) += 1e-3;
  CHECK((c.dR - f.dR).cwiseAbs().maxCoeff() > 1e-4);
}

TEST_CASE("adjoint examples") {
  auto cyl = to_general(flat_cylinder(3));
  PotentialTriple one{Vec::Ones(cyl.grid.size()), {}, {}, 0.0, 0.0};
  auto a = adjoints(cyl, one);
  CHECK(sup(a.rad) < 1e-9);
  CHECK(sup(a.tan) < 1e-9);
  for (auto& b : a.bnd) CHECK(std::abs(b.value) < 1e-12);
  one.Vs = Vec::Zero(cyl.grid.size());
  one.Vss = Vec::Zero(cyl.grid.size());
  a = adjoints(cyl, one);
  CHECK(sup(a.rad) == 0.0);
  CHECK(sup(a.tan) == 0.0);
  for (auto& b : a.bnd) CHECK(b.value == 0.0);

  auto hemi = to_general(hemisphere(3));
  auto pc = potential(hemi, [](double r) { return std::cos(r); }, 0.0, -1.0);
  auto ah = adjoints(hemi, pc);
  CHECK(sup(ah.rad) < 1e-9);
  CHECK(sup(ah.tan) < 1e-9);
  pc.Vs = -hemi.grid.r().array().sin().matrix();
  pc.Vss = -pc.V;
  ah = adjoints(hemi, pc);
  CHECK(sup(ah.rad) < 1e-14);
  CHECK(sup(ah.tan) < 1e-14);

  // V = r^2 on the flat ball: Lap V = 2n, Hess V = 2g, so A*V = -2(n-1) g
  for (int n : {3, 4, 5}) {
    auto ball = to_general(unit_ball(n));
    auto ab = adjoints(ball, potential(ball, [](double r) { return r * r; }, 0.0, 0.0));
    CHECK(sup(ab.rad.array() + 2.0 * (n - 1)) < 1e-10);
    CHECK(sup(ab.tan.array() + 2.0 * (n - 1)) < 1e-10);
  }
}

TEST_CASE("adjoint against finite-difference pairings") {
  // h and its derivative vanish on the boundary, so <A*V, h> = <dR h, V>
  auto ball = to_general(unit_ball(3, 24));
  PotentialTriple p = potential(ball, [](double r) { return r * r; }, 0.0, 0.0);
  RadialGeometry geo = radial_geometry(ball);
  auto adj = adjoints(geo, p);
  const Vec& r = ball.grid.r();
  Vec w = (1.0 - r.array().square()).pow(3).matrix();
  Vec w2 = w.cwiseProduct(r.cwiseProduct(r));
  Vec zero = Vec::Zero(r.size());
  for (auto h : {RadialPerturbation{w, w}, RadialPerturbation{zero, w2}, RadialPerturbation{w2, zero}}) {
    double lhs = geo.integrate(linearize_fd(ball, h).dR.cwiseProduct(p.V), 1);
    double rhs = pair_interior(geo, adj.rad, adj.tan, h.a, h.b);
    CHECK(std::abs(lhs - rhs) < 1e-8 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("Green identity on every trivial instance") {
  auto cyl = to_general(flat_cylinder(3));
  PotentialTriple one{Vec::Ones(cyl.grid.size()), {}, {}, 0.0, 0.0};
  auto t = green_identity(cyl, scaled_metric(cyl), one);
  CHECK(std::abs(t.dR_V) < 1e-13);
  CHECK(std::abs(t.dH_V) < 1e-13);
  CHECK(std::abs(t.AV_h) < 1e-13);
  CHECK(std::abs(t.BV_h) < 1e-13);

  auto ball = to_general(unit_ball(3));
  PotentialTriple vb{Vec::Ones(ball.grid.size()), {}, {}, 0.0, 0.0};
  auto tb = green_identity(ball, scaled_metric(ball), vb);
  CHECK(std::abs(tb.dH_V + 8.0 * pi) < 1e-12);
  CHECK(std::abs(tb.BV_h + 8.0 * pi) < 1e-12);
}

TEST_CASE("Green identity on random radial triples") {
  std::mt19937 rng(2024);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    auto g = random_metric(rng, 3 + k % 4, k % 3 == 0);
    auto h = random_perturbation(g, rng);
    auto p = random_potential(g, rng);
    worst = std::max(worst, green_identity(g, h, p).relative);
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("vstatic residual examples") {
  auto ball = to_general(unit_ball(3));
  PotentialTriple one{Vec::Ones(ball.grid.size()), {}, {}, 0.0, -1.0};
  auto r = vstatic_residual(ball, one);
  CHECK(r.interior < 1e-9);
  CHECK(r.boundary < 1e-12);

  auto hemi = to_general(hemisphere(3));
  auto wrong = vstatic_residual(hemi, potential(hemi, [](double r) { return std::cos(r); }, 0.0, 0.0));
  CHECK(std::abs(wrong.boundary - 1.0) < 1e-12);
  CHECK(wrong.interior < 1e-9);
  CHECK(wrong.trace_boundary <= 3 * wrong.boundary + 1e-15);

  PotentialTriple zero{Vec::Zero(ball.grid.size()), {}, {}, 0.0, 0.0};
  CHECK(vstatic_residual(ball, zero).weak_potential);
}

TEST_CASE("trace residual is bounded by n times the full residual") {
  std::mt19937 rng(17);
  for (int k = 0; k < 20; ++k) {
    const int n = 3 + k % 4;
    auto g = random_metric(rng, n, k % 2 == 0);
    auto p = random_potential(g, rng);
    auto r = vstatic_residual(g, p);
    CHECK(r.trace_interior <= n * r.interior * (1 + 1e-12));
    CHECK(r.trace_boundary <= n * r.boundary * (1 + 1e-12));
  }
}

TEST_CASE("trace of the adjoints reproduces the traced system") {
  std::mt19937 rng(41);
  for (int k = 0; k < 10; ++k) {
    const int n = 3 + k % 4;
    auto g = random_metric(rng, n, k % 2 == 1);
    auto p = random_potential(g, rng);
    RadialGeometry geo = radial_geometry(g);
    auto adj = adjoints(geo, p);
    Vec lap = geo.laplacian_apply(p.V);
    Vec tr = adj.rad + (n - 1) * adj.tan;
    CHECK(sup(tr + (n - 1) * lap + geo.scal.cwiseProduct(p.V)) < 1e-10 * (1 + sup(tr)));
  }
}

TEST_CASE("operators are linear") {
  // defects are measured against |L| (|s||x| + |t||y|), |L| ~ the second-derivative matrix norm
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int k = 0; k < 6; ++k) {
    auto g = random_metric(rng, 3 + k % 3, k % 2 == 0);
    const double L = g.grid.D2(1).cwiseAbs().rowwise().sum().maxCoeff();
    auto h1 = random_perturbation(g, rng), h2 = random_perturbation(g, rng);
    auto p1 = random_potential(g, rng), p2 = random_potential(g, rng);
    double s = U(rng), t = U(rng);
    RadialPerturbation hc{s * h1.a + t * h2.a, s * h1.b + t * h2.b};
    double hs = std::abs(s) * std::max(sup(h1.a), sup(h1.b)) + std::abs(t) * std::max(sup(h2.a), sup(h2.b));
    auto l1 = linearize_closed(g, h1), l2 = linearize_closed(g, h2), lc = linearize_closed(g, hc);
    CHECK(sup(lc.dR - s * l1.dR - t * l2.dR) < 1e-12 * L * hs);
    CHECK(std::abs(lc.dH[0].value - s * l1.dH[0].value - t * l2.dH[0].value) < 1e-12 * L * hs);
    PotentialTriple pc{s * p1.V + t * p2.V, {}, {}, 0.0, 0.0};
    double vs = std::abs(s) * sup(p1.V) + std::abs(t) * sup(p2.V);
    auto a1 = adjoints(g, p1), a2 = adjoints(g, p2), ac = adjoints(g, pc);
    CHECK(sup(ac.rad - s * a1.rad - t * a2.rad) < 1e-12 * L * vs);
    CHECK(sup(ac.tan - s * a1.tan - t * a2.tan) < 1e-12 * L * vs);
    CHECK(std::abs(ac.bnd[0].value - s * a1.bnd[0].value - t * a2.bnd[0].value) < 1e-12 * L * vs);
  }
}

TEST_CASE("weighted functional is critical at a V-static triple") {
  std::mt19937 rng(5);
  auto hemi = to_general(hemisphere(3));
  auto p = potential(hemi, [](double r) { return std::cos(r); }, 0.0, -1.0);
  for (int k = 0; k < 3; ++k) {
    auto h = random_perturbation(hemi, rng);
    double hn = std::max(sup(h.a), sup(h.b));
    CHECK(std::abs(weighted_functional(hemi, p, &h).derivative) < 1e-6 * hn);
  }
  auto cyl = to_general(flat_cylinder(3));
  PotentialTriple one{Vec::Ones(cyl.grid.size()), {}, {}, 0.0, 0.0};
  auto h = random_perturbation(cyl, rng);
  CHECK(std::abs(weighted_functional(cyl, one, &h).derivative) < 1e-6);

  // wrong tau: dF = -2 (tau' - tau) dArea/dt with dArea/dt = (n-1)/2 Area for h = g
  auto pw = p;
  pw.tau = 0.0;
  auto hg = scaled_metric(hemi);
  double d = weighted_functional(hemi, pw, &hg).derivative;
  double expected = -2.0 * 1.0 * (0.5 * 2.0 * 4.0 * pi);
  CHECK(std::abs(d - expected) < 1e-6);
}
