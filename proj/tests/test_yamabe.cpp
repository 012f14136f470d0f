#include <cmath>
#include <numbers>
#include <random>

#include "curvlab/errors.hpp"
#include "curvlab/models.hpp"
#include "curvlab/yamabe.hpp"
#include "doctest.h"

using namespace curvlab;

namespace {
constexpr double pi = std::numbers::pi;
}  // namespace

TEST_CASE("quotients of the constant function on model spaces") {
  auto hs = to_general(hemisphere(3));
  Vec one = Vec::Ones(hs.grid.size());
  auto q = yamabe_quotient(hs, one, 1);
  CHECK(std::abs(q.E - 0.75 * pi * pi) < 1e-10);
  CHECK(std::abs(q.I - 0.75 * std::pow(pi, 4.0 / 3.0)) < 1e-10);

  auto ball = to_general(unit_ball(3));
  auto b = yamabe_quotient(ball, Vec::Ones(ball.grid.size()), 0);
  CHECK(std::abs(b.E - 2.0 * pi) < 1e-10);
  CHECK(std::abs(b.I - std::sqrt(pi)) < 1e-10);

  auto cyl = to_general(flat_cylinder(4));
  CHECK(std::abs(yamabe_quotient(cyl, Vec::Ones(cyl.grid.size()), 0).E) < 1e-12);

  CHECK_THROWS_AS(yamabe_quotient(ball, Vec::Zero(ball.grid.size()), 1), CurvError);
  CHECK_THROWS_AS(yamabe_quotient(ball, one.head(3), 1), CurvError);
}

TEST_CASE("quotient is invariant under scaling u") {
  auto g = to_general(hemisphere(4));
  std::mt19937 rng(4);
  Vec u = random_positive(g, rng);
  for (int lambda : {0, 1}) {
    double I = yamabe_quotient(g, u, lambda).I;
    for (double s : {0.1, 3.0, 17.0}) CHECK(std::abs(yamabe_quotient(g, s * u, lambda).I - I) < 1e-12 * std::abs(I));
  }
}

TEST_CASE("E(u) equals the normalised total curvature of u^{4/(n-2)} g") {
  std::mt19937 rng(12);
  std::vector<GeneralRadialMetric> bases = {to_general(unit_ball(3)), to_general(hemisphere(4)),
                                           to_general(hyperbolic_cap(3, 1.0)), to_general(flat_cylinder(5))};
  int count = 0;
  for (int j = 0; j < 5; ++j)
    for (const auto& g : bases) {
      Vec u = random_positive(g, rng);
      double E = yamabe_energy(g, u);
      double F = direct_functional(g, u);
      INFO("E=", E, " F=", F);
      CHECK(std::abs(E - F) < 1e-7 * std::max(1.0, std::abs(E)));
      ++count;
    }
  CHECK(count == 20);
}

TEST_CASE("radial minimisation reaches the model values") {
  auto hs = yamabe_minimize_radial(hemisphere(3), 1, 32);
  CHECK(hs.grad_norm < 1e-6);
  CHECK(hs.estimate <= 0.75 * std::pow(pi, 4.0 / 3.0) + 1e-9);
  CHECK(std::abs(hs.estimate - 0.75 * std::pow(pi, 4.0 / 3.0)) < 1e-8);
  CHECK(hs.label.find("upper bound") != std::string::npos);

  auto b = yamabe_minimize_radial(unit_ball(3), 0, 32);
  CHECK(std::abs(b.estimate - std::sqrt(pi)) < 1e-8);

  auto c = yamabe_minimize_radial(flat_cylinder(3), 0, 24);
  CHECK(std::abs(c.estimate) < 1e-10);

  // descent never ends above its starting value
  CHECK(hs.history.back() <= hs.history.front());
}

TEST_CASE("metric distance") {
  auto g = to_general(hemisphere(3, 24));
  auto same = metric_distance(g, g);
  CHECK(same.total == 0.0);

  for (double s : {-0.3, 0.05, 0.7}) {
    GeneralRadialMetric h = g;
    h.A *= std::exp(2 * s);
    h.B *= std::exp(2 * s);
    CHECK(std::abs(metric_distance(g, h).d_second - 2 * std::abs(s)) < 1e-14);
  }

  // brute force over directions: g(v, v) = A v_r^2 + B |v_N|^2
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> ang(0.0, 2 * pi);
  for (int j = 0; j < 5; ++j) {
    auto h = random_nearby_metric(g, 0.2, rng);
    double brute = 0.0;
    for (int i = 0; i < g.grid.size(); ++i) {
      // the extremes sit on the axes, sampled exactly plus random interior directions
      std::vector<double> th = {0.0, pi / 2};
      for (int k = 0; k < 64; ++k) th.push_back(ang(rng));
      for (double t : th) {
        double c = std::cos(t), s = std::sin(t);
        double q1 = g.A(i) * c * c + g.B(i) * s * s;
        double q2 = h.A(i) * c * c + h.B(i) * s * s;
        brute = std::max(brute, std::abs(std::log(q2 / q1)));
      }
    }
    CHECK(std::abs(metric_distance(g, h).d_second - brute) < 1e-10);
  }

  // symmetry and triangle inequality of d''
  for (int j = 0; j < 10; ++j) {
    auto a = random_nearby_metric(g, 0.3, rng), b = random_nearby_metric(g, 0.3, rng), c = random_nearby_metric(g, 0.3, rng);
    double ab = metric_distance(a, b).d_second, ba = metric_distance(b, a).d_second;
    CHECK(std::abs(ab - ba) < 1e-12);
    CHECK(metric_distance(a, c).d_second <= ab + metric_distance(b, c).d_second + 1e-12);
  }

  auto other = to_general(hemisphere(3, 20));
  try {
    metric_distance(g, other);
    CHECK(false);
  } catch (const CurvError& e) {
    CHECK(e.kind() == ErrorKind::GridMismatch);
  }
}

TEST_CASE("continuity of the Yamabe estimate") {
  auto g = to_general(hemisphere(3, 24));
  auto self = continuity_ratio_check(g, g);
  CHECK(self.ratio == doctest::Approx(1.0).epsilon(1e-12));

  GeneralRadialMetric h = g;
  h.A *= 1.02 * 1.02;
  h.B *= 1.02 * 1.02;
  auto hom = continuity_ratio_check(g, h);
  CHECK(hom.inside);
  CHECK(hom.slack > 0.0);

  std::mt19937 rng(31);
  int inside = 0;
  for (int j = 0; j < 8; ++j) {
    double eps = 0.05;
    GeneralRadialMetric p;
    std::mt19937 local = rng;
    for (;;) {
      std::mt19937 r = local;
      p = random_nearby_metric(g, eps, r);
      if (metric_distance(g, p).total <= 0.1) break;
      eps *= 0.7;
    }
    rng.discard(3);
    auto c = continuity_ratio_check(g, p);
    INFO("d=", c.d, " ratio=", c.ratio);
    CHECK(c.d <= 0.1);
    if (c.inside) ++inside;
  }
  CHECK(inside == 8);
}
