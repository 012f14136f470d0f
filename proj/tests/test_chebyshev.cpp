#include <cmath>

#include "curvlab/chebyshev.hpp"
#include "doctest.h"

using namespace curvlab;

TEST_CASE("annulus grid differentiates and integrates exp") {
  RadialGrid g = RadialGrid::annulus(0.5, 2.0, 30);
  Vec f = g.r().array().exp().matrix();
  CHECK((g.diff(f) - f).cwiseAbs().maxCoeff() < 1e-11);
  CHECK((g.diff2(f) - f).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(std::abs(g.integrate(f) - (std::exp(2.0) - std::exp(0.5))) < 1e-13);
  CHECK(g.r()(0) == 0.5);
  CHECK(g.r()(29) == 2.0);
  for (int i = 1; i < 30; ++i) CHECK(g.r()(i) > g.r()(i - 1));
  CHECK(std::abs(g.interpolate(f, 1.234) - std::exp(1.234)) < 1e-13);
}

TEST_CASE("cap grid folds parity through the pole") {
  const double R = 2.0;
  RadialGrid g = RadialGrid::cap(R, 24);
  CHECK(g.r()(0) > 0.0);
  CHECK(g.r()(23) == R);
  Vec s = g.r().array().sin().matrix();
  Vec c = g.r().array().cos().matrix();
  CHECK((g.diff(s, -1) - c).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((g.diff(c, 1) + s).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((g.diff2(s, -1) + s).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((g.diff2(c, 1) + c).cwiseAbs().maxCoeff() < 1e-10);
  // odd integrand over [0, R] needs the half-interval weights
  CHECK(std::abs(g.integrate(s, -1) - (1.0 - std::cos(R))) < 1e-13);
  CHECK(std::abs(g.integrate(c, 1) - std::sin(R)) < 1e-13);
  Vec r3 = g.r().array().cube().matrix();
  CHECK(std::abs(g.integrate(r3, -1) - std::pow(R, 4) / 4.0) < 1e-12);
  CHECK(std::abs(g.interpolate(s, 0.0, -1)) < 1e-15);
  CHECK(std::abs(g.interpolate(c, 0.0, 1) - 1.0) < 1e-13);
}

TEST_CASE("Chebyshev series derivative") {
  ChebSeries f;
  f.lo = 0.0;
  f.hi = 2.0;
  f.c = Vec::Zero(4);
  f.c(3) = 1.0;  // T3(x-1)
  auto d = f.derivative();
  for (double x : {0.1, 0.7, 1.9}) {
    double t = x - 1.0;
    CHECK(std::abs(f(x) - (4 * t * t * t - 3 * t)) < 1e-14);
    CHECK(std::abs(d(x) - (12 * t * t - 3)) < 1e-13);
  }
}
