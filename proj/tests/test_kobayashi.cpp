#include <cmath>
#include <numbers>

#include "curvlab/errors.hpp"
#include "curvlab/kobayashi.hpp"
#include "doctest.h"

using namespace curvlab;

TEST_CASE("identity factor fails the volume clause by Vol(S^n)") {
  auto id = identity_factor(3, 0.5, 0.5);
  CHECK(id.checks.a);
  CHECK(id.checks.R_gap < 1e-12);
  CHECK_FALSE(id.checks.b);
  CHECK(std::abs(id.checks.volume - 2 * std::numbers::pi * std::numbers::pi) < 1e-5);
  CHECK(std::abs(id.checks.vol_gap - 2 * std::numbers::pi * std::numbers::pi) < 1e-5);
  CHECK(id.checks.failed == "(b) volume");
}

TEST_CASE("constructed sphere factor") {
  auto sf = kobayashi_factor(3, 0.5, 0.5);
  INFO("R_gap=", sf.checks.R_gap, " vol=", sf.checks.volume, " slope=", sf.checks.slope, " neck=", sf.neck,
       " r_match=", sf.r_match, " fmin=", sf.checks.f_min);
  CHECK(sf.checks.pass);
  CHECK(sf.checks.R_gap < 0.5);
  CHECK(std::abs(sf.checks.volume - 4 * std::numbers::pi * std::numbers::pi) < 0.5);
  CHECK(sf.r_match <= 0.5);
  CHECK(sf.checks.f_max <= 1.0 + 1e-12);
  CHECK(sf.checks.f_min > 0.0);
  CHECK(sf.checks.slope <= 2.0);
  for (int i = 0; i < sf.r.size(); ++i)
    if (sf.r(i) > 0.5) CHECK_MESSAGE(sf.f(i) == 1.0, sf.r(i));

  for (int n : {4, 5}) {
    auto s = kobayashi_factor(n, 0.2, 0.3);
    INFO("n=", n, " ", s.checks.failed, " R_gap=", s.checks.R_gap, " vol_gap=", s.checks.vol_gap);
    CHECK(s.checks.pass);
  }
  CHECK_THROWS_AS(kobayashi_factor(3, 0.5, 4.0), CurvError);
  CHECK_THROWS_AS(kobayashi_factor(3, -1.0, 0.5), CurvError);
}
