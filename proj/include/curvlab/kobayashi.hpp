#pragma once
#include <string>

#include "curvlab/chebyshev.hpp"

namespace curvlab {

// checks (a)-(d) for gbar = f^{-2} g_round on S^n, f = f(r) with r the distance to a pole
struct FactorChecks {
  double R_gap = 0.0;         // sup |R_gbar - n(n-1)|
  double volume = 0.0;
  double vol_gap = 0.0;       // |Vol - 2 Vol(S^n)|
  double outside_gap = 0.0;   // sup over r > eps2 of |f - 1|
  double f_min = 0.0, f_max = 0.0;
  double slope = 0.0;         // sup |f'| sin r
  bool a = false, b = false, c = false, d = false;
  bool pass = false;
  std::string failed;
};

struct SphereFactor {
  int n = 3;
  double eps1 = 0.0, eps2 = 0.0;
  Vec r, f, df, d2f;  // samples in increasing r
  Vec R;              // scalar curvature of f^{-2} g from the conformal law
  double neck = 0.0;  // smallest warp radius of the neck
  double r_match = 0.0;  // f = 1 exactly for r >= r_match
  double c0 = 0.0;
  int attempts = 0;
  FactorChecks checks;
};

FactorChecks verify_sphere_factor(int n, const Vec& r, const Vec& f, const Vec& df, const Vec& d2f, double eps1,
                                  double eps2, Vec* R_out = nullptr);

// throws Infeasible carrying the best R gap when no attempt passes
SphereFactor kobayashi_factor(int n, double eps1, double eps2);

// f = 1 sampled on (0, pi); fails (b) by Vol(S^n)
SphereFactor identity_factor(int n, double eps1, double eps2, int samples = 2000);

}  // namespace curvlab
