#pragma once
#include <string>
#include <vector>

#include "curvlab/geometry.hpp"

namespace curvlab {

// lambda = 1: volume normalisation, lambda = 0: boundary area normalisation
struct YamabeReport {
  int lambda = 1;
  double E = 0.0;
  double N = 0.0;
  double I = 0.0;
  Vec u;
  // minimisation only
  double estimate = 0.0;  // upper bound for Y_lambda within the radial class
  double grad_norm = 0.0;
  int iterations = 0;
  std::vector<double> history;
  std::string label;
};

// E(u) = int |grad u|^2 + beta int R u^2 + 2 beta int_Sigma H u^2, beta = (n-2)/(4(n-1))
double yamabe_energy(const GeneralRadialMetric& g, const Vec& u);
double yamabe_norm(const GeneralRadialMetric& g, const Vec& u, int lambda);
YamabeReport yamabe_quotient(const GeneralRadialMetric& g, const Vec& u, int lambda);
YamabeReport yamabe_quotient(const WarpedMetric& w, const Vec& u, int lambda);

// beta (int R dv + 2 int H da) evaluated on u^{4/(n-2)} g from the curvature of that metric
double direct_functional(const GeneralRadialMetric& g, const Vec& u);

struct MinimizeOptions {
  double grad_tol = 1e-6;
  int max_iter = 20000;
};

// preconditioned projected gradient descent over positive radial u with N_lambda(u) = 1;
// `resolution` is the number of grid nodes used (0 keeps the metric's grid)
YamabeReport yamabe_minimize_radial(const WarpedMetric& w, int lambda, int resolution = 0,
                                    const MinimizeOptions& opt = {});
YamabeReport yamabe_minimize_radial(const GeneralRadialMetric& g, int lambda, const MinimizeOptions& opt = {});

struct MetricDistance {
  double d_prime = 0.0;   // sum over k <= 2 of p_k / (1 + p_k), p_k the C^k size of g2 - g1
  double d_second = 0.0;  // sup |log| of the eigenvalues of g2 relative to g1
  double total = 0.0;
};

MetricDistance metric_distance(const GeneralRadialMetric& g1, const GeneralRadialMetric& g2);

struct ContinuityReport {
  double Y = 0.0, Y_prime = 0.0;
  double ratio = 1.0;
  double d = 0.0;
  double bound = 0.0;  // (n+1) d
  double slack = 0.0;  // bound - |log ratio|
  bool inside = false;
};

ContinuityReport continuity_ratio_check(const GeneralRadialMetric& g, const GeneralRadialMetric& g_prime,
                                        const MinimizeOptions& opt = {});

}  // namespace curvlab
