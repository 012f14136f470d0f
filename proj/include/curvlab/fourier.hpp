#pragma once
#include <complex>
#include <vector>

#include "curvlab/chebyshev.hpp"

namespace curvlab {

using CVec = Eigen::VectorXcd;

// a0 + sum_k a_k cos k theta + b_k sin k theta
struct TrigSeries {
  double a0 = 0.0;
  std::vector<double> a, b;  // index 0 is k = 1

  double operator()(double theta) const;
  double derivative(double theta) const;
  int degree() const { return static_cast<int>(std::max(a.size(), b.size())); }
  Vec sample(int N) const;
  static TrigSeries constant(double c);
};

// uniform circle grid theta_j = 2 pi j / N
Vec circle_nodes(int N);

// spectral operators on periodic samples (Nyquist mode dropped for odd symbols)
Vec fourier_derivative(const Vec& u, int order = 1);
CVec fourier_derivative(const CVec& u);
Vec dirichlet_to_neumann(const Vec& u);  // symbol |k|
Vec harmonic_conjugate(const Vec& u);    // symbol -i sign k
// int_0^{theta_j} of the interpolant, at the nodes
Vec primitive(const Vec& g);
Mat primitive_matrix(int N);
Mat fourier_matrix(int N, int order);    // dense differentiation matrix
Mat dtn_matrix(int N);
// trigonometric interpolation onto factor * N points
Vec upsample(const Vec& u, int factor);
// value of the trigonometric interpolant at an arbitrary angle
double trig_interpolate(const Vec& u, double theta);

}  // namespace curvlab
