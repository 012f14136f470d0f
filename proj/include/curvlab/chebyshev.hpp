#pragma once
#include <Eigen/Dense>

namespace curvlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class GridKind { Annulus, Cap };

// Chebyshev-Gauss-Lobatto collocation on a radial interval.
//
// Annulus: the usual m-point grid on [r0, R].
// Cap: a 2m-point grid on [-R, R] folded through the pole; only the m positive
// nodes are stored and every function carries a parity (+1 even, -1 odd) that
// selects the folded differentiation and quadrature matrices. The pole itself
// is never a node.
//
// Nodes are stored in ascending order, so index size()-1 is always r = R.
class RadialGrid {
 public:
  RadialGrid() = default;
  static RadialGrid annulus(double r0, double R, int m);
  static RadialGrid cap(double R, int m);

  GridKind kind() const { return kind_; }
  bool is_cap() const { return kind_ == GridKind::Cap; }
  int size() const { return static_cast<int>(r_.size()); }
  double r0() const { return r0_; }
  double R() const { return R_; }
  const Vec& r() const { return r_; }
  int outer() const { return size() - 1; }

  const Mat& D(int parity = 1) const;
  const Mat& D2(int parity = 1) const;
  const Vec& weights(int parity = 1) const;

  Vec diff(const Vec& v, int parity = 1) const { return D(parity) * v; }
  Vec diff2(const Vec& v, int parity = 1) const { return D2(parity) * v; }
  double integrate(const Vec& f, int parity = 1) const { return weights(parity).dot(f); }

  // barycentric interpolation of nodal values (parity used on caps)
  double interpolate(const Vec& v, double r, int parity = 1) const;
  // Chebyshev coefficients of the full (extended) interpolant
  Vec coefficients(const Vec& v, int parity = 1) const;

  bool same_as(const RadialGrid& o) const;

 private:
  GridKind kind_ = GridKind::Annulus;
  double r0_ = 0.0, R_ = 1.0;
  Vec r_;
  Vec x_full_;  // full grid nodes in [-1,1], descending (standard order)
  Mat De_, Do_, D2e_, D2o_;
  Vec we_, wo_;
  Vec bary_;  // barycentric weights of the full grid
};

// standard Chebyshev machinery on [-1,1], nodes x_j = cos(j pi/(N-1))
Vec cheb_nodes(int N);
Mat cheb_diff(int N);
Vec clenshaw_curtis(int N);
Vec half_interval_weights(int N);  // weights for the integral over [0,1]
Mat values_to_coeffs(int N);

// Chebyshev series on [lo, hi]
struct ChebSeries {
  double lo = -1.0, hi = 1.0;
  Vec c;
  double operator()(double x) const;
  ChebSeries derivative() const;
};

}  // namespace curvlab
