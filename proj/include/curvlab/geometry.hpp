#pragma once
#include <optional>
#include <string>
#include <vector>

#include "curvlab/chebyshev.hpp"

namespace curvlab {

enum class WarpTag { Sin, Sinh, Cosh, Identity, Constant, Chebyshev };

const char* warp_tag_name(WarpTag t);
WarpTag warp_tag_from(const std::string& s);

// phi(r) = amp * f(rate * r) for the closed-form tags
struct Warp {
  WarpTag tag = WarpTag::Sin;
  double amp = 1.0;
  double rate = 1.0;
  ChebSeries series;  // used when tag == Chebyshev

  double value(double r) const;
  double d1(double r) const;
  double d2(double r) const;
  // eps - phi'(r)^2, computed without cancellation when the closed form allows it
  double defect(double r, int eps) const;
  bool closed_form() const { return tag != WarpTag::Chebyshev; }
};

// Cross-section space form N of dimension n-1 and curvature eps.
struct CrossSection {
  int eps = 1;
  double area = 0.0;                 // Area(N); only read for eps = -1
  std::vector<double> user_spectrum;  // optional Laplace eigenvalues of N for eps = -1

  double area_for(int n) const;
  // distinct eigenvalues of -Lap_N up to index k_max, ascending, with multiplicities
  std::vector<std::pair<double, int>> spectrum(int n, int k_max) const;
};

double unit_sphere_area(int dim);  // area of the unit sphere S^dim

struct WarpedMetric {
  int n = 3;
  CrossSection cross;
  Warp warp;
  double r0 = 0.0;
  double R = 1.0;
  int nodes = 40;
};

// g = A dr^2 + B g_N sampled on a grid. Built from a WarpedMetric it also carries
// the closed-form warp so curvature can be evaluated without differentiating samples.
struct GeneralRadialMetric {
  int n = 3;
  CrossSection cross;
  RadialGrid grid;
  Vec A, B;
  std::optional<Warp> exact;

  int eps() const { return cross.eps; }
};

GeneralRadialMetric to_general(const WarpedMetric& w);
GeneralRadialMetric make_general(int n, const CrossSection& cross, const RadialGrid& grid, const Vec& A,
                                 const Vec& B);

// Pointwise data derived from (A, B): phi = sqrt(B), arclength derivatives and curvature.
// Parities on caps: A, B, phi_s, ric_* even; phi, phi_ss odd.
struct RadialGeometry {
  int n = 3;
  int eps = 1;
  const RadialGrid* grid = nullptr;
  Vec A, sqrtA, Ar;
  Vec phi, phi_s, phi_ss, defect;
  Vec ric_rad, ric_tan, scal;
  Vec dv;  // volume density sqrt(A) phi^{n-1} Area(N)
  double areaN = 1.0;
  int dv_parity = 1;

  // d/ds of a function with the given parity
  Vec ds(const Vec& v, int parity = 1) const;
  Vec dss(const Vec& v, int parity = 1) const;
  // Laplacian of u(r) Y with -Lap_N Y = mu Y
  Mat laplacian(double mu, int parity = 1) const;
  Vec laplacian_apply(const Vec& u, double mu = 0.0, int parity = 1) const;
  double integrate(const Vec& f, int f_parity = 1) const;  // int_M f dv for radial f
};

RadialGeometry radial_geometry(const GeneralRadialMetric& g);

struct BoundaryData {
  int index = 0;    // grid node
  double r = 0.0;
  int sign = 1;     // +1 outer (nu = +d/ds), -1 inner
  double H = 0.0;   // tr Pi, outward normal
  double pi0 = 0.0; // Pi = pi0 * induced metric
  double ric_nn = 0.0;
  double R_sigma = 0.0;
  double area = 0.0;
  double phi = 0.0;
};

std::vector<BoundaryData> boundary_data(const RadialGeometry& geo);

struct CurvatureReport {
  Vec r;
  Vec scal, ric_rad, ric_tan;
  std::vector<BoundaryData> boundaries;
  double volume = 0.0;
  double area = 0.0;

  const BoundaryData& outer() const { return boundaries.front(); }
  double H() const { return outer().H; }
  double pi0() const { return outer().pi0; }
};

CurvatureReport curvature_report(const WarpedMetric& w);
CurvatureReport curvature_report(const GeneralRadialMetric& g);

// |R_Sigma - (n-2)/(n-1) H^2 - (R - 2 Ric(nu,nu))| at r = R
double gauss_identity_residual(const WarpedMetric& w);
double gauss_identity_residual(const GeneralRadialMetric& g);

std::pair<double, double> volume_area(const WarpedMetric& w);
std::pair<double, double> volume_area(const GeneralRadialMetric& g);

// checks phi > 0 and cap regularity; throws Domain / Regularity errors
void validate(const WarpedMetric& w);

// c^2 g
GeneralRadialMetric scaled(const GeneralRadialMetric& g, double c);
WarpedMetric scaled(const WarpedMetric& w, double c);

}  // namespace curvlab
