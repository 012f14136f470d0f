#pragma once
#include <functional>
#include <string>
#include <vector>

#include "curvlab/fourier.hpp"
#include "curvlab/geometry.hpp"

namespace curvlab {

enum class TargetKind { GeodesicBoundary, GaussInterior, ScalarInterior, MeanBoundary };
const char* target_kind_name(TargetKind k);

// ---- range conditions ----

enum class RangeCase { Constant, Straddle, Infeasible };
const char* range_case_name(RangeCase c);

struct RangeVerdict {
  RangeCase verdict = RangeCase::Infeasible;
  double min = 0.0, max = 0.0, threshold = 0.0;
};

// constant case: f == threshold; straddle: min f < threshold < max f (strict)
RangeVerdict classify_range(const Vec& samples, double threshold);
// dense sampling with 4x oversampling of the degree
RangeVerdict validate_range(const TrigSeries& f, double threshold);

using CylinderTarget = std::function<double(double t, double theta)>;
RangeVerdict validate_range(const CylinderTarget& f, double threshold, int nt = 129, int ntheta = 128);

// ---- approximation by pullback ----

// monotone degree one circle map; its inverse has density
// beta + (1 - beta) sum_c M_c G_sigma(theta - theta_c), periodised
struct CircleDiffeo {
  bool identity = true;
  double theta0 = 0.0;  // image of x = 0
  double beta = 1.0;
  double sigma = 1.0;
  std::vector<double> centers, masses;

  double inverse(double theta) const;  // theta in [theta0, theta0 + 2 pi] -> x in [0, 2 pi]
  double density(double theta) const;  // d inverse / d theta
  double operator()(double x) const;   // x in [0, 2 pi)
  double derivative(double x) const;
};

struct PullbackOptions {
  double sigma = 1e-4;   // width of the concentration
  double floor = 1e-15;  // fraction of the circle spread uniformly
  int cells = 512;
  int candidates = 1024;
  int attempts = 6;      // sigma and floor shrink by 10 per retry
};

struct PullbackResult {
  CircleDiffeo phi;
  double p = 2.0;
  double eps = 0.0;
  double lp = 0.0;         // || f o phi - h ||_{L^p}
  double seminorm = 0.0;   // Gagliardo W^{1/2,p} seminorm estimate on a fixed grid
  int attempts = 0;
};

// throws Precondition when h leaves the range of f
PullbackResult approx_by_pullback(const TrigSeries& f, const TrigSeries& h, double eps, double p,
                                  const PullbackOptions& opt = {});
double lp_distance(const TrigSeries& f, const CircleDiffeo& phi, const TrigSeries& h, double p);

// ---- disk: flat metric e^{2u}|dx|^2 with prescribed geodesic curvature ----

struct DiskOptions {
  int N = 256;
  double tol = 1e-10;  // full residual accepted by the solver
  int max_iter = 60;
  int density_modes = 8;  // Fourier modes of log rho
  int density_nodes = 512;
};

// Arclength density on the target circle: rho = exp(v), v a trigonometric
// polynomial, int rho = 1. The boundary curve with curvature f(sigma(s)),
// sigma the inverse of tau(theta) = int_0^theta rho, closes with turning 2 pi.
//
// In conformal gauge alone int k'(theta) e^u cos(theta) dtheta = 0 (and the sin
// twin) for every flat disk metric, so f = 2 pi + sin theta is never reached
// without a boundary reparametrisation.
struct ArcDensity {
  TrigSeries v;
  CVec coef;   // Fourier coefficients of rho on the density grid
  double tau(double theta) const;
  double rho(double theta) const { return std::exp(v(theta)); }
  double sigma(double s) const;  // inverse of tau
};

struct CurveReport {
  ArcDensity density;
  double turning = 0.0;  // int f rho - 2 pi
  double closure = 0.0;  // |int rho e^{i T}|
  int iterations = 0;
};

using CircleFn = std::function<double(double)>;

// 2 x number of strict local maxima on a uniform sample, -1 for a constant.
// Fewer than four rules out every flat disk (four-vertex theorem, which
// covers boundaries of immersed disks), whatever the parametrisation.
int curvature_vertices(const CircleFn& f, int samples = 1024);

// closing curve for a target given as a function on the circle; the optional
// guess for log rho seeds the first start
CurveReport close_curve(const CircleFn& f, const DiskOptions& opt = {}, const CircleFn& log_density_guess = {});

// The metric is (Psi^{-1})^* (e^{2u}|dx|^2) for a disk diffeomorphism Psi with
// boundary map psi; the conformal metric has curvature f(psi(x)) at x.
struct DiskBoundaryFactor {
  Vec theta;
  Vec u;               // boundary trace of the harmonic u
  Vec psi;             // psi at the nodes (lifted, psi(0) = sigma(0) = 0)
  ArcDensity density;
  Vec target;          // f o psi at the nodes
  double length = 0.0;
  double scale = 0.0;  // log of the closing rescale
  // independent re-evaluation through the developed boundary curve, on a 4x finer grid
  double curvature_error = 0.0;  // sup |k - f o psi|
  double gauss_bonnet = 0.0;     // int k ds - 2 pi
  double closure = 0.0;          // |gamma(2 pi) - gamma(0)| of the developed curve
  double min_dpsi = 0.0;         // psi is a diffeomorphism
  std::vector<double> history;   // residual per Newton step
  int iterations = 0;
  double residual = 0.0;
};

// psi at an arbitrary angle, by trigonometric interpolation of psi(x) - x
double boundary_map(const DiskBoundaryFactor& d, double x);

// k = e^{-u}(1 + Lambda u) from the Dirichlet-to-Neumann symbol
Vec disk_curvature(const Vec& u);
// curvature of the developed curve, from gamma' = i e^{i theta} e^{u + i Hu}
Vec disk_curvature_by_curve(const Vec& u, double* gauss_bonnet = nullptr, double* closure = nullptr);

DiskBoundaryFactor prescribe_disk_geodesic_curvature(const TrigSeries& f, const DiskOptions& opt = {});
// same for any smooth target function with derivative; no range check
DiskBoundaryFactor solve_disk(const CircleFn& f, const CircleFn& df, const DiskOptions& opt = {},
                              const CircleFn& log_density_guess = {});

struct MinMaxReport {
  DiskBoundaryFactor constant;  // k = 2 pi, length 1
  PullbackResult pullback;
  DiskBoundaryFactor local;     // curvature f o phi o psi in the x parametrisation
  double end_to_end = 0.0;      // sup_x |k(x) - f(phi(psi(x)))|
  double direct_gap = 0.0;      // |length and Gauss-Bonnet| differences against the direct solve
  std::string stage;
};

MinMaxReport min_max_prescribe_disk(const TrigSeries& f, const DiskOptions& opt = {});

// ---- cylinder [0,1] x S^1: Gauss curvature with geodesic boundary ----


struct CylinderOptions {
  int nt = 32;
  int ntheta = 32;  // forced to 1 when the target is axial
  double tol = 1e-10;
  int max_iter = 60;
};

// Axial targets: A(t) dt^2 + B(t) dtheta^2 with K = f(t) exactly; the t
// reparametrisation is free. Conformal gauge alone can fail here: for f = cos 2 pi t
// the Neumann problem v'' + f e^{2v} = 0 has no solution at any modulus.
// Other targets: e^{2u}(modulus^2 dt^2 + dtheta^2), u on the tensor grid.
struct CylinderFactor {
  bool axial = true;
  RadialGrid grid;  // t nodes
  int ntheta = 1;
  Vec A, B;         // axial metric
  Mat u;            // nt x ntheta, conformal metric
  double modulus = 1.0;
  double area = 0.0;
  double curvature_error = 0.0;     // sup |K - f| on a refined grid
  double boundary_curvature = 0.0;  // sup |k_g| on both boundary circles
  double gauss_bonnet = 0.0;        // int K dA
  std::vector<double> history;
  int iterations = 0;
  double residual = 0.0;
};

CylinderFactor prescribe_cylinder_gauss_curvature(const CylinderTarget& f, bool axial,
                                                  const CylinderOptions& opt = {});

// ---- local prescription of R in the radial class ----

struct LocalOptions {
  double trust = 0.25;  // sup of the log-coefficient change allowed
  double tol = 1e-9;
  int max_iter = 40;
};

struct LocalResult {
  GeneralRadialMetric g;
  double res_R = 0.0, res_H = 0.0, res_vol = 0.0;
  int steps = 0;
  std::vector<double> history;
  double injectivity_witness = 0.0;  // smallest shifted eigenvalue of the proxy
  std::string proxy;
};

// f1 sampled on the grid of g0 (unit volume); H is kept, Vol = 1 is part of the system
LocalResult local_prescribe_radial(const WarpedMetric& g0, const Vec& f1, double eta, const LocalOptions& opt = {});

}  // namespace curvlab
