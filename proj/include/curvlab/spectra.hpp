#pragma once
#include <limits>
#include <vector>

#include "curvlab/geometry.hpp"

namespace curvlab {

enum class Exec { Serial, Parallel };

struct ModeEigen {
  int mode = 0;           // index into the cross-section spectrum (degree k on spheres)
  double mu = 0.0;        // cross-section Laplace eigenvalue
  int multiplicity = 1;
  double sigma = 0.0;     // eigenvalue (+inf when the mode is Dirichlet-degenerate)
  Vec f;                  // radial profile on the grid
  double residual = 0.0;  // |sigma(m) - sigma(refined grid)|
  bool degenerate = false;
};

struct SpectrumResult {
  int k_max = 0;
  std::vector<ModeEigen> pairs;  // grouped by mode, ascending within each mode
  double min_eigenvalue() const;
  std::vector<ModeEigen> mode(int k) const;
};

// harmonic extension per mode, sigma = d_nu f / f - c/(n-1)
SpectrumResult steklov_spectrum(const GeneralRadialMetric& g, double c, int k_max, Exec exec = Exec::Parallel);
SpectrumResult steklov_spectrum(const WarpedMetric& w, double c, int k_max, Exec exec = Exec::Parallel);

// (n-1)(Lap f) + c f = -Lambda f with d_nu f = 0; at most per_mode eigenvalues per mode
SpectrumResult neumann_spectrum(const GeneralRadialMetric& g, double c, int k_max, int per_mode = 4,
                                Exec exec = Exec::Parallel);
SpectrumResult neumann_spectrum(const WarpedMetric& w, double c, int k_max, int per_mode = 4,
                                Exec exec = Exec::Parallel);

struct PrincipalPair {
  Vec u;
  double delta0 = 0.0;
  double delta = 0.0;
  double sigma1 = 0.0;
  double res_interior = 0.0;
  double res_boundary = 0.0;
};

// Lap u + delta0 u = 0, d_nu u - (c + delta)/(n-1) u = 0, u > 0 (radial)
PrincipalPair principal_positive_solution(const GeneralRadialMetric& g, double c);
PrincipalPair principal_positive_solution(const WarpedMetric& w, double c);
// interior analogue: Lap u + c/(n-1) u + delta0 u = 0, d_nu u - delta u = 0, u > 0;
// requires a positive first Neumann eigenvalue of (n-1) Lap + c
PrincipalPair principal_positive_neumann(const GeneralRadialMetric& g, double c);
PrincipalPair principal_positive_neumann(const WarpedMetric& w, double c);

enum class LinearKind { RobinBoundary, NeumannInterior };

struct LinearData {
  LinearKind kind = LinearKind::RobinBoundary;
  std::vector<double> boundary;  // Robin data f per boundary component (outer first)
  Vec interior;                  // Neumann-interior right-hand side
};

struct LinearSolution {
  Vec V;
  double residual = 0.0;
  double eigenvalue = 0.0;  // the nondegeneracy witness
};

// robin-boundary: Lap V = 0, d_nu V - c/(n-1) V = f/(n-1)
// neumann-interior: Lap V + c/(n-1) V = F, d_nu V = 0
LinearSolution solve_linear_boundary(const GeneralRadialMetric& g, double c, const LinearData& data);
LinearSolution solve_linear_boundary(const WarpedMetric& w, double c, const LinearData& data);

// Robin condition d_nu u - p u = G on one boundary component
struct RobinRow {
  double p = 0.0;
  double G = 0.0;
};

// (Lap_mu - q) u = F in M with Robin rows on every boundary (outer first); dense collocation
Vec solve_radial_bvp(const RadialGeometry& geo, const Vec& q, const Vec& F, const std::vector<RobinRow>& bc,
                     double mu = 0.0, int parity = 1);
// grid nodes on the boundary, outer first
std::vector<int> boundary_nodes(const RadialGrid& grid);
// boundary operator rows: d_nu at each boundary node (outer first)
std::vector<Eigen::RowVectorXd> normal_derivative_rows(const RadialGeometry& geo, int parity = 1);

}  // namespace curvlab
