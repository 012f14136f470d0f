#pragma once
#include <random>

#include "curvlab/geometry.hpp"
#include "curvlab/operators.hpp"

namespace curvlab {

WarpedMetric unit_ball(int n, int nodes = 40);
WarpedMetric hemisphere(int n, int nodes = 40);
WarpedMetric spherical_cap(int n, double R, int nodes = 40);
WarpedMetric hyperbolic_cap(int n, double R, int nodes = 40);
WarpedMetric euclidean_ball(int n, double R, int nodes = 40);
// [0, L] x T^{n-1}, unit square torus
WarpedMetric flat_cylinder(int n, double L = 1.0, int nodes = 40);
// [0, L] x N with N a compact hyperbolic quotient of the given area; R = -(n-1)(n-2), H = 0
WarpedMetric hyperbolic_product(int n, double L = 1.0, double areaN = 1.0, int nodes = 40);

// Scalar-flat warped product over a hyperbolic quotient: 2 phi phi'' + (n-2)(1 + phi'^2) = 0 on
// [1, 1 + 2 half_width], phi = phi_b at both ends. Both boundary components have the same
// constant H < 0.
WarpedMetric scalar_flat_neck(int n, double half_width = 0.5, double phi_b = 0.9, double areaN = 1.0,
                              int nodes = 24);

// random test data for sweeps
GeneralRadialMetric random_metric(std::mt19937& rng, int n, bool cap, int nodes = 36);
RadialPerturbation random_perturbation(const GeneralRadialMetric& g, std::mt19937& rng);
PotentialTriple random_potential(const GeneralRadialMetric& g, std::mt19937& rng);
// exp of a random smooth radial profile, even at the pole
Vec random_positive(const GeneralRadialMetric& g, std::mt19937& rng);
// non-conformal perturbation of size eps that keeps the pole regular; drops the closed form
GeneralRadialMetric random_nearby_metric(const GeneralRadialMetric& g, double eps, std::mt19937& rng);
// smooth bump supported strictly inside the radial domain
Vec interior_bump(const RadialGrid& grid, double center, double width);

}  // namespace curvlab
