#pragma once
#include <vector>

#include "curvlab/geometry.hpp"

namespace curvlab {

// h = a A dr^2 + b B g_N, i.e. a and b are the frame components relative to g.
// On caps both are even.
struct RadialPerturbation {
  Vec a, b;
};

// V with optional exact arclength derivatives; when Vs/Vss are empty they are
// computed spectrally. V is even on caps.
struct PotentialTriple {
  Vec V, Vs, Vss;
  double kappa = 0.0;
  double tau = 0.0;
  bool trivial() const { return V.size() == 0 || V.cwiseAbs().maxCoeff() < 1e-14; }
};

struct BoundaryValue {
  int index = 0;  // grid node
  int sign = 1;
  double value = 0.0;
};

struct Linearization {
  Vec dR;
  std::vector<BoundaryValue> dH;
  std::vector<double> div_X;  // tangential divergence term of dH; zero in the radial class
  double fd_gap = 0.0;        // relative disagreement with the finite-difference path
};

// closed form only
Linearization linearize_closed(const GeneralRadialMetric& g, const RadialPerturbation& h);
// closed form, cross-checked against Richardson-extrapolated differences of curvature_report(g + t h)
Linearization linearize_curvatures(const GeneralRadialMetric& g, const RadialPerturbation& h, double tol = 1e-6);
// Richardson path alone
Linearization linearize_fd(const GeneralRadialMetric& g, const RadialPerturbation& h);

// metric g + t h
GeneralRadialMetric perturbed(const GeneralRadialMetric& g, const RadialPerturbation& h, double t);

struct Adjoints {
  Vec rad, tan;                     // A*V frame components
  std::vector<BoundaryValue> bnd;   // B*V = value * g|_Sigma on each component
};

Adjoints adjoints(const GeneralRadialMetric& g, const PotentialTriple& p);
Adjoints adjoints(const RadialGeometry& geo, const PotentialTriple& p);

struct GreenTerms {
  double dR_V = 0.0;    // <dR h, V>_M
  double dH_V = 0.0;    // <2 dH h, V>_Sigma
  double AV_h = 0.0;    // <A*V, h>_M
  double BV_h = 0.0;    // <B*V, h>_Sigma
  double residual = 0.0;
  double relative = 0.0;
};

GreenTerms green_identity(const GeneralRadialMetric& g, const RadialPerturbation& h, const PotentialTriple& p);
double green_identity_residual(const GeneralRadialMetric& g, const RadialPerturbation& h, const PotentialTriple& p);

struct OperatorResidual {
  double interior = 0.0;
  double boundary = 0.0;
  double trace_interior = 0.0;  // sup |Lap V + R V/(n-1) + kappa n/(n-1)|
  double trace_boundary = 0.0;  // sup |dV/dnu - H V/(n-1) - tau|
  Vec rad, tan;                 // A*V - kappa g
  std::vector<double> bnd;      // B*V - tau g
  bool weak_potential = false;  // |V| < 1e-14 everywhere
};

OperatorResidual vstatic_residual(const GeneralRadialMetric& g, const PotentialTriple& p);

struct FunctionalProbe {
  double value = 0.0;
  double derivative = 0.0;
};

// F(g) = int R V + 2 int_Sigma H V - 2 kappa Vol - 2 tau Area, and its derivative along h
FunctionalProbe weighted_functional(const GeneralRadialMetric& g, const PotentialTriple& p,
                                    const RadialPerturbation* h = nullptr);

// <h, k> = a a' + (n-1) b b' integrated over M
double pair_interior(const RadialGeometry& geo, const Vec& a1, const Vec& b1, const Vec& a2, const Vec& b2);

}  // namespace curvlab
