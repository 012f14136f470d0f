#pragma once
#include <string>
#include <vector>

#include "curvlab/operators.hpp"
#include "curvlab/spectra.hpp"

namespace curvlab {

// boundary: scalar flat with H = c on Sigma; interior: R = c in M with minimal boundary
enum class ConformalKind { Boundary, Interior };
enum class Start { Super, Sub };

const char* kind_name(ConformalKind k);

struct ConformalOptions {
  Start start = Start::Super;
  bool newton = true;          // finish with Newton once the sweep residual is below newton_switch
  double newton_switch = 1e-4;
  double tol = 1e-11;
  int max_sweeps = 2000;
  int max_newton = 30;
};

struct ConformalFactorPath {
  ConformalKind kind = ConformalKind::Boundary;
  RadialPerturbation h;
  double t = 0.0;
  double c = 0.0;
  GeneralRadialMetric g;  // g0 + t h
  Vec phi;
  Vec u;                  // bracket function, already rescaled
  double u_scale = 1.0;   // factor applied to the principal solution
  Vec lower, upper;       // 1 -+ |t| u
  double lower_const = 1.0, upper_const = 1.0;  // 1 -+ |t| max u
  std::vector<double> history;  // residual after each sweep, then each Newton step
  int sweeps = 0;
  int newton_steps = 0;
  double residual = 0.0;
  double bracket_violation = 0.0;  // max over nodes of the distance outside [lower, upper]
};

// residual of the conformal equations for a trial factor on g
double conformal_residual(const GeneralRadialMetric& g, const Vec& phi, double c, ConformalKind kind);

ConformalFactorPath solve_conformal_bvp(const WarpedMetric& g0, const RadialPerturbation& h, double t, double c,
                                        ConformalKind kind, const ConformalOptions& opt = {});
ConformalFactorPath solve_conformal_bvp(const GeneralRadialMetric& g0, const RadialPerturbation& h, double t,
                                        double c, ConformalKind kind, const ConformalOptions& opt = {});

struct LinearizedFactor {
  Vec phi_hat;
  Vec dR;
  std::vector<double> dH;
  double t = 0.0;        // step of the finite-difference probe (0 when skipped)
  double gap = 0.0;      // sup |(Phi(t) - Phi(-t))/2t - phi_hat|
  double gap_half = 0.0; // same at t/2
  double order = 0.0;    // log2(gap / gap_half)
};

// fd_t > 0 also runs the symmetric difference probe at fd_t and fd_t/2
LinearizedFactor linearized_factor(const GeneralRadialMetric& g0, const RadialPerturbation& h, double c,
                                   ConformalKind kind, double fd_t = 0.0);
LinearizedFactor linearized_factor(const WarpedMetric& g0, const RadialPerturbation& h, double c, ConformalKind kind,
                                   double fd_t = 0.0);

// h = s g gives the homothety (1 + t s) g
RadialPerturbation homothety(const GeneralRadialMetric& g, double s = 1.0);

}  // namespace curvlab
