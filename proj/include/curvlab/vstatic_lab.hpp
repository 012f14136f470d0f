#pragma once
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "curvlab/operators.hpp"
#include "curvlab/spectra.hpp"

namespace curvlab {

enum class Family { SphericalCap, EuclideanBall, HyperbolicCap, HyperbolicHalfspace, RicciFlatProduct };

const char* family_name(Family f);
Family family_from(const std::string& s);

struct ExampleSpec {
  Family family = Family::SphericalCap;
  int n = 3;
  double R = 1.0;        // cap radius, ball radius or cylinder length
  double a = 1.0;
  double kappa = 0.0;
  double tau = 0.0;      // euclidean-ball only: the constant in V
  std::vector<double> b; // euclidean-ball only; empty means 0
  int nodes = 40;
  std::string name;
};

void validate(const ExampleSpec& s);

// Dense multivariate polynomial in x_1..x_dim, exponent vector -> coefficient
class Polynomial {
 public:
  explicit Polynomial(int dim = 0) : dim_(dim) {}
  static Polynomial constant(int dim, double c);
  static Polynomial coordinate(int dim, int i);

  int dim() const { return dim_; }
  const std::map<std::vector<int>, double>& terms() const { return terms_; }
  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double s) const;
  Polynomial derivative(int i) const;
  double eval(const std::vector<double>& x) const;
  // canonical form modulo |x|^2 = rho^2 (x_1^2 eliminated)
  Polynomial reduce_sphere(double rho) const;
  double max_coeff() const;

 private:
  void add(const std::vector<int>& e, double c);
  int dim_;
  std::map<std::vector<int>, double> terms_;
};

struct PolynomialCheck {
  double interior = 0.0;  // max coefficient of A*V - kappa g
  double boundary = 0.0;  // max coefficient of B*V - tau on |x| = R after reduction
  double trace = 0.0;
};

struct HalfspaceCheck {
  int n = 3;
  double neumann = 0.0;    // max |d_nu V_i - delta_in| on sampled wall points
  double geodesic = 0.0;   // same through finite differences along normal geodesics
  double reflection = 0.0; // max |V_i(refl p) - (+-) V_i(p)|
  double radial_member = 0.0;  // vstatic residual of the kappa = 0 radial member
};

struct Example {
  ExampleSpec spec;
  WarpedMetric metric;
  PotentialTriple potential;
  std::optional<Polynomial> poly;  // euclidean ball: V as a polynomial
  double tabulated_tau = 0.0;      // the tabulated closed form, informational
  bool sign_change = false;        // V vanishes inside M
};

Example build_example(const ExampleSpec& s);
double tabulated_tau(const ExampleSpec& s);
PolynomialCheck polynomial_check(const ExampleSpec& s);
HalfspaceCheck halfspace_check(int n, int samples = 16, unsigned seed = 1);

// (V, kappa, tau) on g carried to c^2 g: (V, kappa / c^2, tau / c)
Example rescale(const Example& e, double c);

struct Certificate {
  std::string name;
  Family family = Family::SphericalCap;
  int n = 3;
  OperatorResidual residual;
  double scal_osc = 0.0;
  double H_osc = 0.0;
  double umbilic = 0.0;
  double gauss = 0.0;
  std::optional<PolynomialCheck> poly;
  std::optional<HalfspaceCheck> halfspace;
  bool sign_change = false;
  bool pass = false;
  std::string failed;  // first clause that broke
};

Certificate certify(const Example& e, double tol = 1e-10);
Certificate certify_example(const ExampleSpec& s, double tol = 1e-10);

std::vector<ExampleSpec> random_specs(Family f, int n, int count, std::mt19937& rng);

enum class ObstructionMode { Steklov, Neumann };
enum class Verdict { NoPotentialPossible, Inconclusive };
const char* verdict_name(Verdict v);

struct ObstructionReport {
  ObstructionMode mode = ObstructionMode::Steklov;
  Verdict verdict = Verdict::Inconclusive;
  double target = 0.0;    // H/(n-1) or R/(n-1)
  double nearest = 0.0;   // distance to the closest computed eigenvalue
  bool member = false;
  bool umbilic_or_einstein = true;
  SpectrumResult spectrum;
};

ObstructionReport obstruction_verdict(const WarpedMetric& g, ObstructionMode mode, int k_max = 12);

}  // namespace curvlab
