#include <algorithm>
#include <cmath>
#include <numbers>

#include "curvlab/prescriber.hpp"

namespace curvlab {

namespace {

// golden section on [a, b] for the minimum of g
template <class G>
double golden(G g, double a, double b) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double gc = g(c), gd = g(d);
  for (int k = 0; k < 200 && b - a > 1e-15; ++k) {
    if (gc < gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - r * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + r * (b - a);
      gd = g(d);
    }
  }
  return std::min(gc, gd);
}

}  // namespace

const char* target_kind_name(TargetKind k) {
  switch (k) {
    case TargetKind::GeodesicBoundary: return "geodesic-boundary-curvature";
    case TargetKind::GaussInterior: return "gauss-interior-curvature";
    case TargetKind::ScalarInterior: return "scalar-interior";
    case TargetKind::MeanBoundary: return "mean-boundary";
  }
  return "?";
}

const char* range_case_name(RangeCase c) {
  switch (c) {
    case RangeCase::Constant: return "constant-case";
    case RangeCase::Straddle: return "straddle-case";
    case RangeCase::Infeasible: return "infeasible";
  }
  return "?";
}

RangeVerdict classify_range(const Vec& samples, double threshold) {
  RangeVerdict v;
  v.threshold = threshold;
  v.min = samples.minCoeff();
  v.max = samples.maxCoeff();
  const double tol = 1e-12 * std::max(1.0, std::abs(threshold));
  if (std::abs(v.min - threshold) <= tol && std::abs(v.max - threshold) <= tol)
    v.verdict = RangeCase::Constant;
  else if (v.min < threshold - tol && v.max > threshold + tol)
    v.verdict = RangeCase::Straddle;
  else
    v.verdict = RangeCase::Infeasible;
  return v;
}

RangeVerdict validate_range(const TrigSeries& f, double threshold) {
  const int N = std::max(256, 8 * f.degree());
  Vec s = f.sample(N);
  Eigen::Index imin, imax;
  s.minCoeff(&imin);
  s.maxCoeff(&imax);
  const double h = 2.0 * std::numbers::pi / N;
  double lo = golden([&](double t) { return f(t); }, (imin - 1.0) * h, (imin + 1.0) * h);
  double hi = -golden([&](double t) { return -f(t); }, (imax - 1.0) * h, (imax + 1.0) * h);
  Vec ext(N + 2);
  ext << s, lo, hi;
  return classify_range(ext, threshold);
}

RangeVerdict validate_range(const CylinderTarget& f, double threshold, int nt, int ntheta) {
  Vec s(nt * ntheta);
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < ntheta; ++j)
      s(i * ntheta + j) = f(static_cast<double>(i) / (nt - 1), 2.0 * std::numbers::pi * j / ntheta);
  return classify_range(s, threshold);
}

}  // namespace curvlab
