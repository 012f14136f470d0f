#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "curvlab/errors.hpp"
#include "curvlab/prescriber.hpp"

namespace curvlab {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * pi;

double gauss_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Gauss-Legendre, 8 nodes on [-1, 1]
constexpr double gl_x[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                            0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr double gl_w[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                            0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

double range_min(const TrigSeries& f, bool max) {
  TrigSeries g = f;
  if (max) {
    g.a0 = -g.a0;
    for (auto& v : g.a) v = -v;
    for (auto& v : g.b) v = -v;
  }
  auto v = validate_range(g, 0.0);
  return max ? -v.min : v.min;
}

}  // namespace

double CircleDiffeo::density(double theta) const {
  if (identity) return 1.0;
  double s = 0.0;
  const double norm = 1.0 / (sigma * std::sqrt(two_pi));
  for (size_t c = 0; c < centers.size(); ++c)
    for (int n = -1; n <= 1; ++n) {
      double z = (theta - centers[c] - two_pi * n) / sigma;
      if (std::abs(z) < 40.0) s += masses[c] * norm * std::exp(-0.5 * z * z);
    }
  return beta + (1.0 - beta) * s;
}

double CircleDiffeo::inverse(double theta) const {
  if (identity) return theta;
  auto cdf = [&](double t) {
    double s = 0.0;
    for (size_t c = 0; c < centers.size(); ++c)
      for (int n = -1; n <= 1; ++n) {
        double z = (t - centers[c] - two_pi * n) / sigma;
        if (z > 40.0) s += masses[c];
        else if (z > -40.0) s += masses[c] * gauss_cdf(z);
      }
    return s;
  };
  return beta * (theta - theta0) + (1.0 - beta) * (cdf(theta) - cdf(theta0));
}

double CircleDiffeo::operator()(double x) const {
  if (identity) return x;
  double lo = theta0, hi = theta0 + two_pi;
  for (int k = 0; k < 200; ++k) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (inverse(mid) < x ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double CircleDiffeo::derivative(double x) const { return 1.0 / density((*this)(x)); }

double lp_distance(const TrigSeries& f, const CircleDiffeo& phi, const TrigSeries& h, double p) {
  // integrate over the image: |f(theta) - h(phi^{-1} theta)|^p d(phi^{-1})
  std::vector<double> brk;
  const double t0 = phi.identity ? 0.0 : phi.theta0;
  for (int k = 0; k <= 256; ++k) brk.push_back(t0 + two_pi * k / 256);
  if (!phi.identity) {
    static const double offs[] = {-12, -8, -5, -3, -2, -1, -0.5, 0, 0.5, 1, 2, 3, 5, 8, 12};
    for (double c : phi.centers)
      for (int n = -1; n <= 1; ++n)
        for (double o : offs) {
          double t = c + two_pi * n + o * phi.sigma;
          if (t > t0 && t < t0 + two_pi) brk.push_back(t);
        }
  }
  std::sort(brk.begin(), brk.end());
  brk.erase(std::unique(brk.begin(), brk.end()), brk.end());
  double total = 0.0;
  for (size_t i = 0; i + 1 < brk.size(); ++i) {
    double a = brk[i], b = brk[i + 1];
    if (b - a <= 0.0) continue;
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int q = 0; q < 8; ++q) {
      double t = mid + half * gl_x[q];
      double x = phi.inverse(t);
      total += gl_w[q] * half * std::pow(std::abs(f(t) - h(x)), p) * phi.density(t);
    }
  }
  return std::pow(total, 1.0 / p);
}

namespace {

double gagliardo(const TrigSeries& f, const CircleDiffeo& phi, const TrigSeries& h, double p) {
  const int N = 256;
  const double dx = two_pi / N;
  Vec e(N);
  for (int i = 0; i < N; ++i) {
    double x = i * dx;
    e(i) = f(phi(x)) - h(x);
  }
  double s = 0.0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      if (i == j) continue;
      double d = std::abs(i - j) * dx;
      d = std::min(d, two_pi - d);
      s += std::pow(std::abs(e(i) - e(j)), p) / std::pow(d, 1.0 + 0.5 * p) * dx * dx;
    }
  return std::pow(s, 1.0 / p);
}

// monotone assignment of x cells to candidate angles in [theta0, theta0 + 2 pi)
CircleDiffeo assign(const TrigSeries& f, const TrigSeries& h, double p, double theta0, const PullbackOptions& opt,
                    double* cost_out) {
  const int K = opt.cells, M = opt.candidates;
  const double dx = two_pi / K, dth = two_pi / M;
  Vec hx(K), fth(M);
  for (int j = 0; j < K; ++j) hx(j) = h((j + 0.5) * dx);
  for (int i = 0; i < M; ++i) fth(i) = f(theta0 + (i + 0.5) * dth);

  std::vector<int> from(static_cast<size_t>(K) * M);
  Vec best(M), next(M);
  for (int i = 0; i < M; ++i) best(i) = std::pow(std::abs(fth(i) - hx(0)), p);
  for (int j = 1; j < K; ++j) {
    double run = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (int i = 0; i < M; ++i) {
      if (best(i) < run) {
        run = best(i);
        arg = i;
      }
      next(i) = run + std::pow(std::abs(fth(i) - hx(j)), p);
      from[static_cast<size_t>(j) * M + i] = arg;
    }
    best.swap(next);
  }
  Eigen::Index last;
  *cost_out = best.minCoeff(&last) * dx;
  std::vector<int> pick(K);
  pick[K - 1] = static_cast<int>(last);
  for (int j = K - 1; j > 0; --j) pick[j - 1] = from[static_cast<size_t>(j) * M + pick[j]];

  CircleDiffeo phi;
  phi.identity = false;
  phi.theta0 = theta0;
  phi.beta = opt.floor;
  phi.sigma = opt.sigma;
  for (int j = 0; j < K;) {
    int k = j;
    while (k < K && pick[k] == pick[j]) ++k;
    // refine the angle inside its candidate cell
    double c0 = theta0 + (pick[j] + 0.5) * dth;
    auto err = [&](double t) {
      double s = 0.0;
      for (int q = j; q < k; ++q) s += std::pow(std::abs(f(t) - hx(q)), p);
      return s;
    };
    double a = c0 - 0.5 * dth, b = c0 + 0.5 * dth;
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - r * (b - a), d = a + r * (b - a);
    for (int it = 0; it < 100 && b - a > 1e-15; ++it) {
      if (err(c) < err(d)) {
        b = d;
      } else {
        a = c;
      }
      c = b - r * (b - a);
      d = a + r * (b - a);
    }
    double t = 0.5 * (a + b);
    if (err(t) > err(c0)) t = c0;
    phi.centers.push_back(t);
    phi.masses.push_back((k - j) * dx);
    j = k;
  }
  return phi;
}

}  // namespace

PullbackResult approx_by_pullback(const TrigSeries& f, const TrigSeries& h, double eps, double p,
                                  const PullbackOptions& opt) {
  if (!(eps > 0.0) || !(p >= 1.0)) throw CurvError(ErrorKind::Domain, "need eps > 0 and p >= 1");
  const double fmin = range_min(f, false), fmax = range_min(f, true);
  const double hmin = range_min(h, false), hmax = range_min(h, true);
  const double tol = 1e-12 * std::max(1.0, std::max(std::abs(fmin), std::abs(fmax)));
  if (hmax > fmax + tol) throw CurvError(ErrorKind::Precondition, "h exceeds max f", hmax);
  if (hmin < fmin - tol) throw CurvError(ErrorKind::Precondition, "h falls below min f", hmin);

  PullbackResult res;
  res.p = p;
  res.eps = eps;
  res.lp = lp_distance(f, res.phi, h, p);
  if (res.lp < eps) {
    res.seminorm = gagliardo(f, res.phi, h, p);
    return res;
  }

  PullbackOptions o = opt;
  double best = res.lp;
  for (int attempt = 1; attempt <= opt.attempts; ++attempt) {
    CircleDiffeo phi_best;
    double cost_best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 8; ++s) {
      double cost;
      CircleDiffeo phi = assign(f, h, p, two_pi * s / 8.0, o, &cost);
      if (cost < cost_best) {
        cost_best = cost;
        phi_best = phi;
      }
    }
    double lp = lp_distance(f, phi_best, h, p);
    best = std::min(best, lp);
    if (lp < eps) {
      res.phi = phi_best;
      res.lp = lp;
      res.attempts = attempt;
      res.seminorm = gagliardo(f, res.phi, h, p);
      return res;
    }
    o.sigma /= 10.0;
    o.floor /= 10.0;
  }
  throw CurvError(ErrorKind::NonConvergence, "pullback did not reach the requested accuracy", best);
}

}  // namespace curvlab
