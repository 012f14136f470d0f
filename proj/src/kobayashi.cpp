#include "curvlab/kobayashi.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "curvlab/errors.hpp"
#include "curvlab/geometry.hpp"

namespace curvlab {

namespace {

constexpr double pi = std::numbers::pi;

// C^infinity step from 0 to 1 on [0, 1] and its derivative
double psi(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
double step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return psi(x) / (psi(x) + psi(1.0 - x));
}
double step_d(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  double a = psi(x), b = psi(1.0 - x);
  double da = a / (x * x), db = b / ((1.0 - x) * (1.0 - x));
  return (da * b + a * db) / ((a + b) * (a + b));
}

// Warp w(s) of ds^2 + w^2 g_{S^{n-1}} with w'^2 = 1 - w^2 + C(s) w^{2-n}; C = 0 is round,
// C = -c0 is a constant-curvature neck. R - n(n-1) = -(n-1) C' w^{1-n} / w'.
struct Profile {
  int n = 3;
  double c0 = 0.0, a1 = 0.0, len = 0.0, b = 1e300;

  double C(double s) const {
    if (s < b) return -c0 * step((s - a1) / len);
    return -c0 * (1.0 - step((s - b) / len));
  }
  double dC(double s) const {
    if (s < b) return -c0 * step_d((s - a1) / len) / len;
    return c0 * step_d((s - b) / len) / len;
  }
  double wss(double s, double w, double v) const {
    double out = -w + 0.5 * (2.0 - n) * C(s) * std::pow(w, 1.0 - n);
    double dc = dC(s);
    if (dc != 0.0) out += dc * std::pow(w, 2.0 - n) / (2.0 * v);
    return out;
  }
};

using State = std::array<double, 4>;  // w, w', int ds/w, int w^{n-1} ds

struct Sample {
  double s;
  State x;
};

struct Attempt {
  std::vector<double> r, f, df, d2f;
  double neck = 1e300, r_match = 0.0;
};

Attempt build(int n, double eps2, double c0) {
  const double wT = 0.5 * std::sin(std::min(eps2, pi / 2));
  Profile p;
  p.n = n;
  p.c0 = c0;
  p.len = 0.5 * wT;
  p.a1 = pi - std::asin(wT);

  auto rhs = [&p](const State& x, State& dx, double s) {
    dx[0] = x[1];
    dx[1] = p.wss(s, x[0], x[1]);
    dx[2] = 1.0 / x[0];
    dx[3] = std::pow(x[0], p.n - 1);
  };
  namespace ode = boost::numeric::odeint;
  auto stepper = ode::make_dense_output(1e-13, 1e-13, ode::runge_kutta_dopri5<State>());

  std::vector<Sample> samples;
  const double h = 1e-3;
  auto run = [&](State x, double s0, double s1, bool detect) -> std::pair<double, State> {
    stepper.initialize(x, s0, 1e-4);
    double next = s0;
    while (true) {
      auto [ta, tb] = stepper.do_step(rhs);
      for (; next < tb && next <= s1; next += h) {
        State y;
        stepper.calc_state(next, y);
        samples.push_back({next, y});
      }
      State cur = stepper.current_state();
      if (!std::isfinite(cur[0]) || cur[0] <= 0.0)
        throw CurvError(ErrorKind::NonConvergence, "neck profile collapsed");
      if (detect && cur[1] > 0.0 && cur[0] >= wT) {
        // bisection for w = wT on the rising side
        double lo = ta, hi = tb;
        State y;
        for (int k = 0; k < 80; ++k) {
          double mid = 0.5 * (lo + hi);
          stepper.calc_state(mid, y);
          (y[0] >= wT && y[1] > 0.0 ? hi : lo) = mid;
        }
        stepper.calc_state(hi, y);
        std::erase_if(samples, [hi](const Sample& sm) { return sm.s > hi; });
        return {hi, y};
      }
      if (!detect && tb >= s1) {
        State y;
        stepper.calc_state(s1, y);
        samples.push_back({s1, y});
        return {s1, y};
      }
      if (tb - s0 > 10.0 * pi) throw CurvError(ErrorKind::NonConvergence, "neck did not reopen");
      samples.push_back({tb, cur});
    }
  };

  State x0 = {std::sin(p.a1), std::cos(p.a1), 0.0, 0.0};
  auto [s1, x1] = run(x0, p.a1, p.a1 + p.len, false);
  auto [sb, xb] = run(x1, s1, 1e300, true);
  p.b = sb;
  auto [s2, x2] = run(xb, sb, sb + p.len, false);

  std::sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) { return a.s < b.s; });

  Attempt out;
  out.r_match = std::atan2(x2[0], x2[1]);
  const double q2 = x2[2];
  const double log_match = std::log(std::tan(0.5 * out.r_match));
  const double L = log_match - q2 - std::log(std::tan(0.5 * p.a1));

  auto push = [&](double r, double w, double v, double wss) {
    double f = std::sin(r) / w;
    double fr = (std::cos(r) - v) / w;
    double dfr = (-std::sin(r) * f - wss) / w - (std::cos(r) - v) * v / (w * w);
    out.r.push_back(r);
    out.f.push_back(f);
    out.df.push_back(fr);
    out.d2f.push_back(dfr / f);
  };

  // dilated round cap: tan(r/2) = e^L tan(s/2)
  const int nb = 2000;
  for (int j = 1; j < nb; ++j) {
    double s = p.a1 * j / nb;
    double r = 2.0 * std::atan(std::exp(L) * std::tan(0.5 * s));
    push(r, std::sin(s), std::cos(s), -std::sin(s));
  }
  double last_s = -1.0;
  for (const auto& sm : samples) {
    if (sm.s <= last_s + 1e-15) continue;
    last_s = sm.s;
    double r = 2.0 * std::atan(std::exp(log_match - (q2 - sm.x[2])));
    push(r, sm.x[0], sm.x[1], p.wss(sm.s, sm.x[0], sm.x[1]));
    out.neck = std::min(out.neck, sm.x[0]);
  }
  // untouched round sphere
  const int nr = 2000;
  for (int j = 1; j < nr; ++j) {
    double r = out.r_match + (pi - out.r_match) * j / nr;
    out.r.push_back(r);
    out.f.push_back(1.0);
    out.df.push_back(0.0);
    out.d2f.push_back(0.0);
  }
  return out;
}

Vec to_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

}  // namespace

FactorChecks verify_sphere_factor(int n, const Vec& r, const Vec& f, const Vec& df, const Vec& d2f, double eps1,
                                  double eps2, Vec* R_out) {
  FactorChecks c;
  const int m = static_cast<int>(r.size());
  const double target = n * (n - 1.0);
  Vec R(m);
  for (int i = 0; i < m; ++i) {
    double lap = d2f(i) + (n - 1.0) * std::cos(r(i)) / std::sin(r(i)) * df(i);
    R(i) = target * f(i) * f(i) + 2.0 * (n - 1.0) * f(i) * lap - target * df(i) * df(i);
  }
  c.R_gap = (R.array() - target).abs().maxCoeff();

  const double area = unit_sphere_area(n - 1);
  auto dens = [&](int i) { return area * std::pow(f(i), -n) * std::pow(std::sin(r(i)), n - 1); };
  double vol = 0.0;
  for (int i = 0; i + 1 < m; ++i) vol += 0.5 * (r(i + 1) - r(i)) * (dens(i) + dens(i + 1));
  c.volume = vol;
  c.vol_gap = std::abs(vol - 2.0 * unit_sphere_area(n));

  c.outside_gap = 0.0;
  c.slope = 0.0;
  for (int i = 0; i < m; ++i) {
    if (r(i) > eps2) c.outside_gap = std::max(c.outside_gap, std::abs(f(i) - 1.0));
    c.slope = std::max(c.slope, std::abs(df(i)) * std::sin(r(i)));
  }
  c.f_min = f.minCoeff();
  c.f_max = f.maxCoeff();

  c.a = c.R_gap < eps1;
  c.b = c.vol_gap < eps1;
  c.c = c.outside_gap == 0.0;
  c.d = c.f_min > 0.0 && c.f_max <= 1.0 + 1e-12 && c.slope <= 2.0 + 1e-12;
  c.pass = c.a && c.b && c.c && c.d;
  if (!c.a) c.failed = "(a) scalar curvature";
  else if (!c.b) c.failed = "(b) volume";
  else if (!c.c) c.failed = "(c) f = 1 away from the pole";
  else if (!c.d) c.failed = "(d) bounds on f";
  if (R_out) *R_out = R;
  return c;
}

SphereFactor kobayashi_factor(int n, double eps1, double eps2) {
  if (n < 3) throw CurvError(ErrorKind::Domain, "n must be at least 3");
  if (!(eps1 > 0.0)) throw CurvError(ErrorKind::Domain, "eps1 must be positive");
  if (!(eps2 > 0.0 && eps2 < pi)) throw CurvError(ErrorKind::Domain, "eps2 must lie in (0, pi)");

  const double wT = 0.5 * std::sin(std::min(eps2, pi / 2));
  double c0 = eps1 * std::pow(wT, n) / (64.0 * (n - 1.0));
  double best = 1e300;
  for (int attempt = 1; attempt <= 8; ++attempt, c0 *= 0.25) {
    Attempt a = build(n, eps2, c0);
    SphereFactor sf;
    sf.n = n;
    sf.eps1 = eps1;
    sf.eps2 = eps2;
    sf.r = to_vec(a.r);
    sf.f = to_vec(a.f);
    sf.df = to_vec(a.df);
    sf.d2f = to_vec(a.d2f);
    sf.neck = a.neck;
    sf.r_match = a.r_match;
    sf.c0 = c0;
    sf.attempts = attempt;
    sf.checks = verify_sphere_factor(n, sf.r, sf.f, sf.df, sf.d2f, eps1, eps2, &sf.R);
    if (sf.checks.pass) return sf;
    best = std::min(best, std::max(sf.checks.R_gap, sf.checks.vol_gap));
  }
  throw CurvError(ErrorKind::Infeasible, "no factor met (a)-(d) at the requested tolerances", best);
}

SphereFactor identity_factor(int n, double eps1, double eps2, int samples) {
  SphereFactor sf;
  sf.n = n;
  sf.eps1 = eps1;
  sf.eps2 = eps2;
  sf.r = Vec::LinSpaced(samples + 1, 0.0, pi).segment(1, samples - 1);
  sf.f = Vec::Ones(samples - 1);
  sf.df = Vec::Zero(samples - 1);
  sf.d2f = Vec::Zero(samples - 1);
  sf.checks = verify_sphere_factor(n, sf.r, sf.f, sf.df, sf.d2f, eps1, eps2, &sf.R);
  return sf;
}

}  // namespace curvlab
