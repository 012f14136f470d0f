#include "curvlab/chebyshev.hpp"

#include <cmath>
#include <numbers>

#include "curvlab/errors.hpp"

namespace curvlab {

namespace {
constexpr double kPi = std::numbers::pi;
}

Vec cheb_nodes(int N) {
  Vec x(N);
  if (N == 1) {
    x(0) = 0.0;
    return x;
  }
  // sin form keeps the grid exactly antisymmetric
  for (int j = 0; j < N; ++j) x(j) = std::sin(kPi * (N - 1 - 2 * j) / (2.0 * (N - 1)));
  return x;
}

Mat cheb_diff(int N) {
  Mat D = Mat::Zero(N, N);
  if (N == 1) return D;
  const double h = kPi / (2.0 * (N - 1));
  auto c = [N](int j) { return (j == 0 || j == N - 1) ? 2.0 : 1.0; };
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      if (i == j) continue;
      double dx = 2.0 * std::sin((i + j) * h) * std::sin((j - i) * h);
      double sgn = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      D(i, j) = c(i) / c(j) * sgn / dx;
    }
  }
  // negative sum trick for the diagonal
  for (int i = 0; i < N; ++i) {
    double s = 0.0;
    for (int j = 0; j < N; ++j)
      if (j != i) s += D(i, j);
    D(i, i) = -s;
  }
  return D;
}

Mat values_to_coeffs(int N) {
  Mat C(N, N);
  for (int k = 0; k < N; ++k) {
    for (int j = 0; j < N; ++j) {
      double w = (j == 0 || j == N - 1) ? 0.5 : 1.0;
      C(k, j) = 2.0 / (N - 1) * w * std::cos(kPi * k * j / (N - 1));
    }
  }
  C.row(0) *= 0.5;
  C.row(N - 1) *= 0.5;
  return C;
}

Vec clenshaw_curtis(int N) {
  Mat C = values_to_coeffs(N);
  Vec I = Vec::Zero(N);
  for (int k = 0; k < N; k += 2) I(k) = 2.0 / (1.0 - double(k) * k);
  return C.transpose() * I;
}

Vec half_interval_weights(int N) {
  Mat C = values_to_coeffs(N);
  Vec I(N);
  for (int k = 0; k < N; ++k) {
    if (k == 1) {
      I(k) = 0.5;
      continue;
    }
    double a = (1.0 - std::cos((1.0 + k) * kPi / 2.0)) / (1.0 + k);
    double b = (1.0 - std::cos((1.0 - k) * kPi / 2.0)) / (1.0 - k);
    I(k) = 0.5 * (a + b);
  }
  return C.transpose() * I;
}

namespace {
// constants must differentiate to exactly zero
void kill_constants(Mat& M) {
  for (int i = 0; i < M.rows(); ++i) M(i, i) = -(M.row(i).sum() - M(i, i));
}
}  // namespace

RadialGrid RadialGrid::annulus(double r0, double R, int m) {
  if (!(R > r0) || r0 < 0.0) throw CurvError(ErrorKind::Domain, "annulus needs 0 <= r0 < R");
  if (m < 3) throw CurvError(ErrorKind::Domain, "grid needs at least 3 nodes");
  RadialGrid g;
  g.kind_ = GridKind::Annulus;
  g.r0_ = r0;
  g.R_ = R;
  const int N = m;
  g.x_full_ = cheb_nodes(N);
  const double s = 2.0 / (R - r0);
  Mat D = cheb_diff(N);
  Mat D2 = D * D;
  Vec w = clenshaw_curtis(N);
  g.r_.resize(m);
  g.De_.resize(m, m);
  g.D2e_.resize(m, m);
  g.we_.resize(m);
  for (int i = 0; i < m; ++i) {
    int j = m - 1 - i;
    g.r_(i) = r0 + (R - r0) * (1.0 + g.x_full_(j)) / 2.0;
    g.we_(i) = w(j) / s;
    for (int k = 0; k < m; ++k) {
      int jk = m - 1 - k;
      g.De_(i, k) = s * D(j, jk);
      g.D2e_(i, k) = s * s * D2(j, jk);
    }
  }
  g.r_(0) = r0;
  g.r_(m - 1) = R;
  kill_constants(g.De_);
  kill_constants(g.D2e_);
  g.Do_ = g.De_;
  g.D2o_ = g.D2e_;
  g.wo_ = g.we_;
  g.bary_.resize(N);
  for (int j = 0; j < N; ++j) g.bary_(j) = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == N - 1) ? 0.5 : 1.0);
  return g;
}

RadialGrid RadialGrid::cap(double R, int m) {
  if (!(R > 0.0)) throw CurvError(ErrorKind::Domain, "cap needs R > 0");
  if (m < 3) throw CurvError(ErrorKind::Domain, "grid needs at least 3 nodes");
  RadialGrid g;
  g.kind_ = GridKind::Cap;
  g.r0_ = 0.0;
  g.R_ = R;
  const int N = 2 * m;
  g.x_full_ = cheb_nodes(N);
  Mat D = cheb_diff(N);
  Mat D2 = D * D;
  Vec wh = half_interval_weights(N);
  g.r_.resize(m);
  g.De_.resize(m, m);
  g.Do_.resize(m, m);
  g.D2e_.resize(m, m);
  g.D2o_.resize(m, m);
  g.we_.resize(m);
  g.wo_.resize(m);
  for (int i = 0; i < m; ++i) {
    int j = m - 1 - i;
    g.r_(i) = R * g.x_full_(j);
    g.we_(i) = R * (wh(j) + wh(N - 1 - j));
    g.wo_(i) = R * (wh(j) - wh(N - 1 - j));
    for (int k = 0; k < m; ++k) {
      int jk = m - 1 - k;
      int mk = N - 1 - jk;
      g.De_(i, k) = (D(j, jk) + D(j, mk)) / R;
      g.Do_(i, k) = (D(j, jk) - D(j, mk)) / R;
      g.D2e_(i, k) = (D2(j, jk) + D2(j, mk)) / (R * R);
      g.D2o_(i, k) = (D2(j, jk) - D2(j, mk)) / (R * R);
    }
  }
  g.r_(m - 1) = R;
  kill_constants(g.De_);
  kill_constants(g.D2e_);
  g.bary_.resize(N);
  for (int j = 0; j < N; ++j) g.bary_(j) = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == N - 1) ? 0.5 : 1.0);
  return g;
}

const Mat& RadialGrid::D(int parity) const { return parity >= 0 ? De_ : Do_; }
const Mat& RadialGrid::D2(int parity) const { return parity >= 0 ? D2e_ : D2o_; }
const Vec& RadialGrid::weights(int parity) const { return parity >= 0 ? we_ : wo_; }

namespace {
Vec full_values(const RadialGrid& g, const Vec& v, int parity) {
  const int m = g.size();
  if (!g.is_cap()) {
    Vec f(m);
    for (int i = 0; i < m; ++i) f(m - 1 - i) = v(i);
    return f;
  }
  const int N = 2 * m;
  Vec f(N);
  for (int i = 0; i < m; ++i) {
    int j = m - 1 - i;
    f(j) = v(i);
    f(N - 1 - j) = (parity >= 0 ? 1.0 : -1.0) * v(i);
  }
  return f;
}
}  // namespace

double RadialGrid::interpolate(const Vec& v, double r, int parity) const {
  double x = is_cap() ? r / R_ : 2.0 * (r - r0_) / (R_ - r0_) - 1.0;
  Vec f = full_values(*this, v, parity);
  double num = 0.0, den = 0.0;
  for (int j = 0; j < f.size(); ++j) {
    double d = x - x_full_(j);
    if (d == 0.0) return f(j);
    double t = bary_(j) / d;
    num += t * f(j);
    den += t;
  }
  return num / den;
}

Vec RadialGrid::coefficients(const Vec& v, int parity) const {
  Vec f = full_values(*this, v, parity);
  return values_to_coeffs(static_cast<int>(f.size())) * f;
}

bool RadialGrid::same_as(const RadialGrid& o) const {
  return kind_ == o.kind_ && size() == o.size() && r0_ == o.r0_ && R_ == o.R_;
}

double ChebSeries::operator()(double x) const {
  double t = (2.0 * x - lo - hi) / (hi - lo);
  double b1 = 0.0, b2 = 0.0;
  for (int k = static_cast<int>(c.size()) - 1; k >= 1; --k) {
    double b0 = 2.0 * t * b1 - b2 + c(k);
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + (c.size() ? c(0) : 0.0);
}

ChebSeries ChebSeries::derivative() const {
  ChebSeries d;
  d.lo = lo;
  d.hi = hi;
  const int n = static_cast<int>(c.size());
  if (n <= 1) {
    d.c = Vec::Zero(1);
    return d;
  }
  Vec a = Vec::Zero(n + 1);
  for (int k = n - 1; k >= 1; --k) a(k - 1) = a(k + 1) + 2.0 * k * c(k);
  a(0) *= 0.5;
  d.c = a.head(n - 1) * (2.0 / (hi - lo));
  return d;
}

}  // namespace curvlab
