#include "curvlab/fourier.hpp"

#include <cmath>
#include <numbers>
#include <unsupported/Eigen/FFT>

namespace curvlab {

namespace {

constexpr double pi = std::numbers::pi;

// signed wavenumber of bin j; the Nyquist bin of an even grid reports 0 in `odd` use
int wavenumber(int j, int N) { return j <= N / 2 ? j : j - N; }
bool nyquist(int j, int N) { return N % 2 == 0 && j == N / 2; }

CVec forward(const Vec& u) {
  if (u.size() == 1) return CVec::Constant(1, u(0));  // kissfft needs n > 1
  Eigen::FFT<double> fft;
  std::vector<double> in(u.data(), u.data() + u.size());
  std::vector<std::complex<double>> out;
  fft.fwd(out, in);
  return Eigen::Map<CVec>(out.data(), static_cast<Eigen::Index>(out.size()));
}

Vec backward_real(const CVec& c) {
  if (c.size() == 1) return Vec::Constant(1, c(0).real());
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> in(c.data(), c.data() + c.size());
  std::vector<std::complex<double>> out;
  fft.inv(out, in);
  Vec v(static_cast<Eigen::Index>(out.size()));
  for (size_t i = 0; i < out.size(); ++i) v(static_cast<Eigen::Index>(i)) = out[i].real();
  return v;
}

template <class Symbol>
Vec apply_symbol(const Vec& u, Symbol sym) {
  const int N = static_cast<int>(u.size());
  CVec c = forward(u);
  for (int j = 0; j < N; ++j) c(j) *= sym(wavenumber(j, N), nyquist(j, N));
  return backward_real(c);
}

}  // namespace

double TrigSeries::operator()(double theta) const {
  double s = a0;
  for (size_t k = 0; k < a.size(); ++k) s += a[k] * std::cos((k + 1.0) * theta);
  for (size_t k = 0; k < b.size(); ++k) s += b[k] * std::sin((k + 1.0) * theta);
  return s;
}

double TrigSeries::derivative(double theta) const {
  double s = 0.0;
  for (size_t k = 0; k < a.size(); ++k) s -= (k + 1.0) * a[k] * std::sin((k + 1.0) * theta);
  for (size_t k = 0; k < b.size(); ++k) s += (k + 1.0) * b[k] * std::cos((k + 1.0) * theta);
  return s;
}

Vec TrigSeries::sample(int N) const {
  Vec th = circle_nodes(N);
  Vec v(N);
  for (int i = 0; i < N; ++i) v(i) = (*this)(th(i));
  return v;
}

TrigSeries TrigSeries::constant(double c) {
  TrigSeries t;
  t.a0 = c;
  return t;
}

Vec circle_nodes(int N) {
  Vec th(N);
  for (int i = 0; i < N; ++i) th(i) = 2.0 * pi * i / N;
  return th;
}

Vec fourier_derivative(const Vec& u, int order) {
  return apply_symbol(u, [order](int k, bool nyq) -> std::complex<double> {
    if (nyq && order % 2 == 1) return 0.0;
    return std::pow(std::complex<double>(0.0, k), order);
  });
}

CVec fourier_derivative(const CVec& u) {
  const int N = static_cast<int>(u.size());
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> in(u.data(), u.data() + u.size()), c, out;
  fft.fwd(c, in);
  for (int j = 0; j < N; ++j) c[j] *= nyquist(j, N) ? 0.0 : std::complex<double>(0.0, wavenumber(j, N));
  fft.inv(out, c);
  return Eigen::Map<CVec>(out.data(), N);
}

Vec dirichlet_to_neumann(const Vec& u) {
  return apply_symbol(u, [](int k, bool) -> std::complex<double> { return std::abs(k); });
}

Vec harmonic_conjugate(const Vec& u) {
  return apply_symbol(u, [](int k, bool nyq) -> std::complex<double> {
    if (nyq || k == 0) return 0.0;
    return std::complex<double>(0.0, k > 0 ? -1.0 : 1.0);
  });
}

Vec primitive(const Vec& g) {
  const int N = static_cast<int>(g.size());
  Vec P = apply_symbol(g, [](int k, bool nyq) -> std::complex<double> {
    if (nyq || k == 0) return 0.0;
    return std::complex<double>(0.0, -1.0 / k);
  });
  const double mean = g.mean();
  Vec th = circle_nodes(N);
  return (mean * th.array() + P.array() - P(0)).matrix();
}

Mat primitive_matrix(int N) {
  Mat S(N, N);
  for (int j = 0; j < N; ++j) S.col(j) = primitive(Vec::Unit(N, j));
  return S;
}

Mat fourier_matrix(int N, int order) {
  Mat D(N, N);
  for (int j = 0; j < N; ++j) D.col(j) = fourier_derivative(Vec::Unit(N, j), order);
  return D;
}

Mat dtn_matrix(int N) {
  Mat D(N, N);
  for (int j = 0; j < N; ++j) D.col(j) = dirichlet_to_neumann(Vec::Unit(N, j));
  return D;
}

Vec upsample(const Vec& u, int factor) {
  const int N = static_cast<int>(u.size());
  const int M = N * factor;
  CVec c = forward(u);
  CVec d = CVec::Zero(M);
  for (int j = 0; j < N; ++j) {
    int k = wavenumber(j, N);
    if (nyquist(j, N)) {
      d(N / 2) += 0.5 * c(j);
      d(M - N / 2) += 0.5 * c(j);
      continue;
    }
    d(k >= 0 ? k : M + k) = c(j);
  }
  return backward_real(d) * static_cast<double>(factor);
}

double trig_interpolate(const Vec& u, double theta) {
  const int N = static_cast<int>(u.size());
  CVec c = forward(u);
  double s = 0.0;
  for (int j = 0; j < N; ++j) {
    int k = wavenumber(j, N);
    double w = nyquist(j, N) ? 0.5 : 1.0;
    std::complex<double> e(std::cos(k * theta), std::sin(k * theta));
    s += w * (c(j) * e).real();
    if (nyquist(j, N)) s += w * (c(j) * std::conj(e)).real();
  }
  return s / N;
}

}  // namespace curvlab
