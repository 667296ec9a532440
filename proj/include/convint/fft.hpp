#pragma once

// Mixed-radix and Bluestein complex FFT, templated on the real scalar type.
// Transforms are unnormalised: forward uses exp(-2 pi i jk/n), inverse exp(+2 pi i jk/n).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

namespace convint::fft {

enum class Direction { Forward, Inverse };

template <typename Scalar>
class Plan {
 public:
  using Complex = std::complex<Scalar>;

  /// Lengths whose largest prime factor exceeds this go through Bluestein.
  static constexpr std::size_t kMaxDirectRadix = 31;

  explicit Plan(std::size_t n) : n_(n) {
    if (n == 0) return;
    std::size_t m = n;
    for (std::size_t f : {4u, 2u, 3u, 5u}) {
      while (m % f == 0) {
        factors_.push_back(f);
        m /= f;
      }
    }
    for (std::size_t f = 7; f * f <= m; f += 2) {
      while (m % f == 0) {
        factors_.push_back(f);
        m /= f;
      }
    }
    if (m > 1) factors_.push_back(m);
    std::size_t largest = 1;
    for (auto f : factors_) largest = std::max(largest, f);
    if (largest > kMaxDirectRadix) {
      init_bluestein();
    } else {
      twiddles_.resize(n_);
      for (std::size_t k = 0; k < n_; ++k) twiddles_[k] = unit_root(k, n_);
    }
  }

  std::size_t size() const { return n_; }
  bool uses_bluestein() const { return static_cast<bool>(inner_); }

  /// In-place transform of exactly size() values.
  void execute(std::span<Complex> data, Direction dir) const {
    if (n_ <= 1) return;
    if (inner_) {
      bluestein(data, dir);
      return;
    }
    std::vector<Complex> out(n_);
    std::vector<Complex> scratch(factors_.empty() ? 1 : *std::max_element(factors_.begin(), factors_.end()));
    recurse(data.data(), out.data(), n_, 1, 0, dir, scratch.data());
    std::copy(out.begin(), out.end(), data.begin());
  }

 private:
  static Complex unit_root(std::size_t k, std::size_t n) {
    // exp(-2 pi i k / n), computed in long double to keep twiddles accurate.
    const long double a = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>(k) /
                          static_cast<long double>(n);
    return Complex(static_cast<Scalar>(std::cos(a)), static_cast<Scalar>(std::sin(a)));
  }

  Complex twiddle(std::size_t k, Direction dir) const {
    const Complex w = twiddles_[k % n_];
    return dir == Direction::Forward ? w : std::conj(w);
  }

  void recurse(const Complex* in, Complex* out, std::size_t n, std::size_t stride, std::size_t level,
               Direction dir, Complex* scratch) const {
    if (n == 1) {
      out[0] = in[0];
      return;
    }
    const std::size_t p = factors_[level];
    const std::size_t m = n / p;
    for (std::size_t q = 0; q < p; ++q) recurse(in + q * stride, out + q * m, m, stride * p, level + 1, dir, scratch);

    const std::size_t step = n_ / n;  // w_n^j = w_N^{j*step}
    if (p == 2) {
      for (std::size_t k = 0; k < m; ++k) {
        const Complex a = out[k];
        const Complex b = out[k + m] * twiddle(k * step, dir);
        out[k] = a + b;
        out[k + m] = a - b;
      }
      return;
    }
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t q = 0; q < p; ++q) scratch[q] = out[q * m + k] * twiddle(q * k * step, dir);
      for (std::size_t r = 0; r < p; ++r) {
        Complex acc = scratch[0];
        for (std::size_t q = 1; q < p; ++q) acc += scratch[q] * twiddle((q * r % p) * m * step, dir);
        out[k + r * m] = acc;
      }
    }
  }

  void init_bluestein() {
    std::size_t m = 1;
    while (m < 2 * n_ - 1) m <<= 1;
    inner_ = std::make_unique<Plan>(m);
    chirp_.resize(n_);
    const std::size_t two_n = 2 * n_;
    for (std::size_t k = 0; k < n_; ++k) {
      // exp(-pi i k^2 / n) with k^2 reduced mod 2n.
      const std::size_t k2 = static_cast<std::size_t>((static_cast<unsigned long long>(k) * k) % two_n);
      chirp_[k] = unit_root(k2, two_n);
    }
    kernel_.assign(m, Complex(0));
    kernel_[0] = std::conj(chirp_[0]);
    for (std::size_t k = 1; k < n_; ++k) kernel_[k] = kernel_[m - k] = std::conj(chirp_[k]);
    inner_->execute(kernel_, Direction::Forward);
  }

  void bluestein(std::span<Complex> data, Direction dir) const {
    const std::size_t m = inner_->size();
    std::vector<Complex> a(m, Complex(0));
    auto chirp = [&](std::size_t k) { return dir == Direction::Forward ? chirp_[k] : std::conj(chirp_[k]); };
    for (std::size_t k = 0; k < n_; ++k) a[k] = data[k] * chirp(k);
    inner_->execute(a, Direction::Forward);
    for (std::size_t k = 0; k < m; ++k) {
      // Kernel for the inverse direction is the conjugate chirp, whose transform is
      // the index-reversed conjugate of the forward kernel transform.
      const Complex kk = dir == Direction::Forward ? kernel_[k] : std::conj(kernel_[(m - k) % m]);
      a[k] *= kk;
    }
    inner_->execute(a, Direction::Inverse);
    const Scalar scale = Scalar(1) / static_cast<Scalar>(m);
    for (std::size_t k = 0; k < n_; ++k) data[k] = a[k] * chirp(k) * scale;
  }

  std::size_t n_;
  std::vector<std::size_t> factors_;
  std::vector<Complex> twiddles_;
  std::unique_ptr<Plan> inner_;
  std::vector<Complex> chirp_;
  std::vector<Complex> kernel_;
};

/// Unnormalised 2-D transform in place; rows index x, columns index y.
template <typename Scalar>
void transform2(Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>& data, Direction dir) {
  using Complex = std::complex<Scalar>;
  const auto nx = static_cast<std::size_t>(data.rows());
  const auto ny = static_cast<std::size_t>(data.cols());
  if (nx == 0 || ny == 0) return;
  const Plan<Scalar> px(nx);
  for (Eigen::Index j = 0; j < data.cols(); ++j) px.execute(std::span<Complex>(data.col(j).data(), nx), dir);
  const Plan<Scalar> py(ny);
  std::vector<Complex> line(ny);
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < ny; ++j) line[j] = data(i, static_cast<Eigen::Index>(j));
    py.execute(line, dir);
    for (std::size_t j = 0; j < ny; ++j) data(i, static_cast<Eigen::Index>(j)) = line[j];
  }
}

}  // namespace convint::fft
