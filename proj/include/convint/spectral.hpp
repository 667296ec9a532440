#pragma once

#include "convint/core.hpp"

#include <Eigen/Dense>

#include <complex>
#include <compare>
#include <map>
#include <span>
#include <vector>

namespace convint {

using Complex = std::complex<double>;

class ZeroMeanCovariate : public Error {
 public:
  ZeroMeanCovariate() : Error("covariate has zero mean; the log-convolution intercept is not identifiable") {}
};

class DegenerateColumn : public Error {
 public:
  explicit DegenerateColumn(Eigen::Index column)
      : Error("design column " + std::to_string(column) + " is identically zero"), column_(column) {}
  Eigen::Index column() const { return column_; }

 private:
  Eigen::Index column_;
};

class GridTooSmall : public Error {
 public:
  using Error::Error;
};

/// Integer frequency in cycles per window.
struct Frequency {
  int kx = 0;
  int ky = 0;

  /// One representative of each {k, -k} pair: ky > 0, or ky == 0 and kx > 0.
  bool canonical() const { return ky > 0 || (ky == 0 && kx > 0); }
  bool is_zero() const { return kx == 0 && ky == 0; }
  Frequency negated() const { return {-kx, -ky}; }
  int max_norm() const { return std::max(std::abs(kx), std::abs(ky)); }

  auto operator<=>(const Frequency&) const = default;
};

/// Fourier basis function exp(2 pi i (kx x / w + ky y / h)).
Complex basis(Frequency k, Point s, const Window& window);

/// Hermitian spectrum of a real function on the window, stored as one coefficient
/// per {k, -k} pair. The represented function is
///   f(s) = zero + sum_k 2 Re[c_k phi_k(s)].
class Spectrum {
 public:
  Spectrum() = default;
  explicit Spectrum(double zero) : zero_(zero) {}

  double zero() const { return zero_; }
  void set_zero(double z) { zero_ = z; }

  /// Coefficient at k; non-canonical k returns the conjugate of its partner, absent k gives 0.
  Complex at(Frequency k) const;
  /// Stores c at k (canonicalising, so set({-1,0}, c) stores conj(c) at (1,0)).
  void set(Frequency k, Complex c);

  const std::map<Frequency, Complex>& coefficients() const { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }
  int max_norm() const;

  Spectrum scaled(Complex factor) const;

  /// Pointwise evaluation of the represented real function.
  double evaluate(Point s, const Window& window) const;

 private:
  double zero_ = 0.0;
  std::map<Frequency, Complex> coeffs_;
};

/// Spiral enumeration of canonical frequencies, ring by ring in max-norm.
class FrequencyOrder {
 public:
  FrequencyOrder() = default;
  /// Throws InvalidArgument on duplicates, non-canonical or zero frequencies.
  explicit FrequencyOrder(std::vector<Frequency> freqs);

  std::size_t size() const { return freqs_.size(); }
  const Frequency& operator[](std::size_t i) const { return freqs_[i]; }
  const std::vector<Frequency>& frequencies() const { return freqs_; }
  auto begin() const { return freqs_.begin(); }
  auto end() const { return freqs_.end(); }
  int max_norm() const;

  /// Index of k in the order, or -1.
  int index_of(Frequency k) const;

 private:
  std::vector<Frequency> freqs_;
};

/// First K canonical frequencies in spiral order. Ring t holds 4t canonical
/// frequencies, visited counter-clockwise from (t, 0); so the first 2t(t+1)
/// entries are exactly the rings 1..t.
FrequencyOrder spiral_order(std::size_t count);

/// Number of canonical frequencies with max-norm <= t.
constexpr std::size_t ring_prefix(int t) { return static_cast<std::size_t>(2 * t * (t + 1)); }

/// The K values of the simulation study: 12, 18, 24, ..., 112.
std::vector<std::size_t> study_k_values();

/// Unnormalised-phase dense DFT divided by nx*ny: D(a,b) = mean of Z(i,j) exp(-2 pi i (ai/nx + bj/ny)).
Eigen::MatrixXcd dense_fft2(const Grid& grid);

/// Normalised Fourier coefficients c_k = mean over pixel centres of Z(s) conj(phi_k(s)).
/// Self-conjugate bins (Nyquist corners) are halved so the 2 Re[.] reconstruction is exact.
Spectrum fft2(const Grid& grid);

/// Samples the represented function at pixel centres of an nx x ny grid.
/// Throws GridTooSmall when a stored frequency would alias (|kx| > nx/2 or |ky| > ny/2).
Grid ifft2(const Spectrum& spectrum, Eigen::Index nx, Eigen::Index ny, const Window& window);

/// Divides by the zero coefficient so that it becomes exactly 1.
Spectrum normalize_covariate(const Spectrum& spectrum);
inline constexpr double kZeroMeanTolerance = 1e-12;

/// Keeps only the frequencies of the order.
Spectrum restrict_to(const Spectrum& spectrum, const FrequencyOrder& order);

/// Real covariate vector for the truncated log-linear model at s:
/// entry i = 2 Re[Z_i phi_i(s)], entry K+i = -2 Im[Z_i phi_i(s)].
Eigen::VectorXd design_row(const Spectrum& covariate, const FrequencyOrder& order, Point s, const Window& window);

/// design_row for many locations at once (rows = locations).
Eigen::MatrixXd design_matrix(const Spectrum& covariate, const FrequencyOrder& order, std::span<const Point> locations,
                              const Window& window);

inline constexpr double kDegenerateColumnRms = 1e-12;

/// Root-mean-square of each column. Throws DegenerateColumn if one falls below 1e-12.
Eigen::VectorXd column_rms(const Eigen::MatrixXd& rows);

struct Standardized {
  Eigen::MatrixXd rows;
  Eigen::VectorXd scales;
};

/// Divides every column by its RMS so each has unit root-mean-square.
Standardized standardize_columns(const Eigen::MatrixXd& rows);

/// Coefficients on the standardized columns -> coefficients on the raw columns, and back.
inline Eigen::VectorXd unscale(const Eigen::VectorXd& scaled, const Eigen::VectorXd& scales) {
  return scaled.cwiseQuotient(scales);
}
inline Eigen::VectorXd scale(const Eigen::VectorXd& raw, const Eigen::VectorXd& scales) {
  return raw.cwiseProduct(scales);
}

}  // namespace convint
