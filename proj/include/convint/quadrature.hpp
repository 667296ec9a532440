#pragma once

#include "convint/core.hpp"
#include "convint/spectral.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace convint {

/// Fourier layout of the design columns, kept so weighted Gram matrices can be
/// assembled from a handful of Fourier sums instead of an O(n p^2) product.
/// Column c equals (2 / scale_c) Re[gamma_c phi_{k_c}(s)].
struct SpectralColumns {
  std::vector<Frequency> freq;
  std::vector<Complex> gamma;
  int max_norm = 0;
  // phase tables: dummy_x(q + 2m, i) = phi along x at pixel column i for q in [-2m, 2m]
  Eigen::MatrixXcd dummy_x;
  Eigen::MatrixXcd dummy_y;  // q in [0, 2m]
  Eigen::MatrixXcd data_x;   // (4m+1) x n_data
  Eigen::MatrixXcd data_y;   // (2m+1) x n_data
};

/// Berman-Turner quadrature for the Poisson log-likelihood: dummy points at the
/// pixel centres of an nx x ny grid followed by the data points, each with a
/// counting weight and a design row.
class QuadratureScheme {
 public:
  const Window& window() const { return window_; }
  Eigen::Index grid_nx() const { return nx_; }
  Eigen::Index grid_ny() const { return ny_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(locations_.size()); }
  Eigen::Index dummy_count() const { return nx_ * ny_; }
  Eigen::Index data_count() const { return size() - dummy_count(); }
  /// Number of columns (excluding the implied intercept).
  Eigen::Index dim() const { return design_.cols(); }

  const std::vector<Point>& locations() const { return locations_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  /// 1 on data points, 0 on dummies.
  const Eigen::VectorXd& data_indicator() const { return indicator_; }
  bool is_data(Eigen::Index i) const { return i >= dummy_count(); }
  const Eigen::MatrixXd& design() const { return design_; }
  /// RMS of each raw column over the dummy grid; all ones when not standardized.
  const Eigen::VectorXd& scales() const { return scales_; }
  bool empty_pattern() const { return data_count() == 0; }
  const std::optional<SpectralColumns>& spectral() const { return spectral_; }

 private:
  friend struct SchemeBuilder;

  Window window_;
  Eigen::Index nx_ = 0;
  Eigen::Index ny_ = 0;
  std::vector<Point> locations_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd indicator_;
  Eigen::MatrixXd design_;
  Eigen::VectorXd scales_;
  std::optional<SpectralColumns> spectral_;
};

inline constexpr Eigen::Index kMinQuadratureGrid = 8;

/// Scheme for the truncated log-convolution model with the given covariate spectrum
/// (normalized) and frequency order. Columns are standardized over the dummy grid
/// unless standardize is false.
QuadratureScheme build_scheme(const PointPattern& pattern, const Spectrum& covariate, const FrequencyOrder& order,
                              Eigen::Index nx, Eigen::Index ny, bool standardize = true);

/// Scheme with arbitrary columns produced by `columns(locations)`.
QuadratureScheme build_scheme(const PointPattern& pattern, Eigen::Index nx, Eigen::Index ny,
                              const std::function<Eigen::MatrixXd(std::span<const Point>)>& columns,
                              bool standardize = false);

/// Linear predictor intercept + X psi at every quadrature location.
Eigen::VectorXd linear_predictor(const QuadratureScheme& scheme, double intercept, const Eigen::VectorXd& psi);

/// l(theta, psi) = sum_data eta - sum_all w exp(eta).
double log_likelihood(const QuadratureScheme& scheme, double intercept, const Eigen::VectorXd& psi);
double log_likelihood_from_eta(const QuadratureScheme& scheme, const Eigen::VectorXd& eta);

/// Gradient with respect to (intercept, psi); entry 0 is the intercept.
Eigen::VectorXd log_likelihood_gradient(const QuadratureScheme& scheme, double intercept, const Eigen::VectorXd& psi);
Eigen::VectorXd gradient_from_eta(const QuadratureScheme& scheme, const Eigen::VectorXd& eta);

/// sum_i v_i x~_i x~_i^T with x~ = (1, design row). Uses the Fourier layout when available.
Eigen::MatrixXd weighted_gram(const QuadratureScheme& scheme, const Eigen::VectorXd& v);
/// Same quantity by direct accumulation over rows.
Eigen::MatrixXd weighted_gram_direct(const QuadratureScheme& scheme, const Eigen::VectorXd& v);

/// Intercept maximizing l for fixed psi: log(n / sum w exp(X psi)).
double profile_intercept(const QuadratureScheme& scheme, const Eigen::VectorXd& psi);

/// Debug dump: x,y,weight,is_data,z1..zp.
void write_scheme_csv(const std::filesystem::path& path, const QuadratureScheme& scheme);

}  // namespace convint
