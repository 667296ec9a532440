#pragma once

#include "convint/core.hpp"
#include "convint/model.hpp"
#include "convint/spectral.hpp"

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace convint {

class EmptyTruth : public Error {
 public:
  EmptyTruth() : Error("true support is empty; TPR is undefined") {}
};

/// (1/M) sum_m (truth - estimate_m)^2.
double mse_intercept(std::span<const double> estimates, double truth);

/// Integrated squared error of the beta surface without beta_0, averaged over replicates:
/// sum_i 2 * mean_m |beta_hat_i - beta_i|^2 over the first K frequencies of `order`.
/// The factor 2 counts each conjugate pair, so this equals the mean over the unit
/// window of (beta_hat(s) - beta(s))^2.
double imse(std::span<const BetaSpectrum> estimates, const BetaSpectrum& truth, const FrequencyOrder& order);

/// Multiplicity applied to each canonical frequency in imse.
inline constexpr double kImsePairMultiplicity = 2.0;

struct Rates {
  std::optional<double> tpr;  // missing when the true support is empty
  std::optional<double> fpr;  // missing when every coefficient is truly nonzero
};

/// Support recovery over coefficient indices 0..dim-1.
Rates tpr_fpr(const std::set<Eigen::Index>& selected, const std::set<Eigen::Index>& truth, Eigen::Index dim);

/// Indices of the nonzero entries.
std::set<Eigen::Index> support_of(const Eigen::VectorXd& coefficients);

/// Area under the pixel-level ROC curve: x = fraction of window area with predicted
/// intensity above a threshold, y = fraction of points falling in those pixels.
double auc(const IntensityMap& map, const PointPattern& pattern);

/// One row of the replicated-study report.
struct ReplicateReport {
  std::string scenario;
  std::string process;
  std::string method;
  std::size_t k = 0;
  double target_n = 0.0;
  std::size_t m = 0;
  double mse = 0.0;
  double imse = 0.0;
  std::optional<double> tpr;
  std::optional<double> fpr;

  double log_mse() const;
  double log_imse() const;
};

std::string report_csv_header();
std::string report_csv_row(const ReplicateReport& r);

}  // namespace convint
