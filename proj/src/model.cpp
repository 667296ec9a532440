#include "convint/model.hpp"

#include <cmath>

namespace convint {

BetaSpectrum coeffs_to_beta_spectrum(const CoefficientVector& coef, const FrequencyOrder& order) {
  const auto K = static_cast<Eigen::Index>(order.size());
  if (coef.psi.size() != 2 * K || coef.scales.size() != 2 * K)
    throw LengthMismatch("coefficient vector has " + std::to_string(coef.psi.size()) + " entries, expected " +
                         std::to_string(2 * K));
  const Eigen::VectorXd raw = coef.unscaled();
  BetaSpectrum beta;
  beta.set_zero(coef.intercept);
  for (Eigen::Index i = 0; i < K; ++i) beta.set(order[static_cast<std::size_t>(i)], {raw(i), raw(K + i)});
  return beta;
}

CoefficientVector beta_spectrum_to_coeffs(const BetaSpectrum& beta, const FrequencyOrder& order,
                                          const Eigen::VectorXd& scales) {
  const auto K = static_cast<Eigen::Index>(order.size());
  if (scales.size() != 2 * K) throw LengthMismatch("scales do not match the frequency order");
  Eigen::VectorXd raw(2 * K);
  for (Eigen::Index i = 0; i < K; ++i) {
    const Complex b = beta.at(order[static_cast<std::size_t>(i)]);
    raw(i) = b.real();
    raw(K + i) = b.imag();
  }
  return CoefficientVector::from_unscaled(beta.zero(), raw, scales);
}

Spectrum product_spectrum(const BetaSpectrum& beta, const Spectrum& covariate) {
  Spectrum out(beta.zero() * covariate.zero());
  for (const auto& [k, b] : beta.coefficients()) out.set(k, b * covariate.at(k));
  return out;
}

Grid log_intensity(const BetaSpectrum& beta, const Spectrum& covariate, Eigen::Index nx, Eigen::Index ny,
                   const Window& window) {
  return ifft2(product_spectrum(beta, covariate), nx, ny, window);
}

Prediction exp_clamped(const Grid& log_values) {
  const bool clamped = (log_values.values().array() > kMaxLogIntensity).any();
  Eigen::MatrixXd v = log_values.values().array().min(kMaxLogIntensity).exp().matrix();
  // exp underflow would violate positivity.
  v = v.cwiseMax(std::numeric_limits<double>::min());
  return {IntensityMap(std::move(v), log_values.window()), clamped};
}

Prediction predict_intensity(const BetaSpectrum& beta, const Spectrum& covariate, Eigen::Index nx, Eigen::Index ny,
                             const Window& window) {
  return exp_clamped(log_intensity(beta, covariate, nx, ny, window));
}

Grid beta_surface(const BetaSpectrum& beta, Eigen::Index nx, Eigen::Index ny, const Window& window,
                  bool include_zero) {
  Spectrum s = beta;
  if (!include_zero) s.set_zero(0.0);
  return ifft2(s, nx, ny, window);
}

Grid threshold_surface(const Grid& surface, double fraction) {
  const double cut = fraction * surface.values().cwiseAbs().maxCoeff();
  Eigen::MatrixXd v = (surface.values().array().abs() >= cut).select(surface.values(), 0.0);
  return Grid(std::move(v), surface.window());
}

LogLinearFit fit_loglinear_baseline(const PointPattern& pattern, const Grid& covariate, Eigen::Index nx,
                                    Eigen::Index ny, const SolverOptions& options) {
  if (covariate.values().maxCoeff() == covariate.values().minCoeff()) throw ConstantCovariate();
  if (!(covariate.window() == pattern.window())) throw InvalidArgument("covariate and pattern windows differ");
  auto column = [&](std::span<const Point> locs) {
    Eigen::MatrixXd z(static_cast<Eigen::Index>(locs.size()), 1);
    for (std::size_t i = 0; i < locs.size(); ++i) z(static_cast<Eigen::Index>(i), 0) = covariate.at(locs[i].x, locs[i].y);
    return z;
  };
  // Standardized so the Newton system is well scaled; the slope is reported on the raw covariate.
  const QuadratureScheme scheme = build_scheme(pattern, nx, ny, column, true);
  const Fit fit = fit_mle(scheme, options);
  return {fit.coef.intercept, fit.coef.unscaled()(0), fit.converged};
}

Prediction predict_loglinear(const LogLinearFit& fit, const Grid& covariate) {
  Eigen::MatrixXd eta = (fit.intercept + fit.slope * covariate.values().array()).matrix();
  return exp_clamped(Grid(std::move(eta), covariate.window()));
}

}  // namespace convint
