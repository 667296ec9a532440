#pragma once

#include "convint/core.hpp"
#include "convint/quadrature.hpp"
#include "convint/solver.hpp"
#include "convint/spectral.hpp"

namespace convint {

class ConstantCovariate : public Error {
 public:
  ConstantCovariate() : Error("covariate is constant; the log-linear slope is not identifiable") {}
};

/// Spectrum of the convolution kernel beta: zero() is beta_0, coefficients are beta_k.
class BetaSpectrum : public Spectrum {
 public:
  BetaSpectrum() = default;
  explicit BetaSpectrum(Spectrum s) : Spectrum(std::move(s)) {}
};

/// beta_{k_i} = psi_i + i psi_{K+i} (unscaled); beta_0 = intercept.
BetaSpectrum coeffs_to_beta_spectrum(const CoefficientVector& coef, const FrequencyOrder& order);

/// Inverse of coeffs_to_beta_spectrum for the given standardization scales.
CoefficientVector beta_spectrum_to_coeffs(const BetaSpectrum& beta, const FrequencyOrder& order,
                                          const Eigen::VectorXd& scales);

/// {beta_k Z_k} over the support of beta, with zero term beta_0 Z_0.
Spectrum product_spectrum(const BetaSpectrum& beta, const Spectrum& covariate);

/// (beta * Z) sampled at the pixel centres of an nx x ny grid.
Grid log_intensity(const BetaSpectrum& beta, const Spectrum& covariate, Eigen::Index nx, Eigen::Index ny,
                   const Window& window);

inline constexpr double kMaxLogIntensity = 700.0;

struct Prediction {
  IntensityMap map;
  bool clamped = false;  // some log-intensity exceeded 700 and was capped
};

/// exp(beta * Z) on the grid.
Prediction predict_intensity(const BetaSpectrum& beta, const Spectrum& covariate, Eigen::Index nx, Eigen::Index ny,
                             const Window& window);
Prediction exp_clamped(const Grid& log_values);

/// beta(s) - beta_0 when include_zero is false.
Grid beta_surface(const BetaSpectrum& beta, Eigen::Index nx, Eigen::Index ny, const Window& window,
                  bool include_zero = true);

/// Zeroes pixels whose magnitude is below fraction * max |value| (display aid).
Grid threshold_surface(const Grid& surface, double fraction = 0.75);

/// log rho(s) = b0 + b1 Z(s), Z read from the pixel containing s.
struct LogLinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  bool converged = false;
};

LogLinearFit fit_loglinear_baseline(const PointPattern& pattern, const Grid& covariate, Eigen::Index nx,
                                    Eigen::Index ny, const SolverOptions& options = {});

Prediction predict_loglinear(const LogLinearFit& fit, const Grid& covariate);

}  // namespace convint
