#pragma once

#include "convint/core.hpp"
#include "convint/model.hpp"
#include "convint/rng.hpp"
#include "convint/spectral.hpp"

#include <string>

namespace convint {

/// Intercept c with sum exp(grid + c) * pixelArea == target.
double calibrate_intercept(const Grid& log_intensity_no_intercept, double target);

/// Lewis-Shedler thinning of a homogeneous process at the map's maximum,
/// with the map bilinearly interpolated between pixel centres.
PointPattern simulate_poisson(const IntensityMap& map, Seed seed);

/// Keeps each point independently with probability `keep`.
PointPattern thin(const PointPattern& pattern, double keep, Seed seed);

struct ThomasConfig {
  double mean_clusters = 100.0;
  double offspring_sd = 30.0;
  double target_count = 200.0;

  void validate() const;
};

inline constexpr int kThomasPilotRuns = 50;
inline constexpr Seed kThomasPilotSeed = 0x7407ULL;

/// Inhomogeneous Thomas process as a thinned stationary Thomas process. Parents
/// fall on the window expanded by 4 offspring sd; the offspring mean carries a
/// multiplicative correction fitted once by a pilot so that E[N(W)] hits the target.
class ThomasSimulator {
 public:
  ThomasSimulator(IntensityMap map, ThomasConfig config, Seed pilot_seed = kThomasPilotSeed);

  PointPattern simulate(Seed seed) const;

  double correction() const { return correction_; }
  double analytic_correction() const { return analytic_; }
  const ThomasConfig& config() const { return config_; }

 private:
  PointPattern draw(Seed seed, double correction) const;

  IntensityMap map_;
  ThomasConfig config_;
  double rho_max_;
  double analytic_ = 1.0;
  double correction_ = 1.0;
};

/// One-shot convenience: builds the simulator (including its pilot) and draws once.
PointPattern simulate_thomas(const IntensityMap& map, const ThomasConfig& config, Seed seed);

/// Independent stream derived from (seed, stream).
Seed derive_seed(Seed seed, std::uint64_t stream);

// Simulation scenarios ------------------------------------------------------

enum class Scenario { A, B };

Scenario scenario_from_string(const std::string& name);
std::string to_string(Scenario s);

inline constexpr std::size_t kTrueFrequencies = 12;

/// beta_k over the first 12 spiral frequencies: (a) 0.3, (b) 0.3 + 0.15 i k_y; beta_0 = 0.
BetaSpectrum scenario_beta(Scenario scenario);

/// Deterministic saliency-like test image (a few bright blobs on a dark background) used as
/// the covariate of the simulation study.
CovariateGrid synthetic_covariate(Eigen::Index nx = 1024, Eigen::Index ny = 786,
                                  const Window& window = default_window());

/// The ground truth of a simulation scenario at a given expected count.
struct Truth {
  BetaSpectrum beta;       // beta_0 set by calibration
  Spectrum covariate;      // normalized spectrum of the covariate image
  IntensityMap intensity;  // exp(beta * Z) on the covariate grid
};

Truth make_truth(const BetaSpectrum& shape, const CovariateGrid& covariate, double target_count);

}  // namespace convint
