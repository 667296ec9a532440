#pragma once

#include "convint/evaluate.hpp"
#include "convint/model.hpp"
#include "convint/simulate.hpp"
#include "convint/solver.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace convint {

enum class Process { Poisson, Thomas };

Process process_from_string(const std::string& name);
std::string to_string(Process p);

/// Seed of replicate m: base + m. Shared by `simulate` and `study`.
inline Seed replicate_seed(Seed base, std::size_t m) { return base + m; }

/// Seed of the independent pattern a replicate's predictions are scored on.
Seed holdout_seed(Seed base, std::size_t m);

/// K above which the unpenalized estimator is refused.
inline constexpr std::size_t kMaxMleFrequencies = 24;

/// Estimation result of one pattern for any method.
struct ModelFit {
  FrequencyOrder order;         // frequencies actually used (degenerate ones dropped)
  std::vector<Frequency> dropped;
  PenaltyKind method = PenaltyKind::Lasso;
  std::optional<FitResult> ridge;  // stage-1 path (lasso and ridge)
  FitResult result;                // reported path; for mle a single point
  BetaSpectrum beta;               // selected model, raw scale
  bool converged = true;
};

struct FitSettings {
  PenaltyKind method = PenaltyKind::Lasso;
  Eigen::Index quad_nx = 128;
  Eigen::Index quad_ny = 96;
  std::vector<double> lambdas;  // overrides the stage-2 grid when non-empty
  SolverOptions solver;
};

/// Full estimation pipeline: quadrature, ridge pilot, adaptive stage. Frequencies
/// whose design column vanishes are dropped and the fit is rebuilt without them.
ModelFit fit_model(const PointPattern& pattern, const Spectrum& covariate, const FrequencyOrder& order,
                   const FitSettings& settings);

struct StudyConfig {
  Scenario scenario = Scenario::A;
  std::optional<BetaSpectrum> custom_beta;  // replaces the scenario when set
  Process process = Process::Poisson;
  std::vector<double> targets{200.0, 800.0, 1800.0};
  std::size_t m = 100;
  std::size_t k = 112;
  FitSettings fit;
  Seed seed = 1;
  Eigen::Index cov_nx = 1024;
  Eigen::Index cov_ny = 786;
  Eigen::Index eval_nx = 256;  // resolution of predicted maps used for AUC
  Eigen::Index eval_ny = 196;
  ThomasConfig thomas;
  bool compare_baseline = true;
  std::size_t jobs = 1;

  void validate() const;
};

struct ReplicateRecord {
  double target_n = 0.0;
  std::size_t m = 0;
  std::size_t n_points = 0;
  double intercept = 0.0;
  double psi_error = 0.0;  // Euclidean norm over the 2K raw coefficients
  double imse_contribution = 0.0;
  std::optional<double> tpr;
  std::optional<double> fpr;
  std::optional<double> auc_fit;
  std::optional<double> auc_baseline;
  bool converged = false;
  std::string error;
  BetaSpectrum beta;
};

struct LevelSummary {
  ReplicateReport report;
  double truth_intercept = 0.0;
  double median_psi_error = 0.0;
  std::optional<double> mean_auc_fit;
  std::optional<double> mean_auc_baseline;
  std::size_t failures = 0;
  double thomas_correction = 1.0;
};

struct StudyResult {
  std::vector<ReplicateRecord> replicates;  // level-major, replicate order
  std::vector<LevelSummary> levels;
};

StudyResult run_study(const StudyConfig& config, const CovariateGrid& covariate);

/// The study covariate at the configured resolution.
CovariateGrid study_covariate(const StudyConfig& config);

std::string replicates_csv(const StudyResult& result);
std::string report_csv(const StudyResult& result);
std::string levels_csv(const StudyResult& result);

/// Writes report.csv, replicates.csv and levels.csv into `dir`.
void write_study(const std::filesystem::path& dir, const StudyResult& result);

/// Number of workers: the explicit value if nonzero, else CONVINTENSITY_JOBS, else 1.
std::size_t resolve_jobs(std::size_t requested);

}  // namespace convint
