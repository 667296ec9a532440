#pragma once

#include "convint/quadrature.hpp"

#include <Eigen/Dense>

#include <limits>
#include <string>
#include <vector>

namespace convint {

class SingularDesign : public Error {
 public:
  using Error::Error;
};

class NonfiniteObjective : public Error {
 public:
  using Error::Error;
};

class AllInfiniteWeights : public Error {
 public:
  AllInfiniteWeights() : Error("every penalty weight is infinite; nothing to fit") {}
};

enum class PenaltyKind { None, Ridge, Lasso };

std::string to_string(PenaltyKind kind);
PenaltyKind penalty_kind_from_string(const std::string& name);

inline constexpr double kInfiniteWeight = std::numeric_limits<double>::infinity();

/// Per-coefficient penalty lambda * w_j * pen(psi_j), applied to the log-likelihood
/// as n(W) * lambda * sum_j w_j pen(psi_j). The intercept is never penalized and
/// coefficients with infinite weight are held at zero.
struct Penalty {
  PenaltyKind kind = PenaltyKind::None;
  Eigen::VectorXd weights;
  double lambda = 0.0;

  static Penalty none(Eigen::Index dim);
  static Penalty uniform(PenaltyKind kind, Eigen::Index dim, double lambda);
  void validate(Eigen::Index dim) const;
};

/// Intercept plus 2K coefficients on the standardized columns, with the scales
/// needed to express them on the raw covariate columns.
struct CoefficientVector {
  double intercept = 0.0;
  Eigen::VectorXd psi;
  Eigen::VectorXd scales;

  Eigen::VectorXd unscaled() const { return psi.cwiseQuotient(scales); }
  static CoefficientVector from_unscaled(double intercept, const Eigen::VectorXd& raw, const Eigen::VectorXd& scales);
};

struct SolverOptions {
  double tolerance = 1e-7;       // max |coefficient change| between outer iterations
  int max_outer_iterations = 200;
  int max_inner_sweeps = 5000;
  double inner_tolerance = 1e-13;
  Eigen::Index max_unpenalized_columns = 48;  // K <= 24
  double zero_threshold = 1e-8;               // ridge support counting
  double adaptive_floor = 1e-10;              // |ridge| below this -> infinite weight
};

struct Fit {
  CoefficientVector coef;
  double loglik = 0.0;
  double objective = 0.0;  // loglik - penalty
  bool converged = false;
  int iterations = 0;
  std::vector<double> objective_trace;
};

/// Unpenalized Poisson maximum likelihood (damped Newton).
Fit fit_mle(const QuadratureScheme& scheme, const SolverOptions& options = {});

/// Maximizes l(theta, psi) - n(W) * penalty. Newton for ridge, proximal Newton with
/// coordinate descent for lasso. `start` warm-starts the iteration.
Fit fit_penalized(const QuadratureScheme& scheme, const Penalty& penalty, const SolverOptions& options = {},
                  const CoefficientVector* start = nullptr);

/// Largest KKT violation of the penalized problem, divided by n(W).
double kkt_residual(const QuadratureScheme& scheme, const CoefficientVector& coef, const Penalty& penalty);

/// Penalized objective l - n(W) * penalty at coef.
double penalized_objective(const QuadratureScheme& scheme, const CoefficientVector& coef, const Penalty& penalty);

/// Intercept-only fit (psi = 0, intercept = log(n / |W|)).
CoefficientVector null_fit(const QuadratureScheme& scheme);

inline constexpr std::size_t kPathLength = 100;
inline constexpr double kLambdaMinRatio = 1e-4;
/// glmnet's ridge convention: lambda_max computed as for an elastic net with alpha = 1e-3.
inline constexpr double kRidgeAlpha = 1e-3;

/// Smallest lambda zeroing every coefficient: max_j |d l / d psi_j| / (n(W) w_j) at the null fit.
double lambda_max(const QuadratureScheme& scheme, const Eigen::VectorXd& weights);

/// 100 log-spaced values from lambda_max down to 1e-4 lambda_max (ridge: lambda_max / 1e-3 downwards).
std::vector<double> lambda_grid(const QuadratureScheme& scheme, const Eigen::VectorXd& weights,
                                PenaltyKind kind = PenaltyKind::Lasso);

/// -2 l + s log n(W).
double cbic(double loglik, Eigen::Index support, Eigen::Index n_points);

struct PathPoint {
  double lambda = 0.0;
  CoefficientVector coef;
  double loglik = 0.0;
  Eigen::Index support = 0;
  double cbic = 0.0;
  bool converged = false;
  int iterations = 0;
  std::string error;  // non-empty when this point failed
};

struct FitResult {
  PenaltyKind kind = PenaltyKind::Lasso;
  Eigen::VectorXd weights;
  std::vector<PathPoint> path;
  std::size_t selected = 0;

  const PathPoint& best() const { return path.at(selected); }
  bool all_converged() const;
};

/// Penalized fits along `lambdas` with warm starts; selects the CBIC minimizer.
FitResult fit_path(const QuadratureScheme& scheme, PenaltyKind kind, const Eigen::VectorXd& weights,
                   const std::vector<double>& lambdas, const SolverOptions& options = {});

struct AdaptiveFit {
  FitResult ridge;  // stage 1
  FitResult final;  // stage 2
};

/// Ridge pilot over its own grid (CBIC-selected), adaptive weights 1/|psi_R|,
/// then the requested penalty along `lambdas` (lambda_grid when empty).
AdaptiveFit fit_adaptive(const QuadratureScheme& scheme, PenaltyKind kind, const SolverOptions& options = {},
                         const std::vector<double>& lambdas = {});

/// Support size counted the way CBIC counts it for each penalty.
Eigen::Index support_size(const Eigen::VectorXd& psi, PenaltyKind kind, double zero_threshold = 1e-8);

}  // namespace convint
