#include "convint/quadrature.hpp"
#include "convint/simulate.hpp"
#include "convint/solver.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace convint;

namespace {

struct Instance {
  CovariateGrid cov = synthetic_covariate(256, 196);
  Truth truth = make_truth(scenario_beta(Scenario::A), cov, 800.0);
  PointPattern pattern = simulate_poisson(truth.intensity, 3);
  QuadratureScheme scheme = build_scheme(pattern, truth.covariate, spiral_order(12), 64, 48);
};

const Instance& instance() {
  static const Instance s;
  return s;
}

}  // namespace

TEST_CASE("penalty names") {
  CHECK(penalty_kind_from_string("lasso") == PenaltyKind::Lasso);
  CHECK(to_string(PenaltyKind::Ridge) == "ridge");
  CHECK_THROWS_AS(penalty_kind_from_string("elastic"), InvalidArgument);
}

TEST_CASE("cbic arithmetic") {
  CHECK(cbic(-100.0, 3, 632) == doctest::Approx(219.3467).epsilon(1e-6));
  CHECK(cbic(-10.0, 0, 1) == 20.0);
  CHECK_THROWS_AS(cbic(0.0, 1, 0), InvalidArgument);
}

TEST_CASE("maximum likelihood is a stationary point and beats the truth") {
  const Instance& s = instance();
  const Fit mle = fit_mle(s.scheme);
  REQUIRE(mle.converged);
  CHECK(kkt_residual(s.scheme, mle.coef, Penalty::none(s.scheme.dim())) < 1e-8);
  const CoefficientVector null = null_fit(s.scheme);
  CHECK(mle.loglik > log_likelihood(s.scheme, null.intercept, null.psi));
  for (std::size_t i = 1; i < mle.objective_trace.size(); ++i)
    CHECK(mle.objective_trace[i] >= mle.objective_trace[i - 1] - 1e-12 * std::abs(mle.objective_trace[i - 1]));
}

TEST_CASE("lasso at lambda zero reproduces maximum likelihood") {
  const Instance& s = instance();
  const Fit mle = fit_mle(s.scheme);
  const Fit l0 = fit_penalized(s.scheme, Penalty::uniform(PenaltyKind::Lasso, s.scheme.dim(), 0.0));
  REQUIRE(l0.converged);
  CHECK(std::abs(l0.coef.intercept - mle.coef.intercept) < 1e-6);
  CHECK((l0.coef.psi - mle.coef.psi).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("lambda max zeroes every coefficient and the grid below it does not") {
  const Instance& s = instance();
  const Eigen::VectorXd w = Eigen::VectorXd::Ones(s.scheme.dim());
  const auto grid = lambda_grid(s.scheme, w);
  REQUIRE(grid.size() == kPathLength);
  CHECK(grid.back() == doctest::Approx(grid.front() * kLambdaMinRatio).epsilon(1e-12));
  for (std::size_t k = 1; k < grid.size(); ++k) CHECK(grid[k] / grid[k - 1] == doctest::Approx(std::pow(1e-4, 1.0 / 99)));

  for (double factor : {1.0, 1.5, 10.0}) {
    const Fit f = fit_penalized(s.scheme, Penalty::uniform(PenaltyKind::Lasso, s.scheme.dim(), factor * grid.front()));
    CHECK(f.coef.psi.isZero(0.0));
    CHECK(f.coef.intercept == doctest::Approx(std::log(s.pattern.size() / s.scheme.window().area())).epsilon(1e-10));
  }
  const Fit next = fit_penalized(s.scheme, Penalty::uniform(PenaltyKind::Lasso, s.scheme.dim(), grid[1]));
  CHECK((next.coef.psi.array() != 0.0).count() >= 1);
  CHECK(lambda_grid(s.scheme, w, PenaltyKind::Ridge).front() == doctest::Approx(grid.front() / kRidgeAlpha));
}

TEST_CASE("infinite weights pin coefficients at zero") {
  const Instance& s = instance();
  Eigen::VectorXd w = Eigen::VectorXd::Ones(s.scheme.dim());
  w(0) = w(5) = kInfiniteWeight;
  Penalty pen{PenaltyKind::Lasso, w, 1e-6};
  const Fit f = fit_penalized(s.scheme, pen);
  CHECK(f.coef.psi(0) == 0.0);
  CHECK(f.coef.psi(5) == 0.0);
  CHECK_THROWS_AS(lambda_max(s.scheme, Eigen::VectorXd::Constant(s.scheme.dim(), kInfiniteWeight)), AllInfiniteWeights);
}

TEST_CASE("adaptive lasso path satisfies KKT at every point") {
  const Instance& s = instance();
  const AdaptiveFit fit = fit_adaptive(s.scheme, PenaltyKind::Lasso);
  REQUIRE(fit.final.path.size() == kPathLength);
  CHECK(fit.final.all_converged());
  for (const PathPoint& pt : fit.final.path) {
    const Penalty pen{PenaltyKind::Lasso, fit.final.weights, pt.lambda};
    CAPTURE(pt.lambda);
    CHECK(kkt_residual(s.scheme, pt.coef, pen) <= 1e-6);
  }
  CHECK(fit.final.path.front().coef.psi.isZero(0.0));
  // CBIC selects the minimizer
  for (const PathPoint& pt : fit.final.path) CHECK(fit.final.best().cbic <= pt.cbic);
  // the 12 true frequencies sit in the first 24 coefficients' real parts
  const Eigen::VectorXd psi = fit.final.best().coef.psi;
  CHECK((psi.head(12).array() != 0.0).count() >= 10);
}

TEST_CASE("ridge path keeps every coefficient and shrinks monotonically") {
  const Instance& s = instance();
  const Eigen::VectorXd w = Eigen::VectorXd::Ones(s.scheme.dim());
  const auto grid = lambda_grid(s.scheme, w, PenaltyKind::Ridge);
  const FitResult path = fit_path(s.scheme, PenaltyKind::Ridge, w, grid);
  double prev = 0.0;
  for (const PathPoint& pt : path.path) {
    CHECK((pt.coef.psi.array() != 0.0).all());
    CHECK(kkt_residual(s.scheme, pt.coef, Penalty{PenaltyKind::Ridge, w, pt.lambda}) <= 1e-6);
    const double norm = pt.coef.psi.norm();
    CHECK(norm >= prev * (1.0 - 1e-9));
    prev = norm;
  }
  const AdaptiveFit ad = fit_adaptive(s.scheme, PenaltyKind::Ridge);
  CHECK((ad.final.best().coef.psi.array() != 0.0).count() == ad.final.best().support);
}

TEST_CASE("standardization does not change the fitted intensity") {
  const Instance& s = instance();
  const QuadratureScheme raw = build_scheme(s.pattern, s.truth.covariate, spiral_order(4), 64, 48, false);
  const QuadratureScheme std_ = build_scheme(s.pattern, s.truth.covariate, spiral_order(4), 64, 48, true);
  const Fit a = fit_mle(raw);
  const Fit b = fit_mle(std_);
  CHECK(std::abs(a.coef.intercept - b.coef.intercept) < 1e-8);
  CHECK((a.coef.unscaled() - b.coef.unscaled()).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(a.loglik == doctest::Approx(b.loglik).epsilon(1e-12));
}

TEST_CASE("unpenalized fits refuse wide or singular designs") {
  const Instance& s = instance();
  const QuadratureScheme wide = build_scheme(s.pattern, s.truth.covariate, spiral_order(40), 64, 48);
  CHECK_THROWS_AS(fit_mle(wide), InvalidArgument);
  const QuadratureScheme dup = build_scheme(s.pattern, 32, 24, [](std::span<const Point> pts) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(pts.size()), 2);
    for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, 0) = x(i, 1) = pts[static_cast<std::size_t>(i)].x / 1024.0;
    return x;
  });
  CHECK_THROWS_AS(fit_mle(dup), SingularDesign);
}

TEST_CASE("empty pattern gives an unconverged fit instead of throwing") {
  const Instance& s = instance();
  const QuadratureScheme q =
      build_scheme(PointPattern({}, default_window()), s.truth.covariate, spiral_order(4), 32, 24);
  Fit f;
  CHECK_NOTHROW(f = fit_mle(q));
  CHECK_FALSE(f.converged);
}
