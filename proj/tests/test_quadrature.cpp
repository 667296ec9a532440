#include "convint/quadrature.hpp"
#include "convint/simulate.hpp"
#include "convint/solver.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace convint;

namespace {

struct Setup {
  CovariateGrid cov = synthetic_covariate(256, 196);
  Truth truth = make_truth(scenario_beta(Scenario::A), cov, 400.0);
  PointPattern pattern = simulate_poisson(truth.intensity, 21);
};

const Setup& setup() {
  static const Setup s;
  return s;
}

Eigen::MatrixXd no_columns(std::span<const Point> pts) { return Eigen::MatrixXd(static_cast<Eigen::Index>(pts.size()), 0); }

}  // namespace

TEST_CASE("quadrature weights add up to the window area") {
  const Window w = default_window();
  const PointPattern p(testing::random_points(37, w, 4), w);
  for (auto [nx, ny] : {std::pair<Eigen::Index, Eigen::Index>{8, 8}, {64, 48}, {128, 96}, {100, 77}}) {
    const QuadratureScheme q = build_scheme(p, nx, ny, no_columns);
    CHECK(q.weights().sum() == doctest::Approx(w.area()).epsilon(1e-12));
    CHECK(q.data_count() == 37);
    CHECK(q.data_indicator().sum() == 37.0);
    CHECK((q.weights().array() > 0.0).all());
  }
  CHECK_THROWS_AS(build_scheme(p, 4, 96, no_columns), InvalidArgument);
}

TEST_CASE("empty pattern is flagged rather than rejected") {
  const QuadratureScheme q = build_scheme(PointPattern({}, default_window()), 16, 12, no_columns);
  CHECK(q.empty_pattern());
  CHECK(q.weights().sum() == doctest::Approx(default_window().area()));
}

TEST_CASE("intercept-only maximum likelihood is log(n / |W|)") {
  const Window w = default_window();
  const PointPattern p(testing::random_points(250, w, 12), w);
  const QuadratureScheme q = build_scheme(p, 64, 48, no_columns);
  const Fit fit = fit_mle(q);
  CHECK(fit.converged);
  CHECK(std::abs(fit.coef.intercept - std::log(250.0 / w.area())) < 1e-8);
  CHECK(std::abs(profile_intercept(q, Eigen::VectorXd(0)) - std::log(250.0 / w.area())) < 1e-12);
}

TEST_CASE("gradient agrees with central differences") {
  const Setup& s = setup();
  const QuadratureScheme q = build_scheme(s.pattern, s.truth.covariate, spiral_order(12), 32, 24);
  convint::CounterRng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd psi(q.dim());
    for (Eigen::Index j = 0; j < psi.size(); ++j) psi(j) = rng.uniform(-0.3, 0.3);
    const double b0 = std::log(400.0 / q.window().area()) + rng.uniform(-0.5, 0.5);
    const Eigen::VectorXd g = log_likelihood_gradient(q, b0, psi);
    const double h = 1e-5;
    const double fd0 = (log_likelihood(q, b0 + h, psi) - log_likelihood(q, b0 - h, psi)) / (2 * h);
    CHECK(std::abs(fd0 - g(0)) <= 1e-5 * std::max(1.0, std::abs(g(0))));
    for (Eigen::Index j = 0; j < psi.size(); ++j) {
      Eigen::VectorXd up = psi, dn = psi;
      up(j) += h;
      dn(j) -= h;
      const double fd = (log_likelihood(q, b0, up) - log_likelihood(q, b0, dn)) / (2 * h);
      CAPTURE(j);
      CHECK(std::abs(fd - g(j + 1)) <= 1e-5 * std::max(1.0, std::abs(g(j + 1))));
    }
  }
}

TEST_CASE("log-likelihood is concave along random chords") {
  const Setup& s = setup();
  const QuadratureScheme q = build_scheme(s.pattern, s.truth.covariate, spiral_order(12), 32, 24);
  convint::CounterRng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd a(q.dim()), b(q.dim());
    for (Eigen::Index j = 0; j < a.size(); ++j) {
      a(j) = rng.uniform(-0.5, 0.5);
      b(j) = rng.uniform(-0.5, 0.5);
    }
    const double a0 = rng.uniform(-8.0, -6.0), b0 = rng.uniform(-8.0, -6.0);
    const double mid = log_likelihood(q, 0.5 * (a0 + b0), 0.5 * (a + b));
    CHECK(mid >= 0.5 * (log_likelihood(q, a0, a) + log_likelihood(q, b0, b)) - 1e-9);
  }
}

TEST_CASE("spectral weighted gram matches direct accumulation") {
  const Setup& s = setup();
  for (std::size_t k : {4, 12, 24}) {
    const QuadratureScheme q = build_scheme(s.pattern, s.truth.covariate, spiral_order(k), 40, 30);
    REQUIRE(q.spectral().has_value());
    convint::CounterRng rng(k);
    Eigen::VectorXd v(q.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.uniform(0.0, 2.0);
    const Eigen::MatrixXd a = weighted_gram(q, v);
    const Eigen::MatrixXd b = weighted_gram_direct(q, v);
    CAPTURE(k);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-9 * b.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("standardized columns have unit rms over the dummy grid") {
  const Setup& s = setup();
  const QuadratureScheme q = build_scheme(s.pattern, s.truth.covariate, spiral_order(12), 64, 48);
  const Eigen::MatrixXd dummy = q.design().topRows(q.dummy_count());
  for (Eigen::Index j = 0; j < q.dim(); ++j)
    CHECK(std::sqrt(dummy.col(j).squaredNorm() / static_cast<double>(q.dummy_count())) ==
          doctest::Approx(1.0).epsilon(1e-12));
  const QuadratureScheme raw = build_scheme(s.pattern, s.truth.covariate, spiral_order(12), 64, 48, false);
  CHECK((raw.scales().array() == 1.0).all());
  for (Eigen::Index j = 0; j < q.dim(); ++j)
    CHECK((raw.design().col(j) / q.scales()(j) - q.design().col(j)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("log-likelihood at the truth is stable under grid refinement") {
  const Setup& s = setup();
  const FrequencyOrder order = spiral_order(kTrueFrequencies);
  Eigen::VectorXd psi(2 * order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Complex b = s.truth.beta.at(order[i]);
    psi(static_cast<Eigen::Index>(i)) = b.real();
    psi(static_cast<Eigen::Index>(order.size() + i)) = b.imag();
  }
  const double b0 = s.truth.beta.zero();
  const QuadratureScheme coarse = build_scheme(s.pattern, s.truth.covariate, order, 64, 48, false);
  const QuadratureScheme fine = build_scheme(s.pattern, s.truth.covariate, order, 256, 192, false);
  const double lc = log_likelihood(coarse, b0, psi);
  const double lf = log_likelihood(fine, b0, psi);
  CHECK(std::abs(lc - lf) / std::abs(lf) < 0.005);
}
