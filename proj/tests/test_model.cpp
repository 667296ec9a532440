#include "convint/model.hpp"
#include "convint/simulate.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace convint;

TEST_CASE("coefficient vector and beta spectrum round-trip") {
  const FrequencyOrder order = spiral_order(24);
  convint::CounterRng rng(8);
  Eigen::VectorXd raw(48), scales(48);
  for (Eigen::Index i = 0; i < 48; ++i) {
    raw(i) = rng.uniform(-1.0, 1.0);
    scales(i) = rng.uniform(0.1, 3.0);
  }
  const CoefficientVector c = CoefficientVector::from_unscaled(-3.0, raw, scales);
  const BetaSpectrum b = coeffs_to_beta_spectrum(c, order);
  CHECK(b.zero() == -3.0);
  CHECK(b.at(order[5]).real() == doctest::Approx(raw(5)));
  CHECK(b.at(order[5]).imag() == doctest::Approx(raw(24 + 5)));
  const CoefficientVector d = beta_spectrum_to_coeffs(b, order, scales);
  CHECK((d.psi - c.psi).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(coeffs_to_beta_spectrum(c, spiral_order(12)), LengthMismatch);
}

TEST_CASE("scenario kernels") {
  const FrequencyOrder order = spiral_order(kTrueFrequencies);
  const BetaSpectrum a = scenario_beta(Scenario::A);
  const BetaSpectrum b = scenario_beta(Scenario::B);
  CHECK(a.size() == kTrueFrequencies);
  for (const Frequency& k : order) {
    CHECK(a.at(k) == Complex(0.3, 0.0));
    CHECK(b.at(k) == Complex(0.3, 0.15 * k.ky));
  }
  const CoefficientVector cb = beta_spectrum_to_coeffs(b, order, Eigen::VectorXd::Ones(24));
  const BetaSpectrum back = coeffs_to_beta_spectrum(cb, order);
  for (const Frequency& k : order) CHECK(back.at(k) == b.at(k));
  CHECK(scenario_from_string("b") == Scenario::B);
  CHECK_THROWS_AS(scenario_from_string("c"), InvalidArgument);
}

TEST_CASE("log-intensity equals direct evaluation of the convolution") {
  const Window w(16.0, 16.0);
  const Spectrum z = testing::random_spectrum(3, 3, 2);
  BetaSpectrum beta(testing::random_spectrum(2, 2, 9));
  const Grid g = log_intensity(beta, z, 16, 16, w);
  const Spectrum prod = product_spectrum(beta, z);
  for (Eigen::Index j = 0; j < 16; ++j)
    for (Eigen::Index i = 0; i < 16; ++i)
      CHECK(std::abs(g.values()(i, j) - testing::brute_evaluate(prod, g.pixel_center(i, j), w)) < 1e-10);
}

TEST_CASE("prediction basics") {
  const Window w(16.0, 12.0);
  const Spectrum z = normalize_covariate(testing::random_spectrum(3, 3, 4));
  const Prediction flat = predict_intensity(BetaSpectrum{}, z, 16, 12, w);
  CHECK(flat.map.values().isOnes(0.0));
  CHECK_FALSE(flat.clamped);

  BetaSpectrum beta(testing::random_spectrum(2, 2, 6));
  const Prediction p0 = predict_intensity(beta, z, 16, 12, w);
  beta.set_zero(beta.zero() + 1.5);
  const Prediction p1 = predict_intensity(beta, z, 16, 12, w);
  CHECK((p1.map.values().array() / p0.map.values().array() - std::exp(1.5)).abs().maxCoeff() < 1e-12);

  const Prediction big = exp_clamped(Grid(Eigen::MatrixXd::Constant(2, 2, 900.0), Window(1.0, 1.0)));
  CHECK(big.clamped);
  CHECK(std::isfinite(big.map.values()(0, 0)));
  const Prediction tiny = exp_clamped(Grid(Eigen::MatrixXd::Constant(2, 2, -2000.0), Window(1.0, 1.0)));
  CHECK((tiny.map.values().array() > 0.0).all());
}

TEST_CASE("beta surface and thresholding") {
  const Window w(8.0, 8.0);
  BetaSpectrum beta(Spectrum(2.0));
  beta.set({1, 0}, {0.5, 0.0});
  const Grid with = beta_surface(beta, 8, 8, w);
  const Grid without = beta_surface(beta, 8, 8, w, false);
  CHECK((with.values().array() - without.values().array() - 2.0).abs().maxCoeff() < 1e-12);
  CHECK(without.values().maxCoeff() == doctest::Approx(std::cos(testing::kTwoPi / 16.0)));
  const Grid t = threshold_surface(without, 0.75);
  for (Eigen::Index j = 0; j < 8; ++j)
    for (Eigen::Index i = 0; i < 8; ++i) {
      const double v = without.values()(i, j);
      CHECK(t.values()(i, j) == (std::abs(v) >= 0.75 * without.values().cwiseAbs().maxCoeff() ? v : 0.0));
    }
}

TEST_CASE("log-linear baseline recovers its own model") {
  const Window w = default_window();
  Eigen::MatrixXd zv(64, 48);
  for (Eigen::Index j = 0; j < 48; ++j)
    for (Eigen::Index i = 0; i < 64; ++i) zv(i, j) = static_cast<double>(i) / 63.0;
  const Grid z(zv, w);
  const double b1 = 2.0;
  const double b0 = std::log(3000.0 / w.area()) - 0.87;
  const IntensityMap truth((b0 + b1 * zv.array()).exp().matrix(), w);
  const PointPattern p = simulate_poisson(truth, 17);
  const LogLinearFit fit = fit_loglinear_baseline(p, z, 64, 48);
  CHECK(fit.converged);
  CHECK(std::abs(fit.slope - b1) < 0.25);
  const Prediction pred = predict_loglinear(fit, z);
  CHECK(expected_count(pred.map) == doctest::Approx(static_cast<double>(p.size())).epsilon(1e-6));
  CHECK_THROWS_AS(fit_loglinear_baseline(p, Grid(Eigen::MatrixXd::Ones(8, 8), w), 16, 12), ConstantCovariate);
  CHECK_THROWS_AS(fit_loglinear_baseline(p, Grid(zv, Window(10.0, 10.0)), 16, 12), InvalidArgument);
}
