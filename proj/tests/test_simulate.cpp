#include "convint/simulate.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace convint;

namespace {

IntensityMap smooth_map(double total) {
  const Window w = default_window();
  Eigen::MatrixXd v(64, 48);
  for (Eigen::Index j = 0; j < 48; ++j)
    for (Eigen::Index i = 0; i < 64; ++i) v(i, j) = std::exp(1.5 * std::sin(i / 10.0) + 0.02 * j);
  IntensityMap m(v, w);
  return m.scaled(total / expected_count(m));
}

// Mass of the bilinearly interpolated map over each of nx x ny equal cells, by midpoint rule.
Eigen::MatrixXd cell_masses(const IntensityMap& m, int nx, int ny, int sub = 64) {
  const Window& w = m.window();
  const double cw = w.width / nx, ch = w.height / ny;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(nx, ny);
  for (int cj = 0; cj < ny; ++cj)
    for (int ci = 0; ci < nx; ++ci) {
      double acc = 0.0;
      for (int b = 0; b < sub; ++b)
        for (int a = 0; a < sub; ++a) acc += m.bilinear((ci + (a + 0.5) / sub) * cw, (cj + (b + 0.5) / sub) * ch);
      out(ci, cj) = acc * cw * ch / (sub * sub);
    }
  return out;
}

}  // namespace

TEST_CASE("intercept calibration") {
  const Grid zero(Eigen::MatrixXd::Zero(32, 24), default_window());
  CHECK(calibrate_intercept(zero, 200.0) == doctest::Approx(-8.3007).epsilon(1e-4));
  const Grid shifted(Eigen::MatrixXd::Ones(32, 24), default_window());
  CHECK(calibrate_intercept(shifted, 200.0) == doctest::Approx(calibrate_intercept(zero, 200.0) - 1.0));
  const Grid g = testing::random_grid(20, 10, default_window(), 6);
  const double c = calibrate_intercept(g, 1234.0);
  CHECK((g.values().array() + c).exp().sum() * g.pixel_area() == doctest::Approx(1234.0).epsilon(1e-12));
  CHECK_THROWS_AS(calibrate_intercept(g, 0.0), InvalidArgument);
}

TEST_CASE("poisson counts have the right mean and variance") {
  const IntensityMap m = smooth_map(200.0);
  const double target = cell_masses(m, 1, 1, 512)(0, 0);
  const int runs = 500;
  double s = 0.0, s2 = 0.0;
  for (int r = 0; r < runs; ++r) {
    const double n = static_cast<double>(simulate_poisson(m, static_cast<Seed>(r)).size());
    s += n;
    s2 += n * n;
  }
  const double mean = s / runs, var = s2 / runs - mean * mean;
  CHECK(std::abs(mean - target) < 4.0 * std::sqrt(target / runs));
  CHECK(var == doctest::Approx(target).epsilon(0.2));

  const IntensityMap m2 = m.scaled(2.0);
  double s_double = 0.0;
  for (int r = 0; r < runs; ++r) s_double += static_cast<double>(simulate_poisson(m2, static_cast<Seed>(r + 1000)).size());
  CHECK(std::abs(s_double / runs - 2.0 * target) < 4.0 * std::sqrt(2.0 * target / runs));
}

TEST_CASE("poisson points follow the intensity") {
  const IntensityMap m = smooth_map(20000.0);
  const Eigen::MatrixXd expect = cell_masses(m, 8, 6);
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(8, 6);
  const PointPattern p = simulate_poisson(m, 99);
  const Window& w = m.window();
  for (const Point& q : p.points())
    counts(std::min(7, static_cast<int>(q.x / w.width * 8)), std::min(5, static_cast<int>(q.y / w.height * 6))) += 1;
  const double chi2 = ((counts - expect).array().square() / expect.array()).sum();
  // 48 cells, 47 dof; the 0.999 quantile is about 82.7
  CHECK(chi2 < 82.7);
}

TEST_CASE("simulation is deterministic in the seed") {
  const IntensityMap m = smooth_map(300.0);
  CHECK(simulate_poisson(m, 5).points() == simulate_poisson(m, 5).points());
  CHECK(simulate_poisson(m, 5).points() != simulate_poisson(m, 6).points());
  CHECK(derive_seed(5, 1) != derive_seed(5, 2));
  CHECK(derive_seed(5, 1) == derive_seed(5, 1));
}

TEST_CASE("independent thinning") {
  const Window w = default_window();
  const PointPattern p(testing::random_points(10000, w, 1), w);
  const PointPattern q = thin(p, 0.3, 2);
  CHECK(std::abs(static_cast<double>(q.size()) - 3000.0) < 4.0 * std::sqrt(10000 * 0.3 * 0.7));
  CHECK(thin(p, 1.0, 3).size() == p.size());
  CHECK(thin(p, 0.0, 3).empty());
  CHECK_THROWS_AS(thin(p, 1.5, 3), InvalidArgument);
}

TEST_CASE("thomas process hits the target count and is overdispersed") {
  const IntensityMap m = smooth_map(1.0);
  const ThomasSimulator sim(m, ThomasConfig{100.0, 30.0, 400.0});
  CHECK(sim.correction() > 0.0);
  const int runs = 200;
  double s = 0.0, s2 = 0.0;
  for (int r = 0; r < runs; ++r) {
    const double n = static_cast<double>(sim.simulate(derive_seed(777, static_cast<std::uint64_t>(r))).size());
    s += n;
    s2 += n * n;
  }
  const double mean = s / runs, var = s2 / runs - mean * mean;
  CHECK(mean == doctest::Approx(400.0).epsilon(0.1));
  CHECK(var > 2.0 * mean);
  CHECK(sim.simulate(4).points() == sim.simulate(4).points());
  CHECK_THROWS_AS(ThomasSimulator(m, ThomasConfig{0.0, 30.0, 400.0}), InvalidArgument);
}

TEST_CASE("thomas with huge offspring spread looks like poisson") {
  // Offspring scattered far beyond the window: counts lose their cluster structure.
  const IntensityMap m = smooth_map(1.0);
  const ThomasSimulator sim(m, ThomasConfig{1000.0, 1500.0, 300.0});
  const int runs = 200;
  double s = 0.0, s2 = 0.0;
  for (int r = 0; r < runs; ++r) {
    const double n = static_cast<double>(sim.simulate(static_cast<Seed>(r)).size());
    s += n;
    s2 += n * n;
  }
  const double mean = s / runs, var = s2 / runs - mean * mean;
  CHECK(mean == doctest::Approx(300.0).epsilon(0.1));
  CHECK(var / mean < 1.5);
}

TEST_CASE("synthetic covariate and truth") {
  const CovariateGrid z = synthetic_covariate(128, 98);
  CHECK(z.values().minCoeff() >= 0.02);
  CHECK(z.values().maxCoeff() > 1.0);
  const Truth t = make_truth(scenario_beta(Scenario::A), z, 800.0);
  CHECK(expected_count(t.intensity) == doctest::Approx(800.0).epsilon(1e-10));
  CHECK(t.covariate.zero() == doctest::Approx(1.0));
  for (const Frequency& k : spiral_order(kTrueFrequencies)) CHECK(std::abs(t.covariate.at(k)) > 0.2);
}
