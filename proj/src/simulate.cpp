#include "convint/simulate.hpp"

#include <cmath>

namespace convint {

double calibrate_intercept(const Grid& log_intensity_no_intercept, double target) {
  if (!(target > 0.0)) throw InvalidArgument("target count must be positive");
  const auto& v = log_intensity_no_intercept.values();
  const double shift = v.maxCoeff();
  const double mass = (v.array() - shift).exp().sum() * log_intensity_no_intercept.pixel_area();
  return std::log(target / mass) - shift;
}

PointPattern simulate_poisson(const IntensityMap& map, Seed seed) {
  CounterRng rng(seed);
  const Window& w = map.window();
  const double rho_max = map.values().maxCoeff();
  const std::uint64_t candidates = rng.poisson(rho_max * w.area());
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(static_cast<double>(candidates) * map.values().mean() / rho_max * 1.2) + 8);
  for (std::uint64_t c = 0; c < candidates; ++c) {
    const Point p{rng.uniform(0.0, w.width), rng.uniform(0.0, w.height)};
    if (rng.uniform() * rho_max < map.bilinear(p.x, p.y)) pts.push_back(p);
  }
  return PointPattern(std::move(pts), w);
}

PointPattern thin(const PointPattern& pattern, double keep, Seed seed) {
  if (!(keep >= 0.0 && keep <= 1.0)) throw InvalidArgument("retention probability must lie in [0,1]");
  CounterRng rng(seed);
  std::vector<Point> pts;
  for (const auto& p : pattern.points())
    if (rng.uniform() < keep) pts.push_back(p);
  return PointPattern(std::move(pts), pattern.window());
}

void ThomasConfig::validate() const {
  if (!(mean_clusters > 0.0)) throw InvalidArgument("mean_clusters must be positive");
  if (!(offspring_sd > 0.0)) throw InvalidArgument("offspring_sd must be positive");
  if (!(target_count > 0.0)) throw InvalidArgument("target_count must be positive");
}

ThomasSimulator::ThomasSimulator(IntensityMap map, ThomasConfig config, Seed pilot_seed)
    : map_(std::move(map)), config_(config), rho_max_(map_.values().maxCoeff()) {
  config_.validate();
  // With offspring mean target/clusters, the thinned count has mean target * E / (rho_max |W|).
  analytic_ = rho_max_ * map_.window().area() / expected_count(map_);
  double total = 0.0;
  for (int r = 0; r < kThomasPilotRuns; ++r)
    total += static_cast<double>(draw(derive_seed(pilot_seed, static_cast<std::uint64_t>(r)), analytic_).size());
  const double mean = total / kThomasPilotRuns;
  correction_ = mean > 0.0 ? analytic_ * config_.target_count / mean : analytic_;
}

PointPattern ThomasSimulator::simulate(Seed seed) const { return draw(seed, correction_); }

PointPattern ThomasSimulator::draw(Seed seed, double correction) const {
  CounterRng rng(seed);
  const Window& w = map_.window();
  const double sd = config_.offspring_sd;
  const double pad = 4.0 * sd;
  const double ext_area = (w.width + 2 * pad) * (w.height + 2 * pad);
  const std::uint64_t parents = rng.poisson(config_.mean_clusters * ext_area / w.area());
  const double offspring_mean = config_.target_count / config_.mean_clusters * correction;
  std::vector<Point> pts;
  for (std::uint64_t c = 0; c < parents; ++c) {
    const double px = rng.uniform(-pad, w.width + pad);
    const double py = rng.uniform(-pad, w.height + pad);
    const std::uint64_t kids = rng.poisson(offspring_mean);
    for (std::uint64_t k = 0; k < kids; ++k) {
      const Point p{px + sd * rng.normal(), py + sd * rng.normal()};
      const double u = rng.uniform();
      if (!w.contains(p.x, p.y)) continue;
      if (u * rho_max_ < map_.bilinear(p.x, p.y)) pts.push_back(p);
    }
  }
  return PointPattern(std::move(pts), w);
}

PointPattern simulate_thomas(const IntensityMap& map, const ThomasConfig& config, Seed seed) {
  return ThomasSimulator(map, config).simulate(seed);
}

Seed derive_seed(Seed seed, std::uint64_t stream) {
  CounterRng rng(seed ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
  return rng();
}

Scenario scenario_from_string(const std::string& name) {
  if (name == "a" || name == "A") return Scenario::A;
  if (name == "b" || name == "B") return Scenario::B;
  throw InvalidArgument("unknown scenario '" + name + "' (expected a or b)");
}

std::string to_string(Scenario s) { return s == Scenario::A ? "a" : "b"; }

BetaSpectrum scenario_beta(Scenario scenario) {
  BetaSpectrum beta;
  for (const auto& k : spiral_order(kTrueFrequencies)) {
    const double im = scenario == Scenario::A ? 0.0 : 0.15 * k.ky;
    beta.set(k, {0.3, im});
  }
  return beta;
}

CovariateGrid synthetic_covariate(Eigen::Index nx, Eigen::Index ny, const Window& window) {
  // Blob centres and sizes as fractions of the window; amplitudes in image units.
  struct Blob {
    double cx, cy, sx, sy, amp;
  };
  static constexpr Blob kBlobs[] = {
      {0.39, 0.72, 0.04, 0.05, 0.95}, {0.44, 0.76, 0.07, 0.08, 0.97}, {0.43, 0.74, 0.05, 0.08, 0.55},
      {0.15, 0.48, 0.04, 0.05, 0.90}, {0.39, 0.70, 0.06, 0.09, 0.50},
  };
  constexpr double kBackground = 0.02;
  const Grid frame(Eigen::MatrixXd::Zero(nx, ny), window);
  Eigen::MatrixXd v(nx, ny);
  for (Eigen::Index j = 0; j < ny; ++j)
    for (Eigen::Index i = 0; i < nx; ++i) {
      const Point s = frame.pixel_center(i, j);
      const double u = s.x / window.width;
      const double t = s.y / window.height;
      double z = kBackground;
      for (const auto& b : kBlobs) {
        const double du = (u - b.cx) / b.sx;
        const double dt = (t - b.cy) / b.sy;
        z += b.amp * std::exp(-0.5 * (du * du + dt * dt));
      }
      v(i, j) = z;
    }
  return CovariateGrid(std::move(v), window);
}

Truth make_truth(const BetaSpectrum& shape, const CovariateGrid& covariate, double target_count) {
  Truth t;
  t.covariate = normalize_covariate(fft2(covariate));
  t.beta = shape;
  t.beta.set_zero(0.0);
  const Grid base = log_intensity(t.beta, t.covariate, covariate.nx(), covariate.ny(), covariate.window());
  t.beta.set_zero(calibrate_intercept(base, target_count));
  t.intensity = exp_clamped(Grid((base.values().array() + t.beta.zero()).matrix(), base.window())).map;
  return t;
}

}  // namespace convint
