#pragma once

#include "convint/core.hpp"
#include "convint/rng.hpp"
#include "convint/spectral.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace testing {

using convint::Complex;
using convint::Frequency;
using convint::Grid;
using convint::Point;
using convint::Spectrum;
using convint::Window;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline Grid random_grid(Eigen::Index nx, Eigen::Index ny, const Window& w, std::uint64_t seed) {
  convint::CounterRng rng(seed);
  Eigen::MatrixXd v(nx, ny);
  for (Eigen::Index j = 0; j < ny; ++j)
    for (Eigen::Index i = 0; i < nx; ++i) v(i, j) = rng.uniform(-1.0, 1.0);
  return Grid(std::move(v), w);
}

// (1/N) sum_s g(s) conj(phi_k(s)) over pixel centres, by plain summation.
inline Complex brute_coefficient(const Grid& g, int kx, int ky) {
  Complex acc = 0.0;
  for (Eigen::Index j = 0; j < g.ny(); ++j)
    for (Eigen::Index i = 0; i < g.nx(); ++i) {
      const Point s = g.pixel_center(i, j);
      const double ph = kTwoPi * (kx * s.x / g.window().width + ky * s.y / g.window().height);
      acc += g.values()(i, j) * Complex(std::cos(ph), -std::sin(ph));
    }
  return acc / static_cast<double>(g.nx() * g.ny());
}

// zero + sum_k 2 Re[c_k phi_k(s)], by plain summation.
inline double brute_evaluate(const Spectrum& s, Point p, const Window& w) {
  double v = s.zero();
  for (const auto& [k, c] : s.coefficients()) {
    const double ph = kTwoPi * (k.kx * p.x / w.width + k.ky * p.y / w.height);
    v += 2.0 * (c * Complex(std::cos(ph), std::sin(ph))).real();
  }
  return v;
}

// Random spectrum on canonical frequencies with |kx| <= mx, 0 <= ky <= my.
inline Spectrum random_spectrum(int mx, int my, std::uint64_t seed) {
  convint::CounterRng rng(seed);
  Spectrum s(rng.uniform(-1.0, 1.0));
  for (int ky = 0; ky <= my; ++ky)
    for (int kx = -mx; kx <= mx; ++kx) {
      const Frequency k{kx, ky};
      if (!k.canonical()) continue;
      s.set(k, {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
    }
  return s;
}

inline std::vector<Point> random_points(std::size_t n, const Window& w, std::uint64_t seed) {
  convint::CounterRng rng(seed);
  std::vector<Point> pts(n);
  for (auto& p : pts) p = {rng.uniform(0.0, w.width), rng.uniform(0.0, w.height)};
  return pts;
}

}  // namespace testing
