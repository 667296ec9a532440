#include "convint/spectral.hpp"

#include "convint/fft.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace convint {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int signed_index(Eigen::Index a, Eigen::Index n) {
  return static_cast<int>(2 * a <= n ? a : a - n);
}

Eigen::Index bin_index(int k, Eigen::Index n) {
  const auto r = static_cast<Eigen::Index>(k) % n;
  return r < 0 ? r + n : r;
}

// exp(i pi (kx/nx + ky/ny)): the half-pixel shift between DFT bins and pixel centres.
Complex centre_phase(Frequency k, Eigen::Index nx, Eigen::Index ny) {
  return std::polar(1.0, std::numbers::pi * (static_cast<double>(k.kx) / static_cast<double>(nx) +
                                             static_cast<double>(k.ky) / static_cast<double>(ny)));
}

}  // namespace

Complex basis(Frequency k, Point s, const Window& window) {
  return std::polar(1.0, kTwoPi * (k.kx * s.x / window.width + k.ky * s.y / window.height));
}

Complex Spectrum::at(Frequency k) const {
  if (k.is_zero()) return {zero_, 0.0};
  if (k.canonical()) {
    auto it = coeffs_.find(k);
    return it == coeffs_.end() ? Complex{} : it->second;
  }
  auto it = coeffs_.find(k.negated());
  return it == coeffs_.end() ? Complex{} : std::conj(it->second);
}

void Spectrum::set(Frequency k, Complex c) {
  if (k.is_zero()) {
    if (c.imag() != 0.0) throw InvalidArgument("zero-frequency coefficient must be real");
    zero_ = c.real();
    return;
  }
  if (k.canonical())
    coeffs_[k] = c;
  else
    coeffs_[k.negated()] = std::conj(c);
}

int Spectrum::max_norm() const {
  int m = 0;
  for (const auto& [k, c] : coeffs_) m = std::max(m, k.max_norm());
  return m;
}

Spectrum Spectrum::scaled(Complex factor) const {
  if (factor.imag() != 0.0) throw InvalidArgument("spectrum scale factor must be real to keep the zero term real");
  Spectrum out(zero_ * factor.real());
  for (const auto& [k, c] : coeffs_) out.coeffs_.emplace(k, c * factor);
  return out;
}

double Spectrum::evaluate(Point s, const Window& window) const {
  double v = zero_;
  for (const auto& [k, c] : coeffs_) v += 2.0 * (c * basis(k, s, window)).real();
  return v;
}

FrequencyOrder::FrequencyOrder(std::vector<Frequency> freqs) : freqs_(std::move(freqs)) {
  std::set<Frequency> seen;
  for (const auto& k : freqs_) {
    if (!k.canonical()) throw InvalidArgument("frequency order must contain canonical non-zero frequencies");
    if (!seen.insert(k).second) throw InvalidArgument("frequency order contains duplicates");
  }
}

int FrequencyOrder::max_norm() const {
  int m = 0;
  for (const auto& k : freqs_) m = std::max(m, k.max_norm());
  return m;
}

int FrequencyOrder::index_of(Frequency k) const {
  for (std::size_t i = 0; i < freqs_.size(); ++i)
    if (freqs_[i] == k) return static_cast<int>(i);
  return -1;
}

FrequencyOrder spiral_order(std::size_t count) {
  if (count < 1) throw InvalidArgument("spiral_order needs K >= 1");
  std::vector<Frequency> out;
  out.reserve(count);
  for (int t = 1; out.size() < count; ++t) {
    // Counter-clockwise walk of the ring boundary starting at (t, 0), keeping canonical points:
    // up the right edge, leftwards along the top, down the left edge to (-t, 1).
    for (int y = 0; y <= t && out.size() < count; ++y) out.push_back({t, y});
    for (int x = t - 1; x >= -t && out.size() < count; --x) out.push_back({x, t});
    for (int y = t - 1; y >= 1 && out.size() < count; --y) out.push_back({-t, y});
  }
  return FrequencyOrder(std::move(out));
}

std::vector<std::size_t> study_k_values() {
  std::vector<std::size_t> ks;
  for (int t = 1; t <= 6; ++t) {
    ks.push_back(static_cast<std::size_t>(2 * (t + 1) * (t + 1) + 2 * (t + 1)));
    if (t <= 5) ks.push_back(static_cast<std::size_t>((t + 1) * (t + 1) + (t + 2) * (t + 2) + 2 * t + 3));
  }
  return ks;
}

Eigen::MatrixXcd dense_fft2(const Grid& grid) {
  Eigen::MatrixXcd data = grid.values().cast<Complex>();
  fft::transform2<double>(data, fft::Direction::Forward);
  data /= static_cast<double>(grid.nx() * grid.ny());
  return data;
}

Spectrum fft2(const Grid& grid) {
  const Eigen::Index nx = grid.nx();
  const Eigen::Index ny = grid.ny();
  const Eigen::MatrixXcd dense = dense_fft2(grid);
  Spectrum out(dense(0, 0).real());
  for (Eigen::Index b = 0; b < ny; ++b) {
    for (Eigen::Index a = 0; a < nx; ++a) {
      const Frequency k{signed_index(a, nx), signed_index(b, ny)};
      if (!k.canonical()) continue;
      const Eigen::Index ca = (nx - a) % nx;
      const Eigen::Index cb = (ny - b) % ny;
      const bool self_conjugate = ca == a && cb == b;
      if (!self_conjugate) {
        // On a Nyquist row both members of a conjugate pair look canonical; keep kx > 0.
        const Frequency partner{signed_index(ca, nx), signed_index(cb, ny)};
        if (partner.canonical() && partner.kx > k.kx) continue;
      }
      Complex c = dense(a, b) * std::conj(centre_phase(k, nx, ny));
      if (self_conjugate) c *= 0.5;
      out.set(k, c);
    }
  }
  return out;
}

Grid ifft2(const Spectrum& spectrum, Eigen::Index nx, Eigen::Index ny, const Window& window) {
  if (nx < 1 || ny < 1) throw InvalidArgument("ifft2 needs a non-empty grid");
  Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(nx, ny);
  dense(0, 0) += spectrum.zero();
  for (const auto& [k, c] : spectrum.coefficients()) {
    if (2 * std::abs(k.kx) > nx || 2 * std::abs(k.ky) > ny)
      throw GridTooSmall("frequency (" + std::to_string(k.kx) + "," + std::to_string(k.ky) + ") does not fit a " +
                         std::to_string(nx) + "x" + std::to_string(ny) + " grid");
    const Complex v = c * centre_phase(k, nx, ny);
    dense(bin_index(k.kx, nx), bin_index(k.ky, ny)) += v;
    dense(bin_index(-k.kx, nx), bin_index(-k.ky, ny)) += std::conj(v);
  }
  fft::transform2<double>(dense, fft::Direction::Inverse);
  return Grid(dense.real(), window);
}

Spectrum normalize_covariate(const Spectrum& spectrum) {
  if (!(std::abs(spectrum.zero()) > kZeroMeanTolerance)) throw ZeroMeanCovariate();
  const double z0 = spectrum.zero();
  Spectrum out = spectrum.scaled(1.0 / z0);
  out.set_zero(1.0);
  return out;
}

Spectrum restrict_to(const Spectrum& spectrum, const FrequencyOrder& order) {
  Spectrum out(spectrum.zero());
  for (const auto& k : order) out.set(k, spectrum.at(k));
  return out;
}

Eigen::VectorXd design_row(const Spectrum& covariate, const FrequencyOrder& order, Point s, const Window& window) {
  const auto K = static_cast<Eigen::Index>(order.size());
  Eigen::VectorXd row(2 * K);
  for (Eigen::Index i = 0; i < K; ++i) {
    const Frequency k = order[static_cast<std::size_t>(i)];
    const Complex a = covariate.at(k) * basis(k, s, window);
    row(i) = 2.0 * a.real();
    row(K + i) = -2.0 * a.imag();
  }
  return row;
}

Eigen::MatrixXd design_matrix(const Spectrum& covariate, const FrequencyOrder& order, std::span<const Point> locations,
                              const Window& window) {
  const auto K = static_cast<Eigen::Index>(order.size());
  const auto n = static_cast<Eigen::Index>(locations.size());
  const int m = order.max_norm();
  std::vector<Complex> coeff(static_cast<std::size_t>(K));
  for (Eigen::Index i = 0; i < K; ++i) coeff[static_cast<std::size_t>(i)] = covariate.at(order[static_cast<std::size_t>(i)]);

  Eigen::MatrixXd out(n, 2 * K);
  std::vector<Complex> px(static_cast<std::size_t>(2 * m + 1));
  std::vector<Complex> py(static_cast<std::size_t>(2 * m + 1));
  for (Eigen::Index r = 0; r < n; ++r) {
    const Point s = locations[static_cast<std::size_t>(r)];
    for (int k = -m; k <= m; ++k) {
      px[static_cast<std::size_t>(k + m)] = std::polar(1.0, kTwoPi * k * s.x / window.width);
      py[static_cast<std::size_t>(k + m)] = std::polar(1.0, kTwoPi * k * s.y / window.height);
    }
    for (Eigen::Index i = 0; i < K; ++i) {
      const Frequency k = order[static_cast<std::size_t>(i)];
      const Complex a = coeff[static_cast<std::size_t>(i)] * px[static_cast<std::size_t>(k.kx + m)] *
                        py[static_cast<std::size_t>(k.ky + m)];
      out(r, i) = 2.0 * a.real();
      out(r, K + i) = -2.0 * a.imag();
    }
  }
  return out;
}

Eigen::VectorXd column_rms(const Eigen::MatrixXd& rows) {
  if (rows.rows() == 0) throw InvalidArgument("column_rms needs at least one row");
  Eigen::VectorXd rms = (rows.colwise().squaredNorm() / static_cast<double>(rows.rows())).cwiseSqrt().transpose();
  for (Eigen::Index j = 0; j < rms.size(); ++j)
    if (!(rms(j) >= kDegenerateColumnRms)) throw DegenerateColumn(j);
  return rms;
}

Standardized standardize_columns(const Eigen::MatrixXd& rows) {
  Standardized out;
  out.scales = column_rms(rows);
  out.rows = rows * out.scales.cwiseInverse().asDiagonal();
  return out;
}

}  // namespace convint
