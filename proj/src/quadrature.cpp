#include "convint/quadrature.hpp"

#include "convint/io.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace convint {

struct SchemeBuilder {
  static QuadratureScheme base(const PointPattern& pattern, Eigen::Index nx, Eigen::Index ny) {
    if (nx < kMinQuadratureGrid || ny < kMinQuadratureGrid)
      throw InvalidArgument("quadrature grid must be at least 8x8");
    QuadratureScheme s;
    s.window_ = pattern.window();
    s.nx_ = nx;
    s.ny_ = ny;
    const Grid frame(Eigen::MatrixXd::Zero(nx, ny), pattern.window());

    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(nx, ny);
    for (const auto& p : pattern.points()) counts(frame.pixel_x(p.x), frame.pixel_y(p.y)) += 1.0;

    const Eigen::Index n = nx * ny + static_cast<Eigen::Index>(pattern.size());
    s.locations_.reserve(static_cast<std::size_t>(n));
    s.weights_.resize(n);
    s.indicator_ = Eigen::VectorXd::Zero(n);
    const double area = frame.pixel_area();
    for (Eigen::Index j = 0; j < ny; ++j)
      for (Eigen::Index i = 0; i < nx; ++i) {
        s.weights_(static_cast<Eigen::Index>(s.locations_.size())) = area / (1.0 + counts(i, j));
        s.locations_.push_back(frame.pixel_center(i, j));
      }
    for (const auto& p : pattern.points()) {
      const Eigen::Index r = static_cast<Eigen::Index>(s.locations_.size());
      s.weights_(r) = area / (1.0 + counts(frame.pixel_x(p.x), frame.pixel_y(p.y)));
      s.indicator_(r) = 1.0;
      s.locations_.push_back(p);
    }
    return s;
  }

  static void set_design(QuadratureScheme& s, Eigen::MatrixXd design, bool standardize) {
    if (standardize && design.cols() > 0) {
      s.scales_ = column_rms(design.topRows(s.dummy_count()));
      design = design * s.scales_.cwiseInverse().asDiagonal();
    } else {
      s.scales_ = Eigen::VectorXd::Ones(design.cols());
    }
    s.design_ = std::move(design);
  }

  static void set_spectral(QuadratureScheme& s, const Spectrum& covariate, const FrequencyOrder& order) {
    SpectralColumns sc;
    const auto K = static_cast<Eigen::Index>(order.size());
    const int m = order.max_norm();
    sc.max_norm = m;
    for (Eigen::Index c = 0; c < 2 * K; ++c) {
      const Frequency k = order[static_cast<std::size_t>(c % K)];
      const Complex z = covariate.at(k);
      // -2 Im[a] = 2 Re[i a]
      sc.freq.push_back(k);
      sc.gamma.push_back((c < K ? z : Complex(0.0, 1.0) * z) / s.scales_(c));
    }
    const double two_pi = 2.0 * std::numbers::pi;
    const Eigen::Index qx = 4 * m + 1;
    const Eigen::Index qy = 2 * m + 1;
    sc.dummy_x.resize(qx, s.nx_);
    for (Eigen::Index q = 0; q < qx; ++q)
      for (Eigen::Index i = 0; i < s.nx_; ++i)
        sc.dummy_x(q, i) = std::polar(1.0, two_pi * static_cast<double>(q - 2 * m) * (static_cast<double>(i) + 0.5) /
                                               static_cast<double>(s.nx_));
    sc.dummy_y.resize(qy, s.ny_);
    for (Eigen::Index q = 0; q < qy; ++q)
      for (Eigen::Index j = 0; j < s.ny_; ++j)
        sc.dummy_y(q, j) =
            std::polar(1.0, two_pi * static_cast<double>(q) * (static_cast<double>(j) + 0.5) / static_cast<double>(s.ny_));
    const Eigen::Index nd = s.data_count();
    sc.data_x.resize(qx, nd);
    sc.data_y.resize(qy, nd);
    for (Eigen::Index d = 0; d < nd; ++d) {
      const Point p = s.locations_[static_cast<std::size_t>(s.dummy_count() + d)];
      for (Eigen::Index q = 0; q < qx; ++q)
        sc.data_x(q, d) = std::polar(1.0, two_pi * static_cast<double>(q - 2 * m) * p.x / s.window_.width);
      for (Eigen::Index q = 0; q < qy; ++q)
        sc.data_y(q, d) = std::polar(1.0, two_pi * static_cast<double>(q) * p.y / s.window_.height);
    }
    s.spectral_ = std::move(sc);
  }
};

QuadratureScheme build_scheme(const PointPattern& pattern, const Spectrum& covariate, const FrequencyOrder& order,
                              Eigen::Index nx, Eigen::Index ny, bool standardize) {
  QuadratureScheme s = SchemeBuilder::base(pattern, nx, ny);
  SchemeBuilder::set_design(s, design_matrix(covariate, order, s.locations(), s.window()), standardize);
  SchemeBuilder::set_spectral(s, covariate, order);
  return s;
}

QuadratureScheme build_scheme(const PointPattern& pattern, Eigen::Index nx, Eigen::Index ny,
                              const std::function<Eigen::MatrixXd(std::span<const Point>)>& columns,
                              bool standardize) {
  QuadratureScheme s = SchemeBuilder::base(pattern, nx, ny);
  Eigen::MatrixXd design = columns(s.locations());
  if (design.rows() != s.size()) throw LengthMismatch("column callback returned the wrong number of rows");
  SchemeBuilder::set_design(s, std::move(design), standardize);
  return s;
}

Eigen::VectorXd linear_predictor(const QuadratureScheme& scheme, double intercept, const Eigen::VectorXd& psi) {
  if (psi.size() != scheme.dim()) throw LengthMismatch("coefficient length does not match the design");
  Eigen::VectorXd eta = scheme.design() * psi;
  eta.array() += intercept;
  return eta;
}

double log_likelihood_from_eta(const QuadratureScheme& scheme, const Eigen::VectorXd& eta) {
  return scheme.data_indicator().dot(eta) - scheme.weights().dot(eta.array().exp().matrix());
}

double log_likelihood(const QuadratureScheme& scheme, double intercept, const Eigen::VectorXd& psi) {
  return log_likelihood_from_eta(scheme, linear_predictor(scheme, intercept, psi));
}

Eigen::VectorXd gradient_from_eta(const QuadratureScheme& scheme, const Eigen::VectorXd& eta) {
  const Eigen::VectorXd resid = scheme.data_indicator() - scheme.weights().cwiseProduct(eta.array().exp().matrix());
  Eigen::VectorXd g(scheme.dim() + 1);
  g(0) = resid.sum();
  g.tail(scheme.dim()).noalias() = scheme.design().transpose() * resid;
  return g;
}

Eigen::VectorXd log_likelihood_gradient(const QuadratureScheme& scheme, double intercept, const Eigen::VectorXd& psi) {
  return gradient_from_eta(scheme, linear_predictor(scheme, intercept, psi));
}

Eigen::MatrixXd weighted_gram_direct(const QuadratureScheme& scheme, const Eigen::VectorXd& v) {
  const Eigen::Index p = scheme.dim();
  Eigen::MatrixXd xt(scheme.size(), p + 1);
  xt.col(0).setOnes();
  xt.rightCols(p) = scheme.design();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(p + 1, p + 1);
  // Rank update needs sqrt weights; split sign so negative v (never produced by the solver) still works.
  const Eigen::VectorXd sq = v.cwiseAbs().cwiseSqrt();
  const Eigen::MatrixXd pos = (v.array() > 0).select(sq, 0.0).asDiagonal() * xt;
  const Eigen::MatrixXd neg = (v.array() < 0).select(sq, 0.0).asDiagonal() * xt;
  g.selfadjointView<Eigen::Lower>().rankUpdate(pos.transpose(), 1.0);
  g.selfadjointView<Eigen::Lower>().rankUpdate(neg.transpose(), -1.0);
  return g.selfadjointView<Eigen::Lower>();
}

Eigen::MatrixXd weighted_gram(const QuadratureScheme& scheme, const Eigen::VectorXd& v) {
  if (v.size() != scheme.size()) throw LengthMismatch("weight vector length does not match the scheme");
  if (!scheme.spectral()) return weighted_gram_direct(scheme, v);
  const SpectralColumns& sc = *scheme.spectral();
  const int m = sc.max_norm;
  const Eigen::Index nd = scheme.data_count();

  // F(qx + 2m, qy) = sum_i v_i phi_q(s_i) for qx in [-2m, 2m], qy in [0, 2m].
  const Eigen::Map<const Eigen::MatrixXd> vgrid(v.data(), scheme.grid_nx(), scheme.grid_ny());
  const Eigen::MatrixXd ax_re = sc.dummy_x.real() * vgrid;
  const Eigen::MatrixXd ax_im = sc.dummy_x.imag() * vgrid;
  Eigen::MatrixXcd ax(ax_re.rows(), ax_re.cols());
  ax.real() = ax_re;
  ax.imag() = ax_im;
  Eigen::MatrixXcd f = ax * sc.dummy_y.transpose();
  if (nd > 0) f.noalias() += sc.data_x * v.tail(nd).asDiagonal() * sc.data_y.transpose();

  auto fourier = [&](int qx, int qy) -> Complex {
    if (qy < 0 || (qy == 0 && qx < 0)) return std::conj(f(-qx + 2 * m, -qy));
    return f(qx + 2 * m, qy);
  };

  const Eigen::Index p = scheme.dim();
  Eigen::MatrixXd g(p + 1, p + 1);
  g(0, 0) = f(2 * m, 0).real();
  for (Eigen::Index c = 0; c < p; ++c) {
    const auto& kc = sc.freq[static_cast<std::size_t>(c)];
    const Complex gc = sc.gamma[static_cast<std::size_t>(c)];
    g(c + 1, 0) = g(0, c + 1) = 2.0 * (gc * fourier(kc.kx, kc.ky)).real();
    for (Eigen::Index d = 0; d <= c; ++d) {
      const auto& kd = sc.freq[static_cast<std::size_t>(d)];
      const Complex gd = sc.gamma[static_cast<std::size_t>(d)];
      // Re(A) Re(B) = (Re(AB) + Re(A conj B)) / 2
      const double val = 2.0 * (gc * gd * fourier(kc.kx + kd.kx, kc.ky + kd.ky) +
                                gc * std::conj(gd) * fourier(kc.kx - kd.kx, kc.ky - kd.ky))
                                   .real();
      g(c + 1, d + 1) = g(d + 1, c + 1) = val;
    }
  }
  return g;
}

double profile_intercept(const QuadratureScheme& scheme, const Eigen::VectorXd& psi) {
  const Eigen::VectorXd xb = scheme.design() * psi;
  const double shift = xb.maxCoeff();
  const double denom = scheme.weights().dot((xb.array() - shift).exp().matrix());
  return std::log(static_cast<double>(scheme.data_count()) / denom) - shift;
}

void write_scheme_csv(const std::filesystem::path& path, const QuadratureScheme& scheme) {
  std::ofstream out(path);
  if (!out) throw io::FormatError("cannot open " + path.string());
  out << "x,y,weight,is_data";
  for (Eigen::Index c = 0; c < scheme.dim(); ++c) out << ",z" << (c + 1);
  out << '\n';
  for (Eigen::Index r = 0; r < scheme.size(); ++r) {
    const Point p = scheme.locations()[static_cast<std::size_t>(r)];
    out << io::format_double(p.x) << ',' << io::format_double(p.y) << ',' << io::format_double(scheme.weights()(r))
        << ',' << (scheme.is_data(r) ? 1 : 0);
    for (Eigen::Index c = 0; c < scheme.dim(); ++c) out << ',' << io::format_double(scheme.design()(r, c));
    out << '\n';
  }
}

}  // namespace convint
