#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace convint {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class EmptyPattern : public Error {
 public:
  EmptyPattern() : Error("point pattern has no points") {}
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

/// Rectangular observation window [0,width] x [0,height].
struct Window {
  double width = 1.0;
  double height = 1.0;

  Window() = default;
  Window(double w, double h);

  double area() const { return width * height; }
  bool contains(double x, double y) const {
    return x >= 0.0 && x <= width && y >= 0.0 && y <= height;
  }
  bool operator==(const Window&) const = default;
};

/// W = [0,1024] x [0,786], the image frame used in the simulation study.
inline Window default_window() { return Window(1024.0, 786.0); }

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

class PointPattern {
 public:
  PointPattern() = default;
  /// Throws InvalidArgument if a point falls outside the window.
  PointPattern(std::vector<Point> points, Window window);

  const std::vector<Point>& points() const { return points_; }
  const Window& window() const { return window_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

 private:
  std::vector<Point> points_;
  Window window_;
};

/// Raster on a regular nx x ny pixel grid. values(i, j) holds pixel i along x
/// and j along y; pixel (i, j) is centred at ((i+1/2)w/nx, (j+1/2)h/ny).
template <typename Scalar>
class GridT {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  GridT() = default;
  GridT(Matrix values, Window window) : values_(std::move(values)), window_(window) {
    if (values_.rows() < 1 || values_.cols() < 1) throw InvalidArgument("grid must be non-empty");
  }

  Eigen::Index nx() const { return values_.rows(); }
  Eigen::Index ny() const { return values_.cols(); }
  const Matrix& values() const { return values_; }
  const Window& window() const { return window_; }

  double pixel_width() const { return window_.width / static_cast<double>(nx()); }
  double pixel_height() const { return window_.height / static_cast<double>(ny()); }
  double pixel_area() const { return pixel_width() * pixel_height(); }

  Point pixel_center(Eigen::Index i, Eigen::Index j) const {
    return {(static_cast<double>(i) + 0.5) * pixel_width(), (static_cast<double>(j) + 0.5) * pixel_height()};
  }

  /// Index of the pixel containing (x, y); points on the far edge map to the last pixel.
  Eigen::Index pixel_x(double x) const { return clamp_index(x / pixel_width(), nx()); }
  Eigen::Index pixel_y(double y) const { return clamp_index(y / pixel_height(), ny()); }

  Scalar at(double x, double y) const { return values_(pixel_x(x), pixel_y(y)); }

  /// Bilinear interpolation between pixel centres, constant beyond the outer centres.
  Scalar bilinear(double x, double y) const;

 protected:
  static Eigen::Index clamp_index(double u, Eigen::Index n) {
    if (!(u >= 0.0)) return 0;
    auto k = static_cast<Eigen::Index>(u);
    return k >= n ? n - 1 : k;
  }

  Matrix values_;
  Window window_;
};

using Grid = GridT<double>;

/// Covariate image. At least 2x2 pixels, finite values.
class CovariateGrid : public Grid {
 public:
  CovariateGrid() = default;
  CovariateGrid(Eigen::MatrixXd values, Window window);
};

/// First-order intensity (points per unit area) sampled on pixels. Strictly positive.
class IntensityMap : public Grid {
 public:
  IntensityMap() = default;
  IntensityMap(Eigen::MatrixXd values, Window window);

  IntensityMap scaled(double factor) const;
};

using Seed = std::uint64_t;

/// Riemann sum of the intensity over the window.
double expected_count(const IntensityMap& map);

template <typename Scalar>
Scalar GridT<Scalar>::bilinear(double x, double y) const {
  double u = x / pixel_width() - 0.5;
  double v = y / pixel_height() - 0.5;
  const double umax = static_cast<double>(nx() - 1);
  const double vmax = static_cast<double>(ny() - 1);
  u = u < 0.0 ? 0.0 : (u > umax ? umax : u);
  v = v < 0.0 ? 0.0 : (v > vmax ? vmax : v);
  auto i0 = static_cast<Eigen::Index>(u);
  auto j0 = static_cast<Eigen::Index>(v);
  Eigen::Index i1 = i0 + 1 < nx() ? i0 + 1 : i0;
  Eigen::Index j1 = j0 + 1 < ny() ? j0 + 1 : j0;
  const double fu = u - static_cast<double>(i0);
  const double fv = v - static_cast<double>(j0);
  return static_cast<Scalar>((1 - fu) * (1 - fv) * values_(i0, j0) + fu * (1 - fv) * values_(i1, j0) +
                             (1 - fu) * fv * values_(i0, j1) + fu * fv * values_(i1, j1));
}

}  // namespace convint
