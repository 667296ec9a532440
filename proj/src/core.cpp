#include "convint/core.hpp"

#include <cmath>

namespace convint {

Window::Window(double w, double h) : width(w), height(h) {
  if (!(w > 0.0) || !(h > 0.0) || !std::isfinite(w) || !std::isfinite(h))
    throw InvalidArgument("window width and height must be positive and finite");
}

PointPattern::PointPattern(std::vector<Point> points, Window window)
    : points_(std::move(points)), window_(window) {
  for (const auto& p : points_) {
    if (!window_.contains(p.x, p.y))
      throw InvalidArgument("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                            ") lies outside the window");
  }
}

CovariateGrid::CovariateGrid(Eigen::MatrixXd values, Window window) : Grid(std::move(values), window) {
  if (nx() < 2 || ny() < 2) throw InvalidArgument("covariate grid needs at least 2x2 pixels");
  if (!values_.allFinite()) throw InvalidArgument("covariate grid has non-finite values");
}

IntensityMap::IntensityMap(Eigen::MatrixXd values, Window window) : Grid(std::move(values), window) {
  if (!values_.allFinite() || (values_.array() <= 0.0).any())
    throw InvalidArgument("intensity map must be strictly positive and finite");
}

IntensityMap IntensityMap::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidArgument("intensity scale factor must be positive");
  return IntensityMap(values_ * factor, window_);
}

double expected_count(const IntensityMap& map) { return map.values().sum() * map.pixel_area(); }

}  // namespace convint
