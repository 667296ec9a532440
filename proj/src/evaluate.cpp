#include "convint/evaluate.hpp"

#include "convint/io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace convint {

double mse_intercept(std::span<const double> estimates, double truth) {
  if (estimates.empty()) throw InvalidArgument("MSE needs at least one replicate");
  double s = 0.0;
  for (double e : estimates) s += (truth - e) * (truth - e);
  return s / static_cast<double>(estimates.size());
}

double imse(std::span<const BetaSpectrum> estimates, const BetaSpectrum& truth, const FrequencyOrder& order) {
  if (estimates.empty()) throw LengthMismatch("IMSE needs at least one replicate");
  double total = 0.0;
  for (const auto& k : order) {
    double s = 0.0;
    for (const auto& e : estimates) s += std::norm(e.at(k) - truth.at(k));
    total += kImsePairMultiplicity * s / static_cast<double>(estimates.size());
  }
  return total;
}

Rates tpr_fpr(const std::set<Eigen::Index>& selected, const std::set<Eigen::Index>& truth, Eigen::Index dim) {
  for (auto i : selected)
    if (i < 0 || i >= dim) throw InvalidArgument("selected index out of range");
  for (auto i : truth)
    if (i < 0 || i >= dim) throw InvalidArgument("true support index out of range");
  Rates r;
  std::size_t tp = 0;
  for (auto i : selected) tp += truth.count(i);
  const std::size_t fp = selected.size() - tp;
  const auto noise = static_cast<std::size_t>(dim) - truth.size();
  if (!truth.empty()) r.tpr = static_cast<double>(tp) / static_cast<double>(truth.size());
  if (noise > 0) r.fpr = static_cast<double>(fp) / static_cast<double>(noise);
  return r;
}

std::set<Eigen::Index> support_of(const Eigen::VectorXd& coefficients) {
  std::set<Eigen::Index> s;
  for (Eigen::Index i = 0; i < coefficients.size(); ++i)
    if (coefficients(i) != 0.0) s.insert(i);
  return s;
}

double auc(const IntensityMap& map, const PointPattern& pattern) {
  if (pattern.empty()) throw EmptyPattern();
  if (!(map.window() == pattern.window())) throw InvalidArgument("map and pattern windows differ");
  const Eigen::Index npix = map.nx() * map.ny();
  Eigen::VectorXd hits = Eigen::VectorXd::Zero(npix);
  for (const auto& p : pattern.points()) hits(map.pixel_x(p.x) + map.nx() * map.pixel_y(p.y)) += 1.0;

  const double* val = map.values().data();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(npix));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return val[a] > val[b]; });

  // Walk thresholds from high to low; pixels sharing a value enter together as one ROC step.
  const double total_points = static_cast<double>(pattern.size());
  const double total_pixels = static_cast<double>(npix);
  double area = 0.0;
  double x_prev = 0.0;
  double y_prev = 0.0;
  double px = 0.0;
  double pts = 0.0;
  std::size_t i = 0;
  while (i < idx.size()) {
    const double v = val[idx[i]];
    while (i < idx.size() && val[idx[i]] == v) {
      px += 1.0;
      pts += hits(idx[i]);
      ++i;
    }
    const double x = px / total_pixels;
    const double y = pts / total_points;
    area += 0.5 * (x - x_prev) * (y + y_prev);
    x_prev = x;
    y_prev = y;
  }
  return area;
}

double ReplicateReport::log_mse() const { return std::log(mse); }
double ReplicateReport::log_imse() const { return std::log(imse); }

std::string report_csv_header() { return "scenario,process,method,k,target_n,mse,log_mse,imse,log_imse,tpr,fpr,m"; }

std::string report_csv_row(const ReplicateReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? io::format_double(*v) : std::string("NA"); };
  return r.scenario + ',' + r.process + ',' + r.method + ',' + std::to_string(r.k) + ',' +
         io::format_double(r.target_n) + ',' + io::format_double(r.mse) + ',' + io::format_double(r.log_mse()) + ',' +
         io::format_double(r.imse) + ',' + io::format_double(r.log_imse()) + ',' + opt(r.tpr) + ',' + opt(r.fpr) +
         ',' + std::to_string(r.m);
}

}  // namespace convint
