#include "cic/edist.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace cic {

namespace {

// ceil(q*n) robust to the product landing a hair above an integer; without the
// slack, quantile(cdf(y)) can jump one order statistic too high.
std::size_t order_statistic(double q, std::size_t n) {
  double k = std::ceil(q * static_cast<double>(n) - 1e-9);
  if (k < 1.0) return 1;
  if (k > static_cast<double>(n)) return n;
  return static_cast<std::size_t>(k);
}

}  // namespace

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> values) : v_(std::move(values)) {
  if (v_.empty()) fail(errc::empty_group, "empirical distribution needs at least one observation");
  for (double x : v_) {
    if (!std::isfinite(x)) fail(errc::malformed_field, "non-finite value in sample");
  }
  std::sort(v_.begin(), v_.end());
  double s = 0.0, c = 0.0;  // Kahan
  for (double x : v_) {
    double t = x - c;
    double u = s + t;
    c = (u - s) - t;
    s = u;
  }
  mean_ = s / static_cast<double>(v_.size());
}

double EmpiricalDistribution::cdf(double y) const {
  auto it = std::upper_bound(v_.begin(), v_.end(), y);
  return static_cast<double>(it - v_.begin()) / static_cast<double>(v_.size());
}

double EmpiricalDistribution::quantile(double q) const {
  if (!(q >= 0.0 && q <= 1.0)) fail(errc::q_out_of_range, "quantile level must lie in [0,1]");
  return v_[order_statistic(q, v_.size()) - 1];
}

double EmpiricalDistribution::tied_fraction() const {
  std::size_t untied = 0;
  for (std::size_t i = 0; i < v_.size(); ++i) {
    bool left = i > 0 && v_[i - 1] == v_[i];
    bool right = i + 1 < v_.size() && v_[i + 1] == v_[i];
    if (!left && !right) ++untied;
  }
  return 1.0 - static_cast<double>(untied) / static_cast<double>(v_.size());
}

double qq_transform(const EmpiricalDistribution& f0, const EmpiricalDistribution& f1, double y) {
  double r = f0.cdf(y);
  double lo = 1.0 / static_cast<double>(f0.size());
  if (r < lo) r = lo;  // below-support ranks are pulled to the first order statistic
  if (r > 1.0) r = 1.0;
  return f1.quantile(r);
}

std::vector<double> qq_transform(const EmpiricalDistribution& f0, const EmpiricalDistribution& f1,
                                 const std::vector<double>& ys) {
  std::vector<double> out;
  out.reserve(ys.size());
  for (double y : ys) out.push_back(qq_transform(f0, f1, y));
  return out;
}

MixtureCdf build_mixture_cdf(const EmpiricalDistribution* f_pos, double w_pos,
                             const EmpiricalDistribution* f_neg, double w_neg,
                             std::vector<double> grid) {
  if (f_pos == nullptr) fail(errc::empty_group, "mixture needs a positive component");
  if (f_neg == nullptr && w_neg != 0.0)
    fail(errc::empty_group, "missing negative component with nonzero weight");
  if (std::abs(w_pos - w_neg - 1.0) > 1e-9)
    fail(errc::weight_identity_violated, "mixture weights must satisfy w_pos - w_neg = 1");

  MixtureCdf mix;
  mix.w_pos = w_pos;
  mix.w_neg = w_neg;
  if (grid.empty()) {
    grid = f_pos->sorted_values();
    if (f_neg != nullptr) {
      grid.insert(grid.end(), f_neg->sorted_values().begin(), f_neg->sorted_values().end());
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.empty()) fail(errc::empty_group, "mixture grid is empty");

  mix.raw.resize(grid.size());
  mix.rearranged.resize(grid.size());
  double running = 0.0;  // left tail of a CDF is 0
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double v = w_pos * f_pos->cdf(grid[i]);
    if (f_neg != nullptr && w_neg != 0.0) v -= w_neg * f_neg->cdf(grid[i]);
    mix.raw[i] = v;
    double clipped = std::min(1.0, std::max(0.0, v));
    running = std::max(running, clipped);
    mix.rearranged[i] = running;
  }
  mix.grid = std::move(grid);
  return mix;
}

double invert_cdf(const MixtureCdf& mix, double q, bool* degenerate) {
  if (degenerate != nullptr) *degenerate = false;
  if (!(q > 0.0 && q < 1.0)) fail(errc::q_out_of_range, "inversion level must lie in (0,1)");
  auto it = std::lower_bound(mix.rearranged.begin(), mix.rearranged.end(), q);
  if (it == mix.rearranged.end()) {
    if (degenerate != nullptr) *degenerate = true;
    return mix.grid.back();
  }
  return mix.grid[static_cast<std::size_t>(it - mix.rearranged.begin())];
}

}  // namespace cic
