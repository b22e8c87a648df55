#include "cic/did.hpp"

#include <numeric>

namespace cic {

namespace {

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

double did_shift(const CellPartition& part, int d, int m) {
  if (d < 0 || d > 1 || m < 0 || m > 1) fail(errc::bad_config, "cell indices must be 0 or 1");
  const auto& c0 = part.cell(d, m, 0);
  const auto& c1 = part.cell(d, m, 1);
  if (c0.empty() || c1.empty())
    fail(errc::empty_cell, "cell (d=" + std::to_string(d) + ",m=" + std::to_string(m) +
                               ") lacks a period, cannot form a trend");
  return mean_of(c1) - mean_of(c0);
}

TransformSet did_transforms(const CellPartition& part) {
  TransformSet tf;
  for (int d = 0; d < 2; ++d) {
    for (int m = 0; m < 2; ++m) {
      if (part.cell(d, m, 0).empty() || part.cell(d, m, 1).empty()) continue;
      double shift = did_shift(part, d, m);
      tf.map[static_cast<std::size_t>(d * 2 + m)] = [shift](double y) { return y + shift; };
    }
  }
  return tf;
}

EffectSuite did_effects(const CellPartition& part, const std::vector<double>& qgrid,
                        double min_pc) {
  return estimate_with_transforms(part, did_transforms(part), qgrid, min_pc);
}

}  // namespace cic
