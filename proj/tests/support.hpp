#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cic/data.hpp"
#include "cic/errors.hpp"

namespace support {

// Runs `fn` and reports the library error code it throws; fails the check
// chain by returning a sentinel when nothing is thrown.
inline cic::errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const cic::Error& e) {
    return e.code();
  }
  return static_cast<cic::errc>(-1);
}

struct Row {
  std::string cluster;
  double y;
  int d, m, t;
};

inline cic::Dataset make_dataset(const std::vector<Row>& rows,
                                 cic::StudyDesign design = cic::StudyDesign::repeated_cross_section) {
  cic::Dataset data;
  data.design = design;
  std::vector<std::string> labels;
  auto intern = [&](const std::string& label) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == label) return static_cast<std::int32_t>(i);
    }
    labels.push_back(label);
    return static_cast<std::int32_t>(labels.size() - 1);
  };
  for (const Row& r : rows) {
    cic::Observation o;
    o.cluster = intern(r.cluster);
    o.y = r.y;
    o.d = static_cast<std::uint8_t>(r.d);
    o.m = static_cast<std::uint8_t>(r.m);
    o.t = static_cast<std::uint8_t>(r.t);
    data.rows.push_back(o);
  }
  data.cluster_labels = std::move(labels);
  return data;
}

// Random two-period dataset with every (d,m,t) cell filled and a complier
// share bounded away from zero; optional rounding makes ties likely.
inline cic::Dataset random_dataset(std::mt19937_64& gen, bool with_ties = false,
                                   bool one_sided = false) {
  std::uniform_int_distribution<int> extra(0, 30);
  std::uniform_int_distribution<int> jitter(0, 10);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  cic::Dataset data;
  data.design = cic::StudyDesign::repeated_cross_section;
  int id = 0;
  auto add_cell = [&](int d, int m, int t, int count, double shift) {
    for (int i = 0; i < count; ++i) {
      cic::Observation o;
      o.cluster = id;
      double y = shift + noise(gen) + (t ? 0.4 : 0.0) + 0.3 * d * m;
      if (with_ties && unif(gen) < 0.5) y = std::floor(y * 4.0) / 4.0;
      o.y = y;
      o.d = static_cast<std::uint8_t>(d);
      o.m = static_cast<std::uint8_t>(m);
      o.t = static_cast<std::uint8_t>(t);
      data.rows.push_back(o);
      data.cluster_labels.push_back("u" + std::to_string(id));
      ++id;
    }
  };
  for (int t = 0; t < 2; ++t) {
    // Arm 1 leans mediated, arm 0 leans unmediated: complier share >= ~0.4.
    add_cell(1, 1, t, 55 + extra(gen), 0.8);
    add_cell(1, 0, t, 10 + jitter(gen), -0.2);
    if (!one_sided) add_cell(0, 1, t, 8 + jitter(gen), 0.6);
    add_cell(0, 0, t, 50 + extra(gen), 0.0);
  }
  return data;
}

}  // namespace support
