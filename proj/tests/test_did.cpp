#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"

#include "cic/data.hpp"
#include "cic/did.hpp"
#include "cic/errors.hpp"
#include "cic/estimators.hpp"
#include "cic/rng.hpp"
#include "cic/simulation.hpp"
#include "support.hpp"

using cic::CellPartition;
using cic::Dataset;
using cic::EffectSuite;
using support::code_of;

TEST_CASE("shift transform adds the cell's mean time change") {
  CellPartition part;
  part.cells[CellPartition::index(1, 0, 0)] = {1.0, 3.0};
  part.cells[CellPartition::index(1, 0, 1)] = {4.0, 8.0};
  CHECK(cic::did_shift(part, 1, 0) == doctest::Approx(4.0).epsilon(1e-12));
  cic::TransformSet tf = cic::did_transforms(part);
  REQUIRE(tf.map[2]);  // cell (1,0)
  CHECK(tf.map[2](0.0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(tf.map[2](-2.5) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK_FALSE(tf.map[0]);  // cell (0,0) has no data
  CHECK(code_of([&] { cic::did_shift(part, 0, 0); }) == cic::errc::empty_cell);
}

TEST_CASE("cell shifts estimate the benchmark time trends") {
  cic::SimulationDesign design;
  design.n = 200000;
  design.seed = 12;

  Dataset linear = cic::draw_dgp(design, 0);
  CellPartition lpart = cic::partition_cells(linear);
  // E[Y | cell, t=1] - E[Y | cell, t=0] for the unmediated control cell is the
  // pure time shift of 1.
  CHECK(cic::did_shift(lpart, 0, 0) == doctest::Approx(1.0).epsilon(0.03));

  design.link = cic::Link::exponential;
  Dataset expo = cic::draw_dgp(design, 0);
  CellPartition epart = cic::partition_cells(expo);
  CHECK(cic::did_shift(epart, 0, 0) == doctest::Approx(1.561245).epsilon(0.03));
  CHECK(cic::did_shift(epart, 1, 1) == doctest::Approx(68.545917).epsilon(0.03));
}

TEST_CASE("mean-shift partner cells collapse to a common estimate") {
  // With additive shifts the two cell effects that share a mediator value are
  // the same four-mean contrast, so they must agree exactly.
  std::mt19937_64 gen = cic::make_stream(21, cic::rng_domain::oracle, 0);
  for (int trial = 0; trial < 50; ++trial) {
    Dataset data = support::random_dataset(gen, trial % 2 == 1);
    EffectSuite s = cic::did_effects(cic::partition_cells(data), {});
    CHECK(s.at("theta_10_1").average ==
          doctest::Approx(s.at("theta_00_0").average).epsilon(1e-9));
    CHECK(s.at("theta_11_1").average ==
          doctest::Approx(s.at("theta_01_0").average).epsilon(1e-9));
  }
}

TEST_CASE("mean-shift estimates share the suite identities") {
  std::mt19937_64 gen = cic::make_stream(22, cic::rng_domain::oracle, 0);
  for (int trial = 0; trial < 100; ++trial) {
    Dataset data = support::random_dataset(gen, trial % 2 == 1);
    EffectSuite s = cic::did_effects(cic::partition_cells(data), {});
    double Dc = s.at("Delta_c").average;
    CHECK(std::abs(Dc - (s.at("theta_c_1").average + s.at("delta_c_0").average)) <= 1e-10);
    CHECK(std::abs(Dc - (s.at("theta_c_0").average + s.at("delta_c_1").average)) <= 1e-10);
    double agg = s.shares.p_n * s.at("theta_n").average +
                 s.shares.p_a * s.at("theta_a").average + s.shares.p_c * Dc;
    CHECK(std::abs(s.at("ATE").average - agg) <= 1e-10);
  }
}

TEST_CASE("mean-shift comparator is consistent only under the linear benchmark") {
  cic::SimulationDesign design;
  design.n = 50000;
  design.seed = 23;

  Dataset linear = cic::draw_dgp(design, 0);
  EffectSuite lin = cic::did_effects(cic::partition_cells(linear), {});
  CHECK(lin.at("theta_n").average == doctest::Approx(1.0).epsilon(0.12));
  CHECK(lin.at("theta_a").average == doctest::Approx(2.0).epsilon(0.06));
  CHECK(lin.at("Delta_c").average == doctest::Approx(3.0).epsilon(0.04));
  CHECK(lin.at("delta_c_1").average == doctest::Approx(2.0).epsilon(0.08));

  design.link = cic::Link::exponential;
  Dataset expo = cic::draw_dgp(design, 0);
  EffectSuite exp_suite = cic::did_effects(cic::partition_cells(expo), {});
  // True total complier effect is 52.48; the additive-trend counterfactual
  // overstates it by an order of ten here.
  CHECK(exp_suite.at("Delta_c").average - 52.483 > 5.0);
}

TEST_CASE("quantile effects are reported on the requested grid") {
  std::mt19937_64 gen = cic::make_stream(24, cic::rng_domain::oracle, 0);
  Dataset data = support::random_dataset(gen);
  const std::vector<double> grid{0.2, 0.5, 0.8};
  EffectSuite s = cic::did_effects(cic::partition_cells(data), grid);
  for (const cic::EffectEstimate& e : s.effects) {
    if (!e.available || e.quantiles.empty()) continue;
    REQUIRE(e.quantiles.size() == grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) CHECK(e.quantiles[j].q == grid[j]);
  }
}
