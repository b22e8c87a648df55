#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"

#include "cic/edist.hpp"
#include "cic/errors.hpp"
#include "cic/rng.hpp"
#include "support.hpp"

using cic::EmpiricalDistribution;
using support::code_of;

TEST_CASE("ecdf is right-continuous with jumps at sample points") {
  EmpiricalDistribution f({1.0, 2.0, 2.0, 3.0});
  CHECK(f.cdf(0.9) == 0.0);
  CHECK(f.cdf(1.0) == 0.25);
  CHECK(f.cdf(1.999) == 0.25);
  CHECK(f.cdf(2.0) == 0.75);
  CHECK(f.cdf(2.5) == 0.75);
  CHECK(f.cdf(3.0) == 1.0);
  CHECK(f.cdf(99.0) == 1.0);
}

TEST_CASE("quantile picks the lowest order statistic covering the level") {
  EmpiricalDistribution f({10.0, 20.0, 30.0, 40.0});
  CHECK(f.quantile(0.25) == 10.0);
  CHECK(f.quantile(0.2500001) == 20.0);
  CHECK(f.quantile(0.5) == 20.0);
  CHECK(f.quantile(0.75) == 30.0);
  CHECK(f.quantile(1.0) == 40.0);
  CHECK(f.quantile(0.0) == 10.0);
  // A level equal to k/n up to rounding noise must not spill to k+1.
  CHECK(f.quantile(0.75 + 1e-13) == 30.0);
  CHECK(code_of([&] { f.quantile(-0.01); }) == cic::errc::q_out_of_range);
  CHECK(code_of([&] { f.quantile(1.01); }) == cic::errc::q_out_of_range);
}

TEST_CASE("quantile and cdf form a Galois pair on random samples") {
  std::mt19937_64 gen = cic::make_stream(42, cic::rng_domain::oracle, 0);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_int_distribution<int> size(1, 60);
  std::uniform_real_distribution<double> level(0.001, 0.999);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> sample(static_cast<std::size_t>(size(gen)));
    for (double& v : sample) {
      v = noise(gen);
      if (trial % 2 == 0) v = std::round(v * 4.0) / 4.0;  // force ties
    }
    EmpiricalDistribution f(sample);
    for (int k = 0; k < 12; ++k) {
      double q = level(gen);
      double y = f.quantile(q);
      CHECK(f.cdf(y) >= q - 1e-12);
    }
    for (double y : sample) {
      CHECK(f.quantile(f.cdf(y)) <= y + 1e-12);
      CHECK(f.cdf(f.quantile(f.cdf(y))) == f.cdf(y));
    }
  }
}

TEST_CASE("mean matches a long-double reference") {
  std::mt19937_64 gen = cic::make_stream(7, cic::rng_domain::oracle, 0);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> sample(10000);
  long double acc = 0.0L;
  for (double& v : sample) {
    v = std::exp(unif(gen) * 4.0);
    acc += v;
  }
  EmpiricalDistribution f(sample);
  CHECK(f.mean() == doctest::Approx(static_cast<double>(acc / 10000.0L)).epsilon(1e-13));
}

TEST_CASE("constructor rejects empty or non-finite samples") {
  CHECK(code_of([] { EmpiricalDistribution f(std::vector<double>{}); }) == cic::errc::empty_group);
  CHECK(code_of([] {
          EmpiricalDistribution f({1.0, std::numeric_limits<double>::quiet_NaN()});
        }) == cic::errc::malformed_field);
}

TEST_CASE("tied fraction counts duplicated sample values") {
  EmpiricalDistribution f({1.0, 1.0, 2.0, 3.0, 3.0, 3.0});
  CHECK(f.tied_fraction() == doctest::Approx(5.0 / 6.0));
  EmpiricalDistribution g({1.0, 2.0, 3.0});
  CHECK(g.tied_fraction() == 0.0);
}

TEST_CASE("quantile-quantile transform maps across distributions with clamping") {
  EmpiricalDistribution f0({1.0, 2.0, 3.0});
  EmpiricalDistribution f1({10.0, 20.0, 30.0});
  CHECK(cic::qq_transform(f0, f1, 2.0) == 20.0);
  CHECK(cic::qq_transform(f0, f1, 3.0) == 30.0);
  // Below the source support the rank clamps to 1/n0, not 0.
  CHECK(cic::qq_transform(f0, f1, 0.5) == 10.0);
  CHECK(cic::qq_transform(f0, f1, 99.0) == 30.0);

  EmpiricalDistribution g0({1.0, 1.0, 2.0, 2.0});
  EmpiricalDistribution g1({5.0, 6.0, 7.0, 8.0});
  CHECK(cic::qq_transform(g0, g1, 1.0) == 6.0);  // rank 1/2
  CHECK(cic::qq_transform(g0, g1, 2.0) == 8.0);  // rank 1

  std::vector<double> mapped = cic::qq_transform(f0, f1, std::vector<double>{0.0, 2.0, 3.0});
  CHECK(mapped == std::vector<double>{10.0, 20.0, 30.0});
}

TEST_CASE("mixture cdf validates weights and components") {
  EmpiricalDistribution pos({0.0, 1.0});
  EmpiricalDistribution neg({0.5});
  CHECK(code_of([&] { cic::build_mixture_cdf(&pos, 1.5, &neg, 0.4); }) ==
        cic::errc::weight_identity_violated);
  CHECK(code_of([&] { cic::build_mixture_cdf(nullptr, 1.0, nullptr, 0.0); }) ==
        cic::errc::empty_group);
  CHECK(code_of([&] { cic::build_mixture_cdf(&pos, 1.5, nullptr, 0.5); }) ==
        cic::errc::empty_group);
  // Zero-weight negative part may be absent.
  cic::MixtureCdf pure = cic::build_mixture_cdf(&pos, 1.0, nullptr, 0.0);
  CHECK(pure.rearranged.back() == 1.0);
}

TEST_CASE("pure mixture reproduces the empirical cdf") {
  std::vector<double> sample{3.0, 1.0, 2.0, 2.0};
  EmpiricalDistribution f(sample);
  cic::MixtureCdf mix = cic::build_mixture_cdf(&f, 1.0, nullptr, 0.0);
  REQUIRE(mix.grid.size() == 3);
  for (std::size_t i = 0; i < mix.grid.size(); ++i) {
    CHECK(mix.rearranged[i] == doctest::Approx(f.cdf(mix.grid[i])).epsilon(1e-14));
  }
  bool degenerate = false;
  CHECK(cic::invert_cdf(mix, 0.5) == f.quantile(0.5));
  CHECK(cic::invert_cdf(mix, 0.9, &degenerate) == f.quantile(0.9));
  CHECK_FALSE(degenerate);
}

TEST_CASE("rearranged mixture is a valid cdf even when raw weights cross") {
  // Positive part sits right of the negative part, so the raw difference dips
  // negative at low y and overshoots near the top.
  EmpiricalDistribution pos({2.0, 3.0, 4.0});
  EmpiricalDistribution neg({0.0, 1.0});
  cic::MixtureCdf mix = cic::build_mixture_cdf(&pos, 2.0, &neg, 1.0);
  bool raw_out_of_range = false;
  for (double v : mix.raw) {
    if (v < 0.0 || v > 1.0) raw_out_of_range = true;
  }
  CHECK(raw_out_of_range);
  double prev = 0.0;
  for (double v : mix.rearranged) {
    CHECK(v >= prev);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    prev = v;
  }
  CHECK(mix.rearranged.back() == 1.0);
}

TEST_CASE("mixture inversion flags levels above a truncated grid") {
  EmpiricalDistribution pos({0.0, 1.0, 2.0, 3.0});
  std::vector<double> short_grid{0.0, 1.0};
  cic::MixtureCdf mix = cic::build_mixture_cdf(&pos, 1.0, nullptr, 0.0, short_grid);
  bool degenerate = false;
  CHECK(cic::invert_cdf(mix, 0.95, &degenerate) == 1.0);
  CHECK(degenerate);
  CHECK(code_of([&] { cic::invert_cdf(mix, 0.0); }) == cic::errc::q_out_of_range);
  CHECK(code_of([&] { cic::invert_cdf(mix, 1.0); }) == cic::errc::q_out_of_range);
}

TEST_CASE("random mixtures always rearrange to valid cdfs") {
  std::mt19937_64 gen = cic::make_stream(11, cic::rng_domain::oracle, 1);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_int_distribution<int> size(1, 40);
  std::uniform_real_distribution<double> wdist(1.0, 4.0);
  std::uniform_real_distribution<double> level(0.01, 0.99);
  for (int trial = 0; trial < 400; ++trial) {
    std::vector<double> a(static_cast<std::size_t>(size(gen)));
    std::vector<double> b(static_cast<std::size_t>(size(gen)));
    for (double& v : a) v = std::round(noise(gen) * 8.0) / 8.0;
    for (double& v : b) v = std::round((noise(gen) + 0.7) * 8.0) / 8.0;
    EmpiricalDistribution pos(a), neg(b);
    double w = wdist(gen);
    cic::MixtureCdf mix = cic::build_mixture_cdf(&pos, w, &neg, w - 1.0);
    double prev = 0.0;
    for (double v : mix.rearranged) {
      CHECK(v >= prev);
      CHECK(v <= 1.0);
      prev = v;
    }
    CHECK(std::is_sorted(mix.grid.begin(), mix.grid.end()));
    double q1 = level(gen), q2 = level(gen);
    if (q1 > q2) std::swap(q1, q2);
    CHECK(cic::invert_cdf(mix, q1) <= cic::invert_cdf(mix, q2));
  }
}
