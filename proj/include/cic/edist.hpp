#pragma once

#include <cstddef>
#include <vector>

#include "cic/errors.hpp"

namespace cic {

// One cell's empirical distribution. cdf() is the right-continuous ECDF
// F(y) = #{v <= y}/n; quantile() is the left-continuous inverse taking the
// order statistic k = max(1, ceil(q*n)). The pair satisfies the Galois bounds
// quantile(cdf(y)) <= y for y in the support and cdf(quantile(q)) >= q.
class EmpiricalDistribution {
 public:
  // Sorts a copy of the sample. Requires n >= 1 and finite values.
  explicit EmpiricalDistribution(std::vector<double> values);

  double cdf(double y) const;
  double quantile(double q) const;  // q in [0,1], else QOutOfRange

  std::size_t size() const { return v_.size(); }
  const std::vector<double>& sorted_values() const { return v_; }
  double mean() const { return mean_; }
  // Fraction of observations sharing a value with another one; heavy ties
  // undermine the rank mapping, callers warn above 0.10.
  double tied_fraction() const;

 private:
  std::vector<double> v_;
  double mean_ = 0.0;
};

// Rank map y -> F1^{-1}(clamp(F0(y), 1/n0, 1)): the period-1 value occupying
// the same rank y holds in period 0. Nondecreasing in y; identity when both
// samples are the same multiset.
double qq_transform(const EmpiricalDistribution& f0, const EmpiricalDistribution& f1, double y);
std::vector<double> qq_transform(const EmpiricalDistribution& f0, const EmpiricalDistribution& f1,
                                 const std::vector<double>& ys);

// Signed two-component mixture w_pos*F_pos - w_neg*F_neg evaluated on a grid.
// raw may leave [0,1] in finite samples; rearranged is clipped to [0,1] and
// isotonized by a running maximum, which restores a valid CDF and equals raw
// wherever raw already is one.
struct MixtureCdf {
  std::vector<double> grid;        // sorted unique support
  std::vector<double> raw;
  std::vector<double> rearranged;
  double w_pos = 1.0;
  double w_neg = 0.0;
};

// Weights must satisfy w_pos - w_neg = 1 within 1e-9 (WeightIdentityViolated).
// A null component is allowed only with weight 0; f_pos must be present
// (EmptyGroup). When grid is empty it defaults to the union of the component
// sample values, which contains every jump point of both ECDFs.
MixtureCdf build_mixture_cdf(const EmpiricalDistribution* f_pos, double w_pos,
                             const EmpiricalDistribution* f_neg, double w_neg,
                             std::vector<double> grid = {});

// Smallest grid value with rearranged >= q, for q in (0,1) (QOutOfRange
// otherwise). If the rearranged CDF never reaches q on the grid the largest
// grid value is returned and *degenerate (if given) is set.
double invert_cdf(const MixtureCdf& mix, double q, bool* degenerate = nullptr);

}  // namespace cic
