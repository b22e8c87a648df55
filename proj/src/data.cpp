#include "cic/data.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>

namespace cic {

namespace {

double tied_fraction(const std::vector<double>& sorted_v) {
  if (sorted_v.empty()) return 0.0;
  std::size_t untied = 0;
  for (std::size_t i = 0; i < sorted_v.size(); ++i) {
    bool left = i > 0 && sorted_v[i - 1] == sorted_v[i];
    bool right = i + 1 < sorted_v.size() && sorted_v[i + 1] == sorted_v[i];
    if (!left && !right) ++untied;
  }
  return 1.0 - static_cast<double>(untied) / static_cast<double>(sorted_v.size());
}

}  // namespace

CellPartition partition_cells(const Dataset& data) {
  CellPartition part;
  for (const Observation& o : data.rows) {
    part.cells[CellPartition::index(o.d, o.m, o.t)].push_back(o.y);
  }
  for (auto& cell : part.cells) std::sort(cell.begin(), cell.end());

  part.one_sided = part.count(0, 1, 0) == 0 && part.count(0, 1, 1) == 0;
  for (int d = 0; d < 2; ++d) {
    for (int m = 0; m < 2; ++m) {
      for (int t = 0; t < 2; ++t) {
        if (part.count(d, m, t) > 0) continue;
        if (part.one_sided && d == 0 && m == 1) continue;
        fail(errc::empty_cell, "no observations in cell (d=" + std::to_string(d) +
                                   ",m=" + std::to_string(m) + ",t=" + std::to_string(t) + ")");
      }
    }
  }
  for (int d = 0; d < 2; ++d) {
    for (int m = 0; m < 2; ++m) {
      for (int t = 0; t < 2; ++t) {
        double tf = tied_fraction(part.cell(d, m, t));
        if (tf > 0.10) {
          part.warnings.push_back("cell (d=" + std::to_string(d) + ",m=" + std::to_string(m) +
                                  ",t=" + std::to_string(t) + ") has " +
                                  std::to_string(static_cast<int>(tf * 100.0)) +
                                  "% tied outcomes; rank mapping may be coarse");
        }
      }
    }
  }
  return part;
}

void validate_design(const Dataset& data) {
  if (data.design != StudyDesign::panel) return;
  // (d,m) per cluster must not change across rows; -1 marks "not seen yet".
  std::vector<int> seen(data.cluster_labels.size(), -1);
  for (const Observation& o : data.rows) {
    int dm = o.d * 2 + o.m;
    int& s = seen[static_cast<std::size_t>(o.cluster)];
    if (s == -1) {
      s = dm;
    } else if (s != dm) {
      fail(errc::inconsistent_panel,
           "cluster " + data.cluster_labels[static_cast<std::size_t>(o.cluster)] +
               " changes (d,m) across periods");
    }
  }
}

Dataset residualize_covariates(const Dataset& data) {
  if (data.covariate_cols.empty()) return data;
  const auto n = static_cast<Eigen::Index>(data.rows.size());
  const auto k = static_cast<Eigen::Index>(data.covariate_cols.size());
  if (n == 0) fail(errc::empty_group, "cannot residualize an empty dataset");

  Eigen::MatrixXd x(n, k + 1);
  Eigen::VectorXd y(n);
  x.col(0).setOnes();
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto& col = data.covariate_cols[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < n; ++i) x(i, j + 1) = col[static_cast<std::size_t>(i)];
  }
  for (Eigen::Index i = 0; i < n; ++i) y(i) = data.rows[static_cast<std::size_t>(i)].y;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < k + 1) {
    fail(errc::rank_deficient_design, "covariate design matrix is rank deficient");
  }
  Eigen::VectorXd beta = qr.solve(y);
  Eigen::VectorXd resid = y - x * beta;
  double grand = y.mean();

  Dataset out = data;
  for (Eigen::Index i = 0; i < n; ++i) {
    out.rows[static_cast<std::size_t>(i)].y = grand + resid(i);
  }
  return out;
}

}  // namespace cic
