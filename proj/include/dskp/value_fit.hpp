#pragma once

#include <optional>
#include <vector>

#include "dskp/sell_policy.hpp"

namespace dskp {

// Fixed per-period profile draws, indexed [period-1][draw]. Used to run the
// fit and the DP oracle against identical empirical samples.
using ProfilePool = std::vector<std::vector<TypeProfile>>;

ProfilePool draw_profile_pool(const MarketSpec& spec, int per_period, Rng& rng);

struct McFitResult {
  ValueApprox approx;
  std::vector<double> nodes;        // m Chebyshev nodes
  Eigen::MatrixXd node_values;      // horizon x m running means
  // max_k |Vtilde^t(s_k) - node mean| per period; the regression residual
  // scale used by the fitted-shape property checks.
  std::vector<double> fit_residual;
};

// Episode-averaged backward value fit: every episode sweeps t = T..1,
// draws one profile per period, maximizes R + delta*Vtilde^{t+1} exactly at
// each node via the threshold policy, folds the result into a per-(t, node)
// running mean, and refreshes period t's least-squares row so the next
// period down sees the current approximation. Deterministic for a fixed rng.
McFitResult fit_mc(const MarketSpec& spec, int num_nodes, int degree, int episodes,
                   Rng& rng, const ProfilePool* pool = nullptr);

struct DpTable {
  std::vector<double> stock_grid;
  Eigen::MatrixXd values;  // horizon x grid, row t-1 = E[V^t(.)] on the grid
  double value(int period, double s) const;  // linear interpolation
};

// Desk-scale dynamic-programming oracle: exhaustive maximization over an
// action grid refined with the profile's demand breakpoints and the
// continuation kinks, expectation replaced by the supplied empirical pool.
// Caps: grids <= 200, horizon <= 5.
DpTable exact_dp_oracle(const MarketSpec& spec, int stock_grid_count,
                        int action_grid_count, const ProfilePool& pool);

}  // namespace dskp
