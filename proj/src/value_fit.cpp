#include "dskp/value_fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dskp {

ProfilePool draw_profile_pool(const MarketSpec& spec, int per_period, Rng& rng) {
  ProfilePool pool(spec.horizon());
  for (auto& period : pool) {
    period.reserve(per_period);
    for (int i = 0; i < per_period; ++i) period.push_back(sample_profile(spec, rng));
  }
  return pool;
}

McFitResult fit_mc(const MarketSpec& spec, int num_nodes, int degree, int episodes,
                   Rng& rng, const ProfilePool* pool) {
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  if (degree + 1 > num_nodes)
    throw std::invalid_argument("need at least degree+1 nodes for the regression");

  const int T = spec.horizon();
  const ChebyshevBasis basis(degree, spec.stock_cap());
  const std::vector<double> nodes = basis.nodes(num_nodes);

  // Nodes are distinct, so the ridge-stabilized normal equations are
  // nonsingular; precompute the projection node values -> coefficients.
  const Eigen::MatrixXd X = basis.design(nodes);
  Eigen::MatrixXd gram = X.transpose() * X;
  gram.diagonal().array() += 1e-12;
  const Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("singular regression design");
  const Eigen::MatrixXd projector = llt.solve(X.transpose());  // (n+1) x m

  ValueApprox approx(basis, T);
  Eigen::MatrixXd node_values = Eigen::MatrixXd::Zero(T, num_nodes);
  std::vector<std::int64_t> visits(T, 0);

  TypeProfile scratch;
  for (int episode = 0; episode < episodes; ++episode) {
    for (int t = T; t >= 1; --t) {
      const TypeProfile* profile;
      if (pool) {
        profile = &(*pool)[t - 1][episode % (*pool)[t - 1].size()];
      } else {
        scratch = sample_profile(spec, rng);
        profile = &scratch;
      }
      const RankedProfile ranked = rank(*profile, spec);
      const Continuation cont(&approx, t + 1, spec.discount());
      const std::int64_t visit = ++visits[t - 1];
      for (int k = 0; k < num_nodes; ++k) {
        const double s = nodes[k];
        const MarginalProfile mp(ranked, cont, s);
        const double x_star = optimal_x(mp, s);
        const double v_new = periodic_revenue(ranked, x_star) + cont.value(s - x_star);
        node_values(t - 1, k) += (v_new - node_values(t - 1, k)) / visit;
      }
      approx.set_row(t, projector * node_values.row(t - 1).transpose());
    }
  }

  McFitResult result{std::move(approx), nodes, std::move(node_values), {}};
  result.fit_residual.resize(T, 0.0);
  for (int t = 1; t <= T; ++t) {
    double worst = 0.0;
    for (int k = 0; k < num_nodes; ++k)
      worst = std::max(worst, std::abs(result.approx.value(t, nodes[k]) -
                                       result.node_values(t - 1, k)));
    result.fit_residual[t - 1] = worst;
  }
  return result;
}

double DpTable::value(int period, double s) const {
  if (period > static_cast<int>(values.rows())) return 0.0;
  const auto& grid = stock_grid;
  if (s <= grid.front()) return values(period - 1, 0);
  if (s >= grid.back()) return values(period - 1, values.cols() - 1);
  const auto it = std::upper_bound(grid.begin(), grid.end(), s);
  const int i = static_cast<int>(it - grid.begin());
  const double w = (s - grid[i - 1]) / (grid[i] - grid[i - 1]);
  return (1.0 - w) * values(period - 1, i - 1) + w * values(period - 1, i);
}

DpTable exact_dp_oracle(const MarketSpec& spec, int stock_grid_count,
                        int action_grid_count, const ProfilePool& pool) {
  if (stock_grid_count > 200 || action_grid_count > 200)
    throw std::invalid_argument("dp oracle grids are capped at 200");
  if (spec.horizon() > 5)
    throw std::invalid_argument("dp oracle horizon is capped at 5");
  if (static_cast<int>(pool.size()) != spec.horizon())
    throw std::invalid_argument("pool must cover every period");

  const int T = spec.horizon();
  const int G = stock_grid_count;
  DpTable table;
  table.stock_grid.resize(G);
  for (int g = 0; g < G; ++g)
    table.stock_grid[g] = spec.stock_cap() * g / (G - 1.0);
  table.values = Eigen::MatrixXd::Zero(T, G);

  for (int t = T; t >= 1; --t) {
    std::vector<RankedProfile> ranked;
    ranked.reserve(pool[t - 1].size());
    for (const auto& profile : pool[t - 1]) ranked.push_back(rank(profile, spec));

    for (int g = 0; g < G; ++g) {
      const double s = table.stock_grid[g];
      double total = 0.0;
      for (const auto& rp : ranked) {
        // Candidate actions: uniform grid plus every kink of the piecewise
        // linear objective (demand prefixes and continuation grid kinks), so
        // the maximization is exact rather than grid-limited.
        double best = 0.0;
        auto consider = [&](double x) {
          if (x < 0.0 || x > s) return;
          const double obj = periodic_revenue(rp, x) +
                             spec.discount() * table.value(t + 1, s - x);
          best = std::max(best, obj);
        };
        consider(0.0);
        consider(s);
        for (int a = 1; a + 1 < action_grid_count; ++a)
          consider(s * a / (action_grid_count - 1.0));
        for (double d : rp.cum_demand) consider(d);
        if (t < T)
          for (double sg : table.stock_grid) consider(s - sg);
        total += best;
      }
      table.values(t - 1, g) = total / static_cast<double>(ranked.size());
    }
  }
  return table;
}

}  // namespace dskp
