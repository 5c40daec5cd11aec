#pragma once

#include <vector>

#include "dskp/market.hpp"

namespace dskp {

// Arrived buyers with positive demand, reordered by virtual value
// descending (stable: ties keep original slot order). Zero-quantity entries
// and dummies are transparent; they never receive units.
struct RankedProfile {
  std::vector<int> order;         // original slot index per rank
  std::vector<double> phis;       // nonincreasing
  std::vector<double> quantities; // aligned with order
  std::vector<double> cum_demand; // prefix sums, strictly increasing
  int slots = 0;                  // length of the underlying profile

  int count() const { return static_cast<int>(order.size()); }
  double total_demand() const { return cum_demand.empty() ? 0.0 : cum_demand.back(); }
};

struct PeriodAllocation {
  std::vector<double> per_buyer;  // length == slots
  double sold = 0.0;
};

RankedProfile rank(const TypeProfile& profile, const MarketSpec& spec);

// Largest prefix of the ranking whose cumulative demand fits within x.
int boundary_index(const RankedProfile& ranked, double x);

// Greedy fill in rank order: full demand up to the boundary rank, the
// residual to the next one, zero beyond. x above total demand sells total
// demand only. Feasibility (0 <= a_i <= q_i, sum = sold <= x) is checked on
// every call.
PeriodAllocation allocate_x(const RankedProfile& ranked, double x);

// sum_j phi_[j] * a_[j] for the greedy allocation of x units.
double periodic_revenue(const RankedProfile& ranked, double x);

// Test oracle: solves max sum phi_i a_i s.t. 0 <= a_i <= q_i, sum a_i = x
// by enumerating all fill orders (n! vertices). Desk scale only.
double lp_oracle(const TypeProfile& profile, const MarketSpec& spec, double x);

}  // namespace dskp
