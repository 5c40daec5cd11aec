#include "dskp/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dskp {

RankedProfile rank(const TypeProfile& profile, const MarketSpec& spec) {
  RankedProfile ranked;
  ranked.slots = static_cast<int>(profile.entries.size());
  std::vector<int> idx;
  for (int i = 0; i < profile.arrivals && i < ranked.slots; ++i)
    if (profile.entries[i].quantity > 0.0) idx.push_back(i);

  std::vector<double> phi(ranked.slots, 0.0);
  for (int i : idx)
    phi[i] = virtual_value(profile.entries[i].value, profile.entries[i].quantity, spec);

  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return phi[a] > phi[b]; });

  double cum = 0.0;
  for (int i : idx) {
    ranked.order.push_back(i);
    ranked.phis.push_back(phi[i]);
    ranked.quantities.push_back(profile.entries[i].quantity);
    cum += profile.entries[i].quantity;
    ranked.cum_demand.push_back(cum);
  }
  return ranked;
}

int boundary_index(const RankedProfile& ranked, double x) {
  // first prefix-sum strictly above x; everything before fits
  const auto it =
      std::upper_bound(ranked.cum_demand.begin(), ranked.cum_demand.end(), x);
  return static_cast<int>(it - ranked.cum_demand.begin());
}

PeriodAllocation allocate_x(const RankedProfile& ranked, double x) {
  if (x < 0.0) throw std::invalid_argument("cannot sell a negative quantity");
  PeriodAllocation alloc;
  alloc.per_buyer.assign(ranked.slots, 0.0);
  const int boundary = boundary_index(ranked, x);
  double remaining = std::min(x, ranked.total_demand());
  for (int j = 0; j < ranked.count() && remaining > 0.0; ++j) {
    const double give =
        j < boundary ? ranked.quantities[j] : std::min(remaining, ranked.quantities[j]);
    alloc.per_buyer[ranked.order[j]] = give;
    alloc.sold += give;
    remaining -= give;
  }
  // feasibility per period: 0 <= a_i <= q_i and sum == sold <= x
  double sum = 0.0;
  for (int j = 0; j < ranked.count(); ++j) {
    const double a = alloc.per_buyer[ranked.order[j]];
    if (a < 0.0 || a > ranked.quantities[j] + 1e-12)
      throw std::logic_error("allocation outside [0, q_i]");
    sum += a;
  }
  if (sum > x + 1e-9) throw std::logic_error("allocated more than x");
  alloc.sold = sum;
  return alloc;
}

double periodic_revenue(const RankedProfile& ranked, double x) {
  if (x < 0.0) throw std::invalid_argument("cannot sell a negative quantity");
  double revenue = 0.0;
  double remaining = std::min(x, ranked.total_demand());
  for (int j = 0; j < ranked.count() && remaining > 0.0; ++j) {
    const double give = std::min(remaining, ranked.quantities[j]);
    revenue += ranked.phis[j] * give;
    remaining -= give;
  }
  return revenue;
}

double lp_oracle(const TypeProfile& profile, const MarketSpec& spec, double x) {
  std::vector<double> phi, qty;
  for (int i = 0; i < profile.arrivals; ++i) {
    if (profile.entries[i].quantity <= 0.0) continue;
    phi.push_back(virtual_value(profile.entries[i].value, profile.entries[i].quantity, spec));
    qty.push_back(profile.entries[i].quantity);
  }
  const int n = static_cast<int>(phi.size());
  if (n > 8) throw std::invalid_argument("lp_oracle is capped at 8 buyers");
  const double total = std::accumulate(qty.begin(), qty.end(), 0.0);
  const double budget = std::min(x, total);

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = -std::numeric_limits<double>::infinity();
  do {
    double remaining = budget;
    double value = 0.0;
    for (int i : perm) {
      const double give = std::min(remaining, qty[i]);
      value += phi[i] * give;
      remaining -= give;
      if (remaining <= 0.0) break;
    }
    best = std::max(best, value);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return n == 0 ? 0.0 : best;
}

}  // namespace dskp
