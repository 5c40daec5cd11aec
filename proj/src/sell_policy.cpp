#include "dskp/sell_policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dskp {

MarginalProfile::MarginalProfile(const RankedProfile& ranked,
                                 Continuation continuation, double stock)
    : ranked_(&ranked), continuation_(continuation), stock_(stock) {
  if (stock < 0.0) throw std::invalid_argument("stock must be >= 0");
}

double MarginalProfile::segment_phi(double x) const {
  const int j = boundary_index(*ranked_, x);  // right limit at breakpoints
  return j < ranked_->count() ? ranked_->phis[j] : 0.0;
}

double MarginalProfile::continuation_derivative(double x) const {
  return continuation_.derivative(stock_ - x);
}

double marginal_value(const MarginalProfile& mp, double x) {
  return mp.segment_phi(x) - mp.continuation_derivative(x);
}

double optimal_x(const MarginalProfile& mp, double stock) {
  if (stock <= 0.0) return 0.0;
  const RankedProfile& ranked = mp.ranked();
  // Selling beyond total demand never changes the allocation, so the
  // threshold search is capped there as well as at the stock.
  const double cap = std::min(stock, ranked.total_demand());
  if (cap <= 0.0) return 0.0;

  double seg_start = 0.0;
  for (int j = 0; j < ranked.count() && seg_start < cap; ++j) {
    const double seg_end = std::min(ranked.cum_demand[j], cap);
    const double phi = ranked.phis[j];
    if (phi - mp.continuation_derivative(seg_start) < 0.0) return seg_start;
    if (phi - mp.continuation_derivative(seg_end) >= 0.0) {
      seg_start = seg_end;
      continue;
    }
    // First sign change lives in this segment; bisect phi = dCont(x).
    double lo = seg_start, hi = seg_end;
    const double tol = 1e-12 * std::max(1.0, cap);
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      if (phi - mp.continuation_derivative(mid) >= 0.0)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  }
  return cap;
}

double optimal_x_for(const TypeProfile& profile, const MarketSpec& spec,
                     Continuation continuation, double stock) {
  const RankedProfile ranked = rank(profile, spec);
  return optimal_x(MarginalProfile(ranked, continuation, stock), stock);
}

MonotoneTypeReport monotone_in_type_check(const MarketSpec& spec,
                                          const ValueApprox& approx, int trials,
                                          Rng& rng, double stock, int period,
                                          double tolerance) {
  MonotoneTypeReport report;
  const Continuation cont(&approx, period + 1, spec.discount());
  for (int trial = 0; trial < trials; ++trial) {
    TypeProfile profile = sample_profile(spec, rng);
    const int i = static_cast<int>(rng.below(profile.arrivals));

    const RankedProfile base_ranked = rank(profile, spec);
    const double base_x = optimal_x(MarginalProfile(base_ranked, cont, stock), stock);
    const double base_alloc = allocate_x(base_ranked, base_x).per_buyer[i];

    // raise the buyer's value
    TypeProfile raised_v = profile;
    raised_v.entries[i].value += rng.uniform(0.0, 1.0);
    const double x_v = optimal_x_for(raised_v, spec, cont, stock);
    if (x_v < base_x - tolerance) {
      ++report.x_violations;
      report.worst_drop = std::max(report.worst_drop, base_x - x_v);
    }

    // raise the buyer's quantity (allocation must not shrink either)
    TypeProfile raised_q = profile;
    raised_q.entries[i].quantity +=
        rng.uniform(0.0, spec.quantity_upper() - raised_q.entries[i].quantity);
    const RankedProfile rq = rank(raised_q, spec);
    const double x_q = optimal_x(MarginalProfile(rq, cont, stock), stock);
    if (x_q < base_x - tolerance) {
      ++report.x_violations;
      report.worst_drop = std::max(report.worst_drop, base_x - x_q);
    }
    if (allocate_x(rq, x_q).per_buyer[i] < base_alloc - tolerance)
      ++report.alloc_violations;

    ++report.trials;
  }
  return report;
}

}  // namespace dskp
