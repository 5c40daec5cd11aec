#pragma once

#include "dskp/allocation.hpp"
#include "dskp/chebyshev.hpp"

namespace dskp {

// Piecewise structure of the marginal value
//   MV(x) = phi_[segment containing x] - delta * Vtilde'(stock - x),
// with the right-limit convention at breakpoints. Beyond total demand the
// segment phi is 0 (revenue is flat there).
class MarginalProfile {
 public:
  MarginalProfile(const RankedProfile& ranked, Continuation continuation,
                  double stock);

  double stock() const { return stock_; }
  double total_demand() const { return ranked_->total_demand(); }
  const RankedProfile& ranked() const { return *ranked_; }

  double segment_phi(double x) const;
  // Continuation derivative term delta * Vtilde'(stock - x).
  double continuation_derivative(double x) const;

 private:
  const RankedProfile* ranked_;
  Continuation continuation_;
  double stock_;
};

double marginal_value(const MarginalProfile& mp, double x);

// Theorem-style threshold: the infimum of {x : MV(x) < 0}, or the sell cap
// min(stock, total demand) when no negative-marginal-value point exists
// below it. Scans segments in order and bisects inside the first
// sign-change segment only, so mildly non-concave fitted continuations
// cannot send the scan past a later spurious crossing.
double optimal_x(const MarginalProfile& mp, double stock);

// Convenience: rank, build the marginal profile, return x*.
double optimal_x_for(const TypeProfile& profile, const MarketSpec& spec,
                     Continuation continuation, double stock);

struct MonotoneTypeReport {
  int trials = 0;
  int x_violations = 0;       // x* decreased after raising one type
  int alloc_violations = 0;   // a_i decreased after raising q_i
  double worst_drop = 0.0;
};

// Samples profiles, raises one arrived buyer's value (and, separately,
// quantity), and checks that x* and the buyer's allocation never decrease.
MonotoneTypeReport monotone_in_type_check(const MarketSpec& spec,
                                          const ValueApprox& approx, int trials,
                                          Rng& rng, double stock, int period = 1,
                                          double tolerance = 1e-9);

}  // namespace dskp
