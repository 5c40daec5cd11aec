#pragma once

#include <span>
#include <vector>

#include "dskp/sell_policy.hpp"

namespace dskp {

struct MechanismOutcome {
  std::vector<double> allocations;  // per slot
  std::vector<double> payments;
  std::vector<double> penalties;    // zero on the truthful path
  double x_star = 0.0;
  double sold = 0.0;
  double next_stock = 0.0;
};

struct InterimEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  long samples = 0;
};

// Mechanism engine for one buyer against a fixed rival profile: the rivals
// are ranked once, and any report (phi, q) can then be priced by merging it
// into the ranking without re-sorting. This is the hot path shared by
// payments, penalties, interim estimates, and the audit harness.
class RivalSolver {
 public:
  RivalSolver(const MarketSpec& spec, Continuation continuation, double stock);

  // Rivals with their original slot ids (ties in phi resolve by slot order,
  // matching rank()). Dummies and zero-quantity entries are dropped.
  void set_rivals(std::span<const BuyerType> rivals, std::span<const int> slots);
  void set_rivals_from_profile(const TypeProfile& profile, int excluded_slot);

  struct Solved {
    double x_star = 0.0;
    double buyer_alloc = 0.0;
  };
  // Threshold sell quantity and the buyer's share when the buyer reports a
  // type with virtual value `phi_b` and demand `q_b` from slot `slot_b`.
  Solved solve(double phi_b, double q_b, int slot_b) const;

  // Envelope payment v*a - integral of the counterfactual allocation over
  // reported values in [0, v_b], by composite Simpson refined at the rank
  // tie points where the allocation jumps.
  double payment(double v_b, double q_b, int slot_b, int quad_points) const;

  double stock() const { return stock_; }
  const MarketSpec& spec() const { return *spec_; }

 private:
  friend double payment_counterfactual(int, const TypeProfile&, double,
                                       const MarketSpec&, Continuation);
  const MarketSpec* spec_;
  Continuation continuation_;
  double stock_;
  std::vector<double> phi_, qty_, cum_;
  std::vector<int> slot_;
};

// One full truthful period: threshold x*, greedy allocation, envelope
// payments, zero penalties, and the post-period stock.
MechanismOutcome run_period(const TypeProfile& profile, double stock,
                            const MarketSpec& spec, Continuation continuation,
                            int quad_points = 64);

// Canonical payment rule (the envelope integral) for one buyer.
double payment_integral(int buyer, const TypeProfile& profile, double stock,
                        const MarketSpec& spec, Continuation continuation,
                        int quad_points = 64);

// Displacement-priced payment: re-allocates x* among the rivals, prices each
// displaced unit at the value the buyer would need to tie that rival.
// Experimental companion to payment_integral; the two rules are compared
// empirically, not asserted equal.
double payment_counterfactual(int buyer, const TypeProfile& profile, double stock,
                              const MarketSpec& spec, Continuation continuation);

// Probability (over rival redraws, arrival count included) that the buyer's
// allocation equals its reported demand exactly; the denominator of the
// overbid penalty.
double full_allocation_probability(BuyerType reported, double stock,
                                   const MarketSpec& spec, Continuation continuation,
                                   int mc_samples, Rng& rng);

// Penalty charged when an allocation exceeds the observed true demand:
// value_cap * reported_q / p_hat, with a large finite cap when p_hat = 0.
double overbid_penalty(double reported_q, double allocated, double true_q,
                       double p_hat, const MarketSpec& spec);

InterimEstimate interim_allocation(BuyerType reported, double stock,
                                   const MarketSpec& spec, Continuation continuation,
                                   int mc_samples, Rng& rng);

// Interim utility of a buyer with `true_type` reporting `reported`:
// E[v min(q, a) - payment - penalty] over rival profiles. The overbid
// penalty probability is estimated once per call from a derived stream.
InterimEstimate interim_utility(BuyerType true_type, BuyerType reported,
                                double stock, const MarketSpec& spec,
                                Continuation continuation, int mc_samples, Rng& rng,
                                int quad_points = 64, int penalty_samples = 10000);

}  // namespace dskp
