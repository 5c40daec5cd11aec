#include "dskp/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dskp {

namespace {
constexpr double kEqualityTol = 1e-9;       // allocation == reported demand
constexpr double kZeroProbPenaltyScale = 1e6;
}  // namespace

RivalSolver::RivalSolver(const MarketSpec& spec, Continuation continuation,
                         double stock)
    : spec_(&spec), continuation_(continuation), stock_(stock) {
  if (stock < 0.0) throw std::invalid_argument("stock must be >= 0");
}

void RivalSolver::set_rivals(std::span<const BuyerType> rivals,
                             std::span<const int> slots) {
  phi_.clear();
  qty_.clear();
  cum_.clear();
  slot_.clear();
  std::vector<int> idx;
  for (std::size_t i = 0; i < rivals.size(); ++i)
    if (rivals[i].quantity > 0.0) idx.push_back(static_cast<int>(i));
  std::vector<double> phis(rivals.size(), 0.0);
  for (int i : idx)
    phis[i] = virtual_value(rivals[i].value, rivals[i].quantity, *spec_);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (phis[a] != phis[b]) return phis[a] > phis[b];
    return slots[a] < slots[b];
  });
  double cum = 0.0;
  for (int i : idx) {
    phi_.push_back(phis[i]);
    qty_.push_back(rivals[i].quantity);
    cum += rivals[i].quantity;
    cum_.push_back(cum);
    slot_.push_back(slots[i]);
  }
}

void RivalSolver::set_rivals_from_profile(const TypeProfile& profile,
                                          int excluded_slot) {
  std::vector<BuyerType> rivals;
  std::vector<int> slots;
  for (int i = 0; i < profile.arrivals; ++i) {
    if (i == excluded_slot) continue;
    rivals.push_back(profile.entries[i]);
    slots.push_back(i);
  }
  set_rivals(rivals, slots);
}

RivalSolver::Solved RivalSolver::solve(double phi_b, double q_b, int slot_b) const {
  const int K = static_cast<int>(phi_.size());
  // insertion rank of the buyer (stable order by slot on phi ties)
  int pos = 0;
  while (pos < K &&
         (phi_[pos] > phi_b || (phi_[pos] == phi_b && slot_[pos] < slot_b)))
    ++pos;
  const double buyer_qty = std::max(q_b, 0.0);
  const double buyer_start = pos == 0 ? 0.0 : cum_[pos - 1];
  const double rival_total = K == 0 ? 0.0 : cum_.back();
  const double cap = std::min(stock_, rival_total + buyer_qty);

  Solved out;
  if (cap <= 0.0) return out;

  double x_star = cap;
  double seg_start = 0.0;
  bool found = false;
  for (int j = 0; j <= K && !found && seg_start < cap; ++j) {
    double seg_phi, seg_len;
    if (j == pos) {
      if (buyer_qty <= 0.0) continue;  // transparent buyer, zero-width segment
      seg_phi = phi_b;
      seg_len = buyer_qty;
    } else {
      const int r = j < pos ? j : j - 1;
      if (r >= K) break;
      seg_phi = phi_[r];
      seg_len = qty_[r];
    }
    const double seg_end = std::min(seg_start + seg_len, cap);
    if (seg_phi - continuation_.derivative(stock_ - seg_start) < 0.0) {
      x_star = seg_start;
      found = true;
      break;
    }
    if (seg_phi - continuation_.derivative(stock_ - seg_end) >= 0.0) {
      seg_start = seg_end;
      continue;
    }
    double lo = seg_start, hi = seg_end;
    const double tol = 1e-12 * std::max(1.0, cap);
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      if (seg_phi - continuation_.derivative(stock_ - mid) >= 0.0)
        lo = mid;
      else
        hi = mid;
    }
    x_star = 0.5 * (lo + hi);
    found = true;
  }

  out.x_star = x_star;
  out.buyer_alloc = std::clamp(x_star - buyer_start, 0.0, buyer_qty);
  return out;
}

namespace {

// Composite Simpson over [a, b] with an even interval count; endpoints are
// nudged inward so jump points sitting exactly on a piece boundary do not
// poison the end weights.
template <typename F>
double simpson(F&& f, double a, double b, int intervals) {
  if (b <= a) return 0.0;
  if (intervals < 2) intervals = 2;
  if (intervals % 2) ++intervals;
  const double h = (b - a) / intervals;
  const double nudge = 1e-12 * (b - a);
  double acc = f(a + nudge) + f(b - nudge);
  for (int i = 1; i < intervals; ++i)
    acc += f(a + h * i) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace

double RivalSolver::payment(double v_b, double q_b, int slot_b,
                            int quad_points) const {
  if (q_b <= 0.0 || v_b <= 0.0) return 0.0;
  const double phi_b = virtual_value(v_b, q_b, *spec_);
  const double a_b = solve(phi_b, q_b, slot_b).buyer_alloc;
  if (a_b <= 0.0) return 0.0;

  // Rank ties are the only jump points of the counterfactual allocation;
  // split the integral there (plus the phi = 0 crossing where the seller
  // stops selling at the horizon boundary).
  std::vector<double> cuts{0.0, v_b};
  auto add_cut = [&](double target_phi) {
    const double tau = invert_virtual_value(target_phi, q_b, *spec_);
    if (tau > 1e-12 && tau < v_b - 1e-12) cuts.push_back(tau);
  };
  add_cut(0.0);
  for (double rp : phi_) add_cut(rp);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-12; }),
             cuts.end());

  auto alloc_at = [&](double tau) {
    return solve(virtual_value(tau, q_b, *spec_), q_b, slot_b).buyer_alloc;
  };

  double integral = 0.0;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double a = cuts[p], b = cuts[p + 1];
    const int intervals =
        std::max(4, static_cast<int>(std::lround(quad_points * (b - a) / v_b)));
    integral += simpson(alloc_at, a, b, intervals);
  }
  return v_b * a_b - integral;
}

MechanismOutcome run_period(const TypeProfile& profile, double stock,
                            const MarketSpec& spec, Continuation continuation,
                            int quad_points) {
  if (stock < 0.0 || stock > spec.stock_cap() + 1e-9)
    throw std::invalid_argument("stock outside [0, stock_cap]");
  const int slots = static_cast<int>(profile.entries.size());
  MechanismOutcome out;
  out.allocations.assign(slots, 0.0);
  out.payments.assign(slots, 0.0);
  out.penalties.assign(slots, 0.0);

  const RankedProfile ranked = rank(profile, spec);
  out.x_star = optimal_x(MarginalProfile(ranked, continuation, stock), stock);
  PeriodAllocation alloc = allocate_x(ranked, out.x_star);
  out.allocations = alloc.per_buyer;
  out.sold = alloc.sold;
  out.next_stock = stock - alloc.sold;

  RivalSolver solver(spec, continuation, stock);
  for (int i = 0; i < profile.arrivals; ++i) {
    if (out.allocations[i] <= 0.0) continue;  // zero allocation pays zero
    solver.set_rivals_from_profile(profile, i);
    out.payments[i] = solver.payment(profile.entries[i].value,
                                     profile.entries[i].quantity, i, quad_points);
  }
  return out;
}

double payment_integral(int buyer, const TypeProfile& profile, double stock,
                        const MarketSpec& spec, Continuation continuation,
                        int quad_points) {
  RivalSolver solver(spec, continuation, stock);
  solver.set_rivals_from_profile(profile, buyer);
  return solver.payment(profile.entries[buyer].value,
                        profile.entries[buyer].quantity, buyer, quad_points);
}

double payment_counterfactual(int buyer, const TypeProfile& profile, double stock,
                              const MarketSpec& spec, Continuation continuation) {
  const RankedProfile ranked = rank(profile, spec);
  const double x_star =
      optimal_x(MarginalProfile(ranked, continuation, stock), stock);
  const PeriodAllocation base = allocate_x(ranked, x_star);
  const double a_i = base.per_buyer[buyer];
  if (a_i <= 0.0) return 0.0;

  // Re-allocate the full x* among the rivals; each unit they gain was
  // displaced by the buyer and is priced at the value the buyer would need
  // to tie that rival's virtual value.
  TypeProfile rivals = profile;
  rivals.entries[buyer] = BuyerType{};  // zero quantity, transparent in rank
  const RankedProfile rival_ranked = rank(rivals, spec);
  const PeriodAllocation shadow = allocate_x(rival_ranked, x_star);

  const double q_i = profile.entries[buyer].quantity;
  double pay = 0.0;
  for (int r = 0; r < rival_ranked.count(); ++r) {
    const int j = rival_ranked.order[r];
    const double displaced = shadow.per_buyer[j] - base.per_buyer[j];
    if (displaced <= 0.0) continue;
    pay += invert_virtual_value(rival_ranked.phis[r], q_i, spec) * displaced;
  }
  return std::clamp(pay, 0.0, spec.value_cap() * a_i);
}

namespace {

// Draws the buyer's rivals (arrival count resampled, buyer always present,
// occupying slot 0) and reports the buyer's outcome for one period.
struct RivalSampler {
  const MarketSpec& spec;
  std::vector<BuyerType> rivals;
  std::vector<int> slots;

  void draw(Rng& rng) {
    const int n = spec.arrival().sample(rng);
    rivals.clear();
    slots.clear();
    for (int i = 1; i < n; ++i) {
      const double q = spec.quantity().sample(rng);
      const double v = spec.value().sample(q, rng);
      rivals.push_back(BuyerType{v, q});
      slots.push_back(i);
    }
  }
};

InterimEstimate summarize(double sum, double sum_sq, long n) {
  InterimEstimate est;
  est.samples = n;
  est.mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - est.mean * est.mean);
  est.stderr_ = std::sqrt(var / n);
  return est;
}

}  // namespace

double full_allocation_probability(BuyerType reported, double stock,
                                   const MarketSpec& spec, Continuation continuation,
                                   int mc_samples, Rng& rng) {
  if (mc_samples < 1) throw std::invalid_argument("need at least one sample");
  if (reported.quantity <= 0.0) return 1.0;  // zero demand is always met
  const double phi_b =
      virtual_value(reported.value, reported.quantity, spec);
  RivalSolver solver(spec, continuation, stock);
  RivalSampler sampler{spec};
  long hits = 0;
  for (int s = 0; s < mc_samples; ++s) {
    sampler.draw(rng);
    solver.set_rivals(sampler.rivals, sampler.slots);
    const double a = solver.solve(phi_b, reported.quantity, 0).buyer_alloc;
    if (std::abs(a - reported.quantity) <= kEqualityTol) ++hits;
  }
  return static_cast<double>(hits) / mc_samples;
}

double overbid_penalty(double reported_q, double allocated, double true_q,
                       double p_hat, const MarketSpec& spec) {
  if (allocated <= true_q + kEqualityTol) return 0.0;
  if (p_hat <= 0.0)
    return kZeroProbPenaltyScale * spec.value_cap() * spec.quantity_upper();
  return spec.value_cap() * reported_q / p_hat;
}

InterimEstimate interim_allocation(BuyerType reported, double stock,
                                   const MarketSpec& spec, Continuation continuation,
                                   int mc_samples, Rng& rng) {
  if (mc_samples < 1) throw std::invalid_argument("need at least one sample");
  if (stock <= 0.0) return InterimEstimate{0.0, 0.0, mc_samples};
  const double phi_b =
      reported.quantity > 0.0
          ? virtual_value(reported.value, reported.quantity, spec)
          : 0.0;
  RivalSolver solver(spec, continuation, stock);
  RivalSampler sampler{spec};
  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < mc_samples; ++s) {
    sampler.draw(rng);
    solver.set_rivals(sampler.rivals, sampler.slots);
    const double a = reported.quantity > 0.0
                         ? solver.solve(phi_b, reported.quantity, 0).buyer_alloc
                         : 0.0;
    sum += a;
    sum_sq += a * a;
  }
  return summarize(sum, sum_sq, mc_samples);
}

InterimEstimate interim_utility(BuyerType true_type, BuyerType reported,
                                double stock, const MarketSpec& spec,
                                Continuation continuation, int mc_samples, Rng& rng,
                                int quad_points, int penalty_samples) {
  if (mc_samples < 1) throw std::invalid_argument("need at least one sample");
  if (stock <= 0.0) return InterimEstimate{0.0, 0.0, mc_samples};

  const bool can_overbid = reported.quantity > true_type.quantity + kEqualityTol;
  double p_hat = 1.0;
  if (can_overbid) {
    Rng penalty_rng = Rng::derive(rng.next_u64(), 0x9e11);
    p_hat = full_allocation_probability(reported, stock, spec, continuation,
                                        penalty_samples, penalty_rng);
  }

  const double phi_b =
      reported.quantity > 0.0
          ? virtual_value(reported.value, reported.quantity, spec)
          : 0.0;
  RivalSolver solver(spec, continuation, stock);
  RivalSampler sampler{spec};
  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < mc_samples; ++s) {
    sampler.draw(rng);
    solver.set_rivals(sampler.rivals, sampler.slots);
    double u = 0.0;
    if (reported.quantity > 0.0) {
      const double a = solver.solve(phi_b, reported.quantity, 0).buyer_alloc;
      double pay = 0.0;
      if (a > 0.0)
        pay = solver.payment(reported.value, reported.quantity, 0, quad_points);
      const double rho =
          overbid_penalty(reported.quantity, a, true_type.quantity, p_hat, spec);
      u = true_type.value * std::min(true_type.quantity, a) - pay - rho;
    }
    sum += u;
    sum_sq += u * u;
  }
  return summarize(sum, sum_sq, mc_samples);
}

}  // namespace dskp
