#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dskp/distributions.hpp"
#include "dskp/rng.hpp"

namespace dskp {

// One buyer's private pair: marginal value per unit and demanded quantity.
// The dummy type used to pad non-arrived slots is exactly (0, 0).
struct BuyerType {
  double value = 0.0;
  double quantity = 0.0;

  bool is_dummy() const { return value == 0.0 && quantity == 0.0; }
};

// Padded length-N type vector for one period. Slots at index >= arrivals
// hold the dummy type and never influence allocations.
struct TypeProfile {
  std::vector<BuyerType> entries;
  int arrivals = 0;
};

struct RegularityReport {
  bool holds = true;
  double worst_violation = 0.0;  // most negative forward difference found
  double at_value = 0.0;
  double at_quantity = 0.0;
  char axis = '-';  // 'v' or 'q' where the worst violation sits
};

// Immutable market environment: horizon, stock, discount, and the arrival /
// quantity / conditional-value distributions. Shareable across threads;
// sampling state lives in the caller's Rng.
class MarketSpec {
 public:
  MarketSpec(int horizon, double stock_cap, double discount, ArrivalDist arrival,
             QuantityDist quantity, ValueDist value,
             std::optional<double> value_cap = std::nullopt,
             double value_cap_quantile = 0.9999,
             double value_cap_q_epsilon_frac = 0.05);

  // The Poisson(10) / Uniform(0,2) / Exponential(q) market with the given
  // horizon and stock; the default configuration of the simulator.
  static MarketSpec standard(int horizon, double stock_cap, double discount = 0.99,
                             double poisson_lambda = 10.0, int max_arrivals = 30,
                             double quantity_upper = 2.0);

  static MarketSpec from_json(const nlohmann::json& j);
  static MarketSpec load(const std::string& path);
  nlohmann::json to_json() const;

  int horizon() const { return horizon_; }
  double stock_cap() const { return stock_cap_; }
  double discount() const { return discount_; }
  int max_buyers() const { return arrival_.max_arrivals(); }
  // Effective top-of-support value used by the penalty scheme (finite even
  // for the unbounded exponential family; see README on the value cap).
  double value_cap() const { return value_cap_; }
  double quantity_upper() const { return quantity_.upper(); }

  const ArrivalDist& arrival() const { return arrival_; }
  const QuantityDist& quantity() const { return quantity_; }
  const ValueDist& value() const { return value_; }

 private:
  int horizon_;
  double stock_cap_;
  double discount_;
  ArrivalDist arrival_;
  QuantityDist quantity_;
  ValueDist value_;
  double value_cap_;
};

// Draws arrivals ~ g(n), then each arriving type iid from f(q) and f(v|q);
// remaining slots are dummies.
TypeProfile sample_profile(const MarketSpec& spec, Rng& rng);

// phi(v, q) = v - (1 - F(v|q)) / f(v|q). Throws std::domain_error when the
// conditional density underflows inside the support.
double virtual_value(double v, double q, const MarketSpec& spec);

// Scans virtual_value on a grid and reports the most negative forward
// difference along each axis. Default ranges cover [0, value_cap] x
// (0, q_upper]; pass explicit ranges to probe sub-rectangles.
RegularityReport check_regularity(const MarketSpec& spec, int grid_v, int grid_q,
                                  std::optional<std::pair<double, double>> v_range = std::nullopt,
                                  std::optional<std::pair<double, double>> q_range = std::nullopt,
                                  double tolerance = 1e-9);

// Inverse of phi(., q): returns v with virtual_value(v, q) = target, clamped
// to the lower support when target <= phi(0, q). Closed form for the
// exponential family, monotone bisection otherwise. Throws
// std::runtime_error if phi is detected to be non-monotone on the bracket.
double invert_virtual_value(double target, double q, const MarketSpec& spec,
                            double tol = 1e-10);

}  // namespace dskp
