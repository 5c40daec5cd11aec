#pragma once

#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "dskp/rng.hpp"

namespace dskp {

// Built-in distribution families for the market primitives, plus a generic
// tabulated form (piecewise-linear CDF on a grid). Family selection is by
// string tag in the config schema; see MarketSpec::from_json.

// ---------------------------------------------------------------------------
// Number of arrivals per period, support {1, ..., N}.

class ArrivalDist {
 public:
  static ArrivalDist truncated_poisson(double lambda, int max_arrivals);
  static ArrivalDist degenerate(int n);
  static ArrivalDist tabulated(std::vector<double> weights);  // unnormalized

  int sample(Rng& rng) const;
  double pmf(int n) const;           // on {1..max_arrivals}
  int max_arrivals() const { return static_cast<int>(cdf_.size()); }
  double mean() const;
  double stddev() const;

 private:
  ArrivalDist() = default;
  std::vector<double> pmf_;  // index n-1
  std::vector<double> cdf_;
};

// ---------------------------------------------------------------------------
// Demanded quantity, support [0, upper].

class QuantityDist {
 public:
  static QuantityDist uniform(double upper);
  static QuantityDist degenerate(double q0);
  static QuantityDist tabulated(std::vector<double> grid, std::vector<double> cdf);

  double sample(Rng& rng) const;
  double cdf(double q) const;
  double upper() const;

 private:
  struct Uniform { double hi; };
  struct Degenerate { double q0; };
  struct Tabulated { std::vector<double> grid, cdf; };
  std::variant<Uniform, Degenerate, Tabulated> family_;
};

// ---------------------------------------------------------------------------
// Marginal value conditional on quantity.
//
// The exponential family uses the demanded quantity as its rate, so the
// inverse hazard (1-F)/f is exactly 1/q. Tabulated conditionals are
// q-independent; their hazard is evaluated by central differences.

class ValueDist {
 public:
  static ValueDist exponential_rate_q();
  static ValueDist degenerate(double v0);
  static ValueDist tabulated(std::vector<double> grid, std::vector<double> cdf);

  double sample(double q, Rng& rng) const;
  double cdf(double v, double q) const;
  double pdf(double v, double q) const;
  double quantile(double p, double q) const;
  // Upper end of the support (may be +inf for the exponential family).
  double upper(double q) const;

  // (1 - F(v|q)) / f(v|q), analytic where the family allows. Returns 0 when
  // F(v|q) = 1 (hazard term vanishes at the top of the support). Throws
  // std::domain_error when the density underflows inside the support.
  double inverse_hazard(double v, double q) const;

  bool has_analytic_virtual_inverse() const;
  // Solves v - inverse_hazard(v, q) = target in closed form (exponential
  // family only; callers fall back to bisection otherwise).
  double analytic_virtual_inverse(double target, double q) const;

 private:
  struct ExponentialRateQ {};
  struct Degenerate { double v0; };
  struct Tabulated { std::vector<double> grid, cdf; };
  std::variant<ExponentialRateQ, Degenerate, Tabulated> family_;
};

// Piecewise-linear interpolation of a tabulated CDF; shared by the
// quantity/value tabulated forms.
double tabulated_cdf_eval(const std::vector<double>& grid,
                          const std::vector<double>& cdf, double x);
double tabulated_cdf_sample(const std::vector<double>& grid,
                            const std::vector<double>& cdf, double u);
void validate_tabulated_cdf(const std::vector<double>& grid,
                            const std::vector<double>& cdf);

}  // namespace dskp
