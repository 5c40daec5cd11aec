#include "dskp/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dskp {

namespace {
constexpr double kDensityFloor = 1e-300;
}

// ---------------------------------------------------------------------------
// ArrivalDist

ArrivalDist ArrivalDist::truncated_poisson(double lambda, int max_arrivals) {
  if (lambda <= 0.0) throw std::invalid_argument("poisson lambda must be > 0");
  if (max_arrivals < 1) throw std::invalid_argument("max arrivals must be >= 1");
  std::vector<double> w(max_arrivals);
  // log-space Poisson masses on {1..N}, renormalized
  double logw = std::log(lambda) - lambda;  // n = 1
  for (int n = 1; n <= max_arrivals; ++n) {
    w[n - 1] = std::exp(logw);
    logw += std::log(lambda) - std::log(static_cast<double>(n + 1));
  }
  return tabulated(std::move(w));
}

ArrivalDist ArrivalDist::degenerate(int n) {
  if (n < 1) throw std::invalid_argument("degenerate arrivals must be >= 1");
  std::vector<double> w(n, 0.0);
  w[n - 1] = 1.0;
  return tabulated(std::move(w));
}

ArrivalDist ArrivalDist::tabulated(std::vector<double> weights) {
  if (weights.empty()) throw std::invalid_argument("empty arrival pmf");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0 || !std::isfinite(w)) throw std::invalid_argument("bad arrival weight");
    total += w;
  }
  if (total <= 0.0) throw std::invalid_argument("arrival pmf sums to zero");
  ArrivalDist d;
  d.pmf_.resize(weights.size());
  d.cdf_.resize(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    d.pmf_[i] = weights[i] / total;
    acc += d.pmf_[i];
    d.cdf_[i] = acc;
  }
  d.cdf_.back() = 1.0;
  return d;
}

int ArrivalDist::sample(Rng& rng) const {
  const double u = rng.uniform();
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  return static_cast<int>(it - cdf_.begin()) + 1;
}

double ArrivalDist::pmf(int n) const {
  if (n < 1 || n > max_arrivals()) return 0.0;
  return pmf_[n - 1];
}

double ArrivalDist::mean() const {
  double m = 0.0;
  for (int n = 1; n <= max_arrivals(); ++n) m += n * pmf_[n - 1];
  return m;
}

double ArrivalDist::stddev() const {
  const double m = mean();
  double s2 = 0.0;
  for (int n = 1; n <= max_arrivals(); ++n) s2 += (n - m) * (n - m) * pmf_[n - 1];
  return std::sqrt(s2);
}

// ---------------------------------------------------------------------------
// Tabulated CDF helpers

void validate_tabulated_cdf(const std::vector<double>& grid,
                            const std::vector<double>& cdf) {
  if (grid.size() != cdf.size() || grid.size() < 2)
    throw std::invalid_argument("tabulated cdf needs >= 2 aligned grid points");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (!(grid[i] < grid[i + 1])) throw std::invalid_argument("grid not increasing");
    if (cdf[i + 1] < cdf[i]) throw std::invalid_argument("cdf not nondecreasing");
  }
  if (cdf.front() < 0.0 || std::abs(cdf.back() - 1.0) > 1e-12)
    throw std::invalid_argument("tabulated cdf must end at 1");
}

double tabulated_cdf_eval(const std::vector<double>& grid,
                          const std::vector<double>& cdf, double x) {
  if (x <= grid.front()) return cdf.front();
  if (x >= grid.back()) return 1.0;
  const auto it = std::upper_bound(grid.begin(), grid.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - grid.begin());
  const double t = (x - grid[i - 1]) / (grid[i] - grid[i - 1]);
  return cdf[i - 1] + t * (cdf[i] - cdf[i - 1]);
}

double tabulated_cdf_sample(const std::vector<double>& grid,
                            const std::vector<double>& cdf, double u) {
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  std::size_t i = static_cast<std::size_t>(it - cdf.begin());
  if (i == 0) return grid.front();
  if (i >= cdf.size()) return grid.back();
  const double span = cdf[i] - cdf[i - 1];
  if (span <= 0.0) return grid[i];
  const double t = (u - cdf[i - 1]) / span;
  return grid[i - 1] + t * (grid[i] - grid[i - 1]);
}

// ---------------------------------------------------------------------------
// QuantityDist

QuantityDist QuantityDist::uniform(double upper) {
  if (upper <= 0.0) throw std::invalid_argument("uniform upper must be > 0");
  QuantityDist d;
  d.family_ = Uniform{upper};
  return d;
}

QuantityDist QuantityDist::degenerate(double q0) {
  if (q0 < 0.0) throw std::invalid_argument("quantity must be >= 0");
  QuantityDist d;
  d.family_ = Degenerate{q0};
  return d;
}

QuantityDist QuantityDist::tabulated(std::vector<double> grid, std::vector<double> cdf) {
  validate_tabulated_cdf(grid, cdf);
  if (grid.front() < 0.0) throw std::invalid_argument("quantity support must be >= 0");
  QuantityDist d;
  d.family_ = Tabulated{std::move(grid), std::move(cdf)};
  return d;
}

double QuantityDist::sample(Rng& rng) const {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Uniform>) return rng.uniform(0.0, f.hi);
        else if constexpr (std::is_same_v<T, Degenerate>) return f.q0;
        else return tabulated_cdf_sample(f.grid, f.cdf, rng.uniform());
      },
      family_);
}

double QuantityDist::cdf(double q) const {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Uniform>)
          return std::clamp(q / f.hi, 0.0, 1.0);
        else if constexpr (std::is_same_v<T, Degenerate>)
          return q >= f.q0 ? 1.0 : 0.0;
        else
          return tabulated_cdf_eval(f.grid, f.cdf, q);
      },
      family_);
}

double QuantityDist::upper() const {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Uniform>) return f.hi;
        else if constexpr (std::is_same_v<T, Degenerate>) return f.q0;
        else return f.grid.back();
      },
      family_);
}

// ---------------------------------------------------------------------------
// ValueDist

ValueDist ValueDist::exponential_rate_q() {
  ValueDist d;
  d.family_ = ExponentialRateQ{};
  return d;
}

ValueDist ValueDist::degenerate(double v0) {
  if (v0 < 0.0) throw std::invalid_argument("value must be >= 0");
  ValueDist d;
  d.family_ = Degenerate{v0};
  return d;
}

ValueDist ValueDist::tabulated(std::vector<double> grid, std::vector<double> cdf) {
  validate_tabulated_cdf(grid, cdf);
  if (grid.front() < 0.0) throw std::invalid_argument("value support must be >= 0");
  ValueDist d;
  d.family_ = Tabulated{std::move(grid), std::move(cdf)};
  return d;
}

double ValueDist::sample(double q, Rng& rng) const {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ExponentialRateQ>) {
          if (q <= 0.0) return 0.0;  // dummy-adjacent corner; never arrives with q=0
          return rng.exponential(q);
        } else if constexpr (std::is_same_v<T, Degenerate>) {
          return f.v0;
        } else {
          return tabulated_cdf_sample(f.grid, f.cdf, rng.uniform());
        }
      },
      family_);
}

double ValueDist::cdf(double v, double q) const {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ExponentialRateQ>) {
          if (v <= 0.0) return 0.0;
          return -std::expm1(-q * v);
        } else if constexpr (std::is_same_v<T, Degenerate>) {
          return v >= f.v0 ? 1.0 : 0.0;
        } else {
          return tabulated_cdf_eval(f.grid, f.cdf, v);
        }
      },
      family_);
}

double ValueDist::pdf(double v, double q) const {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ExponentialRateQ>) {
          if (v < 0.0) return 0.0;
          return q * std::exp(-q * v);
        } else if constexpr (std::is_same_v<T, Degenerate>) {
          return 0.0;  // point mass has no density
        } else {
          // central difference on the piecewise-linear CDF
          const double h = 1e-4 * (f.grid.back() - f.grid.front());
          return (tabulated_cdf_eval(f.grid, f.cdf, v + h) -
                  tabulated_cdf_eval(f.grid, f.cdf, v - h)) /
                 (2.0 * h);
        }
      },
      family_);
}

double ValueDist::quantile(double p, double q) const {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("quantile level outside [0,1]");
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ExponentialRateQ>) {
          if (q <= 0.0) throw std::domain_error("exponential quantile needs q > 0");
          return -std::log1p(-p) / q;
        } else if constexpr (std::is_same_v<T, Degenerate>) {
          return f.v0;
        } else {
          return tabulated_cdf_sample(f.grid, f.cdf, p);
        }
      },
      family_);
}

double ValueDist::upper(double q) const {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ExponentialRateQ>) {
          (void)q;
          return std::numeric_limits<double>::infinity();
        } else if constexpr (std::is_same_v<T, Degenerate>) {
          return f.v0;
        } else {
          return f.grid.back();
        }
      },
      family_);
}

double ValueDist::inverse_hazard(double v, double q) const {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ExponentialRateQ>) {
          if (q <= 0.0) throw std::domain_error("value density is zero at q = 0");
          return 1.0 / q;
        } else if constexpr (std::is_same_v<T, Degenerate>) {
          if (v >= f.v0) return 0.0;  // F = 1 at the top of the support
          throw std::domain_error("value density is zero below a point mass");
        } else {
          const double F = tabulated_cdf_eval(f.grid, f.cdf, v);
          if (F >= 1.0 - 1e-12) return 0.0;
          const double dens = pdf(v, q);
          if (dens < kDensityFloor)
            throw std::domain_error("value density underflow inside support");
          return (1.0 - F) / dens;
        }
      },
      family_);
}

bool ValueDist::has_analytic_virtual_inverse() const {
  return std::holds_alternative<ExponentialRateQ>(family_);
}

double ValueDist::analytic_virtual_inverse(double target, double q) const {
  // v - 1/q = target
  return std::max(0.0, target + 1.0 / q);
}

}  // namespace dskp
