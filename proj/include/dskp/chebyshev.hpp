#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

namespace dskp {

// Chebyshev polynomial basis on [0, stock_cap]. Inputs are mapped to
// [-1, 1] before the three-term recurrence; the recurrence is numerically
// meaningless outside that interval.
class ChebyshevBasis {
 public:
  ChebyshevBasis(int degree, double stock_cap);

  int degree() const { return degree_; }
  double stock_cap() const { return stock_cap_; }

  // sum_j coeffs[j] * T_j(2s/cap - 1); throws std::domain_error outside
  // [0, cap] beyond a relative 1e-9 slack.
  double eval(std::span<const double> coeffs, double s) const;
  // d/ds of the same expansion (derivative recurrence, no differencing).
  double eval_derivative(std::span<const double> coeffs, double s) const;

  // Standard Chebyshev nodes rescaled to (0, cap):
  // s_k = cap/2 * (1 + cos((2k-1) pi / (2m))), k = 1..m.
  std::vector<double> nodes(int m) const;

  // m x (degree+1) design matrix of basis values at the given abscissae.
  Eigen::MatrixXd design(const std::vector<double>& abscissae) const;

 private:
  double normalize(double s) const;
  int degree_;
  double stock_cap_;
};

// Per-period coefficient rows approximating the expected value-to-go
// E[V^t(q)]. Row t covers period t (1-based); period horizon+1 is the
// all-zero boundary.
class ValueApprox {
 public:
  ValueApprox(ChebyshevBasis basis, int horizon);
  ValueApprox(ChebyshevBasis basis, Eigen::MatrixXd coeffs);

  int horizon() const { return static_cast<int>(coeffs_.rows()); }
  const ChebyshevBasis& basis() const { return basis_; }
  const Eigen::MatrixXd& coeffs() const { return coeffs_; }
  void set_row(int period, const Eigen::VectorXd& row);

  // Vtilde^t(s); period == horizon()+1 returns 0 (boundary condition).
  double value(int period, double s) const;
  double derivative(int period, double s) const;

  // Versioned JSON: {version, T, n, stock_cap, coeffs, seed, episodes}.
  nlohmann::json to_json() const;
  static ValueApprox from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static ValueApprox load(const std::string& path);

  std::uint64_t seed = 0;   // training provenance
  std::int64_t episodes = 0;

 private:
  ChebyshevBasis basis_;
  Eigen::MatrixXd coeffs_;  // horizon x (degree+1)
};

// Discounted next-period continuation delta * Vtilde^{t+1}(.). A
// default-constructed view is the zero boundary (used at t = horizon).
class Continuation {
 public:
  Continuation() = default;
  Continuation(const ValueApprox* approx, int next_period, double discount)
      : approx_(approx), next_period_(next_period), discount_(discount) {}

  bool is_zero() const {
    return approx_ == nullptr || next_period_ > approx_->horizon();
  }
  double value(double s) const {
    return is_zero() ? 0.0 : discount_ * approx_->value(next_period_, s);
  }
  double derivative(double s) const {
    return is_zero() ? 0.0 : discount_ * approx_->derivative(next_period_, s);
  }

 private:
  const ValueApprox* approx_ = nullptr;
  int next_period_ = 0;
  double discount_ = 0.0;
};

}  // namespace dskp
