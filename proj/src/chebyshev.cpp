#include "dskp/chebyshev.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace dskp {

ChebyshevBasis::ChebyshevBasis(int degree, double stock_cap)
    : degree_(degree), stock_cap_(stock_cap) {
  if (degree_ < 0) throw std::invalid_argument("degree must be >= 0");
  if (stock_cap_ <= 0.0) throw std::invalid_argument("stock cap must be > 0");
}

double ChebyshevBasis::normalize(double s) const {
  const double slack = 1e-9 * stock_cap_;
  if (s < -slack || s > stock_cap_ + slack)
    throw std::domain_error("basis evaluated outside [0, stock_cap]");
  const double t = 2.0 * s / stock_cap_ - 1.0;
  return std::clamp(t, -1.0, 1.0);
}

double ChebyshevBasis::eval(std::span<const double> coeffs, double s) const {
  const double t = normalize(s);
  double prev = 1.0;  // T_0
  double acc = coeffs.empty() ? 0.0 : coeffs[0];
  if (coeffs.size() == 1) return acc;
  double cur = t;  // T_1
  acc += coeffs[1] * cur;
  for (std::size_t j = 2; j < coeffs.size(); ++j) {
    const double next = 2.0 * t * cur - prev;
    prev = cur;
    cur = next;
    acc += coeffs[j] * cur;
  }
  return acc;
}

double ChebyshevBasis::eval_derivative(std::span<const double> coeffs, double s) const {
  const double t = normalize(s);
  // T'_{k+1} = 2 T_k + 2t T'_k - T'_{k-1}, chain rule dt/ds = 2/cap
  double T_prev = 1.0, T_cur = t;
  double D_prev = 0.0, D_cur = 1.0;
  double acc = 0.0;
  if (coeffs.size() > 1) acc += coeffs[1] * D_cur;
  for (std::size_t j = 2; j < coeffs.size(); ++j) {
    const double T_next = 2.0 * t * T_cur - T_prev;
    const double D_next = 2.0 * T_cur + 2.0 * t * D_cur - D_prev;
    T_prev = T_cur;
    T_cur = T_next;
    D_prev = D_cur;
    D_cur = D_next;
    acc += coeffs[j] * D_cur;
  }
  return acc * 2.0 / stock_cap_;
}

std::vector<double> ChebyshevBasis::nodes(int m) const {
  if (m < 1) throw std::invalid_argument("need at least one node");
  std::vector<double> out(m);
  for (int k = 1; k <= m; ++k)
    out[k - 1] = 0.5 * stock_cap_ * (1.0 + std::cos((2.0 * k - 1.0) * M_PI / (2.0 * m)));
  return out;
}

Eigen::MatrixXd ChebyshevBasis::design(const std::vector<double>& abscissae) const {
  Eigen::MatrixXd X(abscissae.size(), degree_ + 1);
  for (std::size_t r = 0; r < abscissae.size(); ++r) {
    const double t = normalize(abscissae[r]);
    double prev = 1.0, cur = t;
    X(r, 0) = 1.0;
    if (degree_ >= 1) X(r, 1) = t;
    for (int j = 2; j <= degree_; ++j) {
      const double next = 2.0 * t * cur - prev;
      prev = cur;
      cur = next;
      X(r, j) = cur;
    }
  }
  return X;
}

// ---------------------------------------------------------------------------

ValueApprox::ValueApprox(ChebyshevBasis basis, int horizon)
    : basis_(basis), coeffs_(Eigen::MatrixXd::Zero(horizon, basis.degree() + 1)) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
}

ValueApprox::ValueApprox(ChebyshevBasis basis, Eigen::MatrixXd coeffs)
    : basis_(basis), coeffs_(std::move(coeffs)) {
  if (coeffs_.cols() != basis_.degree() + 1)
    throw std::invalid_argument("coefficient width does not match basis degree");
}

void ValueApprox::set_row(int period, const Eigen::VectorXd& row) {
  coeffs_.row(period - 1) = row.transpose();
}

double ValueApprox::value(int period, double s) const {
  if (period > horizon()) return 0.0;  // boundary V^{T+1} = 0
  if (period < 1) throw std::out_of_range("period must be >= 1");
  const auto row = coeffs_.row(period - 1);
  return basis_.eval(std::span<const double>(row.data(), row.size()), s);
}

double ValueApprox::derivative(int period, double s) const {
  if (period > horizon()) return 0.0;
  if (period < 1) throw std::out_of_range("period must be >= 1");
  const auto row = coeffs_.row(period - 1);
  return basis_.eval_derivative(std::span<const double>(row.data(), row.size()), s);
}

nlohmann::json ValueApprox::to_json() const {
  nlohmann::json j;
  j["version"] = 1;
  j["kind"] = "chebyshev-value";
  j["T"] = horizon();
  j["n"] = basis_.degree();
  j["stock_cap"] = basis_.stock_cap();
  j["seed"] = seed;
  j["episodes"] = episodes;
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < coeffs_.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < coeffs_.cols(); ++c) row.push_back(coeffs_(r, c));
    rows.push_back(std::move(row));
  }
  j["coeffs"] = std::move(rows);
  return j;
}

ValueApprox ValueApprox::from_json(const nlohmann::json& j) {
  if (j.value("version", 0) != 1 || j.value("kind", "") != "chebyshev-value")
    throw std::runtime_error("not a version-1 chebyshev value file");
  const int T = j.at("T").get<int>();
  const int n = j.at("n").get<int>();
  ChebyshevBasis basis(n, j.at("stock_cap").get<double>());
  Eigen::MatrixXd coeffs(T, n + 1);
  const auto& rows = j.at("coeffs");
  if (static_cast<int>(rows.size()) != T)
    throw std::runtime_error("coefficient row count does not match T");
  for (int r = 0; r < T; ++r)
    for (int c = 0; c <= n; ++c) coeffs(r, c) = rows.at(r).at(c).get<double>();
  ValueApprox approx(basis, std::move(coeffs));
  approx.seed = j.value("seed", std::uint64_t{0});
  approx.episodes = j.value("episodes", std::int64_t{0});
  return approx;
}

void ValueApprox::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_json().dump(2) << "\n";
}

ValueApprox ValueApprox::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

}  // namespace dskp
