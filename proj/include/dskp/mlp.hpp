#pragma once

#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "dskp/rng.hpp"

namespace dskp {

// Small dense network: affine layers with tanh on the hidden ones, linear
// output. Gradients are exact reverse-mode, written out by hand; no autodiff
// framework behind it.
class Mlp {
 public:
  explicit Mlp(std::vector<int> widths);  // zero-initialized
  static Mlp random(std::vector<int> widths, Rng& rng, double final_scale = 3e-3);

  const std::vector<int>& widths() const { return widths_; }
  int input_width() const { return widths_.front(); }
  int output_width() const { return widths_.back(); }
  int layer_count() const { return static_cast<int>(weights_.size()); }

  std::vector<Eigen::MatrixXd>& weights() { return weights_; }
  std::vector<Eigen::VectorXd>& biases() { return biases_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

  Eigen::VectorXd forward(const Eigen::VectorXd& input) const;

  // Per-layer activations kept for the backward pass; columns are batch
  // entries throughout.
  struct Workspace {
    std::vector<Eigen::MatrixXd> post;  // post[0] = input, post[L] = output
  };
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& input, Workspace& ws) const;

  struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    void setZero();
  };
  Gradients zero_gradients() const;

  // upstream is dLoss/dOutput (same shape as the batch output). Accumulates
  // parameter gradients into `grads`; optionally returns dLoss/dInput.
  void backward(const Workspace& ws, const Eigen::MatrixXd& upstream,
                Gradients& grads, Eigen::MatrixXd* input_grad = nullptr) const;

  void soft_update_from(const Mlp& online, double tau);

  nlohmann::json to_json() const;
  static Mlp from_json(const nlohmann::json& j);

 private:
  std::vector<int> widths_;
  std::vector<Eigen::MatrixXd> weights_;  // weights_[l]: widths[l+1] x widths[l]
  std::vector<Eigen::VectorXd> biases_;
};

// Adam on one network's parameters; the standard update with bias
// correction.
class AdamOptimizer {
 public:
  AdamOptimizer(const Mlp& net, double lr, double beta1 = 0.9, double beta2 = 0.999,
                double epsilon = 1e-8);
  void step(Mlp& net, const Mlp::Gradients& grads);

 private:
  double lr_, beta1_, beta2_, epsilon_;
  long t_ = 0;
  Mlp::Gradients m_, v_;
};

}  // namespace dskp
