#include "dskp/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace dskp {

Mlp::Mlp(std::vector<int> widths) : widths_(std::move(widths)) {
  if (widths_.size() < 2) throw std::invalid_argument("need input and output widths");
  for (int w : widths_)
    if (w < 1) throw std::invalid_argument("layer widths must be >= 1");
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    weights_.emplace_back(Eigen::MatrixXd::Zero(widths_[l + 1], widths_[l]));
    biases_.emplace_back(Eigen::VectorXd::Zero(widths_[l + 1]));
  }
}

Mlp Mlp::random(std::vector<int> widths, Rng& rng, double final_scale) {
  Mlp net(std::move(widths));
  for (int l = 0; l < net.layer_count(); ++l) {
    // fan-in uniform init; deliberately small final layer
    const double bound = l + 1 == net.layer_count()
                             ? final_scale
                             : 1.0 / std::sqrt(static_cast<double>(net.widths_[l]));
    for (Eigen::Index r = 0; r < net.weights_[l].rows(); ++r)
      for (Eigen::Index c = 0; c < net.weights_[l].cols(); ++c)
        net.weights_[l](r, c) = rng.uniform(-bound, bound);
    for (Eigen::Index r = 0; r < net.biases_[l].size(); ++r)
      net.biases_[l](r) = rng.uniform(-bound, bound);
  }
  return net;
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& input) const {
  Workspace ws;
  return forward_batch(input, ws).col(0);
}

Eigen::MatrixXd Mlp::forward_batch(const Eigen::MatrixXd& input, Workspace& ws) const {
  if (input.rows() != input_width())
    throw std::invalid_argument("input width mismatch");
  ws.post.assign(layer_count() + 1, Eigen::MatrixXd());
  ws.post[0] = input;
  for (int l = 0; l < layer_count(); ++l) {
    Eigen::MatrixXd z = (weights_[l] * ws.post[l]).colwise() + biases_[l];
    if (l + 1 < layer_count()) z = z.array().tanh();
    ws.post[l + 1] = std::move(z);
  }
  return ws.post.back();
}

void Mlp::Gradients::setZero() {
  for (auto& w : weights) w.setZero();
  for (auto& b : biases) b.setZero();
}

Mlp::Gradients Mlp::zero_gradients() const {
  Gradients g;
  for (int l = 0; l < layer_count(); ++l) {
    g.weights.emplace_back(Eigen::MatrixXd::Zero(weights_[l].rows(), weights_[l].cols()));
    g.biases.emplace_back(Eigen::VectorXd::Zero(biases_[l].size()));
  }
  return g;
}

void Mlp::backward(const Workspace& ws, const Eigen::MatrixXd& upstream,
                   Gradients& grads, Eigen::MatrixXd* input_grad) const {
  Eigen::MatrixXd delta = upstream;  // dL/dz at the output (linear layer)
  for (int l = layer_count() - 1; l >= 0; --l) {
    grads.weights[l] += delta * ws.post[l].transpose();
    grads.biases[l] += delta.rowwise().sum();
    if (l > 0) {
      // back through tanh: post[l] stores tanh(z)
      delta = (weights_[l].transpose() * delta).cwiseProduct(
          (1.0 - ws.post[l].array().square()).matrix());
    } else if (input_grad) {
      *input_grad = weights_[0].transpose() * delta;
    }
  }
}

void Mlp::soft_update_from(const Mlp& online, double tau) {
  for (int l = 0; l < layer_count(); ++l) {
    weights_[l] = tau * online.weights_[l] + (1.0 - tau) * weights_[l];
    biases_[l] = tau * online.biases_[l] + (1.0 - tau) * biases_[l];
  }
}

nlohmann::json Mlp::to_json() const {
  nlohmann::json j;
  j["widths"] = widths_;
  nlohmann::json layers = nlohmann::json::array();
  for (int l = 0; l < layer_count(); ++l) {
    nlohmann::json layer;
    std::vector<double> w(weights_[l].size());
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        w.data(), weights_[l].rows(), weights_[l].cols()) = weights_[l];
    layer["weights"] = w;  // row-major
    layer["biases"] = std::vector<double>(biases_[l].data(),
                                          biases_[l].data() + biases_[l].size());
    layers.push_back(std::move(layer));
  }
  j["layers"] = std::move(layers);
  return j;
}

Mlp Mlp::from_json(const nlohmann::json& j) {
  Mlp net(j.at("widths").get<std::vector<int>>());
  const auto& layers = j.at("layers");
  for (int l = 0; l < net.layer_count(); ++l) {
    const auto w = layers.at(l).at("weights").get<std::vector<double>>();
    const auto b = layers.at(l).at("biases").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(w.size()) != net.weights_[l].size() ||
        static_cast<Eigen::Index>(b.size()) != net.biases_[l].size())
      throw std::runtime_error("network file shape mismatch");
    net.weights_[l] = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                                     Eigen::Dynamic, Eigen::RowMajor>>(
        w.data(), net.weights_[l].rows(), net.weights_[l].cols());
    net.biases_[l] = Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
  }
  return net;
}

AdamOptimizer::AdamOptimizer(const Mlp& net, double lr, double beta1, double beta2,
                             double epsilon)
    : lr_(lr), beta1_(beta1), beta2_(beta2), epsilon_(epsilon),
      m_(net.zero_gradients()), v_(net.zero_gradients()) {}

void AdamOptimizer::step(Mlp& net, const Mlp::Gradients& grads) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, t_);
  const double c2 = 1.0 - std::pow(beta2_, t_);
  for (std::size_t l = 0; l < grads.weights.size(); ++l) {
    m_.weights[l] = beta1_ * m_.weights[l] + (1.0 - beta1_) * grads.weights[l];
    v_.weights[l] = beta2_ * v_.weights[l] +
                    (1.0 - beta2_) * grads.weights[l].array().square().matrix();
    net.weights()[l] -=
        (lr_ * (m_.weights[l].array() / c1) /
         ((v_.weights[l].array() / c2).sqrt() + epsilon_)).matrix();
    m_.biases[l] = beta1_ * m_.biases[l] + (1.0 - beta1_) * grads.biases[l];
    v_.biases[l] = beta2_ * v_.biases[l] +
                   (1.0 - beta2_) * grads.biases[l].array().square().matrix();
    net.biases()[l] -=
        (lr_ * (m_.biases[l].array() / c1) /
         ((v_.biases[l].array() / c2).sqrt() + epsilon_)).matrix();
  }
}

}  // namespace dskp
