#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dskp/market.hpp"
#include "dskp/mlp.hpp"

namespace dskp {

struct Transition {
  double state_time = 0.0;   // t / T
  double state_stock = 0.0;  // q / Q
  double action = 0.0;       // raw sell quantity
  double reward = 0.0;
  double next_time = 0.0;
  double next_stock = 0.0;
  bool terminal = false;
};

// Fixed-capacity ring with FIFO eviction and per-minibatch sampling without
// replacement.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);
  void push(const Transition& t);
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t logical) const;  // 0 = oldest
  std::vector<std::size_t> sample_indices(std::size_t count, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // next write position once full
  std::vector<Transition> entries_;
};

struct DdpgConfig {
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  double soft_tau = 1e-4;
  int minibatch = 64;
  double random_fraction = 0.1;
  int episodes = 10000;
  double noise_scale_initial = 0.1;  // fraction of stock cap
  double noise_scale_final = 0.01;
  std::size_t replay_capacity = 100000;
  std::vector<int> hidden = {64, 64, 64};
  double divergence_guard = 1e6;
};

// Actor/critic pair with targets. State is (t/T, q/Q); the actor output is
// squashed to [0,1] and scaled by the current stock.
struct DdpgAgent {
  Mlp actor, critic, actor_target, critic_target;
  int horizon = 0;
  double stock_cap = 0.0;

  double action(int period, double stock) const;

  nlohmann::json to_json() const;
  static DdpgAgent from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static DdpgAgent load(const std::string& path);
};

struct DdpgTrainStats {
  long updates = 0;
  double last_critic_loss = 0.0;
  std::size_t buffer_size_after_random_phase = 0;
};

// Algorithm: uniform random actions for the first random_fraction of the
// episodes (transitions only), then per environment step one minibatch
// update of critic (TD target through the targets) and actor (deterministic
// policy gradient through the critic), followed by a soft target update.
// Throws std::runtime_error if the critic loss passes the divergence guard.
DdpgAgent train_ddpg(const MarketSpec& spec, const DdpgConfig& cfg, Rng& rng,
                     DdpgTrainStats* stats = nullptr);

// Mean discounted revenue of the noise-free actor over fresh test episodes.
double evaluate_policy(const DdpgAgent& agent, const MarketSpec& spec, int episodes,
                       Rng& rng);

}  // namespace dskp
