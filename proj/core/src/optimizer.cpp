#include "cim/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "cim/rng.hpp"

namespace cim {

void OptimizerConfig::validate() const {
  if (!(base_lr > 0.0)) throw std::invalid_argument("OptimizerConfig: base_lr must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw std::invalid_argument("OptimizerConfig: momentum must be in [0, 1)");
  }
  if (!(weight_decay >= 0.0)) {
    throw std::invalid_argument("OptimizerConfig: weight_decay must be >= 0");
  }
  if (epochs < 1) throw std::invalid_argument("OptimizerConfig: epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("OptimizerConfig: batch_size must be >= 1");
}

double lr_at(const OptimizerConfig& cfg, int epoch) {
  cfg.validate();
  if (epoch < 0 || epoch >= cfg.epochs) {
    throw std::invalid_argument("lr_at: epoch " + std::to_string(epoch) +
                                " outside [0, " + std::to_string(cfg.epochs) + ")");
  }
  if (cfg.schedule == Schedule::Constant) return cfg.base_lr;
  const double phase =
      std::numbers::pi * static_cast<double>(epoch) / static_cast<double>(cfg.epochs);
  return 0.5 * cfg.base_lr * (1.0 + std::cos(phase));
}

std::vector<std::size_t> epoch_permutation(std::uint64_t seed, int epoch, std::size_t n) {
  SplitMix64 rng(seed_for(seed, static_cast<std::uint64_t>(epoch)));
  return random_permutation(n, rng);
}

void train_epoch(MlpModel& model, const std::vector<Sample>& data,
                 const OptimizerConfig& cfg, MomentumState& state, int epoch) {
  cfg.validate();
  if (data.empty()) throw std::invalid_argument("train_epoch: empty data");
  const std::size_t p = model.params().size();
  if (state.velocity.empty()) state.velocity.assign(p, 0.0);
  if (state.velocity.size() != p) {
    throw std::invalid_argument("train_epoch: momentum state size mismatch");
  }

  const double lr = lr_at(cfg, epoch);
  const auto perm = epoch_permutation(cfg.seed, epoch, data.size());

  ParamVector w = model.params();
  ParamVector batch_grad(p, 0.0);
  ParamVector sample_grad(p, 0.0);
  MlpWorkspace ws(model.spec());

  for (std::size_t start = 0; start < data.size(); start += cfg.batch_size) {
    const std::size_t end = std::min(data.size(), start + cfg.batch_size);
    const double inv = 1.0 / static_cast<double>(end - start);
    std::fill(batch_grad.begin(), batch_grad.end(), 0.0);
    for (std::size_t i = start; i < end; ++i) {
      loss_and_gradient(model.spec(), w, data[perm[i]], ws, sample_grad);
      for (std::size_t k = 0; k < p; ++k) batch_grad[k] += sample_grad[k];
    }
    for (std::size_t k = 0; k < p; ++k) {
      const double g = batch_grad[k] * inv + cfg.weight_decay * w[k];
      state.velocity[k] = cfg.momentum * state.velocity[k] + g;
      w[k] -= lr * state.velocity[k];
    }
  }
  model.set_params(std::move(w));
}

MlpModel train(MlpModel model, const std::vector<Sample>& data,
               const OptimizerConfig& cfg, const EpochHook& hook) {
  cfg.validate();
  if (data.empty()) throw std::invalid_argument("train: empty data");
  MomentumState state;
  for (int t = 0; t < cfg.epochs; ++t) {
    train_epoch(model, data, cfg, state, t);
    if (hook) hook(model, t, lr_at(cfg, t));
  }
  return model;
}

namespace {

OptimizerConfig base_config(int epochs, std::size_t batch_size, std::uint64_t seed) {
  OptimizerConfig cfg;
  cfg.momentum = 0.9;
  cfg.weight_decay = 0.0005;
  cfg.epochs = epochs;
  cfg.batch_size = batch_size;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

OptimizerConfig small_lr_config(int epochs, std::size_t batch_size, std::uint64_t seed) {
  OptimizerConfig cfg = base_config(epochs, batch_size, seed);
  cfg.base_lr = 0.0001;
  cfg.schedule = Schedule::Constant;
  return cfg;
}

OptimizerConfig big_lr_config(int epochs, std::size_t batch_size, std::uint64_t seed) {
  OptimizerConfig cfg = base_config(epochs, batch_size, seed);
  cfg.base_lr = 0.01;
  cfg.schedule = Schedule::Constant;
  return cfg;
}

OptimizerConfig anneal_lr_config(int epochs, std::size_t batch_size, std::uint64_t seed) {
  OptimizerConfig cfg = base_config(epochs, batch_size, seed);
  cfg.base_lr = 0.1;
  cfg.schedule = Schedule::Cosine;
  return cfg;
}

std::optional<OptimizerConfig> preset_config(std::string_view name, int epochs,
                                             std::size_t batch_size, std::uint64_t seed) {
  if (name == "small-lr") return small_lr_config(epochs, batch_size, seed);
  if (name == "big-lr") return big_lr_config(epochs, batch_size, seed);
  if (name == "anneal-lr") return anneal_lr_config(epochs, batch_size, seed);
  return std::nullopt;
}

}  // namespace cim
