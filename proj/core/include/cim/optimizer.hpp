#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "cim/mlp.hpp"

namespace cim {

enum class Schedule { Constant, Cosine };

/// SGD with classical heavy-ball momentum and coupled weight decay:
///   g <- mean batch gradient + weight_decay * w
///   v <- momentum * v + g
///   w <- w - lr(t) * v
struct OptimizerConfig {
  double base_lr = 0.1;
  double momentum = 0.9;
  double weight_decay = 0.0005;
  Schedule schedule = Schedule::Cosine;
  int epochs = 200;
  std::size_t batch_size = 128;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Learning rate of epoch t. Constant returns base_lr; cosine returns
/// 0.5 * base_lr * (1 + cos(pi * t / epochs)) (floor 0), stepped once per
/// epoch, so lr(0) == base_lr exactly and the sequence is strictly
/// decreasing. Throws if t is outside [0, epochs).
double lr_at(const OptimizerConfig& cfg, int epoch);

/// The pinned shuffle of epoch t: Fisher-Yates driven by a generator seeded
/// from (cfg seed, epoch), reproducible without storing permutations.
std::vector<std::size_t> epoch_permutation(std::uint64_t seed, int epoch, std::size_t n);

struct MomentumState {
  ParamVector velocity;
};

/// One pass over the data: shuffle, split into batches of batch_size (last
/// batch may be short), apply the update per batch. Gradients within a batch
/// are reduced in sample-index order, so training is bit-deterministic.
void train_epoch(MlpModel& model, const std::vector<Sample>& data,
                 const OptimizerConfig& cfg, MomentumState& state, int epoch);

using EpochHook = std::function<void(const MlpModel&, int epoch, double lr)>;

/// Runs cfg.epochs epochs of train_epoch, invoking hook (when set) with the
/// post-epoch model. Returns the trained model.
MlpModel train(MlpModel model, const std::vector<Sample>& data,
               const OptimizerConfig& cfg, const EpochHook& hook = {});

/// The three training regimes used throughout: small-lr (constant 0.0001),
/// big-lr (constant 0.01) and anneal-lr (cosine from 0.1). All use momentum
/// 0.9 and weight decay 0.0005.
OptimizerConfig small_lr_config(int epochs = 200, std::size_t batch_size = 128,
                                std::uint64_t seed = 0);
OptimizerConfig big_lr_config(int epochs = 200, std::size_t batch_size = 128,
                              std::uint64_t seed = 0);
OptimizerConfig anneal_lr_config(int epochs = 200, std::size_t batch_size = 128,
                                 std::uint64_t seed = 0);

/// Maps "small-lr" / "big-lr" / "anneal-lr" to its config.
std::optional<OptimizerConfig> preset_config(std::string_view name, int epochs = 200,
                                             std::size_t batch_size = 128,
                                             std::uint64_t seed = 0);

}  // namespace cim
