#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "s2sa/model.hpp"

namespace s2sa {

struct TrainConfig {
  double learning_rate = 0.2;  // scale on the canonical parameter-free step
  std::size_t batch_size = 128;
  double dropout_rate = 0.2;  // non-recurrent connections only
  std::size_t max_epochs = 10;
  double adadelta_rho = 0.95;
  double adadelta_eps = 1e-6;
  double grad_clip = 0.0;  // global-norm threshold; 0 disables
  std::uint64_t seed = 42;

  void validate() const;  // ConfigError on out-of-range values
};

// Per-scalar running averages E[g^2] and E[dx^2], in tensor order.
struct AdadeltaState {
  Vector sq_grad;
  Vector sq_delta;

  explicit AdadeltaState(std::size_t n) : sq_grad(n, 0.0), sq_delta(n, 0.0) {}
  std::size_t size() const { return sq_grad.size(); }
};

// One optimizer step:
//   E[g^2]   <- rho E[g^2] + (1-rho) g^2
//   dx        = -lr * (sqrt(E[dx^2]+eps) / sqrt(E[g^2]+eps)) * g   (old E[dx^2])
//   E[dx^2]  <- rho E[dx^2] + (1-rho) dx^2
void adadelta_update(ModelParams& params, const ModelParams& grads, AdadeltaState& state,
                     const TrainConfig& cfg);

struct EncodedPair {
  std::vector<int> message;
  std::vector<int> response;
};

struct EpochLogEntry {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double valid_loss = 0.0;  // NaN when no validation set was given
};

// "epoch<TAB>train_loss<TAB>valid_loss", losses with 6 decimals ("nan" when absent).
std::string render_epoch_log_line(const EpochLogEntry& entry);

struct TrainResult {
  ModelParams params;  // from the epoch with minimal validation loss
  std::vector<EpochLogEntry> log;
  std::size_t best_epoch = 0;  // 1-based; 0 when max_epochs = 0
};

// Mini-batch training with a seeded per-epoch shuffle, dropout during the
// train pass only, and early stopping on mean validation loss (train loss
// stands in when valid_set is empty). Losses are means of per-example
// mean-per-token cross entropy. Non-finite losses or gradients abort with a
// NumericalError naming the epoch and batch.
TrainResult train(const ModelParams& init, const std::vector<EncodedPair>& train_set,
                  const std::vector<EncodedPair>& valid_set, const TrainConfig& cfg);

}  // namespace s2sa
