#include "s2sa/train.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "s2sa/errors.hpp"

namespace s2sa {

void TrainConfig::validate() const {
  if (learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) throw ConfigError("dropout_rate must be in [0,1)");
  if (adadelta_rho <= 0.0 || adadelta_rho >= 1.0) throw ConfigError("adadelta_rho must be in (0,1)");
  if (adadelta_eps <= 0.0) throw ConfigError("adadelta_eps must be positive");
  if (grad_clip < 0.0) throw ConfigError("grad_clip must be >= 0");
}

void adadelta_update(ModelParams& params, const ModelParams& grads, AdadeltaState& state,
                     const TrainConfig& cfg) {
  if (state.size() != param_count(params)) {
    throw ShapeError("adadelta state size " + std::to_string(state.size()) +
                     " does not match parameter count " + std::to_string(param_count(params)));
  }
  const double rho = cfg.adadelta_rho;
  const double eps = cfg.adadelta_eps;
  const double lr = cfg.learning_rate;
  std::size_t k = 0;
  for (const ParamRef& ref : param_refs(params, grads)) {
    for (std::size_t i = 0; i < ref.value.size(); ++i, ++k) {
      const double g = ref.grad[i];
      if (!std::isfinite(g)) {
        throw NumericalError("non-finite gradient in " + ref.name);
      }
      const double sq_grad = rho * state.sq_grad[k] + (1.0 - rho) * g * g;
      const double delta = -lr * (std::sqrt(state.sq_delta[k] + eps) / std::sqrt(sq_grad + eps)) * g;
      state.sq_grad[k] = sq_grad;
      state.sq_delta[k] = rho * state.sq_delta[k] + (1.0 - rho) * delta * delta;
      ref.value[i] += delta;
    }
  }
}

std::string render_epoch_log_line(const EpochLogEntry& entry) {
  char buf[96];
  if (std::isnan(entry.valid_loss)) {
    std::snprintf(buf, sizeof(buf), "%zu\t%.6f\tnan", entry.epoch, entry.train_loss);
  } else {
    std::snprintf(buf, sizeof(buf), "%zu\t%.6f\t%.6f", entry.epoch, entry.train_loss,
                  entry.valid_loss);
  }
  return buf;
}

namespace {

double mean_loss(const ModelParams& m, const std::vector<EncodedPair>& pairs) {
  double sum = 0.0;
  for (const EncodedPair& p : pairs) sum += sequence_loss(m, p.message, p.response);
  return sum / static_cast<double>(pairs.size());
}

}  // namespace

TrainResult train(const ModelParams& init, const std::vector<EncodedPair>& train_set,
                  const std::vector<EncodedPair>& valid_set, const TrainConfig& cfg) {
  cfg.validate();
  if (train_set.empty()) throw ShapeError("train: empty training set");

  ModelParams params = init;
  AdadeltaState state(param_count(params));
  SeededRng shuffle_rng(mix_seed(cfg.seed, 1));
  SeededRng dropout_rng(mix_seed(cfg.seed, 2));

  TrainResult result;
  result.params = params;
  double best_metric = std::numeric_limits<double>::infinity();

  const std::size_t n = train_set.size();
  std::vector<std::size_t> order(n);

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle_rng.shuffle(order);

    double epoch_loss_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size, ++batch_index) {
      const std::size_t end = std::min(start + cfg.batch_size, n);
      ModelParams grads = ModelParams::zeros_like(params);
      Dropout dropout{cfg.dropout_rate, cfg.dropout_rate > 0.0 ? &dropout_rng : nullptr};
      for (std::size_t pos = start; pos < end; ++pos) {
        const EncodedPair& pair = train_set[order[pos]];
        const double loss =
            sequence_loss_grad(params, pair.message, pair.response, grads, StandardSoft{}, dropout);
        if (!std::isfinite(loss)) {
          throw NumericalError("non-finite loss at epoch " + std::to_string(epoch) + " batch " +
                               std::to_string(batch_index));
        }
        epoch_loss_sum += loss;
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      for_each_tensor(grads, [&](const std::string&, std::span<double> values) {
        for (double& v : values) v *= inv;
      });
      if (cfg.grad_clip > 0.0) {
        double sq_norm = 0.0;
        for_each_tensor(grads, [&](const std::string&, std::span<const double> values) {
          for (double v : values) sq_norm += v * v;
        });
        const double norm = std::sqrt(sq_norm);
        if (norm > cfg.grad_clip) {
          const double scale = cfg.grad_clip / norm;
          for_each_tensor(grads, [&](const std::string&, std::span<double> values) {
            for (double& v : values) v *= scale;
          });
        }
      }
      try {
        adadelta_update(params, grads, state, cfg);
      } catch (const NumericalError& e) {
        throw NumericalError(std::string(e.what()) + " at epoch " + std::to_string(epoch) +
                             " batch " + std::to_string(batch_index));
      }
    }

    EpochLogEntry entry;
    entry.epoch = epoch;
    entry.train_loss = epoch_loss_sum / static_cast<double>(n);
    entry.valid_loss = valid_set.empty() ? std::numeric_limits<double>::quiet_NaN()
                                         : mean_loss(params, valid_set);
    result.log.push_back(entry);

    const double metric = valid_set.empty() ? entry.train_loss : entry.valid_loss;
    if (metric < best_metric) {
      best_metric = metric;
      result.params = params;
      result.best_epoch = epoch;
    }
  }
  return result;
}

}  // namespace s2sa
