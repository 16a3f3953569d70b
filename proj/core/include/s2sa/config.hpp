#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "s2sa/corpus.hpp"
#include "s2sa/decoding.hpp"
#include "s2sa/train.hpp"

namespace s2sa {

// Flat key-value run configuration. Every knob has a documented default;
// unknown keys are rejected. Values can come from a config file ("key = value"
// lines, # comments), then be overridden per key (CLI flags), then by the
// S2SA_SEED environment variable for the seed.
struct RunConfig {
  // data preparation
  std::size_t vocab_capacity = 25000;
  std::size_t length_cap = 6;
  double train_ratio = 0.85;
  double test_ratio = 0.10;
  double valid_ratio = 0.05;

  // model
  std::size_t emb_dim = 64;
  std::size_t hidden_dim = 64;

  // training
  double learning_rate = 0.2;
  std::size_t batch_size = 128;
  double dropout = 0.2;
  std::size_t max_epochs = 10;
  double adadelta_rho = 0.95;
  double adadelta_eps = 1e-6;
  double grad_clip = 0.0;

  // decoding
  std::size_t beam_width = 10;
  std::size_t max_len = 50;
  bool length_normalize = false;
  std::string strategy = "standard";
  double lambda = 1.0;

  std::uint64_t seed = 42;
  std::size_t threads = 1;

  // Applies one "key" = "value" assignment; ConfigError on unknown key or
  // unparseable value.
  void set(const std::string& key, const std::string& value);

  // ConfigError when any value is out of range or the strategy is unknown.
  void validate() const;

  // The full document, one "key = value" line per knob, in a fixed order.
  // Doubles are rendered shortest-round-trip, so re-loading reproduces the
  // exact values.
  std::string render() const;

  SplitSpec split_spec() const;
  TrainConfig train_config() const;
  BeamConfig beam_config() const;

  static RunConfig from_file(const std::filesystem::path& path);
};

// Merges file values over defaults: returns from_file(path) when path is
// non-empty, defaults otherwise.
RunConfig load_config(const std::filesystem::path& path);

// Overrides cfg.seed from the S2SA_SEED environment variable when set;
// ConfigError if the variable is present but not a non-negative integer.
void apply_env_seed(RunConfig& cfg);

extern const char* const kSeedEnvVar;  // "S2SA_SEED"

}  // namespace s2sa
