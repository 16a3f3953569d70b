#include <benchmark/benchmark.h>

#include <vector>

#include "s2sa/decoding.hpp"
#include "s2sa/metrics.hpp"
#include "s2sa/model.hpp"
#include "s2sa/numeric.hpp"
#include "s2sa/rng.hpp"

namespace {

using namespace s2sa;

ModelParams make_model(std::size_t vocab, std::size_t emb, std::size_t hidden,
                       std::uint64_t seed) {
  SeededRng rng(seed);
  return ModelParams::create(ModelDims{vocab, emb, hidden}, rng);
}

std::vector<int> make_ids(std::size_t len, std::size_t vocab, std::uint64_t seed) {
  SeededRng rng(seed);
  std::vector<int> ids(len);
  for (int& id : ids) id = static_cast<int>(4 + rng.uniform_index(vocab - 4));
  return ids;
}

void bench_softmax(benchmark::State& state) {
  SeededRng rng(7);
  Vector scores(static_cast<std::size_t>(state.range(0)));
  for (double& v : scores) v = rng.uniform_real(-5.0, 5.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(softmax(scores));
  }
}
BENCHMARK(bench_softmax)->Arg(64)->Arg(1024)->Arg(25000);

void bench_lstm_step(benchmark::State& state) {
  const auto hidden = static_cast<std::size_t>(state.range(0));
  ModelParams m = make_model(64, hidden, hidden, 11);
  Vector input(hidden, 0.1);
  RecurrentState prev{Vector(hidden, 0.0), Vector(hidden, 0.0)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(lstm_step(m.encoder, input, prev));
  }
}
BENCHMARK(bench_lstm_step)->Arg(32)->Arg(64)->Arg(128);

void bench_sequence_loss(benchmark::State& state) {
  ModelParams m = make_model(200, 32, 32, 13);
  const std::vector<int> msg = make_ids(6, 200, 17);
  const std::vector<int> resp = make_ids(6, 200, 19);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sequence_loss(m, msg, resp));
  }
}
BENCHMARK(bench_sequence_loss);

void bench_sequence_loss_grad(benchmark::State& state) {
  ModelParams m = make_model(200, 32, 32, 13);
  const std::vector<int> msg = make_ids(6, 200, 17);
  const std::vector<int> resp = make_ids(6, 200, 19);
  for (auto _ : state) {
    ModelParams grads = ModelParams::zeros_like(m);
    benchmark::DoNotOptimize(sequence_loss_grad(m, msg, resp, grads));
  }
}
BENCHMARK(bench_sequence_loss_grad);

void bench_beam_search(benchmark::State& state) {
  ModelParams m = make_model(200, 32, 32, 23);
  const std::vector<int> msg = make_ids(6, 200, 29);
  BeamConfig cfg;
  cfg.beam_width = static_cast<std::size_t>(state.range(0));
  cfg.max_len = 12;
  for (auto _ : state) {
    benchmark::DoNotOptimize(beam_search(m, msg, StandardSoft{}, cfg));
  }
}
BENCHMARK(bench_beam_search)->Arg(1)->Arg(10);

void bench_bleu(benchmark::State& state) {
  SeededRng rng(31);
  EvalCorpus corpus;
  for (std::size_t i = 0; i < 200; ++i) {
    EvalItem item;
    for (std::size_t k = 0; k < 6; ++k) {
      item.message.push_back("m" + std::to_string(rng.uniform_index(50)));
      item.reference.push_back("w" + std::to_string(rng.uniform_index(50)));
      item.candidate.push_back("w" + std::to_string(rng.uniform_index(50)));
    }
    corpus.items.push_back(std::move(item));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(bleu(corpus, 4));
  }
}
BENCHMARK(bench_bleu);

}  // namespace

BENCHMARK_MAIN();
