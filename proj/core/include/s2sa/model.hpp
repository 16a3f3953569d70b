#pragma once

#include <cstddef>
#include <filesystem>
#include <utility>
#include <vector>

#include "s2sa/numeric.hpp"
#include "s2sa/rng.hpp"
#include "s2sa/strategy.hpp"
#include "s2sa/vocab.hpp"

namespace s2sa {

// One LSTM cell: per gate g in {input, forget, output, candidate} a
// hidden x input weight, a hidden x hidden recurrent weight, and a bias.
struct LstmParams {
  Matrix wi, ui;
  Vector bi;
  Matrix wf, uf;
  Vector bf;
  Matrix wo, uo;
  Vector bo;
  Matrix wc, uc;
  Vector bc;

  std::size_t input_dim() const { return wi.cols; }
  std::size_t hidden_dim() const { return wi.rows; }
};

struct RecurrentState {
  Vector h;
  Vector c;
};

// The sequence H_X of encoder cell outputs for one message, plus the final
// cell (needed to seed the decoder).
struct EncoderStates {
  std::vector<Vector> hidden;
  Vector final_cell;

  std::size_t size() const { return hidden.size(); }
};

struct ModelDims {
  std::size_t vocab_size = 0;
  std::size_t emb_dim = 0;
  std::size_t hidden_dim = 0;
};

struct ModelParams {
  std::size_t emb_dim = 0;
  std::size_t hidden_dim = 0;
  Matrix embedding;  // |V| x emb_dim
  LstmParams encoder;  // input dim: emb_dim
  LstmParams decoder;  // input dim: emb_dim + hidden_dim (prev word embedding ++ context)
  Matrix out_proj;   // |V| x hidden_dim
  Vector out_bias;   // |V|

  std::size_t vocab_size() const { return embedding.rows; }

  // Uniform [-0.08, 0.08] init, biases zero.
  static ModelParams create(const ModelDims& dims, SeededRng& rng);
  static ModelParams zeros_like(const ModelParams& other);
};

// Walks every tensor in the fixed checkpoint order: embedding; encoder gates
// as wi,ui,bi,wf,uf,bf,wo,uo,bo,wc,uc,bc; decoder gates likewise; out_proj;
// out_bias. fn(name, std::span<double>).
template <class Params, class Fn>
void for_each_tensor(Params& m, Fn&& fn) {
  auto mat = [&](const char* name, auto& t) { fn(name, std::span(t.data)); };
  auto vec = [&](const char* name, auto& t) { fn(name, std::span(t)); };
  auto lstm = [&](const std::string& prefix, auto& p) {
    fn(prefix + ".wi", std::span(p.wi.data));
    fn(prefix + ".ui", std::span(p.ui.data));
    fn(prefix + ".bi", std::span(p.bi));
    fn(prefix + ".wf", std::span(p.wf.data));
    fn(prefix + ".uf", std::span(p.uf.data));
    fn(prefix + ".bf", std::span(p.bf));
    fn(prefix + ".wo", std::span(p.wo.data));
    fn(prefix + ".uo", std::span(p.uo.data));
    fn(prefix + ".bo", std::span(p.bo));
    fn(prefix + ".wc", std::span(p.wc.data));
    fn(prefix + ".uc", std::span(p.uc.data));
    fn(prefix + ".bc", std::span(p.bc));
  };
  mat("embedding", m.embedding);
  lstm("encoder", m.encoder);
  lstm("decoder", m.decoder);
  mat("out_proj", m.out_proj);
  vec("out_bias", m.out_bias);
}

std::size_t param_count(const ModelParams& m);

// Named (value, gradient) views over every scalar parameter, in tensor order.
// Both structures must have identical shapes.
std::vector<ParamRef> param_refs(ModelParams& value, const ModelParams& grad);

// Non-recurrent dropout (inverted scaling). rate 0 or a null rng disables it.
struct Dropout {
  double rate = 0.0;
  SeededRng* rng = nullptr;

  bool active() const { return rate > 0.0 && rng != nullptr; }
};

RecurrentState lstm_step(const LstmParams& p, const Vector& input, const RecurrentState& prev);

EncoderStates encode(const ModelParams& m, const std::vector<int>& message_ids);

struct Attention {
  Vector alphas;
  Vector context;
};

// Scores are raw inner products of the query with each encoder hidden vector;
// the context is their softmax-weighted sum.
Attention attention(const Vector& h_prev, const EncoderStates& enc);

// Decoder seed: encoder final hidden and cell.
RecurrentState decoder_init(const ModelParams& m, const EncoderStates& enc);

// One decoder step: input is concat(embedding[y_prev_id], context); returns
// the new state and the output-projection logits over the vocabulary.
std::pair<RecurrentState, Vector> decoder_step(const ModelParams& m, int y_prev_id,
                                               const RecurrentState& prev,
                                               const Vector& context);

// Teacher-forced mean per-token cross entropy over (BOS, y_1..y_N, EOS).
// `strategy` picks the first context vector; training uses StandardSoft.
// `strategy_rng` is consulted only by RandomHard (falls back to the seed
// embedded in the strategy when null).
double sequence_loss(const ModelParams& m, const std::vector<int>& message_ids,
                     const std::vector<int>& response_ids,
                     const ContextStrategy& strategy = StandardSoft{},
                     const Dropout& dropout = {}, SeededRng* strategy_rng = nullptr);

// Same forward pass; accumulates d(loss)/d(theta) into `grads` (shapes must
// match `m`). Returns the loss.
double sequence_loss_grad(const ModelParams& m, const std::vector<int>& message_ids,
                          const std::vector<int>& response_ids, ModelParams& grads,
                          const ContextStrategy& strategy = StandardSoft{},
                          const Dropout& dropout = {}, SeededRng* strategy_rng = nullptr);

// Sum over steps of log softmax(logits)[target]: the teacher-forced sequence
// log-likelihood (never positive). Dropout is never applied here.
double sequence_log_prob(const ModelParams& m, const std::vector<int>& message_ids,
                         const std::vector<int>& response_ids,
                         const ContextStrategy& strategy = StandardSoft{},
                         SeededRng* strategy_rng = nullptr);

// Checkpoint: "S2SA" magic, u32 format version, vocabulary block, dimension
// header, then all tensors as little-endian doubles in for_each_tensor order.
void save_checkpoint(const ModelParams& m, const Vocabulary& vocab,
                     const std::filesystem::path& path);
std::pair<ModelParams, Vocabulary> load_checkpoint(const std::filesystem::path& path);

}  // namespace s2sa
