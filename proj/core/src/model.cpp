#include "s2sa/model.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "s2sa/decoding.hpp"
#include "s2sa/errors.hpp"

namespace s2sa {

namespace {

LstmParams make_lstm(std::size_t hidden, std::size_t input) {
  LstmParams p;
  p.wi = Matrix(hidden, input);
  p.ui = Matrix(hidden, hidden);
  p.bi = Vector(hidden, 0.0);
  p.wf = Matrix(hidden, input);
  p.uf = Matrix(hidden, hidden);
  p.bf = Vector(hidden, 0.0);
  p.wo = Matrix(hidden, input);
  p.uo = Matrix(hidden, hidden);
  p.bo = Vector(hidden, 0.0);
  p.wc = Matrix(hidden, input);
  p.uc = Matrix(hidden, hidden);
  p.bc = Vector(hidden, 0.0);
  return p;
}

void check_token_ids(const std::vector<int>& ids, std::size_t vocab_size, const char* what) {
  for (int id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= vocab_size) {
      throw ShapeError(std::string(what) + " token id " + std::to_string(id) +
                       " out of range (vocab " + std::to_string(vocab_size) + ")");
    }
  }
}

}  // namespace

ModelParams ModelParams::create(const ModelDims& dims, SeededRng& rng) {
  if (dims.vocab_size < 5 || dims.emb_dim == 0 || dims.hidden_dim == 0) {
    throw ShapeError("model dims must be positive with vocab_size > 4");
  }
  ModelParams m;
  m.emb_dim = dims.emb_dim;
  m.hidden_dim = dims.hidden_dim;
  m.embedding = Matrix(dims.vocab_size, dims.emb_dim);
  m.encoder = make_lstm(dims.hidden_dim, dims.emb_dim);
  m.decoder = make_lstm(dims.hidden_dim, dims.emb_dim + dims.hidden_dim);
  m.out_proj = Matrix(dims.vocab_size, dims.hidden_dim);
  m.out_bias = Vector(dims.vocab_size, 0.0);
  for_each_tensor(m, [&](const std::string& name, std::span<double> values) {
    // biases start at zero
    if (name == "out_bias") return;
    if (name.size() >= 3 && name[name.size() - 3] == '.' && name[name.size() - 2] == 'b') return;
    for (double& v : values) v = rng.uniform_real(-0.08, 0.08);
  });
  return m;
}

ModelParams ModelParams::zeros_like(const ModelParams& other) {
  ModelParams m;
  m.emb_dim = other.emb_dim;
  m.hidden_dim = other.hidden_dim;
  m.embedding = Matrix(other.embedding.rows, other.embedding.cols);
  m.encoder = make_lstm(other.hidden_dim, other.emb_dim);
  m.decoder = make_lstm(other.hidden_dim, other.emb_dim + other.hidden_dim);
  m.out_proj = Matrix(other.out_proj.rows, other.out_proj.cols);
  m.out_bias = Vector(other.out_bias.size(), 0.0);
  return m;
}

std::size_t param_count(const ModelParams& m) {
  std::size_t n = 0;
  for_each_tensor(m, [&](const std::string&, std::span<const double> v) { n += v.size(); });
  return n;
}

std::vector<ParamRef> param_refs(ModelParams& value, const ModelParams& grad) {
  std::vector<std::pair<std::string, std::span<double>>> vals;
  for_each_tensor(value, [&](const std::string& name, std::span<double> v) {
    vals.emplace_back(name, v);
  });
  std::vector<std::span<const double>> grads;
  for_each_tensor(grad, [&](const std::string&, std::span<const double> g) {
    grads.push_back(g);
  });
  std::vector<ParamRef> refs;
  refs.reserve(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (vals[i].second.size() != grads[i].size()) {
      throw ShapeError("param_refs: value/grad shape mismatch at " + vals[i].first);
    }
    refs.push_back({vals[i].first, vals[i].second, grads[i]});
  }
  return refs;
}

// ---------------------------------------------------------------------------
// Forward pieces

namespace {

struct StepTape {
  Vector i, f, o, g;  // post-activation gates
  Vector c;           // new cell
  Vector tanh_c;
};

// Gates and state for one step; records everything backward needs.
StepTape lstm_forward_tape(const LstmParams& p, const Vector& x, const Vector& h_prev,
                           const Vector& c_prev, RecurrentState& out) {
  StepTape t;
  Vector zi = affine(p.wi, x, p.bi);
  affine_acc(zi, p.ui, h_prev);
  Vector zf = affine(p.wf, x, p.bf);
  affine_acc(zf, p.uf, h_prev);
  Vector zo = affine(p.wo, x, p.bo);
  affine_acc(zo, p.uo, h_prev);
  Vector zc = affine(p.wc, x, p.bc);
  affine_acc(zc, p.uc, h_prev);

  const std::size_t n = p.hidden_dim();
  t.i = sigmoid(zi);
  t.f = sigmoid(zf);
  t.o = sigmoid(zo);
  t.g = tanh_vec(zc);
  t.c.resize(n);
  t.tanh_c.resize(n);
  out.h.resize(n);
  out.c.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    t.c[k] = t.f[k] * c_prev[k] + t.i[k] * t.g[k];
    t.tanh_c[k] = std::tanh(t.c[k]);
    out.c[k] = t.c[k];
    out.h[k] = t.o[k] * t.tanh_c[k];
  }
  return t;
}

struct LstmStepGrad {
  Vector dx, dh_prev, dc_prev;
};

// Backpropagates one step. dh/dc are gradients flowing into h_t and c_t.
LstmStepGrad lstm_backward(const LstmParams& p, const Vector& x, const Vector& h_prev,
                           const Vector& c_prev, const StepTape& t, const Vector& dh,
                           const Vector& dc_in, LstmParams& g) {
  const std::size_t n = p.hidden_dim();
  Vector dzi(n), dzf(n), dzo(n), dzc(n), dc(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double do_ = dh[k] * t.tanh_c[k];
    dc[k] = dc_in[k] + dh[k] * t.o[k] * (1.0 - t.tanh_c[k] * t.tanh_c[k]);
    dzo[k] = do_ * t.o[k] * (1.0 - t.o[k]);
    dzi[k] = dc[k] * t.g[k] * t.i[k] * (1.0 - t.i[k]);
    dzf[k] = dc[k] * c_prev[k] * t.f[k] * (1.0 - t.f[k]);
    dzc[k] = dc[k] * t.i[k] * (1.0 - t.g[k] * t.g[k]);
  }

  LstmStepGrad out;
  out.dx.assign(x.size(), 0.0);
  out.dh_prev.assign(n, 0.0);
  out.dc_prev.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.dc_prev[k] = dc[k] * t.f[k];

  auto gate = [&](const Vector& dz, const Matrix& w, const Matrix& u, Matrix& gw, Matrix& gu,
                  Vector& gb) {
    for (std::size_t r = 0; r < n; ++r) {
      const double d = dz[r];
      if (d == 0.0) continue;
      double* gwr = gw.row(r);
      const double* wr = w.row(r);
      for (std::size_t c = 0; c < x.size(); ++c) {
        gwr[c] += d * x[c];
        out.dx[c] += wr[c] * d;
      }
      double* gur = gu.row(r);
      const double* ur = u.row(r);
      for (std::size_t c = 0; c < n; ++c) {
        gur[c] += d * h_prev[c];
        out.dh_prev[c] += ur[c] * d;
      }
      gb[r] += d;
    }
  };
  gate(dzi, p.wi, p.ui, g.wi, g.ui, g.bi);
  gate(dzf, p.wf, p.uf, g.wf, g.uf, g.bf);
  gate(dzo, p.wo, p.uo, g.wo, g.uo, g.bo);
  gate(dzc, p.wc, p.uc, g.wc, g.uc, g.bc);
  return out;
}

Vector draw_mask(const Dropout& dropout, std::size_t n) {
  Vector mask(n);
  const double keep_scale = 1.0 / (1.0 - dropout.rate);
  for (std::size_t k = 0; k < n; ++k) {
    mask[k] = dropout.rng->uniform_real() < dropout.rate ? 0.0 : keep_scale;
  }
  return mask;
}

struct DecStepTape {
  Vector emb, emb_mask;
  Vector alphas;            // empty when the first step used a hard selection
  std::size_t hard_index = 0;  // 0-based, valid when alphas is empty at t == 0
  Vector input;
  StepTape step;
  Vector h;
  Vector h_mask, h_dropped;
  Vector probs;
  int target = 0;
};

struct Tape {
  std::vector<Vector> enc_emb, enc_mask;
  std::vector<StepTape> enc_steps;
  EncoderStates enc;
  std::vector<DecStepTape> dec;
  double sum_loss = 0.0;
};

Tape run_forward(const ModelParams& m, const std::vector<int>& src, const std::vector<int>& tgt,
                 const ContextStrategy& strategy, const Dropout& dropout,
                 SeededRng* strategy_rng) {
  if (src.empty()) throw ShapeError("message must be non-empty");
  if (tgt.empty()) throw ShapeError("response must be non-empty");
  check_token_ids(src, m.vocab_size(), "message");
  check_token_ids(tgt, m.vocab_size(), "response");

  Tape tape;
  const std::size_t hid = m.hidden_dim;

  // encoder
  Vector h_prev(hid, 0.0), c_prev(hid, 0.0);
  for (std::size_t s = 0; s < src.size(); ++s) {
    Vector emb(m.embedding.row(src[s]), m.embedding.row(src[s]) + m.emb_dim);
    if (dropout.active()) {
      Vector mask = draw_mask(dropout, m.emb_dim);
      for (std::size_t k = 0; k < m.emb_dim; ++k) emb[k] *= mask[k];
      tape.enc_mask.push_back(std::move(mask));
    }
    RecurrentState next;
    tape.enc_steps.push_back(lstm_forward_tape(m.encoder, emb, h_prev, c_prev, next));
    tape.enc_emb.push_back(std::move(emb));
    tape.enc.hidden.push_back(next.h);
    h_prev = std::move(next.h);
    c_prev = std::move(next.c);
  }
  tape.enc.final_cell = c_prev;

  // decoder, teacher forced: inputs BOS,y_1..y_N; targets y_1..y_N,EOS
  const std::size_t steps = tgt.size() + 1;
  Vector dh = tape.enc.hidden.back();
  Vector dc = tape.enc.final_cell;
  for (std::size_t t = 0; t < steps; ++t) {
    DecStepTape d;
    d.target = t < tgt.size() ? tgt[t] : Vocabulary::kEos;
    const int prev_id = t == 0 ? Vocabulary::kBos : tgt[t - 1];

    Vector context;
    if (t == 0) {
      FirstContext fc =
          select_first_context(strategy, tape.enc, RecurrentState{dh, dc}, strategy_rng);
      context = std::move(fc.context);
      if (fc.index.has_value()) {
        d.hard_index = *fc.index - 1;
      } else {
        d.alphas = std::move(*fc.alphas);
      }
    } else {
      Attention att = attention(dh, tape.enc);
      d.alphas = std::move(att.alphas);
      context = std::move(att.context);
    }

    d.emb.assign(m.embedding.row(prev_id), m.embedding.row(prev_id) + m.emb_dim);
    if (dropout.active()) {
      d.emb_mask = draw_mask(dropout, m.emb_dim);
      for (std::size_t k = 0; k < m.emb_dim; ++k) d.emb[k] *= d.emb_mask[k];
    }
    d.input.reserve(m.emb_dim + hid);
    d.input.assign(d.emb.begin(), d.emb.end());
    d.input.insert(d.input.end(), context.begin(), context.end());

    RecurrentState next;
    d.step = lstm_forward_tape(m.decoder, d.input, dh, dc, next);
    d.h = next.h;

    d.h_dropped = d.h;
    if (dropout.active()) {
      d.h_mask = draw_mask(dropout, hid);
      for (std::size_t k = 0; k < hid; ++k) d.h_dropped[k] *= d.h_mask[k];
    }

    Vector logits = affine(m.out_proj, d.h_dropped, m.out_bias);
    Vector lsm = log_softmax(logits);
    tape.sum_loss -= lsm[static_cast<std::size_t>(d.target)];
    d.probs.resize(lsm.size());
    for (std::size_t k = 0; k < lsm.size(); ++k) d.probs[k] = std::exp(lsm[k]);

    dh = std::move(next.h);
    dc = std::move(next.c);
    tape.dec.push_back(std::move(d));
  }
  return tape;
}

void run_backward(const ModelParams& m, const std::vector<int>& src,
                  const std::vector<int>& tgt, const Tape& tape, ModelParams& g) {
  const std::size_t hid = m.hidden_dim;
  const std::size_t steps = tape.dec.size();
  const double scale = 1.0 / static_cast<double>(steps);

  std::vector<Vector> d_enc_h(src.size(), Vector(hid, 0.0));
  Vector gh(hid, 0.0), gc(hid, 0.0);  // grads flowing into decoder h_t, c_t

  for (std::size_t t = steps; t-- > 0;) {
    const DecStepTape& d = tape.dec[t];

    // projection + cross entropy
    Vector dlogits(d.probs);
    dlogits[static_cast<std::size_t>(d.target)] -= 1.0;
    for (double& v : dlogits) v *= scale;

    Vector dh_step = gh;
    for (std::size_t r = 0; r < m.out_proj.rows; ++r) {
      const double dl = dlogits[r];
      g.out_bias[r] += dl;
      if (dl == 0.0) continue;
      double* gr = g.out_proj.row(r);
      const double* wr = m.out_proj.row(r);
      for (std::size_t c = 0; c < hid; ++c) {
        gr[c] += dl * d.h_dropped[c];
        dh_step[c] += wr[c] * dl * (d.h_mask.empty() ? 1.0 : d.h_mask[c]);
      }
    }

    const Vector& h_prev = t == 0 ? tape.enc.hidden.back() : tape.dec[t - 1].h;
    const Vector& c_prev = t == 0 ? tape.enc.final_cell : tape.dec[t - 1].step.c;
    LstmStepGrad sg =
        lstm_backward(m.decoder, d.input, h_prev, c_prev, d.step, dh_step, gc, g.decoder);

    // split input grad into embedding part and context part
    const int prev_id = t == 0 ? Vocabulary::kBos : tgt[t - 1];
    double* emb_grad = g.embedding.row(prev_id);
    for (std::size_t k = 0; k < m.emb_dim; ++k) {
      emb_grad[k] += sg.dx[k] * (d.emb_mask.empty() ? 1.0 : d.emb_mask[k]);
    }

    Vector dquery(hid, 0.0);
    if (!d.alphas.empty()) {
      // soft attention backward
      const Vector& query = h_prev;
      const std::size_t n_src = src.size();
      Vector dalpha(n_src, 0.0);
      for (std::size_t i = 0; i < n_src; ++i) {
        const Vector& hi = tape.enc.hidden[i];
        double acc = 0.0;
        for (std::size_t k = 0; k < hid; ++k) {
          acc += sg.dx[m.emb_dim + k] * hi[k];
          d_enc_h[i][k] += d.alphas[i] * sg.dx[m.emb_dim + k];
        }
        dalpha[i] = acc;
      }
      double inner = 0.0;
      for (std::size_t i = 0; i < n_src; ++i) inner += d.alphas[i] * dalpha[i];
      for (std::size_t i = 0; i < n_src; ++i) {
        const double de = d.alphas[i] * (dalpha[i] - inner);
        if (de == 0.0) continue;
        const Vector& hi = tape.enc.hidden[i];
        for (std::size_t k = 0; k < hid; ++k) {
          dquery[k] += de * hi[k];
          d_enc_h[i][k] += de * query[k];
        }
      }
    } else {
      // hard first context: the gradient flows only into the copied vector
      for (std::size_t k = 0; k < hid; ++k) {
        d_enc_h[d.hard_index][k] += sg.dx[m.emb_dim + k];
      }
    }

    gh = std::move(sg.dh_prev);
    for (std::size_t k = 0; k < hid; ++k) gh[k] += dquery[k];
    gc = std::move(sg.dc_prev);
  }

  // bridge into the encoder final state
  for (std::size_t k = 0; k < hid; ++k) d_enc_h[src.size() - 1][k] += gh[k];
  Vector ghe(hid, 0.0), gce = gc;

  static const Vector kEmpty;
  for (std::size_t s = src.size(); s-- > 0;) {
    Vector dh = d_enc_h[s];
    for (std::size_t k = 0; k < hid; ++k) dh[k] += ghe[k];
    const Vector zero(hid, 0.0);
    const Vector& h_prev = s == 0 ? zero : tape.enc.hidden[s - 1];
    const Vector& c_prev = s == 0 ? zero : tape.enc_steps[s - 1].c;
    LstmStepGrad sg =
        lstm_backward(m.encoder, tape.enc_emb[s], h_prev, c_prev, tape.enc_steps[s], dh, gce,
                      g.encoder);
    const Vector& mask = tape.enc_mask.empty() ? kEmpty : tape.enc_mask[s];
    double* emb_grad = g.embedding.row(src[s]);
    for (std::size_t k = 0; k < m.emb_dim; ++k) {
      emb_grad[k] += sg.dx[k] * (mask.empty() ? 1.0 : mask[k]);
    }
    ghe = std::move(sg.dh_prev);
    gce = std::move(sg.dc_prev);
  }
}

}  // namespace

RecurrentState lstm_step(const LstmParams& p, const Vector& input, const RecurrentState& prev) {
  if (input.size() != p.input_dim() || prev.h.size() != p.hidden_dim() ||
      prev.c.size() != p.hidden_dim()) {
    throw ShapeError("lstm_step: input " + std::to_string(input.size()) + ", state " +
                     std::to_string(prev.h.size()) + " incompatible with cell " +
                     std::to_string(p.hidden_dim()) + "x" + std::to_string(p.input_dim()));
  }
  RecurrentState next;
  lstm_forward_tape(p, input, prev.h, prev.c, next);
  return next;
}

EncoderStates encode(const ModelParams& m, const std::vector<int>& message_ids) {
  if (message_ids.empty()) throw ShapeError("encode: message must be non-empty");
  check_token_ids(message_ids, m.vocab_size(), "message");
  EncoderStates enc;
  RecurrentState state{Vector(m.hidden_dim, 0.0), Vector(m.hidden_dim, 0.0)};
  for (int id : message_ids) {
    Vector emb(m.embedding.row(id), m.embedding.row(id) + m.emb_dim);
    state = lstm_step(m.encoder, emb, state);
    enc.hidden.push_back(state.h);
  }
  enc.final_cell = state.c;
  return enc;
}

Attention attention(const Vector& h_prev, const EncoderStates& enc) {
  if (enc.hidden.empty()) throw ShapeError("attention: empty encoder states");
  Vector scores(enc.hidden.size());
  for (std::size_t i = 0; i < enc.hidden.size(); ++i) scores[i] = dot(h_prev, enc.hidden[i]);
  Attention att;
  att.alphas = softmax(scores);
  att.context.assign(h_prev.size(), 0.0);
  for (std::size_t i = 0; i < enc.hidden.size(); ++i) {
    const double a = att.alphas[i];
    const Vector& hi = enc.hidden[i];
    for (std::size_t k = 0; k < att.context.size(); ++k) att.context[k] += a * hi[k];
  }
  return att;
}

RecurrentState decoder_init(const ModelParams&, const EncoderStates& enc) {
  if (enc.hidden.empty()) throw ShapeError("decoder_init: empty encoder states");
  return {enc.hidden.back(), enc.final_cell};
}

std::pair<RecurrentState, Vector> decoder_step(const ModelParams& m, int y_prev_id,
                                               const RecurrentState& prev,
                                               const Vector& context) {
  if (y_prev_id < 0 || static_cast<std::size_t>(y_prev_id) >= m.vocab_size()) {
    throw ShapeError("decoder_step: token id " + std::to_string(y_prev_id) +
                     " out of range (vocab " + std::to_string(m.vocab_size()) + ")");
  }
  Vector input;
  input.reserve(m.emb_dim + m.hidden_dim);
  input.assign(m.embedding.row(y_prev_id), m.embedding.row(y_prev_id) + m.emb_dim);
  input.insert(input.end(), context.begin(), context.end());
  RecurrentState next = lstm_step(m.decoder, input, prev);
  Vector logits = affine(m.out_proj, next.h, m.out_bias);
  return {std::move(next), std::move(logits)};
}

double sequence_loss(const ModelParams& m, const std::vector<int>& message_ids,
                     const std::vector<int>& response_ids, const ContextStrategy& strategy,
                     const Dropout& dropout, SeededRng* strategy_rng) {
  Tape tape = run_forward(m, message_ids, response_ids, strategy, dropout, strategy_rng);
  return tape.sum_loss / static_cast<double>(tape.dec.size());
}

double sequence_loss_grad(const ModelParams& m, const std::vector<int>& message_ids,
                          const std::vector<int>& response_ids, ModelParams& grads,
                          const ContextStrategy& strategy, const Dropout& dropout,
                          SeededRng* strategy_rng) {
  Tape tape = run_forward(m, message_ids, response_ids, strategy, dropout, strategy_rng);
  run_backward(m, message_ids, response_ids, tape, grads);
  return tape.sum_loss / static_cast<double>(tape.dec.size());
}

double sequence_log_prob(const ModelParams& m, const std::vector<int>& message_ids,
                         const std::vector<int>& response_ids, const ContextStrategy& strategy,
                         SeededRng* strategy_rng) {
  Tape tape = run_forward(m, message_ids, response_ids, strategy, {}, strategy_rng);
  return -tape.sum_loss;
}

// ---------------------------------------------------------------------------
// Checkpoint I/O

namespace {

constexpr char kMagic[4] = {'S', '2', 'S', 'A'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& in, const char* what) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw DataError(std::string("checkpoint truncated reading ") + what);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

void write_f64(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

double read_f64(std::istream& in, const char* what) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw DataError(std::string("checkpoint truncated reading ") + what);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

void save_checkpoint(const ModelParams& m, const Vocabulary& vocab,
                     const std::filesystem::path& path) {
  if (vocab.size() != m.vocab_size()) {
    throw ConfigError("checkpoint: vocabulary size " + std::to_string(vocab.size()) +
                      " does not match model vocab " + std::to_string(m.vocab_size()));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path.string());
  out.write(kMagic, 4);
  write_u32(out, kVersion);
  write_u32(out, static_cast<std::uint32_t>(vocab.size()));
  for (const std::string& tok : vocab.tokens()) {
    write_u32(out, static_cast<std::uint32_t>(tok.size()));
    out.write(tok.data(), static_cast<std::streamsize>(tok.size()));
  }
  write_u32(out, static_cast<std::uint32_t>(m.emb_dim));
  write_u32(out, static_cast<std::uint32_t>(m.hidden_dim));
  for_each_tensor(m, [&](const std::string&, std::span<const double> values) {
    for (double v : values) write_f64(out, v);
  });
  if (!out) throw DataError("failed writing checkpoint: " + path.string());
}

std::pair<ModelParams, Vocabulary> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read checkpoint: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw DataError("not a checkpoint file (bad magic): " + path.string());
  }
  const std::uint32_t version = read_u32(in, "version");
  if (version != kVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  const std::uint32_t vocab_count = read_u32(in, "vocab count");
  if (vocab_count < 5) throw DataError("checkpoint vocabulary too small");
  std::vector<std::string> tokens(vocab_count);
  for (std::uint32_t i = 0; i < vocab_count; ++i) {
    const std::uint32_t len = read_u32(in, "token length");
    tokens[i].resize(len);
    in.read(tokens[i].data(), len);
    if (!in) throw DataError("checkpoint truncated reading vocabulary");
  }
  if (tokens[0] != Vocabulary::kPadToken || tokens[1] != Vocabulary::kBosToken ||
      tokens[2] != Vocabulary::kEosToken || tokens[3] != Vocabulary::kUnkToken) {
    throw DataError("checkpoint vocabulary missing the reserved specials");
  }
  Vocabulary vocab(vocab_count);
  for (std::uint32_t i = 4; i < vocab_count; ++i) vocab.add(tokens[i]);
  if (vocab.size() != vocab_count) throw DataError("checkpoint vocabulary has duplicates");

  ModelDims dims;
  dims.vocab_size = vocab_count;
  dims.emb_dim = read_u32(in, "embedding dim");
  dims.hidden_dim = read_u32(in, "hidden dim");
  if (dims.emb_dim == 0 || dims.hidden_dim == 0) throw DataError("checkpoint has zero dims");

  ModelParams m;
  m.emb_dim = dims.emb_dim;
  m.hidden_dim = dims.hidden_dim;
  m.embedding = Matrix(dims.vocab_size, dims.emb_dim);
  m.encoder = make_lstm(dims.hidden_dim, dims.emb_dim);
  m.decoder = make_lstm(dims.hidden_dim, dims.emb_dim + dims.hidden_dim);
  m.out_proj = Matrix(dims.vocab_size, dims.hidden_dim);
  m.out_bias = Vector(dims.vocab_size, 0.0);
  for_each_tensor(m, [&](const std::string& name, std::span<double> values) {
    for (double& v : values) v = read_f64(in, name.c_str());
  });
  return {std::move(m), std::move(vocab)};
}

}  // namespace s2sa
