#include "s2sa/decoding.hpp"

#include <algorithm>
#include <cstdio>
#include <variant>

#include "s2sa/errors.hpp"

namespace s2sa {

namespace {

std::size_t argmax_lowest(const Vector& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

std::size_t argmin_lowest(const Vector& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[best]) best = i;
  }
  return best;
}

FirstContext hard_pick(const EncoderStates& enc, std::size_t index0) {
  FirstContext fc;
  fc.context = enc.hidden[index0];
  fc.index = index0 + 1;
  return fc;
}

}  // namespace

Vector self_attention_scores(const EncoderStates& enc) {
  if (enc.hidden.empty()) throw ShapeError("self_attention_scores: empty encoder states");
  const std::size_t n = enc.hidden.size();
  Vector e(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) e[i] += dot(enc.hidden[i], enc.hidden[j]);
  }
  return e;
}

FirstContext select_first_context(const ContextStrategy& strategy, const EncoderStates& enc,
                                  const RecurrentState& h0, SeededRng* rng) {
  if (enc.hidden.empty()) throw ShapeError("select_first_context: empty encoder states");
  const std::size_t n = enc.hidden.size();
  return std::visit(
      [&](const auto& s) -> FirstContext {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, StandardSoft>) {
          Attention att = attention(h0.h, enc);
          FirstContext fc;
          fc.context = std::move(att.context);
          fc.alphas = std::move(att.alphas);
          return fc;
        } else if constexpr (std::is_same_v<T, HardToBos>) {
          Attention att = attention(h0.h, enc);
          FirstContext fc = hard_pick(enc, argmax_lowest(att.alphas));
          fc.alphas = std::move(att.alphas);
          return fc;
        } else if constexpr (std::is_same_v<T, PositionalHard>) {
          const bool clamp = s.position > n;
          FirstContext fc = hard_pick(enc, (clamp ? n : s.position) - 1);
          fc.clamped = clamp;
          return fc;
        } else if constexpr (std::is_same_v<T, RandomHard>) {
          if (rng != nullptr) return hard_pick(enc, rng->uniform_index(n));
          SeededRng local(s.seed);
          return hard_pick(enc, local.uniform_index(n));
        } else if constexpr (std::is_same_v<T, SelfAttnMax>) {
          return hard_pick(enc, argmax_lowest(self_attention_scores(enc)));
        } else {
          static_assert(std::is_same_v<T, SelfAttnMin>);
          return hard_pick(enc, argmin_lowest(self_attention_scores(enc)));
        }
      },
      strategy);
}

double hypothesis_score(const Hypothesis& hyp, const BeamConfig& cfg) {
  if (!cfg.length_normalize || hyp.token_ids.empty()) return hyp.log_prob;
  return hyp.log_prob / static_cast<double>(hyp.token_ids.size());
}

namespace {

struct FinishedEntry {
  Hypothesis hyp;
  std::size_t step = 0;
};

std::vector<Hypothesis> run_beam(const ModelParams& m, const EncoderStates& enc,
                                 const RecurrentState& init, const FirstContext& first,
                                 const BeamConfig& cfg) {
  if (cfg.beam_width < 1) throw ShapeError("beam_width must be >= 1");
  if (cfg.max_len < 1) throw ShapeError("max_len must be >= 1");
  const std::size_t vocab = m.vocab_size();

  std::vector<FinishedEntry> finished;
  std::vector<Hypothesis> beam;
  beam.push_back(Hypothesis{{}, 0.0, init, false});

  struct Cand {
    double log_prob;
    std::size_t parent;
    int token;
  };

  for (std::size_t step = 1; step <= cfg.max_len && !beam.empty(); ++step) {
    std::vector<Cand> cands;
    cands.reserve(beam.size() * vocab);
    std::vector<RecurrentState> next_states(beam.size());
    for (std::size_t p = 0; p < beam.size(); ++p) {
      const Hypothesis& hyp = beam[p];
      const int prev = hyp.token_ids.empty() ? Vocabulary::kBos : hyp.token_ids.back();
      Vector context = step == 1 ? first.context : attention(hyp.state.h, enc).context;
      auto [next, logits] = decoder_step(m, prev, hyp.state, context);
      next_states[p] = std::move(next);
      Vector lsm = log_softmax(logits);
      for (std::size_t v = 0; v < vocab; ++v) {
        cands.push_back({hyp.log_prob + lsm[v], p, static_cast<int>(v)});
      }
    }

    const std::size_t keep = std::min(cfg.beam_width, cands.size());
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(keep),
                      cands.end(), [](const Cand& a, const Cand& b) {
                        if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
                        if (a.parent != b.parent) return a.parent < b.parent;
                        return a.token < b.token;
                      });
    cands.resize(keep);

    std::vector<Hypothesis> next_beam;
    for (const Cand& c : cands) {
      Hypothesis hyp;
      hyp.token_ids = beam[c.parent].token_ids;
      hyp.token_ids.push_back(c.token);
      hyp.log_prob = c.log_prob;
      if (c.token == Vocabulary::kEos || step == cfg.max_len) {
        hyp.finished = true;
        finished.push_back({std::move(hyp), step});
      } else {
        hyp.state = next_states[c.parent];
        next_beam.push_back(std::move(hyp));
      }
    }
    beam = std::move(next_beam);
  }

  std::stable_sort(finished.begin(), finished.end(),
                   [&](const FinishedEntry& a, const FinishedEntry& b) {
                     const double sa = hypothesis_score(a.hyp, cfg);
                     const double sb = hypothesis_score(b.hyp, cfg);
                     if (sa != sb) return sa > sb;
                     if (a.step != b.step) return a.step < b.step;
                     return a.hyp.token_ids < b.hyp.token_ids;
                   });
  if (finished.size() > cfg.beam_width) finished.resize(cfg.beam_width);

  std::vector<Hypothesis> out;
  out.reserve(finished.size());
  for (FinishedEntry& f : finished) out.push_back(std::move(f.hyp));
  return out;
}

}  // namespace

std::vector<Hypothesis> beam_search(const ModelParams& m, const std::vector<int>& message_ids,
                                    const ContextStrategy& strategy, const BeamConfig& cfg,
                                    SeededRng* strategy_rng) {
  EncoderStates enc = encode(m, message_ids);
  RecurrentState init = decoder_init(m, enc);
  FirstContext first = select_first_context(strategy, enc, init, strategy_rng);
  return run_beam(m, enc, init, first, cfg);
}

std::vector<Reranked> mmi_rerank(const std::vector<Hypothesis>& candidates,
                                 const ModelParams& reverse_model,
                                 const std::vector<int>& original_message_ids,
                                 double lambda) {
  if (candidates.empty()) throw ShapeError("mmi_rerank: empty candidate list");
  const std::size_t vocab = reverse_model.vocab_size();
  auto check = [&](const std::vector<int>& ids) {
    for (int id : ids) {
      if (id < 0 || static_cast<std::size_t>(id) >= vocab) {
        throw ConfigError("mmi_rerank: token id " + std::to_string(id) +
                          " outside the reverse model vocabulary (" + std::to_string(vocab) +
                          ")");
      }
    }
  };
  check(original_message_ids);

  std::vector<Reranked> out;
  out.reserve(candidates.size());
  for (const Hypothesis& hyp : candidates) {
    check(hyp.token_ids);
    std::vector<int> reverse_source = hyp.token_ids;
    if (reverse_source.size() > 1 && reverse_source.back() == Vocabulary::kEos) {
      reverse_source.pop_back();
    }
    if (reverse_source.empty()) reverse_source.push_back(Vocabulary::kEos);
    Reranked r;
    r.hypothesis = hyp;
    r.reverse_log_prob = sequence_log_prob(reverse_model, reverse_source, original_message_ids);
    r.score = hyp.log_prob + lambda * r.reverse_log_prob;
    out.push_back(std::move(r));
  }
  // lambda = 0 is contractually the identity permutation even if the input
  // ordering disagrees with the forward scores.
  if (lambda != 0.0) {
    std::stable_sort(out.begin(), out.end(),
                     [](const Reranked& a, const Reranked& b) { return a.score > b.score; });
  }
  return out;
}

std::vector<SelectionRow> inspect_selection(const ModelParams& m,
                                            const std::vector<int>& message_ids,
                                            const std::vector<ContextStrategy>& strategies,
                                            const BeamConfig& cfg, SeededRng* strategy_rng) {
  EncoderStates enc = encode(m, message_ids);
  RecurrentState init = decoder_init(m, enc);
  std::vector<SelectionRow> rows;
  rows.reserve(strategies.size());
  for (const ContextStrategy& strategy : strategies) {
    FirstContext first = select_first_context(strategy, enc, init, strategy_rng);
    SelectionRow row;
    row.strategy = strategy_name(strategy);
    row.selected_index = first.index;
    row.clamped = first.clamped;
    std::vector<Hypothesis> hyps = run_beam(m, enc, init, first, cfg);
    row.response_ids = std::move(hyps.front().token_ids);
    row.log_prob = hyps.front().log_prob;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string render_selection_row(const Vocabulary& vocab, const std::vector<int>& message_ids,
                                 const SelectionRow& row) {
  auto join = [&](const std::vector<int>& ids, bool strip_eos) {
    std::string text;
    std::size_t n = ids.size();
    if (strip_eos && n > 0 && ids[n - 1] == Vocabulary::kEos) --n;
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) text += ' ';
      text += vocab.token(ids[i]);
    }
    return text;
  };
  std::string index = "-";
  if (row.selected_index.has_value()) {
    index = std::to_string(*row.selected_index);
    if (row.clamped) index += '*';
  }
  char log_prob[64];
  std::snprintf(log_prob, sizeof(log_prob), "%.6f", row.log_prob);
  return join(message_ids, false) + '\t' + row.strategy + '\t' + index + '\t' +
         join(row.response_ids, true) + '\t' + log_prob;
}

}  // namespace s2sa
