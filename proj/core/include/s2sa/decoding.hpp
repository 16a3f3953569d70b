#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "s2sa/model.hpp"
#include "s2sa/rng.hpp"
#include "s2sa/strategy.hpp"

namespace s2sa {

// Result of choosing the decoder's first context vector. Hard strategies set
// `index` (1-based source position) and copy that hidden vector bitwise;
// soft attention sets `alphas` instead. `clamped` marks a positional request
// past the end of the message.
struct FirstContext {
  Vector context;
  std::optional<std::size_t> index;
  std::optional<Vector> alphas;
  bool clamped = false;
};

// Per-position self-attention mass: e_i = sum_j <h_i, h_j>.
Vector self_attention_scores(const EncoderStates& enc);

// `h0` is the decoder's initial state (the attention query for the soft and
// argmax-of-soft strategies). `rng` is consumed only by RandomHard; when
// null, a generator seeded from the strategy's own seed is used.
FirstContext select_first_context(const ContextStrategy& strategy, const EncoderStates& enc,
                                  const RecurrentState& h0, SeededRng* rng = nullptr);

struct Hypothesis {
  std::vector<int> token_ids;
  double log_prob = 0.0;  // sum of chosen-token log-softmax values
  RecurrentState state;   // meaningful only while the hypothesis is active
  bool finished = false;
};

struct BeamConfig {
  std::size_t beam_width = 10;
  std::size_t max_len = 50;
  bool length_normalize = false;
};

// Ranking score: raw log_prob, or log_prob / length when normalizing.
double hypothesis_score(const Hypothesis& hyp, const BeamConfig& cfg);

// Width-limited best-first search. Step 1's context comes from the strategy;
// later steps use soft attention per hypothesis. Each step keeps the top
// beam_width expansions by cumulative log-probability; those ending in EOS
// (or hitting max_len) are frozen into the result pool and no longer expanded.
// Returns up to beam_width finished hypotheses sorted by score, ties broken
// by earlier finish step, then lexicographic token ids.
std::vector<Hypothesis> beam_search(const ModelParams& m, const std::vector<int>& message_ids,
                                    const ContextStrategy& strategy = StandardSoft{},
                                    const BeamConfig& cfg = {},
                                    SeededRng* strategy_rng = nullptr);

// A candidate annotated with its bidirectional score.
struct Reranked {
  Hypothesis hypothesis;
  double reverse_log_prob = 0.0;
  double score = 0.0;  // hypothesis.log_prob + lambda * reverse_log_prob
};

// Rescores candidates with score = forward log-prob + lambda * (teacher-forced
// log-likelihood of the original message given the candidate under the reverse
// model), then stable-sorts descending by score. lambda = 0 keeps the input
// order untouched. A candidate's trailing EOS is stripped before it is fed to
// the reverse model as a message (a bare-EOS candidate is scored as itself).
std::vector<Reranked> mmi_rerank(const std::vector<Hypothesis>& candidates,
                                 const ModelParams& reverse_model,
                                 const std::vector<int>& original_message_ids,
                                 double lambda = 1.0);

// One strategy's view of one message: what was selected and what got decoded.
struct SelectionRow {
  std::string strategy;
  std::optional<std::size_t> selected_index;  // 1-based; absent for soft attention
  bool clamped = false;
  std::vector<int> response_ids;  // best hypothesis, trailing EOS included
  double log_prob = 0.0;
};

// Decodes the message once per strategy, reusing a single first-context
// selection per row so the reported index is the one the search actually used.
std::vector<SelectionRow> inspect_selection(const ModelParams& m,
                                            const std::vector<int>& message_ids,
                                            const std::vector<ContextStrategy>& strategies,
                                            const BeamConfig& cfg = {},
                                            SeededRng* strategy_rng = nullptr);

// TSV line: message, strategy, selected_index (1-based, "-" if none, "*"
// appended when clamped), response text, log_prob with 6 decimals.
std::string render_selection_row(const Vocabulary& vocab, const std::vector<int>& message_ids,
                                 const SelectionRow& row);

}  // namespace s2sa
