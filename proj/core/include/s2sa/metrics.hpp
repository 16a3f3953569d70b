#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace s2sa {

struct EvalItem {
  std::vector<std::string> message;
  std::vector<std::string> reference;
  std::vector<std::string> candidate;  // may be empty; still scored
};

struct EvalCorpus {
  std::vector<EvalItem> items;
};

// Corpus-level BLEU in [0,1]: modified n-gram precisions clipped per item and
// pooled over the corpus, geometric mean over n = 1..max_n, times the brevity
// penalty exp(min(0, 1 - ref_len/cand_len)). A precision with matchable
// n-grams but zero matches is floored at 1e-9; one with nothing to match
// (all candidates shorter than n) drops out as 1. Single reference per item.
double bleu(const EvalCorpus& corpus, std::size_t max_n = 4);

// (distinct n-grams across all candidates) / (total n-grams); 0 when total is
// 0. Pooled over the whole set, not averaged per sentence.
double distinct_n(const std::vector<std::vector<std::string>>& candidates, std::size_t n);

struct MetricsCounts {
  std::vector<std::size_t> ngram_matches;  // index n-1
  std::vector<std::size_t> ngram_totals;   // index n-1
  std::size_t ref_len = 0;
  std::size_t cand_len = 0;
  std::size_t distinct1_unique = 0;
  std::size_t distinct1_total = 0;
  std::size_t distinct2_unique = 0;
  std::size_t distinct2_total = 0;
};

struct MetricsReport {
  double bleu = 0.0;
  double distinct1 = 0.0;
  double distinct2 = 0.0;
  MetricsCounts counts;
};

MetricsReport evaluate(const EvalCorpus& corpus);

// TSV header and row for the comparison table; BLEU is rendered x100, the
// distinct columns stay in [0,1]. Six decimals each.
std::string metrics_tsv_header();
std::string render_metrics_row(const std::string& method, const MetricsReport& report);

}  // namespace s2sa
