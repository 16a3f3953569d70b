#include "s2sa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "s2sa/errors.hpp"

namespace s2sa {

namespace {

using Ngram = std::vector<std::string>;

std::map<Ngram, std::size_t> ngram_counts(const std::vector<std::string>& tokens, std::size_t n) {
  std::map<Ngram, std::size_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    counts[Ngram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                 tokens.begin() + static_cast<std::ptrdiff_t>(i + n))]++;
  }
  return counts;
}

struct PooledPrecision {
  std::size_t matches = 0;
  std::size_t total = 0;
};

PooledPrecision pooled_precision(const EvalCorpus& corpus, std::size_t n) {
  PooledPrecision p;
  for (const EvalItem& item : corpus.items) {
    if (item.candidate.size() >= n) p.total += item.candidate.size() - n + 1;
    auto cand = ngram_counts(item.candidate, n);
    if (cand.empty()) continue;
    auto ref = ngram_counts(item.reference, n);
    for (const auto& [gram, count] : cand) {
      auto it = ref.find(gram);
      if (it != ref.end()) p.matches += std::min(count, it->second);
    }
  }
  return p;
}

constexpr double kSmoothingFloor = 1e-9;

}  // namespace

double bleu(const EvalCorpus& corpus, std::size_t max_n) {
  if (corpus.items.empty()) throw ShapeError("bleu: empty corpus");
  if (max_n < 1) throw ShapeError("bleu: max_n must be >= 1");

  std::size_t ref_len = 0, cand_len = 0;
  for (const EvalItem& item : corpus.items) {
    ref_len += item.reference.size();
    cand_len += item.candidate.size();
  }
  if (cand_len == 0) return 0.0;

  double log_sum = 0.0;
  for (std::size_t n = 1; n <= max_n; ++n) {
    const PooledPrecision p = pooled_precision(corpus, n);
    double precision = 1.0;  // nothing matchable at this order: drop out of the mean
    if (p.total > 0) {
      precision = p.matches > 0 ? static_cast<double>(p.matches) / static_cast<double>(p.total)
                                : kSmoothingFloor;
    }
    log_sum += std::log(precision) / static_cast<double>(max_n);
  }
  const double bp =
      cand_len >= ref_len
          ? 1.0
          : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(cand_len));
  return bp * std::exp(log_sum);
}

double distinct_n(const std::vector<std::vector<std::string>>& candidates, std::size_t n) {
  if (n < 1) throw ShapeError("distinct_n: n must be >= 1");
  std::set<Ngram> unique;
  std::size_t total = 0;
  for (const std::vector<std::string>& cand : candidates) {
    if (cand.size() < n) continue;
    total += cand.size() - n + 1;
    for (std::size_t i = 0; i + n <= cand.size(); ++i) {
      unique.insert(Ngram(cand.begin() + static_cast<std::ptrdiff_t>(i),
                          cand.begin() + static_cast<std::ptrdiff_t>(i + n)));
    }
  }
  if (total == 0) return 0.0;
  return static_cast<double>(unique.size()) / static_cast<double>(total);
}

MetricsReport evaluate(const EvalCorpus& corpus) {
  if (corpus.items.empty()) throw ShapeError("evaluate: empty corpus");
  MetricsReport report;
  report.bleu = bleu(corpus, 4);

  std::vector<std::vector<std::string>> candidates;
  candidates.reserve(corpus.items.size());
  for (const EvalItem& item : corpus.items) candidates.push_back(item.candidate);
  report.distinct1 = distinct_n(candidates, 1);
  report.distinct2 = distinct_n(candidates, 2);

  for (std::size_t n = 1; n <= 4; ++n) {
    const PooledPrecision p = pooled_precision(corpus, n);
    report.counts.ngram_matches.push_back(p.matches);
    report.counts.ngram_totals.push_back(p.total);
  }
  for (const EvalItem& item : corpus.items) {
    report.counts.ref_len += item.reference.size();
    report.counts.cand_len += item.candidate.size();
  }
  auto tally = [&](std::size_t n, std::size_t& uniq, std::size_t& total) {
    std::set<Ngram> seen;
    for (const auto& cand : candidates) {
      if (cand.size() < n) continue;
      total += cand.size() - n + 1;
      for (std::size_t i = 0; i + n <= cand.size(); ++i) {
        seen.insert(Ngram(cand.begin() + static_cast<std::ptrdiff_t>(i),
                          cand.begin() + static_cast<std::ptrdiff_t>(i + n)));
      }
    }
    uniq = seen.size();
  };
  tally(1, report.counts.distinct1_unique, report.counts.distinct1_total);
  tally(2, report.counts.distinct2_unique, report.counts.distinct2_total);
  return report;
}

std::string metrics_tsv_header() { return "method\tBLEU\tdistinct-1\tdistinct-2"; }

std::string render_metrics_row(const std::string& method, const MetricsReport& report) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%.6f\t%.6f\t%.6f", report.bleu * 100.0, report.distinct1,
                report.distinct2);
  return method + '\t' + buf;
}

}  // namespace s2sa
