#include "s2sa/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include "s2sa/errors.hpp"
#include "s2sa/rng.hpp"

namespace s2sa {

void SplitSpec::validate() const {
  if (train_ratio <= 0.0 || test_ratio <= 0.0 || valid_ratio <= 0.0) {
    throw ConfigError("split ratios must all be positive");
  }
  if (std::fabs(train_ratio + test_ratio + valid_ratio - 1.0) > 1e-9) {
    throw ConfigError("split ratios must sum to 1");
  }
}

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) tokens.push_back(std::move(tok));
  return tokens;
}

static std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::vector<DialoguePair> load_pairs(const std::filesystem::path& path, LoadReport* report) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read pair file: " + path.string());

  LoadReport local;
  LoadReport& rep = report ? *report : local;

  std::vector<DialoguePair> pairs;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    ++rep.total_lines;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      rep.parse_errors.emplace_back(line_no, "expected exactly one TAB");
      continue;
    }
    DialoguePair pair;
    pair.message = tokenize(line.substr(0, tab));
    pair.response = tokenize(line.substr(tab + 1));
    if (pair.message.empty() || pair.response.empty()) {
      ++rep.empty_side_skipped;
      continue;
    }
    std::string key = join(pair.message);
    key += '\t';
    key += join(pair.response);
    if (!seen.insert(std::move(key)).second) {
      ++rep.duplicates_removed;
      continue;
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

void save_pairs(const std::filesystem::path& path, const std::vector<DialoguePair>& pairs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write pair file: " + path.string());
  for (const DialoguePair& p : pairs) out << join(p.message) << '\t' << join(p.response) << '\n';
  if (!out) throw DataError("failed writing pair file: " + path.string());
}

std::vector<DialoguePair> filter_by_length(const std::vector<DialoguePair>& pairs,
                                           std::size_t max_tokens) {
  if (max_tokens < 1) throw ShapeError("length cap must be at least 1");
  std::vector<DialoguePair> kept;
  for (const DialoguePair& p : pairs) {
    if (p.message.size() <= max_tokens && p.response.size() <= max_tokens) kept.push_back(p);
  }
  return kept;
}

Vocabulary build_vocab(const std::vector<DialoguePair>& pairs, std::size_t capacity) {
  // std::map keeps tokens in lexicographic order, which settles frequency ties.
  std::map<std::string, std::size_t> freq;
  for (const DialoguePair& p : pairs) {
    for (const std::string& t : p.message) ++freq[t];
    for (const std::string& t : p.response) ++freq[t];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  Vocabulary vocab(capacity);
  for (const auto& [token, count] : ranked) {
    if (vocab.size() >= capacity) break;
    vocab.add(token);
  }
  return vocab;
}

SplitResult split(std::vector<DialoguePair> pairs, const SplitSpec& spec) {
  spec.validate();
  SeededRng rng(spec.seed);
  rng.shuffle(pairs);

  const std::size_t n = pairs.size();
  const auto cut1 = static_cast<std::size_t>(std::floor(n * spec.train_ratio));
  const auto cut2 =
      static_cast<std::size_t>(std::floor(n * (spec.train_ratio + spec.test_ratio)));

  SplitResult result;
  result.train.assign(pairs.begin(), pairs.begin() + cut1);
  result.test.assign(pairs.begin() + cut1, pairs.begin() + cut2);
  result.valid.assign(pairs.begin() + cut2, pairs.end());
  return result;
}

}  // namespace s2sa
