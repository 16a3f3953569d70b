#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "s2sa/vocab.hpp"

namespace s2sa {

struct DialoguePair {
  std::vector<std::string> message;
  std::vector<std::string> response;
};

// Per-file accounting from load_pairs. Malformed lines do not abort the load;
// they are recorded here with their 1-based line numbers.
struct LoadReport {
  std::size_t total_lines = 0;
  std::size_t empty_side_skipped = 0;
  std::size_t duplicates_removed = 0;
  std::vector<std::pair<std::size_t, std::string>> parse_errors;
};

struct SplitSpec {
  double train_ratio = 0.85;
  double test_ratio = 0.10;
  double valid_ratio = 0.05;
  std::uint64_t seed = 42;

  void validate() const;
};

struct SplitResult {
  std::vector<DialoguePair> train;
  std::vector<DialoguePair> test;
  std::vector<DialoguePair> valid;
};

std::vector<std::string> tokenize(const std::string& line);

// One "message<TAB>response" pair per line. Keeps file order, drops exact
// duplicates (first occurrence wins), skips lines where either side is empty.
std::vector<DialoguePair> load_pairs(const std::filesystem::path& path,
                                     LoadReport* report = nullptr);

void save_pairs(const std::filesystem::path& path, const std::vector<DialoguePair>& pairs);

// Keeps pairs where both sides have at most max_tokens tokens.
std::vector<DialoguePair> filter_by_length(const std::vector<DialoguePair>& pairs,
                                           std::size_t max_tokens);

// Tokens ranked by descending corpus frequency (both sides counted), ties
// broken lexicographically; top (capacity - 4) admitted after the specials.
Vocabulary build_vocab(const std::vector<DialoguePair>& pairs, std::size_t capacity);

// Seeded shuffle, then contiguous cuts at floor(n*train) and floor(n*(train+test)).
SplitResult split(std::vector<DialoguePair> pairs, const SplitSpec& spec);

}  // namespace s2sa
