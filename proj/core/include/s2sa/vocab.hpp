#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace s2sa {

// Bidirectional token<->id map. Ids 0..3 are the reserved specials; everything
// else is assigned in frequency order by build_vocab. Unknown tokens map to
// the UNK id on lookup.
class Vocabulary {
public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kUnk = 3;

  static constexpr const char* kPadToken = "<pad>";
  static constexpr const char* kBosToken = "<bos>";
  static constexpr const char* kEosToken = "<eos>";
  static constexpr const char* kUnkToken = "<unk>";

  explicit Vocabulary(std::size_t capacity = 25000);

  // Appends a non-special token if absent and under capacity. Returns its id,
  // or the existing id, or kUnk when the vocabulary is full.
  int add(const std::string& token);

  int lookup(const std::string& token) const;
  const std::string& token(int id) const;  // ShapeError on out-of-range id

  std::size_t size() const { return id_to_token_.size(); }
  std::size_t capacity() const { return capacity_; }

  const std::vector<std::string>& tokens() const { return id_to_token_; }

  // One token per line, line number = id (specials included).
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.id_to_token_ == b.id_to_token_;
  }

private:
  std::size_t capacity_;
  std::unordered_map<std::string, int> token_to_id_;
  std::vector<std::string> id_to_token_;
};

std::vector<int> encode(const Vocabulary& vocab, const std::vector<std::string>& tokens);
std::vector<std::string> decode(const Vocabulary& vocab, const std::vector<int>& ids);

}  // namespace s2sa
