#include "s2sa/vocab.hpp"

#include <fstream>

#include "s2sa/errors.hpp"

namespace s2sa {

Vocabulary::Vocabulary(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ <= 4) throw ShapeError("vocabulary capacity must exceed the 4 specials");
  id_to_token_ = {kPadToken, kBosToken, kEosToken, kUnkToken};
  for (int id = 0; id < 4; ++id) token_to_id_.emplace(id_to_token_[id], id);
}

int Vocabulary::add(const std::string& token) {
  auto it = token_to_id_.find(token);
  if (it != token_to_id_.end()) return it->second;
  if (id_to_token_.size() >= capacity_) return kUnk;
  const int id = static_cast<int>(id_to_token_.size());
  id_to_token_.push_back(token);
  token_to_id_.emplace(token, id);
  return id;
}

int Vocabulary::lookup(const std::string& token) const {
  auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= id_to_token_.size()) {
    throw ShapeError("token id " + std::to_string(id) + " out of range (size " +
                     std::to_string(id_to_token_.size()) + ")");
  }
  return id_to_token_[static_cast<std::size_t>(id)];
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write vocabulary file: " + path.string());
  for (const std::string& tok : id_to_token_) out << tok << '\n';
  if (!out) throw DataError("failed writing vocabulary file: " + path.string());
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read vocabulary file: " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  if (lines.size() < 4 || lines[0] != kPadToken || lines[1] != kBosToken ||
      lines[2] != kEosToken || lines[3] != kUnkToken) {
    throw DataError("vocabulary file missing the reserved specials: " + path.string());
  }
  Vocabulary v(std::max<std::size_t>(lines.size(), 5));
  for (std::size_t i = 4; i < lines.size(); ++i) {
    if (lines[i].empty()) throw DataError("empty token at line " + std::to_string(i + 1));
    v.add(lines[i]);
  }
  return v;
}

std::vector<int> encode(const Vocabulary& vocab, const std::vector<std::string>& tokens) {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const std::string& tok : tokens) ids.push_back(vocab.lookup(tok));
  return ids;
}

std::vector<std::string> decode(const Vocabulary& vocab, const std::vector<int>& ids) {
  std::vector<std::string> tokens;
  tokens.reserve(ids.size());
  for (int id : ids) tokens.push_back(vocab.token(id));
  return tokens;
}

}  // namespace s2sa
