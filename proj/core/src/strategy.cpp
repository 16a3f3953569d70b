#include "s2sa/strategy.hpp"

#include <charconv>

#include "s2sa/errors.hpp"

namespace s2sa {

static std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("invalid " + what + ": '" + text + "'");
  }
  return value;
}

ContextStrategy parse_strategy(const std::string& name) {
  if (name == "standard") return StandardSoft{};
  if (name == "hard-bos") return HardToBos{};
  if (name == "selfattn-max") return SelfAttnMax{};
  if (name == "selfattn-min") return SelfAttnMin{};
  if (name.rfind("positional:", 0) == 0) {
    const std::uint64_t k = parse_u64(name.substr(11), "positional index");
    if (k < 1) throw ConfigError("positional index must be at least 1");
    return PositionalHard{static_cast<std::size_t>(k)};
  }
  if (name.rfind("random:", 0) == 0) {
    return RandomHard{parse_u64(name.substr(7), "random seed")};
  }
  throw ConfigError("unknown strategy '" + name +
                    "' (expected standard, hard-bos, positional:<k>, random:<seed>, "
                    "selfattn-max, selfattn-min)");
}

std::string strategy_name(const ContextStrategy& strategy) {
  struct Namer {
    std::string operator()(const StandardSoft&) const { return "standard"; }
    std::string operator()(const HardToBos&) const { return "hard-bos"; }
    std::string operator()(const PositionalHard& s) const {
      return "positional:" + std::to_string(s.position);
    }
    std::string operator()(const RandomHard& s) const {
      return "random:" + std::to_string(s.seed);
    }
    std::string operator()(const SelfAttnMax&) const { return "selfattn-max"; }
    std::string operator()(const SelfAttnMin&) const { return "selfattn-min"; }
  };
  return std::visit(Namer{}, strategy);
}

}  // namespace s2sa
