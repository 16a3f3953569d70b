#pragma once

#include <cstdint>
#include <string>
#include <variant>

namespace s2sa {

// First-context-vector selection rules. Everything after decoder step 1 uses
// the ordinary soft attention regardless of the choice here.
struct StandardSoft {};
struct HardToBos {};
struct PositionalHard {
  std::size_t position = 1;  // 1-based; clamped to the message length
};
struct RandomHard {
  std::uint64_t seed = 0;
};
struct SelfAttnMax {};
struct SelfAttnMin {};

using ContextStrategy =
    std::variant<StandardSoft, HardToBos, PositionalHard, RandomHard, SelfAttnMax, SelfAttnMin>;

// CLI spellings: standard, hard-bos, positional:<k>, random:<seed>,
// selfattn-max, selfattn-min.
ContextStrategy parse_strategy(const std::string& name);
std::string strategy_name(const ContextStrategy& strategy);

}  // namespace s2sa
