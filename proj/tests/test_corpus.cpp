#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "s2sa/corpus.hpp"
#include "s2sa/errors.hpp"
#include "s2sa/vocab.hpp"
#include "test_util.hpp"

using namespace s2sa;
using testutil::TempDir;
using testutil::write_file;

namespace {

std::string side_text(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::string pair_key(const DialoguePair& p) {
  return side_text(p.message) + "\t" + side_text(p.response);
}

}  // namespace

TEST_CASE("tokenize splits on whitespace runs") {
  CHECK(tokenize("a b  c") == std::vector<std::string>{"a", "b", "c"});
  CHECK(tokenize("  hi  ") == std::vector<std::string>{"hi"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("\t one\ttwo ") == std::vector<std::string>{"one", "two"});
}

TEST_CASE("load_pairs removes exact duplicates keeping the first") {
  TempDir dir("pairs");
  write_file(dir / "p.tsv", "hi\thello\nhi\thello\n");
  LoadReport report;
  auto pairs = load_pairs(dir / "p.tsv", &report);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].message == std::vector<std::string>{"hi"});
  CHECK(pairs[0].response == std::vector<std::string>{"hello"});
  CHECK(report.duplicates_removed == 1);
  CHECK(report.total_lines == 2);
}

TEST_CASE("load_pairs on an empty file yields nothing") {
  TempDir dir("pairs");
  write_file(dir / "empty.tsv", "");
  auto pairs = load_pairs(dir / "empty.tsv");
  CHECK(pairs.empty());
}

TEST_CASE("load_pairs five-line fixture: one duplicate, one malformed") {
  TempDir dir("pairs");
  write_file(dir / "p.tsv",
             "a b\tc\n"
             "d\te f\n"
             "a b\tc\n"        // duplicate of line 1
             "no tab here\n"   // malformed
             "g\th\n");
  LoadReport report;
  auto pairs = load_pairs(dir / "p.tsv", &report);
  CHECK(pairs.size() == 3);
  REQUIRE(report.parse_errors.size() == 1);
  CHECK(report.parse_errors[0].first == 4);
  CHECK(report.duplicates_removed == 1);
}

TEST_CASE("load_pairs counts a line with two tabs as malformed") {
  TempDir dir("pairs");
  write_file(dir / "p.tsv", "a\tb\tc\nok\tfine\n");
  LoadReport report;
  auto pairs = load_pairs(dir / "p.tsv", &report);
  CHECK(pairs.size() == 1);
  REQUIRE(report.parse_errors.size() == 1);
  CHECK(report.parse_errors[0].first == 1);
}

TEST_CASE("load_pairs skips empty-side lines with a count") {
  TempDir dir("pairs");
  write_file(dir / "p.tsv", "\tresponse only\nmessage only\t\nm\tr\n");
  LoadReport report;
  auto pairs = load_pairs(dir / "p.tsv", &report);
  CHECK(pairs.size() == 1);
  CHECK(report.empty_side_skipped == 2);
}

TEST_CASE("load_pairs keeps file order") {
  TempDir dir("pairs");
  write_file(dir / "p.tsv", "m1\tr1\nm2\tr2\nm3\tr3\n");
  auto pairs = load_pairs(dir / "p.tsv");
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[0].message == std::vector<std::string>{"m1"});
  CHECK(pairs[1].message == std::vector<std::string>{"m2"});
  CHECK(pairs[2].message == std::vector<std::string>{"m3"});
}

TEST_CASE("load_pairs output never contains two identical pairs") {
  TempDir dir("pairs");
  write_file(dir / "p.tsv",
             "x\ty\nu\tv\nx\ty\nu\tv\nx\tz\n");
  auto pairs = load_pairs(dir / "p.tsv");
  std::set<std::string> keys;
  for (const auto& p : pairs) keys.insert(pair_key(p));
  CHECK(keys.size() == pairs.size());
}

TEST_CASE("load_pairs rejects a missing file") {
  CHECK_THROWS_AS(load_pairs("/nonexistent/definitely/missing.tsv"), DataError);
}

TEST_CASE("filter_by_length keeps pairs fitting on both sides") {
  auto mk = [](const char* m, const char* r) {
    return DialoguePair{tokenize(m), tokenize(r)};
  };
  std::vector<DialoguePair> pairs = {mk("a", "b c")};
  CHECK(filter_by_length(pairs, 1).empty());
  CHECK(filter_by_length(pairs, 1000000).size() == 1);

  std::vector<DialoguePair> fixture = {
      mk("a b c", "a b c d e f"),           // (3, 6) keep
      mk("a b c d e f g", "a b"),           // (7, 2) drop
      mk("a b c d e f", "a b c d e f"),     // (6, 6) keep
      mk("a", "a b c d e f g h"),           // (1, 8) drop
  };
  auto kept = filter_by_length(fixture, 6);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].message.size() == 3);
  CHECK(kept[1].message.size() == 6);
}

TEST_CASE("build_vocab ranks by frequency then lexicographically") {
  std::vector<DialoguePair> pairs = {{tokenize("a a b"), tokenize("a")}};
  Vocabulary v = build_vocab(pairs, 6);
  CHECK(v.size() == 6);
  CHECK(v.lookup("a") == 4);
  CHECK(v.lookup("b") == 5);

  Vocabulary empty = build_vocab({}, 100);
  CHECK(empty.size() == 4);

  // capacity 5 admits one token; tie on frequency resolves lexicographically
  std::vector<DialoguePair> tied = {{tokenize("c b"), tokenize("b c d d")}};
  Vocabulary small = build_vocab(tied, 5);
  CHECK(small.size() == 5);
  CHECK(small.lookup("b") == 4);  // b,c,d all appear twice; 'b' sorts first
  CHECK(small.lookup("c") == Vocabulary::kUnk);
  CHECK(small.lookup("d") == Vocabulary::kUnk);
}

TEST_CASE("build_vocab is deterministic") {
  std::vector<DialoguePair> pairs = {
      {tokenize("the cat sat"), tokenize("on the mat")},
      {tokenize("the dog ran"), tokenize("to the cat")},
  };
  Vocabulary a = build_vocab(pairs, 10);
  Vocabulary b = build_vocab(pairs, 10);
  CHECK(a == b);
}

TEST_CASE("specials occupy fixed ids and fixed spellings") {
  Vocabulary v(25000);
  CHECK(v.size() == 4);
  CHECK(v.lookup(Vocabulary::kPadToken) == Vocabulary::kPad);
  CHECK(v.lookup(Vocabulary::kBosToken) == Vocabulary::kBos);
  CHECK(v.lookup(Vocabulary::kEosToken) == Vocabulary::kEos);
  CHECK(v.lookup(Vocabulary::kUnkToken) == Vocabulary::kUnk);
  CHECK(v.token(0) == Vocabulary::kPadToken);
  CHECK(v.token(3) == Vocabulary::kUnkToken);
}

TEST_CASE("encode and decode round-trip in-vocabulary material") {
  std::vector<DialoguePair> pairs = {{tokenize("a a b"), tokenize("a")}};
  Vocabulary v = build_vocab(pairs, 6);

  std::vector<std::string> tokens = {"a", "b", "a"};
  auto ids = encode(v, tokens);
  CHECK(ids == std::vector<int>{4, 5, 4});
  CHECK(decode(v, ids) == tokens);

  CHECK(encode(v, {"zzz"}) == std::vector<int>{Vocabulary::kUnk});
  CHECK(decode(v, {Vocabulary::kUnk}) == std::vector<std::string>{Vocabulary::kUnkToken});

  auto mixed = encode(v, {"a", "zzz", "b"});
  CHECK(mixed == std::vector<int>{4, Vocabulary::kUnk, 5});
}

TEST_CASE("decode rejects out-of-range ids") {
  Vocabulary v(10);
  CHECK_THROWS_AS(decode(v, {99}), ShapeError);
  CHECK_THROWS_AS(v.token(-1), ShapeError);
}

TEST_CASE("vocabulary add respects capacity") {
  Vocabulary v(5);
  CHECK(v.add("one") == 4);
  CHECK(v.add("one") == 4);   // existing id, not re-added
  CHECK(v.add("two") == Vocabulary::kUnk);  // full
  CHECK(v.size() == 5);
}

TEST_CASE("vocabulary save and load round-trip") {
  TempDir dir("vocab");
  std::vector<DialoguePair> pairs = {{tokenize("x y z"), tokenize("y z z")}};
  Vocabulary v = build_vocab(pairs, 10);
  v.save(dir / "vocab.txt");
  Vocabulary loaded = Vocabulary::load(dir / "vocab.txt");
  CHECK(v == loaded);
  CHECK(loaded.lookup("z") == v.lookup("z"));
}

TEST_CASE("split on the empty input yields three empty parts") {
  SplitResult r = split({}, SplitSpec{});
  CHECK(r.train.empty());
  CHECK(r.test.empty());
  CHECK(r.valid.empty());
}

TEST_CASE("split is deterministic and partitions the input") {
  std::vector<DialoguePair> pairs;
  for (int i = 0; i < 23; ++i) {
    pairs.push_back({{"m" + std::to_string(i)}, {"r" + std::to_string(i)}});
  }
  SplitSpec spec;
  spec.seed = 99;
  SplitResult a = split(pairs, spec);
  SplitResult b = split(pairs, spec);

  auto keys = [](const std::vector<DialoguePair>& v) {
    std::vector<std::string> out;
    for (const auto& p : v) out.push_back(pair_key(p));
    return out;
  };
  CHECK(keys(a.train) == keys(b.train));
  CHECK(keys(a.test) == keys(b.test));
  CHECK(keys(a.valid) == keys(b.valid));

  std::multiset<std::string> got;
  for (const auto& part : {a.train, a.test, a.valid}) {
    for (const auto& p : part) got.insert(pair_key(p));
  }
  std::multiset<std::string> want;
  for (const auto& p : pairs) want.insert(pair_key(p));
  CHECK(got == want);
}

TEST_CASE("split sizes follow the floor rule: 20 pairs at 0.85/0.1/0.05") {
  std::vector<DialoguePair> pairs;
  for (int i = 0; i < 20; ++i) {
    pairs.push_back({{"m" + std::to_string(i)}, {"r" + std::to_string(i)}});
  }
  SplitResult r = split(pairs, SplitSpec{});
  CHECK(r.train.size() == 17);
  CHECK(r.test.size() == 2);
  CHECK(r.valid.size() == 1);
}

TEST_CASE("split spec validation") {
  SplitSpec bad;
  bad.train_ratio = 0.5;
  bad.test_ratio = 0.1;
  bad.valid_ratio = 0.1;  // sums to 0.7
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  SplitSpec negative;
  negative.train_ratio = -0.5;
  negative.test_ratio = 1.0;
  negative.valid_ratio = 0.5;
  CHECK_THROWS_AS(negative.validate(), ConfigError);

  CHECK_NOTHROW(SplitSpec{}.validate());
}

TEST_CASE("save_pairs writes the canonical TSV form") {
  TempDir dir("pairs");
  std::vector<DialoguePair> pairs = {{tokenize("a b"), tokenize("c")}};
  save_pairs(dir / "out.tsv", pairs);
  CHECK(testutil::read_file(dir / "out.tsv") == "a b\tc\n");
}
