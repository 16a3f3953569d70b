#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "s2sa/decoding.hpp"
#include "s2sa/errors.hpp"
#include "s2sa/model.hpp"
#include "s2sa/rng.hpp"
#include "s2sa/vocab.hpp"

using namespace s2sa;

namespace {

ModelParams make_model(std::size_t vocab, std::size_t emb, std::size_t hidden, unsigned seed,
                       double scale = 0.5) {
  SeededRng rng(1);
  ModelParams m = ModelParams::create(ModelDims{vocab, emb, hidden}, rng);
  std::mt19937 g(seed);
  oracle::randomize(m, g, scale);
  return m;
}

ModelParams zero_model(std::size_t vocab, std::size_t emb, std::size_t hidden) {
  SeededRng rng(1);
  ModelParams m = ModelParams::create(ModelDims{vocab, emb, hidden}, rng);
  for_each_tensor(m, [](const std::string&, std::span<double> t) {
    for (double& v : t) v = 0.0;
  });
  return m;
}

EncoderStates make_states(std::vector<Vector> hidden) {
  EncoderStates enc;
  enc.final_cell = Vector(hidden.front().size(), 0.0);
  enc.hidden = std::move(hidden);
  return enc;
}

Vector transform(const std::vector<std::vector<double>>& q, const Vector& v) {
  Vector out(q.size(), 0.0);
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += q[i][j] * v[j];
  }
  return out;
}

std::vector<double> oracle_soft_context(const ModelParams& m, const std::vector<int>& msg) {
  std::vector<oracle::State> enc = oracle::encode(m, msg);
  return oracle::attention(enc.back().h, enc).context;
}

void check_matches_sequences(const std::vector<Hypothesis>& got,
                             const std::vector<oracle::Sequence>& want) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    CHECK(got[i].token_ids == want[i].tokens);
    CHECK(got[i].log_prob == doctest::Approx(want[i].log_prob).epsilon(1e-9));
    CHECK(got[i].finished);
  }
}

}  // namespace

TEST_CASE("self-attention scores sum pairwise inner products") {
  EncoderStates enc = make_states({{1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}});
  Vector e = self_attention_scores(enc);
  REQUIRE(e.size() == 3);
  CHECK(e[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(e[1] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(e[2] == doctest::Approx(1.0).epsilon(1e-15));

  EncoderStates empty;
  CHECK_THROWS_AS(self_attention_scores(empty), ShapeError);
}

TEST_CASE("self-attention scores match the brute-force oracle on random states") {
  std::mt19937 g(31);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<Vector> h;
    const std::size_t n = 1 + static_cast<std::size_t>(g() % 6);
    for (std::size_t i = 0; i < n; ++i) h.push_back(oracle::random_vector(g, 4));
    EncoderStates enc = make_states(h);
    Vector got = self_attention_scores(enc);
    oracle::SelfAttnPick pick = oracle::self_attention_pick(h);
    REQUIRE(got.size() == pick.scores.size());
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(got[i] == doctest::Approx(pick.scores[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("max/min self-attention selection with the duplicated-vector fixture") {
  EncoderStates enc = make_states({{1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}});
  RecurrentState h0{{0.0, 0.0}, {0.0, 0.0}};

  FirstContext mx = select_first_context(SelfAttnMax{}, enc, h0);
  REQUIRE(mx.index.has_value());
  CHECK(*mx.index == 1);  // tie between 1 and 2 keeps the lowest
  CHECK(mx.context == enc.hidden[0]);
  CHECK(!mx.alphas.has_value());
  CHECK(!mx.clamped);

  FirstContext mn = select_first_context(SelfAttnMin{}, enc, h0);
  REQUIRE(mn.index.has_value());
  CHECK(*mn.index == 3);
  CHECK(mn.context == enc.hidden[2]);
}

TEST_CASE("positional selection is 1-based and clamps past the end") {
  EncoderStates enc = make_states({{1.0}, {2.0}, {3.0}});
  RecurrentState h0{{0.0}, {0.0}};

  FirstContext first = select_first_context(PositionalHard{1}, enc, h0);
  CHECK(*first.index == 1);
  CHECK(first.context == Vector{1.0});
  CHECK(!first.clamped);

  FirstContext mid = select_first_context(PositionalHard{3}, enc, h0);
  CHECK(*mid.index == 3);
  CHECK(mid.context == Vector{3.0});
  CHECK(!mid.clamped);

  FirstContext past = select_first_context(PositionalHard{5}, enc, h0);
  CHECK(*past.index == 3);
  CHECK(past.context == Vector{3.0});
  CHECK(past.clamped);
}

TEST_CASE("soft selection returns attention weights and no index") {
  ModelParams m = make_model(6, 3, 3, 600);
  EncoderStates enc = encode(m, {4, 5, 4});
  RecurrentState init = decoder_init(m, enc);

  FirstContext fc = select_first_context(StandardSoft{}, enc, init);
  CHECK(!fc.index.has_value());
  REQUIRE(fc.alphas.has_value());
  Attention att = attention(init.h, enc);
  CHECK(fc.context == att.context);
  CHECK(*fc.alphas == att.alphas);
}

TEST_CASE("start-anchored hard selection takes the argmax of soft attention") {
  // first source vector aligned with the query dominates the soft weights
  EncoderStates enc = make_states({{3.0, 0.0}, {0.0, 1.0}, {-1.0, 0.5}});
  RecurrentState h0{{1.0, 0.0}, {0.0, 0.0}};
  FirstContext fc = select_first_context(HardToBos{}, enc, h0);
  REQUIRE(fc.index.has_value());
  CHECK(*fc.index == 1);
  CHECK(fc.context == enc.hidden[0]);
  REQUIRE(fc.alphas.has_value());

  Attention att = attention(h0.h, enc);
  std::size_t argmax = 0;
  for (std::size_t i = 1; i < att.alphas.size(); ++i) {
    if (att.alphas[i] > att.alphas[argmax]) argmax = i;
  }
  CHECK(*fc.index == argmax + 1);
}

TEST_CASE("random hard selection is seeded, in range, and reproducible") {
  EncoderStates enc = make_states({{1.0}, {2.0}, {3.0}, {4.0}, {5.0}, {6.0}});
  RecurrentState h0{{0.0}, {0.0}};

  SeededRng a(99), b(99);
  FirstContext fa = select_first_context(RandomHard{0}, enc, h0, &a);
  FirstContext fb = select_first_context(RandomHard{0}, enc, h0, &b);
  REQUIRE(fa.index.has_value());
  CHECK(*fa.index == *fb.index);
  CHECK(*fa.index >= 1);
  CHECK(*fa.index <= 6);
  CHECK(fa.context == enc.hidden[*fa.index - 1]);

  // without an external generator the strategy's own seed decides
  FirstContext s1 = select_first_context(RandomHard{7}, enc, h0);
  FirstContext s2 = select_first_context(RandomHard{7}, enc, h0);
  CHECK(*s1.index == *s2.index);

  // distinct draws across a stream hit more than one position
  SeededRng stream(123);
  std::vector<std::size_t> seen;
  for (int i = 0; i < 32; ++i) {
    FirstContext fc = select_first_context(RandomHard{0}, enc, h0, &stream);
    seen.push_back(*fc.index);
    CHECK(*fc.index >= 1);
    CHECK(*fc.index <= 6);
  }
  CHECK(std::count(seen.begin(), seen.end(), seen.front()) < 32);
}

TEST_CASE("every hard strategy copies one encoder state bitwise") {
  std::mt19937 g(32);
  for (int rep = 0; rep < 8; ++rep) {
    std::vector<Vector> h;
    const std::size_t n = 2 + static_cast<std::size_t>(g() % 5);
    for (std::size_t i = 0; i < n; ++i) h.push_back(oracle::random_vector(g, 3));
    EncoderStates enc = make_states(h);
    RecurrentState h0{oracle::random_vector(g, 3), Vector(3, 0.0)};
    SeededRng rng(rep);

    for (ContextStrategy strategy :
         {ContextStrategy{HardToBos{}}, ContextStrategy{PositionalHard{2}},
          ContextStrategy{RandomHard{static_cast<std::uint64_t>(rep)}},
          ContextStrategy{SelfAttnMax{}}, ContextStrategy{SelfAttnMin{}}}) {
      FirstContext fc = select_first_context(strategy, enc, h0, &rng);
      REQUIRE(fc.index.has_value());
      CHECK(*fc.index >= 1);
      CHECK(*fc.index <= n);
      CHECK(fc.context == enc.hidden[*fc.index - 1]);  // bitwise copy
    }
  }
}

TEST_CASE("single-source messages leave every strategy no choice") {
  ModelParams m = make_model(6, 3, 3, 601);
  EncoderStates enc = encode(m, {5});
  RecurrentState init = decoder_init(m, enc);
  SeededRng rng(4);

  for (ContextStrategy strategy :
       {ContextStrategy{StandardSoft{}}, ContextStrategy{HardToBos{}},
        ContextStrategy{PositionalHard{4}}, ContextStrategy{RandomHard{9}},
        ContextStrategy{SelfAttnMax{}}, ContextStrategy{SelfAttnMin{}}}) {
    FirstContext fc = select_first_context(strategy, enc, init, &rng);
    CHECK(fc.context == enc.hidden[0]);
    if (fc.index.has_value()) CHECK(*fc.index == 1);
  }
}

TEST_CASE("self-attention choice is invariant to rotation, scaling, and relabeling") {
  std::mt19937 g(33);
  int checked = 0;
  for (int rep = 0; rep < 24; ++rep) {
    const std::size_t n = 2 + static_cast<std::size_t>(g() % 5);
    const std::size_t dim = 3;
    std::vector<Vector> h;
    for (std::size_t i = 0; i < n; ++i) h.push_back(oracle::random_vector(g, dim));
    EncoderStates enc = make_states(h);
    RecurrentState h0{Vector(dim, 0.0), Vector(dim, 0.0)};

    FirstContext base_max = select_first_context(SelfAttnMax{}, enc, h0);
    FirstContext base_min = select_first_context(SelfAttnMin{}, enc, h0);

    if (rep % 3 == 0) {
      // orthogonal transform of every state
      auto q = oracle::random_orthogonal(g, dim);
      std::vector<Vector> rotated;
      for (const Vector& v : h) rotated.push_back(transform(q, v));
      EncoderStates enc2 = make_states(rotated);
      CHECK(*select_first_context(SelfAttnMax{}, enc2, h0).index == *base_max.index);
      CHECK(*select_first_context(SelfAttnMin{}, enc2, h0).index == *base_min.index);
    } else if (rep % 3 == 1) {
      // positive rescaling of every state
      std::uniform_real_distribution<double> sd(0.1, 5.0);
      const double s = sd(g);
      std::vector<Vector> scaled;
      for (const Vector& v : h) {
        Vector w = v;
        for (double& x : w) x *= s;
        scaled.push_back(std::move(w));
      }
      EncoderStates enc2 = make_states(scaled);
      CHECK(*select_first_context(SelfAttnMax{}, enc2, h0).index == *base_max.index);
      CHECK(*select_first_context(SelfAttnMin{}, enc2, h0).index == *base_min.index);
    } else {
      // relabeling the positions permutes the selection accordingly
      std::vector<std::size_t> perm(n);
      for (std::size_t i = 0; i < n; ++i) perm[i] = i;
      std::shuffle(perm.begin(), perm.end(), g);
      std::vector<Vector> permuted(n);
      for (std::size_t i = 0; i < n; ++i) permuted[i] = h[perm[i]];
      EncoderStates enc2 = make_states(permuted);
      FirstContext pm = select_first_context(SelfAttnMax{}, enc2, h0);
      FirstContext pn = select_first_context(SelfAttnMin{}, enc2, h0);
      CHECK(perm[*pm.index - 1] == *base_max.index - 1);
      CHECK(perm[*pn.index - 1] == *base_min.index - 1);
    }
    ++checked;
  }
  CHECK(checked == 24);
}

TEST_CASE("hypothesis scores divide by length only when normalizing") {
  Hypothesis hyp;
  hyp.token_ids = {4, 5, 2};
  hyp.log_prob = -3.0;
  BeamConfig raw{10, 50, false};
  BeamConfig norm{10, 50, true};
  CHECK(hypothesis_score(hyp, raw) == -3.0);
  CHECK(hypothesis_score(hyp, norm) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("beam search validates its inputs") {
  ModelParams m = make_model(5, 2, 2, 602);
  CHECK_THROWS_AS(beam_search(m, {}), ShapeError);
  CHECK_THROWS_AS(beam_search(m, {4}, StandardSoft{}, BeamConfig{0, 5, false}), ShapeError);
  CHECK_THROWS_AS(beam_search(m, {4}, StandardSoft{}, BeamConfig{5, 0, false}), ShapeError);
}

TEST_CASE("a one-step horizon returns single-token hypotheses only") {
  ModelParams m = make_model(5, 2, 2, 603);
  std::vector<Hypothesis> hyps = beam_search(m, {4, 4}, StandardSoft{}, BeamConfig{25, 1, false});
  REQUIRE(hyps.size() == 5);  // whole vocabulary, nothing to extend
  for (const Hypothesis& h : hyps) {
    CHECK(h.token_ids.size() == 1);
    CHECK(h.finished);
    CHECK(h.log_prob <= 0.0);
  }
  for (std::size_t i = 1; i < hyps.size(); ++i) {
    CHECK(hyps[i - 1].log_prob >= hyps[i].log_prob);
  }
}

TEST_CASE("width-one beam search reproduces greedy decoding") {
  for (unsigned seed : {610u, 611u, 612u, 613u}) {
    ModelParams m = make_model(6, 3, 3, seed);
    std::vector<int> msg = {4, 5};

    std::vector<Hypothesis> hyps =
        beam_search(m, msg, StandardSoft{}, BeamConfig{1, 8, false});
    REQUIRE(hyps.size() == 1);
    std::vector<int> want = oracle::greedy(m, msg, oracle_soft_context(m, msg), 8);
    CHECK(hyps.front().token_ids == want);

    // same equivalence under a hard first context
    std::vector<Hypothesis> hard =
        beam_search(m, msg, SelfAttnMax{}, BeamConfig{1, 8, false});
    oracle::SelfAttnPick pick = oracle::self_attention_pick({
        oracle::encode(m, msg)[0].h, oracle::encode(m, msg)[1].h});
    std::vector<int> hard_want =
        oracle::greedy(m, msg, oracle::encode(m, msg)[pick.max_index1 - 1].h, 8);
    CHECK(hard.front().token_ids == hard_want);
  }
}

TEST_CASE("a beam wide enough to disable pruning equals exhaustive enumeration") {
  for (unsigned seed : {620u, 621u, 622u}) {
    ModelParams m = make_model(5, 3, 3, seed);
    std::vector<int> msg = {4, 3, 4};
    std::vector<double> first = oracle_soft_context(m, msg);

    for (bool normalize : {false, true}) {
      std::vector<oracle::Sequence> all = oracle::enumerate_all(m, msg, first, 2);
      REQUIRE(all.size() == 21);  // bare end token plus 4 x 5 two-token strings
      oracle::sort_sequences(all, normalize);

      std::vector<Hypothesis> hyps =
          beam_search(m, msg, StandardSoft{}, BeamConfig{25, 2, normalize});
      check_matches_sequences(hyps, all);
    }
  }
}

TEST_CASE("a width-ten beam on the five-word vocabulary is still exact") {
  ModelParams m = make_model(5, 3, 3, 623);
  std::vector<int> msg = {4, 4};
  // hard first context removes any soft-attention noise between the two sides
  std::vector<double> first = oracle::encode(m, msg)[0].h;

  for (bool normalize : {false, true}) {
    std::vector<oracle::Sequence> all = oracle::enumerate_all(m, msg, first, 2);
    oracle::sort_sequences(all, normalize);
    all.resize(10);

    std::vector<Hypothesis> hyps =
        beam_search(m, msg, PositionalHard{1}, BeamConfig{10, 2, normalize});
    check_matches_sequences(hyps, all);
  }
}

TEST_CASE("narrow beams match an independent width-limited simulation") {
  for (unsigned seed : {630u, 631u}) {
    ModelParams m = make_model(7, 3, 3, seed);
    std::vector<int> msg = {4, 6, 5};
    std::vector<double> first = oracle_soft_context(m, msg);

    for (std::size_t width : {1ul, 2ul, 3ul}) {
      for (bool normalize : {false, true}) {
        std::vector<oracle::Sequence> want =
            oracle::simulate_beam(m, msg, first, width, 4, normalize);
        std::vector<Hypothesis> got =
            beam_search(m, msg, StandardSoft{}, BeamConfig{width, 4, normalize});
        check_matches_sequences(got, want);
      }
    }
  }
}

TEST_CASE("an all-zero model exposes every tie-breaking rule") {
  ModelParams m = zero_model(5, 2, 2);
  std::vector<int> msg = {4};

  // all per-step log-probs equal -log 5, so order is decided by score,
  // then finish step, then lexicographic token ids
  std::vector<std::vector<int>> expect;
  expect.push_back({2});
  for (int a : {0, 1, 3, 4}) {
    for (int b = 0; b < 5; ++b) expect.push_back({a, b});
  }

  for (bool normalize : {false, true}) {
    std::vector<Hypothesis> hyps =
        beam_search(m, msg, StandardSoft{}, BeamConfig{25, 2, normalize});
    REQUIRE(hyps.size() == 21);
    for (std::size_t i = 0; i < hyps.size(); ++i) {
      CHECK(hyps[i].token_ids == expect[i]);
    }
  }
}

TEST_CASE("pruning keeps selected expansions even when later ones score equal") {
  // with all scores tied, step two fills the width from the first parent's
  // expansions in token order, never revisiting dropped ones
  ModelParams m = zero_model(5, 2, 2);
  std::vector<Hypothesis> hyps =
      beam_search(m, {4}, StandardSoft{}, BeamConfig{7, 2, false});
  std::vector<std::vector<int>> expect = {
      {2}, {0, 0}, {0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 0},
  };
  REQUIRE(hyps.size() == 7);
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    CHECK(hyps[i].token_ids == expect[i]);
  }
}

TEST_CASE("finished scores agree with the teacher-forced sequence likelihood") {
  ModelParams m = make_model(6, 3, 3, 640);
  std::vector<int> msg = {4, 5};
  std::vector<Hypothesis> hyps = beam_search(m, msg, StandardSoft{}, BeamConfig{6, 5, false});
  REQUIRE(!hyps.empty());
  for (const Hypothesis& h : hyps) {
    CHECK(h.log_prob <= 0.0);
    REQUIRE(!h.token_ids.empty());
    if (h.token_ids.back() == Vocabulary::kEos && h.token_ids.size() > 1) {
      std::vector<int> resp(h.token_ids.begin(), h.token_ids.end() - 1);
      CHECK(h.log_prob == doctest::Approx(sequence_log_prob(m, msg, resp)).epsilon(1e-9));
    }
    const bool ends_eos = h.token_ids.back() == Vocabulary::kEos;
    CHECK((ends_eos || h.token_ids.size() == 5));
  }
}

TEST_CASE("reranking validates candidates") {
  ModelParams rev = make_model(8, 3, 3, 650);
  CHECK_THROWS_AS(mmi_rerank({}, rev, {4}, 1.0), ShapeError);

  Hypothesis h;
  h.token_ids = {4, 99};
  h.log_prob = -1.0;
  CHECK_THROWS_AS(mmi_rerank({h}, rev, {4}, 1.0), ConfigError);

  h.token_ids = {4, 2};
  CHECK_THROWS_AS(mmi_rerank({h}, rev, {99}, 1.0), ConfigError);
}

TEST_CASE("a zero mixing weight keeps the input order untouched") {
  ModelParams rev = make_model(8, 3, 3, 651);
  // deliberately unsorted forward scores
  std::vector<Hypothesis> cands;
  for (auto [ids, lp] : std::vector<std::pair<std::vector<int>, double>>{
           {{5, 2}, -2.0}, {{4, 2}, -0.5}, {{6, 7, 2}, -3.5}, {{7, 2}, -1.0}}) {
    Hypothesis h;
    h.token_ids = ids;
    h.log_prob = lp;
    cands.push_back(h);
  }
  std::vector<Reranked> out = mmi_rerank(cands, rev, {4, 6}, 0.0);
  REQUIRE(out.size() == cands.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out[i].hypothesis.token_ids == cands[i].token_ids);
    CHECK(out[i].score == cands[i].log_prob);  // lambda contributes nothing
    CHECK(out[i].reverse_log_prob <= 0.0);     // still reported
  }
}

TEST_CASE("a single candidate passes through reranking unchanged") {
  ModelParams rev = make_model(8, 3, 3, 652);
  Hypothesis h;
  h.token_ids = {5, 4, 2};
  h.log_prob = -1.5;
  std::vector<Reranked> out = mmi_rerank({h}, rev, {4}, 1.0);
  REQUIRE(out.size() == 1);
  CHECK(out[0].hypothesis.token_ids == h.token_ids);
  CHECK(out[0].score ==
        doctest::Approx(h.log_prob + out[0].reverse_log_prob).epsilon(1e-12));
}

TEST_CASE("bidirectional scores add the reverse likelihood of the message") {
  ModelParams rev = make_model(8, 3, 3, 653);
  std::vector<int> msg = {4, 6};

  Hypothesis a, b, c;
  a.token_ids = {5, 2};      // trailing end token is stripped for the reverse pass
  a.log_prob = -0.3;
  b.token_ids = {6, 7, 2};
  b.log_prob = -0.9;
  c.token_ids = {4, 4};      // no end token: fed through as-is
  c.log_prob = -0.5;

  std::vector<Reranked> out = mmi_rerank({a, b, c}, rev, msg, 1.0);
  REQUIRE(out.size() == 3);

  auto expected = [&](const std::vector<int>& source, double fwd) {
    return fwd + sequence_log_prob(rev, source, msg);
  };
  // find each candidate in the output and verify its score both against the
  // production reverse pass and against the independent scalar oracle
  for (const Reranked& r : out) {
    std::vector<int> source = r.hypothesis.token_ids;
    if (source.size() > 1 && source.back() == Vocabulary::kEos) source.pop_back();
    CHECK(r.score ==
          doctest::Approx(expected(source, r.hypothesis.log_prob)).epsilon(1e-12));
    CHECK(r.reverse_log_prob ==
          doctest::Approx(oracle::sequence_log_prob(rev, source, msg)).epsilon(1e-9));
  }
  // descending by combined score
  for (std::size_t i = 1; i < out.size(); ++i) {
    CHECK(out[i - 1].score >= out[i].score);
  }
}

TEST_CASE("a bare end-token candidate is scored as its own reverse source") {
  ModelParams rev = make_model(8, 3, 3, 654);
  Hypothesis h;
  h.token_ids = {Vocabulary::kEos};
  h.log_prob = -1.0;
  std::vector<Reranked> out = mmi_rerank({h}, rev, {4}, 1.0);
  REQUIRE(out.size() == 1);
  CHECK(out[0].reverse_log_prob ==
        doctest::Approx(sequence_log_prob(rev, {Vocabulary::kEos}, {4})).epsilon(1e-12));
}

TEST_CASE("reranking yields the same order from any input permutation") {
  ModelParams rev = make_model(8, 3, 3, 655);
  std::vector<int> msg = {5, 7};
  std::vector<Hypothesis> cands;
  for (auto [ids, lp] : std::vector<std::pair<std::vector<int>, double>>{
           {{4, 2}, -0.4}, {{6, 2}, -0.8}, {{7, 4, 2}, -1.2}, {{5, 5, 2}, -0.6}}) {
    Hypothesis h;
    h.token_ids = ids;
    h.log_prob = lp;
    cands.push_back(h);
  }
  std::vector<Reranked> base = mmi_rerank(cands, rev, msg, 1.0);

  std::vector<Hypothesis> rotated(cands.begin() + 2, cands.end());
  rotated.insert(rotated.end(), cands.begin(), cands.begin() + 2);
  std::vector<Reranked> again = mmi_rerank(rotated, rev, msg, 1.0);

  REQUIRE(base.size() == again.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(base[i].hypothesis.token_ids == again[i].hypothesis.token_ids);
    CHECK(base[i].score == doctest::Approx(again[i].score).epsilon(1e-12));
  }
}

TEST_CASE("the mixing weight scales the reverse contribution linearly") {
  ModelParams rev = make_model(8, 3, 3, 656);
  Hypothesis h;
  h.token_ids = {6, 2};
  h.log_prob = -0.7;
  std::vector<Reranked> l0 = mmi_rerank({h}, rev, {4, 5}, 0.0);
  std::vector<Reranked> l7 = mmi_rerank({h}, rev, {4, 5}, 0.7);
  CHECK(l0[0].reverse_log_prob == doctest::Approx(l7[0].reverse_log_prob).epsilon(1e-15));
  CHECK(l7[0].score ==
        doctest::Approx(h.log_prob + 0.7 * l7[0].reverse_log_prob).epsilon(1e-12));
}

TEST_CASE("selection inspection reports what each strategy picked") {
  ModelParams m = make_model(10, 3, 3, 660);
  std::vector<int> msg = {4, 5, 6, 7, 8, 9};
  std::vector<ContextStrategy> strategies = {
      StandardSoft{}, PositionalHard{1}, PositionalHard{5}, SelfAttnMax{}, SelfAttnMin{}};
  BeamConfig cfg{5, 6, false};

  std::vector<SelectionRow> rows = inspect_selection(m, msg, strategies, cfg);
  REQUIRE(rows.size() == 5);

  CHECK(rows[0].strategy == "standard");
  CHECK(!rows[0].selected_index.has_value());

  CHECK(rows[1].strategy == "positional:1");
  CHECK(*rows[1].selected_index == 1);
  CHECK(!rows[1].clamped);

  CHECK(rows[2].strategy == "positional:5");
  CHECK(*rows[2].selected_index == 5);
  CHECK(!rows[2].clamped);

  // the self-attention rows agree with the brute-force oracle
  std::vector<std::vector<double>> h;
  for (const oracle::State& s : oracle::encode(m, msg)) h.push_back(s.h);
  oracle::SelfAttnPick pick = oracle::self_attention_pick(h);
  CHECK(rows[3].strategy == "selfattn-max");
  CHECK(*rows[3].selected_index == pick.max_index1);
  CHECK(rows[4].strategy == "selfattn-min");
  CHECK(*rows[4].selected_index == pick.min_index1);

  // each row's decode matches a standalone search under the same strategy
  for (std::size_t i = 0; i < strategies.size(); ++i) {
    std::vector<Hypothesis> direct = beam_search(m, msg, strategies[i], cfg);
    CHECK(rows[i].response_ids == direct.front().token_ids);
    CHECK(rows[i].log_prob == doctest::Approx(direct.front().log_prob).epsilon(1e-12));
  }
}

TEST_CASE("clamped positions are flagged in the inspection row") {
  ModelParams m = make_model(6, 2, 2, 661);
  std::vector<SelectionRow> rows =
      inspect_selection(m, {4, 5}, {PositionalHard{9}}, BeamConfig{3, 4, false});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].strategy == "positional:9");
  CHECK(*rows[0].selected_index == 2);
  CHECK(rows[0].clamped);
}

TEST_CASE("selection rows render as tab-separated text") {
  Vocabulary vocab;
  vocab.add("hi");     // id 4
  vocab.add("there");  // id 5

  SelectionRow soft;
  soft.strategy = "standard";
  soft.response_ids = {5, 2};
  soft.log_prob = -1.25;
  CHECK(render_selection_row(vocab, {4, 5}, soft) ==
        "hi there\tstandard\t-\tthere\t-1.250000");

  SelectionRow hard;
  hard.strategy = "positional:2";
  hard.selected_index = 2;
  hard.response_ids = {4, 4, 2};
  hard.log_prob = -0.5;
  CHECK(render_selection_row(vocab, {4}, hard) ==
        "hi\tpositional:2\t2\thi hi\t-0.500000");

  SelectionRow clamped;
  clamped.strategy = "positional:9";
  clamped.selected_index = 2;
  clamped.clamped = true;
  clamped.response_ids = {5};  // no trailing end token: kept verbatim
  clamped.log_prob = -2.0 / 3.0;
  CHECK(render_selection_row(vocab, {4, 4}, clamped) ==
        "hi hi\tpositional:9\t2*\tthere\t-0.666667");
}
