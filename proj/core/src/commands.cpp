#include "s2sa/commands.hpp"

#include <fstream>
#include <sstream>
#include <thread>
#include <variant>

#include "s2sa/decoding.hpp"
#include "s2sa/errors.hpp"
#include "s2sa/metrics.hpp"

namespace s2sa {

namespace {

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::vector<std::string> decode_response_tokens(const Vocabulary& vocab,
                                                const std::vector<int>& ids) {
  std::vector<int> trimmed = ids;
  if (!trimmed.empty() && trimmed.back() == Vocabulary::kEos) trimmed.pop_back();
  return decode(vocab, trimmed);
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path.string());
  out << content;
  if (!out) throw DataError("failed writing file: " + path.string());
}

void echo_config(const std::filesystem::path& path, const RunConfig& cfg) {
  write_text_file(path, cfg.render());
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read file: " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

// Decode one message with one strategy; RandomHard gets a generator seeded
// per message so ordering and worker count cannot change the draw.
std::vector<int> best_response(const ModelParams& m, const ModelParams* reverse_model,
                               const std::vector<int>& message_ids,
                               const ContextStrategy& strategy, const BeamConfig& bc,
                               double lambda, std::uint64_t message_index) {
  SeededRng rng(0);
  SeededRng* rng_ptr = nullptr;
  if (const auto* rh = std::get_if<RandomHard>(&strategy)) {
    rng = SeededRng(mix_seed(rh->seed, message_index));
    rng_ptr = &rng;
  }
  std::vector<Hypothesis> hyps = beam_search(m, message_ids, strategy, bc, rng_ptr);
  if (reverse_model != nullptr) {
    std::vector<Reranked> reranked = mmi_rerank(hyps, *reverse_model, message_ids, lambda);
    return reranked.front().hypothesis.token_ids;
  }
  return hyps.front().token_ids;
}

// Index-addressed map; results land by index, so the worker count never
// changes the output.
template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

struct MethodSpec {
  std::string name;
  ContextStrategy strategy;
  bool mmi = false;
};

std::vector<MethodSpec> build_methods(const RunConfig& cfg, bool with_mmi) {
  std::vector<MethodSpec> methods = {
      {"standard", StandardSoft{}, false},
      {"hard-bos", HardToBos{}, false},
      {"random", RandomHard{cfg.seed}, false},
      {"selfattn-min", SelfAttnMin{}, false},
      {"selfattn-max", SelfAttnMax{}, false},
  };
  if (with_mmi) {
    methods.push_back({"standard+mmi", StandardSoft{}, true});
    methods.push_back({"selfattn-max+mmi", SelfAttnMax{}, true});
  }
  return methods;
}

}  // namespace

const std::vector<std::string>& compare_methods_base() {
  static const std::vector<std::string> names = {"standard", "hard-bos", "random",
                                                 "selfattn-min", "selfattn-max"};
  return names;
}

const std::vector<std::string>& compare_methods_mmi() {
  static const std::vector<std::string> names = {"standard", "hard-bos", "random",
                                                 "selfattn-min", "selfattn-max",
                                                 "standard+mmi", "selfattn-max+mmi"};
  return names;
}

void cmd_prepare(const std::filesystem::path& pairs_path, const std::filesystem::path& out_dir,
                 const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  LoadReport report;
  std::vector<DialoguePair> pairs = load_pairs(pairs_path, &report);
  for (const auto& [line_no, message] : report.parse_errors) {
    log << "warning: line " << line_no << ": " << message << '\n';
  }
  log << "read " << report.total_lines << " lines: " << pairs.size() << " pairs, "
      << report.duplicates_removed << " duplicates removed, " << report.empty_side_skipped
      << " empty-side lines skipped, " << report.parse_errors.size() << " parse errors\n";

  std::vector<DialoguePair> filtered = filter_by_length(pairs, cfg.length_cap);
  log << "length filter (cap " << cfg.length_cap << "): " << filtered.size() << " pairs kept\n";

  SplitResult parts = split(std::move(filtered), cfg.split_spec());
  log << "split: train " << parts.train.size() << ", test " << parts.test.size() << ", valid "
      << parts.valid.size() << '\n';

  Vocabulary vocab = build_vocab(parts.train, cfg.vocab_capacity);
  log << "vocabulary: " << vocab.size() << " tokens (capacity " << vocab.capacity() << ")\n";

  std::filesystem::create_directories(out_dir);
  save_pairs(out_dir / "train.tsv", parts.train);
  save_pairs(out_dir / "test.tsv", parts.test);
  save_pairs(out_dir / "valid.tsv", parts.valid);
  vocab.save(out_dir / "vocab.txt");
  echo_config(out_dir / "run.cfg", cfg);
  log << "wrote " << (out_dir / "train.tsv").string() << ", test.tsv, valid.tsv, vocab.txt, run.cfg\n";
}

namespace {

std::vector<EncodedPair> encode_pairs(const Vocabulary& vocab,
                                      const std::vector<DialoguePair>& pairs, bool reverse) {
  std::vector<EncodedPair> out;
  out.reserve(pairs.size());
  for (const DialoguePair& p : pairs) {
    EncodedPair e{encode(vocab, p.message), encode(vocab, p.response)};
    if (reverse) std::swap(e.message, e.response);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

void cmd_train(const std::filesystem::path& data_dir, const std::filesystem::path& checkpoint,
               const RunConfig& cfg, const std::string& direction, std::ostream& log) {
  cfg.validate();
  if (direction != "forward" && direction != "reverse") {
    throw ConfigError("direction must be 'forward' or 'reverse', got '" + direction + "'");
  }
  const bool reverse = direction == "reverse";

  Vocabulary vocab = Vocabulary::load(data_dir / "vocab.txt");
  std::vector<DialoguePair> train_pairs = load_pairs(data_dir / "train.tsv");
  std::vector<DialoguePair> valid_pairs;
  if (std::filesystem::exists(data_dir / "valid.tsv")) {
    valid_pairs = load_pairs(data_dir / "valid.tsv");
  }
  log << "training on " << train_pairs.size() << " pairs (" << direction << "), validating on "
      << valid_pairs.size() << '\n';

  std::vector<EncodedPair> train_set = encode_pairs(vocab, train_pairs, reverse);
  std::vector<EncodedPair> valid_set = encode_pairs(vocab, valid_pairs, reverse);

  ModelDims dims{vocab.size(), cfg.emb_dim, cfg.hidden_dim};
  SeededRng init_rng(mix_seed(cfg.seed, 3));
  ModelParams init = ModelParams::create(dims, init_rng);

  TrainResult result = train(init, train_set, valid_set, cfg.train_config());

  std::string log_text;
  for (const EpochLogEntry& entry : result.log) {
    const std::string line = render_epoch_log_line(entry);
    log_text += line;
    log_text += '\n';
    log << line << '\n';
  }
  log << "best epoch: " << result.best_epoch << '\n';

  if (!checkpoint.parent_path().empty()) std::filesystem::create_directories(checkpoint.parent_path());
  save_checkpoint(result.params, vocab, checkpoint);
  write_text_file(checkpoint.string() + ".log", log_text);
  echo_config(checkpoint.string() + ".cfg", cfg);
  log << "wrote " << checkpoint.string() << " (+.log, +.cfg)\n";
}

void cmd_decode(const std::filesystem::path& checkpoint,
                const std::filesystem::path& messages_path,
                const std::filesystem::path& out_path, const RunConfig& cfg,
                const std::optional<std::filesystem::path>& reverse_checkpoint,
                std::ostream& log) {
  cfg.validate();
  auto [model, vocab] = load_checkpoint(checkpoint);
  ModelParams reverse_model;
  bool has_reverse = false;
  if (reverse_checkpoint.has_value()) {
    auto [rm, rvocab] = load_checkpoint(*reverse_checkpoint);
    if (!(rvocab == vocab)) {
      throw ConfigError("forward and reverse checkpoints use different vocabularies");
    }
    reverse_model = std::move(rm);
    has_reverse = true;
  }
  const ContextStrategy strategy = parse_strategy(cfg.strategy);
  const BeamConfig bc = cfg.beam_config();

  std::vector<std::string> lines = read_lines(messages_path);
  std::vector<std::string> responses(lines.size());
  std::vector<std::size_t> empty_lines;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (tokenize(lines[i]).empty()) empty_lines.push_back(i);
  }
  for (std::size_t line_no : empty_lines) {
    log << "warning: line " << (line_no + 1) << ": empty message, emitting empty response\n";
  }

  parallel_for(lines.size(), cfg.threads, [&](std::size_t i) {
    const std::vector<std::string> tokens = tokenize(lines[i]);
    if (tokens.empty()) return;  // responses[i] stays empty
    const std::vector<int> ids = encode(vocab, tokens);
    const std::vector<int> best = best_response(model, has_reverse ? &reverse_model : nullptr,
                                                ids, strategy, bc, cfg.lambda, i);
    responses[i] = join_tokens(decode_response_tokens(vocab, best));
  });

  std::string text;
  for (const std::string& r : responses) {
    text += r;
    text += '\n';
  }
  if (!out_path.parent_path().empty()) std::filesystem::create_directories(out_path.parent_path());
  write_text_file(out_path, text);
  echo_config(out_path.string() + ".cfg", cfg);
  log << "decoded " << lines.size() << " messages with strategy " << strategy_name(strategy)
      << (has_reverse ? " + mmi" : "") << " into " << out_path.string() << '\n';
}

void cmd_compare(const std::filesystem::path& checkpoint,
                 const std::filesystem::path& test_path, const std::filesystem::path& out_dir,
                 const RunConfig& cfg,
                 const std::optional<std::filesystem::path>& reverse_checkpoint,
                 std::ostream& log) {
  cfg.validate();
  auto [model, vocab] = load_checkpoint(checkpoint);
  ModelParams reverse_model;
  bool has_reverse = false;
  if (reverse_checkpoint.has_value()) {
    auto [rm, rvocab] = load_checkpoint(*reverse_checkpoint);
    if (!(rvocab == vocab)) {
      throw ConfigError("forward and reverse checkpoints use different vocabularies");
    }
    reverse_model = std::move(rm);
    has_reverse = true;
  }
  std::vector<DialoguePair> pairs = load_pairs(test_path);
  if (pairs.empty()) throw DataError("no pairs in " + test_path.string());
  const BeamConfig bc = cfg.beam_config();

  std::vector<std::vector<int>> message_ids(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) message_ids[i] = encode(vocab, pairs[i].message);

  std::filesystem::create_directories(out_dir);

  std::string metrics_text = metrics_tsv_header() + '\n';
  for (const MethodSpec& method : build_methods(cfg, has_reverse)) {
    std::vector<std::vector<std::string>> candidates(pairs.size());
    parallel_for(pairs.size(), cfg.threads, [&](std::size_t i) {
      const std::vector<int> best =
          best_response(model, method.mmi ? &reverse_model : nullptr, message_ids[i],
                        method.strategy, bc, cfg.lambda, i);
      candidates[i] = decode_response_tokens(vocab, best);
    });

    std::string responses_text;
    EvalCorpus corpus;
    corpus.items.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      responses_text += join_tokens(candidates[i]);
      responses_text += '\n';
      corpus.items.push_back(EvalItem{pairs[i].message, pairs[i].response, candidates[i]});
    }
    write_text_file(out_dir / ("responses_" + method.name + ".txt"), responses_text);
    const MetricsReport report = evaluate(corpus);
    metrics_text += render_metrics_row(method.name, report);
    metrics_text += '\n';
    log << "method " << method.name << ": bleu " << report.bleu << ", distinct-1 "
        << report.distinct1 << ", distinct-2 " << report.distinct2 << '\n';
  }
  write_text_file(out_dir / "metrics.tsv", metrics_text);

  const std::vector<ContextStrategy> selection_strategies = {
      StandardSoft{},      HardToBos{},   PositionalHard{1},
      PositionalHard{5},   RandomHard{cfg.seed}, SelfAttnMin{},
      SelfAttnMax{},
  };
  std::string selection_text = "message\tstrategy\tselected_index\tresponse\tlog_prob\n";
  std::vector<std::string> selection_blocks(pairs.size());
  parallel_for(pairs.size(), cfg.threads, [&](std::size_t i) {
    SeededRng rng(mix_seed(cfg.seed, i));
    std::string block;
    for (const SelectionRow& row :
         inspect_selection(model, message_ids[i], selection_strategies, bc, &rng)) {
      block += render_selection_row(vocab, message_ids[i], row);
      block += '\n';
    }
    selection_blocks[i] = std::move(block);
  });
  for (const std::string& block : selection_blocks) selection_text += block;
  write_text_file(out_dir / "selection.tsv", selection_text);

  echo_config(out_dir / "run.cfg", cfg);
  log << "wrote " << (out_dir / "metrics.tsv").string() << ", selection.tsv, responses_*.txt, run.cfg\n";
}

int cmd_chat(const std::filesystem::path& checkpoint, const RunConfig& cfg, bool verbose,
             std::istream& in, std::ostream& out, std::ostream& err) {
  cfg.validate();
  auto [model, vocab] = load_checkpoint(checkpoint);
  const ContextStrategy strategy = parse_strategy(cfg.strategy);
  const BeamConfig bc = cfg.beam_config();

  std::uint64_t turn = 0;
  std::string line;
  while (true) {
    out << "> " << std::flush;
    if (!std::getline(in, line)) return 0;
    const std::vector<std::string> tokens = tokenize(line);
    if (tokens.empty()) continue;
    if (tokens.size() == 1 && tokens[0] == "exit") return 0;
    try {
      const std::vector<int> ids = encode(vocab, tokens);
      SeededRng rng(0);
      SeededRng* rng_ptr = nullptr;
      if (const auto* rh = std::get_if<RandomHard>(&strategy)) {
        rng = SeededRng(mix_seed(rh->seed, turn));
        rng_ptr = &rng;
      }
      const std::vector<SelectionRow> rows =
          inspect_selection(model, ids, {strategy}, bc, rng_ptr);
      const SelectionRow& row = rows.front();
      if (verbose) {
        out << "[a1 index ";
        if (row.selected_index.has_value()) {
          out << *row.selected_index;
          if (row.clamped) out << '*';
        } else {
          out << '-';
        }
        out << "]\n";
      }
      out << join_tokens(decode_response_tokens(vocab, row.response_ids)) << '\n';
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
    }
    ++turn;
  }
}

void cmd_eval(const std::filesystem::path& pairs_path,
              const std::filesystem::path& responses_path, std::ostream& out) {
  std::vector<DialoguePair> pairs = load_pairs(pairs_path);
  if (pairs.empty()) throw DataError("no pairs in " + pairs_path.string());
  std::vector<std::string> lines = read_lines(responses_path);
  if (lines.size() != pairs.size()) {
    throw DataError("responses file has " + std::to_string(lines.size()) + " lines but " +
                    pairs_path.string() + " yields " + std::to_string(pairs.size()) + " pairs");
  }
  EvalCorpus corpus;
  corpus.items.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    corpus.items.push_back(EvalItem{pairs[i].message, pairs[i].response, tokenize(lines[i])});
  }
  const MetricsReport report = evaluate(corpus);
  out << metrics_tsv_header() << '\n' << render_metrics_row("eval", report) << '\n';
}

void cmd_inspect(const std::filesystem::path& checkpoint, std::ostream& out) {
  auto [model, vocab] = load_checkpoint(checkpoint);
  out << "vocabulary_size\t" << vocab.size() << '\n'
      << "emb_dim\t" << model.emb_dim << '\n'
      << "hidden_dim\t" << model.hidden_dim << '\n'
      << "parameter_count\t" << param_count(model) << '\n';
}

}  // namespace s2sa
