#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "s2sa/config.hpp"

namespace s2sa {

// Command bodies behind the CLI, exposed as library functions so they can be
// driven in-process. They throw the library error types; the binary maps
// those to exit codes. `log` receives human-readable progress lines.

// Reads raw pairs, filters by length, splits, builds the vocabulary from the
// train split, and writes train.tsv/test.tsv/valid.tsv/vocab.txt plus the
// effective config (run.cfg) into out_dir.
void cmd_prepare(const std::filesystem::path& pairs_path, const std::filesystem::path& out_dir,
                 const RunConfig& cfg, std::ostream& log);

// Trains on data_dir (as laid out by cmd_prepare) and writes the checkpoint,
// an epoch log (<checkpoint>.log), and the effective config (<checkpoint>.cfg).
// direction "reverse" swaps each pair to train the response->message model.
void cmd_train(const std::filesystem::path& data_dir, const std::filesystem::path& checkpoint,
               const RunConfig& cfg, const std::string& direction, std::ostream& log);

// Decodes one response per input line into out_path (empty line for an empty
// message, with a warning). With a reverse checkpoint, candidates are
// MMI-reranked using cfg.lambda before the best is kept.
void cmd_decode(const std::filesystem::path& checkpoint,
                const std::filesystem::path& messages_path,
                const std::filesystem::path& out_path, const RunConfig& cfg,
                const std::optional<std::filesystem::path>& reverse_checkpoint,
                std::ostream& log);

// Runs every comparison method over a test pair file and writes into out_dir:
// metrics.tsv (one row per method), selection.tsv (per-message first-context
// rows), responses_<method>.txt, and run.cfg. Methods: standard, hard-bos,
// random, selfattn-min, selfattn-max, plus standard+mmi and selfattn-max+mmi
// when a reverse checkpoint is given.
void cmd_compare(const std::filesystem::path& checkpoint,
                 const std::filesystem::path& test_path, const std::filesystem::path& out_dir,
                 const RunConfig& cfg,
                 const std::optional<std::filesystem::path>& reverse_checkpoint,
                 std::ostream& log);

// Interactive loop: reads a line, decodes with cfg.strategy, prints the
// response ("[a1 index N]" first when verbose). "exit" or end of input ends
// the loop with status 0; decode errors are printed and the loop continues.
int cmd_chat(const std::filesystem::path& checkpoint, const RunConfig& cfg, bool verbose,
             std::istream& in, std::ostream& out, std::ostream& err);

// Scores a responses file (one per line, aligned with the loaded pair file)
// and prints the metrics TSV to `out`.
void cmd_eval(const std::filesystem::path& pairs_path,
              const std::filesystem::path& responses_path, std::ostream& out);

// Prints checkpoint facts: vocabulary size, dimensions, parameter count.
void cmd_inspect(const std::filesystem::path& checkpoint, std::ostream& out);

// The fixed method-name lists used by cmd_compare.
const std::vector<std::string>& compare_methods_base();     // 5 rows
const std::vector<std::string>& compare_methods_mmi();      // +2 rows

}  // namespace s2sa
