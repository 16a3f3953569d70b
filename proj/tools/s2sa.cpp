#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "s2sa/commands.hpp"
#include "s2sa/errors.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value
  std::optional<std::uint64_t> seed;
  std::optional<std::string> strategy;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "Config file (key = value lines)");
  cmd->add_option("--set", opts.overrides, "Override a config key (key=value, repeatable)");
  cmd->add_option(
      "--seed",
      [&opts](const std::vector<std::string>& values) {
        std::uint64_t parsed = 0;
        if (!CLI::detail::lexical_cast(values.back(), parsed)) return false;
        opts.seed = parsed;
        return true;
      },
      "Override the global seed");
  cmd->add_option(
      "--strategy",
      [&opts](const std::vector<std::string>& values) {
        opts.strategy = values.back();
        return true;
      },
      "First-context strategy");
}

s2sa::RunConfig resolve_config(const CommonOpts& opts) {
  s2sa::RunConfig cfg = s2sa::load_config(
      opts.config_path.empty() ? std::filesystem::path{} : std::filesystem::path(opts.config_path));
  s2sa::apply_env_seed(cfg);
  for (const std::string& kv : opts.overrides) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      throw s2sa::ConfigError("--set expects key=value, got '" + kv + "'");
    }
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (opts.seed.has_value()) cfg.seed = *opts.seed;
  if (opts.strategy.has_value()) cfg.strategy = *opts.strategy;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attention-based seq2seq dialogue toolkit with selectable first-context strategies"};
  app.require_subcommand(1);

  CommonOpts opts;

  std::string pairs_path, out_dir, data_dir, checkpoint, messages_path, out_path, test_path,
      responses_path;
  std::string direction = "forward";
  std::string reverse_checkpoint;
  bool verbose = false;

  CLI::App* prepare = app.add_subcommand("prepare", "Filter, split, and index a pair file");
  prepare->add_option("pairs", pairs_path, "message<TAB>response file")->required();
  prepare->add_option("out_dir", out_dir, "Output directory")->required();
  add_common(prepare, opts);

  CLI::App* train = app.add_subcommand("train", "Train a model on prepared data");
  train->add_option("data_dir", data_dir, "Directory from prepare")->required();
  train->add_option("checkpoint", checkpoint, "Output checkpoint path")->required();
  train->add_option("--direction", direction, "forward|reverse (reverse swaps each pair)")
      ->default_val("forward");
  add_common(train, opts);

  CLI::App* decode = app.add_subcommand("decode", "Decode one response per input line");
  decode->add_option("checkpoint", checkpoint, "Model checkpoint")->required();
  decode->add_option("messages", messages_path, "One message per line")->required();
  decode->add_option("out", out_path, "Output responses file")->required();
  decode->add_option("--reverse-checkpoint", reverse_checkpoint,
                     "Rerank candidates with this reverse model");
  add_common(decode, opts);

  CLI::App* compare = app.add_subcommand("compare", "Run every method over a test pair file");
  compare->add_option("checkpoint", checkpoint, "Model checkpoint")->required();
  compare->add_option("test", test_path, "Test pair file")->required();
  compare->add_option("out_dir", out_dir, "Output directory")->required();
  compare->add_option("--reverse-checkpoint", reverse_checkpoint,
                      "Adds the two MMI method rows");
  add_common(compare, opts);

  CLI::App* chat = app.add_subcommand("chat", "Interactive decoding loop");
  chat->add_option("checkpoint", checkpoint, "Model checkpoint")->required();
  chat->add_flag("--verbose", verbose, "Print the selected first-context index");
  add_common(chat, opts);

  CLI::App* eval = app.add_subcommand("eval", "Score a responses file against references");
  eval->add_option("pairs", pairs_path, "Reference pair file")->required();
  eval->add_option("responses", responses_path, "One response per line")->required();
  add_common(eval, opts);

  CLI::App* inspect = app.add_subcommand("inspect", "Print checkpoint facts");
  inspect->add_option("checkpoint", checkpoint, "Model checkpoint")->required();
  add_common(inspect, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    std::optional<std::filesystem::path> reverse;
    if (!reverse_checkpoint.empty()) reverse = reverse_checkpoint;

    if (prepare->parsed()) {
      s2sa::cmd_prepare(pairs_path, out_dir, resolve_config(opts), std::cout);
    } else if (train->parsed()) {
      s2sa::cmd_train(data_dir, checkpoint, resolve_config(opts), direction, std::cout);
    } else if (decode->parsed()) {
      s2sa::cmd_decode(checkpoint, messages_path, out_path, resolve_config(opts), reverse, std::cout);
    } else if (compare->parsed()) {
      s2sa::cmd_compare(checkpoint, test_path, out_dir, resolve_config(opts), reverse, std::cout);
    } else if (chat->parsed()) {
      return s2sa::cmd_chat(checkpoint, resolve_config(opts), verbose, std::cin, std::cout, std::cerr);
    } else if (eval->parsed()) {
      s2sa::cmd_eval(pairs_path, responses_path, std::cout);
    } else if (inspect->parsed()) {
      s2sa::cmd_inspect(checkpoint, std::cout);
    }
    return 0;
  } catch (const s2sa::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const s2sa::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const s2sa::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const s2sa::ShapeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
