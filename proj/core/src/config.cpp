#include "s2sa/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <type_traits>
#include <vector>

#include "s2sa/errors.hpp"
#include "s2sa/strategy.hpp"

namespace s2sa {

const char* const kSeedEnvVar = "S2SA_SEED";

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_integer(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) {
    throw ConfigError("config key '" + key + "': '" + value + "' is not a valid integer");
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) {
    throw ConfigError("config key '" + key + "': '" + value + "' is not a valid number");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config key '" + key + "': '" + value + "' is not a boolean");
}

std::string render_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

struct Field {
  const char* name;
  void (*set)(RunConfig&, const std::string& key, const std::string& value);
  std::string (*get)(const RunConfig&);
};

template <class T, T RunConfig::*Member>
Field make_field(const char* name) {
  Field f;
  f.name = name;
  f.set = [](RunConfig& cfg, const std::string& key, const std::string& value) {
    if constexpr (std::is_same_v<T, double>) {
      cfg.*Member = parse_double(key, value);
    } else if constexpr (std::is_same_v<T, bool>) {
      cfg.*Member = parse_bool(key, value);
    } else if constexpr (std::is_same_v<T, std::string>) {
      cfg.*Member = value;
    } else {
      cfg.*Member = parse_integer<T>(key, value);
    }
  };
  f.get = [](const RunConfig& cfg) -> std::string {
    if constexpr (std::is_same_v<T, double>) {
      return render_double(cfg.*Member);
    } else if constexpr (std::is_same_v<T, bool>) {
      return (cfg.*Member) ? "true" : "false";
    } else if constexpr (std::is_same_v<T, std::string>) {
      return cfg.*Member;
    } else {
      return std::to_string(cfg.*Member);
    }
  };
  return f;
}

#define S2SA_FIELD(member) make_field<decltype(RunConfig::member), &RunConfig::member>(#member)

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      S2SA_FIELD(vocab_capacity), S2SA_FIELD(length_cap),   S2SA_FIELD(train_ratio),
      S2SA_FIELD(test_ratio),     S2SA_FIELD(valid_ratio),  S2SA_FIELD(emb_dim),
      S2SA_FIELD(hidden_dim),     S2SA_FIELD(learning_rate), S2SA_FIELD(batch_size),
      S2SA_FIELD(dropout),        S2SA_FIELD(max_epochs),   S2SA_FIELD(adadelta_rho),
      S2SA_FIELD(adadelta_eps),   S2SA_FIELD(grad_clip),    S2SA_FIELD(beam_width),
      S2SA_FIELD(max_len),        S2SA_FIELD(length_normalize), S2SA_FIELD(strategy),
      S2SA_FIELD(lambda),         S2SA_FIELD(seed),         S2SA_FIELD(threads),
  };
  return table;
}

#undef S2SA_FIELD

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  for (const Field& f : fields()) {
    if (key != f.name) continue;
    f.set(*this, key, value);
    return;
  }
  throw ConfigError("unknown config key: " + key);
}

void RunConfig::validate() const {
  if (vocab_capacity <= 4) throw ConfigError("vocab_capacity must be greater than 4");
  if (length_cap < 1) throw ConfigError("length_cap must be at least 1");
  split_spec().validate();
  if (emb_dim < 1 || hidden_dim < 1) throw ConfigError("emb_dim and hidden_dim must be positive");
  train_config().validate();
  if (beam_width < 1) throw ConfigError("beam_width must be at least 1");
  if (max_len < 1) throw ConfigError("max_len must be at least 1");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  parse_strategy(strategy);  // throws ConfigError on an unknown name
}

std::string RunConfig::render() const {
  std::string out;
  for (const Field& f : fields()) {
    out += f.name;
    out += " = ";
    out += f.get(*this);
    out += '\n';
  }
  return out;
}

SplitSpec RunConfig::split_spec() const {
  SplitSpec spec;
  spec.train_ratio = train_ratio;
  spec.test_ratio = test_ratio;
  spec.valid_ratio = valid_ratio;
  spec.seed = seed;
  return spec;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig cfg;
  cfg.learning_rate = learning_rate;
  cfg.batch_size = batch_size;
  cfg.dropout_rate = dropout;
  cfg.max_epochs = max_epochs;
  cfg.adadelta_rho = adadelta_rho;
  cfg.adadelta_eps = adadelta_eps;
  cfg.grad_clip = grad_clip;
  cfg.seed = seed;
  return cfg;
}

BeamConfig RunConfig::beam_config() const {
  BeamConfig cfg;
  cfg.beam_width = beam_width;
  cfg.max_len = max_len;
  cfg.length_normalize = length_normalize;
  return cfg;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read config file: " + path.string());
  RunConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string trimmed = trim(line);
    if (trimmed.empty()) continue;
    const std::size_t eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      cfg.set(trim(trimmed.substr(0, eq)), trim(trimmed.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  if (path.empty()) return RunConfig{};
  return RunConfig::from_file(path);
}

void apply_env_seed(RunConfig& cfg) {
  const char* value = std::getenv(kSeedEnvVar);
  if (value == nullptr) return;
  cfg.seed = parse_integer<std::uint64_t>(kSeedEnvVar, value);
}

}  // namespace s2sa
