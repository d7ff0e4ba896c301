#include "adascope/config.hpp"

#include <climits>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include "adascope/errors.hpp"

namespace adascope {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool parse_double_value(const std::string& v, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(v, &pos);
    return pos == v.size();
  } catch (...) {
    return false;
  }
}

bool parse_int_value(const std::string& v, int& out) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size() || x < INT_MIN || x > INT_MAX) return false;
    out = static_cast<int>(x);
    return true;
  } catch (...) {
    return false;
  }
}

bool parse_u64_value(const std::string& v, std::uint64_t& out) {
  try {
    std::size_t pos = 0;
    out = std::stoull(v, &pos);
    return pos == v.size() && v.find('-') == std::string::npos;
  } catch (...) {
    return false;
  }
}

std::string unquote(const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// one schema row: key name plus typed accessors into a RunConfig
struct Entry {
  std::string key;
  std::function<bool(RunConfig&, const std::string&)> set;  // false = bad value
  std::function<std::string(const RunConfig&)> get;
};

std::vector<Entry> schema() {
  auto d = [](double RunConfig::*f) {
    return Entry{"", [f](RunConfig& c, const std::string& v) { return parse_double_value(v, c.*f); },
                 [f](const RunConfig& c) { return fmt_double(c.*f); }};
  };
  auto i = [](int RunConfig::*f) {
    return Entry{"", [f](RunConfig& c, const std::string& v) { return parse_int_value(v, c.*f); },
                 [f](const RunConfig& c) { return std::to_string(c.*f); }};
  };
  auto s = [](std::string RunConfig::*f) {
    return Entry{"",
                 [f](RunConfig& c, const std::string& v) {
                   c.*f = unquote(v);
                   return true;
                 },
                 [f](const RunConfig& c) { return "\"" + c.*f + "\""; }};
  };
  auto named = [](Entry e, const char* key) {
    e.key = key;
    return e;
  };
  // nested members need explicit lambdas
  std::vector<Entry> rows;
  rows.push_back(named(s(&RunConfig::schedule_kind), "schedule.kind"));
  rows.push_back(named(i(&RunConfig::schedule_T), "schedule.T"));
  rows.push_back(named(d(&RunConfig::beta_min), "schedule.beta_min"));
  rows.push_back(named(d(&RunConfig::beta_max), "schedule.beta_max"));
  rows.push_back(named(d(&RunConfig::cosine_offset), "schedule.offset"));
  rows.push_back(named(i(&RunConfig::data_dim), "data.dim"));
  rows.push_back(named(i(&RunConfig::num_prompts), "data.num_prompts"));
  rows.push_back(named(d(&RunConfig::radius), "data.radius"));
  rows.push_back(named(d(&RunConfig::sigma_data), "data.sigma"));
  rows.push_back(named(i(&RunConfig::hidden), "model.hidden"));
  rows.push_back(named(i(&RunConfig::time_dim), "model.time_dim"));
  rows.push_back(named(i(&RunConfig::prompt_dim), "model.prompt_dim"));

// single source for nested-member keys: EXPR names the field through `c`
#define SUB_INT(KEY, EXPR)                                                               \
  rows.push_back(Entry{KEY,                                                             \
                       [](RunConfig& c, const std::string& v) {                         \
                         return parse_int_value(v, EXPR);                               \
                       },                                                               \
                       [](const RunConfig& c) { return std::to_string(EXPR); }})
#define SUB_DBL(KEY, EXPR)                                                               \
  rows.push_back(Entry{KEY,                                                             \
                       [](RunConfig& c, const std::string& v) {                         \
                         return parse_double_value(v, EXPR);                            \
                       },                                                               \
                       [](const RunConfig& c) { return fmt_double(EXPR); }})
  SUB_INT("pretrain.steps", c.pretrain.steps);
  SUB_INT("pretrain.batch", c.pretrain.batch);
  SUB_DBL("pretrain.lr", c.pretrain.lr);
  SUB_DBL("pretrain.success_threshold", c.pretrain.success_threshold);
  SUB_INT("pretrain.tail_window", c.pretrain.tail_window);

  rows.push_back(Entry{"finetune.scope_mode",
                       [](RunConfig& c, const std::string& v) {
                         try {
                           c.finetune.scope_mode = parse_scope_mode(unquote(v));
                           return true;
                         } catch (const ConfigError&) {
                           return false;
                         }
                       },
                       [](const RunConfig& c) {
                         return std::string("\"") + scope_mode_name(c.finetune.scope_mode) + "\"";
                       }});
  SUB_INT("finetune.fixed_start", c.finetune.fixed_start);
  SUB_INT("finetune.fixed_end", c.finetune.fixed_end);
  SUB_INT("finetune.traj_per_prompt", c.finetune.traj_per_prompt);
  SUB_INT("finetune.inner_epochs", c.finetune.inner_epochs);
  SUB_DBL("finetune.clip", c.finetune.clip);
  SUB_DBL("finetune.adv_eps", c.finetune.adv_eps);
  SUB_DBL("finetune.lr", c.finetune.lr);
  SUB_INT("finetune.rounds", c.finetune.rounds);
  SUB_DBL("detect.rho", c.finetune.detect.rho);
  SUB_INT("detect.window", c.finetune.detect.window);
  SUB_DBL("detect.ema", c.finetune.detect.ema);
  SUB_INT("detect.m_min", c.finetune.detect.m_min);
  SUB_INT("detect.probe_batch", c.finetune.detect.probe_batch);
  SUB_INT("detect.refresh_every", c.finetune.detect.refresh_every);

  rows.push_back(named(s(&RunConfig::reward_name), "reward.name"));
  SUB_DBL("reward.sigma_r", c.reward.sigma_r);
  SUB_DBL("reward.target_offset", c.reward.target_offset);
  rows.push_back(named(d(&RunConfig::sigma_f), "reward.sigma_f"));
  rows.push_back(named(i(&RunConfig::corr_samples), "corr.samples"));
  rows.push_back(named(i(&RunConfig::corr_tau), "corr.tau"));
#undef SUB_INT
#undef SUB_DBL

  rows.push_back(Entry{"run.seed",
                       [](RunConfig& c, const std::string& v) {
                         return parse_u64_value(v, c.seed);
                       },
                       [](const RunConfig& c) { return std::to_string(c.seed); }});
  rows.push_back(named(s(&RunConfig::out_dir), "run.out_dir"));
  return rows;
}

}  // namespace

const char* scope_mode_name(ScopeMode mode) {
  switch (mode) {
    case ScopeMode::Adaptive: return "adaptive";
    case ScopeMode::Full: return "full";
    case ScopeMode::Fixed: return "fixed";
  }
  return "adaptive";
}

ScopeMode parse_scope_mode(const std::string& name) {
  if (name == "adaptive") return ScopeMode::Adaptive;
  if (name == "full") return ScopeMode::Full;
  if (name == "fixed") return ScopeMode::Fixed;
  throw ConfigError("unknown scope mode: " + name);
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  const auto rows = schema();
  std::map<std::string, const Entry*> by_key;
  for (const auto& row : rows) by_key[row.key] = &row;

  std::vector<std::string> problems;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // comments start at '#' outside quotes
    bool quoted = false;
    for (std::size_t p = 0; p < line.size(); ++p) {
      if (line[p] == '"') quoted = !quoted;
      if (line[p] == '#' && !quoted) {
        line.resize(p);
        break;
      }
    }
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      problems.push_back("line " + std::to_string(line_no) + ": expected key = value");
      continue;
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    auto it = by_key.find(key);
    if (it == by_key.end()) {
      problems.push_back("unknown key: " + key);
      continue;
    }
    if (value.empty() || !it->second->set(cfg, value)) {
      problems.push_back("bad value for " + key + ": '" + value + "'");
    }
  }
  if (!problems.empty()) {
    std::string joined;
    for (const auto& p : problems) {
      if (!joined.empty()) joined += "; ";
      joined += p;
    }
    throw ConfigError("config: " + joined);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config file not found: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  RunConfig cfg = parse_config(buf.str());
  cfg.validate();
  return cfg;
}

std::string save_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& row : schema()) {
    out += row.key;
    out += " = ";
    out += row.get(cfg);
    out += "\n";
  }
  return out;
}

void RunConfig::validate() const {
  std::vector<std::string> problems;
  auto add = [&problems](const std::string& m) { problems.push_back(m); };
  if (schedule_kind != "linear" && schedule_kind != "cosine") {
    add("schedule.kind must be linear or cosine");
  }
  if (schedule_T < 2) add("schedule.T must be >= 2");
  if (schedule_kind == "linear" && !(0.0 < beta_min && beta_min <= beta_max && beta_max < 1.0)) {
    add("schedule.beta_min/beta_max must satisfy 0 < min <= max < 1");
  }
  if (schedule_kind == "cosine" && cosine_offset <= 0.0) add("schedule.offset must be positive");
  if (data_dim < 2) add("data.dim must be >= 2");
  if (num_prompts < 1) add("data.num_prompts must be >= 1");
  if (radius < 0.0) add("data.radius must be nonnegative");
  if (sigma_data <= 0.0) add("data.sigma must be positive");
  if (hidden < 1) add("model.hidden must be >= 1");
  if (time_dim < 2 || time_dim % 2 != 0) add("model.time_dim must be even and >= 2");
  if (prompt_dim < 1) add("model.prompt_dim must be >= 1");
  if (pretrain.steps < 0) add("pretrain.steps must be nonnegative");
  if (pretrain.batch < 1) add("pretrain.batch must be >= 1");
  if (pretrain.lr <= 0.0) add("pretrain.lr must be positive");
  if (pretrain.tail_window < 1) add("pretrain.tail_window must be >= 1");
  try {
    finetune.validate(schedule_T);
  } catch (const ConfigError& e) {
    add(e.what());
  }
  if (reward_name != "proximity" && reward_name != "compress" && reward_name != "incompress" &&
      reward_name != "composite") {
    add("reward.name must be one of proximity|compress|incompress|composite");
  }
  if (reward.sigma_r <= 0.0) add("reward.sigma_r must be positive");
  if (reward.target_offset < 0.0) add("reward.target_offset must be nonnegative");
  if (sigma_f <= 0.0) add("reward.sigma_f must be positive");
  if (corr_samples < 1000) add("corr.samples must be >= 1000");
  if (corr_tau < 0 || corr_tau > schedule_T - 1) add("corr.tau must be in [0, T-1]");
  if (out_dir.empty()) add("run.out_dir must not be empty");
  if (!problems.empty()) {
    std::string joined;
    for (const auto& p : problems) {
      if (!joined.empty()) joined += "; ";
      joined += p;
    }
    throw ConfigError("config: " + joined);
  }
}

}  // namespace adascope
