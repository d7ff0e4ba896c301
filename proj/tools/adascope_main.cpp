#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "adascope/config.hpp"
#include "adascope/errors.hpp"
#include "adascope/manifest.hpp"
#include "adascope/runner.hpp"

namespace {

using adascope::ConfigError;
using adascope::RunConfig;

struct CommonFlags {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "configuration file")->required();
  cmd->add_option("--seed", flags.seed, "override run.seed")
      ->each([&flags](const std::string&) { flags.seed_set = true; });
  cmd->add_option("--out", flags.out_dir, "override run.out_dir");
}

// "fixed:A,B" carries its interval inline; "adaptive" and "full" stand alone.
void apply_scope_flag(RunConfig& cfg, const std::string& value) {
  const std::string prefix = "fixed:";
  if (value.rfind(prefix, 0) == 0) {
    int a = 0, b = 0;
    char tail = 0;
    const int got = std::sscanf(value.c_str() + prefix.size(), "%d,%d%c", &a, &b, &tail);
    if (got != 2) throw ConfigError("bad --scope value '" + value + "', expected fixed:A,B");
    cfg.finetune.scope_mode = adascope::ScopeMode::Fixed;
    cfg.finetune.fixed_start = a;
    cfg.finetune.fixed_end = b;
    return;
  }
  cfg.finetune.scope_mode = adascope::parse_scope_mode(value);
}

RunConfig load_with_overrides(const CommonFlags& flags) {
  std::string text;
  try {
    text = adascope::read_text_file(flags.config_path);
  } catch (const std::runtime_error&) {
    throw ConfigError("config file not found: " + flags.config_path);
  }
  return adascope::parse_config(text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"toy diffusion lab: adaptive-scope RL fine-tuning and trajectory correlation"};
  app.require_subcommand(1);

  CommonFlags pre_flags, ft_flags, probe_flags, corr_flags, abl_flags, rep_flags;

  CLI::App* pre = app.add_subcommand("pretrain", "train the noise predictor from scratch");
  add_common(pre, pre_flags);

  CLI::App* ft = app.add_subcommand("finetune", "RL fine-tuning within a denoising scope");
  add_common(ft, ft_flags);
  std::string ft_scope, ft_reward, ft_checkpoint;
  int ft_rounds = -1;
  ft->add_option("--scope", ft_scope, "adaptive | full | fixed:A,B");
  ft->add_option("--reward", ft_reward, "proximity | compress | incompress | composite");
  ft->add_option("--rounds", ft_rounds, "override finetune.rounds");
  ft->add_option("--checkpoint", ft_checkpoint, "pretrained checkpoint (default: pretrain first)");

  CLI::App* probe = app.add_subcommand("probe-scope", "dump per-step gain series and the detected scope");
  add_common(probe, probe_flags);
  int probe_prompt = 0;
  std::string probe_checkpoint;
  probe->add_option("--prompt", probe_prompt, "prompt id to probe");
  probe->add_option("--checkpoint", probe_checkpoint, "pretrained checkpoint (default: pretrain first)");

  CLI::App* corr = app.add_subcommand("analyze-corr", "closed-form vs Monte Carlo correlation table");
  add_common(corr, corr_flags);

  CLI::App* abl = app.add_subcommand("ablate", "compare full / adaptive / fixed scopes from one start");
  add_common(abl, abl_flags);
  std::string abl_checkpoint;
  abl->add_option("--checkpoint", abl_checkpoint, "pretrained checkpoint (default: pretrain first)");

  CLI::App* rep = app.add_subcommand("report", "aggregate run directories into tables and charts");
  add_common(rep, rep_flags);
  std::vector<std::string> rep_runs;
  rep->add_option("--run", rep_runs, "run directory to aggregate (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    CommonFlags* flags = nullptr;
    if (*pre) flags = &pre_flags;
    if (*ft) flags = &ft_flags;
    if (*probe) flags = &probe_flags;
    if (*corr) flags = &corr_flags;
    if (*abl) flags = &abl_flags;
    if (*rep) flags = &rep_flags;

    RunConfig cfg = load_with_overrides(*flags);
    if (flags->seed_set) cfg.seed = flags->seed;
    if (!flags->out_dir.empty()) cfg.out_dir = flags->out_dir;
    if (*ft) {
      if (!ft_scope.empty()) apply_scope_flag(cfg, ft_scope);
      if (!ft_reward.empty()) cfg.reward_name = ft_reward;
      if (ft_rounds >= 0) cfg.finetune.rounds = ft_rounds;
    }
    cfg.validate();

    if (*pre) {
      adascope::run_pretrain(cfg);
    } else if (*ft) {
      adascope::run_finetune(cfg, ft_checkpoint);
    } else if (*probe) {
      adascope::run_probe_scope(cfg, probe_prompt, probe_checkpoint);
    } else if (*corr) {
      adascope::run_analyze_corr(cfg);
    } else if (*abl) {
      adascope::run_ablate(cfg, abl_checkpoint);
    } else if (*rep) {
      adascope::run_report(cfg, rep_runs);
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
