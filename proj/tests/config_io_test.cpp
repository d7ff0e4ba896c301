#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "adascope/checkpoint.hpp"
#include "adascope/config.hpp"
#include "adascope/csv.hpp"
#include "adascope/errors.hpp"
#include "adascope/manifest.hpp"
#include "adascope/model.hpp"
#include "adascope/schedule.hpp"

using namespace adascope;
namespace fs = std::filesystem;

namespace {

// scratch path inside the test working directory, cleaned per use
std::string scratch(const std::string& name) {
  const std::string path = "cfgio_scratch_" + name;
  std::error_code ec;
  fs::remove(path, ec);
  return path;
}

RunConfig nondefault_config() {
  RunConfig c;
  c.schedule_kind = "cosine";
  c.schedule_T = 37;
  c.beta_min = 1.0 / 3.0;  // not representable in decimal, stresses %.17g
  c.beta_max = 0.37;
  c.cosine_offset = 0.0123;
  c.data_dim = 5;
  c.num_prompts = 7;
  c.radius = 2.75;
  c.sigma_data = 0.125;
  c.hidden = 48;
  c.time_dim = 12;
  c.prompt_dim = 6;
  c.pretrain.steps = 123;
  c.pretrain.batch = 17;
  c.pretrain.lr = 7.5e-4;
  c.pretrain.success_threshold = 1.25;
  c.pretrain.tail_window = 9;
  c.finetune.scope_mode = ScopeMode::Fixed;
  c.finetune.fixed_start = 2;
  c.finetune.fixed_end = 30;
  c.finetune.traj_per_prompt = 5;
  c.finetune.inner_epochs = 3;
  c.finetune.clip = 0.15;
  c.finetune.adv_eps = 1e-9;
  c.finetune.lr = 2.5e-4;
  c.finetune.rounds = 11;
  c.finetune.detect.rho = 0.07;
  c.finetune.detect.window = 4;
  c.finetune.detect.ema = 0.45;
  c.finetune.detect.m_min = 6;
  c.finetune.detect.probe_batch = 12;
  c.finetune.detect.refresh_every = 2;
  c.reward_name = "compress";
  c.reward.sigma_r = 0.9;
  c.reward.target_offset = 1.1;
  c.sigma_f = 0.55;
  c.corr_samples = 5000;
  c.corr_tau = 3;
  c.seed = 987654321098765ull;
  c.out_dir = "some where";
  return c;
}

}  // namespace

TEST_CASE("empty config text yields the default config and it validates") {
  const RunConfig parsed = parse_config("");
  CHECK(parsed == RunConfig{});
  CHECK_NOTHROW(parsed.validate());

  const RunConfig commented = parse_config("# only comments\n\n   \n# more\n");
  CHECK(commented == RunConfig{});
}

TEST_CASE("save then parse reproduces every field exactly") {
  const RunConfig cfg = nondefault_config();
  const std::string text = save_config(cfg);
  const RunConfig back = parse_config(text);
  CHECK(back == cfg);
  // doubles survive at full precision, not just approximately
  CHECK(back.beta_min == cfg.beta_min);
  CHECK(back.seed == cfg.seed);
  // canonical serialization is stable
  CHECK(save_config(back) == text);
}

TEST_CASE("parse handles whitespace, comments after values, quoted strings") {
  const RunConfig c = parse_config(
      "  schedule.T=21   # trailing comment\n"
      "run.out_dir = \"a # not a comment\"\n"
      "\treward.name =   incompress  \n");
  CHECK(c.schedule_T == 21);
  CHECK(c.out_dir == "a # not a comment");
  CHECK(c.reward_name == "incompress");
}

TEST_CASE("all parse problems are reported in one error") {
  try {
    parse_config(
        "bogus.key = 3\n"
        "schedule.T = not_a_number\n"
        "just a line without equals\n"
        "run.seed = -4\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("unknown key: bogus.key") != std::string::npos);
    CHECK(msg.find("bad value for schedule.T") != std::string::npos);
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("bad value for run.seed") != std::string::npos);
  }
}

TEST_CASE("parse accepts values that only validation rejects") {
  const RunConfig c = parse_config("schedule.T = 1\ndata.dim = 0\n");
  CHECK(c.schedule_T == 1);
  CHECK(c.data_dim == 0);
  try {
    c.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("schedule.T") != std::string::npos);
    CHECK(msg.find("data.dim") != std::string::npos);
  }
}

TEST_CASE("validation collects violations across sections") {
  RunConfig c;
  c.schedule_kind = "sigmoid";
  c.sigma_data = 0.0;
  c.finetune.clip = -1.0;
  c.reward_name = "clip_score";
  c.corr_samples = 10;
  try {
    c.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("schedule.kind") != std::string::npos);
    CHECK(msg.find("data.sigma") != std::string::npos);
    CHECK(msg.find("clip must be positive") != std::string::npos);
    CHECK(msg.find("reward.name") != std::string::npos);
    CHECK(msg.find("corr.samples") != std::string::npos);
  }
}

TEST_CASE("scope mode names round-trip and unknown names are rejected") {
  CHECK(parse_scope_mode("adaptive") == ScopeMode::Adaptive);
  CHECK(parse_scope_mode("full") == ScopeMode::Full);
  CHECK(parse_scope_mode("fixed") == ScopeMode::Fixed);
  CHECK(std::string(scope_mode_name(ScopeMode::Adaptive)) == "adaptive");
  CHECK(std::string(scope_mode_name(ScopeMode::Full)) == "full");
  CHECK(std::string(scope_mode_name(ScopeMode::Fixed)) == "fixed");
  CHECK_THROWS_AS(parse_scope_mode("Adaptive"), ConfigError);
  CHECK_THROWS_AS(parse_scope_mode("fixed:3,20"), ConfigError);
}

TEST_CASE("reference fixture parses to the expected field values") {
  const RunConfig c = load_config(std::string(ADASCOPE_CONFIGS) + "/reference.toml");

  RunConfig expect;
  expect.schedule_kind = "cosine";
  expect.schedule_T = 40;
  expect.beta_min = 0.001;
  expect.beta_max = 0.3;
  expect.cosine_offset = 0.01;
  expect.data_dim = 3;
  expect.num_prompts = 6;
  expect.radius = 1.5;
  expect.sigma_data = 0.25;
  expect.hidden = 32;
  expect.time_dim = 8;
  expect.prompt_dim = 4;
  expect.pretrain.steps = 500;
  expect.pretrain.batch = 32;
  expect.pretrain.lr = 0.002;
  expect.pretrain.success_threshold = 0.9;
  expect.pretrain.tail_window = 25;
  expect.finetune.scope_mode = ScopeMode::Fixed;
  expect.finetune.fixed_start = 3;
  expect.finetune.fixed_end = 20;
  expect.finetune.traj_per_prompt = 4;
  expect.finetune.inner_epochs = 1;
  expect.finetune.clip = 0.1;
  expect.finetune.adv_eps = 1e-7;
  expect.finetune.lr = 0.0005;
  expect.finetune.rounds = 10;
  expect.finetune.detect.rho = 0.1;
  expect.finetune.detect.window = 2;
  expect.finetune.detect.ema = 0.5;
  expect.finetune.detect.m_min = 4;
  expect.finetune.detect.probe_batch = 8;
  expect.finetune.detect.refresh_every = 3;
  expect.reward_name = "composite";
  expect.reward.sigma_r = 0.7;
  expect.reward.target_offset = 0.5;
  expect.sigma_f = 0.4;
  expect.corr_samples = 20000;
  expect.corr_tau = 5;
  expect.seed = 12345;
  expect.out_dir = "ref out";

  CHECK(c == expect);
}

TEST_CASE("missing config file raises a config error") {
  CHECK_THROWS_AS(load_config("no_such_file_here.toml"), ConfigError);
}

TEST_CASE("checkpoint round-trip is bit-exact") {
  DenoiserModel::Dims dims;
  dims.x_dim = 2;
  dims.num_prompts = 4;
  dims.hidden = 8;
  dims.time_dim = 4;
  dims.prompt_dim = 3;
  DenoiserModel model(dims, 11);
  for (std::size_t i = 0; i < model.params().size(); ++i) {
    model.params()[i] += 1e-3 * std::sin(0.31 * static_cast<double>(i));
  }
  const NoiseSchedule sched = make_linear_schedule(12, 0.013, 0.257);

  const std::string path = scratch("ckpt.json");
  save_checkpoint(path, model, sched);
  const Checkpoint back = load_checkpoint(path);

  CHECK(back.model.params() == model.params());
  CHECK(back.schedule.kind == sched.kind);
  CHECK(back.schedule.T == sched.T);
  CHECK(back.schedule.betas == sched.betas);
  CHECK(back.schedule.alphas == sched.alphas);
  CHECK(back.schedule.alpha_bars == sched.alpha_bars);
  CHECK(back.model.dims().hidden == dims.hidden);
  CHECK(back.model.dims().time_dim == dims.time_dim);

  // save(load(x)) is byte-identical: nothing drifts through a reload
  const std::string path2 = scratch("ckpt2.json");
  save_checkpoint(path2, back.model, back.schedule);
  CHECK(read_text_file(path2) == read_text_file(path));
  fs::remove(path);
  fs::remove(path2);
}

TEST_CASE("cosine schedules survive the checkpoint round-trip") {
  DenoiserModel::Dims dims;
  dims.x_dim = 2;
  dims.num_prompts = 2;
  dims.hidden = 4;
  dims.time_dim = 4;
  dims.prompt_dim = 2;
  const DenoiserModel model(dims, 3);
  const NoiseSchedule sched = make_cosine_schedule(20);

  const std::string path = scratch("ckpt_cos.json");
  save_checkpoint(path, model, sched);
  const Checkpoint back = load_checkpoint(path);
  CHECK(back.schedule.kind == ScheduleKind::Cosine);
  CHECK(back.schedule.betas == sched.betas);
  CHECK(back.schedule.alpha_bars == sched.alpha_bars);
  fs::remove(path);
}

TEST_CASE("corrupt checkpoints are rejected") {
  DenoiserModel::Dims dims;
  dims.x_dim = 2;
  dims.num_prompts = 2;
  dims.hidden = 4;
  dims.time_dim = 4;
  dims.prompt_dim = 2;
  const DenoiserModel model(dims, 3);
  const NoiseSchedule sched = make_linear_schedule(5, 0.02, 0.2);
  const std::string path = scratch("ckpt_bad.json");
  save_checkpoint(path, model, sched);
  const std::string good = read_text_file(path);

  SUBCASE("truncated json") {
    write_text_atomic(path, good.substr(0, good.size() / 2));
    CHECK_THROWS_AS(load_checkpoint(path), ConfigError);
  }
  SUBCASE("wrong format version") {
    std::string tampered = good;
    const auto pos = tampered.find("\"format_version\":1");
    REQUIRE(pos != std::string::npos);
    tampered.replace(pos, std::string("\"format_version\":1").size(), "\"format_version\":9");
    write_text_atomic(path, tampered);
    CHECK_THROWS_AS(load_checkpoint(path), ConfigError);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_checkpoint("nope_ckpt.json"), ConfigError); }
  fs::remove(path);
}

TEST_CASE("fnv1a64 matches the published test vectors") {
  CHECK(fnv1a64("") == 14695981039346656037ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
  CHECK(fnv1a64_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("manifest write and read round-trip") {
  RunManifest m;
  m.tool_version = "0.1.0";
  m.config_text = "schedule.T = 21\n";
  m.config_hash = fnv1a64_hex(m.config_text);
  m.seed = 42;
  m.started_at = "2026-01-02T03:04:05Z";
  m.finished_at = "2026-01-02T03:09:59Z";
  m.files = {{"metrics.csv", "0011223344556677"}, {"checkpoint.json", "8899aabbccddeeff"}};

  const std::string path = scratch("manifest.json");
  write_manifest(path, m);
  CHECK_FALSE(fs::exists(path + ".tmp"));

  const RunManifest back = read_manifest(path);
  CHECK(back.tool_version == m.tool_version);
  CHECK(back.config_text == m.config_text);
  CHECK(back.config_hash == m.config_hash);
  CHECK(back.seed == m.seed);
  CHECK(back.started_at == m.started_at);
  CHECK(back.finished_at == m.finished_at);
  // the file inventory comes back sorted by name
  const std::vector<std::pair<std::string, std::string>> sorted = {
      {"checkpoint.json", "8899aabbccddeeff"}, {"metrics.csv", "0011223344556677"}};
  CHECK(back.files == sorted);
  fs::remove(path);
}

TEST_CASE("write_text_atomic replaces content and leaves no temp file") {
  const std::string path = scratch("atomic.txt");
  write_text_atomic(path, "first\n");
  write_text_atomic(path, "second\n");
  CHECK(read_text_file(path) == "second\n");
  CHECK_FALSE(fs::exists(path + ".tmp"));
  fs::remove(path);
}

TEST_CASE("format_double round-trips doubles through text") {
  const double cases[] = {0.1,         1.0 / 3.0, 1e300,  5e-324, -0.0,
                          123456789.123456789, 3.141592653589793, -2.5e-17};
  for (double v : cases) {
    const std::string s = format_double(v);
    const double back = std::strtod(s.c_str(), nullptr);
    CHECK(back == v);
  }
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("csv parsing splits headers and rows") {
  const CsvTable t = parse_csv_text("a,b,c\r\n1,2,3\n4,,6\n# summary note\n\n");
  REQUIRE(t.header.size() == 3);
  CHECK(t.header[1] == "b");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][0] == "1");
  CHECK(t.rows[1][1] == "");
  CHECK(t.rows[1][2] == "6");
  CHECK(column_index(t, "c") == 2);
  CHECK(column_index(t, "missing") == -1);
}

TEST_CASE("metrics rows survive a write and read cycle") {
  TrainingMetrics metrics;
  RoundMetrics r0;
  r0.round = 0;
  r0.mean_reward = 0.123456789123456789;
  r0.std_reward = 1.0 / 7.0;
  r0.grad_steps_cum = 336;
  r0.scope_start = 4;
  r0.scope_end = 31;
  r0.diversity = 0.25;
  r0.wallclock_s = 1.5;
  RoundMetrics r1 = r0;
  r1.round = 1;
  r1.mean_reward = -3.25e-5;
  r1.grad_steps_cum = 672;
  metrics.rounds = {r0, r1};

  const std::string path = scratch("metrics.csv");
  write_metrics_csv(path, metrics);
  const CsvTable t = read_csv(path);
  REQUIRE(t.header.size() == 8);
  CHECK(t.header[0] == "round");
  CHECK(t.header[7] == "wallclock_s");
  REQUIRE(t.rows.size() == 2);
  const int mr = column_index(t, "mean_reward");
  REQUIRE(mr >= 0);
  CHECK(std::strtod(t.rows[0][static_cast<std::size_t>(mr)].c_str(), nullptr) == r0.mean_reward);
  CHECK(std::strtod(t.rows[1][static_cast<std::size_t>(mr)].c_str(), nullptr) == r1.mean_reward);
  CHECK(t.rows[1][0] == "1");
  CHECK(t.rows[0][3] == "336");
  fs::remove(path);
}
