#include "adascope/checkpoint.hpp"

#include <json.hpp>

#include "adascope/errors.hpp"
#include "adascope/manifest.hpp"

namespace adascope {

void save_checkpoint(const std::string& path, const DenoiserModel& model, const NoiseSchedule& s) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["schedule"] = {
      {"kind", s.kind == ScheduleKind::Linear ? "linear" : "cosine"},
      {"T", s.T},
      {"betas", s.betas},
  };
  const auto& d = model.dims();
  j["dims"] = {
      {"x_dim", d.x_dim},       {"num_prompts", d.num_prompts}, {"hidden", d.hidden},
      {"time_dim", d.time_dim}, {"prompt_dim", d.prompt_dim},
  };
  j["params"] = model.params();
  write_text_atomic(path, j.dump() + "\n");
}

Checkpoint load_checkpoint(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const std::runtime_error& e) {
    throw ConfigError("checkpoint: " + std::string(e.what()));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("checkpoint parse error: " + std::string(e.what()));
  }
  try {
    if (j.value("format_version", 0) != 1) {
      throw ConfigError("checkpoint: unsupported format version");
    }
    const auto& js = j.at("schedule");
    const std::string kind_name = js.at("kind").get<std::string>();
    if (kind_name != "linear" && kind_name != "cosine") {
      throw ConfigError("checkpoint: unknown schedule kind " + kind_name);
    }
    const auto betas = js.at("betas").get<std::vector<double>>();
    NoiseSchedule s = schedule_from_betas(
        kind_name == "linear" ? ScheduleKind::Linear : ScheduleKind::Cosine, betas);
    if (s.T != js.at("T").get<int>()) throw ConfigError("checkpoint: T/betas length mismatch");

    const auto& jd = j.at("dims");
    DenoiserModel::Dims dims;
    dims.x_dim = jd.at("x_dim").get<int>();
    dims.num_prompts = jd.at("num_prompts").get<int>();
    dims.hidden = jd.at("hidden").get<int>();
    dims.time_dim = jd.at("time_dim").get<int>();
    dims.prompt_dim = jd.at("prompt_dim").get<int>();

    DenoiserModel model(dims, 0);
    auto params = j.at("params").get<std::vector<double>>();
    if (static_cast<int>(params.size()) != model.param_count()) {
      throw ConfigError("checkpoint: parameter count does not match dims");
    }
    model.params() = std::move(params);
    return Checkpoint{std::move(s), std::move(model)};
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("checkpoint field error: " + std::string(e.what()));
  }
}

}  // namespace adascope
