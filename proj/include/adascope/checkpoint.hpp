#pragma once

#include <string>

#include "adascope/model.hpp"
#include "adascope/schedule.hpp"

namespace adascope {

struct Checkpoint {
  NoiseSchedule schedule;
  DenoiserModel model;
};

// JSON checkpoint: format version, schedule betas, architecture dims, and
// the full parameter vector. Doubles are serialized at round-trip precision,
// so save followed by load reproduces every value bit-exactly. Written
// atomically.
void save_checkpoint(const std::string& path, const DenoiserModel& model, const NoiseSchedule& s);

// Throws ConfigError on wrong version, malformed JSON, or shape mismatches.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace adascope
