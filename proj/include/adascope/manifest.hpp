#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace adascope {

// Reads a whole file; throws std::runtime_error when it cannot be opened.
std::string read_text_file(const std::string& path);

// Writes through a temp file in the same directory plus rename, so readers
// never observe a partial file.
void write_text_atomic(const std::string& path, const std::string& content);

std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);

std::string iso8601_utc_now();

// Reproducibility record written as the final artifact of every run: the
// exact config, its hash, the seed, timestamps, and a checksum inventory of
// every file the run produced.
struct RunManifest {
  std::string tool_version;
  std::string config_text;
  std::string config_hash;  // fnv1a64 hex of config_text
  std::uint64_t seed = 0;
  std::string started_at;
  std::string finished_at;
  std::vector<std::pair<std::string, std::string>> files;  // name -> checksum, sorted by name on read
};

void write_manifest(const std::string& path, const RunManifest& m);
RunManifest read_manifest(const std::string& path);

}  // namespace adascope
