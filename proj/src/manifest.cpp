#include "adascope/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "adascope/errors.hpp"

namespace adascope {

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("short write: " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

std::string iso8601_utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const std::string& path, const RunManifest& m) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["tool_version"] = m.tool_version;
  j["config_text"] = m.config_text;
  j["config_hash"] = m.config_hash;
  j["seed"] = m.seed;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  nlohmann::json files = nlohmann::json::object();
  for (const auto& [name, checksum] : m.files) files[name] = checksum;
  j["files"] = files;
  write_text_atomic(path, j.dump(2) + "\n");
}

RunManifest read_manifest(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest parse error: " + std::string(e.what()));
  }
  if (j.value("format_version", 0) != 1) throw ConfigError("manifest: unsupported format version");
  RunManifest m;
  m.tool_version = j.value("tool_version", "");
  m.config_text = j.value("config_text", "");
  m.config_hash = j.value("config_hash", "");
  m.seed = j.value("seed", std::uint64_t{0});
  m.started_at = j.value("started_at", "");
  m.finished_at = j.value("finished_at", "");
  if (j.contains("files")) {
    for (const auto& [name, checksum] : j["files"].items()) {
      m.files.emplace_back(name, checksum.get<std::string>());
    }
  }
  return m;
}

}  // namespace adascope
