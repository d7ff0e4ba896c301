#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "adascope/finetune.hpp"

namespace adascope {

// %.17g, enough digits to reproduce the double exactly
std::string format_double(double v);

inline constexpr const char* kMetricsHeader =
    "round,mean_reward,std_reward,grad_steps_cum,scope_start,scope_end,diversity,wallclock_s";

// Streams metrics one row per round so partial results survive a dying run.
class MetricsWriter {
 public:
  explicit MetricsWriter(const std::string& path);  // writes the header
  void append(const RoundMetrics& row);

 private:
  std::ofstream out_;
};

std::string metrics_row(const RoundMetrics& row);
void write_metrics_csv(const std::string& path, const TrainingMetrics& metrics);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Plain comma splitting; the tool's own files never contain quoted commas.
// Blank lines and lines starting with '#' (summary annotations) are skipped.
CsvTable parse_csv_text(const std::string& text);
CsvTable read_csv(const std::string& path);

// Column lookup by name; -1 when absent. Readers resolve columns by header
// name so extra columns never break them.
int column_index(const CsvTable& table, const std::string& name);

}  // namespace adascope
