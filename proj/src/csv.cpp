#include "adascope/csv.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "adascope/manifest.hpp"

namespace adascope {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

MetricsWriter::MetricsWriter(const std::string& path) : out_(path, std::ios::trunc) {
  if (!out_) throw std::runtime_error("cannot open for writing: " + path);
  out_ << kMetricsHeader << "\n";
  out_.flush();
}

std::string metrics_row(const RoundMetrics& row) {
  std::ostringstream os;
  os << row.round << ',' << format_double(row.mean_reward) << ','
     << format_double(row.std_reward) << ',' << row.grad_steps_cum << ','
     << row.scope_start << ',' << row.scope_end << ','
     << format_double(row.diversity) << ',' << format_double(row.wallclock_s);
  return os.str();
}

void MetricsWriter::append(const RoundMetrics& row) {
  out_ << metrics_row(row) << "\n";
  out_.flush();
  if (!out_) throw std::runtime_error("metrics write failed");
}

void write_metrics_csv(const std::string& path, const TrainingMetrics& metrics) {
  MetricsWriter w(path);
  for (const auto& row : metrics.rounds) w.append(row);
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

CsvTable parse_csv_text(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (first) {
      table.header = split_commas(line);
      first = false;
    } else {
      table.rows.push_back(split_commas(line));
    }
  }
  return table;
}

CsvTable read_csv(const std::string& path) { return parse_csv_text(read_text_file(path)); }

int column_index(const CsvTable& table, const std::string& name) {
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (table.header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace adascope
