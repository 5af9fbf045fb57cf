#pragma once

// Result table I/O. The header is a frozen schema shared with the report
// tooling; changing it breaks every consumer.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "halolab/bench.hpp"
#include "halolab/metrics.hpp"

namespace halolab {

inline constexpr std::string_view kCsvHeader =
    "run_id,ranks,threads,strategy,scheduling,path,nx,block,steps,rep,wall_s,cellupdates,mcups,t_compute,t_pack,"
    "t_localcopy,t_wait,t_unpack,t_serial,mem_bytes,state_hash,energy_j,error";

inline constexpr std::string_view kSummaryHeader =
    "ranks,threads,strategy,scheduling,path,nx,block,steps,runs,median_wall_s,min_wall_s,max_wall_s,speedup,"
    "efficiency,cells_per_core,error";

// %.6g
std::string format_float(double v);
// RFC 4180 quoting when the field holds a comma, quote or line break.
std::string csv_escape(std::string_view field);
std::vector<std::string> split_csv_line(std::string_view line);

std::string csv_row(const RunMetrics& m);
std::string csv_text(std::span<const RunMetrics> rows);
void write_csv(const std::string& path, std::span<const RunMetrics> rows);

std::string summary_row(const ConfigSummary& s);
void write_summary_csv(const std::string& path, std::span<const ConfigSummary> rows);

// A result row as read back from disk.
struct CsvRecord {
  std::string run_id;
  int ranks = 0;
  int threads = 0;
  std::string strategy;
  std::string scheduling;
  std::string path;
  int nx = 0;
  int block = 0;
  int steps = 0;
  int rep = 0;
  double wall_s = 0.0;
  std::int64_t cellupdates = 0;
  double mcups = 0.0;
  std::array<double, kNumPhases> phase{};
  std::uint64_t mem_bytes = 0;
  std::string state_hash;
  std::optional<double> energy_j;
  std::string error;
};

// Throws IoError on a header mismatch or malformed row.
std::vector<CsvRecord> parse_csv(std::string_view text);
std::vector<CsvRecord> read_csv(const std::string& path);

}  // namespace halolab
