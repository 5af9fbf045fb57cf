#include "halolab/csv.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "halolab/error.hpp"
#include "halolab/hash.hpp"

namespace halolab {

namespace {

template <class T>
T parse_number(std::string_view s, const char* column, std::size_t line) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw IoError("line " + std::to_string(line) + ": bad value '" + std::string(s) + "' in column " + column);
  return v;
}

double parse_double(std::string_view s, const char* column, std::size_t line) {
  std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (tmp.empty() || end != tmp.c_str() + tmp.size())
    throw IoError("line " + std::to_string(line) + ": bad value '" + tmp + "' in column " + column);
  return v;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  f.flush();
  if (!f) throw IoError("failed writing '" + path + "'");
}

}  // namespace

std::string format_float(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw IoError("unterminated quoted field");
  out.push_back(std::move(cur));
  return out;
}

std::string csv_row(const RunMetrics& m) {
  const auto& c = m.config;
  const double rate = m.wall_s > 0.0 ? mcups(m.cellupdates, m.wall_s) : 0.0;
  std::string s;
  s += csv_escape(m.run_id) + ',' + std::to_string(c.ranks) + ',' + std::to_string(c.threads) + ',' +
       csv_escape(c.strategy) + ',' + csv_escape(c.scheduling) + ',' + csv_escape(c.path) + ',' +
       std::to_string(c.nx) + ',' + std::to_string(c.block) + ',' + std::to_string(c.steps) + ',' +
       std::to_string(m.rep) + ',' + format_float(m.wall_s) + ',' + std::to_string(m.cellupdates) + ',' +
       format_float(rate);
  for (double t : m.phase.seconds) s += ',' + format_float(t);
  s += ',' + std::to_string(m.mem_bytes) + ',' + (m.error.empty() ? hex64(m.state_hash) : std::string()) + ',' +
       (m.energy_j ? format_float(*m.energy_j) : std::string()) + ',' + csv_escape(m.error);
  return s;
}

std::string csv_text(std::span<const RunMetrics> rows) {
  std::string s(kCsvHeader);
  s += '\n';
  for (const auto& r : rows) s += csv_row(r) + '\n';
  return s;
}

void write_csv(const std::string& path, std::span<const RunMetrics> rows) { write_file(path, csv_text(rows)); }

std::string summary_row(const ConfigSummary& s) {
  const auto& c = s.config;
  return std::to_string(c.ranks) + ',' + std::to_string(c.threads) + ',' + csv_escape(c.strategy) + ',' +
         csv_escape(c.scheduling) + ',' + csv_escape(c.path) + ',' + std::to_string(c.nx) + ',' +
         std::to_string(c.block) + ',' + std::to_string(c.steps) + ',' + std::to_string(s.runs) + ',' +
         format_float(s.median_wall_s) + ',' + format_float(s.min_wall_s) + ',' + format_float(s.max_wall_s) + ',' +
         format_float(s.speedup) + ',' + format_float(s.efficiency) + ',' +
         (s.cells_per_core ? format_float(*s.cells_per_core) : std::string()) + ',' + csv_escape(s.error);
}

void write_summary_csv(const std::string& path, std::span<const ConfigSummary> rows) {
  std::string s(kSummaryHeader);
  s += '\n';
  for (const auto& r : rows) s += summary_row(r) + '\n';
  write_file(path, s);
}

std::vector<CsvRecord> parse_csv(std::string_view text) {
  std::vector<std::string> lines;
  {
    // Split on newlines outside quotes so multi-line error messages survive.
    std::string cur;
    bool quoted = false;
    for (char c : text) {
      if (c == '"') quoted = !quoted;
      if (c == '\n' && !quoted) {
        if (!cur.empty() && cur.back() == '\r') cur.pop_back();
        lines.push_back(std::move(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) lines.push_back(std::move(cur));
  }
  if (lines.empty() || lines[0] != kCsvHeader) throw IoError("unexpected CSV header");

  std::vector<CsvRecord> out;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    const auto f = split_csv_line(lines[n]);
    if (f.size() != 23)
      throw IoError("line " + std::to_string(n + 1) + ": expected 23 fields, got " + std::to_string(f.size()));
    CsvRecord r;
    const std::size_t ln = n + 1;
    r.run_id = f[0];
    r.ranks = parse_number<int>(f[1], "ranks", ln);
    r.threads = parse_number<int>(f[2], "threads", ln);
    r.strategy = f[3];
    r.scheduling = f[4];
    r.path = f[5];
    r.nx = parse_number<int>(f[6], "nx", ln);
    r.block = parse_number<int>(f[7], "block", ln);
    r.steps = parse_number<int>(f[8], "steps", ln);
    r.rep = parse_number<int>(f[9], "rep", ln);
    r.wall_s = parse_double(f[10], "wall_s", ln);
    r.cellupdates = parse_number<std::int64_t>(f[11], "cellupdates", ln);
    r.mcups = parse_double(f[12], "mcups", ln);
    for (int p = 0; p < kNumPhases; ++p) r.phase[p] = parse_double(f[13 + p], "t_*", ln);
    r.mem_bytes = parse_number<std::uint64_t>(f[19], "mem_bytes", ln);
    r.state_hash = f[20];
    if (!f[21].empty()) r.energy_j = parse_double(f[21], "energy_j", ln);
    r.error = f[22];
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CsvRecord> read_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return parse_csv(s.str());
}

}  // namespace halolab
