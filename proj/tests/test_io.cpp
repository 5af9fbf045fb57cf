#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "halolab/config.hpp"
#include "halolab/csv.hpp"
#include "halolab/error.hpp"

using namespace halolab;
namespace fs = std::filesystem;

namespace {

RunMetrics sample_row() {
  RunMetrics m;
  m.config = RunConfig{}.echo();
  m.config.ranks = 2;
  m.config.threads = 4;
  m.rep = 3;
  m.run_id = "00112233aabbccdd";
  m.wall_s = 1.23456789;
  m.cellupdates = 5'242'880;
  for (int p = 0; p < kNumPhases; ++p) m.phase.seconds[p] = 0.1 * (p + 1) + 1e-9;
  m.mem_bytes = 123456789;
  m.state_hash = 0xdeadbeef01234567ULL;
  return m;
}

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("halolab_test_" + name); }

}  // namespace

TEST(Csv, HeaderIsFrozen) {
  EXPECT_EQ(kCsvHeader,
            "run_id,ranks,threads,strategy,scheduling,path,nx,block,steps,rep,wall_s,cellupdates,mcups,t_compute,"
            "t_pack,t_localcopy,t_wait,t_unpack,t_serial,mem_bytes,state_hash,energy_j,error");
}

TEST(Csv, EmptyTableIsHeaderOnly) {
  EXPECT_EQ(csv_text({}), std::string(kCsvHeader) + "\n");
  EXPECT_TRUE(parse_csv(csv_text({})).empty());
}

TEST(Csv, RowRoundTrips) {
  auto m = sample_row();
  m.energy_j = 341.9876543;
  const std::vector<RunMetrics> rows{m};
  const auto parsed = parse_csv(csv_text(rows));
  ASSERT_EQ(parsed.size(), 1u);
  const auto& r = parsed[0];
  EXPECT_EQ(r.run_id, m.run_id);
  EXPECT_EQ(r.ranks, 2);
  EXPECT_EQ(r.threads, 4);
  EXPECT_EQ(r.strategy, "fused");
  EXPECT_EQ(r.scheduling, "static");
  EXPECT_EQ(r.path, "shared-handoff");
  EXPECT_EQ(r.nx, 64);
  EXPECT_EQ(r.block, 16);
  EXPECT_EQ(r.steps, 10);
  EXPECT_EQ(r.rep, 3);
  EXPECT_NEAR(r.wall_s, m.wall_s, 1e-5 * m.wall_s);
  EXPECT_EQ(r.cellupdates, m.cellupdates);
  for (int p = 0; p < kNumPhases; ++p) EXPECT_NEAR(r.phase[p], m.phase.seconds[p], 1e-5 * m.phase.seconds[p]);
  EXPECT_EQ(r.mem_bytes, m.mem_bytes);
  EXPECT_EQ(r.state_hash, "deadbeef01234567");
  ASSERT_TRUE(r.energy_j.has_value());
  EXPECT_NEAR(*r.energy_j, 341.988, 1e-9);
  EXPECT_TRUE(r.error.empty());
}

TEST(Csv, McupsColumnAndSixDigits) {
  const auto m = sample_row();
  const auto row = csv_row(m);
  EXPECT_NE(row.find(",1.23457,"), std::string::npos) << row;
  const auto r = parse_csv(csv_text(std::vector<RunMetrics>{m}))[0];
  EXPECT_NEAR(r.mcups, static_cast<double>(m.cellupdates) / m.wall_s / 1e6, 1e-5 * r.mcups);
  EXPECT_EQ(format_float(0.1 + 0.2), "0.3");
}

TEST(Csv, EnergyEmptyWithoutModelAndErrorsQuoted) {
  auto m = sample_row();
  m.error = "rank 1: bad, \"odd\" state\nsecond line";
  const auto row = csv_row(m);
  const auto r = parse_csv(csv_text(std::vector<RunMetrics>{m}))[0];
  EXPECT_FALSE(r.energy_j.has_value());
  EXPECT_EQ(r.error, m.error);
  EXPECT_TRUE(r.state_hash.empty());
}

TEST(Csv, RejectsForeignHeaderAndBadRows) {
  EXPECT_THROW(parse_csv("run_id,ranks\n"), IoError);
  EXPECT_THROW(parse_csv(""), IoError);
  EXPECT_THROW(parse_csv(std::string(kCsvHeader) + "\nonly,three,fields\n"), IoError);
  auto text = csv_text(std::vector<RunMetrics>{sample_row()});
  text.replace(text.find(",2,4,"), 5, ",x,4,");
  EXPECT_THROW(parse_csv(text), IoError);
}

TEST(Csv, FileWriteAndRead) {
  const auto path = temp_file("rows.csv");
  const std::vector<RunMetrics> rows{sample_row(), sample_row()};
  write_csv(path.string(), rows);
  EXPECT_EQ(read_csv(path.string()).size(), 2u);
  fs::remove(path);
  EXPECT_THROW(write_csv("/nonexistent-dir/x.csv", rows), IoError);
  EXPECT_THROW(read_csv("/nonexistent-dir/x.csv"), IoError);
}

TEST(Csv, SplitHandlesQuotes) {
  EXPECT_EQ(split_csv_line("a,\"b,c\",\"d\"\"e\","), (std::vector<std::string>{"a", "b,c", "d\"e", ""}));
  EXPECT_EQ(csv_escape("plain"), "plain");
  EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
}

TEST(Config, DefaultsForRun) {
  const auto c = parse_config(std::vector<std::string>{"run"});
  EXPECT_EQ(c.command, Command::run);
  EXPECT_EQ(c.run.grid.nx, 64);
  EXPECT_EQ(c.run.grid.nz, 64);
  EXPECT_EQ(c.run.grid.block, 16);
  EXPECT_FALSE(c.run.system.is_euler());
  EXPECT_EQ(c.run.ranks, 1);
  EXPECT_EQ(c.run.threads, 1);
  EXPECT_EQ(c.run.strategy, ExchangeStrategy::fused);
  EXPECT_EQ(c.run.scheduling, Scheduling::static_blocked());
  EXPECT_FALSE(c.run.energy.has_value());
  EXPECT_EQ(parse_config(std::vector<std::string>{}).command, Command::run);
}

TEST(Config, FlagsAreEchoed) {
  const auto c = parse_config(std::vector<std::string>{"run", "--ranks", "2", "--threads", "4", "--strategy",
                                                       "split-overlap", "--scheduling", "dynamic:2"});
  const auto e = c.run.echo();
  EXPECT_EQ(e.ranks, 2);
  EXPECT_EQ(e.threads, 4);
  EXPECT_EQ(e.strategy, "split-overlap");
  EXPECT_EQ(e.scheduling, "dynamic:2");
}

TEST(Config, ValidationNamesTheProblem) {
  try {
    parse_config(std::vector<std::string>{"run", "--block", "15", "--nx", "64"});
    FAIL() << "expected UsageError";
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("not divisible by block"), std::string::npos) << e.what();
  }
  const std::vector<std::pair<std::vector<std::string>, std::string>> bad{
      {{"run", "--strategy", "async"}, "--strategy"},
      {{"run", "--ranks", "abc"}, "--ranks"},
      {{"run", "--scheduling", "guided"}, "--scheduling"},
      {{"run", "--system", "mhd"}, "--system"},
      {{"run", "--velocity", "1,2"}, "--velocity"},
      {{"run", "--bogus"}, "--bogus"},
      {{"run", "--reps", "3"}, "--reps"},
      {{"run", "--strategy", "fused,split-overlap"}, "--strategy"},
      {{"sweep", "--template", "galactic"}, "--template"},
      {{"run", "--kernel", "sse9"}, "--kernel"},
  };
  for (const auto& [args, flag] : bad) {
    try {
      parse_config(args);
      ADD_FAILURE() << "accepted " << flag;
    } catch (const UsageError& e) {
      EXPECT_NE(std::string(e.what()).find(flag), std::string::npos) << e.what();
    }
  }
}

TEST(Config, EulerAndEnergyOptions) {
  const auto c = parse_config(std::vector<std::string>{"run", "--system", "euler", "--gamma", "1.6666666666666667",
                                                       "--power-w", "300", "--nx", "32", "--block", "8"});
  EXPECT_TRUE(c.run.system.is_euler());
  EXPECT_EQ(c.run.system.nvar(), 5);
  ASSERT_TRUE(c.run.energy.has_value());
  EXPECT_EQ(c.run.energy->node_power_w, 300.0);
  EXPECT_EQ(c.run.energy->carbon_g_per_kwh, 275.0);
  EXPECT_EQ(c.run.grid.ny, 32);
  EXPECT_EQ(c.run.grid.block, 8);
}

TEST(Config, SpecFilePrecedence) {
  const auto path = temp_file("spec.ini");
  {
    std::ofstream f(path);
    f << "# sweep spec\nranks=2\nthreads=2\nsteps=7\nstrategy=split-overlap\n";
  }
  const auto c = parse_config(std::vector<std::string>{"run", "--spec", path.string(), "--threads", "3"});
  EXPECT_EQ(c.run.ranks, 2);
  EXPECT_EQ(c.run.threads, 3);
  EXPECT_EQ(c.run.steps, 7);
  EXPECT_EQ(c.run.strategy, ExchangeStrategy::split_overlap);
  EXPECT_EQ(c.spec_file, path.string());
  {
    std::ofstream f(path);
    f << "ranks=2\ncolour=blue\n";
  }
  EXPECT_THROW(parse_config(std::vector<std::string>{"run", "--spec", path.string()}), UsageError);
  fs::remove(path);
}

TEST(Config, SweepResolution) {
  const auto c = parse_config(std::vector<std::string>{"sweep", "--template", "overlap", "--reps", "2", "--nx", "32"});
  EXPECT_EQ(c.command, Command::sweep);
  EXPECT_EQ(c.sweep.name, "overlap");
  EXPECT_EQ(c.sweep.repetitions, 2);
  EXPECT_EQ(c.sweep.base.grid.nx, 32);
  EXPECT_EQ(c.sweep.strategies.size(), 2u);
  EXPECT_EQ(c.sweep.paths.size(), 2u);
  EXPECT_EQ(c.output, "sweep.csv");
  const auto d = parse_config(std::vector<std::string>{"sweep", "--configs", "1x1,2x4", "--strategy",
                                                       "fused,split-overlap", "--scaling", "weak", "-o", "w.csv"});
  EXPECT_EQ(d.sweep.configs, (std::vector<std::pair<int, int>>{{1, 1}, {2, 4}}));
  EXPECT_EQ(d.sweep.strategies.size(), 2u);
  EXPECT_EQ(d.sweep.scaling, ScalingMode::weak);
  EXPECT_EQ(d.output, "w.csv");
  EXPECT_THROW(parse_config(std::vector<std::string>{"sweep", "--configs", "2y4"}), UsageError);
}

TEST(Config, ValidateAndHelp) {
  const auto v = parse_config(std::vector<std::string>{"validate", "--fault", "skip-exchange"});
  EXPECT_EQ(v.command, Command::validate);
  EXPECT_TRUE(v.fault_skip_exchange);
  const auto h = parse_config(std::vector<std::string>{"--help"});
  EXPECT_TRUE(h.help);
  EXPECT_NE(h.help_text.find("--ranks"), std::string::npos);
}
