#include <gtest/gtest.h>

#include <thread>

#include "halolab/error.hpp"
#include "halolab/metrics.hpp"

using namespace halolab;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Cellupdates, Examples) {
  EXPECT_EQ(cellupdates(6'000'000, 2'000'000, 2), 24'000'000'000'000LL);
  EXPECT_EQ(cellupdates(64 * 64 * 64, 0), 0);
  EXPECT_EQ(cellupdates(64 * 64 * 64, 50, 2), 26'214'400);
}

TEST(Energy, WorkedExample) {
  const double kwh = energy_from_rate(24e12, 1.6e-5);
  EXPECT_LE(rel(kwh, 384.0), 1e-9);
  EXPECT_LE(rel(co2_equivalent(kwh, 275.0), 105'600.0), 1e-9);
  EXPECT_LE(rel(epc6(307'400.0, 5.3e9), 58.0), 1e-9);
  EXPECT_LE(rel(co2_equivalent(1.6e-5, 275.0), 4.4e-3), 1e-9);
  EXPECT_EQ(co2_equivalent(0.0, 275.0), 0.0);
}

TEST(Energy, ToSolution) {
  EnergyModel m;
  m.node_power_w = 277.0;
  m.nodes = 16;
  EXPECT_NEAR(energy_to_solution(m, 69.7), 308'910.0, 0.01 * 308'910.0);
  EXPECT_NEAR(energy_to_solution(m, 69.7), 307'400.0, 0.01 * 307'400.0);
  EXPECT_EQ(energy_to_solution(m, 0.0), 0.0);
  m.node_power_w = 100.0;
  m.nodes = 1;
  EXPECT_DOUBLE_EQ(energy_to_solution(m, 10.0), 1000.0);
  EXPECT_DOUBLE_EQ(joules_to_kwh(kwh_to_joules(384.0)), 384.0);
}

TEST(Energy, Epc6Examples) {
  EXPECT_DOUBLE_EQ(epc6(58.0, 1e6), 58.0);
  EXPECT_DOUBLE_EQ(epc6(1e6, 1e6), 1e6);
  EXPECT_THROW(epc6(10.0, 0.0), DomainError);
}

TEST(Energy, ModelValidation) {
  EnergyModel m;
  m.node_power_w = -1.0;
  EXPECT_THROW(m.validate(), ConfigError);
  m = EnergyModel{};
  m.nodes = 0;
  EXPECT_THROW(m.validate(), ConfigError);
}

TEST(Scaling, SpeedupEfficiency) {
  auto f = speedup_efficiency(100.0, 1, 14.0, 8);
  EXPECT_NEAR(f.speedup, 7.142857, 1e-6);
  EXPECT_NEAR(f.efficiency, 0.892857, 1e-6);
  f = speedup_efficiency(5.0, 4, 5.0, 4);
  EXPECT_DOUBLE_EQ(f.speedup, 1.0);
  EXPECT_DOUBLE_EQ(f.efficiency, 1.0);
  f = speedup_efficiency(19.0, 160, 1.0, 3200);
  EXPECT_NEAR(f.efficiency, 0.95, 1e-12);
}

TEST(Phases, CommFraction) {
  PhaseTimes t;
  t[Phase::compute] = 9;
  t[Phase::comm_wait] = 1;
  EXPECT_DOUBLE_EQ(comm_fraction(t), 0.1);
  PhaseTimes c;
  c[Phase::compute] = 3;
  EXPECT_EQ(comm_fraction(c), 0.0);
  PhaseTimes m;
  m[Phase::compute] = 6;
  m[Phase::pack] = 1;
  m[Phase::local_copy] = 1;
  m[Phase::comm_wait] = 1;
  m[Phase::unpack] = 1;
  EXPECT_DOUBLE_EQ(comm_fraction(m), 0.4);
  EXPECT_THROW(comm_fraction(PhaseTimes{}), DomainError);
}

TEST(Phases, AccumulateAndClamp) {
  PhaseTimes t;
  t.add(Phase::pack, -1.0);
  EXPECT_EQ(t[Phase::pack], 0.0);
  {
    ScopedPhase s(t, Phase::serial_other);
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  EXPECT_GE(t[Phase::serial_other], 0.004);
  PhaseTimes u;
  u[Phase::compute] = 2.0;
  t += u;
  EXPECT_DOUBLE_EQ(t.total(), 2.0 + t[Phase::serial_other]);
  EXPECT_STREQ(to_string(Phase::comm_wait), "wait");
  EXPECT_STREQ(to_string(Phase::local_copy), "localcopy");
}

TEST(Rates, Mcups) { EXPECT_DOUBLE_EQ(mcups(26'214'400, 2.0), 13.1072); }
