// Acceptance gate: one PASS/FAIL/SKIP line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "halolab/bench.hpp"
#include "halolab/error.hpp"
#include "halolab/hash.hpp"
#include "halolab/runtime.hpp"
#include "halolab/thread_pool.hpp"
#include "halolab/validate.hpp"

using namespace halolab;
using namespace std::chrono_literals;

namespace {

enum class Status { pass, fail, skip };

struct Line {
  Status status = Status::fail;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Line from(const CheckResult& r) { return {r.passed ? Status::pass : Status::fail, r.detail}; }

int failures = 0;

void report(const std::string& name, const std::function<Line()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Line line;
  try {
    line = body();
  } catch (const std::exception& e) {
    line = {Status::fail, std::string("threw: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const char* tag = line.status == Status::pass ? "PASS" : line.status == Status::fail ? "FAIL" : "SKIP";
  if (line.status == Status::fail) ++failures;
  std::printf("%s  %-34s %s (%.1f s)\n", tag, name.c_str(), line.detail.c_str(), secs);
  std::fflush(stdout);
}

// ---- numerics ----

Line convergence() {
  const double e32 = advection_l1_error(32, false);
  const double e64 = advection_l1_error(64, false);
  const double order = std::log2(e32 / e64);
  return {order >= 1.8 ? Status::pass : Status::fail,
          "L1 32^3 " + fmt("%.4g", e32) + ", 64^3 " + fmt("%.4g", e64) + ", order " + fmt("%.3f", order) +
              " (need >= 1.8)"};
}

Line conservation() {
  RunConfig adv;
  adv.grid = GridConfig::cube(32, 8);
  adv.steps = 20;
  adv.ranks = 2;
  adv.threads = 2;
  RunConfig eul = adv;
  eul.system = PhysicsSystem::euler(1.4);
  const double da = conservation_drift_per_step(adv);
  const double de = conservation_drift_per_step(eul);
  const bool ok = da <= 1e-12 && de <= 1e-12;
  return {ok ? Status::pass : Status::fail,
          "drift per step advection " + fmt("%.3g", da) + ", euler " + fmt("%.3g", de) + " (limit 1e-12)"};
}

// ---- timing ----

struct Timing {
  double wall = 0.0;
  double comm_wait = 0.0;
};

Timing median_timing(const RunConfig& cfg, int reps) {
  std::vector<double> wall, wait;
  run_once(cfg);  // warm-up
  for (int r = 0; r < reps; ++r) {
    const auto m = run_once(cfg, r);
    wall.push_back(m.wall_s);
    wait.push_back(m.phase[Phase::comm_wait]);
  }
  return {median(wall), median(wait)};
}

Line overlap() {
  const unsigned hw = std::thread::hardware_concurrency();
  RunConfig base;
  base.grid = GridConfig::cube(64, 16);
  base.ranks = 2;
  base.threads = 4;
  base.steps = 10;
  base.scheduling = Scheduling::dynamic(1);
  std::string detail;
  bool ok = true;
  for (auto path : {IntranodePath::shared_handoff, IntranodePath::copy_through}) {
    base.path = path;
    base.strategy = ExchangeStrategy::fused;
    const auto fused = median_timing(base, 5);
    base.strategy = ExchangeStrategy::split_overlap;
    const auto split = median_timing(base, 5);
    const double gap = 1.0 - split.wall / fused.wall;
    ok = ok && split.comm_wait <= fused.comm_wait && split.wall <= 1.02 * fused.wall;
    if (path == IntranodePath::copy_through) ok = ok && gap >= 0.03;
    detail += to_string(path) + ": wall fused " + fmt("%.4f", fused.wall) + " split " + fmt("%.4f", split.wall) +
              " gap " + fmt("%+.1f%%", 100.0 * gap) + ", wait fused " + fmt("%.4f", fused.comm_wait) + " split " +
              fmt("%.4f", split.comm_wait) + "; ";
  }
  if (hw < 8) return {Status::skip, "needs >= 8 hardware threads, have " + std::to_string(hw) + "; measured " + detail};
  return {ok ? Status::pass : Status::fail, detail};
}

Line dynamic_scheduling() {
  RunConfig cfg = sweep_template("imbalance").base;
  cfg.ranks = 1;
  cfg.threads = 4;
  cfg.scheduling = Scheduling::static_blocked();
  const auto st = median_timing(cfg, 5);
  cfg.scheduling = Scheduling::dynamic(1);
  const auto dy = median_timing(cfg, 5);
  const unsigned hw = std::thread::hardware_concurrency();
  std::string detail = "k=" + std::to_string(cfg.imbalance ? cfg.imbalance->max_multiplier : 1) + ", wall static " +
                       fmt("%.4f", st.wall) + " dynamic " + fmt("%.4f", dy.wall) + " (" +
                       fmt("%+.1f%%", 100.0 * (1.0 - dy.wall / st.wall)) + ")";
  // With fewer cores than workers the wall time is the total work whatever the schedule.
  if (hw < 4) return {Status::skip, "needs >= 4 hardware threads, have " + std::to_string(hw) + "; measured " + detail};
  return {dy.wall < st.wall ? Status::pass : Status::fail, detail};
}

// ---- runtime contract ----

RuntimeOptions quick(IntranodePath path, std::chrono::milliseconds wd = 5000ms) {
  RuntimeOptions o;
  o.path = path;
  o.watchdog = wd;
  return o;
}

std::string ordering() {
  for (auto path : {IntranodePath::shared_handoff, IntranodePath::copy_through}) {
    bool ok = true;
    spawn_ranks(2, 1, quick(path), [&](RankContext& ctx) {
      std::vector<Request> reqs;
      if (ctx.rank() == 0) {
        for (int n = 0; n < 200; ++n) reqs.push_back(isend(ctx, 1, n % 3, Payload{double(n)}));
        wait_all(ctx, reqs);
        return;
      }
      for (int n = 0; n < 200; ++n) reqs.push_back(irecv(ctx, 0, n % 3));
      const auto out = wait_all(ctx, reqs);
      for (int n = 0; n < 200; ++n)
        if (out[n].size() != 1 || out[n][0] != n) ok = false;
    });
    if (!ok) return "ordering broken on " + to_string(path);
  }
  return {};
}

std::string exactly_once() {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    const int nranks = 2 + static_cast<int>(rng() % 4);
    struct Msg {
      int src, dst, tag;
      double id;
    };
    std::vector<Msg> msgs;
    for (int n = 0; n < 400; ++n)
      msgs.push_back({int(rng() % nranks), int(rng() % nranks), int(rng() % 5), double(n)});
    std::mutex mu;
    std::map<double, int> got;
    bool order_ok = true;
    spawn_ranks(nranks, 1, quick(seed % 2 ? IntranodePath::copy_through : IntranodePath::shared_handoff),
                [&](RankContext& ctx) {
                  std::mt19937_64 local(seed * 977 + ctx.rank());
                  std::vector<const Msg*> sends, recvs;
                  for (const auto& m : msgs) {
                    if (m.src == ctx.rank()) sends.push_back(&m);
                    if (m.dst == ctx.rank()) recvs.push_back(&m);
                  }
                  std::vector<Request> reqs;
                  std::vector<const Msg*> expect;
                  std::size_t si = 0, ri = 0;
                  while (si < sends.size() || ri < recvs.size()) {
                    if (ri == recvs.size() || (si < sends.size() && local() % 2 == 0)) {
                      const auto* m = sends[si++];
                      reqs.push_back(isend(ctx, m->dst, m->tag, Payload{m->id}));
                      expect.push_back(nullptr);
                    } else {
                      const auto* m = recvs[ri++];
                      reqs.push_back(irecv(ctx, m->src, m->tag));
                      expect.push_back(m);
                    }
                    if (local() % 8 == 0) std::this_thread::yield();
                  }
                  const auto out = wait_all(ctx, reqs);
                  std::lock_guard lock(mu);
                  for (std::size_t n = 0; n < out.size(); ++n) {
                    if (!expect[n]) continue;
                    if (out[n].size() != 1 || out[n][0] != expect[n]->id) order_ok = false;
                    if (!out[n].empty()) ++got[out[n][0]];
                  }
                });
    if (!order_ok) return "seed " + std::to_string(seed) + ": wrong payload order";
    if (got.size() != msgs.size()) return "seed " + std::to_string(seed) + ": lost messages";
    for (const auto& [id, n] : got)
      if (n != 1) return "seed " + std::to_string(seed) + ": duplicate delivery";
  }
  return {};
}

std::string watchdog() {
  try {
    spawn_ranks(2, 1, quick(IntranodePath::shared_handoff, 200ms), [](RankContext& ctx) {
      std::vector<Request> r;
      if (ctx.rank() == 0)
        r.push_back(irecv(ctx, 1, 5));
      else
        r.push_back(isend(ctx, 0, 6, Payload{1.0}));
      wait_all(ctx, r);
    });
  } catch (const RankFailure& e) {
    try {
      std::rethrow_exception(e.cause());
    } catch (const DeadlockError&) {
      return {};
    } catch (...) {
    }
    return std::string("wrong failure: ") + e.what();
  }
  return "mismatched tag did not time out";
}

std::string allreduce() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1e3, 1e3);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 6;
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    const double want = *std::min_element(v.begin(), v.end());
    const auto got = spawn_ranks(n, 1, quick(IntranodePath::copy_through),
                                 [&](RankContext& ctx) { return allreduce_min(ctx, v[ctx.rank()]); });
    for (double g : got)
      if (g != want) return "allreduce_min returned " + fmt("%.17g", g) + " for " + fmt("%.17g", want);
  }
  return {};
}

std::string thread_invariance() {
  // Pool level: per-index results land in place regardless of worker count.
  std::vector<std::uint64_t> hashes;
  for (int threads : {1, 2, 3, 4, 8}) {
    ThreadPool pool(threads);
    for (auto sched : {Scheduling::static_blocked(), Scheduling::dynamic(1), Scheduling::dynamic(7)}) {
      std::vector<double> out(10007);
      pool.parallel_for(out.size(), sched, [&](std::size_t i) { out[i] = std::sin(0.001 * double(i)) * double(i); });
      hashes.push_back(hash_values(out));
    }
  }
  if (std::adjacent_find(hashes.begin(), hashes.end(), std::not_equal_to<>()) != hashes.end())
    return "parallel_for results depend on thread count";
  // Pipeline level: Euler state hash across thread counts.
  RunConfig cfg;
  cfg.grid = GridConfig::cube(32, 8);
  cfg.system = PhysicsSystem::euler(1.4);
  cfg.steps = 10;
  std::uint64_t first = 0;
  for (int threads : {1, 2, 4, 8}) {
    cfg.threads = threads;
    cfg.scheduling = threads % 2 ? Scheduling::static_blocked() : Scheduling::dynamic(1);
    const auto h = run_once(cfg).state_hash;
    if (threads == 1) first = h;
    if (h != first) return "euler state hash changes at " + std::to_string(threads) + " threads";
  }
  return {};
}

Line runtime_contract() {
  const std::pair<const char*, std::function<std::string()>> parts[] = {
      {"ordering", ordering},   {"exactly-once", exactly_once},          {"watchdog", watchdog},
      {"allreduce", allreduce}, {"thread invariance", thread_invariance},
  };
  std::string detail;
  for (const auto& [name, fn] : parts) {
    const auto err = fn();
    if (!err.empty()) return {Status::fail, std::string(name) + ": " + err};
    detail += std::string(detail.empty() ? "" : ", ") + name;
  }
  return {Status::pass, detail + " ok"};
}

}  // namespace

int main() {
  std::printf("halolab acceptance (%u hardware threads)\n", std::thread::hardware_concurrency());
  report("energy-arithmetic", [] { return from(check_energy_arithmetic()); });
  report("ghost-correctness", [] {
    GhostSweep s;
    s.grids = {32, 48, 64};
    s.blocks = {8, 16};
    s.ranks = {1, 2, 4};
    s.nvars = {1};
    return from(check_ghost_correctness(s));
  });
  report("strategy-equivalence", [] {
    EquivalenceSweep s;
    s.base.grid = GridConfig::cube(32, 8);
    s.base.steps = 20;
    return from(check_equivalence("equivalence", s));
  });
  report("numerics-convergence", convergence);
  report("numerics-conservation", conservation);
  report("numerics-sod", [] { return from(check_sod(64)); });
  report("overlap-benefit", overlap);
  report("dynamic-scheduling-benefit", dynamic_scheduling);
  report("runtime-contract", runtime_contract);
  std::printf("%s\n", failures ? (std::to_string(failures) + " criterion(s) failed").c_str() : "all criteria met");
  return failures ? 1 : 0;
}
