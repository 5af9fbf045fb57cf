#include "halolab/validate.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "halolab/error.hpp"
#include "halolab/hash.hpp"

namespace halolab {

namespace {

template <class F>
CheckResult timed(std::string name, F body) {
  CheckResult r;
  r.name = std::move(name);
  const auto start = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<double> totals(const std::vector<double>& field, int nvar) {
  std::vector<double> t(static_cast<std::size_t>(nvar), 0.0);
  const std::size_t per = field.size() / static_cast<std::size_t>(nvar);
  for (int v = 0; v < nvar; ++v)
    for (std::size_t p = 0; p < per; ++p) t[v] += field[v * per + p];
  return t;
}

}  // namespace

CheckResult check_ghost_correctness(const GhostSweep& sweep) {
  return timed("ghost-correctness", [&](CheckResult& r) {
    std::int64_t cases = 0, checked = 0;
    for (int n : sweep.grids)
      for (int b : sweep.blocks) {
        if (n % b != 0) continue;
        for (int ranks : sweep.ranks) {
          const GridConfig grid = GridConfig::cube(n, b);
          if (ranks > grid.total_blocks()) continue;
          for (auto strategy : {ExchangeStrategy::fused, ExchangeStrategy::split_overlap})
            for (int nvar : sweep.nvars) {
              oracle::GhostRun run;
              run.grid = grid;
              run.ranks = ranks;
              run.threads = 2;
              run.nvar = nvar;
              run.strategy = strategy;
              run.drop_one_transfer = sweep.drop_one_transfer;
              const auto res = oracle::run_ghost_check(run);
              ++cases;
              checked += res.checked;
              if (!res.ok()) {
                r.detail = std::to_string(n) + "^3 B=" + std::to_string(b) + " ranks=" + std::to_string(ranks) +
                           " " + to_string(strategy) + ": " + std::to_string(res.mismatches) + " bad ghosts, " +
                           res.first_mismatch;
                return;
              }
            }
        }
      }
    r.passed = cases > 0;
    r.detail = std::to_string(cases) + " cases, " + std::to_string(checked) + " ghost values";
  });
}

CheckResult check_equivalence(const std::string& name, const EquivalenceSweep& sweep) {
  return timed(name, [&](CheckResult& r) {
    std::uint64_t first = 0;
    int runs = 0;
    for (const auto& [ranks, threads] : sweep.configs)
      for (auto strategy : sweep.strategies)
        for (const auto& sched : sweep.schedulings)
          for (auto path : sweep.paths) {
            RunConfig cfg = sweep.base;
            cfg.ranks = ranks;
            cfg.threads = threads;
            cfg.strategy = strategy;
            cfg.scheduling = sched;
            cfg.path = path;
            const auto m = run_once(cfg);
            if (runs++ == 0) {
              first = m.state_hash;
            } else if (m.state_hash != first) {
              r.detail = describe(m.config) + ": hash " + hex64(m.state_hash) + " != " + hex64(first);
              return;
            }
          }
    r.passed = runs > 0;
    r.detail = std::to_string(runs) + " configs, hash " + hex64(first);
  });
}

CheckResult check_serial_reference(const std::string& name, const RunConfig& config, double tolerance) {
  return timed(name, [&](CheckResult& r) {
    const auto par = run_detailed(config);
    const auto ref = oracle::serial_reference(config);
    double worst = 0.0;
    for (std::size_t p = 0; p < ref.field.size(); ++p)
      worst = std::max(worst, std::abs(par.field[p] - ref.field[p]) / std::max(1.0, std::abs(ref.field[p])));
    r.passed = worst <= tolerance && par.steps_taken == ref.steps;
    r.detail = "max rel diff " + fmt("%.3g", worst) + " over " + std::to_string(ref.steps) + " steps";
  });
}

double conservation_drift_per_step(const RunConfig& config) {
  RunConfig start = config;
  start.steps = 0;
  start.end_time.reset();
  const int nvar = config.system.nvar();
  const auto before = totals(run_detailed(start).field, nvar);
  const auto out = run_detailed(config);
  const auto after = totals(out.field, nvar);
  double worst = 0.0;
  for (int v = 0; v < nvar; ++v) {
    const double scale = std::max(std::abs(before[v]), 1e-300);
    worst = std::max(worst, std::abs(after[v] - before[v]) / scale);
  }
  return out.steps_taken > 0 ? worst / out.steps_taken : worst;
}

CheckResult check_conservation(const RunConfig& config, double tolerance) {
  return timed("conservation (" + std::string(config.system.is_euler() ? "euler" : "advection") + ")",
               [&](CheckResult& r) {
                 const double d = conservation_drift_per_step(config);
                 r.passed = d <= tolerance;
                 r.detail = "relative drift per step " + fmt("%.3g", d);
               });
}

double advection_l1_error(int n, bool thin, int ranks, int threads) {
  RunConfig cfg;
  const int b = thin ? 8 : (n % 16 == 0 ? 16 : 8);
  cfg.grid = GridConfig::cube(n, b);
  if (thin) {
    cfg.grid.ny = b;
    cfg.grid.nz = b;
  }
  cfg.system = PhysicsSystem::advection({1.0, 0.0, 0.0});
  cfg.end_time = 1.0;
  cfg.ranks = ranks;
  cfg.threads = threads;
  cfg.scheduling = Scheduling::dynamic(1);
  const auto out = run_detailed(cfg);
  const auto h = cfg.grid.spacing();
  double err = 0.0;
  std::size_t p = 0;
  for (int k = 0; k < cfg.grid.nz; ++k)
    for (int j = 0; j < cfg.grid.ny; ++j)
      for (int i = 0; i < cfg.grid.nx; ++i, ++p)
        err += std::abs(out.field[p] - initial_state(cfg, (i + 0.5) * h[0], (j + 0.5) * h[1], (k + 0.5) * h[2])[0]);
  return err / static_cast<double>(p);
}

CheckResult check_convergence(int coarse, int fine, bool thin, double min_order) {
  return timed("convergence order " + std::to_string(coarse) + "->" + std::to_string(fine), [&](CheckResult& r) {
    const double ec = advection_l1_error(coarse, thin, 2, 2);
    const double ef = advection_l1_error(fine, thin, 2, 2);
    const double order = std::log(ec / ef) / std::log(static_cast<double>(fine) / coarse);
    r.passed = order >= min_order;
    r.detail = "L1 " + fmt("%.3e", ec) + " -> " + fmt("%.3e", ef) + ", order " + fmt("%.3f", order);
  });
}

double sod_l1_error(int cells, double t, int ranks, int threads) {
  RunConfig cfg;
  const int b = 8;
  cfg.grid = GridConfig::cube(2 * cells, b);
  cfg.grid.ny = b;
  cfg.grid.nz = b;
  const double dx = 1.0 / cells;
  cfg.grid.extent = {2.0, b * dx, b * dx};
  cfg.system = PhysicsSystem::euler(1.4);
  cfg.init = InitialCondition::sod_x;
  cfg.end_time = t;
  cfg.ranks = ranks;
  cfg.threads = threads;
  const auto out = run_detailed(cfg);
  const oracle::ExactRiemann rs({1.0, 0.0, 1.0}, {0.125, 0.0, 0.1}, 1.4);
  const std::size_t nx = static_cast<std::size_t>(cfg.grid.nx);
  const std::size_t ny = static_cast<std::size_t>(cfg.grid.ny);
  const std::size_t nz = static_cast<std::size_t>(cfg.grid.nz);
  double err = 0.0;
  for (std::size_t k = 0; k < nz; ++k)
    for (std::size_t j = 0; j < ny; ++j)
      for (int i = 0; i < cells; ++i) {
        const double exact = oracle::exact_density_average(rs, 0.5, t, i * dx, (i + 1) * dx);
        err += std::abs(out.field[(k * ny + j) * nx + static_cast<std::size_t>(i)] - exact) * dx;
      }
  return err / static_cast<double>(ny * nz);
}

CheckResult check_sod(int cells, double max_l1) {
  return timed("sod shock tube", [&](CheckResult& r) {
    const double e = sod_l1_error(cells, 0.2, 2, 2);
    r.passed = e <= max_l1;
    r.detail = "L1(rho) " + fmt("%.4f", e) + " at " + std::to_string(cells) + " cells, t=0.2";
  });
}

CheckResult check_energy_arithmetic() {
  return timed("energy arithmetic", [&](CheckResult& r) {
    const auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    const double updates = static_cast<double>(cellupdates(6'000'000, 2'000'000, 2));
    const double kwh = energy_from_rate(updates, 1.6e-5);
    const double grams = co2_equivalent(kwh, 275.0);
    const double e6 = epc6(307.4e3, 5.3e9);
    const bool ok = rel(updates, 24e12) <= 1e-9 && rel(kwh, 384.0) <= 1e-9 && rel(grams, 105600.0) <= 1e-9 &&
                    rel(e6, 58.0) <= 1e-9;
    r.passed = ok;
    r.detail = fmt("%.6g updates, ", updates) + fmt("%.6g kWh, ", kwh) + fmt("%.6g g CO2e, ", grams) +
               fmt("Epc6 %.6g", e6);
  });
}

std::vector<CheckResult> run_validation(const ValidateOptions& options) {
  std::vector<CheckResult> out;
  GhostSweep ghosts;
  ghosts.drop_one_transfer = options.fault_skip_exchange;
  out.push_back(check_ghost_correctness(ghosts));

  EquivalenceSweep adv;
  adv.base.grid = GridConfig::cube(16, 8);
  adv.base.steps = 5;
  adv.configs = {{1, 1}, {2, 2}, {4, 2}, {1, 4}};
  out.push_back(check_equivalence("strategy/decomposition invariance (advection)", adv));

  EquivalenceSweep eul = adv;
  eul.base.system = PhysicsSystem::euler(1.4);
  eul.paths = {IntranodePath::shared_handoff};
  out.push_back(check_equivalence("strategy/decomposition invariance (euler)", eul));

  RunConfig ref = adv.base;
  ref.ranks = 2;
  ref.threads = 2;
  out.push_back(check_serial_reference("serial reference (advection)", ref));
  ref.system = PhysicsSystem::euler(1.4);
  out.push_back(check_serial_reference("serial reference (euler)", ref));

  out.push_back(check_conservation(adv.base));
  out.push_back(check_conservation(eul.base));
  out.push_back(check_convergence(128, 256, true));
  out.push_back(check_sod(64));
  out.push_back(check_energy_arithmetic());
  return out;
}

std::string format_results(const std::vector<CheckResult>& results) {
  std::size_t width = 5;
  for (const auto& r : results) width = std::max(width, r.name.size());
  std::ostringstream s;
  int failed = 0;
  for (const auto& r : results) {
    char head[256];
    std::snprintf(head, sizeof head, "%-4s  %-*s  %7.2fs  ", r.passed ? "PASS" : "FAIL", static_cast<int>(width),
                  r.name.c_str(), r.seconds);
    s << head << r.detail << "\n";
    failed += r.passed ? 0 : 1;
  }
  s << (failed == 0 ? "all " + std::to_string(results.size()) + " checks passed"
                    : std::to_string(failed) + " of " + std::to_string(results.size()) + " checks failed")
    << "\n";
  return s.str();
}

}  // namespace halolab
