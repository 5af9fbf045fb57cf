#include "halolab/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <thread>

#include "halolab/error.hpp"
#include "halolab/hash.hpp"

namespace halolab {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string system_string(const PhysicsSystem& sys) {
  if (sys.is_euler()) return "euler(" + fmt17(std::get<Euler>(sys.kind()).gamma) + ")";
  const auto& v = std::get<Advection>(sys.kind()).velocity;
  return "advection(" + fmt17(v[0]) + "," + fmt17(v[1]) + "," + fmt17(v[2]) + ")";
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct RankResult {
  PhaseTimes times;
  std::int64_t updates = 0;
  int steps = 0;
  double time = 0.0;
  std::uint64_t mem_bytes = 0;
};

RankResult rank_main(RankContext& ctx, const RunConfig& cfg, const Decomposition& decomp, const Scheme& scheme,
                     std::vector<double>& field) {
  RankResult out;
  PhaseTimes& times = out.times;
  const int nvar = cfg.system.nvar();
  const BlockShape shape{nvar, cfg.grid.block, cfg.grid.nghost};

  std::vector<Block> blocks;
  std::vector<StageWorkspace> ws;
  HaloPlan plan;
  {
    ScopedPhase phase(times, Phase::serial_other);
    const auto mine = decomp.blocks_of(ctx.rank());
    blocks.reserve(mine.size());
    ws.reserve(mine.size());
    for (const BlockId& id : mine) {
      blocks.emplace_back(id, ctx.rank(), shape);
      fill_initial(cfg, blocks.back());
      ws.emplace_back(shape);
    }
    plan = build_plan(decomp, ctx.rank(), nvar);
    const std::size_t msg_bytes = plan.message_values() * sizeof(double);
    const std::size_t copies = cfg.path == IntranodePath::copy_through ? 2 : 1;
    out.mem_bytes = blocks.size() * shape.size() * sizeof(double);
    for (const auto& w : ws) out.mem_bytes += w.bytes();
    out.mem_bytes += (plan.remote_sends.size() * copies + plan.remote_recvs.size()) * msg_bytes;
  }

  const ImbalanceProfile profile = cfg.imbalance.value_or(ImbalanceProfile{});
  const ExchangeCallback exchange_cb = [&](int) {
    exchange(cfg.strategy, ctx, plan, blocks, times, cfg.scheduling);
  };
  const BlockLoop loop = [&](std::size_t n, const std::function<void(std::size_t)>& body) {
    ScopedPhase phase(times, Phase::compute);
    ctx.pool().parallel_for(n, cfg.scheduling, [&](std::size_t i) {
      apply_imbalance(profile, blocks[i].id(), [&](int repeats) {
        ws[i].flux_repeats = repeats;
        body(i);
      })();
    });
  };

  double t = 0.0;
  for (int step = 0;; ++step) {
    bool last = false;
    double dt = 0.0;
    {
      ScopedPhase phase(times, Phase::serial_other);
      if (cfg.end_time) {
        if (!(t < *cfg.end_time)) break;
      } else if (step >= cfg.steps) {
        break;
      }
      dt = allreduce_min(ctx, compute_dt(blocks, scheme));
      if (cfg.end_time && dt >= *cfg.end_time - t) {
        dt = *cfg.end_time - t;
        last = true;
      }
    }
    out.updates += rk2_step(blocks, ws, dt, scheme, exchange_cb, loop);
    t = last ? *cfg.end_time : t + dt;
    ++out.steps;
  }
  out.time = t;

  ScopedPhase phase(times, Phase::serial_other);
  const std::size_t nx = static_cast<std::size_t>(cfg.grid.nx);
  const std::size_t ny = static_cast<std::size_t>(cfg.grid.ny);
  const std::size_t nz = static_cast<std::size_t>(cfg.grid.nz);
  const int b = cfg.grid.block;
  for (const Block& blk : blocks) {
    const auto& c = blk.id().coord;
    for (int v = 0; v < nvar; ++v)
      for (int kk = 0; kk < b; ++kk)
        for (int jj = 0; jj < b; ++jj)
          for (int ii = 0; ii < b; ++ii) {
            const std::size_t gx = static_cast<std::size_t>(c.i * b + ii);
            const std::size_t gy = static_cast<std::size_t>(c.j * b + jj);
            const std::size_t gz = static_cast<std::size_t>(c.k * b + kk);
            field[((static_cast<std::size_t>(v) * nz + gz) * ny + gy) * nx + gx] = blk.interior(v, ii, jj, kk);
          }
  }
  return out;
}

}  // namespace

std::string to_string(InitialCondition ic) { return ic == InitialCondition::smooth ? "smooth" : "sod-x"; }

InitialCondition parse_initial_condition(const std::string& text) {
  if (text == "smooth") return InitialCondition::smooth;
  if (text == "sod-x" || text == "sod_x" || text == "sod") return InitialCondition::sod_x;
  throw ConfigError("unknown initial condition '" + text + "' (expected smooth or sod-x)");
}

int ImbalanceProfile::multiplier(std::uint64_t morton) const {
  if (max_multiplier <= 1) return 1;
  const std::uint64_t h = splitmix64(seed ^ splitmix64(morton));
  return 1 + static_cast<int>(h % static_cast<std::uint64_t>(max_multiplier));
}

std::function<void()> apply_imbalance(const ImbalanceProfile& profile, const BlockId& block, ComputeTask base) {
  const int m = profile.multiplier(block.morton);
  return [m, base = std::move(base)] { base(m); };
}

void RunConfig::validate() const {
  grid.validate();
  solver.validate();
  if (ranks < 1) throw ConfigError("ranks must be at least 1");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (ranks > grid.total_blocks())
    throw ConfigError("ranks (" + std::to_string(ranks) + ") exceed the number of blocks (" +
                      std::to_string(grid.total_blocks()) + ")");
  if (steps < 0) throw ConfigError("steps must be non-negative");
  if (end_time && !(*end_time >= 0.0)) throw ConfigError("end time must be non-negative");
  if (imbalance && imbalance->max_multiplier < 1) throw ConfigError("imbalance multiplier must be >= 1");
  if (energy) energy->validate();
  if (init == InitialCondition::sod_x && !system.is_euler())
    throw ConfigError("the sod-x initial condition requires the euler system");
}

ConfigEcho RunConfig::echo() const {
  ConfigEcho e;
  e.ranks = ranks;
  e.threads = threads;
  e.strategy = to_string(strategy);
  e.scheduling = to_string(scheduling);
  e.path = to_string(path);
  e.system = system.is_euler() ? "euler" : "advection";
  e.nx = grid.nx;
  e.ny = grid.ny;
  e.nz = grid.nz;
  e.block = grid.block;
  e.steps = steps;
  return e;
}

std::string RunConfig::canonical() const {
  std::ostringstream s;
  s << "nx=" << grid.nx << ";ny=" << grid.ny << ";nz=" << grid.nz << ";block=" << grid.block
    << ";extent=" << fmt17(grid.extent[0]) << "," << fmt17(grid.extent[1]) << "," << fmt17(grid.extent[2])
    << ";system=" << system_string(system)
    << ";recon=" << (solver.reconstruction == Reconstruction::first_order ? "first-order" : "plm-minmod")
    << ";cfl=" << fmt17(solver.cfl) << ";dt_max=" << fmt17(solver.dt_max) << ";init=" << to_string(init)
    << ";ranks=" << ranks << ";threads=" << threads << ";strategy=" << to_string(strategy)
    << ";scheduling=" << to_string(scheduling) << ";path=" << to_string(path) << ";steps=" << steps
    << ";end_time=" << (end_time ? fmt17(*end_time) : "none");
  if (imbalance) s << ";imbalance=" << imbalance->seed << ":" << imbalance->max_multiplier;
  return s.str();
}

State initial_state(const RunConfig& cfg, double x, double y, double z) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  State u{};
  if (!cfg.system.is_euler()) {
    u[0] = 1.0 + 0.5 * std::sin(two_pi * x) * std::sin(two_pi * y) * std::sin(two_pi * z);
    return u;
  }
  const double gamma = std::get<Euler>(cfg.system.kind()).gamma;
  if (cfg.init == InitialCondition::sod_x) {
    const double len = cfg.grid.extent[0];
    const bool high = x < 0.25 * len || x >= 0.75 * len;
    return high ? euler_conserved(1.0, {0.0, 0.0, 0.0}, 1.0, gamma)
                : euler_conserved(0.125, {0.0, 0.0, 0.0}, 0.1, gamma);
  }
  const double rho = 1.0 + 0.2 * std::sin(two_pi * x) * std::sin(two_pi * y) * std::sin(two_pi * z);
  return euler_conserved(rho, {1.0, 0.5, 0.25}, 1.0, gamma);
}

void fill_initial(const RunConfig& cfg, Block& block) {
  const auto h = cfg.grid.spacing();
  const int b = cfg.grid.block;
  const auto& c = block.id().coord;
  const int nvar = block.shape().nvar;
  for (int kk = 0; kk < b; ++kk)
    for (int jj = 0; jj < b; ++jj)
      for (int ii = 0; ii < b; ++ii) {
        const double x = (c.i * b + ii + 0.5) * h[0];
        const double y = (c.j * b + jj + 0.5) * h[1];
        const double z = (c.k * b + kk + 0.5) * h[2];
        const State u = initial_state(cfg, x, y, z);
        for (int v = 0; v < nvar; ++v) block.interior(v, ii, jj, kk) = u[v];
      }
}

std::string run_id(const RunConfig& config, int rep) {
  Fnv1a h;
  h.update(config.canonical());
  h.update(";rep=" + std::to_string(rep));
  return hex64(h.digest());
}

RunOutput run_detailed(const RunConfig& cfg, int rep) {
  cfg.validate();
  const Decomposition decomp(cfg.grid, cfg.ranks);
  const Scheme scheme{cfg.system, cfg.solver, cfg.grid.spacing()};
  const int nvar = cfg.system.nvar();

  RunOutput out;
  out.field.assign(static_cast<std::size_t>(nvar) * static_cast<std::size_t>(cfg.grid.interior_cells()), 0.0);
  RuntimeOptions options;
  options.path = cfg.path;
  options.watchdog = cfg.watchdog;

  const auto start = std::chrono::steady_clock::now();
  std::vector<RankResult> results;
  try {
    results = spawn_ranks(cfg.ranks, cfg.threads, options,
                          [&](RankContext& ctx) { return rank_main(ctx, cfg, decomp, scheme, out.field); });
  } catch (const RankFailure& e) {
    throw RankFailure(describe(cfg.echo()) + ": " + e.what(), e.rank(), e.cause());
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  RunMetrics& m = out.metrics;
  m.config = cfg.echo();
  m.rep = rep;
  m.run_id = run_id(cfg, rep);
  m.wall_s = wall;
  for (const auto& r : results) {
    m.cellupdates += r.updates;
    m.phase += r.times;
    m.mem_bytes += r.mem_bytes;
  }
  for (auto& s : m.phase.seconds) s /= static_cast<double>(results.size());
  m.state_hash = hash_values(out.field);
  if (cfg.energy) m.energy_j = energy_to_solution(*cfg.energy, wall);
  out.time = results.front().time;
  out.steps_taken = results.front().steps;
  m.config.steps = out.steps_taken;
  return out;
}

RunMetrics run_once(const RunConfig& config, int rep) { return run_detailed(config, rep).metrics; }

void SweepSpec::validate() const {
  if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (scaling == ScalingMode::weak && cells_per_core < 1) throw ConfigError("cells per core must be positive");
  for (const auto& [r, t] : configs)
    if (r < 1 || t < 1) throw ConfigError("sweep configs need ranks >= 1 and threads >= 1");
  if (strategies.empty() || schedulings.empty() || paths.empty())
    throw ConfigError("sweep needs at least one strategy, scheduling and path");
}

GridConfig weak_scaling_grid(std::int64_t cells_per_core, int cores, int block) {
  if (cells_per_core < 1 || cores < 1 || block < 1) throw ConfigError("weak scaling inputs must be positive");
  const std::int64_t cells = cells_per_core * cores;
  auto edge = static_cast<std::int64_t>(std::llround(std::cbrt(static_cast<double>(cells))));
  if (edge * edge * edge < cells) ++edge;
  const std::int64_t rounded = (edge + block - 1) / block * block;
  return GridConfig::cube(static_cast<int>(rounded), block);
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

SweepResult run_sweep(const SweepSpec& spec, const SweepProgress& progress) {
  spec.validate();
  SweepResult result;
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());

  struct SeriesBase {
    std::string key;
    double wall = 0.0;
    int cores = 0;
  };
  std::vector<SeriesBase> baselines;

  for (const auto& [ranks, threads] : spec.configs) {
    if (static_cast<unsigned>(ranks * threads) > hw)
      result.warnings.push_back("config " + std::to_string(ranks) + "x" + std::to_string(threads) + " uses " +
                                std::to_string(ranks * threads) + " threads but only " + std::to_string(hw) +
                                " hardware threads are available");
    for (auto strategy : spec.strategies)
      for (const auto& sched : spec.schedulings)
        for (auto path : spec.paths) {
          RunConfig cfg = spec.base;
          cfg.ranks = ranks;
          cfg.threads = threads;
          cfg.strategy = strategy;
          cfg.scheduling = sched;
          cfg.path = path;
          std::optional<double> per_core;
          if (spec.scaling == ScalingMode::weak) {
            cfg.grid = weak_scaling_grid(spec.cells_per_core, ranks * threads, spec.base.grid.block);
            per_core = static_cast<double>(cfg.grid.interior_cells()) / (ranks * threads);
          }

          ConfigSummary summary;
          summary.config = cfg.echo();
          summary.cells_per_core = per_core;
          std::vector<double> walls;
          for (int rep = 0; rep < spec.repetitions; ++rep) {
            RunMetrics row;
            try {
              row = run_once(cfg, rep);
            } catch (const std::exception& e) {
              row.config = cfg.echo();
              row.rep = rep;
              row.run_id = run_id(cfg, rep);
              row.error = e.what();
            }
            row.cells_per_core = per_core;
            if (row.error.empty())
              walls.push_back(row.wall_s);
            else if (summary.error.empty())
              summary.error = row.error;
            if (progress) progress(row);
            result.rows.push_back(std::move(row));
          }
          summary.runs = static_cast<int>(walls.size());
          if (!walls.empty()) {
            summary.median_wall_s = median(walls);
            summary.min_wall_s = *std::min_element(walls.begin(), walls.end());
            summary.max_wall_s = *std::max_element(walls.begin(), walls.end());
            const std::string key = to_string(strategy) + "|" + to_string(sched) + "|" + to_string(path);
            auto it = std::find_if(baselines.begin(), baselines.end(), [&](const auto& b) { return b.key == key; });
            if (it == baselines.end()) {
              baselines.push_back({key, summary.median_wall_s, ranks * threads});
              it = baselines.end() - 1;
            }
            if (summary.median_wall_s > 0.0) {
              const ScalingFigures f =
                  spec.scaling == ScalingMode::strong
                      ? speedup_efficiency(it->wall, it->cores, summary.median_wall_s, ranks * threads)
                      : speedup_efficiency(it->wall, 1.0, summary.median_wall_s, 1.0);
              summary.speedup = f.speedup;
              summary.efficiency = f.efficiency;
            }
          }
          result.summary.push_back(std::move(summary));
        }
  }
  return result;
}

SweepSpec sweep_template(const std::string& name) {
  SweepSpec s;
  s.name = name;
  s.base.steps = 10;
  if (name == "strong") {
    s.configs = {{1, 1}, {1, 2}, {1, 4}, {1, 8}};
  } else if (name == "weak") {
    s.scaling = ScalingMode::weak;
    s.configs = {{1, 1}, {2, 1}, {4, 1}, {8, 1}};
  } else if (name == "hybrid-node") {
    s.configs = {{8, 1}, {4, 2}, {2, 4}, {1, 8}};
    s.strategies = {ExchangeStrategy::fused, ExchangeStrategy::split_overlap};
    s.schedulings = {Scheduling::dynamic(1)};
  } else if (name == "overlap") {
    s.configs = {{2, 4}};
    s.strategies = {ExchangeStrategy::fused, ExchangeStrategy::split_overlap};
    s.paths = {IntranodePath::shared_handoff, IntranodePath::copy_through};
  } else if (name == "imbalance") {
    s.base.grid = GridConfig::cube(32, 16);
    s.base.imbalance = ImbalanceProfile{1, 8};
    s.configs = {{1, 4}};
    s.schedulings = {Scheduling::static_blocked(), Scheduling::dynamic(1)};
  } else {
    throw ConfigError("unknown sweep template '" + name + "'");
  }
  return s;
}

std::vector<std::string> sweep_template_names() { return {"strong", "weak", "hybrid-node", "overlap", "imbalance"}; }

std::string sweep_manifest(const SweepSpec& spec) {
  std::ostringstream s;
  s << "name=" << spec.name << "\n";
  s << "scaling=" << (spec.scaling == ScalingMode::strong ? "strong" : "weak") << "\n";
  if (spec.scaling == ScalingMode::weak) s << "cells-per-core=" << spec.cells_per_core << "\n";
  s << "configs=";
  for (std::size_t i = 0; i < spec.configs.size(); ++i)
    s << (i ? "," : "") << spec.configs[i].first << "x" << spec.configs[i].second;
  s << "\nstrategies=";
  for (std::size_t i = 0; i < spec.strategies.size(); ++i) s << (i ? "," : "") << to_string(spec.strategies[i]);
  s << "\nschedulings=";
  for (std::size_t i = 0; i < spec.schedulings.size(); ++i) s << (i ? "," : "") << to_string(spec.schedulings[i]);
  s << "\npaths=";
  for (std::size_t i = 0; i < spec.paths.size(); ++i) s << (i ? "," : "") << to_string(spec.paths[i]);
  s << "\nreps=" << spec.repetitions << "\n";
  s << "base=" << spec.base.canonical() << "\n";
  if (spec.base.energy)
    s << "power-w=" << fmt17(spec.base.energy->node_power_w) << "\nnodes=" << spec.base.energy->nodes
      << "\ncarbon=" << fmt17(spec.base.energy->carbon_g_per_kwh) << "\n";
  return s.str();
}

}  // namespace halolab
