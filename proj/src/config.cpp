#include "halolab/config.hpp"

#include <CLI11.hpp>

#include "halolab/error.hpp"

namespace halolab {

namespace {

template <class T, class F>
std::vector<T> parse_each(const std::vector<std::string>& items, const char* flag, F parse) {
  std::vector<T> out;
  for (const auto& s : items) {
    try {
      out.push_back(parse(s));
    } catch (const Error& e) {
      throw UsageError(std::string(flag) + ": " + e.what());
    }
  }
  return out;
}

template <class T>
T only(const std::vector<T>& v, const char* flag) {
  if (v.size() != 1) throw UsageError(std::string(flag) + ": `run` takes exactly one value");
  return v.front();
}

std::array<double, 3> triple(const std::vector<double>& v, const char* flag) {
  if (v.size() != 3) throw UsageError(std::string(flag) + ": expected three comma-separated numbers");
  return {v[0], v[1], v[2]};
}

}  // namespace

std::vector<std::pair<int, int>> parse_config_list(const std::vector<std::string>& items) {
  std::vector<std::pair<int, int>> out;
  for (const auto& s : items) {
    const auto x = s.find('x');
    int r = 0, t = 0;
    try {
      if (x == std::string::npos) throw std::invalid_argument(s);
      std::size_t used = 0;
      r = std::stoi(s.substr(0, x), &used);
      if (used != x) throw std::invalid_argument(s);
      t = std::stoi(s.substr(x + 1), &used);
      if (used != s.size() - x - 1) throw std::invalid_argument(s);
    } catch (const std::logic_error&) {
      throw UsageError("--configs: '" + s + "' is not of the form RANKSxTHREADS");
    }
    if (r < 1 || t < 1) throw UsageError("--configs: '" + s + "' needs ranks and threads >= 1");
    out.emplace_back(r, t);
  }
  return out;
}

CliConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Hybrid-parallel halo-exchange proxy application", "halolab"};
  app.set_config("--spec", "", "Flat key=value spec file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.fallthrough();
  app.require_subcommand(0, 1);
  auto* run_cmd = app.add_subcommand("run", "Run one configuration and emit a CSV row");
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a scaling sweep (template plus overrides)");
  auto* validate_cmd = app.add_subcommand("validate", "Run the oracle suite and print a pass/fail table");

  int nx = 64, ny = 0, nz = 0, block = 16, steps = 10, ranks = 1, threads = 1;
  std::string system = "advection", recon = "plm", init = "smooth", kernel, tmpl = "strong", scaling = "strong";
  std::vector<double> velocity, extent;
  double gamma = 1.4, cfl = 0.4, dt_max = 1e-2, end_time = 0.0, power_w = 277.0, carbon = 275.0, watchdog = 0.0;
  int nodes = 1, reps = 5, imbalance_k = 1;
  std::int64_t cells_per_core = 65536;
  std::uint64_t imbalance_seed = 0;
  std::vector<std::string> strategy, scheduling, path, configs;
  std::string output, fault;

  auto* o_nx = app.add_option("--nx", nx, "Cells along x (default 64)");
  auto* o_ny = app.add_option("--ny", ny, "Cells along y (default: nx)");
  auto* o_nz = app.add_option("--nz", nz, "Cells along z (default: nx)");
  auto* o_block = app.add_option("--block", block, "Block edge B (default 16)");
  auto* o_extent = app.add_option("--extent", extent, "Domain lengths Lx,Ly,Lz (default 1,1,1)")->delimiter(',');
  auto* o_system = app.add_option("--system", system, "advection | euler");
  auto* o_velocity = app.add_option("--velocity", velocity, "Advection velocity vx,vy,vz")->delimiter(',');
  auto* o_gamma = app.add_option("--gamma", gamma, "Euler ratio of specific heats (default 1.4)");
  auto* o_recon = app.add_option("--recon", recon, "plm | first-order");
  auto* o_init = app.add_option("--init", init, "smooth | sod-x");
  auto* o_cfl = app.add_option("--cfl", cfl, "Courant number (default 0.4)");
  auto* o_dtmax = app.add_option("--dt-max", dt_max, "dt used when all signal speeds vanish");
  auto* o_steps = app.add_option("--steps", steps, "Time steps (default 10)");
  auto* o_end = app.add_option("--end-time", end_time, "Advance to this time instead of a step count");
  auto* o_ranks = app.add_option("--ranks", ranks, "Simulated ranks (default 1)");
  auto* o_threads = app.add_option("--threads", threads, "Threads per rank (default 1)");
  auto* o_strategy =
      app.add_option("--strategy", strategy, "fused | split-overlap (comma list for sweeps)")->delimiter(',');
  auto* o_sched =
      app.add_option("--scheduling", scheduling, "static | dynamic[:chunk] (comma list for sweeps)")->delimiter(',');
  auto* o_path =
      app.add_option("--path", path, "shared-handoff | copy-through (comma list for sweeps)")->delimiter(',');
  auto* o_imb_seed = app.add_option("--imbalance-seed", imbalance_seed, "Seed of the synthetic imbalance profile");
  auto* o_imb_k = app.add_option("--imbalance-k", imbalance_k, "Maximum per-block work multiplier");
  auto* o_power = app.add_option("--power-w", power_w, "Node power in watts; enables energy output");
  auto* o_nodes = app.add_option("--nodes", nodes, "Nodes charged by the energy model");
  auto* o_carbon = app.add_option("--carbon", carbon, "Grid carbon intensity, g CO2e per kWh");
  auto* o_watchdog = app.add_option("--watchdog", watchdog, "Deadlock watchdog in seconds");
  app.add_option("--kernel", kernel, "Face-flux kernel: auto | scalar | avx2");
  app.add_option("--output,-o", output, "CSV output path");
  auto* o_template = app.add_option("--template", tmpl, "Sweep template: strong | weak | hybrid-node | overlap | imbalance");
  auto* o_configs = app.add_option("--configs", configs, "Sweep points RANKSxTHREADS, comma separated")->delimiter(',');
  auto* o_scaling = app.add_option("--scaling", scaling, "strong | weak");
  auto* o_cpc = app.add_option("--cells-per-core", cells_per_core, "Weak-scaling cells per rank*thread");
  auto* o_reps = app.add_option("--reps", reps, "Repetitions per sweep point (default 5)");
  app.add_option("--fault", fault, "Test hook")->group("");

  CliConfig cfg;
  std::vector<const char*> argv{"halolab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    cfg.help = true;
    cfg.help_text = app.help();
    return cfg;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (*sweep_cmd) cfg.command = Command::sweep;
  else if (*validate_cmd) cfg.command = Command::validate;
  else cfg.command = Command::run;
  (void)run_cmd;
  if (const auto* spec = app.get_config_ptr(); spec != nullptr && spec->count() > 0)
    cfg.spec_file = spec->as<std::string>();
  cfg.output = output;

  if (!kernel.empty() && kernel != "auto") {
    cfg.kernel = parse_kernel_isa(kernel);
    if (!cfg.kernel) throw UsageError("--kernel: unknown kernel '" + kernel + "' (expected auto, scalar or avx2)");
    if (!isa_supported(*cfg.kernel)) throw UsageError("--kernel: " + kernel + " is not supported on this CPU");
  }
  if (!fault.empty()) {
    if (fault != "skip-exchange") throw UsageError("--fault: unknown fault '" + fault + "'");
    cfg.fault_skip_exchange = true;
  }

  const auto given = [](const CLI::Option* o) { return o->count() > 0; };

  if (cfg.command == Command::sweep) {
    try {
      cfg.sweep = sweep_template(tmpl);
    } catch (const Error& e) {
      throw UsageError(std::string("--template: ") + e.what());
    }
  } else if (given(o_template)) {
    throw UsageError("--template: only valid with `sweep`");
  }
  RunConfig& rc = cfg.command == Command::sweep ? cfg.sweep.base : cfg.run;

  if (given(o_nx) || given(o_block)) {
    rc.grid.nx = nx;
    rc.grid.block = block;
    if (!given(o_ny)) rc.grid.ny = nx;
    if (!given(o_nz)) rc.grid.nz = nx;
  }
  if (given(o_ny)) rc.grid.ny = ny;
  if (given(o_nz)) rc.grid.nz = nz;
  if (given(o_extent)) rc.grid.extent = triple(extent, "--extent");

  try {
    if (given(o_system) || given(o_gamma) || given(o_velocity)) {
      if (system == "euler") {
        if (given(o_velocity)) throw UsageError("--velocity: only valid with --system advection");
        rc.system = PhysicsSystem::euler(gamma);
      } else if (system == "advection") {
        if (given(o_gamma)) throw UsageError("--gamma: only valid with --system euler");
        rc.system = given(o_velocity) ? PhysicsSystem::advection(triple(velocity, "--velocity"))
                                      : PhysicsSystem::advection({1.0, 0.5, 0.25});
      } else {
        throw UsageError("--system: unknown system '" + system + "' (expected advection or euler)");
      }
    }
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    throw UsageError(std::string("--gamma/--velocity: ") + e.what());
  }
  if (given(o_recon)) {
    if (recon == "plm" || recon == "plm-minmod") rc.solver.reconstruction = Reconstruction::plm_minmod;
    else if (recon == "first-order") rc.solver.reconstruction = Reconstruction::first_order;
    else throw UsageError("--recon: unknown reconstruction '" + recon + "' (expected plm or first-order)");
  }
  if (given(o_init)) {
    try {
      rc.init = parse_initial_condition(init);
    } catch (const Error& e) {
      throw UsageError(std::string("--init: ") + e.what());
    }
  }
  if (given(o_cfl)) rc.solver.cfl = cfl;
  if (given(o_dtmax)) rc.solver.dt_max = dt_max;
  if (given(o_steps)) rc.steps = steps;
  if (given(o_end)) rc.end_time = end_time;
  if (given(o_imb_seed) || given(o_imb_k)) {
    ImbalanceProfile p = rc.imbalance.value_or(ImbalanceProfile{});
    if (given(o_imb_seed)) p.seed = imbalance_seed;
    if (given(o_imb_k)) p.max_multiplier = imbalance_k;
    rc.imbalance = p;
  }
  if (given(o_power) || given(o_nodes) || given(o_carbon)) {
    EnergyModel m = rc.energy.value_or(EnergyModel{});
    if (given(o_power)) m.node_power_w = power_w;
    if (given(o_nodes)) m.nodes = nodes;
    if (given(o_carbon)) m.carbon_g_per_kwh = carbon;
    rc.energy = m;
  }
  if (given(o_watchdog)) {
    if (!(watchdog > 0.0)) throw UsageError("--watchdog: must be positive");
    rc.watchdog = std::chrono::milliseconds(static_cast<std::int64_t>(watchdog * 1000.0));
  }

  const auto strategies = parse_each<ExchangeStrategy>(strategy, "--strategy", parse_exchange_strategy);
  const auto schedulings = parse_each<Scheduling>(scheduling, "--scheduling", parse_scheduling);
  const auto paths = parse_each<IntranodePath>(path, "--path", parse_intranode_path);

  if (cfg.command == Command::sweep) {
    SweepSpec& s = cfg.sweep;
    if (given(o_configs)) s.configs = parse_config_list(configs);
    if (given(o_strategy)) s.strategies = strategies;
    if (given(o_sched)) s.schedulings = schedulings;
    if (given(o_path)) s.paths = paths;
    if (given(o_ranks) || given(o_threads)) {
      if (given(o_configs)) throw UsageError("--ranks/--threads: use either these or --configs in a sweep");
      s.configs = {{ranks, threads}};
    }
    if (given(o_scaling)) {
      if (scaling == "strong") s.scaling = ScalingMode::strong;
      else if (scaling == "weak") s.scaling = ScalingMode::weak;
      else throw UsageError("--scaling: unknown mode '" + scaling + "' (expected strong or weak)");
    }
    if (given(o_cpc)) s.cells_per_core = cells_per_core;
    if (given(o_reps)) s.repetitions = reps;
    if (cfg.output.empty()) cfg.output = "sweep.csv";
    try {
      s.validate();
      // Every point must be runnable; check the first one as a representative.
      RunConfig probe = s.base;
      if (!s.configs.empty()) {
        probe.ranks = s.configs.front().first;
        probe.threads = s.configs.front().second;
      }
      if (s.scaling == ScalingMode::weak)
        probe.grid = weak_scaling_grid(s.cells_per_core, probe.ranks * probe.threads, probe.grid.block);
      probe.validate();
    } catch (const Error& e) {
      throw UsageError(std::string("invalid sweep: ") + e.what());
    }
  } else {
    for (const auto* o : {o_configs, o_scaling, o_cpc, o_reps})
      if (given(o)) throw UsageError(o->get_name() + ": only valid with `sweep`");
    if (given(o_ranks)) rc.ranks = ranks;
    if (given(o_threads)) rc.threads = threads;
    if (given(o_strategy)) rc.strategy = only(strategies, "--strategy");
    if (given(o_sched)) rc.scheduling = only(schedulings, "--scheduling");
    if (given(o_path)) rc.path = only(paths, "--path");
    if (cfg.command == Command::run) {
      try {
        rc.validate();
      } catch (const Error& e) {
        throw UsageError(std::string("invalid configuration: ") + e.what());
      }
    }
  }
  return cfg;
}

CliConfig parse_config(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return parse_config(args);
}

}  // namespace halolab
