// Command-line front end: run simulation scenarios (presets or config
// files), evaluate the closed-form bounds, list presets.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mpmab/mpmab.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string svg_path_for(const std::string& csv_path) {
  if (csv_path.size() >= 4 && csv_path.substr(csv_path.size() - 4) == ".csv")
    return csv_path.substr(0, csv_path.size() - 4) + ".svg";
  return csv_path + ".svg";
}

struct SimulateArgs {
  std::string scenario_name;
  std::string config_path;
  std::string out_path;
  std::int64_t horizon = -1;
  int reps = -1;
  std::int64_t seed = -1;
  std::int64_t stride = -1;
  int jobs = 0;
  bool emit_svg = false;
};

int run_simulate(const SimulateArgs& args) {
  mpmab::Scenario scenario;
  if (!args.scenario_name.empty()) {
    std::optional<mpmab::Round> horizon;
    if (args.horizon >= 0) horizon = args.horizon;
    scenario = mpmab::preset(args.scenario_name, horizon);
  } else {
    scenario = mpmab::parse_scenario(read_file(args.config_path));
    if (args.horizon >= 0) scenario.horizon = args.horizon;
  }
  if (args.reps >= 0) scenario.repetitions = args.reps;
  if (args.seed >= 0) scenario.master_seed = static_cast<std::uint64_t>(args.seed);
  if (args.stride >= 0) scenario.stride = args.stride;
  scenario.validate();

  mpmab::RunOptions options;
  options.jobs = args.jobs;
  const mpmab::RunResult result = mpmab::run_scenario(scenario, options);

  const std::string out = args.out_path.empty() ? scenario.name + ".csv" : args.out_path;
  if (result.aggregate.times.empty())
    throw std::runtime_error("nothing to write: the run produced no logged rounds (horizon 0?)");
  mpmab::write_csv(result.aggregate, out);

  std::printf("scenario %s: %d arms, %d user slots, horizon %lld, %d repetitions, policy %s\n",
              scenario.name.c_str(), scenario.arm_count(), scenario.user_slots(),
              static_cast<long long>(scenario.horizon), scenario.repetitions,
              mpmab::policy_kind_name(scenario.policy.kind));
  std::printf("final mean pseudo-regret %.6g, final mean collisions per user %.6g\n",
              result.aggregate.pseudo_mean.back(), result.aggregate.collisions_per_user_mean.back());
  std::printf("wrote %s (%zu rows)\n", out.c_str(), result.aggregate.times.size());
  if (args.emit_svg) {
    const std::string svg = svg_path_for(out);
    mpmab::write_svg(result.aggregate, svg);
    std::printf("wrote %s\n", svg.c_str());
  }
  return 0;
}

struct BoundArgs {
  int arms = 9;
  int users = 6;
  std::int64_t t = 10000;
  double learning_time = -1.0;  // < 0: derive from eps_rank and delta
  double eps_rank = 0.1;
  double delta = 0.05;
  double c = 0.1;
  double d = 0.05;
  double p0 = 0.6;
  double alpha = 0.5;
  double beta = 0.8;
};

int run_bounds(const BoundArgs& args) {
  namespace b = mpmab::bounds;
  using Real = b::Real;
  mpmab::MegaParams params;
  params.c = args.c;
  params.d = args.d;
  params.p0 = args.p0;
  params.alpha = args.alpha;
  params.beta = args.beta;

  std::printf("inputs: K=%d N=%d t=%lld c=%g d=%g p0=%g alpha=%g beta=%g eps_rank=%g delta=%g\n",
              args.arms, args.users, static_cast<long long>(args.t), args.c, args.d, args.p0,
              args.alpha, args.beta, args.eps_rank, args.delta);

  auto row = [](const char* label, const std::function<Real()>& value) {
    std::printf("%-44s", label);
    try {
      std::printf("%.10Lg\n", value());
    } catch (const std::exception& e) {
      std::printf("-- %s\n", e.what());
    }
  };

  Real T = static_cast<Real>(args.learning_time);
  if (args.learning_time < 0.0) {
    try {
      T = b::learning_time(args.arms, args.users, args.eps_rank, args.delta);
      std::printf("(learning time derived from eps_rank and delta)\n");
    } catch (const std::exception& e) {
      T = 0.0L;
      std::printf("(learning time unavailable: %s; using T=0)\n", e.what());
    }
  }
  const auto t = static_cast<Real>(args.t);

  row("learning time T", [&] { return T; });
  row("c for eps_t=1 through T", [&] { return b::c_for_learning_time(args.d, args.arms, T); });
  row("birthday collision probability",
      [&] { return b::birthday_collision_prob(args.users, args.arms); });
  row("collision run length, upper", [&] { return b::collision_run_length_upper(args.p0); });
  row("collision run length, lower", [&] { return b::collision_run_length_lower(args.p0); });
  row("pairwise collision bound at t",
      [&] { return b::pairwise_collision_bound(t, args.p0, args.beta); });
  row("collision regret coefficient", [&] { return b::collision_regret_coefficient(args.p0); });
  row("total collision regret bound at t",
      [&] { return b::total_collision_regret_bound(t, args.users, args.arms, args.p0, args.beta); });
  row("exploration phase length",
      [&] { return b::exploration_phase_length(args.c, args.arms, args.d); });
  row("exploration regret bound at t",
      [&] { return b::exploration_regret_bound(t, args.users, args.arms, args.c, args.d); });
  row("availability constant",
      [&] { return b::availability_constant(args.c, args.arms, args.d, args.alpha); });
  row("availability scale",
      [&] { return b::availability_scale(args.c, args.arms, args.d, args.alpha); });
  row("availability regret bound at t",
      [&] { return b::availability_regret_bound(t, args.users, args.arms, T, params); });
  row("total regret bound at t",
      [&] { return b::total_regret_bound(t, args.users, args.arms, T, params); });
  row("total regret at t with beta=2/3", [&] {
    mpmab::MegaParams opt = params;
    opt.beta = 2.0 / 3.0;  // the optimizer; boundary of the availability bound's validity
    return b::total_regret_value(t, args.users, args.arms, T, opt);
  });
  row("departure settling bound at t (n_after=N)",
      [&] { return b::departure_settling_bound(t, args.users, args.beta); });
  return 0;
}

int run_presets() {
  for (const auto& name : mpmab::preset_names())
    std::printf("%-14s %s\n", name.c_str(), mpmab::preset_description(name).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic multi-player bandit simulator with collision-induced zero rewards"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "run a scenario and write a CSV (and SVG) report");
  auto* scenario_opt =
      simulate->add_option("--scenario", sim.scenario_name, "preset name (see `mpmab presets`)");
  auto* config_opt =
      simulate->add_option("--config", sim.config_path, "scenario config file (see README for grammar)");
  scenario_opt->excludes(config_opt);
  config_opt->excludes(scenario_opt);
  simulate->add_option("--horizon", sim.horizon, "override the number of rounds");
  simulate->add_option("--reps", sim.reps, "override the repetition count");
  simulate->add_option("--seed", sim.seed, "override the master seed");
  simulate->add_option("--stride", sim.stride, "override the logging stride");
  simulate->add_option("--jobs", sim.jobs, "worker count (default: $MPMAB_JOBS, else hardware)");
  simulate->add_option("--out", sim.out_path, "output CSV path (default: <name>.csv)");
  simulate->add_flag("--emit-svg", sim.emit_svg, "also write a two-panel SVG plot next to the CSV");

  BoundArgs bnd;
  auto* bounds = app.add_subcommand("bounds", "evaluate every closed-form bound for given inputs");
  bounds->add_option("--arms,-K", bnd.arms, "number of arms K");
  bounds->add_option("--users,-N", bnd.users, "number of users N");
  bounds->add_option("--t", bnd.t, "round index t");
  bounds->add_option("--learning-time", bnd.learning_time,
                     "learning time T (default: derived from --eps-rank and --delta)");
  bounds->add_option("--eps-rank", bnd.eps_rank, "ranking tolerance eps");
  bounds->add_option("--delta", bnd.delta, "ranking failure probability delta");
  bounds->add_option("--c", bnd.c, "exploration scale c");
  bounds->add_option("--d", bnd.d, "reward-gap parameter d");
  bounds->add_option("--p0", bnd.p0, "initial persistence probability p0");
  bounds->add_option("--alpha", bnd.alpha, "persistence growth rate alpha");
  bounds->add_option("--beta", bnd.beta, "backoff growth exponent beta");

  auto* presets = app.add_subcommand("presets", "list the bundled scenario presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      if (sim.scenario_name.empty() && sim.config_path.empty())
        throw std::invalid_argument("simulate needs --scenario or --config");
      return run_simulate(sim);
    }
    if (bounds->parsed()) return run_bounds(bnd);
    if (presets->parsed()) return run_presets();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
