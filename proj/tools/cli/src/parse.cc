#include <CLI11.hpp>
#include <fstream>
#include <ostream>
#include <sstream>

#include "sps/cli/commands.hpp"
#include "sps/errors.hpp"

namespace sps::cli {

namespace {

struct Flags {
  RunConfig config;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> seeds;
  std::string wall_time;
  std::string from_manifest;
  bool full = false;
};

void add_run_options(CLI::App& cmd, Flags& f) {
  RunConfig& c = f.config;
  cmd.add_option("--problem", c.problem, "drslr or bilinear")->check(CLI::IsMember({"drslr", "bilinear"}));
  cmd.add_option("--data", c.data_path, "LIBSVM dataset (default: synthetic)");
  cmd.add_option("--synthetic-rows", c.synthetic_rows, "rows of the synthetic dataset");
  cmd.add_option("--synthetic-features", c.synthetic_features, "features of the synthetic dataset");
  cmd.add_option("--synthetic-seed", c.synthetic_seed, "seed of the synthetic dataset");
  cmd.add_option("--dim", c.bilinear_dim, "bilinear game: dimension of each player");
  cmd.add_option("--scale", c.bilinear_scale, "bilinear game: coupling scale");
  cmd.add_option("--noise", c.noise_sigma, "bilinear game: oracle noise standard deviation");
  cmd.add_option("--delta", c.delta, "Wasserstein radius");
  cmd.add_option("--kappa", c.kappa, "label-flip cost");
  cmd.add_option("--c", c.c, "l1 weight");
  cmd.add_option("--solver", c.solvers, "sps, sps-decay, sps-fixed, ps, tseng, frb or dseg (repeatable)")
      ->check(CLI::IsMember({"sps", "sps-decay", "sps-fixed", "ps", "tseng", "frb", "dseg"}));
  cmd.add_option("--schedule", c.schedule, "decay or fixed")->check(CLI::IsMember({"decay", "fixed"}));
  cmd.add_option("--cd", c.c_d, "decay schedule constant");
  cmd.add_option("--cf", c.c_f, "fixed schedule constant");
  cmd.add_option("--tau", c.tau, "resolvent stepsize");
  cmd.add_option("--oracle", c.oracle, "minibatch or exact")->check(CLI::IsMember({"minibatch", "exact"}));
  cmd.add_option("--batch", c.batch, "minibatch size");
  cmd.add_option("--lipschitz", c.lipschitz, "Lipschitz bound of B (default: estimated)");
  cmd.add_option("--ls-alpha0", c.ls_alpha0, "linesearch initial stepsize");
  cmd.add_option("--ls-theta", c.ls_theta, "linesearch acceptance factor");
  cmd.add_option("--ls-shrink", c.ls_shrink, "linesearch shrink factor");
  cmd.add_option("--iters", c.iterations, "iterations (also the fixed-schedule budget K)");
  cmd.add_option("--trace-every", c.trace_every, "residual cadence");
  auto* seed = cmd.add_option("--seed", f.seed, "single seed");
  cmd.add_option("--seeds", f.seeds, "comma-separated seeds")->delimiter(',')->excludes(seed);
  cmd.add_option("--wall-time", f.wall_time, "on or off: record solver wall time in the CSV")
      ->check(CLI::IsMember({"on", "off"}));
  cmd.add_option("--out", c.out_path, "trace CSV path");
  cmd.add_option("--manifest", c.manifest_path, "manifest path (default: <out>.manifest.json)");
  cmd.add_option("--from-manifest", f.from_manifest, "re-run a recorded manifest (only --out may be combined)");
}

void finish(CLI::App& cmd, Flags& f, const std::string& name) {
  RunConfig& c = f.config;
  c.subcommand = name;
  if (!f.seeds.empty()) {
    c.seeds = f.seeds;
  } else if (cmd.count("--seed") > 0) {
    c.seeds = {f.seed};
  } else if (name == "compare") {
    c.seeds.clear();
    for (std::uint64_t s = 0; s < 10; ++s) c.seeds.push_back(s);
  }
  c.record_wall_time = f.wall_time.empty() ? name != "solve" : f.wall_time == "on";

  if (!f.from_manifest.empty()) {
    for (const auto* opt : cmd.get_options()) {
      const std::string& lname = opt->get_name();
      if (lname != "--from-manifest" && lname != "--out" && lname != "--help" && opt->count() > 0) {
        throw ValidationError("--from-manifest cannot be combined with " + lname);
      }
    }
    std::ifstream in(f.from_manifest);
    if (!in) throw IoError("cannot open manifest '" + f.from_manifest + "'");
    RunConfig loaded = read_manifest(in);
    if (loaded.subcommand != name) {
      throw ValidationError("manifest was recorded for '" + loaded.subcommand + "', not '" + name + "'");
    }
    if (cmd.count("--out") > 0) {
      loaded.out_path = c.out_path;
      loaded.manifest_path.clear();
    }
    c = loaded;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stochastic projective splitting experiments"};
  app.require_subcommand(1);
  Flags solve, compare, bench;
  auto* solve_cmd = app.add_subcommand("solve", "run one solver and write its trace");
  auto* compare_cmd = app.add_subcommand("compare", "run several solvers into one combined trace");
  auto* bench_cmd = app.add_subcommand("bench", "run the verification suite");
  add_run_options(*solve_cmd, solve);
  add_run_options(*compare_cmd, compare);
  bench_cmd->add_flag("--full", bench.full, "run every acceptance check, not only the quick subset");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, x;
    const int code = app.exit(e, o, x);
    out << o.str();
    err << x.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (solve_cmd->parsed()) {
      finish(*solve_cmd, solve, "solve");
      return cmd_solve(solve.config, out, err);
    }
    if (compare_cmd->parsed()) {
      finish(*compare_cmd, compare, "compare");
      return cmd_compare(compare.config, out, err);
    }
    RunConfig config;
    config.subcommand = "bench";
    return cmd_bench(config, out, err, bench.full);
  } catch (const ValidationError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidParameter& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace sps::cli
