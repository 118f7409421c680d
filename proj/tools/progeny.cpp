#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "progeny/cli/config.hpp"
#include "progeny/cli/experiments.hpp"

namespace {

enum Exit { ok = 0, usage = 1, numeric = 2, io = 3 };

void print(const progeny::cli::Report& rep) {
  std::cout << rep.text;
  for (const auto& f : rep.files) std::cout << "wrote " << f.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  using namespace progeny;
  CLI::App app{"Total-progeny-dependent birth-and-death processes: simulation and fluid approximations"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (default: PROGENY_THREADS or all cores)");

  std::string config;
  std::optional<std::string> out_dir;
  auto* sim = app.add_subcommand("simulate", "run an ensemble and write trajectories, grid means and a summary");
  sim->add_option("--config", config, "experiment TOML file")->required();
  sim->add_option("--out", out_dir, "output directory (overrides [outputs] directory)");

  cli::FluidRequest freq;
  std::string fluid_csv;
  auto* flu = app.add_subcommand("fluid", "integrate the fluid approximation");
  flu->add_option("--model", freq.model, "model1 or model2")->required();
  flu->add_option("--lambda", freq.lambda)->required();
  flu->add_option("--alpha", freq.alpha);
  flu->add_option("--mu", freq.mu)->required();
  flu->add_option("--t-end", freq.t_end);
  flu->add_option("--points", freq.points, "number of output times")->check(CLI::Range(2, 10000000));
  flu->add_option("--csv", fluid_csv)->required();

  auto* cmp = app.add_subcommand("compare", "simulation against fluid over a parameter sweep");
  cmp->add_option("--config", config, "experiment TOML file")->required();

  std::string methods = "eps1,eps2,star";
  auto* ext = app.add_subcommand("extinction", "mean extinction time against its fluid estimators");
  ext->add_option("--config", config, "experiment TOML file")->required();
  ext->add_option("--methods", methods, "comma-separated list of epsK and star")->capture_default_str();

  double alpha = 0, mu = 0;
  std::int64_t eps = 1;
  std::optional<std::string> min_csv = std::string("minimize_curve.csv"), min_svg;
  auto* mn = app.add_subcommand("minimize", "minimise t_eps over lambda for model 2");
  mn->add_option("--alpha", alpha)->required();
  mn->add_option("--mu", mu)->required();
  mn->add_option("--eps", eps)->required();
  mn->add_option("--csv", min_csv, "objective curve output")->capture_default_str();
  mn->add_option("--svg", min_svg, "objective curve plot");

  std::string mode;
  double k = 0;
  std::int64_t gens = 0;
  std::uint64_t seed = 0;
  std::string demo_csv = "discrete.csv";
  std::optional<std::string> demo_svg;
  auto* dd = app.add_subcommand("demo-discrete", "discrete-generation binary splitting");
  dd->add_option("--mode", mode, "progeny or popsize")->required()->check(CLI::IsMember({"progeny", "popsize"}));
  dd->add_option("--K", k)->required();
  dd->add_option("--gens", gens)->required();
  dd->add_option("--seed", seed)->required();
  dd->add_option("--csv", demo_csv)->capture_default_str();
  dd->add_option("--svg", demo_svg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? Exit::ok : Exit::usage;
  }

  const cli::RunOptions run{threads};
  try {
    cli::Report rep;
    if (*sim) {
      const auto cfg = cli::load_config(config);
      rep = cli::cmd_simulate(cfg, out_dir ? std::optional<std::filesystem::path>(*out_dir) : std::nullopt, run);
    } else if (*flu) {
      rep = cli::cmd_fluid(freq, fluid_csv);
    } else if (*cmp) {
      rep = cli::cmd_compare(cli::load_config(config), run);
    } else if (*ext) {
      const auto list = cli::parse_methods(methods);
      rep = cli::cmd_extinction(cli::load_config(config), list, run);
    } else if (*mn) {
      if (eps < 1) throw ConfigError("--eps must be >= 1");
      std::optional<std::filesystem::path> c, s;
      if (min_csv && !min_csv->empty()) c = *min_csv;
      if (min_svg) s = *min_svg;
      rep = cli::cmd_minimize(alpha, mu, static_cast<double>(eps), c, s);
    } else if (*dd) {
      const auto m = mode == "progeny" ? ssa::DiscreteMode::progeny : ssa::DiscreteMode::popsize;
      std::optional<std::filesystem::path> s;
      if (demo_svg) s = *demo_svg;
      rep = cli::cmd_demo_discrete(m, k, gens, seed, demo_csv, s);
    }
    print(rep);
    return rep.ok ? Exit::ok : Exit::numeric;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Exit::usage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Exit::usage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Exit::io;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Exit::io;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Exit::numeric;
  }
}
