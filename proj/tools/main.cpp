#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "junction/parallel.hpp"
#include "junction/pipeline.hpp"

namespace {

struct Common {
  std::string config;
  std::string out = ".";
  std::optional<std::size_t> threads;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("config", c.config, "configuration file or built-in name")->required();
  sub->add_option("--out", c.out, "output directory");
  sub->add_option("--threads", c.threads, "worker threads (overrides JUNCTION_HJ_THREADS)");
  sub->add_option("--seed", c.seed, "seed for brute-force enumeration order");
}

}  // namespace

int main(int argc, char** argv) {
  using junction::Stage;
  CLI::App app{"Junction Hamilton-Jacobi solver with entry costs"};
  app.require_subcommand(1);

  Common common;
  struct Sub {
    CLI::App* app;
    std::optional<std::vector<Stage>> stages;
  };
  std::vector<Sub> subs{
      {app.add_subcommand("solve", "solve and export the value field"), std::vector{Stage::solve, Stage::export_field}},
      {app.add_subcommand("verify", "solve and run the verification checks"), std::vector{Stage::solve, Stage::verify}},
      {app.add_subcommand("compare", "solve and compare against the oracle and brute force"), std::nullopt},
      {app.add_subcommand("simulate", "simulate the configured schedule or policy"), std::nullopt},
      {app.add_subcommand("run", "run the configured pipeline"), std::nullopt},
  };
  for (auto& s : subs) add_common(s.app, common);
  app.add_subcommand("list", "list built-in configurations");

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand("list")) {
    for (const auto& n : junction::builtin_config_names()) std::cout << n << '\n';
    return 0;
  }

  junction::RunOptions options;
  options.out_dir = common.out;
  options.seed = common.seed;
  try {
    options.threads = junction::resolve_threads(common.threads);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  junction::RunConfig cfg;
  try {
    cfg = junction::load_config(common.config);
  } catch (const junction::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  }

  for (auto& s : subs) {
    if (!s.app->parsed()) continue;
    const std::string name = s.app->get_name();
    if (name == "compare") {
      std::vector<Stage> st{Stage::solve};
      if (cfg.example) st.push_back(Stage::oracle_compare);
      if (cfg.brute_force) st.push_back(Stage::brute_force_compare);
      s.stages = st;
    } else if (name == "simulate") {
      if (!cfg.simulate) {
        std::cerr << "configuration error: no simulate section\n";
        return 2;
      }
      s.stages = cfg.simulate->schedule.empty() ? std::vector{Stage::solve, Stage::simulate}
                                                : std::vector{Stage::simulate};
    }
    options.stages = s.stages;
  }

  try {
    const auto outcome = junction::run(cfg, options);
    for (const auto& c : outcome.checks) {
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    }
    std::cout << "summary: " << outcome.summary_path.string() << '\n';
    return outcome.exit_code;
  } catch (const junction::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
