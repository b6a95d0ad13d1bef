// Command-line front end: one subcommand per experiment kind, JSON config
// files with flag overrides, CSV/JSON outputs under an --out prefix.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "opg/config.hpp"
#include "opg/io.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> eps;
  std::optional<int> threads;
  std::optional<double> v;
  std::optional<double> delta_v;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON experiment config");
  cmd->add_option("--seed", [&flags](const CLI::results_t& res) {
    flags.seed = std::stoull(res[0]);
    return true;
  }, "master seed (overrides config)");
  cmd->add_option("--out", [&flags](const CLI::results_t& res) {
    flags.out = res[0];
    return true;
  }, "output path prefix (overrides config)");
  cmd->add_option("--eps", [&flags](const CLI::results_t& res) {
    flags.eps = std::stod(res[0]);
    return true;
  }, "support threshold (overrides config)");
  cmd->add_option("--threads,-j", [&flags](const CLI::results_t& res) {
    flags.threads = std::stoi(res[0]);
    return true;
  }, "worker threads for sweeps (overrides config)");
  cmd->add_option("--v", [&flags](const CLI::results_t& res) {
    flags.v = std::stod(res[0]);
    return true;
  }, "baseline V (overrides config)");
  cmd->add_option("--delta-v", [&flags](const CLI::results_t& res) {
    flags.delta_v = std::stod(res[0]);
    return true;
  }, "baseline offset from V^mu (overrides config)");
}

int run_kind(opg::ExperimentKind kind, const CommonFlags& flags) {
  opg::ExperimentConfig cfg;
  if (!flags.config_path.empty()) {
    cfg = opg::ExperimentConfig::from_json_text(opg::read_text_file(flags.config_path));
  }
  cfg.kind = kind;
  if (flags.seed) {
    cfg.seed = *flags.seed;
    cfg.seed_given = true;
  }
  if (flags.out) cfg.out = *flags.out;
  if (flags.eps) cfg.eps = *flags.eps;
  if (flags.threads) cfg.threads = *flags.threads;
  if (flags.v) {
    cfg.v_single = *flags.v;
    cfg.delta_v_single.reset();
  }
  if (flags.delta_v) {
    cfg.delta_v_single = *flags.delta_v;
    cfg.v_single.reset();
  }

  const auto written = opg::run_experiment(cfg);
  for (const auto& path : written) std::cout << path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for off-policy REINFORCE dynamics on tabular softmax bandits"};
  app.require_subcommand(1);

  struct SubEntry {
    const char* name;
    const char* desc;
    opg::ExperimentKind kind;
  };
  const SubEntry entries[] = {
      {"gen", "generate a bandit instance and write it as JSON", opg::ExperimentKind::Gen},
      {"run", "single dynamics run (expected, delayed, or stochastic)", opg::ExperimentKind::Run},
      {"limit", "closed-form limit policies per baseline", opg::ExperimentKind::Limit},
      {"improve", "finite-step policy-improvement scheme", opg::ExperimentKind::Improve},
      {"sweep", "baseline sweep with per-run trajectories and a summary table",
       opg::ExperimentKind::Sweep},
      {"basin", "basin-of-attraction map for a 3-arm instance above critical",
       opg::ExperimentKind::Basin},
      {"contextual", "contextual bandits with empirical baselines and an offset",
       opg::ExperimentKind::Contextual},
  };

  CommonFlags flags[sizeof(entries) / sizeof(entries[0])];
  std::size_t idx = 0;
  for (const SubEntry& entry : entries) {
    CLI::App* cmd = app.add_subcommand(entry.name, entry.desc);
    add_common(cmd, flags[idx]);
    const opg::ExperimentKind kind = entry.kind;
    CommonFlags* f = &flags[idx];
    cmd->callback([kind, f]() {
      const int rc = run_kind(kind, *f);
      if (rc != 0) throw CLI::RuntimeError(rc);
    });
    ++idx;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const opg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const opg::InvalidInputError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const opg::PreconditionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const opg::RegimeError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const opg::DivergenceError& e) {
    std::cerr << "numerical divergence: " << e.what() << "\n";
    return 3;
  } catch (const opg::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
