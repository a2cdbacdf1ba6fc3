#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "stigmergy/config.hpp"
#include "stigmergy/domains.hpp"
#include "stigmergy/format.hpp"
#include "stigmergy/grad_oracle.hpp"
#include "stigmergy/harness.hpp"
#include "stigmergy/toys.hpp"

namespace fs = std::filesystem;
using namespace stigmergy;

namespace {

struct TrainArgs {
  fs::path config;
  fs::path out;
  std::optional<std::uint64_t> seed;
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
};

struct GradcheckArgs {
  std::string toy;
  std::optional<std::size_t> horizon;
  std::uint64_t seed = 1;
  double temperature = 0.7;
  double gamma = 1.0;
  double b = 0.0;
  double beta = 0.5;
};

struct OptimalArgs {
  std::string domain;
  std::size_t memory_bits = 1;
  std::string memory_mode = "augment";
  std::string memory_style = "set-clear";
};

int train(const TrainArgs& args) {
  ExperimentConfig cfg = load_config(args.config);
  if (args.seed) cfg.seed = *args.seed;
  cfg.validate();

  const auto results = run_experiment(cfg, {args.workers, {}});
  const LearningCurve curve = summarize(results);
  emit_results(results, curve, args.out);
  {
    std::ofstream resolved(args.out / "config.resolved");
    resolved << to_config_text(cfg);
    if (!resolved) throw std::runtime_error("cannot write " + (args.out / "config.resolved").string());
  }

  const std::size_t window = std::min<std::size_t>(100, curve.points.size());
  std::cout << "algorithm      " << to_string(cfg.algorithm) << '\n'
            << "domain         " << cfg.domain << '\n'
            << "runs x trials  " << cfg.runs << " x " << cfg.trials << '\n'
            << "step cap       " << cfg.resolved_step_cap() << '\n'
            << "final " << window << " mean " << std::fixed << std::setprecision(2)
            << tail_mean_steps(curve, window) << " steps, last-trial success "
            << curve.points.back().success_rate << '\n'
            << "wrote " << (args.out / "trials.csv").string() << " and "
            << (args.out / "curve.csv").string() << '\n';
  return 0;
}

int gradcheck(const GradcheckArgs& args) {
  const Toy toy = make_toy(args.toy);
  EnumerationSpec spec{toy.model, args.horizon.value_or(toy.default_horizon)};
  Rng rng(split_seed(args.seed, 0));
  const QTable q =
      random_qtable(toy.model->observation_count(), toy.model->action_count(), rng, 1.0);

  GradientCheckOptions options;
  options.gamma = args.gamma;
  options.b = args.b;
  options.beta = args.beta;
  const auto checks = run_gradient_checks(spec, q, args.temperature, options);

  std::cout << "toy " << toy.name << ", horizon " << spec.horizon << ", temperature "
            << format_real(args.temperature) << '\n';
  bool ok = true;
  for (const GradientCheck& c : checks) {
    char line[160];
    const char* verdict = c.kind == CheckKind::Report ? "info" : c.passed() ? "ok" : "FAIL";
    std::snprintf(line, sizeof line, "  %-40s max deviation %.3e  (tol %.0e)  %s", c.name.c_str(),
                  c.deviation, c.tolerance, verdict);
    std::cout << line << '\n';
    ok = ok && c.passed();
  }
  return ok ? 0 : 1;
}

int optimal(const OptimalArgs& args) {
  MemoryConfig mem{args.memory_bits, MemoryMode::Augment, MemoryActionStyle::SetClear, true};
  mem.mode = args.memory_mode == "compose" ? MemoryMode::Compose : MemoryMode::Augment;
  mem.style = args.memory_style == "flip" ? MemoryActionStyle::Flip : MemoryActionStyle::SetClear;
  std::cout << optimal_trial_length(load_unload_preset(args.domain), mem) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Memoryless policy learning with external memory bits"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "run an experiment and write learning curves");
  train_cmd->add_option("--config", train_args.config, "experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--out", train_args.out, "output directory")->required();
  train_cmd->add_option("--seed", train_args.seed, "override the master seed");
  train_cmd->add_option("--workers", train_args.workers, "parallel runs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  GradcheckArgs grad_args;
  std::string toy_help = "toy problem:";
  for (const auto& name : toy_names()) toy_help += " " + name;
  auto* grad_cmd = app.add_subcommand("gradcheck", "compare sampled gradients with enumeration");
  grad_cmd->add_option("--toy", grad_args.toy, toy_help)->required();
  grad_cmd->add_option("--horizon", grad_args.horizon, "step cap (default: per toy)")
      ->check(CLI::Range(1, 16));
  grad_cmd->add_option("--seed", grad_args.seed, "seed for the random Q-table")
      ->capture_default_str();
  grad_cmd->add_option("--temperature", grad_args.temperature)->capture_default_str();
  grad_cmd->add_option("--gamma", grad_args.gamma)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  grad_cmd->add_option("--b", grad_args.b, "baseline in e_policy")->capture_default_str();
  grad_cmd->add_option("--beta", grad_args.beta, "mixing weight for the combined checks")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();

  OptimalArgs opt_args;
  std::string preset_help = "domain preset:";
  for (const auto& name : load_unload_preset_names()) preset_help += " " + name;
  auto* opt_cmd = app.add_subcommand("optimal", "print the optimal trial length");
  opt_cmd->add_option("--domain", opt_args.domain, preset_help)->required();
  opt_cmd->add_option("--memory-bits", opt_args.memory_bits)
      ->check(CLI::Range(std::size_t{0}, kMaxMemoryBits))
      ->capture_default_str();
  opt_cmd->add_option("--memory-mode", opt_args.memory_mode)
      ->check(CLI::IsMember({"augment", "compose"}))
      ->capture_default_str();
  opt_cmd->add_option("--memory-style", opt_args.memory_style)
      ->check(CLI::IsMember({"set-clear", "flip"}))
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) return train(train_args);
    if (*grad_cmd) return gradcheck(grad_args);
    if (*opt_cmd) return optimal(opt_args);
  } catch (const ConfigError& e) {
    std::cerr << "invalid config:\n" << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
