// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "stigmergy/agents.hpp"
#include "stigmergy/config.hpp"
#include "stigmergy/domains.hpp"
#include "stigmergy/grad_oracle.hpp"
#include "stigmergy/harness.hpp"
#include "stigmergy/memory.hpp"
#include "stigmergy/toys.hpp"

using namespace stigmergy;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

std::size_t workers() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ExperimentConfig protocol(const std::string& domain, Algorithm algorithm) {
  ExperimentConfig cfg;
  cfg.domain = domain;
  cfg.algorithm = algorithm;
  cfg.runs = 50;
  cfg.trials = 1000;
  cfg.seed = 1;
  return cfg;
}

double tail100(const ExperimentConfig& cfg) {
  return tail_mean_steps(summarize(run_experiment(cfg, {workers(), {}})), 100);
}

Verdict optimal_length() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t len = optimal_trial_length(load_unload_preset("load-unload-5"),
                                               {1, MemoryMode::Augment, MemoryActionStyle::SetClear, true});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {len == 9 && secs < 1.0,
          "load-unload-5, 1 bit: " + std::to_string(len) + " steps (want 9) in " + fmt("%.4f", secs) + " s"};
}

Verdict load_unload_5() {
  const double vaps = tail100(protocol("load-unload-5", Algorithm::Vaps));
  const double sarsa = tail100(protocol("load-unload-5", Algorithm::Sarsa));
  return {vaps <= 12.0 && sarsa <= 12.0, "final-100 mean steps VAPS " + fmt("%.2f", vaps) +
                                              ", SARSA " + fmt("%.2f", sarsa) + " (want both <= 12)"};
}

Verdict two_loaders() {
  const double vaps = tail100(protocol("load-unload-two-loaders", Algorithm::Vaps));
  const double sarsa = tail100(protocol("load-unload-two-loaders", Algorithm::Sarsa));
  return {vaps <= 0.8 * sarsa, "final-100 mean steps VAPS " + fmt("%.2f", vaps) + ", SARSA " +
                                   fmt("%.2f", sarsa) + " (want VAPS <= 0.8 x SARSA = " +
                                   fmt("%.2f", 0.8 * sarsa) + ")"};
}

// Runs (out of cfg.runs) whose greedy policy reaches the optimal length at
// the end of some trial <= horizon.
std::size_t converged_runs(ExperimentConfig cfg, std::size_t horizon) {
  cfg.trials = horizon;
  const auto prototype = make_environment(cfg);
  const std::size_t optimum = optimal_trial_length(cfg.domain_spec(), cfg.memory);
  std::vector<char> hit(cfg.runs, 0);
  std::mutex m;
  RunOptions options{workers(), [&](const TrialContext& ctx) {
                       if (hit[ctx.run]) return;
                       Rng rng(split_seed(cfg.seed ^ 0x9e3779b97f4a7c15ull, ctx.run * 100003 + ctx.trial));
                       const auto len = greedy_trial_length(*prototype, ctx.q, cfg.resolved_step_cap(), rng);
                       if (len && *len == optimum) {
                         std::lock_guard lock(m);
                         hit[ctx.run] = 1;
                       }
                     }};
  run_experiment(cfg, options);
  return static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
}

Verdict easy_convergence() {
  const std::size_t vaps = converged_runs(protocol("load-unload-3", Algorithm::Vaps), 200);
  const std::size_t sarsa = converged_runs(protocol("load-unload-3", Algorithm::Sarsa), 200);
  return {vaps >= 45 && sarsa >= 45, "runs with optimal greedy policy by trial 200: VAPS " +
                                         std::to_string(vaps) + "/50, SARSA " +
                                         std::to_string(sarsa) + "/50 (want >= 45 each)"};
}

Verdict gradient_oracle() {
  double fd = 0.0, vaps = 0.0, dbl = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Toy toy = random_toy(seed);
    GradientOracle oracle({toy.model, 3 + seed % 3});
    Rng rng(seed * 7919);
    const QTable q = random_qtable(toy.model->observation_count(), toy.model->action_count(), rng, 1.0);
    const double c = 0.3 + uniform01(rng);
    const auto atoms = oracle.enumerate(q, c);
    for (const ErrorMeasure& m :
         {ErrorMeasure::policy(1.0, 0.0), ErrorMeasure::policy(0.9, 0.3), ErrorMeasure::sarsa(1.0),
          ErrorMeasure::combined(0.5, 0.95, 0.1)}) {
      const Table exact = oracle.exact_grad_B(atoms, m, q, c);
      const Table diff = oracle.finite_difference_grad_B(m, q, c);
      fd = std::max(fd, max_abs_diff(exact, diff) / std::max(max_abs(exact), 1e-3));
      if (m.beta == 1.0) vaps = std::max(vaps, max_abs_diff(oracle.vaps_update_expectation(atoms, m, q, c), exact));
      dbl = std::max(dbl, max_abs_diff(oracle.double_sample_expectation(atoms, m, q, c), exact));
    }
  }
  const Toy noisy = make_toy("noisy");
  GradientOracle oracle({noisy.model, noisy.default_horizon});
  Rng rng(3);
  const QTable q = random_qtable(2, 2, rng, 1.0);
  const auto atoms = oracle.enumerate(q, 0.7);
  const ErrorMeasure sarsa = ErrorMeasure::sarsa(1.0);
  const double bias = max_abs_diff(oracle.vaps_update_expectation(atoms, sarsa, q, 0.7),
                                   oracle.exact_grad_B(atoms, sarsa, q, 0.7));
  const bool pass = fd <= 1e-7 && vaps <= 1e-9 && dbl <= 1e-9 && bias > 1e-3;
  return {pass, "20 toys: fd rel " + fmt("%.2e", fd) + " (<= 1e-7), vaps(1) " + fmt("%.2e", vaps) +
                    " (<= 1e-9), double-sample " + fmt("%.2e", dbl) +
                    " (<= 1e-9); single-sample bias on noisy " + fmt("%.3e", bias) + " (> 1e-3)"};
}

Verdict trace_identities() {
  auto env = wrap(make_load_unload(load_unload_preset("load-unload-5")),
                  {1, MemoryMode::Augment, MemoryActionStyle::SetClear, true});
  Rng rng(2024);
  double counter = 0.0, row_sum = 0.0, q_sum = 0.0;
  std::vector<double> probs(env->action_count());
  for (int trial = 0; trial < 1000; ++trial) {
    const double c = 0.2 + uniform01(rng);
    const QTable q = random_qtable(env->observation_count(), env->action_count(), rng, 1.0);
    VapsLearner learner(q, {});
    learner.begin_trial(c);
    const BoltzmannParams policy(c);
    Observation x = env->reset(rng);
    action_probabilities(q.row(x.id), policy, probs);
    Action u = sample_action(probs, rng);
    for (std::size_t step = 1;; ++step) {
      StepOutcome out = env->step(u, rng);
      if (!out.terminal && step == 36) {
        out.terminal = true;
        out.reward -= 1.0;
      }
      Action next{0};
      if (!out.terminal) {
        action_probabilities(q.row(out.observation.id), policy, probs);
        next = sample_action(probs, rng);
      }
      learner.observe({x, u, out.reward, out.observation, next, out.terminal, out.discounted});
      if (out.terminal) break;
      x = out.observation;
      u = next;
    }
    counter = std::max(counter, max_abs_diff(vaps1_counter_trace(learner.counts(),
                                                                 policy_table(q, policy), c),
                                             learner.trace()));
    for (std::size_t r = 0; r < q.rows(); ++r) {
      const auto row = learner.trace().row(r);
      row_sum = std::max(row_sum, std::abs(std::accumulate(row.begin(), row.end(), 0.0)));
    }
    learner.end_trial(0.6);
    for (std::size_t r = 0; r < q.rows(); ++r) {
      double delta = 0.0;
      for (std::size_t a = 0; a < q.cols(); ++a) delta += learner.q()(r, a) - q(r, a);
      q_sum = std::max(q_sum, std::abs(delta));
    }
  }
  return {counter <= 1e-10 && row_sum <= 1e-12 && q_sum <= 1e-12,
          "1000 trials: counter trace " + fmt("%.2e", counter) + " (<= 1e-10), row sums " +
              fmt("%.2e", row_sum) + " (<= 1e-12), Q row change sums " + fmt("%.2e", q_sum)};
}

Verdict sarsa_monte_carlo() {
  // Three-state corridor, goal on the right; rewards along the way so the
  // returns are not trivial.
  PomdpModel m(3, 3, 2);
  m.set_initial({1.0, 0.0, 0.0});
  for (std::size_t s = 0; s < 3; ++s) m.set_observation(s, {s});
  m.add_transition(0, {0}, {1.0, 0, -0.1, false});
  m.add_transition(0, {1}, {1.0, 1, 0.2, false});
  m.add_transition(1, {0}, {1.0, 0, 0.0, false});
  m.add_transition(1, {1}, {1.0, 2, -0.3, false});
  m.add_transition(2, {0}, {1.0, 1, 0.5, false});
  m.add_transition(2, {1}, {1.0, 2, 1.0, true});
  m.validate();
  ModelEnvironment env(std::make_shared<const PomdpModel>(std::move(m)));

  Rng rng(77);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const QTable q0 = random_qtable(3, 2, rng, 1.0);
    std::vector<TransitionSample> samples;
    Observation x = env.reset(rng);
    Action u = sample_action(std::vector{0.5, 0.5}, rng);
    while (true) {
      const StepOutcome out = env.step(u, rng);
      const Action next = out.terminal ? Action{0} : sample_action(std::vector{0.5, 0.5}, rng);
      samples.push_back({x, u, out.reward, out.observation, next, out.terminal, true});
      if (out.terminal) break;
      x = out.observation;
      u = next;
    }
    std::vector<double> ret(samples.size());
    double g = 0.0;
    for (std::size_t t = samples.size(); t-- > 0;) ret[t] = g += samples[t].r_prev;

    const double alpha = 0.1 + 0.8 * uniform01(rng);
    for (TraceKind kind : {TraceKind::Accumulating, TraceKind::Replacing}) {
      QTable expected = q0;
      std::vector<bool> seen(6, false);
      for (std::size_t t = 0; t < samples.size(); ++t) {
        const auto [xs, us] = std::pair{samples[t].x_prev.id, samples[t].u_prev.id};
        if (kind == TraceKind::Replacing && seen[xs * 2 + us]) continue;
        seen[xs * 2 + us] = true;
        expected(xs, us) += alpha * (ret[t] - q0(xs, us));
      }
      SarsaLearner learner(q0, {1.0, 1.0, SarsaUpdateMode::Offline, kind});
      learner.begin_trial();
      for (const auto& tr : samples) learner.step(tr, alpha);
      learner.end_trial();
      worst = std::max(worst, max_abs_diff(learner.q(), expected));
    }
  }
  return {worst <= 1e-12, "500 trials, every-visit (accumulating) and first-visit (replacing): max |dQ| " +
                              fmt("%.2e", worst) + " (<= 1e-12)"};
}

std::string file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict determinism() {
  ExperimentConfig cfg = protocol("load-unload-5", Algorithm::Vaps);
  cfg.runs = 16;
  cfg.trials = 300;
  cfg.seed = 4242;
  const auto root = std::filesystem::temp_directory_path() / "stigmergy_acceptance";
  std::filesystem::remove_all(root);
  std::vector<std::string> outputs;
  const std::size_t parallel = std::max<std::size_t>(4, workers());
  bool pass = true;
  for (Algorithm a : {Algorithm::Vaps, Algorithm::Sarsa}) {
    cfg.algorithm = a;
    outputs.clear();
    for (std::size_t w : {std::size_t{1}, std::size_t{1}, parallel, parallel}) {
      const auto results = run_experiment(cfg, {w, {}});
      const auto dir = root / std::to_string(outputs.size());
      emit_results(results, summarize(results), dir);
      outputs.push_back(file_bytes(dir / "trials.csv") + file_bytes(dir / "curve.csv"));
    }
    pass = pass && std::all_of(outputs.begin(), outputs.end(),
                               [&](const std::string& s) { return s == outputs.front(); });
  }
  std::filesystem::remove_all(root);
  return {pass, "VAPS and SARSA, 16x300, serial x2 and " + std::to_string(parallel) +
                    " workers x2: trials.csv and curve.csv " + (pass ? "identical" : "differ")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"1 optimal length", optimal_length},
      {"2 load-unload-5 convergence", load_unload_5},
      {"3 two-loaders VAPS beats SARSA", two_loaders},
      {"4 easy-problem convergence", easy_convergence},
      {"5 gradient oracle", gradient_oracle},
      {"6 trace identities", trace_identities},
      {"7 offline SARSA(1) is Monte-Carlo", sarsa_monte_carlo},
      {"8 determinism", determinism},
  };
  std::size_t passed = 0;
  for (const auto& [name, check] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    const Verdict v = check();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    passed += v.pass;
    std::printf("%s [%s] %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", passed, criteria.size());
  return passed == criteria.size() ? 0 : 1;
}
