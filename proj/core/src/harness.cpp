#include "stigmergy/harness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "stigmergy/agents.hpp"
#include "stigmergy/format.hpp"

namespace stigmergy {

namespace {

// Uniform interface over the two learners for the trial loop.
class SarsaDriver {
 public:
  SarsaDriver(QTable q, const ExperimentConfig& cfg)
      : learner_(std::move(q), {cfg.lambda, cfg.gamma, cfg.sarsa_update, cfg.sarsa_traces}) {}
  const QTable& q() const { return learner_.q(); }
  void begin(double) { learner_.begin_trial(); }
  void observe(const TransitionSample& tr, double alpha) { learner_.step(tr, alpha); }
  void end(double) { learner_.end_trial(); }

 private:
  SarsaLearner learner_;
};

class VapsDriver {
 public:
  VapsDriver(QTable q, const ExperimentConfig& cfg)
      : learner_(std::move(q), {cfg.beta, cfg.gamma, cfg.b, SarsaSampling::Single}) {}
  const QTable& q() const { return learner_.q(); }
  void begin(double temperature) { learner_.begin_trial(temperature); }
  void observe(const TransitionSample& tr, double) { learner_.observe(tr); }
  void end(double alpha) { learner_.end_trial(alpha); }

 private:
  VapsLearner learner_;
};

template <class Driver>
std::vector<TrialResult> run_one(const ExperimentConfig& cfg, const Environment& prototype,
                                 std::size_t run, const RunOptions& options) {
  Rng rng(split_seed(cfg.seed, run));
  auto env = prototype.clone();
  Driver driver(random_qtable(env->observation_count(), env->action_count(), rng, cfg.init_scale),
                cfg);
  const ScheduleParams schedule = cfg.schedule();
  const TrialLimits limits = cfg.limits();
  std::vector<double> probs(env->action_count());

  std::vector<TrialResult> results;
  results.reserve(cfg.trials);
  for (std::size_t n = 1; n <= cfg.trials; ++n) {
    const double alpha = learning_rate(schedule, n);
    const BoltzmannParams policy(temperature(schedule, n), cfg.epsilon);
    driver.begin(policy.temperature());

    TrialResult result{run, n, 0, TerminalKind::Timeout, 0.0};
    Observation x = env->reset(rng);
    action_probabilities(driver.q().row(x.id), policy, probs);
    Action u = sample_action(probs, rng);
    while (true) {
      StepOutcome out = env->step(u, rng);
      ++result.steps;
      if (out.terminal) {
        result.terminal = out.reward > 0.0 ? TerminalKind::Goal : TerminalKind::BadLoad;
      } else if (result.steps >= limits.step_cap) {
        out.terminal = true;
        out.reward += limits.timeout_reward;
        result.terminal = TerminalKind::Timeout;
      }
      result.reward += out.reward;

      Action next{0};
      if (!out.terminal) {
        action_probabilities(driver.q().row(out.observation.id), policy, probs);
        next = sample_action(probs, rng);
      }
      driver.observe({x, u, out.reward, out.observation, next, out.terminal, out.discounted}, alpha);
      if (out.terminal) break;
      x = out.observation;
      u = next;
    }
    driver.end(alpha);
    results.push_back(result);
    if (options.on_trial_end) {
      options.on_trial_end({run, n, alpha, policy.temperature(), driver.q(), results.back()});
    }
  }
  return results;
}

}  // namespace

std::string to_string(TerminalKind kind) {
  switch (kind) {
    case TerminalKind::Goal: return "goal";
    case TerminalKind::BadLoad: return "bad_load";
    case TerminalKind::Timeout: return "timeout";
  }
  return "unknown";
}

std::unique_ptr<Environment> make_environment(const ExperimentConfig& cfg) {
  return wrap(make_load_unload(cfg.domain_spec()), cfg.memory);
}

std::vector<TrialResult> run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate();
  const auto prototype = make_environment(cfg);

  std::vector<std::vector<TrialResult>> per_run(cfg.runs);
  std::atomic<std::size_t> next_run{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    while (true) {
      const std::size_t run = next_run.fetch_add(1);
      if (run >= cfg.runs) return;
      try {
        per_run[run] = cfg.algorithm == Algorithm::Vaps
                           ? run_one<VapsDriver>(cfg, *prototype, run, options)
                           : run_one<SarsaDriver>(cfg, *prototype, run, options);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next_run = cfg.runs;
        return;
      }
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, cfg.runs);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<TrialResult> results;
  results.reserve(cfg.runs * cfg.trials);
  for (auto& run : per_run) results.insert(results.end(), run.begin(), run.end());
  return results;
}

std::optional<std::size_t> greedy_trial_length(const Environment& prototype, const QTable& q,
                                               std::size_t step_cap, Rng& rng) {
  auto env = prototype.clone();
  Observation x = env->reset(rng);
  for (std::size_t steps = 1; steps <= step_cap; ++steps) {
    const StepOutcome out = env->step(greedy_action(q, x, rng), rng);
    if (out.terminal) {
      if (out.reward > 0.0) return steps;
      return std::nullopt;
    }
    x = out.observation;
  }
  return std::nullopt;
}

LearningCurve summarize(std::span<const TrialResult> results) {
  if (results.empty()) throw std::invalid_argument("summarize: no results");
  std::map<std::size_t, std::vector<const TrialResult*>> by_trial;
  for (const TrialResult& r : results) by_trial[r.trial].push_back(&r);

  LearningCurve curve;
  curve.runs = by_trial.begin()->second.size();
  std::vector<double> steps;
  for (const auto& [trial, rows] : by_trial) {
    if (rows.size() != curve.runs) {
      throw std::invalid_argument("summarize: trial " + std::to_string(trial) + " has " +
                                  std::to_string(rows.size()) + " runs, expected " +
                                  std::to_string(curve.runs));
    }
    steps.clear();
    double sum = 0.0;
    std::size_t successes = 0;
    for (const TrialResult* r : rows) {
      steps.push_back(static_cast<double>(r->steps));
      sum += static_cast<double>(r->steps);
      successes += r->terminal == TerminalKind::Goal;
    }
    std::sort(steps.begin(), steps.end());
    const std::size_t mid = steps.size() / 2;
    const double median = steps.size() % 2 ? steps[mid] : 0.5 * (steps[mid - 1] + steps[mid]);
    const double k = static_cast<double>(curve.runs);
    curve.points.push_back({trial, sum / k, median, static_cast<double>(successes) / k});
  }
  return curve;
}

double tail_mean_steps(const LearningCurve& curve, std::size_t window) {
  if (curve.points.empty() || window == 0) throw std::invalid_argument("tail_mean_steps: empty");
  window = std::min(window, curve.points.size());
  double sum = 0.0;
  for (std::size_t i = curve.points.size() - window; i < curve.points.size(); ++i) {
    sum += curve.points[i].mean_steps;
  }
  return sum / static_cast<double>(window);
}

std::string trials_csv(std::span<const TrialResult> results) {
  std::string out = "run,trial,steps,terminal,reward\n";
  for (const TrialResult& r : results) {
    out += std::to_string(r.run) + ',' + std::to_string(r.trial) + ',' + std::to_string(r.steps) +
           ',' + to_string(r.terminal) + ',' + format_real(r.reward) + '\n';
  }
  return out;
}

std::string curve_csv(const LearningCurve& curve) {
  std::string out = "trial,mean_steps,median_steps,success_rate\n";
  for (const CurvePoint& p : curve.points) {
    out += std::to_string(p.trial) + ',' + format_real(p.mean_steps) + ',' +
           format_real(p.median_steps) + ',' + format_real(p.success_rate) + '\n';
  }
  return out;
}

void emit_results(std::span<const TrialResult> results, const LearningCurve& curve,
                  const std::filesystem::path& dir) {
  if (results.empty()) throw std::invalid_argument("emit_results: no results to write");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

  auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path.string());
  };
  write(dir / "trials.csv", trials_csv(results));
  write(dir / "curve.csv", curve_csv(curve));
}

}  // namespace stigmergy
