#include "stigmergy/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "stigmergy/format.hpp"

namespace stigmergy {

namespace {

std::string join(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    if (!out.empty()) out += '\n';
    out += l;
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <class T>
bool parse_number(const std::string& text, T& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_bool(const std::string& text, bool& out) {
  if (text == "true" || text == "yes" || text == "1") return out = true, true;
  if (text == "false" || text == "no" || text == "0") return out = false, true;
  return false;
}

bool parse_list(const std::string& text, std::vector<std::size_t>& out) {
  out.clear();
  if (text.empty()) return true;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t v = 0;
    if (!parse_number(trim(item), v)) return false;
    out.push_back(v);
  }
  return true;
}

std::string list_text(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

using Setter = std::function<bool(ExperimentConfig&, const std::string&)>;

template <class T>
Setter number(T ExperimentConfig::*field) {
  return [field](ExperimentConfig& c, const std::string& v) { return parse_number(v, c.*field); };
}

template <class T>
Setter optional_number(std::optional<T> ExperimentConfig::*field) {
  return [field](ExperimentConfig& c, const std::string& v) {
    T value{};
    if (!parse_number(v, value)) return false;
    c.*field = value;
    return true;
  };
}

Setter optional_list(std::optional<std::vector<std::size_t>> ExperimentConfig::*field) {
  return [field](ExperimentConfig& c, const std::string& v) {
    std::vector<std::size_t> list;
    if (!parse_list(v, list)) return false;
    c.*field = std::move(list);
    return true;
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"domain", [](ExperimentConfig& c, const std::string& v) { c.domain = v; return !v.empty(); }},
      {"locations", optional_number(&ExperimentConfig::locations)},
      {"unload_position", optional_number(&ExperimentConfig::unload_position)},
      {"loading_positions", optional_list(&ExperimentConfig::loading_positions)},
      {"bad_loading_positions", optional_list(&ExperimentConfig::bad_loading_positions)},
      {"memory_bits",
       [](ExperimentConfig& c, const std::string& v) { return parse_number(v, c.memory.bit_count); }},
      {"memory_mode",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "augment") return c.memory.mode = MemoryMode::Augment, true;
         if (v == "compose") return c.memory.mode = MemoryMode::Compose, true;
         return false;
       }},
      {"memory_action_style",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "set-clear") return c.memory.style = MemoryActionStyle::SetClear, true;
         if (v == "flip") return c.memory.style = MemoryActionStyle::Flip, true;
         return false;
       }},
      {"discount_memory_actions",
       [](ExperimentConfig& c, const std::string& v) {
         return parse_bool(v, c.memory.discount_memory_actions);
       }},
      {"algorithm",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "sarsa") return c.algorithm = Algorithm::Sarsa, true;
         if (v == "vaps") return c.algorithm = Algorithm::Vaps, true;
         return false;
       }},
      {"lambda", number(&ExperimentConfig::lambda)},
      {"beta", number(&ExperimentConfig::beta)},
      {"gamma", number(&ExperimentConfig::gamma)},
      {"b", number(&ExperimentConfig::b)},
      {"sarsa_update",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "online") return c.sarsa_update = SarsaUpdateMode::Online, true;
         if (v == "offline") return c.sarsa_update = SarsaUpdateMode::Offline, true;
         return false;
       }},
      {"sarsa_traces",
       [](ExperimentConfig& c, const std::string& v) {
         if (v == "replacing") return c.sarsa_traces = TraceKind::Replacing, true;
         if (v == "accumulating") return c.sarsa_traces = TraceKind::Accumulating, true;
         return false;
       }},
      {"alpha0", number(&ExperimentConfig::alpha0)},
      {"c_max", optional_number(&ExperimentConfig::c_max)},
      {"c_min", optional_number(&ExperimentConfig::c_min)},
      {"epsilon", number(&ExperimentConfig::epsilon)},
      {"init_scale", number(&ExperimentConfig::init_scale)},
      {"runs", number(&ExperimentConfig::runs)},
      {"trials", number(&ExperimentConfig::trials)},
      {"step_cap", optional_number(&ExperimentConfig::step_cap)},
      {"timeout_reward", number(&ExperimentConfig::timeout_reward)},
      {"seed", number(&ExperimentConfig::seed)},
  };
  return table;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

LoadUnloadSpec ExperimentConfig::domain_spec() const {
  LoadUnloadSpec spec = load_unload_preset(domain);
  if (locations) spec.location_count = *locations;
  if (unload_position) spec.unload_position = *unload_position;
  if (loading_positions) spec.loading_positions = *loading_positions;
  if (bad_loading_positions) spec.bad_loading_positions = *bad_loading_positions;
  return spec;
}

double ExperimentConfig::resolved_c_max() const {
  return c_max.value_or(algorithm == Algorithm::Vaps ? 1.0 : 0.2);
}

double ExperimentConfig::resolved_c_min() const {
  return c_min.value_or(algorithm == Algorithm::Vaps ? 0.2 : 0.1);
}

ScheduleParams ExperimentConfig::schedule() const {
  return {alpha0, resolved_c_max(), resolved_c_min(), trials};
}

std::size_t ExperimentConfig::resolved_step_cap() const {
  if (step_cap) return *step_cap;
  return 4 * optimal_trial_length(domain_spec(), memory);
}

void ExperimentConfig::validate() const {
  std::vector<std::string> problems;
  auto check = [&](bool ok, const std::string& message) {
    if (!ok) problems.push_back(message);
  };
  auto guarded = [&](const char* field, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      problems.push_back(std::string(field) + ": " + e.what());
    }
  };

  bool domain_ok = false;
  guarded("domain", [&] {
    domain_spec().validate();
    domain_ok = true;
  });
  guarded("memory_bits", [&] { memory.validate(); });

  check(lambda >= 0.0 && lambda <= 1.0, "lambda: must lie in [0, 1]");
  check(beta >= 0.0 && beta <= 1.0, "beta: must lie in [0, 1]");
  check(gamma > 0.0 && gamma <= 1.0, "gamma: must lie in (0, 1]");
  check(std::isfinite(b), "b: must be finite");
  check(alpha0 > 0.0, "alpha0: must be > 0");
  check(resolved_c_min() >= kMinTemperature, "c_min: must be >= 1e-6");
  check(resolved_c_max() >= resolved_c_min(), "c_max: must be >= c_min");
  check(epsilon >= 0.0 && epsilon <= 1.0, "epsilon: must lie in [0, 1]");
  check(algorithm != Algorithm::Vaps || epsilon == 0.0,
        "epsilon: VAPS differentiates pure Boltzmann selection and requires epsilon = 0");
  check(init_scale >= 0.0 && std::isfinite(init_scale), "init_scale: must be >= 0");
  check(runs >= 1, "runs: must be >= 1");
  check(trials >= 1, "trials: must be >= 1");
  check(std::isfinite(timeout_reward), "timeout_reward: must be finite");

  if (domain_ok && memory.bit_count <= kMaxMemoryBits) {
    guarded("step_cap", [&] {
      const std::size_t optimum = optimal_trial_length(domain_spec(), memory);
      if (step_cap && *step_cap < optimum) {
        throw std::invalid_argument("must be >= the optimal trial length " +
                                    std::to_string(optimum));
      }
    });
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::vector<std::string> problems;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    const std::string where = "line " + std::to_string(line_no);
    if (eq == std::string::npos) {
      problems.push_back(where + ": expected 'key = value'");
      continue;
    }
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      problems.push_back(key + ": unknown key (" + where + ")");
      continue;
    }
    if (!seen.insert(key).second) {
      problems.push_back(key + ": duplicate key (" + where + ")");
      continue;
    }
    if (!it->second(cfg, value)) {
      problems.push_back(key + ": invalid value '" + value + "' (" + where + ")");
    }
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"config: cannot open " + path.string()});
  return parse_config(in);
}

std::string to_string(Algorithm a) { return a == Algorithm::Vaps ? "vaps" : "sarsa"; }
std::string to_string(MemoryMode m) { return m == MemoryMode::Augment ? "augment" : "compose"; }
std::string to_string(MemoryActionStyle s) {
  return s == MemoryActionStyle::SetClear ? "set-clear" : "flip";
}
std::string to_string(SarsaUpdateMode m) {
  return m == SarsaUpdateMode::Online ? "online" : "offline";
}
std::string to_string(TraceKind k) {
  return k == TraceKind::Replacing ? "replacing" : "accumulating";
}

std::string to_config_text(const ExperimentConfig& cfg) {
  const LoadUnloadSpec spec = cfg.domain_spec();
  std::ostringstream out;
  out << "domain = " << cfg.domain << '\n'
      << "locations = " << spec.location_count << '\n'
      << "unload_position = " << spec.unload_position << '\n'
      << "loading_positions = " << list_text(spec.loading_positions) << '\n'
      << "bad_loading_positions = " << list_text(spec.bad_loading_positions) << '\n'
      << "memory_bits = " << cfg.memory.bit_count << '\n'
      << "memory_mode = " << to_string(cfg.memory.mode) << '\n'
      << "memory_action_style = " << to_string(cfg.memory.style) << '\n'
      << "discount_memory_actions = " << (cfg.memory.discount_memory_actions ? "true" : "false")
      << '\n'
      << "algorithm = " << to_string(cfg.algorithm) << '\n'
      << "lambda = " << format_real(cfg.lambda) << '\n'
      << "beta = " << format_real(cfg.beta) << '\n'
      << "gamma = " << format_real(cfg.gamma) << '\n'
      << "b = " << format_real(cfg.b) << '\n'
      << "sarsa_update = " << to_string(cfg.sarsa_update) << '\n'
      << "sarsa_traces = " << to_string(cfg.sarsa_traces) << '\n'
      << "alpha0 = " << format_real(cfg.alpha0) << '\n'
      << "c_max = " << format_real(cfg.resolved_c_max()) << '\n'
      << "c_min = " << format_real(cfg.resolved_c_min()) << '\n'
      << "epsilon = " << format_real(cfg.epsilon) << '\n'
      << "init_scale = " << format_real(cfg.init_scale) << '\n'
      << "runs = " << cfg.runs << '\n'
      << "trials = " << cfg.trials << '\n'
      << "step_cap = " << cfg.resolved_step_cap() << '\n'
      << "timeout_reward = " << format_real(cfg.timeout_reward) << '\n'
      << "seed = " << cfg.seed << '\n';
  return out.str();
}

}  // namespace stigmergy
