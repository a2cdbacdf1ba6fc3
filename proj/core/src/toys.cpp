#include "stigmergy/toys.hpp"

#include <charconv>
#include <stdexcept>

#include "stigmergy/domains.hpp"
#include "stigmergy/memory.hpp"
#include "stigmergy/rng.hpp"

namespace stigmergy {

namespace {

constexpr Action kLeft{0};
constexpr Action kRight{1};

Toy finish(std::string name, PomdpModel model, std::size_t horizon) {
  model.validate();
  return {std::move(name), std::make_shared<const PomdpModel>(std::move(model)), horizon};
}

Toy bandit() {
  PomdpModel m(1, 1, 2);
  m.set_initial({1.0});
  m.set_observation(0, {0});
  m.add_transition(0, {0}, {1.0, 0, 1.0, true});
  m.add_transition(0, {1}, {1.0, 0, 0.0, true});
  return finish("bandit", std::move(m), 1);
}

Toy chain() {
  PomdpModel m(2, 2, 2);
  m.set_initial({1.0, 0.0});
  m.set_observation(0, {0});
  m.set_observation(1, {1});
  m.add_transition(0, kLeft, {1.0, 0, 0.0, false});
  m.add_transition(0, kRight, {1.0, 1, 0.0, false});
  m.add_transition(1, kLeft, {1.0, 0, 0.0, false});
  m.add_transition(1, kRight, {1.0, 1, 1.0, true});
  return finish("chain", std::move(m), 4);
}

Toy noisy() {
  PomdpModel m(2, 2, 2);
  m.set_initial({0.7, 0.3});
  m.set_observation(0, {0});
  m.set_observation(1, {1});
  m.add_transition(0, {0}, {0.6, 1, 0.0, false});
  m.add_transition(0, {0}, {0.4, 0, 1.0, true});
  m.add_transition(0, {1}, {0.5, 0, 0.0, false});
  m.add_transition(0, {1}, {0.5, 1, 0.2, false});
  m.add_transition(1, {0}, {0.5, 0, 1.0, true});
  m.add_transition(1, {0}, {0.5, 0, -0.3, false});
  m.add_transition(1, {1}, {1.0, 1, 0.0, true});
  return finish("noisy", std::move(m), 4);
}

Toy aliased() {
  PomdpModel m(3, 2, 2);
  m.set_initial({1.0, 0.0, 0.0});
  m.set_observation(0, {0});
  m.set_observation(1, {1});
  m.set_observation(2, {1});
  m.add_transition(0, kLeft, {1.0, 0, 0.0, false});
  m.add_transition(0, kRight, {1.0, 1, 0.0, false});
  m.add_transition(1, kLeft, {1.0, 0, 0.0, false});
  m.add_transition(1, kRight, {1.0, 2, 0.0, false});
  m.add_transition(2, kLeft, {1.0, 1, 0.0, false});
  m.add_transition(2, kRight, {1.0, 2, 1.0, true});
  return finish("aliased", std::move(m), 5);
}

Toy load_unload_3() {
  const PomdpModel base = make_load_unload_model(load_unload_preset("load-unload-3"));
  return finish("load-unload-3", augment_model(base, {1, MemoryMode::Augment,
                                                      MemoryActionStyle::SetClear, true}),
                5);
}

}  // namespace

Toy random_toy(std::uint64_t seed) {
  Rng rng(split_seed(seed, 0x70f));
  auto pick = [&](std::size_t n) {
    return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
  };
  const std::size_t states = 1 + pick(3);
  const std::size_t observations = std::min<std::size_t>(states, 1 + pick(2));
  PomdpModel m(states, observations, 2);

  std::vector<double> initial(states);
  double total = 0.0;
  for (double& p : initial) total += p = 0.1 + uniform01(rng);
  for (double& p : initial) p /= total;
  m.set_initial(std::move(initial));

  for (std::size_t s = 0; s < states; ++s) m.set_observation(s, {s < observations ? s : pick(observations)});
  for (std::size_t s = 0; s < states; ++s) {
    for (std::size_t a = 0; a < 2; ++a) {
      const std::size_t branches = 1 + pick(2);
      const double split = branches == 1 ? 1.0 : 0.2 + 0.6 * uniform01(rng);
      for (std::size_t k = 0; k < branches; ++k) {
        Transition t;
        t.probability = k == 0 ? split : 1.0 - split;
        t.next_state = pick(states);
        t.terminal = uniform01(rng) < 0.35;
        t.reward = t.terminal || uniform01(rng) < 0.3 ? 2.0 * uniform01(rng) - 1.0 : 0.0;
        m.add_transition(s, {a}, t);
      }
    }
  }
  return finish("random-" + std::to_string(seed), std::move(m), 4);
}

Toy make_toy(std::string_view name) {
  if (name == "bandit") return bandit();
  if (name == "chain") return chain();
  if (name == "noisy") return noisy();
  if (name == "aliased") return aliased();
  if (name == "load-unload-3") return load_unload_3();
  if (name.starts_with("random-")) {
    const std::string_view digits = name.substr(7);
    std::uint64_t seed = 0;
    const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), seed);
    if (ec == std::errc() && end == digits.data() + digits.size() && !digits.empty()) {
      return random_toy(seed);
    }
  }
  throw std::invalid_argument("unknown toy '" + std::string(name) + "'");
}

std::vector<std::string> toy_names() {
  return {"bandit", "chain", "noisy", "aliased", "load-unload-3", "random-<seed>"};
}

}  // namespace stigmergy
