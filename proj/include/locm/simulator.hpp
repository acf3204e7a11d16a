#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

#include "locm/curriculum.hpp"
#include "locm/digest.hpp"
#include "locm/error.hpp"

namespace locm {

// Skill per regime plus the step counter that drives the noise stream.
struct SimState {
  std::array<double, 3> skill{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  std::uint64_t steps = 0;

  double operator[](Regime r) const { return skill[static_cast<std::size_t>(r)]; }
  friend bool operator==(const SimState&, const SimState&) = default;
};

// Desk-scale trainer. For regime r with batch fraction f_r, one step applies
//   skill += eta * gain_r * f_r * (1 - skill) * (1 + noise * u)
//   skill -= forgetting * (1 - f_r) * (skill - floor)
// with u in [-1, 1] drawn from (seed, step, r). Loss is the batch mean of -log(skill).
class SimulatedTrainer {
 public:
  using State = SimState;

  std::array<double, 3> gain{1.0, 0.8, 0.6};
  double forgetting = 0.0;
  double noise = 0.0;
  double floor = 1.0 / 3.0;
  std::uint64_t seed = 0;

  StepResult<State> train_step(const State& in, const ExampleSet& batch, double eta) const {
    if (batch.empty()) throw Error(ErrorCode::InvalidArgument, "empty training batch");
    std::array<double, 3> frac{};
    for (const auto& ex : batch) frac[static_cast<std::size_t>(ex.regime)] += 1.0;
    for (auto& f : frac) f /= static_cast<double>(batch.size());

    State out = in;
    ++out.steps;
    for (std::size_t r = 0; r < 3; ++r) {
      double s = out.skill[r];
      s += eta * gain[r] * frac[r] * (1.0 - s) * (1.0 + noise * unit_noise(out.steps, r));
      s -= forgetting * (1.0 - frac[r]) * (s - floor);
      out.skill[r] = std::clamp(s, 0.0, 1.0);
    }
    double loss = 0.0;
    for (const auto& ex : batch) loss -= std::log(std::max(out.skill[static_cast<std::size_t>(ex.regime)], 1e-12));
    return {out, loss / static_cast<double>(batch.size())};
  }

  /// Skill averaged over the evaluation set's regime composition.
  double evaluate(const State& state, const ExampleSet& eval_set) const {
    if (eval_set.empty()) throw Error(ErrorCode::InvalidArgument, "empty evaluation set");
    double sum = 0.0;
    for (const auto& ex : eval_set) sum += state[ex.regime];
    return sum / static_cast<double>(eval_set.size());
  }

  State from_parameters(const ParameterVector& p) const {
    if (p.values.size() != 3) throw Error(ErrorCode::LengthMismatch, "simulator parameters hold 3 skills");
    State s;
    for (std::size_t r = 0; r < 3; ++r) s.skill[r] = std::clamp(p.values[r], 0.0, 1.0);
    return s;
  }

  ParameterVector to_parameters(const State& s) const { return {{s.skill.begin(), s.skill.end()}, "simulator"}; }

 private:
  double unit_noise(std::uint64_t step, std::size_t regime) const {
    if (noise == 0.0) return 0.0;
    return 2.0 * hash_unit(std::to_string(seed) + ":" + std::to_string(step) + ":" + std::to_string(regime)) - 1.0;
  }
};

static_assert(ParametricTrainer<SimulatedTrainer>);

}  // namespace locm
