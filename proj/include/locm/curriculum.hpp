#pragma once

#include <algorithm>
#include <array>
#include <concepts>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "locm/corpus.hpp"
#include "locm/error.hpp"
#include "locm/json.hpp"
#include "locm/synthetic.hpp"

namespace locm {

struct ParameterVector {
  std::vector<double> values;
  std::string tag;

  friend bool operator==(const ParameterVector&, const ParameterVector&) = default;
};

inline void to_json(Json& j, const ParameterVector& p) { j = Json{{"tag", p.tag}, {"values", p.values}}; }

inline std::string lambda_tag(double lambda) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "lambda=%g", lambda);
  return buf;
}

/// (1 - lambda) * theta_nl + lambda * theta_fol, exact at both endpoints.
inline ParameterVector interpolate(const ParameterVector& theta_nl, const ParameterVector& theta_fol, double lambda) {
  if (theta_nl.values.size() != theta_fol.values.size())
    throw Error(ErrorCode::LengthMismatch, "parameter vectors differ in length");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(ErrorCode::InvalidArgument, "lambda must lie in [0, 1]");
  ParameterVector out;
  out.tag = lambda_tag(lambda);
  out.values.resize(theta_nl.values.size());
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (lambda == 0.0)
      out.values[i] = theta_nl.values[i];
    else if (lambda == 1.0)
      out.values[i] = theta_fol.values[i];
    else
      out.values[i] = (1.0 - lambda) * theta_nl.values[i] + lambda * theta_fol.values[i];
  }
  return out;
}

enum class Regime { Easy, Medium, Hard };
inline constexpr std::array<Regime, 3> kAllRegimes = {Regime::Easy, Regime::Medium, Regime::Hard};

constexpr std::string_view to_string(Regime r) noexcept {
  switch (r) {
    case Regime::Easy: return "Easy";
    case Regime::Medium: return "Medium";
    case Regime::Hard: return "Hard";
  }
  return "?";
}

struct TrainingExample {
  std::string id;
  Regime regime = Regime::Easy;
};

using ExampleSet = std::vector<TrainingExample>;

template <class S>
struct StepResult {
  S state;
  double loss = 0.0;
};

// train_step returns a new state and never modifies its input.
template <class T>
concept Trainer = requires(const T& t, const typename T::State& s, const ExampleSet& batch, double eta) {
  { t.train_step(s, batch, eta) } -> std::same_as<StepResult<typename T::State>>;
  { t.evaluate(s, batch) } -> std::convertible_to<double>;
};

template <class T>
concept ParametricTrainer = Trainer<T> && requires(const T& t, const typename T::State& s, const ParameterVector& p) {
  { t.from_parameters(p) } -> std::same_as<typename T::State>;
  { t.to_parameters(s) } -> std::same_as<ParameterVector>;
};

// -- pools ----------------------------------------------------------------

struct TrainingPools {
  std::array<ExampleSet, 3> by_regime;  // Easy, Medium, Hard

  const ExampleSet& operator[](Regime r) const { return by_regime[static_cast<std::size_t>(r)]; }
  ExampleSet& operator[](Regime r) { return by_regime[static_cast<std::size_t>(r)]; }
  std::size_t size() const { return by_regime[0].size() + by_regime[1].size() + by_regime[2].size(); }
};

inline TrainingPools pools_from(const ExperiencePool& pool) {
  TrainingPools out;
  for (const auto& id : pool.easy) out[Regime::Easy].push_back({id, Regime::Easy});
  for (const auto& id : pool.medium) out[Regime::Medium].push_back({id, Regime::Medium});
  for (const auto& id : pool.hard) out[Regime::Hard].push_back({id, Regime::Hard});
  return out;
}

struct HoldoutSplit {
  TrainingPools train;
  ExampleSet eval;
};

/// Moves a seeded fraction of every regime into a shared evaluation set.
/// Regimes with a single example stay entirely in training.
inline HoldoutSplit split_holdout(const TrainingPools& pools, double eval_fraction, std::uint64_t seed) {
  if (!(eval_fraction >= 0.0 && eval_fraction < 1.0))
    throw Error(ErrorCode::InvalidArgument, "eval fraction must lie in [0, 1)");
  synthetic::Rng rng(seed);
  HoldoutSplit out;
  for (auto r : kAllRegimes) {
    auto items = pools[r];
    for (std::size_t i = items.size(); i > 1; --i)
      std::swap(items[i - 1], items[static_cast<std::size_t>(synthetic::uniform_int(rng, 0, static_cast<int>(i) - 1))]);
    std::size_t k = 0;
    if (items.size() >= 2 && eval_fraction > 0.0)
      k = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(eval_fraction * items.size())), 1, items.size() - 1);
    out.eval.insert(out.eval.end(), items.begin(), items.begin() + static_cast<std::ptrdiff_t>(k));
    out.train[r].assign(items.begin() + static_cast<std::ptrdiff_t>(k), items.end());
  }
  return out;
}

// -- stage 1: interpolation sweep ----------------------------------------

struct SweepParams {
  int finetune_steps = 0;
  int batch_size = 16;
  double eta = 0.1;
  std::uint64_t seed = 0;
  int parallelism = 1;
};

struct SweepRow {
  double lambda = 0.0;
  std::optional<double> accuracy;
  std::string error;
};

struct SweepResult {
  double best_lambda = 0.0;
  ParameterVector theta_mix;
  std::vector<SweepRow> rows;
};

namespace detail {

inline ExampleSet sample_batch(synthetic::Rng& rng, const ExampleSet& from, int batch_size) {
  ExampleSet batch;
  batch.reserve(static_cast<std::size_t>(batch_size));
  for (int i = 0; i < batch_size; ++i)
    batch.push_back(from[static_cast<std::size_t>(synthetic::uniform_int(rng, 0, static_cast<int>(from.size()) - 1))]);
  return batch;
}

}  // namespace detail

/// Interpolates, fine-tunes and evaluates each lambda. The best accuracy wins,
/// ties going to the smaller lambda. A failing lambda is recorded and skipped.
template <ParametricTrainer T>
SweepResult lambda_sweep(const ParameterVector& theta_nl, const ParameterVector& theta_fol,
                         const std::vector<double>& lambdas, const T& trainer, const ExampleSet& finetune_set,
                         const ExampleSet& validation_set, const SweepParams& params = {}) {
  if (lambdas.empty()) throw Error(ErrorCode::InvalidArgument, "lambda grid is empty");
  for (double l : lambdas)
    if (!(l >= 0.0 && l <= 1.0)) throw Error(ErrorCode::InvalidArgument, "lambda grid must lie in [0, 1]");

  std::vector<SweepRow> rows(lambdas.size());
  std::vector<std::optional<typename T::State>> states(lambdas.size());
  auto run_one = [&](std::size_t i) {
    rows[i].lambda = lambdas[i];
    try {
      auto state = trainer.from_parameters(interpolate(theta_nl, theta_fol, lambdas[i]));
      if (params.finetune_steps > 0 && !finetune_set.empty()) {
        synthetic::Rng rng(params.seed + i);
        for (int s = 0; s < params.finetune_steps; ++s)
          state = trainer.train_step(state, detail::sample_batch(rng, finetune_set, params.batch_size), params.eta).state;
      }
      rows[i].accuracy = trainer.evaluate(state, validation_set);
      states[i] = std::move(state);
    } catch (const std::exception& e) {
      rows[i].error = e.what();
    }
  };

  std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, params.parallelism)), 1, lambdas.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < lambdas.size(); ++i) run_one(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < lambdas.size(); i += workers) run_one(i);
      });
    for (auto& t : pool) t.join();
  }

  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].accuracy) continue;
    if (!best || *rows[i].accuracy > *rows[*best].accuracy ||
        (*rows[i].accuracy == *rows[*best].accuracy && rows[i].lambda < rows[*best].lambda))
      best = i;
  }
  if (!best) throw Error(ErrorCode::InvalidArgument, "every lambda in the sweep failed");
  SweepResult out;
  out.best_lambda = rows[*best].lambda;
  out.theta_mix = trainer.to_parameters(*states[*best]);
  out.theta_mix.tag = lambda_tag(out.best_lambda);
  out.rows = std::move(rows);
  return out;
}

// -- stage 2: curriculum --------------------------------------------------

struct CurriculumParams {
  double epsilon = 0.002;
  int batch_size = 16;
  double eta = 0.1;
  int max_steps_per_stage = 200;
  std::uint64_t seed = 0;
};

struct HistoryEntry {
  int stage = 0;
  int step = 0;
  double accuracy = 0.0;
  double delta = 0.0;
  double a_old = 0.0;
  double loss = 0.0;
  std::array<std::size_t, 3> pool_sizes{};
};

inline void to_json(Json& j, const HistoryEntry& h) {
  j = Json{{"stage", h.stage},
           {"step", h.step},
           {"accuracy", round3(h.accuracy)},
           {"delta", round3(h.delta)},
           {"a_old", round3(h.a_old)},
           {"loss", round3(h.loss)},
           {"pool_sizes", h.pool_sizes}};
}

struct CurriculumProgress {
  int stage = 0;
  double a_old = 0.0;
  double a_new = 0.0;
  double delta = 0.0;
  double epsilon = 0.0;
  double initial_accuracy = 0.0;
  double final_accuracy = 0.0;
  std::vector<HistoryEntry> history;
  std::vector<std::string> warnings;
};

template <class S>
struct CurriculumResult {
  S state;
  CurriculumProgress progress;
};

enum class Sampling { Cumulative, Exclusive };

/// Runs the given stages in order. Each stage trains on the union of the
/// listed regimes until the accuracy gain over the best-so-far drops to
/// epsilon or below, or the step guard is hit.
template <Trainer T>
CurriculumResult<typename T::State> run_stages(const std::vector<std::vector<Regime>>& stages,
                                               const TrainingPools& pools, typename T::State state,
                                               const T& trainer, const ExampleSet& eval_set,
                                               const CurriculumParams& params) {
  if (!(params.epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (params.batch_size < 1 || params.max_steps_per_stage < 1)
    throw Error(ErrorCode::InvalidArgument, "batch size and step guard must be positive");
  if (pools.size() == 0) throw Error(ErrorCode::EmptyPool, "all experience pools are empty");

  CurriculumProgress progress;
  progress.epsilon = params.epsilon;
  progress.initial_accuracy = trainer.evaluate(state, eval_set);
  progress.a_old = progress.a_new = progress.initial_accuracy;
  const std::array<std::size_t, 3> sizes{pools[Regime::Easy].size(), pools[Regime::Medium].size(),
                                         pools[Regime::Hard].size()};
  synthetic::Rng rng(params.seed);

  for (std::size_t si = 0; si < stages.size(); ++si) {
    int stage = static_cast<int>(si) + 1;
    const Regime newest = stages[si].back();
    if (pools[newest].empty()) {
      progress.warnings.push_back("stage " + std::to_string(stage) + " skipped: " + std::string(to_string(newest)) +
                                  " pool is empty");
      continue;
    }
    ExampleSet sample_from;
    for (auto r : stages[si]) sample_from.insert(sample_from.end(), pools[r].begin(), pools[r].end());
    progress.stage = stage;
    for (int step = 1; step <= params.max_steps_per_stage; ++step) {
      auto batch = detail::sample_batch(rng, sample_from, params.batch_size);
      auto result = trainer.train_step(state, batch, params.eta);
      state = std::move(result.state);
      progress.a_new = trainer.evaluate(state, eval_set);
      progress.delta = progress.a_new - progress.a_old;
      if (progress.delta > 0.0) progress.a_old = progress.a_new;
      progress.history.push_back(
          {stage, step, progress.a_new, progress.delta, progress.a_old, result.loss, sizes});
      if (progress.delta <= params.epsilon) break;
    }
  }
  progress.final_accuracy = trainer.evaluate(state, eval_set);
  return {std::move(state), std::move(progress)};
}

/// Algorithm 1, stage 2: stage i samples from the union of pools 1..i.
template <Trainer T>
CurriculumResult<typename T::State> run_curriculum(const TrainingPools& pools, typename T::State state,
                                                   const T& trainer, const ExampleSet& eval_set,
                                                   const CurriculumParams& params = {}) {
  return run_stages({{Regime::Easy}, {Regime::Easy, Regime::Medium}, {Regime::Easy, Regime::Medium, Regime::Hard}},
                    pools, std::move(state), trainer, eval_set, params);
}

/// Comparison arm: stage i samples only from pool i.
template <Trainer T>
CurriculumResult<typename T::State> run_stage_exclusive(const TrainingPools& pools, typename T::State state,
                                                        const T& trainer, const ExampleSet& eval_set,
                                                        const CurriculumParams& params = {}) {
  return run_stages({{Regime::Easy}, {Regime::Medium}, {Regime::Hard}}, pools, std::move(state), trainer, eval_set,
                    params);
}

/// Comparison arm: a single stage on one regime.
template <Trainer T>
CurriculumResult<typename T::State> run_single_regime(Regime regime, const TrainingPools& pools,
                                                      typename T::State state, const T& trainer,
                                                      const ExampleSet& eval_set, const CurriculumParams& params = {}) {
  if (pools[regime].empty()) throw Error(ErrorCode::EmptyPool, std::string(to_string(regime)) + " pool is empty");
  return run_stages({{regime}}, pools, std::move(state), trainer, eval_set, params);
}

}  // namespace locm
