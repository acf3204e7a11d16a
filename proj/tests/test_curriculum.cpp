#include <catch_amalgamated.hpp>

#include <map>
#include <set>

#include "support.hpp"

using namespace locm;
using Catch::Matchers::WithinAbs;

namespace {

const std::vector<double> kGrid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};

struct Setup {
  TrainingPools pools;
  ExampleSet eval;
};

Setup balanced(int per_pool = 30, int per_eval = 10) {
  Setup s;
  for (auto r : kAllRegimes) {
    for (int i = 0; i < per_pool; ++i) s.pools[r].push_back({std::string(to_string(r)) + std::to_string(i), r});
    for (int i = 0; i < per_eval; ++i) s.eval.push_back({"eval-" + std::string(to_string(r)) + std::to_string(i), r});
  }
  return s;
}

SimulatedTrainer forgetting_trainer(std::uint64_t seed) {
  SimulatedTrainer t;
  t.forgetting = 0.1;
  t.noise = 0.2;
  t.seed = seed;
  return t;
}

void check_ledger(const CurriculumProgress& p, const CurriculumParams& params) {
  double a_old = p.initial_accuracy;
  std::map<int, int> steps;
  for (const auto& h : p.history) {
    CHECK(h.a_old >= a_old);
    CHECK(h.a_old >= h.accuracy - 1e-15);
    a_old = h.a_old;
    ++steps[h.stage];
  }
  for (const auto& [stage, n] : steps) CHECK(n <= params.max_steps_per_stage);
}

}  // namespace

TEST_CASE("interpolate: endpoints, worked example, affinity") {
  ParameterVector nl{{0.0, 2.0}, "NL"}, fo{{2.0, 0.0}, "FOL"};
  CHECK(interpolate(nl, fo, 0.0).values == nl.values);
  CHECK(interpolate(nl, fo, 1.0).values == fo.values);
  auto mid = interpolate(nl, fo, 0.3);
  CHECK_THAT(mid.values[0], WithinAbs(0.6, 1e-15));
  CHECK_THAT(mid.values[1], WithinAbs(1.4, 1e-15));
  CHECK(mid.tag == "lambda=0.3");

  CHECK_THROWS_AS(interpolate(nl, {{1.0}, ""}, 0.5), Error);
  CHECK_THROWS_AS(interpolate(nl, fo, 1.5), Error);

  synthetic::Rng rng(6);
  for (int t = 0; t < 300; ++t) {
    ParameterVector a, b;
    for (int i = 0; i < 8; ++i) {
      a.values.push_back(synthetic::uniform(rng, -5, 5));
      b.values.push_back(synthetic::uniform(rng, -5, 5));
    }
    double l = synthetic::uniform01(rng);
    auto x = interpolate(a, b, l), y = interpolate(b, a, l);
    for (std::size_t i = 0; i < a.values.size(); ++i)
      CHECK_THAT(x.values[i] + y.values[i], WithinAbs(a.values[i] + b.values[i], 1e-12));
  }
}

TEST_CASE("lambda sweep: argmax on a landscape peaking at 0.3") {
  test::TentTrainer tent;
  auto r = lambda_sweep({{0.0}, "NL"}, {{1.0}, "FOL"}, kGrid, tent, {}, {});
  CHECK(r.best_lambda == 0.3);
  CHECK(r.theta_mix.values == std::vector<double>{0.3});
  CHECK(r.theta_mix.tag == "lambda=0.3");
  REQUIRE(r.rows.size() == kGrid.size());
  for (const auto& row : r.rows) CHECK(*row.accuracy <= *r.rows[3].accuracy);

  auto parallel = lambda_sweep({{0.0}, "NL"}, {{1.0}, "FOL"}, kGrid, tent, {}, {}, SweepParams{0, 16, 0.1, 0, 4});
  CHECK(parallel.best_lambda == 0.3);
}

TEST_CASE("lambda sweep: single point and ties") {
  test::TentTrainer tent;
  CHECK(lambda_sweep({{0.0}, ""}, {{1.0}, ""}, {0.5}, tent, {}, {}).best_lambda == 0.5);
  test::TentTrainer twin{0.4, 0.6};
  CHECK(lambda_sweep({{0.0}, ""}, {{1.0}, ""}, kGrid, twin, {}, {}).best_lambda == 0.4);
  std::vector<double> reversed(kGrid.rbegin(), kGrid.rend());
  CHECK(lambda_sweep({{0.0}, ""}, {{1.0}, ""}, reversed, twin, {}, {}).best_lambda == 0.4);

  CHECK_THROWS_AS(lambda_sweep({{0.0}, ""}, {{1.0}, ""}, {}, tent, {}, {}), Error);
  CHECK_THROWS_AS(lambda_sweep({{0.0}, ""}, {{1.0}, ""}, {1.2}, tent, {}, {}), Error);
}

TEST_CASE("lambda sweep: a failing lambda is recorded and skipped") {
  auto s = balanced(5, 2);
  SimulatedTrainer t;
  // The simulator needs three parameters; a two-element endpoint fails at every lambda.
  CHECK_THROWS_AS(lambda_sweep({{0.1, 0.2}, ""}, {{0.9, 0.8}, ""}, kGrid, t, {}, s.eval), Error);

  SweepParams params;
  params.finetune_steps = 5;
  params.seed = 2;
  ExampleSet finetune = s.pools[Regime::Easy];
  auto r = lambda_sweep({{0.2, 0.2, 0.2}, "NL"}, {{0.6, 0.5, 0.4}, "FOL"}, {0.0, 0.5, 1.0}, t, finetune, s.eval,
                        params);
  CHECK(r.best_lambda == 1.0);
  for (const auto& row : r.rows) CHECK(row.error.empty());
}

TEST_CASE("curriculum on the simulator: termination, ledger, improvement") {
  auto s = balanced();
  SimulatedTrainer t;
  t.noise = 0.2;
  t.seed = 5;
  CurriculumParams params;
  params.seed = 11;
  auto r = run_curriculum(s.pools, SimState{}, t, s.eval, params);
  CHECK_FALSE(r.progress.history.empty());
  CHECK(r.progress.history.size() <= 3u * static_cast<std::size_t>(params.max_steps_per_stage));
  check_ledger(r.progress, params);
  CHECK(r.progress.final_accuracy >= r.progress.initial_accuracy);
  for (double skill : r.state.skill) {
    CHECK(skill >= 0.0);
    CHECK(skill <= 1.0);
  }
  CHECK(r.progress.history.back().stage == 3);

  auto again = run_curriculum(s.pools, SimState{}, t, s.eval, params);
  CHECK(again.state == r.state);
  CHECK(again.progress.history.size() == r.progress.history.size());
}

TEST_CASE("property: the a_old ledger is monotone for any seed and setting") {
  synthetic::Rng rng(404);
  for (int trial = 0; trial < 60; ++trial) {
    auto s = balanced(synthetic::uniform_int(rng, 1, 20), 3);
    SimulatedTrainer t;
    t.forgetting = synthetic::uniform(rng, 0, 0.3);
    t.noise = synthetic::uniform(rng, 0, 0.9);
    t.seed = rng();
    CurriculumParams params;
    params.eta = synthetic::uniform(rng, 0.01, 0.5);
    params.epsilon = synthetic::uniform(rng, 1e-6, 0.01);
    params.max_steps_per_stage = synthetic::uniform_int(rng, 1, 50);
    params.seed = rng();
    auto r = run_curriculum(s.pools, SimState{}, t, s.eval, params);
    check_ledger(r.progress, params);
    auto x = run_stage_exclusive(s.pools, SimState{}, t, s.eval, params);
    check_ledger(x.progress, params);
  }
}

TEST_CASE("an unreachable epsilon stops every stage after one step") {
  auto s = balanced();
  CurriculumParams params;
  params.epsilon = 1.0;
  auto r = run_curriculum(s.pools, SimState{}, SimulatedTrainer{}, s.eval, params);
  REQUIRE(r.progress.history.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(r.progress.history[static_cast<std::size_t>(i)].stage == i + 1);
    CHECK(r.progress.history[static_cast<std::size_t>(i)].step == 1);
  }
}

TEST_CASE("with forgetting, cumulative sampling beats per-stage-exclusive sampling") {
  auto s = balanced();
  CurriculumParams params;
  params.seed = 1;
  auto t = forgetting_trainer(3);
  auto cumulative = run_curriculum(s.pools, SimState{}, t, s.eval, params);
  auto exclusive = run_stage_exclusive(s.pools, SimState{}, t, s.eval, params);
  INFO("cumulative " << cumulative.progress.final_accuracy << " exclusive " << exclusive.progress.final_accuracy);
  CHECK(cumulative.progress.final_accuracy > exclusive.progress.final_accuracy);
  // The exclusive arm ends training on Hard only, so Easy skill decays.
  CHECK(cumulative.state[Regime::Easy] > exclusive.state[Regime::Easy]);

  // Not an accident of one seed.
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    params.seed = seed;
    auto tr = forgetting_trainer(seed);
    wins += run_curriculum(s.pools, SimState{}, tr, s.eval, params).progress.final_accuracy >
            run_stage_exclusive(s.pools, SimState{}, tr, s.eval, params).progress.final_accuracy;
  }
  CHECK(wins == 20);
}

TEST_CASE("without forgetting, both arms saturate to the same accuracy") {
  // A vanishing epsilon lets every stage run until gains stop; the stopping
  // rule would otherwise truncate the mixed-batch stages early.
  auto s = balanced();
  CurriculumParams params;
  params.epsilon = 1e-12;
  params.max_steps_per_stage = 400;
  SimulatedTrainer t;
  auto a = run_curriculum(s.pools, SimState{}, t, s.eval, params);
  auto b = run_stage_exclusive(s.pools, SimState{}, t, s.eval, params);
  CHECK_THAT(a.progress.final_accuracy, WithinAbs(b.progress.final_accuracy, 0.01));
  CHECK(a.progress.final_accuracy > 0.99);
}

TEST_CASE("hard-only training on a forgetting simulator trades Easy skill for Hard skill") {
  auto s = balanced();
  SimulatedTrainer t;
  t.forgetting = 0.05;
  SimState start;
  start.skill = {0.9, 0.6, 0.34};
  CurriculumParams params;
  params.max_steps_per_stage = 30;
  auto r = run_single_regime(Regime::Hard, s.pools, start, t, s.eval, params);
  CHECK(r.state[Regime::Hard] > start[Regime::Hard]);
  CHECK(r.state[Regime::Easy] < start[Regime::Easy]);

  // One step against the closed form.
  ExampleSet hard_batch(4, TrainingExample{"h", Regime::Hard});
  auto step = t.train_step(start, hard_batch, 0.1);
  CHECK_THAT(step.state[Regime::Hard], WithinAbs(0.34 + 0.1 * 0.6 * (1 - 0.34), 1e-15));
  CHECK_THAT(step.state[Regime::Easy], WithinAbs(0.9 - 0.05 * (0.9 - 1.0 / 3.0), 1e-15));
  CHECK_THAT(step.loss, WithinAbs(-std::log(step.state[Regime::Hard]), 1e-15));
  CHECK(start.skill[0] == 0.9);  // input untouched
}

TEST_CASE("empty pools") {
  auto s = balanced();
  s.pools[Regime::Medium].clear();
  auto r = run_stage_exclusive(s.pools, SimState{}, SimulatedTrainer{}, s.eval);
  REQUIRE(r.progress.warnings.size() == 1);
  CHECK(r.progress.warnings[0].find("stage 2") != std::string::npos);
  for (const auto& h : r.progress.history) CHECK(h.stage != 2);

  TrainingPools none;
  try {
    run_curriculum(none, SimState{}, SimulatedTrainer{}, s.eval);
    FAIL("expected EmptyPool");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyPool);
  }
  CHECK_THROWS_AS(run_single_regime(Regime::Medium, s.pools, SimState{}, SimulatedTrainer{}, s.eval), Error);
  CurriculumParams bad;
  bad.epsilon = 0.0;
  CHECK_THROWS_AS(run_curriculum(balanced().pools, SimState{}, SimulatedTrainer{}, s.eval, bad), Error);
}

TEST_CASE("pools and holdout split") {
  auto pool = stratify_scores({{"a", 1}, {"b", 2}, {"c", 5}, {"d", 8}, {"e", 9}}, {{1, 4, 6, 0}}, HardBound::Max);
  auto pools = pools_from(pool);
  CHECK(pools[Regime::Easy].size() == 2);
  CHECK(pools[Regime::Medium].size() == 1);
  CHECK(pools[Regime::Hard].size() == 2);
  CHECK(pools[Regime::Hard][0].regime == Regime::Hard);

  auto s = balanced(20, 0);
  auto split = split_holdout(s.pools, 0.25, 7);
  CHECK(split.eval.size() == 15);
  CHECK(split.train.size() == 45);
  std::set<std::string> ids;
  for (const auto& e : split.eval) ids.insert(e.id);
  for (auto r : kAllRegimes)
    for (const auto& e : split.train[r]) CHECK(ids.insert(e.id).second);
  CHECK(ids.size() == 60);
  auto again = split_holdout(s.pools, 0.25, 7);
  CHECK(again.eval.size() == split.eval.size());
  for (std::size_t i = 0; i < split.eval.size(); ++i) CHECK(again.eval[i].id == split.eval[i].id);

  TrainingPools tiny;
  tiny[Regime::Easy].push_back({"only", Regime::Easy});
  CHECK(split_holdout(tiny, 0.5, 1).train[Regime::Easy].size() == 1);
  CHECK_THROWS_AS(split_holdout(tiny, 1.0, 1), Error);
}
