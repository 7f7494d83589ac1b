#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tcs/analysis.hpp"
#include "tcs/errors.hpp"
#include "tcs/noise_mc.hpp"

using namespace tcs;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ExperimentPlan small_plan() {
  ExperimentPlan plan = fig2_plan();
  plan.n_reps = 300;
  plan.n_atoms = 7;
  return plan;
}

bool same(const RunResult& a, const RunResult& b) {
  return a.counts == b.counts && a.p1_hat == b.p1_hat && a.pg_hat == b.pg_hat &&
         a.delta_realized == b.delta_realized;
}

bool same(const EnsembleTable& a, const EnsembleTable& b) {
  if (a.rows.size() != b.rows.size() || a.durations != b.durations) return false;
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    if (!same(a.rows[k], b.rows[k])) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("noise_mc") {

TEST_CASE("durations cover one fringe period without the endpoint") {
  const ExperimentPlan plan = fig2_plan();
  const auto T = plan.durations();
  REQUIRE(T.size() == 8);
  CHECK(T.front() == 10.0);
  const double period = kTwoPi / plan.detuning;
  for (std::size_t i = 0; i < T.size(); ++i) {
    CHECK(T[i] == doctest::Approx(10.0 + period * i / 8.0).epsilon(1e-15));
    CHECK(T[i] == plan_duration(plan, i));
  }
  CHECK(T.back() < 10.0 + period);
  CHECK(plan.reference_duration() == doctest::Approx(10.0 + period / 2.0));
}

TEST_CASE("noise draws stay in their support") {
  SplitMix64 rng(1);
  const double D = kTwoPi * 1000.0, T = 10.0;
  for (int k = 0; k < 10000; ++k) {
    const double u = sample_delta({NoiseKind::uniform_phase, 1.0}, 0.3, D, T, rng) - 0.3;
    CHECK(u >= 0.0);
    CHECK(u * T < kTwoPi);
    const double e = sample_delta({NoiseKind::uniform_energy, 0.5}, 0.0, D, T, rng);
    CHECK(std::abs(e) <= 0.5 * D);
  }
  CHECK(sample_delta({NoiseKind::none, 1.0}, 0.7, D, T, rng) == 0.7);
}

TEST_CASE("gaussian energy noise has the configured spread") {
  SplitMix64 rng(2);
  const double D = 10.0;
  std::vector<double> v;
  for (int k = 0; k < 200000; ++k) v.push_back(sample_delta({NoiseKind::gaussian_energy, 0.2}, 1.0, D, 1.0, rng));
  CHECK(sample_std(v) == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("multinomial counts sum to N and match the probabilities") {
  SplitMix64 rng(3);
  const std::array<double, 4> p{0.1, 0.2, 0.3, 0.4};
  std::array<double, 4> total{};
  const int runs = 20000;
  const std::size_t n = 10;
  for (int k = 0; k < runs; ++k) {
    const RunResult r = sample_counts(p, n, rng);
    CHECK(r.counts[0] + r.counts[1] + r.counts[2] + r.counts[3] == n);
    CHECK(r.p1_hat == doctest::Approx((r.counts[0] + r.counts[2]) / 10.0));
    CHECK(r.pg_hat == doctest::Approx((r.counts[0] + r.counts[1]) / 10.0));
    for (std::size_t i = 0; i < 4; ++i) total[i] += r.counts[i];
  }
  for (std::size_t i = 0; i < 4; ++i) {
    const double mean = total[i] / (runs * 10.0);
    const double se = std::sqrt(p[i] * (1 - p[i]) / (runs * 10.0));
    CHECK(std::abs(mean - p[i]) < 5.0 * se);
  }
  const RunResult certain = sample_counts({0.0, 0.0, 1.0, 0.0}, 5, rng);
  CHECK(certain.counts[2] == 5);
}

TEST_CASE("parallel and serial ensembles are bit-identical") {
  const ExperimentPlan plan = small_plan();
  const EnsembleTable ref = simulate_ensemble_serial(plan);
  for (int threads : {1, 2, 3, 8}) {
    omp_set_num_threads(threads);
    CHECK(same(simulate_ensemble(plan), ref));
    CHECK(same(simulate_ensemble(plan, Splitting::incoherent),
               simulate_ensemble_serial(plan, Splitting::incoherent)));
  }
  omp_set_num_threads(omp_get_num_procs());
}

TEST_CASE("a run does not depend on the size of the campaign") {
  ExperimentPlan a = small_plan();
  ExperimentPlan b = a;
  b.n_reps = a.n_reps * 2;
  const EnsembleTable ta = simulate_ensemble(a);
  const EnsembleTable tb = simulate_ensemble(b);
  for (std::size_t i = 0; i < a.n_durations; ++i) {
    for (std::size_t j = 0; j < a.n_reps; ++j) CHECK(same(ta.at(i, j), tb.at(i, j)));
  }
}

TEST_CASE("different seeds give different tables") {
  ExperimentPlan a = small_plan();
  ExperimentPlan b = a;
  b.seed += 1;
  CHECK_FALSE(same(simulate_ensemble(a), simulate_ensemble(b)));
}

TEST_CASE("per-duration sampling shares delta across repetitions") {
  ExperimentPlan plan = small_plan();
  plan.sampling = DeltaSampling::per_duration;
  const EnsembleTable t = simulate_ensemble(plan);
  for (std::size_t i = 0; i < plan.n_durations; ++i) {
    for (std::size_t j = 1; j < plan.n_reps; ++j) {
      CHECK(t.at(i, j).delta_realized == t.at(i, 0).delta_realized);
    }
  }
  plan.sampling = DeltaSampling::per_run;
  const EnsembleTable u = simulate_ensemble(plan);
  CHECK(u.at(0, 0).delta_realized != u.at(0, 1).delta_realized);
}

TEST_CASE("collapsed split: port is a fair coin and P_g is unchanged") {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    SequenceParams p;
    p.T = 1.0 + 10.0 * U(gen);
    p.detuning = 100.0 * U(gen);
    p.lower_detuning = 1000.0 * U(gen);
    p.epsilon = 0.3 * U(gen);
    const auto q = incoherent_probabilities(p);
    CHECK(q[0] + q[1] + q[2] + q[3] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(q[0] + q[2] == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(q[0] + q[1] == doctest::Approx(closed_form_pg(p)).epsilon(1e-12));
  }
}

TEST_CASE("coherent exit-port spread exceeds the binomial floor") {
  ExperimentPlan plan = small_plan();
  plan.n_durations = 1;
  plan.n_reps = 4000;
  plan.n_atoms = 100;
  plan.t0 = 10.00025;
  const auto coh = p1_values(simulate_ensemble(plan, Splitting::coherent));
  const auto inc = p1_values(simulate_ensemble(plan, Splitting::incoherent));
  CHECK(sample_std(inc) == doctest::Approx(0.05).epsilon(0.05));
  CHECK(sample_std(coh) > 0.3);
}

TEST_CASE("campaign runtime bookkeeping") {
  ExperimentPlan plan = fig2_plan();
  plan.n_atoms = 10;
  plan.n_reps = 1000;
  CHECK(campaign_seconds(plan) / 86400.0 == doctest::Approx(1.4).epsilon(0.01));
  plan.n_reps = 10000;
  plan.t0 = 1.0;
  CHECK(campaign_seconds(plan) / 86400.0 == doctest::Approx(5.6).epsilon(0.01));
}

TEST_CASE("names round-trip and unknown names throw") {
  for (auto k : {NoiseKind::none, NoiseKind::uniform_phase, NoiseKind::uniform_energy,
                 NoiseKind::gaussian_energy}) {
    CHECK(parse_noise_kind(to_string(k)) == k);
  }
  for (auto s : {DeltaSampling::per_run, DeltaSampling::per_duration}) {
    CHECK(parse_delta_sampling(to_string(s)) == s);
  }
  CHECK_THROWS_AS(parse_noise_kind("pink"), ConfigError);
  CHECK_THROWS_AS(parse_delta_sampling("sometimes"), ConfigError);
}

TEST_CASE("plan validation") {
  ExperimentPlan plan = fig2_plan();
  plan.n_reps = 0;
  CHECK_THROWS_AS(plan.validate(), InvalidInput);
  plan = fig2_plan();
  plan.detuning = -1.0;
  CHECK_THROWS_AS(simulate_ensemble(plan), InvalidInput);
  plan = fig2_plan();
  plan.noise.scale = -1.0;
  CHECK_THROWS_AS(plan.validate(), InvalidInput);
  SplitMix64 rng(1);
  CHECK_THROWS_AS(sample_run(SequenceParams{}, 0, rng), InvalidInput);
}

}
