#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "driftbandit/env.hpp"
#include "driftbandit/restart.hpp"

using namespace driftbandit;

namespace {

long double closed_form(long double T, long double V, long double K, long double lambda) {
  return std::pow(lambda * T / V, 2.0L / 3.0L) * std::cbrt(K * std::log(T));
}

bool same(const std::vector<StepOutcome>& a, const std::vector<StepOutcome>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].recommended != b[i].recommended || a[i].greedy != b[i].greedy ||
        a[i].compensation != b[i].compensation || a[i].true_reward != b[i].true_reward ||
        a[i].observed_reward != b[i].observed_reward || a[i].batch != b[i].batch) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_SUITE("restart") {
  TEST_CASE("batch size closed form") {
    CHECK(closed_form(5000, 3, 2, 1) == doctest::Approx(361.8).epsilon(1e-3));
    CHECK(batch_size(5000, 3.0, 2, 1.0) ==
          static_cast<std::size_t>(std::floor(closed_form(5000, 3, 2, 1))));
    CHECK(batch_size(5000, 3.0, 2, 1.0) == 361);
    CHECK(batch_size(100, 50.0, 2, 1.0) ==
          static_cast<std::size_t>(std::floor(closed_form(100, 50, 2, 1))));
    CHECK(batch_size(100, 50.0, 2, 1.0) == 3);
    const double base = batch_size_unrounded(5000, 3.0, 2, 1.0);
    CHECK(batch_size_unrounded(5000, 3.0, 2, 8.0) == doctest::Approx(4.0 * base).epsilon(1e-14));
  }

  TEST_CASE("batch size domain") {
    CHECK_THROWS_AS(batch_size(5000, 0.4, 2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(batch_size(5000, 2501.0, 2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(batch_size(1, 0.5, 2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(batch_size(5000, 3.0, 1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(batch_size(5000, 3.0, 2, 0.0), std::invalid_argument);
    CHECK(batch_size(5000, 0.5, 2, 1e6) == 5000);
  }

  TEST_CASE("batch size monotonicity") {
    for (std::size_t T : {100u, 1000u, 5000u, 20000u}) {
      std::size_t prev = batch_size(T, 0.5, 2, 1.0);
      for (double V = 0.75; V <= T / 2.0; V *= 1.5) {
        const std::size_t s = batch_size(T, V, 2, 1.0);
        CHECK(s <= prev);
        prev = s;
      }
    }
    for (double V : {1.0, 3.0, 10.0}) {
      std::size_t prev = batch_size(20, V, 2, 1.0);
      for (std::size_t T = 21; T <= 50000; T = T * 3 / 2) {
        const std::size_t s = batch_size(T, V, 2, 1.0);
        CHECK(s >= prev);
        prev = s;
      }
    }
  }

  TEST_CASE("partition") {
    const auto b = partition_horizon(10, 4);
    REQUIRE(b.size() == 3);
    CHECK((b[0].first == 1 && b[0].last == 4));
    CHECK((b[1].first == 5 && b[1].last == 8));
    CHECK((b[2].first == 9 && b[2].last == 10));
    CHECK(partition_horizon(10, 10).size() == 1);
    CHECK(partition_horizon(10, 50).size() == 1);
    CHECK_THROWS_AS(partition_horizon(10, 0), std::invalid_argument);
    for (std::size_t T : {1u, 7u, 100u, 5000u}) {
      for (std::size_t sigma : {1u, 3u, 361u, 6000u}) {
        const auto parts = partition_horizon(T, sigma);
        CHECK(parts.size() == (T + sigma - 1) / sigma);
        std::size_t next = 1;
        for (std::size_t j = 0; j < parts.size(); ++j) {
          CHECK(parts[j].index == j + 1);
          CHECK(parts[j].first == next);
          next = parts[j].last + 1;
        }
        CHECK(next == T + 1);
      }
    }
  }

  TEST_CASE("restarts reinitialize the policy") {
    const auto env = make_sinusoidal_env(5000, 3.0, 0.3, 1.0);
    for (auto kind : {PolicyKind::Ucb1, PolicyKind::EpsGreedy, PolicyKind::Thompson}) {
      PolicyParams p;
      p.kind = kind;
      Rng rng(4);
      const auto out = run_restarting(env.schedule, {361, 1.0}, p,
                                      {DriftKind::Linear, 0.1, 1.0}, rng);
      REQUIRE(out.size() == 5000);
      std::size_t batches = 0;
      for (std::size_t i = 0; i < out.size(); ++i) {
        CHECK(out[i].t == i + 1);
        const std::size_t offset = i % 361;
        CHECK(out[i].batch == i / 361 + 1);
        if (offset == 0) ++batches;
        if (offset < 2) {
          CHECK(out[i].recommended == offset);
          CHECK(out[i].greedy == offset);
          CHECK(out[i].compensation == 0.0);
        }
      }
      CHECK(batches == 14);
    }
  }

  TEST_CASE("a single batch is the plain loop") {
    const auto env = make_flip_env(3000, 3, 0.9, 0.1);
    for (auto kind : {PolicyKind::Ducb, PolicyKind::Thompson, PolicyKind::EpsGreedy}) {
      PolicyParams p;
      p.kind = kind;
      p.gamma = 0.99;
      const DriftModel m{DriftKind::Linear, 0.3, 1.0};
      for (std::size_t sigma : {3000u, 10000u}) {
        Rng a(9), b(9);
        CHECK(same(run_restarting(env.schedule, {sigma, 1.0}, p, m, a),
                   run_incentivized(env.schedule, p, m, b)));
      }
    }
  }
}
