#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "test_support.hpp"
#include "twostation/estimator.hpp"
#include "twostation/rng.hpp"
#include "twostation/simulator.hpp"

using namespace twostation;

namespace {

const ServiceDistribution kExp1 = ServiceDistribution::exponential(1.0);
const ServiceDistribution kExp5 = ServiceDistribution::exponential(5.0);

// Value distribution that accepts everyone; with a prohibitive switching
// cost this collapses the model to independent Poisson join streams.
struct AlwaysJoin final : ValueDistribution {
  double tail(double) const override { return 1.0; }
  double sample(double) const override {
    return std::numeric_limits<double>::infinity();
  }
};

}  // namespace

TEST_CASE("workload decay is clamped linear") {
  const WorkloadState s = workload_after({2.0, 0.5, 1.0}, 1.0);
  CHECK(s.v1 == 1.0);
  CHECK(s.v2 == 0.0);
  CHECK(s.clock == 2.0);
  const WorkloadState empty = workload_after({0.0, 0.0, 0.0}, 5.0);
  CHECK(empty.v1 == 0.0);
  CHECK(empty.v2 == 0.0);
  const WorkloadState same = workload_after({3.0, 1.0, 0.0}, 0.0);
  CHECK(same.v1 == 3.0);
  CHECK(same.v2 == 1.0);
  CHECK_THROWS_AS(workload_after({1.0, 1.0, 0.0}, -0.1), std::domain_error);
}

TEST_CASE("first potential arrival joins locally") {
  for (std::uint64_t seed : {1ull, 2ull, 99ull}) {
    const SimRunOutput out =
        simulate_run({2.0, 0.7, 1.5, 0.3}, kExp1, kExp5, 1, seed);
    REQUIRE(out.observations.size() == 1);
    CHECK(out.n_potential == 1);
    CHECK(out.n_balks == 0);
    CHECK(out.n_switches == 0);
    CHECK(out.observations[0].station == out.join_log[0].arrival_station);
    CHECK(out.observations[0].a == out.total_time);
  }
}

TEST_CASE("simulate_run rejects bad inputs") {
  CHECK_THROWS_AS(simulate_run({1, 1, 1, 0.5}, kExp1, kExp5, 0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate_run({-1, 1, 1, 0.5}, kExp1, kExp5, 10, 1),
                  std::invalid_argument);
  const ParetoValue h(1.0);
  CHECK_THROWS_AS(simulate_run(h, 0.0, 0.0, 0.5, kExp1, kExp5, 10, 1),
                  std::invalid_argument);
}

TEST_CASE("counts are consistent and runs reproduce bit-identically") {
  const ModelParams p{1.5, 0.8, 2.0, 0.4};
  const SimRunOutput a = simulate_run(p, kExp1, kExp5, 500, 12345);
  const SimRunOutput b = simulate_run(p, kExp1, kExp5, 500, 12345);
  CHECK(a == b);
  CHECK(a.n_potential ==
        static_cast<long long>(a.observations.size()) + a.n_balks);
  CHECK(a.n_switches <= static_cast<long long>(a.observations.size()));
  const SimRunOutput c = simulate_run(p, kExp1, kExp5, 500, 12346);
  CHECK(a.total_time != c.total_time);
}

TEST_CASE("joining and switching rates near the reported table row") {
  // (1,1,1,0.5) with exponential services, checked at +-2 percentage points.
  const ModelParams p{1.0, 1.0, 1.0, 0.5};
  double join = 0.0, sw = 0.0;
  const int runs = 60;
  for (int l = 0; l < runs; ++l) {
    const SimRunOutput out =
        simulate_run(p, kExp1, kExp5, 1000, Rng::substream_seed(7, l));
    join += out.joining_fraction(2.0) / runs;
    sw += out.switching_fraction() / runs;
  }
  CHECK(std::abs(join - 0.9027) <= 0.02);
  CHECK(std::abs(sw - 0.1299) <= 0.02);
}

TEST_CASE("single-station limit matches an independent balking-queue oracle") {
  // lambda2 = 0 and a prohibitive switching cost reduce the system to one
  // M/G/1 queue with workload-dependent balking; the oracle is a separate
  // implementation on std::mt19937_64.
  const double lambda = 1.3, theta = 2.0;
  const int K = 2000, runs = 40;

  double mine = 0.0;
  const ParetoValue h(theta);
  for (int l = 0; l < runs; ++l) {
    const SimRunOutput out = simulate_run(h, lambda, 0.0, 1e9, kExp1, kExp5, K,
                                          Rng::substream_seed(21, l));
    CHECK(out.n_switches == 0);
    mine += out.joining_fraction(lambda) / runs;
  }

  double theirs = 0.0, theirs_sq = 0.0;
  for (int l = 0; l < runs; ++l) {
    std::mt19937_64 gen(9000 + l);
    std::exponential_distribution<double> arrival(lambda);
    std::exponential_distribution<double> service(1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double v = 0.0, t = 0.0, t_join = 0.0;
    int joins = 0;
    while (joins < K) {
      const double dt = arrival(gen);
      t += dt;
      v = std::max(0.0, v - dt);
      const double u = std::max(unif(gen), 1e-300);
      const double r = std::pow(u, -1.0 / theta) - 1.0;
      if (v < r) {
        v += service(gen);
        ++joins;
        t_join = t;
      }
    }
    const double frac = K / (lambda * t_join);
    theirs += frac / runs;
    theirs_sq += frac * frac / runs;
  }
  const double se = std::sqrt((theirs_sq - theirs * theirs) / runs);
  CHECK(std::abs(mine - theirs) <= 4.0 * std::sqrt(2.0) * se);
}

TEST_CASE("reconstruct_states recursion") {
  const std::vector<EffectiveArrival> one = {{1.0, 1, 2.0}};
  const auto s1 = reconstruct_states(one);
  REQUIRE(s1.size() == 1);
  CHECK(s1[0].v1 == 2.0);
  CHECK(s1[0].v2 == 0.0);

  const std::vector<EffectiveArrival> two = {{1.0, 1, 2.0}, {0.5, 2, 1.0}};
  const auto s2 = reconstruct_states(two);
  CHECK(s2[1].v1 == 1.5);
  CHECK(s2[1].v2 == 1.0);
  CHECK(s2[1].clock == 1.5);

  CHECK_THROWS_AS(reconstruct_states(std::vector<EffectiveArrival>{}),
                  std::domain_error);
  CHECK_THROWS_AS(
      reconstruct_states(std::vector<EffectiveArrival>{{0.0, 1, 1.0}}),
      std::domain_error);
  CHECK_THROWS_AS(
      reconstruct_states(std::vector<EffectiveArrival>{{1.0, 1, -1.0}}),
      std::domain_error);
}

TEST_CASE("reconstructed states agree with the simulator's own path") {
  const ModelParams p{1.0, 2.0, 1.5, 0.5};
  const SimRunOutput out = simulate_run(p, kExp1, kExp5, 800, 777);
  const auto states = reconstruct_states(out.observations);

  double v1 = 0.0, v2 = 0.0;
  for (std::size_t k = 0; k < out.observations.size(); ++k) {
    const EffectiveArrival& obs = out.observations[k];
    const double w1 = std::max(0.0, v1 - obs.a);
    const double w2 = std::max(0.0, v2 - obs.a);
    CHECK(std::abs(w1 - out.join_log[k].w1) <= 1e-12);
    CHECK(std::abs(w2 - out.join_log[k].w2) <= 1e-12);
    v1 = states[k].v1;
    v2 = states[k].v2;
  }
}

TEST_CASE("logged decisions satisfy the switching geometry") {
  const ModelParams p{2.0, 1.0, 1.0, 0.35};
  const SimRunOutput out = simulate_run(p, kExp1, kExp5, 1500, 31);
  const auto states = reconstruct_states(out.observations);

  long long switches_seen = 0;
  bool post_gap_within_c = true;  // empty start
  for (std::size_t k = 0; k < out.observations.size(); ++k) {
    const JoinRecord& log = out.join_log[k];
    const double w_local = log.arrival_station == 1 ? log.w1 : log.w2;
    const double w_other = log.arrival_station == 1 ? log.w2 : log.w1;
    if (out.observations[k].station != log.arrival_station) {
      ++switches_seen;
      CHECK(w_local > w_other + p.switch_cost);
    } else {
      CHECK(w_local <= w_other + p.switch_cost);
    }
    // once a post-jump gap is within c it must stay within c until the next
    // join (pre-decision gap included)
    if (post_gap_within_c)
      CHECK(std::abs(log.w1 - log.w2) <= p.switch_cost + 1e-12);
    post_gap_within_c =
        std::abs(states[k].v1 - states[k].v2) <= p.switch_cost;
  }
  CHECK(switches_seen == out.n_switches);
  CHECK(switches_seen > 0);
}

TEST_CASE("lower bound never exceeds the true switching cost") {
  Rng rng(4711);
  for (int trial = 0; trial < 25; ++trial) {
    const ModelParams p{0.3 + 4.0 * rng.next_unit(),
                        0.3 + 4.0 * rng.next_unit(),
                        0.5 + 3.0 * rng.next_unit(), 1.5 * rng.next_unit()};
    const SimRunOutput out = simulate_run(p, kExp1, kExp5, 400, rng.next_u64());
    CHECK(lower_bound_c(out.observations) <= p.switch_cost);
  }
}

TEST_CASE("degenerate limit: everyone joins locally at Poisson rates") {
  const AlwaysJoin values;
  const double lambda1 = 1.4, lambda2 = 0.6;
  const SimRunOutput out =
      simulate_run(values, lambda1, lambda2, 1e12, kExp1, kExp5, 20000, 5);
  CHECK(out.n_balks == 0);
  CHECK(out.n_switches == 0);

  long long n1 = 0;
  for (const EffectiveArrival& obs : out.observations)
    if (obs.station == 1) ++n1;
  const double T = out.total_time;
  CHECK(std::abs(n1 / T - lambda1) <= 3.0 * std::sqrt(lambda1 * T) / T);
  const double n2 = static_cast<double>(out.observations.size() - n1);
  CHECK(std::abs(n2 / T - lambda2) <= 3.0 * std::sqrt(lambda2 * T) / T);
}

TEST_CASE("multiserver one-each layout reproduces the plain simulator") {
  // Same draw order and exponential(1) services at both stations: the
  // throughput must equal K/T of the base simulator seed for seed.
  const ParetoValue h(4.0);
  for (std::uint64_t seed : {3ull, 8ull, 15ull}) {
    const double thr = simulate_multiserver_throughput(
        ServerLayout::OneEach, 1.2, 0.8, h, 2.0, 600, seed);
    const SimRunOutput base =
        simulate_run(h, 1.2, 0.8, 2.0, kExp1, kExp1, 600, seed);
    CHECK(thr == doctest::Approx(600.0 / base.total_time).epsilon(1e-12));
  }
}

TEST_CASE("at symmetric rates one server each beats pooling at station 1") {
  const ParetoValue h(4.0);
  double one = 0.0, both = 0.0;
  for (int l = 0; l < 25; ++l) {
    one += simulate_multiserver_throughput(ServerLayout::OneEach, 1.0, 1.0, h,
                                           2.0, 1000,
                                           Rng::substream_seed(60, l));
    both += simulate_multiserver_throughput(ServerLayout::BothAtStation1, 1.0,
                                            1.0, h, 2.0, 1000,
                                            Rng::substream_seed(60, l));
  }
  CHECK(one > both);
}
