#include "doctest.h"
#include "oracles.hpp"
#include "wsc/errors.hpp"
#include "wsc/mcmc.hpp"

#include <cmath>
#include <set>

using namespace wsc;

TEST_CASE("rng streams") {
  Rng a(7), b(7), c(8);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
    differs = differs || x != c.next();
  }
  CHECK(differs);
  const Rng base(1);
  Rng d1 = base.derive({1}), d2 = base.derive({2}), d1b = base.derive({1});
  CHECK(d1.next() == d1b.next());
  CHECK(d1.next() != d2.next());
  Rng r(3);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK((u >= 0 && u < 1));
    CHECK(r.below(7) < 7);
  }
}

TEST_CASE("acceptance table") {
  const auto inst = generate_network(single_pair_layout(), 1);
  const AcceptanceTable zero(inst, 0.0);
  for (Energy d : {-100, 0, 2, 50, 200, 400}) CHECK(zero.probability(d) == 1.0);
  const AcceptanceTable t(inst, 1.3);
  for (Energy d = -300; d <= 300; d += 2)
    CHECK(t.probability(d) == doctest::Approx(std::min(1.0, std::exp(-1.3 * d / 25.0))).epsilon(1e-14));
  CHECK(t.probability(100000) == doctest::Approx(std::exp(-1.3 * 4000)));
}

TEST_CASE("schedules") {
  const auto s = linear_beta_schedule(0.5, 3, 5);
  REQUIRE(s.betas.size() == 5);
  const double want[] = {0.5, 1.125, 1.75, 2.375, 3.0};
  for (int i = 0; i < 5; ++i) CHECK(s.betas[i] == doctest::Approx(want[i]).epsilon(1e-15));
  CHECK(s.betas.back() == 3.0);
  CHECK(linear_beta_schedule(0, 1, 2).betas == std::vector<double>{0, 1});
  CHECK_THROWS_AS(linear_beta_schedule(1, 1, 3), ValidationError);
  CHECK_THROWS_AS(linear_beta_schedule(0, 1, 1), ValidationError);

  const auto l = geometric_temperature_ladder(0.2279, 2.5, 21);
  REQUIRE(l.size() == 21);
  CHECK(l.temperatures.front() == 0.2279);
  CHECK(l.temperatures.back() == 2.5);
  const double ratio = std::pow(2.5 / 0.2279, 1.0 / 20);
  for (int k = 1; k < 21; ++k) CHECK(l.temperatures[k] / l.temperatures[k - 1] == doctest::Approx(ratio));
  const auto small = geometric_temperature_ladder(1, 4, 3);
  CHECK(small.temperatures[0] == 1);
  CHECK(small.temperatures[1] == doctest::Approx(2));
  CHECK(small.temperatures[2] == 4);
  CHECK_THROWS_AS(geometric_temperature_ladder(1, 1, 2), ValidationError);
}

TEST_CASE("sweeps keep the cached energy coherent and are deterministic") {
  const auto inst = generate_network(tiled_pair_layout(4), 2);
  Rng r1(11), r2(11);
  auto a = SpinState::random(inst, r1);
  auto b = SpinState::random(inst, r2);
  for (int s = 0; s < 200; ++s) {
    const double beta = 0.1 + 0.02 * s;
    CHECK(metropolis_sweep(inst, a, beta, r1) == inst.n());
    metropolis_sweep(inst, b, beta, r2);
    REQUIRE(a.coherent(inst));
  }
  CHECK(a.spins == b.spins);
  CHECK(a.energy == b.energy);
}

TEST_CASE("ferromagnetic bond at zero temperature stays aligned") {
  auto inst = ProblemInstance::create(2, {{0, 1, 25}}, {});
  Rng rng(4);
  auto s = SpinState::from_spins(inst, {1, 1});
  const AcceptanceTable cold(inst, 1e6);
  for (int i = 0; i < 1000; ++i) {
    metropolis_sweep(inst, s, cold, rng);
    CHECK(s.spins[0] == s.spins[1]);
  }
}

TEST_CASE("metropolis samples the Boltzmann distribution of a K4,4 cell") {
  // Frustrated cell: mixed couplings and fields, 8 sites.
  std::vector<Coupling> c;
  int k = 0;
  for (SiteId i = 0; i < 4; ++i)
    for (SiteId j = 4; j < 8; ++j) c.push_back({i, j, (k++ % 3 == 0) ? -25 : 25});
  auto inst = ProblemInstance::create(8, c, {{0, -25}, {5, 11}, {6, 11}});
  const double beta = 0.5;
  const auto exact = oracle::boltzmann_energy_distribution(inst, beta);
  Rng rng(99);
  auto s = SpinState::random(inst, rng);
  const AcceptanceTable table(inst, beta);
  std::map<std::int64_t, double> hist;
  const int sweeps = 400000;
  for (int i = 0; i < 1000; ++i) metropolis_sweep(inst, s, table, rng);
  for (int i = 0; i < sweeps; ++i) {
    metropolis_sweep(inst, s, table, rng);
    hist[s.energy] += 1.0 / sweeps;
  }
  CHECK(oracle::total_variation(hist, exact) < 0.01);
}

TEST_CASE("exchange probability") {
  CHECK(TemperingChain::exchange_probability(2, 1, -50, -50, 25) == 1.0);
  CHECK(TemperingChain::exchange_probability(2, 1, -100, -50, 25) == doctest::Approx(std::exp(-2.0)));
  CHECK(TemperingChain::exchange_probability(2, 1, -50, -100, 25) == 1.0);
}

TEST_CASE("tempering chain permutes without losing replicas") {
  const auto inst = generate_network(tiled_pair_layout(2), 5);
  Rng rng(3);
  TemperingChain chain(inst, geometric_temperature_ladder(0.3, 3, 6).betas(), rng);
  std::size_t swaps = 0;
  for (int s = 0; s < 200; ++s) {
    chain.sweep(rng);
    swaps += chain.exchange(rng);
    for (std::size_t k = 0; k < chain.size(); ++k) REQUIRE(chain.at(k).coherent(inst));
  }
  CHECK(swaps > 0);
  std::set<const SpinState*> distinct;
  for (std::size_t k = 0; k < chain.size(); ++k) distinct.insert(&chain.at(k));
  CHECK(distinct.size() == chain.size());
}
