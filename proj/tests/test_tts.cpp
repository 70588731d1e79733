#include "doctest.h"
#include "wsc/errors.hpp"
#include "wsc/tts.hpp"

#include <algorithm>
#include <cmath>

using namespace wsc;

TEST_CASE("success probability and wilson interval") {
  const auto a = success_probability(99, 100);
  CHECK(a.p == doctest::Approx(0.99));
  const auto z = success_probability(0, 100);
  CHECK(z.p == 0);
  CHECK(z.ci.low == 0);
  CHECK(z.ci.high == doctest::Approx(0.0370).epsilon(1e-3));
  const auto f = success_probability(100, 100);
  CHECK(f.ci.low == doctest::Approx(0.9630).epsilon(1e-3));
  CHECK(f.ci.high == 1);
  CHECK_THROWS_AS(success_probability(0, 0), ValidationError);
  CHECK_THROWS_AS(success_probability(std::vector<RunRecord>{}), ValidationError);
}

TEST_CASE("time to solution") {
  CHECK(repetitions(0.99) == 1);
  CHECK(time_to_solution(0.99, 20) == doctest::Approx(20));
  CHECK(repetitions(0.5) == doctest::Approx(6.64385619));
  CHECK(time_to_solution(0.5, 20) == doctest::Approx(132.877124));
  CHECK(std::isinf(time_to_solution(0, 20)));
  CHECK(time_to_solution(1, 20) == 20);
  CHECK(time_to_solution(0.995, 20) == 20);
  CHECK_THROWS_AS(time_to_solution(1.5, 20), ValidationError);
  CHECK_THROWS_AS(time_to_solution(-0.1, 20), ValidationError);
  double prev = time_to_solution(0.001, 7);
  for (double p = 0.002; p <= 1.0; p += 0.001) {
    const double t = time_to_solution(p, 7);
    CHECK(t <= prev);
    prev = t;
  }
}

TEST_CASE("percentile aggregation") {
  Rng rng(1);
  CHECK(aggregate_percentile({10, 20, 30}, 50, rng).tts == 20);
  const auto one = aggregate_percentile({7}, 50, rng);
  CHECK(one.tts == 7);
  CHECK(one.ci.low == 7);
  CHECK(one.ci.high == 7);
  const auto cen = aggregate_percentile({10, kUnsolved}, 50, rng);
  CHECK(cen.tts == 10);
  CHECK(cen.censored_fraction == 0.5);
  CHECK(cen.unsolved == 1);
  CHECK_THROWS_AS(aggregate_percentile({kUnsolved, kUnsolved}, 50, rng), ValidationError);
  CHECK_THROWS_AS(aggregate_percentile({1, 2}, 100, rng), ValidationError);

  std::vector<double> v{5, 1, 9, 3, 7, 2, 8};
  Rng r1(4), r2(4);
  const auto base = aggregate_percentile(v, 50, r1);
  CHECK(base.ci.low <= base.tts);
  CHECK(base.tts <= base.ci.high);
  std::reverse(v.begin(), v.end());
  CHECK(aggregate_percentile(v, 50, r2).tts == base.tts);
  for (auto& x : v) x *= 3.5;
  Rng r3(4);
  CHECK(aggregate_percentile(v, 50, r3).tts == doctest::Approx(3.5 * base.tts));
}

TEST_CASE("optimize_tts") {
  const auto inst = generate_network(single_pair_layout(), 1);
  std::vector<SolverParams> grid;
  for (int m = 5; m <= 14; ++m) {
    SolverParams p = default_params(SolverId::sa, inst.n());
    p.sa.beta_ini = 0.5;
    p.sa.steps = m;
    p.sa.sweeps_per_beta = 20;
    grid.push_back(p);
  }
  const auto best = optimize_tts(inst, grid, 20, 77);
  CHECK(best.solved);
  CHECK(std::isfinite(best.best.tts));
  CHECK(best.grid.size() == grid.size());
  for (const auto& g : best.grid) CHECK(best.best.tts <= g.tts);

  const auto single = optimize_tts(inst, {grid[3]}, 10, 1);
  CHECK(single.best.index == 0);
  CHECK_THROWS_AS(optimize_tts(inst, grid, 0, 1), ValidationError);
  CHECK_THROWS_AS(optimize_tts(inst, {}, 5, 1), ValidationError);
}

TEST_CASE("run log round trip") {
  std::vector<RunRecord> rows{{"sa", 16, "p1_i000", 3, true, 1600, 12345, 1600},
                              {"pt-icm", 64, "p4_i001", 18446744073709551615ULL, false, 99, 1, 120}};
  std::string text = std::string(kRunLogHeader) + "\n";
  for (const auto& r : rows) text += format_run_record(r) + "\n";
  CHECK(parse_run_log(text) == rows);
  CHECK_THROWS_AS(parse_run_log("bad header\n"), ValidationError);
  try {
    parse_run_log(std::string(kRunLogHeader) + "\nsa,16,x,1,2,5,5,5\n");
    FAIL("accepted");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_run_log(std::string(kRunLogHeader) + "\nsa,16,x,1,1,0,5,5\n"), ValidationError);
}

TEST_CASE("instance tts groups parameter points") {
  std::vector<RunRecord> rows;
  for (int t = 0; t < 10; ++t) rows.push_back({"sa", 16, "a", std::uint64_t(t), t < 5, 100, 10, 100});
  for (int t = 0; t < 10; ++t) rows.push_back({"sa", 16, "a", std::uint64_t(100 + t), t < 9, 400, 10, 400});
  const auto out = instance_tts(rows);
  REQUIRE(out.size() == 1);
  // p = 0.5 at 100 work -> 664; p = 0.9 at 400 work -> 800.
  CHECK(out[0].t_ann_work == 100);
  CHECK(out[0].tts == doctest::Approx(100 * repetitions(0.5)));
}
