#include "doctest.h"
#include "oracles.hpp"
#include "wsc/errors.hpp"
#include "wsc/instance.hpp"
#include "wsc/mcmc.hpp"
#include "wsc/rng.hpp"

#include <algorithm>
#include <string>

using namespace wsc;

TEST_CASE("chimera edge counts") {
  CHECK(build_chimera(1, 1).edges.size() == 16);
  CHECK(build_chimera(1, 2).edges.size() == 36);
  CHECK(build_chimera(1, 2).num_sites() == 16);
  CHECK(build_chimera(2, 2).edges.size() == 80);
  for (int r = 1; r <= 4; ++r)
    for (int c = 1; c <= 4; ++c) {
      const auto g = build_chimera(r, c);
      CHECK(g.edges.size() == chimera_edge_count(r, c));
      CHECK(std::is_sorted(g.edges.begin(), g.edges.end()));
      for (auto [i, j] : g.edges) CHECK(i < j);
    }
}

TEST_CASE("chimera coordinates round trip") {
  const auto g = build_chimera(3, 2);
  for (SiteId s = 0; s < g.num_sites(); ++s) CHECK(g.site(g.coord(s)) == s);
}

TEST_CASE("single pair terms") {
  const auto inst = generate_network(single_pair_layout(), 1);
  CHECK(inst.n() == 16);
  CHECK(inst.scale() == 25);
  CHECK(inst.couplings().size() == 36);
  for (const auto& c : inst.couplings()) CHECK(c.value == 25);
  int strong = 0, weak = 0;
  for (const auto& f : inst.fields()) {
    strong += f.value == -25;
    weak += f.value == 11;
  }
  CHECK(strong == 8);
  CHECK(weak == 8);
}

TEST_CASE("single pair energies against enumeration") {
  const auto inst = generate_network(single_pair_layout(), 1);
  const auto all = oracle::all_energies(inst);
  const auto min_it = std::min_element(all.begin(), all.end());
  CHECK(*min_it == -1012);
  CHECK(min_it - all.begin() == 0);  // mask 0 is all down
  CHECK(std::count(all.begin(), all.end(), -1012) == 1);

  std::vector<Spin> s(16, -1);
  CHECK(energy(inst, s) == -1012);
  for (int k = 8; k < 16; ++k) s[k] = 1;  // weak cell up
  CHECK(energy(inst, s) == -988);

  const auto gs = brute_force_ground_state(inst);
  CHECK(gs.energy == -1012);
  CHECK(gs.spins == std::vector<Spin>(16, -1));
  CHECK(inst.reference_method() == ReferenceMethod::exhaustive);
  CHECK(*inst.reference_energy() == -1012);
}

TEST_CASE("small energy and brute force examples") {
  auto one = ProblemInstance::create(1, {}, {{0, -25}});
  std::vector<Spin> down{-1};
  CHECK(energy(one, down) == -25);
  CHECK(delta_energy(one, down, 0) == 50);

  auto up = ProblemInstance::create(1, {}, {{0, 11}});
  const auto g = brute_force_ground_state(up);
  CHECK(g.energy == -11);
  CHECK(g.spins == std::vector<Spin>{1});

  auto fm = ProblemInstance::create(2, {{0, 1, 25}}, {});
  std::vector<Spin> dd{-1, -1};
  CHECK(delta_energy(fm, dd, 0) == 50);
  CHECK(delta_energy(fm, dd, 1) == 50);

  auto af = ProblemInstance::create(2, {{0, 1, -25}}, {});
  const auto ga = brute_force_ground_state(af);
  CHECK(ga.energy == -25);
  CHECK(ga.spins == std::vector<Spin>{-1, 1});
}

TEST_CASE("delta energy matches recompute on generated networks") {
  Rng rng(5);
  for (int pairs : {1, 4, 9}) {
    const auto inst = generate_network(tiled_pair_layout(pairs), 17 + pairs);
    for (int t = 0; t < 1000; ++t) {
      std::vector<Spin> s(inst.n());
      for (auto& x : s) x = rng.spin();
      const Energy e = energy(inst, s);
      std::uint64_t mask = 0;
      for (std::size_t i = 0; i < s.size() && i < 64; ++i) mask |= std::uint64_t(s[i] > 0) << i;
      if (inst.n() <= 64) CHECK(e == oracle::energy_of_mask(inst, mask));
      for (SiteId i = 0; i < inst.n(); ++i) {
        const Energy d = delta_energy(inst, s, i);
        s[i] = static_cast<Spin>(-s[i]);
        REQUIRE(energy(inst, s) - e == d);
        s[i] = static_cast<Spin>(-s[i]);
      }
    }
  }
}

TEST_CASE("zero-field energy is flip symmetric") {
  auto inst = ProblemInstance::create(4, {{0, 1, 25}, {1, 2, -25}, {2, 3, 25}, {0, 3, -25}}, {});
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    std::vector<Spin> s(4), f(4);
    for (int i = 0; i < 4; ++i) {
      s[i] = rng.spin();
      f[i] = static_cast<Spin>(-s[i]);
    }
    CHECK(energy(inst, s) == energy(inst, f));
  }
}

TEST_CASE("generated small networks: all-down is checked, not assumed") {
  // n <= 24 means a single pair; larger networks carry the construction value.
  const auto inst = generate_network(single_pair_layout(), 9);
  CHECK(brute_force_ground_state(inst).energy <= energy(inst, std::vector<Spin>(16, -1)));
  const auto big = generate_network(tiled_pair_layout(4), 3);
  CHECK(big.reference_method() == ReferenceMethod::construction);
  CHECK(*big.reference_energy() == energy(big, std::vector<Spin>(big.n(), -1)));
  CHECK(oracle::cell_uniform_minimum(big) <= *big.reference_energy());
}

TEST_CASE("tiled layouts") {
  for (int p : {1, 2, 4, 9, 16, 25}) {
    const auto layout = tiled_pair_layout(p);
    CHECK(layout.pairs.size() == static_cast<std::size_t>(p));
    layout.validate(true);
    const auto inst = generate_network(layout, 1);
    CHECK(inst.n() == 16u * p);
    REQUIRE(inst.layout());
    for (const auto& e : inst.layout()->backbone_edges) CHECK((e.sign == 1 || e.sign == -1));
  }
  CHECK_THROWS_AS(tiled_pair_layout(0), ValidationError);
  const auto grid = tiled_grid_layout(4, 4);
  CHECK(grid.pairs.size() == 8);
}

TEST_CASE("generator is deterministic in its seed") {
  const auto a = generate_network(tiled_pair_layout(9), 42);
  const auto b = generate_network(tiled_pair_layout(9), 42);
  const auto c = generate_network(tiled_pair_layout(9), 43);
  CHECK(a == b);
  CHECK(serialize_instance(a) == serialize_instance(b));
  CHECK(a.layout()->backbone_edges != c.layout()->backbone_edges);
}

TEST_CASE("serialization round trip is byte stable") {
  for (int p : {1, 4}) {
    const auto inst = generate_network(tiled_pair_layout(p), 8);
    const std::string text = serialize_instance(inst);
    const auto back = parse_instance(text);
    CHECK(back == inst);
    CHECK(serialize_instance(back) == text);
  }
  auto bare = ProblemInstance::create(3, {{0, 2, -7}}, {{1, 3}}, 10);
  const auto back = parse_instance(serialize_instance(bare));
  CHECK(back == bare);
  CHECK(!back.layout());
  CHECK(back.reference_method() == ReferenceMethod::none);
}

TEST_CASE("parse errors") {
  const std::string head = R"({"format_version": 1, "n": 2, "scale": 25, "fields": [], )";
  const std::string tail = R"(, "layout": null, "reference_energy_scaled": null, "reference_method": "none"})";
  try {
    parse_instance(head + R"("couplings": [[1, 1, 25]])" + tail);
    FAIL("self-loop accepted");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("self-loop") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_instance(head + R"("couplings": [[0, 5, 25]])" + tail), ValidationError);
  CHECK_THROWS_AS(parse_instance(head + R"("couplings": [[0, 1, 25], [0, 1, 25]])" + tail), ValidationError);
  CHECK_THROWS_AS(parse_instance("{ not json"), ValidationError);
  CHECK_THROWS_AS(parse_instance(R"({"format_version": 2, "n": 1, "fields": [], "couplings": []})"),
                  ValidationError);

  const auto d = parse_instance(
      R"({"format_version": 1, "n": 2, "fields": [[0, -25]], "couplings": [[0, 1, 25]], "layout": null, )"
      R"("reference_energy_scaled": null, "reference_method": "none"})");
  CHECK(d.scale() == 25);
  CHECK(d.scale_defaulted());
}

TEST_CASE("file errors") {
  CHECK_THROWS_AS(load_instance("/nonexistent/dir/x.json"), IoError);
}
