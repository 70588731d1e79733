#include "doctest.h"
#include "wsc/errors.hpp"
#include "wsc/tts.hpp"
#include "wsc/twolevel.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

using namespace wsc;

namespace {

double numeric_gap(double s, int n) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(effective_hamiltonian(s, n));
  return es.eigenvalues()(1) - es.eigenvalues()(0);
}

}  // namespace

TEST_CASE("effective hamiltonian endpoints") {
  for (double s : {0.0, 1.0}) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(effective_hamiltonian(s, 5));
    CHECK(es.eigenvalues()(0) == doctest::Approx(-1).epsilon(1e-14));
    CHECK(std::abs(es.eigenvalues()(1)) < 1e-14);
  }
  CHECK(numeric_gap(0.5, 4) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("gap formula and minimum gap") {
  for (int n = 1; n <= 16; ++n) {
    for (double s : {0.0, 0.25, 0.5, 0.75, 1.0}) CHECK(std::abs(numeric_gap(s, n) - effective_gap(s, n)) < 1e-12);
    double lo = 1e9;
    for (int k = 0; k <= 2000; ++k) lo = std::min(lo, effective_gap(k / 2000.0, n));
    CHECK(std::abs(lo - std::pow(2.0, -n / 2.0)) < 1e-10);
  }
}

TEST_CASE("integration") {
  TwoLevelParams p;
  const auto r = integrate_schrodinger(p);
  CHECK(r.p_succ >= 0.999);
  CHECK(r.norm_drift <= 1e-8);
  CHECK(r.steps == 50000);

  p.n = 10;
  p.q_noise = 0.1;
  const auto noisy = integrate_schrodinger(p);
  CHECK(noisy.p_succ_noisy == std::pow(0.9, 10) * noisy.p_succ);
  CHECK(noisy.p_succ_noisy / noisy.p_succ == doctest::Approx(0.34868).epsilon(1e-5));

  TwoLevelParams bad;
  bad.dt = 0;
  CHECK_THROWS_AS(integrate_schrodinger(bad), ValidationError);
  bad = {};
  bad.q_noise = 1;
  CHECK_THROWS_AS(integrate_schrodinger(bad), ValidationError);
  bad = {};
  bad.n = 0;
  CHECK_THROWS_AS(integrate_schrodinger(bad), ValidationError);
}

TEST_CASE("dt halving self-convergence") {
  for (int n = 1; n <= 16; ++n) {
    TwoLevelParams a;
    a.n = n;
    TwoLevelParams b = a;
    b.dt = 0.005;
    CHECK(std::abs(integrate_schrodinger(a).p_succ - integrate_schrodinger(b).p_succ) < 1e-4);
  }
}

TEST_CASE("double scaling table") {
  const auto rows = double_scaling_curve(1, 16, TwoLevelParams{}, {0.0, 0.1});
  REQUIRE(rows.size() == 32);
  for (int i = 0; i < 16; ++i) {
    const auto& clean = rows[i];
    const auto& noisy = rows[16 + i];
    CHECK(clean.q == 0);
    CHECK(noisy.q == 0.1);
    CHECK(noisy.n == clean.n);
    CHECK(noisy.tts > clean.tts);
    CHECK(noisy.p_succ_noisy == std::pow(0.9, noisy.n) * noisy.p_succ);
    CHECK(clean.tts == time_to_solution(clean.p_succ, 500));
  }
  const auto csv = double_scaling_csv(rows);
  CHECK(csv.rfind("n,sqrt_n,q,p_succ,p_succ_noisy,tts\n", 0) == 0);
  CHECK_THROWS_AS(double_scaling_curve(3, 2, TwoLevelParams{}, {0}), ValidationError);
}
