#include "doctest.h"
#include "wsc/errors.hpp"
#include "wsc/scaling.hpp"

#include <cmath>
#include <random>

using namespace wsc;

namespace {

std::vector<FitPoint> synthetic(double a, double b, double c, std::vector<double> sizes) {
  std::vector<FitPoint> pts;
  for (double n : sizes) pts.push_back({n, a + b * std::sqrt(n) + c * std::log10(std::sqrt(n))});
  return pts;
}

const std::vector<double> kSizes{180, 296, 489, 681, 945};

}  // namespace

TEST_CASE("linear fit recovers noise-free data") {
  const auto f = fit_linear(synthetic(2, 0.1, 0, kSizes), 0);
  CHECK(std::abs(f.a() - 2) < 1e-9);
  CHECK(std::abs(f.b() - 0.1) < 1e-9);
  for (double r : f.residuals) CHECK(std::abs(r) < 1e-9);
  const auto last3 = fit_linear(synthetic(2, 0.1, 0, kSizes), 3);
  CHECK(last3.points.size() == 3);
  CHECK(last3.points.front().n == 489);
}

TEST_CASE("two points interpolate, equal values give zero slope") {
  const auto f = fit_linear(synthetic(1, 0.3, 0, {100, 400}), 3);
  for (double r : f.residuals) CHECK(std::abs(r) < 1e-12);
  std::vector<FitPoint> flat{{100, 3}, {200, 3}, {300, 3}};
  CHECK(std::abs(fit_linear(flat, 0).b()) < 1e-12);
  CHECK_THROWS_AS(fit_linear({{100, 1}}, 0), ValidationError);
  CHECK_THROWS_AS(fit_linear({{100, 1}, {100, 2}}, 0), ValidationError);
}

TEST_CASE("log-corrected fit recovers noise-free data") {
  const auto f = fit_log_corrected(synthetic(1, 0.05, 2, kSizes));
  CHECK(std::abs(f.a() - 1) < 1e-9);
  CHECK(std::abs(f.b() - 0.05) < 1e-9);
  CHECK(std::abs(f.c() - 2) < 1e-9);
  const auto three = fit_log_corrected(synthetic(1, 0.05, 2, {100, 300, 900}));
  for (double r : three.residuals) CHECK(std::abs(r) < 1e-9);
}

TEST_CASE("shift equivariance") {
  for (FitModel m : {FitModel::linear, FitModel::log_corrected}) {
    auto pts = synthetic(1.3, 0.07, m == FitModel::linear ? 0 : 1.1, kSizes);
    pts[2].log10_tts += 0.05;  // not an exact fit
    const auto f = fit(m, pts, 0);
    for (auto& p : pts) p.log10_tts += 1;  // tts * 10
    const auto g = fit(m, pts, 0);
    CHECK(std::abs(g.a() - f.a() - 1) < 1e-9);
    CHECK(std::abs(g.b() - f.b()) < 1e-9);
    CHECK(std::abs(g.c() - f.c()) < 1e-9);
  }
}

TEST_CASE("c = 0 data keeps c inside its interval") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> noise(0, 0.02);
  int covered = 0;
  const int reps = 200;
  const std::vector<double> sizes{64, 144, 256, 400, 576, 784, 1024, 1296};
  for (int r = 0; r < reps; ++r) {
    auto pts = synthetic(1, 0.1, 0, sizes);
    for (auto& p : pts) p.log10_tts += noise(gen);
    const auto f = fit_log_corrected(pts);
    covered += f.ci_low[2] <= 0 && 0 <= f.ci_high[2];
  }
  CHECK(covered >= 0.9 * reps);
}

TEST_CASE("model selection sanity") {
  const auto pts = synthetic(1, 0.05, 3, kSizes);
  const auto lin = fit_linear(pts, 0);
  const auto log = fit_log_corrected(pts);
  CHECK(lin.rss > log.rss);
}

TEST_CASE("instance bootstrap fit") {
  std::vector<SizeSample> sizes;
  for (double n : {100.0, 225.0, 400.0}) {
    SizeSample s{n, {}};
    for (int k = 0; k < 15; ++k) s.tts.push_back(std::pow(10, 1 + 0.1 * std::sqrt(n) + 0.01 * (k - 7)));
    sizes.push_back(s);
  }
  Rng rng(5);
  const auto f = fit_linear(sizes, 3, rng, 300);
  CHECK(f.ci_method == "bootstrap");
  CHECK(f.b() == doctest::Approx(0.1).epsilon(1e-6));
  CHECK(f.ci_low[1] <= f.b());
  CHECK(f.b() <= f.ci_high[1]);
}

TEST_CASE("compare solvers") {
  auto make = [](double b, double half) {
    FitResult f;
    f.coefficients = {1, b};
    f.ci_low = {1, b - half};
    f.ci_high = {1, b + half};
    return f;
  };
  const auto one = compare_solvers({{"a", make(0.1, 0.01)}});
  CHECK(one.size() == 1);
  const auto two = compare_solvers({{"slow", make(0.3, 0.01)}, {"fast", make(0.1, 0.01)}});
  CHECK(two[0].label == "fast");
  CHECK(two[0].indistinguishable_from.empty());
  const auto tie = compare_solvers({{"x", make(0.2, 0.01)}, {"y", make(0.2, 0.01)}});
  CHECK(tie[0].indistinguishable_from == std::vector<std::string>{"y"});
}

TEST_CASE("reports") {
  const auto f = fit_linear(synthetic(2, 0.1, 0, kSizes), 3);
  const std::string j = fit_report_json(f);
  for (const char* key : {"\"model\"", "\"coefficients\"", "\"points\"", "\"residual\"", "\"ci_low\""})
    CHECK(j.find(key) != std::string::npos);
  const std::string csv = fit_curve_csv(f, 5);
  CHECK(csv.rfind("n,sqrt_n,log10_tts_fit\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}
