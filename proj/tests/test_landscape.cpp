#include "doctest.h"
#include "oracles.hpp"
#include "wsc/errors.hpp"
#include "wsc/landscape.hpp"

#include <cmath>

using namespace wsc;

namespace {

std::vector<double> gaussians(std::vector<std::pair<double, double>> centre_height, double width = 0.03) {
  std::vector<double> d(kOverlapBins);
  for (int k = 0; k < kOverlapBins; ++k) {
    const double q = OverlapHistogram::center(k);
    for (auto [c, h] : centre_height) d[k] += h * std::exp(-0.5 * (q - c) * (q - c) / (width * width));
  }
  return d;
}

}  // namespace

TEST_CASE("spin overlap") {
  std::vector<Spin> a{1, -1, 1, 1}, b{-1, 1, -1, -1}, c{1, 1, -1, 1};
  CHECK(spin_overlap(a, a) == 1);
  CHECK(spin_overlap(a, b) == -1);
  CHECK(spin_overlap(a, c) == 0);
  CHECK(spin_overlap(a, c) == spin_overlap(c, a));
  CHECK_THROWS_AS(spin_overlap(a, std::vector<Spin>{1}), ValidationError);
}

TEST_CASE("histogram binning and normalisation") {
  OverlapHistogram h;
  CHECK(OverlapHistogram::center(0) == -1);
  CHECK(OverlapHistogram::center(50) == doctest::Approx(0));
  CHECK(OverlapHistogram::center(100) == doctest::Approx(1));
  CHECK(OverlapHistogram::bin_of(1.0) == 100);
  CHECK(OverlapHistogram::bin_of(-1.0) == 0);
  CHECK_THROWS_AS(h.add(1.5), ValidationError);
  for (double q : {1.0, 0.5, 0.5, -0.75, 0.0}) h.add(q);
  auto integral = [](const std::vector<double>& d) {
    double s = 0;
    for (int k = 50; k < kOverlapBins; ++k) s += d[k] * kOverlapBinWidth;
    return s;
  };
  CHECK(integral(h.density()) == doctest::Approx(1));
  CHECK(h.normalization() == "positive_q");

  OverlapHistogram a, b, c;
  a.add(0.2);
  b.add(0.8);
  b.add(-0.2);
  c.add(1);
  OverlapHistogram ab = a;
  ab.merge(b);
  ab.merge(c);
  OverlapHistogram cb = c;
  cb.merge(b);
  cb.merge(a);
  CHECK(ab.counts == cb.counts);
  CHECK(integral(ab.density()) == doctest::Approx(1));

  OverlapHistogram neg;
  neg.add(-0.5);
  CHECK(neg.normalization() == "full_range");
}

TEST_CASE("peak classification") {
  CHECK(classify_density(gaussians({{0.9, 1}})).classification == PeakClass::single_peak);
  const auto two = classify_density(gaussians({{0.5, 1}, {0.9, 1}}));
  CHECK(two.classification == PeakClass::multi_peak);
  CHECK(two.peaks.size() == 2);
  CHECK(classify_density(gaussians({{0.5, 0.05}, {0.9, 1}})).classification == PeakClass::single_peak);
  CHECK_THROWS_AS(classify_density(std::vector<double>(kOverlapBins, 0.0)), ValidationError);

  OverlapHistogram h;
  for (int i = 0; i < 30; ++i) h.add(0.4);
  for (int i = 0; i < 40; ++i) h.add(0.9);
  OverlapHistogram h3 = h;
  for (auto& c : h3.counts) c *= 3;
  const auto v1 = classify_peaks(h);
  const auto v3 = classify_peaks(h3);
  CHECK(v1.classification == v3.classification);
  CHECK(v1.peaks.size() == v3.peaks.size());
  CHECK_THROWS_AS(classify_peaks(OverlapHistogram{}), ValidationError);
}

TEST_CASE("peak fraction") {
  std::map<std::size_t, std::vector<PeakVerdict>> by_n;
  by_n[64] = std::vector<PeakVerdict>(10);
  by_n[144] = std::vector<PeakVerdict>(10);
  for (int i = 0; i < 5; ++i) by_n[144][i].classification = PeakClass::multi_peak;
  const auto f = peak_fraction(by_n);
  REQUIRE(f.size() == 2);
  CHECK(f[0].fraction == 0);
  CHECK(f[1].fraction == 0.5);
  CHECK(f[1].ci.low < 0.5);
  CHECK(f[1].ci.high > 0.5);
  by_n[256] = std::vector<PeakVerdict>(9);
  CHECK_THROWS_AS(peak_fraction(by_n), ValidationError);
}

TEST_CASE("sampling rejects short runs") {
  const auto inst = generate_network(single_pair_layout(), 1);
  Rng rng(1);
  CHECK_THROWS_AS(sample_overlap_distribution(inst, geometric_temperature_ladder(0.5, 2, 3), 99, rng),
                  ValidationError);
}

TEST_CASE("a single biased spin gives the exact overlap weights") {
  auto inst = ProblemInstance::create(1, {}, {{0, 25}});
  const double t = 1.0;
  const double p = 1 / (1 + std::exp(-2 / t));
  Rng rng(4);
  const auto h = sample_overlap_distribution(inst, TemperatureLadder{{t}}, 200000, rng);
  CHECK(h.counts[0] + h.counts[100] == h.total());
  const double same = static_cast<double>(h.counts[100]) / h.total();
  CHECK(same == doctest::Approx(p * p + (1 - p) * (1 - p)).epsilon(0.01));
}

TEST_CASE("strongly biased ferromagnetic cell: single peak at q = 1") {
  std::vector<Coupling> c;
  std::vector<FieldTerm> f;
  for (SiteId i = 0; i < 4; ++i)
    for (SiteId j = 4; j < 8; ++j) c.push_back({i, j, 25});
  for (SiteId i = 0; i < 8; ++i) f.push_back({i, -25});
  auto inst = ProblemInstance::create(8, c, f);
  const double t = 0.5;
  const auto exact = oracle::exact_disagreement_distribution(inst, 1 / t);
  CHECK(exact[0] > 0.999);
  Rng rng(2);
  const auto h = sample_overlap_distribution(inst, TemperatureLadder{{t, 1.0, 2.0}}, 2000, rng);
  const auto v = classify_peaks(h);
  CHECK(v.classification == PeakClass::single_peak);
  REQUIRE(!v.peaks.empty());
  CHECK(v.peaks[0].q == doctest::Approx(1));
}

TEST_CASE("sampled P(q) of the single pair matches enumeration") {
  const auto inst = generate_network(single_pair_layout(), 1);
  const double t = 0.2279;
  const auto exact = oracle::exact_disagreement_distribution(inst, 1 / t);
  Rng rng(12);
  const auto h = sample_overlap_distribution(inst, geometric_temperature_ladder(t, 2.5, 5), 2000000, rng);
  CHECK(h.total() == 1000000);
  double tv = 0;
  for (std::size_t d = 0; d <= 16; ++d) {
    const double q = 1.0 - 2.0 * d / 16;
    tv += std::abs(exact[d] - static_cast<double>(h.counts[OverlapHistogram::bin_of(q)]) / h.total());
  }
  CHECK(tv / 2 < 0.05);
  const auto v = classify_peaks(h);
  REQUIRE(!v.peaks.empty());
  CHECK(v.peaks[0].q > 0.7);
}

TEST_CASE("exports") {
  OverlapHistogram h;
  h.add(0.5);
  const auto csv = histogram_csv(h);
  CHECK(csv.rfind("q_bin_center,density\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 102);
  const auto j = verdict_json(classify_peaks(h));
  CHECK(j.find("\"single_peak\"") != std::string::npos);
  CHECK(j.find("\"sigma\"") != std::string::npos);
}

TEST_CASE("cell-uniform overlap oracle agrees with full enumeration") {
  const auto inst = generate_network(single_pair_layout(), 1);
  for (double t : {0.15, 0.3}) {
    const auto full = oracle::exact_disagreement_distribution(inst, 1 / t);
    const auto cells = oracle::cell_uniform_overlap(inst, 1 / t);
    REQUIRE(cells.size() == 3);
    for (std::size_t d = 0; d < 3; ++d) CHECK(std::abs(cells[d] - full[8 * d]) < 1e-6);
  }
}
