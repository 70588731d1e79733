#include "wsc/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "wsc/errors.hpp"

namespace wsc {

double spin_overlap(std::span<const Spin> a, std::span<const Spin> b) {
  if (a.size() != b.size())
    throw ValidationError("spin_overlap: states have " + std::to_string(a.size()) + " and " +
                          std::to_string(b.size()) + " spins");
  if (a.empty()) throw ValidationError("spin_overlap: empty states");
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return static_cast<double>(sum) / static_cast<double>(a.size());
}

int OverlapHistogram::bin_of(double q) {
  if (!(q >= -1 && q <= 1)) throw ValidationError("overlap histogram: q outside [-1, 1]");
  return static_cast<int>(std::lround((q + 1.0) / kOverlapBinWidth));
}

void OverlapHistogram::merge(const OverlapHistogram& other) {
  for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += other.counts[k];
}

std::uint64_t OverlapHistogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

namespace {
constexpr int kZeroBin = (kOverlapBins - 1) / 2;

std::uint64_t positive_mass(const OverlapHistogram& h) {
  return std::accumulate(h.counts.begin() + kZeroBin, h.counts.end(), std::uint64_t{0});
}
}  // namespace

std::string OverlapHistogram::normalization() const {
  return positive_mass(*this) > 0 ? "positive_q" : "full_range";
}

std::vector<double> OverlapHistogram::density() const {
  std::vector<double> d(counts.size(), 0.0);
  const std::uint64_t pos = positive_mass(*this);
  const std::uint64_t norm = pos > 0 ? pos : total();
  if (norm == 0) return d;
  for (std::size_t k = 0; k < counts.size(); ++k)
    d[k] = static_cast<double>(counts[k]) / (static_cast<double>(norm) * kOverlapBinWidth);
  return d;
}

OverlapHistogram sample_overlap_distribution(const ProblemInstance& inst,
                                             const TemperatureLadder& ladder, int sweeps, Rng& rng) {
  if (sweeps < 100) throw ValidationError("overlap sampling: sweeps must be >= 100");
  if (ladder.size() < 1) throw ValidationError("overlap sampling: empty ladder");
  const std::vector<double> betas = ladder.betas();
  Rng ra = rng.derive({0});
  Rng rb = rng.derive({1});
  TemperingChain a(inst, betas, ra);
  TemperingChain b(inst, betas, rb);
  OverlapHistogram h;
  h.temperature = ladder.temperatures.front();
  h.burn_in_fraction = 0.5;
  const int burn_in = sweeps / 2;
  for (int s = 0; s < sweeps; ++s) {
    a.sweep(ra);
    a.exchange(ra);
    b.sweep(rb);
    b.exchange(rb);
    if (s >= burn_in) h.add(spin_overlap(a.at(0).spins, b.at(0).spins));
  }
  return h;
}

std::string_view to_string(PeakClass c) {
  return c == PeakClass::single_peak ? "single_peak" : "multi_peak";
}

std::vector<double> smooth_density(const std::vector<double>& density, double sigma) {
  if (!(sigma > 0)) return density;
  const int m = static_cast<int>(density.size());
  const int reach = static_cast<int>(std::ceil(4 * sigma / kOverlapBinWidth));
  std::vector<double> kernel(reach + 1);
  for (int d = 0; d <= reach; ++d) {
    const double x = d * kOverlapBinWidth / sigma;
    kernel[d] = std::exp(-0.5 * x * x);
  }
  // Kernel renormalised over the bins inside [-1, 1] so mass at the edges is
  // not lost.
  std::vector<double> out(m, 0.0);
  for (int i = 0; i < m; ++i) {
    double acc = 0, wsum = 0;
    for (int j = std::max(0, i - reach); j <= std::min(m - 1, i + reach); ++j) {
      const double w = kernel[std::abs(i - j)];
      acc += w * density[j];
      wsum += w;
    }
    out[i] = acc / wsum;
  }
  return out;
}

PeakVerdict classify_density(const std::vector<double>& density, const PeakParams& params) {
  PeakVerdict v;
  v.params = params;
  const std::vector<double> s = smooth_density(density, params.sigma);
  const double top = s.empty() ? 0.0 : *std::max_element(s.begin(), s.end());
  if (!(top > 0)) throw ValidationError("classify_peaks: empty histogram");

  std::vector<int> cand;
  const int m = static_cast<int>(s.size());
  for (int i = 0; i < m; ++i) {
    const bool left = i == 0 || s[i] > s[i - 1];
    const bool right = i == m - 1 || s[i] >= s[i + 1];
    if (left && right && s[i] >= params.min_height * top) cand.push_back(i);
  }
  std::stable_sort(cand.begin(), cand.end(), [&](int x, int y) { return s[x] > s[y]; });
  std::vector<int> kept;
  for (int c : cand) {
    bool ok = true;
    for (int k : kept) {
      if (std::abs(OverlapHistogram::center(c) - OverlapHistogram::center(k)) < params.min_separation) {
        ok = false;
        break;
      }
      const auto [lo, hi] = std::minmax(c, k);
      const double valley = *std::min_element(s.begin() + lo, s.begin() + hi + 1);
      if (valley > params.max_valley * std::min(s[c], s[k])) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(c);
  }
  for (int k : kept) v.peaks.push_back({OverlapHistogram::center(k), s[k]});
  v.classification = v.peaks.size() >= 2 ? PeakClass::multi_peak : PeakClass::single_peak;
  return v;
}

PeakVerdict classify_peaks(const OverlapHistogram& h, const PeakParams& params) {
  if (h.total() == 0) throw ValidationError("classify_peaks: empty histogram");
  return classify_density(h.density(), params);
}

std::vector<PeakFraction> peak_fraction(const std::map<std::size_t, std::vector<PeakVerdict>>& by_n) {
  std::vector<PeakFraction> out;
  for (const auto& [n, verdicts] : by_n) {
    if (verdicts.size() < kMinLandscapeInstances)
      throw ValidationError("peak_fraction: n = " + std::to_string(n) + " has " +
                            std::to_string(verdicts.size()) + " instances, need at least " +
                            std::to_string(kMinLandscapeInstances));
    PeakFraction f;
    f.n = n;
    f.instances = verdicts.size();
    for (const auto& v : verdicts) f.multi_peak += v.classification == PeakClass::multi_peak;
    f.fraction = static_cast<double>(f.multi_peak) / static_cast<double>(f.instances);
    f.ci = wilson_interval(f.multi_peak, f.instances);
    out.push_back(f);
  }
  return out;
}

std::string histogram_csv(const OverlapHistogram& h) {
  std::ostringstream os;
  os.precision(10);
  os << "q_bin_center,density\n";
  const auto d = h.density();
  for (int k = 0; k < kOverlapBins; ++k) os << OverlapHistogram::center(k) << "," << d[k] << "\n";
  return os.str();
}

std::string verdict_json(const PeakVerdict& v) {
  nlohmann::ordered_json j;
  j["classification"] = std::string(to_string(v.classification));
  auto peaks = nlohmann::ordered_json::array();
  for (const auto& p : v.peaks) peaks.push_back({{"q", p.q}, {"height", p.height}});
  j["peaks"] = peaks;
  j["params"] = {{"sigma", v.params.sigma},
                 {"min_height", v.params.min_height},
                 {"min_separation", v.params.min_separation},
                 {"max_valley", v.params.max_valley}};
  return j.dump(2);
}

}  // namespace wsc
