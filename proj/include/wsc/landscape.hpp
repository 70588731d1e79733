#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "wsc/instance.hpp"
#include "wsc/mcmc.hpp"
#include "wsc/rng.hpp"
#include "wsc/tts.hpp"

namespace wsc {

// q = (1/n) sum_j a_j b_j.
double spin_overlap(std::span<const Spin> a, std::span<const Spin> b);

inline constexpr int kOverlapBins = 101;
inline constexpr double kOverlapBinWidth = 2.0 / (kOverlapBins - 1);

struct OverlapHistogram {
  std::vector<std::uint64_t> counts = std::vector<std::uint64_t>(kOverlapBins, 0);
  double temperature = 0;
  double burn_in_fraction = 0.5;

  static double center(int bin) { return -1.0 + kOverlapBinWidth * bin; }
  static int bin_of(double q);

  void add(double q) { ++counts[static_cast<std::size_t>(bin_of(q))]; }
  void merge(const OverlapHistogram& other);
  std::uint64_t total() const;

  // Density per bin scaled so that the bins with centre in [0, 1] integrate
  // to one. Falls back to the full range when no mass lies at q >= 0.
  std::vector<double> density() const;
  // "positive_q" or "full_range" depending on which rule density() applied.
  std::string normalization() const;
};

// Default measurement ladder. At T = 0.1 a flipped weak cell (0.96 above the
// ground state) carries weight ~1e-4, so P(q) resolves backbone valleys rather
// than thermal weak-cell excitations.
inline constexpr double kLandscapeTMin = 0.1;
inline constexpr double kLandscapeTMax = 2.5;
inline constexpr int kLandscapeTemperatures = 25;

// Two independent parallel-tempering chains on the same ladder; q between
// their coldest replicas is recorded once per sweep after the burn-in half.
OverlapHistogram sample_overlap_distribution(const ProblemInstance& inst,
                                             const TemperatureLadder& ladder, int sweeps, Rng& rng);

struct PeakParams {
  double sigma = 0.02;  // Gaussian smoothing width in q
  double min_height = 0.10;  // relative to the global maximum
  double min_separation = 0.10;  // in q
  // Between two accepted peaks the smoothed density must drop to at most this
  // fraction of the lower one, so ripples of a broad hump do not count.
  double max_valley = 0.9;
};

struct Peak {
  double q = 0;
  double height = 0;
};

enum class PeakClass { single_peak, multi_peak };
std::string_view to_string(PeakClass c);

struct PeakVerdict {
  PeakClass classification = PeakClass::single_peak;
  std::vector<Peak> peaks;  // highest first
  PeakParams params;
};

std::vector<double> smooth_density(const std::vector<double>& density, double sigma);
PeakVerdict classify_peaks(const OverlapHistogram& h, const PeakParams& params = {});
PeakVerdict classify_density(const std::vector<double>& density, const PeakParams& params = {});

struct PeakFraction {
  std::size_t n = 0;
  std::size_t instances = 0;
  std::size_t multi_peak = 0;
  double fraction = 0;
  Interval ci;  // Wilson 95%
};

inline constexpr std::size_t kMinLandscapeInstances = 10;

// Fraction of multi-peak verdicts per size; every size needs at least
// kMinLandscapeInstances verdicts.
std::vector<PeakFraction> peak_fraction(const std::map<std::size_t, std::vector<PeakVerdict>>& by_n);

std::string histogram_csv(const OverlapHistogram& h);
std::string verdict_json(const PeakVerdict& v);

}  // namespace wsc
