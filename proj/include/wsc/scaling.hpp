#pragma once

#include <string>
#include <vector>

#include "wsc/rng.hpp"

namespace wsc {

enum class FitModel { linear, log_corrected };
std::string_view to_string(FitModel m);
FitModel parse_fit_model(std::string_view s);

// One aggregated size: n and log10 of its tts.
struct FitPoint {
  double n = 0;
  double log10_tts = 0;
};

// Per-instance tts values of one size, used for instance-level bootstrap.
struct SizeSample {
  double n = 0;
  std::vector<double> tts;  // may contain unsolved (infinite) entries
};

struct FitResult {
  FitModel model = FitModel::linear;
  // a, b for linear; a, b, c for log-corrected:
  //   log10 tts = a + b sqrt(n) [+ c log10 sqrt(n)]
  std::vector<double> coefficients;
  std::vector<std::vector<double>> covariance;
  std::vector<double> ci_low;
  std::vector<double> ci_high;
  std::string ci_method;  // "bootstrap" or "parametric"
  int bootstrap_resamples = 0;  // replicates that produced a fit
  std::vector<FitPoint> points;  // the points actually fitted
  std::vector<double> residuals;
  double rss = 0;
  double condition_number = 0;
  std::vector<std::string> warnings;

  double a() const { return coefficients.at(0); }
  double b() const { return coefficients.at(1); }
  double c() const { return coefficients.size() > 2 ? coefficients[2] : 0.0; }
};

inline constexpr double kConditionWarning = 1e8;

// OLS on (sqrt n, log10 tts) over the largest last_k sizes (0 = all).
FitResult fit_linear(std::vector<FitPoint> points, int last_k = 3);

// OLS in the basis {1, sqrt n, log10 sqrt n}.
FitResult fit_log_corrected(std::vector<FitPoint> points, int last_k = 0);

// Same fits on per-size medians (or another percentile) of per-instance tts,
// with confidence intervals from resampling instances within each size.
FitResult fit_linear(const std::vector<SizeSample>& sizes, int last_k, Rng& rng,
                     int resamples = 1000, double percentile = 50);
FitResult fit_log_corrected(const std::vector<SizeSample>& sizes, int last_k, Rng& rng,
                            int resamples = 1000, double percentile = 50);

FitResult fit(FitModel model, std::vector<FitPoint> points, int last_k);

struct RankedFit {
  std::string label;
  double b = 0;
  double ci_low = 0;
  double ci_high = 0;
  std::vector<std::string> indistinguishable_from;  // overlapping b intervals
};

// Sorted by b ascending.
std::vector<RankedFit> compare_solvers(const std::vector<std::pair<std::string, FitResult>>& fits);

// JSON report: model, coefficients, CIs, points, residuals.
std::string fit_report_json(const FitResult& f);
// CSV "n,sqrt_n,log10_tts_fit" sampled at `samples` sizes across the fitted range.
std::string fit_curve_csv(const FitResult& f, int samples = 50);

}  // namespace wsc
