#include "wsc/scaling.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "wsc/errors.hpp"
#include "wsc/tts.hpp"

namespace wsc {

namespace {

std::vector<double> basis(FitModel m, double n) {
  const double r = std::sqrt(n);
  if (m == FitModel::linear) return {1.0, r};
  return {1.0, r, std::log10(r)};
}

std::size_t arity(FitModel m) { return m == FitModel::linear ? 2 : 3; }

std::vector<FitPoint> select(std::vector<FitPoint> points, int last_k) {
  if (last_k < 0) throw ValidationError("fit: last_k must be >= 0");
  for (const auto& p : points)
    if (!(p.n > 0) || !std::isfinite(p.log10_tts))
      throw ValidationError("fit: points need n > 0 and a finite log10 tts");
  std::stable_sort(points.begin(), points.end(),
                   [](const FitPoint& a, const FitPoint& b) { return a.n < b.n; });
  if (last_k > 0 && points.size() > static_cast<std::size_t>(last_k))
    points.erase(points.begin(), points.end() - last_k);
  return points;
}

// Plain OLS; fills coefficients, residuals, rss, condition number and the
// parametric covariance.
FitResult solve(FitModel model, std::vector<FitPoint> points) {
  const std::size_t k = arity(model);
  if (points.size() < k)
    throw ValidationError(std::string("fit: the ") + std::string(to_string(model)) + " model needs at least " +
                          std::to_string(k) + " points, got " + std::to_string(points.size()));
  const auto m = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd x(m, static_cast<Eigen::Index>(k));
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto row = basis(model, points[i].n);
    for (std::size_t j = 0; j < k; ++j) x(i, static_cast<Eigen::Index>(j)) = row[j];
    y(i) = points[i].log10_tts;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x);
  const auto& sv = svd.singularValues();
  FitResult f;
  f.model = model;
  f.condition_number = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1)
                                              : std::numeric_limits<double>::infinity();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < static_cast<Eigen::Index>(k))
    throw ValidationError("fit: design matrix is rank deficient (repeated sizes?)");
  if (f.condition_number > kConditionWarning)
    f.warnings.push_back("design matrix condition number " + std::to_string(f.condition_number) +
                         " exceeds 1e8");
  const Eigen::VectorXd beta = qr.solve(y);
  const Eigen::VectorXd res = y - x * beta;
  f.coefficients.assign(beta.data(), beta.data() + beta.size());
  f.residuals.assign(res.data(), res.data() + res.size());
  f.rss = res.squaredNorm();
  const double dof = static_cast<double>(m) - static_cast<double>(k);
  const double sigma2 = dof > 0 ? f.rss / dof : 0.0;
  const Eigen::MatrixXd cov = sigma2 * (x.transpose() * x).inverse();
  f.covariance.assign(k, std::vector<double>(k));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) f.covariance[i][j] = cov(i, j);
  // Student-t intervals; with no residual degrees of freedom the fit is an
  // exact interpolation and the interval collapses to the estimate.
  const double t = dof > 0 ? boost::math::quantile(
                                 boost::math::complement(boost::math::students_t(dof), 0.025))
                           : 0.0;
  f.ci_method = "parametric";
  for (std::size_t j = 0; j < k; ++j) {
    const double se = std::sqrt(std::max(0.0, cov(j, j)));
    f.ci_low.push_back(f.coefficients[j] - t * se);
    f.ci_high.push_back(f.coefficients[j] + t * se);
  }
  f.points = std::move(points);
  return f;
}

FitResult bootstrap_fit(FitModel model, const std::vector<SizeSample>& sizes, int last_k, Rng& rng,
                        int resamples, double percentile) {
  std::vector<SizeSample> used = sizes;
  std::stable_sort(used.begin(), used.end(),
                   [](const SizeSample& a, const SizeSample& b) { return a.n < b.n; });
  if (last_k > 0 && used.size() > static_cast<std::size_t>(last_k))
    used.erase(used.begin(), used.end() - last_k);
  std::vector<FitPoint> centre;
  for (const auto& s : used) {
    if (s.tts.empty()) throw ValidationError("fit: size " + std::to_string(s.n) + " has no instances");
    const double v = nearest_rank(s.tts, percentile);
    if (std::isinf(v))
      throw ValidationError("fit: percentile tts at n = " + std::to_string(s.n) + " is unsolved");
    centre.push_back({s.n, std::log10(v)});
  }
  FitResult f = solve(model, centre);
  std::vector<std::vector<double>> draws(f.coefficients.size());
  std::vector<FitPoint> pts(used.size());
  std::vector<double> sample;
  int ok = 0;
  for (int b = 0; b < resamples; ++b) {
    bool finite = true;
    for (std::size_t i = 0; i < used.size(); ++i) {
      const auto& t = used[i].tts;
      sample.resize(t.size());
      for (auto& x : sample) x = t[rng.below(t.size())];
      const double v = nearest_rank(sample, percentile);
      finite = finite && std::isfinite(v);
      pts[i] = {used[i].n, finite ? std::log10(v) : 0.0};
    }
    if (!finite) continue;
    const FitResult r = solve(model, pts);
    for (std::size_t j = 0; j < draws.size(); ++j) draws[j].push_back(r.coefficients[j]);
    ++ok;
  }
  f.bootstrap_resamples = ok;
  if (ok > 0) {
    f.ci_method = "bootstrap";
    for (std::size_t j = 0; j < draws.size(); ++j) {
      auto& d = draws[j];
      std::sort(d.begin(), d.end());
      const auto at = [&](double q) { return d[static_cast<std::size_t>(std::floor(q * (d.size() - 1)))]; };
      f.ci_low[j] = std::min(at(0.025), f.coefficients[j]);
      f.ci_high[j] = std::max(at(0.975), f.coefficients[j]);
    }
  }
  if (ok < resamples)
    f.warnings.push_back(std::to_string(resamples - ok) +
                         " bootstrap replicates dropped (unsolved percentile)");
  return f;
}

}  // namespace

std::string_view to_string(FitModel m) { return m == FitModel::linear ? "linear" : "log_corrected"; }

FitModel parse_fit_model(std::string_view s) {
  if (s == "linear") return FitModel::linear;
  if (s == "log_corrected" || s == "log-corrected") return FitModel::log_corrected;
  throw UsageError("unknown fit model '" + std::string(s) + "' (expected linear or log_corrected)");
}

FitResult fit_linear(std::vector<FitPoint> points, int last_k) {
  return solve(FitModel::linear, select(std::move(points), last_k));
}

FitResult fit_log_corrected(std::vector<FitPoint> points, int last_k) {
  return solve(FitModel::log_corrected, select(std::move(points), last_k));
}

FitResult fit(FitModel model, std::vector<FitPoint> points, int last_k) {
  return model == FitModel::linear ? fit_linear(std::move(points), last_k)
                                   : fit_log_corrected(std::move(points), last_k);
}

FitResult fit_linear(const std::vector<SizeSample>& sizes, int last_k, Rng& rng, int resamples,
                     double percentile) {
  return bootstrap_fit(FitModel::linear, sizes, last_k, rng, resamples, percentile);
}

FitResult fit_log_corrected(const std::vector<SizeSample>& sizes, int last_k, Rng& rng,
                            int resamples, double percentile) {
  return bootstrap_fit(FitModel::log_corrected, sizes, last_k, rng, resamples, percentile);
}

std::vector<RankedFit> compare_solvers(const std::vector<std::pair<std::string, FitResult>>& fits) {
  std::vector<RankedFit> rows;
  for (const auto& [label, f] : fits) rows.push_back({label, f.b(), f.ci_low.at(1), f.ci_high.at(1), {}});
  std::stable_sort(rows.begin(), rows.end(),
                   [](const RankedFit& x, const RankedFit& y) { return x.b < y.b; });
  for (auto& r : rows)
    for (const auto& o : rows)
      if (&r != &o && r.ci_low <= o.ci_high && o.ci_low <= r.ci_high)
        r.indistinguishable_from.push_back(o.label);
  return rows;
}

std::string fit_report_json(const FitResult& f) {
  nlohmann::ordered_json j;
  j["model"] = std::string(to_string(f.model));
  const char* names[] = {"a", "b", "c"};
  nlohmann::ordered_json coeffs;
  for (std::size_t i = 0; i < f.coefficients.size(); ++i)
    coeffs[names[i]] = {{"value", f.coefficients[i]}, {"ci_low", f.ci_low[i]}, {"ci_high", f.ci_high[i]}};
  j["coefficients"] = coeffs;
  j["ci_method"] = f.ci_method;
  if (f.ci_method == "bootstrap") j["bootstrap_resamples"] = f.bootstrap_resamples;
  j["covariance"] = f.covariance;
  auto pts = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < f.points.size(); ++i)
    pts.push_back({{"n", f.points[i].n}, {"log10_tts", f.points[i].log10_tts}, {"residual", f.residuals[i]}});
  j["points"] = pts;
  j["rss"] = f.rss;
  j["condition_number"] = f.condition_number;
  j["warnings"] = f.warnings;
  return j.dump(2);
}

std::string fit_curve_csv(const FitResult& f, int samples) {
  std::ostringstream os;
  os.precision(10);
  os << "n,sqrt_n,log10_tts_fit\n";
  if (f.points.empty() || samples < 2) return os.str();
  const double lo = std::sqrt(f.points.front().n);
  const double hi = std::sqrt(f.points.back().n);
  for (int i = 0; i < samples; ++i) {
    const double r = lo + (hi - lo) * i / (samples - 1);
    const auto row = basis(f.model, r * r);
    double y = 0;
    for (std::size_t j = 0; j < row.size(); ++j) y += row[j] * f.coefficients[j];
    os << r * r << "," << r << "," << y << "\n";
  }
  return os.str();
}

}  // namespace wsc
