#include "wsc/tts.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <tuple>

#include "wsc/errors.hpp"

namespace wsc {

Interval wilson_interval(std::size_t k, std::size_t n, double z) {
  if (n == 0) throw ValidationError("wilson interval: no trials");
  if (k > n) throw ValidationError("wilson interval: successes exceed trials");
  const double nn = static_cast<double>(n);
  const double p = k / nn;
  const double z2 = z * z;
  const double denom = 1 + z2 / nn;
  const double centre = (p + z2 / (2 * nn)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / denom;
  Interval ci{std::max(0.0, centre - half), std::min(1.0, centre + half)};
  if (k == 0) ci.low = 0;
  if (k == n) ci.high = 1;
  return ci;
}

SuccessEstimate success_probability(std::size_t successes, std::size_t trials) {
  if (trials == 0) throw ValidationError("success probability: no runs");
  SuccessEstimate e;
  e.successes = successes;
  e.trials = trials;
  e.p = static_cast<double>(successes) / static_cast<double>(trials);
  e.ci = wilson_interval(successes, trials);
  return e;
}

SuccessEstimate success_probability(const std::vector<RunRecord>& records) {
  std::size_t k = 0;
  for (const auto& r : records) k += r.success;
  return success_probability(k, records.size());
}

double repetitions(double p) {
  if (!(p >= 0 && p <= 1)) throw ValidationError("time to solution: p must lie in [0, 1]");
  if (p == 0) return kUnsolved;
  // At or above the target one run suffices; this also keeps p = 0.99 exact.
  if (p >= kTargetConfidence) return 1;
  return std::max(1.0, std::log(1 - kTargetConfidence) / std::log1p(-p));
}

double time_to_solution(double p, double t_ann) {
  const double r = repetitions(p);
  return std::isinf(r) ? kUnsolved : t_ann * r;
}

TtsOptimum optimize_tts(const ProblemInstance& inst, const std::vector<SolverParams>& grid,
                        int trials, std::uint64_t base_seed) {
  if (grid.empty()) throw ValidationError("optimize_tts: empty parameter grid");
  if (trials < 1) throw ValidationError("optimize_tts: trials must be >= 1");
  TtsOptimum out;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    SolverParams p = grid[g];
    std::size_t wins = 0;
    double work = 0;
    for (int t = 0; t < trials; ++t) {
      p.seed = mix_seed(mix_seed(base_seed, g), static_cast<std::uint64_t>(t));
      const SolveOutcome o = run_solver(inst, p);
      wins += o.success;
      work += static_cast<double>(o.work);
    }
    GridResult r;
    r.index = g;
    r.success = success_probability(wins, static_cast<std::size_t>(trials));
    r.t_ann = work / trials;
    r.tts = time_to_solution(r.success.p, r.t_ann);
    out.grid.push_back(r);
    if (!out.solved || r.tts < out.best.tts || (r.tts == out.best.tts && r.t_ann < out.best.t_ann)) {
      if (!std::isinf(r.tts)) {
        out.best = r;
        out.solved = true;
      }
    }
  }
  if (!out.solved) out.best = out.grid.front();
  return out;
}

double nearest_rank(std::vector<double> values, double percentile) {
  if (values.empty()) throw ValidationError("percentile: no values");
  if (!(percentile > 0 && percentile < 100))
    throw ValidationError("percentile: must lie strictly between 0 and 100");
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * values.size()));
  return values[std::max<std::size_t>(rank, 1) - 1];
}

TtsPoint aggregate_percentile(const std::vector<double>& tts, double percentile, Rng& rng,
                              int resamples) {
  if (tts.empty()) throw ValidationError("aggregate: no instances");
  TtsPoint pt;
  pt.percentile = percentile;
  pt.instances = tts.size();
  for (double v : tts) {
    if (std::isnan(v) || v < 0) throw ValidationError("aggregate: tts values must be >= 0");
    pt.unsolved += std::isinf(v);
  }
  if (pt.unsolved == tts.size())
    throw ValidationError("aggregate: all " + std::to_string(tts.size()) +
                          " instances unsolved; no percentile exists");
  pt.censored_fraction = static_cast<double>(pt.unsolved) / static_cast<double>(tts.size());
  pt.tts = nearest_rank(tts, percentile);

  std::vector<double> stats;
  stats.reserve(resamples);
  std::vector<double> sample(tts.size());
  for (int b = 0; b < resamples; ++b) {
    for (auto& x : sample) x = tts[rng.below(tts.size())];
    stats.push_back(nearest_rank(sample, percentile));
  }
  if (stats.empty()) {
    pt.ci = {pt.tts, pt.tts};
  } else {
    std::sort(stats.begin(), stats.end());
    const auto at = [&](double q) {
      const auto k = static_cast<std::size_t>(std::floor(q * (stats.size() - 1)));
      return stats[k];
    };
    pt.ci = {std::min(at(0.025), pt.tts), std::max(at(0.975), pt.tts)};
  }
  return pt;
}

std::string format_run_record(const RunRecord& r) {
  std::ostringstream os;
  os << r.solver << "," << r.n << "," << r.instance_id << "," << r.seed << ","
     << (r.success ? 1 : 0) << "," << r.work << "," << r.wall_ns << "," << r.t_ann_work;
  return os.str();
}

namespace {

template <typename T>
T parse_number(std::string_view field, std::size_t line, const char* name) {
  T v{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw ValidationError("run log line " + std::to_string(line) + ": " + name + " '" +
                          std::string(field) + "' is not a valid integer");
  return v;
}

}  // namespace

std::vector<RunRecord> parse_run_log(std::string_view text) {
  std::vector<RunRecord> out;
  std::size_t line_no = 0;
  bool header = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header) {
      if (line != kRunLogHeader)
        throw ValidationError("run log line " + std::to_string(line_no) + ": expected header '" +
                              std::string(kRunLogHeader) + "'");
      header = true;
      continue;
    }
    std::vector<std::string_view> f;
    std::size_t pos = 0;
    while (true) {
      const auto c = line.find(',', pos);
      f.push_back(line.substr(pos, c == std::string_view::npos ? std::string_view::npos : c - pos));
      if (c == std::string_view::npos) break;
      pos = c + 1;
    }
    if (f.size() != 8)
      throw ValidationError("run log line " + std::to_string(line_no) + ": expected 8 fields, got " +
                            std::to_string(f.size()));
    RunRecord r;
    r.solver = std::string(f[0]);
    parse_solver_id(r.solver);
    r.n = parse_number<std::size_t>(f[1], line_no, "n");
    r.instance_id = std::string(f[2]);
    r.seed = parse_number<std::uint64_t>(f[3], line_no, "seed");
    const int s = parse_number<int>(f[4], line_no, "success");
    if (s != 0 && s != 1)
      throw ValidationError("run log line " + std::to_string(line_no) + ": success must be 0 or 1");
    r.success = s == 1;
    r.work = parse_number<std::uint64_t>(f[5], line_no, "work");
    r.wall_ns = parse_number<std::int64_t>(f[6], line_no, "wall_ns");
    r.t_ann_work = parse_number<std::uint64_t>(f[7], line_no, "t_ann_work");
    if (r.n == 0 || r.work == 0)
      throw ValidationError("run log line " + std::to_string(line_no) + ": n and work must be positive");
    if (r.instance_id.empty())
      throw ValidationError("run log line " + std::to_string(line_no) + ": empty instance_id");
    out.push_back(std::move(r));
  }
  if (!header) throw ValidationError("run log: missing header");
  return out;
}

std::vector<InstanceTts> instance_tts(const std::vector<RunRecord>& records) {
  using Key = std::tuple<std::string, std::string, std::uint64_t>;
  struct Acc {
    std::size_t n = 0, runs = 0, wins = 0;
    double work = 0, wall = 0;
  };
  std::map<Key, Acc> points;
  for (const auto& r : records) {
    Acc& a = points[{r.solver, r.instance_id, r.t_ann_work}];
    if (a.runs > 0 && a.n != r.n)
      throw ValidationError("run log: instance '" + r.instance_id + "' appears with two sizes");
    a.n = r.n;
    ++a.runs;
    a.wins += r.success;
    a.work += static_cast<double>(r.work);
    a.wall += static_cast<double>(r.wall_ns);
  }
  std::map<std::pair<std::string, std::string>, InstanceTts> best;
  for (const auto& [key, a] : points) {
    InstanceTts t;
    std::tie(t.solver, t.instance_id, t.t_ann_work) = key;
    t.n = a.n;
    t.t_ann = a.work / static_cast<double>(a.runs);
    t.success = success_probability(a.wins, a.runs);
    t.tts = time_to_solution(t.success.p, t.t_ann);
    t.tts_wall_ns = time_to_solution(t.success.p, a.wall / static_cast<double>(a.runs));
    auto [it, fresh] = best.try_emplace({t.solver, t.instance_id}, t);
    if (!fresh && (t.tts < it->second.tts || (t.tts == it->second.tts && t.t_ann < it->second.t_ann)))
      it->second = t;
  }
  std::vector<InstanceTts> out;
  for (auto& [k, v] : best) out.push_back(std::move(v));
  return out;
}

}  // namespace wsc
