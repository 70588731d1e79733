#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "wsc/rng.hpp"
#include "wsc/solvers.hpp"

namespace wsc {

inline constexpr double kTargetConfidence = 0.99;
inline constexpr double kUnsolved = std::numeric_limits<double>::infinity();

struct RunRecord {
  std::string solver;
  std::size_t n = 0;
  std::string instance_id;
  std::uint64_t seed = 0;
  bool success = false;
  std::uint64_t work = 0;
  std::int64_t wall_ns = 0;
  std::uint64_t t_ann_work = 0;  // planned work of one run

  bool operator==(const RunRecord&) const = default;
};

struct Interval {
  double low = 0;
  double high = 0;
};

struct SuccessEstimate {
  double p = 0;
  std::size_t successes = 0;
  std::size_t trials = 0;
  Interval ci;  // Wilson 95%
};

// Wilson score interval for k successes out of n trials (z = 1.96).
Interval wilson_interval(std::size_t k, std::size_t n, double z = 1.959963984540054);

SuccessEstimate success_probability(const std::vector<RunRecord>& records);
SuccessEstimate success_probability(std::size_t successes, std::size_t trials);

// Repetitions needed for 99% confidence, ln(0.01)/ln(1-p), at least 1.
// Infinite for p = 0.
double repetitions(double p);

// T_ann * repetitions(p); kUnsolved when p = 0.
double time_to_solution(double p, double t_ann);

struct GridResult {
  std::size_t index = 0;  // into the grid
  double tts = kUnsolved;
  double t_ann = 0;  // mean work of a run at that point
  SuccessEstimate success;
};

struct TtsOptimum {
  bool solved = false;
  GridResult best;
  std::vector<GridResult> grid;
};

// Runs `trials` seeds of every grid point and returns the point of least
// work-unit tts; ties go to the smaller T_ann. Seeds are derived from
// (base_seed, grid index, trial).
TtsOptimum optimize_tts(const ProblemInstance& inst, const std::vector<SolverParams>& grid,
                        int trials, std::uint64_t base_seed);

struct TtsPoint {
  std::size_t n = 0;
  std::string solver;
  double percentile = 50;
  double tts = kUnsolved;
  Interval ci;  // bootstrap 95%, clamped to contain tts
  std::size_t instances = 0;
  std::size_t unsolved = 0;
  double censored_fraction = 0;
};

// Nearest-rank percentile over per-instance tts values; unsolved values
// (infinite) rank above every finite one. Rejects when all are unsolved.
TtsPoint aggregate_percentile(const std::vector<double>& tts, double percentile, Rng& rng,
                              int resamples = 1000);

// Nearest-rank percentile of a sample (infinite entries allowed).
double nearest_rank(std::vector<double> values, double percentile);

// ---------------------------------------------------------------------------
// Run log
// ---------------------------------------------------------------------------

inline constexpr std::string_view kRunLogHeader =
    "solver,n,instance_id,seed,success,work,wall_ns,t_ann_work";

// One CSV line without the trailing newline.
std::string format_run_record(const RunRecord& r);
// Parses a whole log including its header. Errors name the 1-based line.
std::vector<RunRecord> parse_run_log(std::string_view text);

// Per (solver, instance, parameter point) estimate. Runs are grouped into
// parameter points by t_ann_work; tts uses the mean measured work per run.
struct InstanceTts {
  std::string solver;
  std::size_t n = 0;
  std::string instance_id;
  std::uint64_t t_ann_work = 0;  // planned work of the chosen point
  double t_ann = 0;  // mean measured work per run at that point
  SuccessEstimate success;
  double tts = kUnsolved;
  double tts_wall_ns = kUnsolved;
};

// Best point per (solver, instance): least tts, ties toward smaller T_ann.
std::vector<InstanceTts> instance_tts(const std::vector<RunRecord>& records);

}  // namespace wsc
