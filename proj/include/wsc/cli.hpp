#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "wsc/instance.hpp"
#include "wsc/scaling.hpp"
#include "wsc/solvers.hpp"
#include "wsc/tts.hpp"

namespace wsc {

inline constexpr std::string_view kToolVersion = "0.1.0";

// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitIo = 2, kExitValidation = 3 };

std::uint64_t fnv1a64(std::string_view bytes);
std::string read_text_file(const std::string& path);
// Writes through a temporary file and renames it into place.
void write_text_file(const std::string& path, std::string_view text);

// Instance k of a generated set of `pairs`-pair networks. The backbone seed is
// derived from (seed, pairs, k), so sets of different sizes never share signs.
ProblemInstance generate_indexed_instance(int pairs, std::uint64_t seed, int k);
std::string generated_instance_id(int pairs, int k);

// Lowers the reference energy to the best of `runs` PT+ICM runs unless the
// instance already carries an exhaustive reference.
void consensus_reference(ProblemInstance& inst, const PtParams& pt, int runs, std::uint64_t seed);

struct SolverGrid {
  SolverId solver = SolverId::sa;
  std::vector<std::string> points;  // params JSON overlays on default_params(solver, n)
};

struct BenchPlan {
  std::vector<int> pairs;  // network sizes in weak-strong pairs
  int count = 1;  // instances per size
  std::uint64_t instance_seed = 1;
  std::vector<SolverGrid> solvers;
  int trials = 10;
  std::uint64_t seed = 1;
  double percentile = 50;
  bool consensus = true;
  int consensus_runs = 3;
  int consensus_sweeps = 2000;
  FitModel model = FitModel::linear;
  int last_k = 3;
  std::string output_dir;  // resolved against the plan file directory
  std::string echo;  // the plan as parsed, for reports
};

// Parses and validates a plan; every grid point is checked against every size
// before anything runs.
BenchPlan parse_bench_plan(std::string_view text, const std::string& base_dir);

// Run seed of one cell of the plan.
std::uint64_t bench_run_seed(const BenchPlan& plan, std::size_t instance_index, SolverId solver,
                             std::size_t grid_index, int trial);

struct BenchSummary {
  std::size_t runs_planned = 0;
  std::size_t runs_executed = 0;
  std::size_t runs_skipped = 0;
  std::vector<std::string> warnings;
};

// Runs the full pipeline into plan.output_dir: instances, runs.csv,
// tts_instances.csv, tts.csv, fit.json and report.json. Rows already in
// runs.csv are skipped, and the final log is rewritten in plan order.
BenchSummary run_bench(const BenchPlan& plan, int jobs, std::ostream& progress);

// Per-size percentile table for every solver in a run log.
std::vector<TtsPoint> tts_table(const std::vector<InstanceTts>& per_instance, double percentile,
                                std::uint64_t seed, std::vector<std::string>* warnings = nullptr);
std::string tts_table_csv(const std::vector<TtsPoint>& rows);
std::string instance_tts_csv(const std::vector<InstanceTts>& rows);

struct ExternalCurve {
  std::string label;
  std::string units;
  std::string provenance;
  std::vector<std::pair<double, double>> points;  // (n, tts)
};

// CSV with header n,tts (extra columns rejected). Errors name the line.
ExternalCurve parse_external_curve(std::string_view csv, std::string label, std::string units,
                                   std::string provenance);
std::string external_curve_json(const ExternalCurve& c);

int cli_main(int argc, char** argv);

}  // namespace wsc
