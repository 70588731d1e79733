#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "json.hpp"
#include "wsc/cli.hpp"
#include "wsc/errors.hpp"

namespace wsc {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered = nlohmann::ordered_json;

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open for reading");
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError(path + ": read failed");
  return os.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw IoError(target.parent_path().string() + ": " + ec.message());
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(tmp + ": cannot open for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError(tmp + ": write failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw IoError(path + ": " + ec.message());
}

ProblemInstance generate_indexed_instance(int pairs, std::uint64_t seed, int k) {
  if (pairs < 1) throw ValidationError("generate: pair count must be >= 1");
  if (k < 0) throw ValidationError("generate: instance index must be >= 0");
  return generate_network(tiled_pair_layout(pairs),
                          mix_seed(mix_seed(seed, static_cast<std::uint64_t>(pairs)),
                                   static_cast<std::uint64_t>(k)));
}

std::string generated_instance_id(int pairs, int k) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "p%d_i%03d", pairs, k);
  return buf;
}

void consensus_reference(ProblemInstance& inst, const PtParams& pt, int runs, std::uint64_t seed) {
  if (inst.reference_method() == ReferenceMethod::exhaustive) return;
  if (runs < 1) throw ValidationError("consensus reference: runs must be >= 1");
  std::optional<Energy> best = inst.reference_energy();
  for (int r = 0; r < runs; ++r) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(r)), {0xc0});
    const SolveOutcome o = pt_icm(inst, pt, rng);
    if (!best || o.best_energy < *best) best = o.best_energy;
  }
  inst.set_reference(*best, ReferenceMethod::consensus);
}

// ---------------------------------------------------------------------------
// Plan
// ---------------------------------------------------------------------------

namespace {

void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& ctx) {
  if (!j.is_object()) throw ValidationError(ctx + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }) ==
        allowed.end())
      throw ValidationError(ctx + ": unknown key '" + k + "'");
  }
}

template <typename T>
void read_key(const json& j, const char* key, T& out, const std::string& ctx) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(ctx + "." + key + ": wrong type");
  }
}

}  // namespace

BenchPlan parse_bench_plan(std::string_view text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("plan: malformed JSON: ") + e.what());
  }
  BenchPlan p;
  require_keys(j, {"instances", "solvers", "trials", "seed", "percentile", "reference", "fit", "output"},
               "plan");
  if (!j.contains("instances") || !j.contains("solvers"))
    throw ValidationError("plan: 'instances' and 'solvers' are required");

  const json& inst = j["instances"];
  require_keys(inst, {"pairs", "count", "seed"}, "plan.instances");
  read_key(inst, "pairs", p.pairs, "plan.instances");
  read_key(inst, "count", p.count, "plan.instances");
  read_key(inst, "seed", p.instance_seed, "plan.instances");
  if (p.pairs.empty()) throw ValidationError("plan.instances.pairs: at least one size is required");
  for (int s : p.pairs)
    if (s < 1) throw ValidationError("plan.instances.pairs: sizes must be >= 1");
  if (std::adjacent_find(p.pairs.begin(), p.pairs.end(), std::greater_equal<>()) != p.pairs.end())
    throw ValidationError("plan.instances.pairs: sizes must be strictly increasing");
  if (p.count < 1) throw ValidationError("plan.instances.count: must be >= 1");

  const json& solvers = j["solvers"];
  if (!solvers.is_array() || solvers.empty())
    throw ValidationError("plan.solvers: expected a non-empty array");
  for (std::size_t s = 0; s < solvers.size(); ++s) {
    const std::string ctx = "plan.solvers[" + std::to_string(s) + "]";
    require_keys(solvers[s], {"solver", "grid"}, ctx);
    std::string name;
    read_key(solvers[s], "solver", name, ctx);
    SolverGrid g;
    try {
      g.solver = parse_solver_id(name);
    } catch (const UsageError& e) {
      throw ValidationError(ctx + ".solver: " + e.what());
    }
    for (const auto& other : p.solvers)
      if (other.solver == g.solver) throw ValidationError(ctx + ": solver '" + name + "' listed twice");
    if (solvers[s].contains("grid")) {
      const json& grid = solvers[s]["grid"];
      if (!grid.is_array()) throw ValidationError(ctx + ".grid: expected an array");
      for (const auto& point : grid) {
        if (!point.is_object()) throw ValidationError(ctx + ".grid: points must be objects");
        if (point.contains("solver") || point.contains("seed"))
          throw ValidationError(ctx + ".grid: points may not set 'solver' or 'seed'");
        g.points.push_back(point.dump());
      }
    }
    if (g.points.empty()) g.points.push_back("{}");
    p.solvers.push_back(std::move(g));
  }

  read_key(j, "trials", p.trials, "plan");
  read_key(j, "seed", p.seed, "plan");
  read_key(j, "percentile", p.percentile, "plan");
  if (p.trials < 1) throw ValidationError("plan.trials: must be >= 1");
  if (!(p.percentile > 0 && p.percentile < 100))
    throw ValidationError("plan.percentile: must lie strictly between 0 and 100");

  if (j.contains("reference")) {
    const json& r = j["reference"];
    require_keys(r, {"method", "runs", "sweeps"}, "plan.reference");
    std::string method = "consensus";
    read_key(r, "method", method, "plan.reference");
    if (method != "consensus" && method != "construction")
      throw ValidationError("plan.reference.method: expected 'consensus' or 'construction'");
    p.consensus = method == "consensus";
    read_key(r, "runs", p.consensus_runs, "plan.reference");
    read_key(r, "sweeps", p.consensus_sweeps, "plan.reference");
    if (p.consensus_runs < 1 || p.consensus_sweeps < 1)
      throw ValidationError("plan.reference: runs and sweeps must be >= 1");
  }
  if (j.contains("fit")) {
    const json& f = j["fit"];
    require_keys(f, {"model", "last_k"}, "plan.fit");
    std::string model = "linear";
    read_key(f, "model", model, "plan.fit");
    try {
      p.model = parse_fit_model(model);
    } catch (const UsageError& e) {
      throw ValidationError(std::string("plan.fit.model: ") + e.what());
    }
    read_key(f, "last_k", p.last_k, "plan.fit");
    if (p.last_k < 0) throw ValidationError("plan.fit.last_k: must be >= 0");
  }
  std::string out = "bench_out";
  read_key(j, "output", out, "plan");
  p.output_dir = fs::path(out).is_absolute() ? out : (fs::path(base_dir) / out).lexically_normal().string();

  // Every grid point must be valid at every size before anything runs.
  for (const auto& g : p.solvers)
    for (std::size_t k = 0; k < g.points.size(); ++k)
      for (int pairs : p.pairs) {
        const std::size_t n = static_cast<std::size_t>(pairs) * 16;
        try {
          validate(params_from_json(g.points[k], default_params(g.solver, n)));
        } catch (const ValidationError& e) {
          throw ValidationError("plan: solver '" + std::string(to_string(g.solver)) + "' grid point " +
                                std::to_string(k) + " at n = " + std::to_string(n) + ": " + e.what());
        }
      }
  p.echo = j.dump();
  return p;
}

std::uint64_t bench_run_seed(const BenchPlan& plan, std::size_t instance_index, SolverId solver,
                             std::size_t grid_index, int trial) {
  std::uint64_t s = mix_seed(plan.seed, instance_index);
  s = mix_seed(s, static_cast<std::uint64_t>(solver));
  s = mix_seed(s, grid_index);
  return mix_seed(s, static_cast<std::uint64_t>(trial));
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

std::vector<TtsPoint> tts_table(const std::vector<InstanceTts>& per_instance, double percentile,
                                std::uint64_t seed, std::vector<std::string>* warnings) {
  std::map<std::pair<std::string, std::size_t>, std::vector<double>> groups;
  for (const auto& t : per_instance) groups[{t.solver, t.n}].push_back(t.tts);
  std::vector<TtsPoint> out;
  for (const auto& [key, values] : groups) {
    Rng rng(seed, {fnv1a64(key.first), key.second});
    TtsPoint pt;
    try {
      pt = aggregate_percentile(values, percentile, rng);
    } catch (const ValidationError& e) {
      if (warnings) warnings->push_back(key.first + " n=" + std::to_string(key.second) + ": " + e.what());
      pt.percentile = percentile;
      pt.instances = values.size();
      pt.unsolved = values.size();
      pt.censored_fraction = 1;
      pt.tts = kUnsolved;
      pt.ci = {kUnsolved, kUnsolved};
    }
    pt.n = key.second;
    pt.solver = key.first;
    out.push_back(pt);
  }
  return out;
}

namespace {

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

std::string tts_table_csv(const std::vector<TtsPoint>& rows) {
  std::ostringstream os;
  os << "solver,n,percentile,tts,ci_low,ci_high,instances,unsolved,censored_fraction\n";
  for (const auto& r : rows)
    os << r.solver << "," << r.n << "," << num(r.percentile) << "," << num(r.tts) << "," << num(r.ci.low)
       << "," << num(r.ci.high) << "," << r.instances << "," << r.unsolved << ","
       << num(r.censored_fraction) << "\n";
  return os.str();
}

std::string instance_tts_csv(const std::vector<InstanceTts>& rows) {
  std::ostringstream os;
  os << "solver,n,instance_id,t_ann_work,t_ann,successes,trials,p,p_low,p_high,tts,tts_wall_ns\n";
  for (const auto& r : rows)
    os << r.solver << "," << r.n << "," << r.instance_id << "," << r.t_ann_work << "," << num(r.t_ann)
       << "," << r.success.successes << "," << r.success.trials << "," << num(r.success.p) << ","
       << num(r.success.ci.low) << "," << num(r.success.ci.high) << "," << num(r.tts) << ","
       << num(r.tts_wall_ns) << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Bench runner
// ---------------------------------------------------------------------------

namespace {

struct Cell {
  std::size_t instance = 0;
  std::size_t solver = 0;  // index into plan.solvers
  std::size_t grid = 0;
  int trial = 0;
  std::uint64_t seed = 0;
};

using RowKey = std::tuple<std::string, std::string, std::uint64_t>;

RowKey key_of(const RunRecord& r) { return {r.solver, r.instance_id, r.seed}; }

struct PlannedInstance {
  std::string id;
  int pairs = 0;
  ProblemInstance inst;
  std::string file;
};

std::vector<PlannedInstance> prepare_instances(const BenchPlan& plan, std::ostream& progress) {
  std::vector<PlannedInstance> out;
  const fs::path dir = fs::path(plan.output_dir) / "instances";
  for (int pairs : plan.pairs) {
    for (int k = 0; k < plan.count; ++k) {
      PlannedInstance pi;
      pi.id = generated_instance_id(pairs, k);
      pi.pairs = pairs;
      pi.file = (dir / (pi.id + ".json")).string();
      ProblemInstance fresh = generate_indexed_instance(pairs, plan.instance_seed, k);
      if (fs::exists(pi.file)) {
        ProblemInstance stored = load_instance(pi.file);
        ProblemInstance cmp = stored;
        if (fresh.reference_energy()) cmp.set_reference(*fresh.reference_energy(), fresh.reference_method());
        else cmp.clear_reference();
        if (!(cmp == fresh))
          throw ValidationError(pi.file + ": stored instance does not match the plan's generator seeds");
        const bool usable = !plan.consensus || stored.reference_method() == ReferenceMethod::consensus ||
                            stored.reference_method() == ReferenceMethod::exhaustive;
        if (usable) {
          pi.inst = std::move(stored);
          out.push_back(std::move(pi));
          continue;
        }
      }
      if (plan.consensus) {
        PtParams pt;
        pt.sweeps = plan.consensus_sweeps;
        progress << "reference " << pi.id << " ..." << std::flush;
        consensus_reference(fresh, pt, plan.consensus_runs, mix_seed(plan.seed, fnv1a64(pi.id)));
        progress << " " << *fresh.reference_energy() << "\n";
      }
      write_text_file(pi.file, serialize_instance(fresh));
      pi.inst = std::move(fresh);
      out.push_back(std::move(pi));
    }
  }
  return out;
}

void write_manifest(const BenchPlan& plan, const std::vector<PlannedInstance>& instances) {
  ordered m;
  m["tool_version"] = std::string(kToolVersion);
  auto files = ordered::array();
  for (const auto& pi : instances) {
    const std::string text = read_text_file(pi.file);
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
    files.push_back({{"file", fs::path(pi.file).filename().string()},
                     {"instance_id", pi.id},
                     {"n", pi.inst.n()},
                     {"fnv1a64", hex}});
  }
  m["files"] = files;
  write_text_file((fs::path(plan.output_dir) / "instances" / "manifest.json").string(), m.dump(2) + "\n");
}

}  // namespace

BenchSummary run_bench(const BenchPlan& plan, int jobs, std::ostream& progress) {
  if (jobs < 1) throw UsageError("--jobs must be >= 1");
  BenchSummary summary;
  std::vector<PlannedInstance> instances = prepare_instances(plan, progress);
  write_manifest(plan, instances);

  // Parameter sets per (instance, solver, grid point).
  std::vector<std::vector<std::vector<SolverParams>>> params(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    for (const auto& g : plan.solvers) {
      std::vector<SolverParams> pts;
      for (const auto& text : g.points) pts.push_back(params_from_json(text, default_params(g.solver, instances[i].inst.n())));
      params[i].push_back(std::move(pts));
    }
  }

  std::vector<Cell> cells;
  for (std::size_t i = 0; i < instances.size(); ++i)
    for (std::size_t s = 0; s < plan.solvers.size(); ++s)
      for (std::size_t g = 0; g < plan.solvers[s].points.size(); ++g)
        for (int t = 0; t < plan.trials; ++t)
          cells.push_back({i, s, g, t, bench_run_seed(plan, i, plan.solvers[s].solver, g, t)});
  summary.runs_planned = cells.size();

  const std::string log_path = (fs::path(plan.output_dir) / "runs.csv").string();
  std::map<RowKey, RunRecord> done;
  if (fs::exists(log_path)) {
    std::string text = read_text_file(log_path);
    // A run interrupted mid-write can leave a partial last line; drop it.
    if (!text.empty() && text.back() != '\n') text.erase(text.find_last_of('\n') + 1);
    for (auto& r : parse_run_log(text)) done.emplace(key_of(r), std::move(r));
  }
  std::vector<const Cell*> todo;
  for (const auto& c : cells) {
    const RunRecord probe{std::string(to_string(plan.solvers[c.solver].solver)), 0, instances[c.instance].id,
                          c.seed, false, 0, 0, 0};
    if (done.count(key_of(probe))) ++summary.runs_skipped;
    else todo.push_back(&c);
  }

  {
    const bool fresh_log = !fs::exists(log_path) || done.empty();
    if (fresh_log) write_text_file(log_path, std::string(kRunLogHeader) + "\n");
    else write_text_file(log_path, [&] {
      // Normalise the surviving rows before appending.
      std::string s = std::string(kRunLogHeader) + "\n";
      for (const auto& [k, r] : done) s += format_run_record(r) + "\n";
      return s;
    }());
  }
  std::ofstream log(log_path, std::ios::app);
  if (!log) throw IoError(log_path + ": cannot open for appending");
  std::mutex writer;
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> below_reference{0};
  std::exception_ptr failure;
  auto worker = [&] {
    while (true) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= todo.size()) return;
      const Cell& c = *todo[idx];
      try {
        SolverParams p = params[c.instance][c.solver][c.grid];
        p.seed = c.seed;
        const ProblemInstance& inst = instances[c.instance].inst;
        const SolveOutcome o = run_solver(inst, p);
        RunRecord r{std::string(to_string(p.solver)), inst.n(), instances[c.instance].id, c.seed, o.success,
                    std::max<std::uint64_t>(o.work, 1), o.wall_time.count(), planned_work(p, inst)};
        if (o.below_reference) ++below_reference;
        std::lock_guard lock(writer);
        log << format_run_record(r) << "\n" << std::flush;
        done.emplace(key_of(r), std::move(r));
        ++summary.runs_executed;
        if (summary.runs_executed % 100 == 0)
          progress << "runs " << summary.runs_executed << "/" << todo.size() << "\n" << std::flush;
      } catch (...) {
        std::lock_guard lock(writer);
        if (!failure) failure = std::current_exception();
        next = todo.size();
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  log.close();
  if (failure) std::rethrow_exception(failure);
  if (below_reference > 0)
    summary.warnings.push_back(std::to_string(below_reference.load()) +
                               " runs found energies below the instance reference");

  // Canonical log: plan order, only rows belonging to the plan.
  std::vector<RunRecord> records;
  std::string canon = std::string(kRunLogHeader) + "\n";
  for (const auto& c : cells) {
    const RunRecord probe{std::string(to_string(plan.solvers[c.solver].solver)), 0, instances[c.instance].id,
                          c.seed, false, 0, 0, 0};
    const RunRecord& r = done.at(key_of(probe));
    canon += format_run_record(r) + "\n";
    records.push_back(r);
  }
  if (done.size() > records.size())
    summary.warnings.push_back(std::to_string(done.size() - records.size()) +
                               " rows in runs.csv do not belong to this plan and were dropped");
  write_text_file(log_path, canon);

  const auto per_instance = instance_tts(records);
  write_text_file((fs::path(plan.output_dir) / "tts_instances.csv").string(), instance_tts_csv(per_instance));
  const auto table = tts_table(per_instance, plan.percentile, plan.seed, &summary.warnings);
  write_text_file((fs::path(plan.output_dir) / "tts.csv").string(), tts_table_csv(table));

  ordered fits = ordered::object();
  std::vector<std::pair<std::string, FitResult>> fitted;
  for (const auto& g : plan.solvers) {
    const std::string name(to_string(g.solver));
    std::vector<FitPoint> pts;
    for (const auto& row : table)
      if (row.solver == name && std::isfinite(row.tts)) pts.push_back({static_cast<double>(row.n), std::log10(row.tts)});
    try {
      FitResult f = fit(plan.model, pts, plan.last_k);
      fits[name] = ordered::parse(fit_report_json(f));
      fitted.emplace_back(name, std::move(f));
    } catch (const ValidationError& e) {
      fits[name] = nullptr;
      summary.warnings.push_back("fit " + name + ": " + e.what());
    }
  }
  ordered fit_doc;
  fit_doc["tool_version"] = std::string(kToolVersion);
  fit_doc["model"] = std::string(to_string(plan.model));
  fit_doc["last_k"] = plan.last_k;
  fit_doc["percentile"] = plan.percentile;
  fit_doc["fits"] = fits;
  auto ranking = ordered::array();
  for (const auto& r : compare_solvers(fitted))
    ranking.push_back({{"solver", r.label},
                       {"b", r.b},
                       {"ci_low", r.ci_low},
                       {"ci_high", r.ci_high},
                       {"indistinguishable_from", r.indistinguishable_from}});
  fit_doc["ranking"] = ranking;
  write_text_file((fs::path(plan.output_dir) / "fit.json").string(), fit_doc.dump(2) + "\n");

  ordered report;
  report["tool_version"] = std::string(kToolVersion);
  report["plan"] = ordered::parse(plan.echo);
  report["runs_planned"] = summary.runs_planned;
  report["runs_executed"] = summary.runs_executed;
  report["runs_skipped"] = summary.runs_skipped;
  report["percentile_note"] = "tts aggregated over instances by nearest-rank percentile";
  auto refs = ordered::array();
  for (const auto& pi : instances)
    refs.push_back({{"instance_id", pi.id},
                    {"n", pi.inst.n()},
                    {"reference_energy_scaled", *pi.inst.reference_energy()},
                    {"reference_method", std::string(to_string(pi.inst.reference_method()))}});
  report["references"] = refs;
  report["warnings"] = summary.warnings;
  write_text_file((fs::path(plan.output_dir) / "report.json").string(), report.dump(2) + "\n");
  return summary;
}

// ---------------------------------------------------------------------------
// External curves
// ---------------------------------------------------------------------------

ExternalCurve parse_external_curve(std::string_view csv, std::string label, std::string units,
                                   std::string provenance) {
  if (label.empty()) throw ValidationError("import: --label must not be empty");
  if (units.empty()) throw ValidationError("import: --units must not be empty");
  ExternalCurve c{std::move(label), std::move(units), std::move(provenance), {}};
  std::istringstream in{std::string(csv)};
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != "n,tts") throw ValidationError("import line " + std::to_string(line_no) + ": expected header 'n,tts'");
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      throw ValidationError("import line " + std::to_string(line_no) + ": expected 2 fields");
    double n = 0, t = 0;
    try {
      std::size_t used = 0;
      n = std::stod(line.substr(0, comma), &used);
      if (used != comma) throw std::invalid_argument("n");
      const std::string rest = line.substr(comma + 1);
      t = std::stod(rest, &used);
      if (used != rest.size()) throw std::invalid_argument("tts");
    } catch (const std::exception&) {
      throw ValidationError("import line " + std::to_string(line_no) + ": fields must be numbers");
    }
    if (!(n > 0) || !(t > 0) || !std::isfinite(t))
      throw ValidationError("import line " + std::to_string(line_no) + ": n and tts must be positive");
    c.points.emplace_back(n, t);
  }
  if (!header) throw ValidationError("import: empty file");
  if (c.points.empty()) throw ValidationError("import: no data rows");
  return c;
}

std::string external_curve_json(const ExternalCurve& c) {
  ordered j;
  j["label"] = c.label;
  j["units"] = c.units;
  j["provenance"] = c.provenance;
  auto pts = ordered::array();
  for (const auto& [n, t] : c.points) pts.push_back({{"n", n}, {"tts", t}});
  j["points"] = pts;
  return j.dump(2) + "\n";
}

}  // namespace wsc
