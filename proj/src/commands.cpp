#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wsc/cli.hpp"
#include "wsc/errors.hpp"
#include "wsc/landscape.hpp"
#include "wsc/twolevel.hpp"

namespace wsc {

namespace {

namespace fs = std::filesystem;
using ordered = nlohmann::ordered_json;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void append_rows(const std::string& path, const std::vector<RunRecord>& rows) {
  const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
  if (!fresh) {
    // Refuse to append to something that is not a run log.
    std::ifstream in(path);
    std::string first;
    std::getline(in, first);
    if (first != kRunLogHeader) throw ValidationError(path + ": not a run log (unexpected header)");
  }
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError(path + ": cannot open for appending");
  if (fresh) out << kRunLogHeader << "\n";
  for (const auto& r : rows) out << format_run_record(r) << "\n";
  if (!out) throw IoError(path + ": write failed");
}

std::string instance_id_of(const std::string& path) { return fs::path(path).stem().string(); }

// --- generate --------------------------------------------------------------

struct GenerateArgs {
  int pairs = 0;
  std::string grid;
  int count = 1;
  std::uint64_t seed = 0;
  std::string out;
  int consensus_runs = 0;
  int consensus_sweeps = 2000;
};

int cmd_generate(const GenerateArgs& a) {
  const bool use_grid = !a.grid.empty();
  if (use_grid == (a.pairs != 0)) throw UsageError("generate: give exactly one of --pairs or --grid");
  if (!use_grid && a.pairs < 1) throw UsageError("generate: --pairs must be >= 1");
  if (a.count < 1) throw UsageError("generate: --count must be >= 1");
  int rows = 0, cols = 0;
  if (use_grid) {
    char x = 0;
    std::istringstream in(a.grid);
    if (!(in >> rows >> x >> cols) || x != 'x' || !in.eof() || rows < 1 || cols < 1)
      throw UsageError("generate: --grid expects ROWSxCOLS, e.g. 4x4");
  }
  ordered manifest;
  manifest["tool_version"] = std::string(kToolVersion);
  manifest["params"] = {{"pairs", a.pairs}, {"grid", a.grid},  {"count", a.count}, {"seed", a.seed},
                        {"consensus_runs", a.consensus_runs}, {"consensus_sweeps", a.consensus_sweeps}};
  auto files = ordered::array();
  for (int k = 0; k < a.count; ++k) {
    ProblemInstance inst;
    std::string id;
    if (use_grid) {
      inst = generate_network(tiled_grid_layout(rows, cols),
                              mix_seed(mix_seed(a.seed, 0x9000 + static_cast<std::uint64_t>(rows) * 1000 + cols),
                                       static_cast<std::uint64_t>(k)));
      char buf[64];
      std::snprintf(buf, sizeof buf, "g%dx%d_i%03d", rows, cols, k);
      id = buf;
    } else {
      inst = generate_indexed_instance(a.pairs, a.seed, k);
      id = generated_instance_id(a.pairs, k);
    }
    if (a.consensus_runs > 0) {
      PtParams pt;
      pt.sweeps = a.consensus_sweeps;
      consensus_reference(inst, pt, a.consensus_runs, mix_seed(a.seed, fnv1a64(id)));
    }
    const std::string text = serialize_instance(inst);
    const std::string file = id + ".json";
    write_text_file((fs::path(a.out) / file).string(), text);
    files.push_back({{"file", file}, {"instance_id", id}, {"n", inst.n()}, {"fnv1a64", hex64(fnv1a64(text))}});
  }
  manifest["files"] = files;
  write_text_file((fs::path(a.out) / "manifest.json").string(), manifest.dump(2) + "\n");
  std::cout << "wrote " << a.count << " instance(s) to " << a.out << "\n";
  return kExitOk;
}

// --- solve -----------------------------------------------------------------

struct SolveArgs {
  std::string solver;
  std::string instance;
  std::uint64_t seed = 0;
  std::string params;
  std::uint64_t budget = 0;
  std::string log;
};

int cmd_solve(const SolveArgs& a) {
  const SolverId id = parse_solver_id(a.solver);
  const ProblemInstance inst = load_instance(a.instance);
  SolverParams p = default_params(id, inst.n());
  if (!a.params.empty()) p = params_from_json(read_text_file(a.params), p);
  if (p.solver != id) throw UsageError("solve: --params names solver '" + std::string(to_string(p.solver)) +
                                       "' but --solver is '" + a.solver + "'");
  p.seed = a.seed;
  if (a.budget > 0) p.work_budget = a.budget;
  if ((id == SolverId::hcm || id == SolverId::ss) && !inst.layout())
    throw ValidationError("HCM/SS require cell structure (instance has no layout)");
  const SolveOutcome o = run_solver(inst, p);
  const RunRecord r{std::string(to_string(id)), inst.n(), instance_id_of(a.instance), a.seed, o.success,
                    std::max<std::uint64_t>(o.work, 1), o.wall_time.count(), planned_work(p, inst)};
  if (a.log.empty()) {
    std::cout << kRunLogHeader << "\n" << format_run_record(r) << "\n";
  } else {
    append_rows(a.log, {r});
  }
  std::cerr << "best_energy_scaled=" << o.best_energy;
  if (inst.reference_energy()) std::cerr << " reference=" << *inst.reference_energy();
  std::cerr << " success=" << (o.success ? "true" : "false") << " work=" << o.work << "\n";
  if (o.below_reference) std::cerr << "warning: energy below the instance reference\n";
  return kExitOk;
}

// --- bench -----------------------------------------------------------------

int cmd_bench(const std::string& plan_path, int jobs, const std::string& out) {
  const std::string text = read_text_file(plan_path);
  BenchPlan plan = parse_bench_plan(text, fs::path(plan_path).parent_path().string());
  if (!out.empty()) plan.output_dir = out;
  const BenchSummary s = run_bench(plan, jobs, std::cerr);
  std::cout << "runs planned " << s.runs_planned << ", executed " << s.runs_executed << ", skipped "
            << s.runs_skipped << "\n";
  for (const auto& w : s.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "outputs in " << plan.output_dir << "\n";
  return kExitOk;
}

// --- tts -------------------------------------------------------------------

int cmd_tts(const std::string& log, double percentile, std::uint64_t seed, const std::string& out,
            const std::string& instances_out) {
  const auto records = parse_run_log(read_text_file(log));
  if (records.empty()) throw ValidationError(log + ": no runs");
  const auto per_instance = instance_tts(records);
  std::vector<std::string> warnings;
  const auto table = tts_table(per_instance, percentile, seed, &warnings);
  if (out.empty()) std::cout << tts_table_csv(table);
  else write_text_file(out, tts_table_csv(table));
  if (!instances_out.empty()) write_text_file(instances_out, instance_tts_csv(per_instance));
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  std::cerr << "percentile " << percentile << " (nearest rank) over instances; unsolved ranked last\n";
  return kExitOk;
}

// --- fit -------------------------------------------------------------------

// Reads either a tts table (solver,n,...,tts,...) or a plain n,tts file.
std::map<std::string, std::vector<FitPoint>> read_fit_points(const std::string& path,
                                                              std::vector<std::string>& warnings) {
  std::istringstream in(read_text_file(path));
  std::string line;
  std::vector<std::string> cols;
  std::map<std::string, std::vector<FitPoint>> out;
  std::size_t line_no = 0;
  auto split = [](const std::string& s) {
    std::vector<std::string> f;
    std::stringstream ss(s);
    std::string x;
    while (std::getline(ss, x, ',')) f.push_back(x);
    if (!s.empty() && s.back() == ',') f.emplace_back();
    return f;
  };
  int c_n = -1, c_t = -1, c_s = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (cols.empty()) {
      cols = f;
      for (int i = 0; i < static_cast<int>(f.size()); ++i) {
        if (f[i] == "n") c_n = i;
        if (f[i] == "tts") c_t = i;
        if (f[i] == "solver") c_s = i;
      }
      if (c_n < 0 || c_t < 0) throw ValidationError(path + ": header needs 'n' and 'tts' columns");
      continue;
    }
    if (f.size() != cols.size())
      throw ValidationError(path + " line " + std::to_string(line_no) + ": expected " +
                            std::to_string(cols.size()) + " fields");
    double n = 0, t = 0;
    try {
      n = std::stod(f[c_n]);
      t = std::stod(f[c_t]);
    } catch (const std::exception&) {
      throw ValidationError(path + " line " + std::to_string(line_no) + ": n and tts must be numbers");
    }
    const std::string label = c_s >= 0 ? f[c_s] : "data";
    if (!std::isfinite(t) || !(t > 0)) {
      warnings.push_back(label + " n=" + f[c_n] + ": tts is not finite and positive; point skipped");
      continue;
    }
    out[label].push_back({n, std::log10(t)});
  }
  if (cols.empty()) throw ValidationError(path + ": empty file");
  return out;
}

int cmd_fit(const std::string& input, const std::string& model_name, int last_k, const std::string& solver,
            const std::string& out, const std::string& curve) {
  const FitModel model = parse_fit_model(model_name);
  std::vector<std::string> warnings;
  auto groups = read_fit_points(input, warnings);
  if (!solver.empty()) {
    auto it = groups.find(solver);
    if (it == groups.end()) throw ValidationError(input + ": no rows for solver '" + solver + "'");
    groups = {{it->first, it->second}};
  }
  if (!curve.empty() && groups.size() != 1)
    throw UsageError("fit: --curve needs a single series (use --solver)");
  ordered doc;
  doc["tool_version"] = std::string(kToolVersion);
  doc["params"] = {{"input", input}, {"model", std::string(to_string(model))}, {"last_k", last_k},
                   {"solver", solver}};
  ordered fits = ordered::object();
  std::vector<std::pair<std::string, FitResult>> all;
  for (const auto& [label, pts] : groups) {
    FitResult f = fit(model, pts, last_k);
    fits[label] = ordered::parse(fit_report_json(f));
    if (!curve.empty()) write_text_file(curve, fit_curve_csv(f));
    all.emplace_back(label, std::move(f));
  }
  doc["fits"] = fits;
  auto ranking = ordered::array();
  for (const auto& r : compare_solvers(all))
    ranking.push_back({{"label", r.label}, {"b", r.b}, {"ci_low", r.ci_low}, {"ci_high", r.ci_high},
                       {"indistinguishable_from", r.indistinguishable_from}});
  doc["ranking"] = ranking;
  doc["warnings"] = warnings;
  if (out.empty()) std::cout << doc.dump(2) << "\n";
  else write_text_file(out, doc.dump(2) + "\n");
  return kExitOk;
}

// --- landscape -------------------------------------------------------------

struct LandscapeArgs {
  std::vector<std::string> instances;
  int sweeps = 0;  // 0: 625 per site, i.e. 10^4 per weak-strong pair
  double t_min = kLandscapeTMin;
  double t_max = kLandscapeTMax;
  int temperatures = kLandscapeTemperatures;
  std::uint64_t seed = 0;
  std::string out;
  PeakParams peaks;
};

int cmd_landscape(const LandscapeArgs& a) {
  const TemperatureLadder ladder = geometric_temperature_ladder(a.t_min, a.t_max, a.temperatures);
  std::map<std::size_t, std::vector<PeakVerdict>> by_n;
  ordered summary;
  summary["tool_version"] = std::string(kToolVersion);
  summary["params"] = {{"sweeps", a.sweeps}, {"t_min", a.t_min}, {"t_max", a.t_max},
                       {"temperatures", a.temperatures}, {"seed", a.seed}, {"burn_in_fraction", 0.5},
                       {"sigma", a.peaks.sigma}, {"min_height", a.peaks.min_height},
                       {"min_separation", a.peaks.min_separation}, {"max_valley", a.peaks.max_valley}};
  auto rows = ordered::array();
  for (const auto& path : a.instances) {
    const ProblemInstance inst = load_instance(path);
    const std::string id = instance_id_of(path);
    Rng rng(a.seed, {fnv1a64(id)});
    const int sweeps = a.sweeps > 0 ? a.sweeps : std::max(1000, static_cast<int>(625 * inst.n()));
    const OverlapHistogram h = sample_overlap_distribution(inst, ladder, sweeps, rng);
    const PeakVerdict v = classify_peaks(h, a.peaks);
    write_text_file((fs::path(a.out) / (id + "_hist.csv")).string(), histogram_csv(h));
    write_text_file((fs::path(a.out) / (id + "_verdict.json")).string(), verdict_json(v) + "\n");
    by_n[inst.n()].push_back(v);
    rows.push_back({{"instance_id", id}, {"n", inst.n()}, {"classification", std::string(to_string(v.classification))},
                    {"peaks", v.peaks.size()}, {"sweeps", sweeps}, {"normalization", h.normalization()}});
  }
  summary["instances"] = rows;
  bool enough = true;
  for (const auto& [n, v] : by_n) enough = enough && v.size() >= kMinLandscapeInstances;
  if (enough) {
    auto fr = ordered::array();
    for (const auto& f : peak_fraction(by_n))
      fr.push_back({{"n", f.n}, {"instances", f.instances}, {"multi_peak", f.multi_peak},
                    {"fraction", f.fraction}, {"ci_low", f.ci.low}, {"ci_high", f.ci.high}});
    summary["peak_fraction"] = fr;
  } else {
    summary["peak_fraction"] = nullptr;
    summary["note"] = "peak fraction needs at least " + std::to_string(kMinLandscapeInstances) +
                      " instances per size";
  }
  write_text_file((fs::path(a.out) / "landscape.json").string(), summary.dump(2) + "\n");
  std::cout << "classified " << a.instances.size() << " instance(s) into " << a.out << "\n";
  return kExitOk;
}

// --- twolevel --------------------------------------------------------------

int cmd_twolevel(int n_min, int n_max, double t_ann, double dt, std::vector<double> noise,
                 const std::string& out) {
  TwoLevelParams base;
  base.t_ann = t_ann;
  base.dt = dt;
  base.validate();
  std::vector<double> qs{0.0};
  for (double q : noise)
    if (q != 0.0) qs.push_back(q);
  const auto rows = double_scaling_curve(n_min, n_max, base, qs);
  const std::string csv = double_scaling_csv(rows);
  if (out.empty()) std::cout << csv;
  else write_text_file(out, csv);
  return kExitOk;
}

// --- import ----------------------------------------------------------------

int cmd_import(const std::string& csv, const std::string& label, const std::string& units,
               const std::string& provenance, const std::string& store, bool list) {
  if (list) {
    if (!fs::exists(store)) return kExitOk;
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(store))
      if (e.path().extension() == ".json") names.push_back(e.path().string());
    std::sort(names.begin(), names.end());
    for (const auto& path : names) {
      const auto j = nlohmann::json::parse(read_text_file(path));
      std::cout << j.at("label").get<std::string>() << "\t" << j.at("units").get<std::string>() << "\t"
                << j.at("points").size() << " points\n";
    }
    return kExitOk;
  }
  if (csv.empty() || label.empty()) throw UsageError("import: --csv and --label are required");
  for (char c : label)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.'))
      throw UsageError("import: --label may contain only letters, digits, '-', '_' and '.'");
  const ExternalCurve curve = parse_external_curve(read_text_file(csv), label, units, provenance);
  write_text_file((fs::path(store) / (label + ".json")).string(), external_curve_json(curve));
  std::cout << "stored " << curve.points.size() << " points as '" << label << "' (" << units << ")\n";
  return kExitOk;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Weak-strong cluster benchmark tools"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate weak-strong cluster instances");
  g->add_option("--pairs", gen.pairs, "Number of weak-strong pairs");
  g->add_option("--grid", gen.grid, "All pairs fitting a ROWSxCOLS cell window");
  g->add_option("--count", gen.count, "Instances to generate")->capture_default_str();
  g->add_option("--seed", gen.seed, "Generator seed")->required();
  g->add_option("--out", gen.out, "Output directory")->required();
  g->add_option("--consensus-runs", gen.consensus_runs, "PT+ICM runs for a consensus reference (0 = none)");
  g->add_option("--consensus-sweeps", gen.consensus_sweeps, "Sweeps per consensus run")->capture_default_str();

  SolveArgs sol;
  auto* s = app.add_subcommand("solve", "Run one solver once and record the run");
  s->add_option("--solver", sol.solver, "sa, pa, pt-icm, rmc-icm, hcm or ss")->required();
  s->add_option("--instance", sol.instance, "Instance file")->required();
  s->add_option("--seed", sol.seed, "Run seed")->required();
  s->add_option("--params", sol.params, "Solver parameter JSON");
  s->add_option("--budget", sol.budget, "Work budget in site updates (0 = none)");
  s->add_option("--log", sol.log, "Run-log CSV to append to (default: stdout)");

  std::string plan_path, bench_out;
  int jobs = 1;
  auto* b = app.add_subcommand("bench", "Run a benchmark plan end to end");
  b->add_option("plan", plan_path, "Plan JSON")->required();
  b->add_option("--jobs", jobs, "Concurrent runs")->capture_default_str();
  b->add_option("--out", bench_out, "Override the plan's output directory");

  std::string tts_log, tts_out, tts_inst;
  double tts_pct = 50;
  std::uint64_t tts_seed = 1;
  auto* t = app.add_subcommand("tts", "Time-to-solution table from a run log");
  t->add_option("--log", tts_log, "Run-log CSV")->required();
  t->add_option("--percentile", tts_pct, "Percentile over instances")->capture_default_str();
  t->add_option("--seed", tts_seed, "Bootstrap seed")->capture_default_str();
  t->add_option("--out", tts_out, "Output CSV (default: stdout)");
  t->add_option("--instances-out", tts_inst, "Per-instance tts CSV");

  std::string fit_in, fit_model = "linear", fit_solver, fit_out, fit_curve;
  int last_k = 3;
  auto* f = app.add_subcommand("fit", "Fit log10 tts against sqrt(n)");
  f->add_option("--tts", fit_in, "tts table or n,tts CSV")->required();
  f->add_option("--model", fit_model, "linear or log_corrected")->capture_default_str();
  f->add_option("--last-k", last_k, "Fit only the largest k sizes (0 = all)")->capture_default_str();
  f->add_option("--solver", fit_solver, "Only this solver's rows");
  f->add_option("--out", fit_out, "Report JSON (default: stdout)");
  f->add_option("--curve", fit_curve, "Fitted curve samples CSV");

  LandscapeArgs land;
  auto* l = app.add_subcommand("landscape", "Overlap distributions and peak classification");
  l->add_option("--instance", land.instances, "Instance files")->required();
  l->add_option("--sweeps", land.sweeps, "PT sweeps per chain (0: 625 per site)")->capture_default_str();
  l->add_option("--t-min", land.t_min)->capture_default_str();
  l->add_option("--t-max", land.t_max)->capture_default_str();
  l->add_option("--temperatures", land.temperatures)->capture_default_str();
  l->add_option("--seed", land.seed, "Sampling seed")->required();
  l->add_option("--out", land.out, "Output directory")->required();
  l->add_option("--sigma", land.peaks.sigma)->capture_default_str();
  l->add_option("--min-height", land.peaks.min_height)->capture_default_str();
  l->add_option("--min-separation", land.peaks.min_separation)->capture_default_str();
  l->add_option("--max-valley", land.peaks.max_valley)->capture_default_str();

  int n_min = 1, n_max = 16;
  double t_ann = 500, dt = 0.01;
  std::vector<double> noise{0.1};
  std::string tl_out;
  auto* w = app.add_subcommand("twolevel", "Noisy two-level annealing double-scaling table");
  w->add_option("--n-min", n_min)->capture_default_str();
  w->add_option("--n-max", n_max)->capture_default_str();
  w->add_option("--t-ann", t_ann)->capture_default_str();
  w->add_option("--dt", dt)->capture_default_str();
  w->add_option("--noise", noise, "Noise levels q (q = 0 is always included)")->capture_default_str();
  w->add_option("--out", tl_out, "Output CSV (default: stdout)");

  std::string imp_csv, imp_label, imp_units = "us", imp_prov, imp_store = "external";
  bool imp_list = false;
  auto* im = app.add_subcommand("import", "Store an external tts curve (kept out of native fits)");
  im->add_option("--csv", imp_csv, "CSV with header n,tts");
  im->add_option("--label", imp_label, "Curve label");
  im->add_option("--units", imp_units, "Units of the tts column")->capture_default_str();
  im->add_option("--provenance", imp_prov, "Where the data came from");
  im->add_option("--store", imp_store, "Store directory")->capture_default_str();
  im->add_flag("--list", imp_list, "List stored curves");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*g) return cmd_generate(gen);
    if (*s) return cmd_solve(sol);
    if (*b) return cmd_bench(plan_path, jobs, bench_out);
    if (*t) return cmd_tts(tts_log, tts_pct, tts_seed, tts_out, tts_inst);
    if (*f) return cmd_fit(fit_in, fit_model, last_k, fit_solver, fit_out, fit_curve);
    if (*l) return cmd_landscape(land);
    if (*w) return cmd_twolevel(n_min, n_max, t_ann, dt, noise, tl_out);
    if (*im) return cmd_import(imp_csv, imp_label, imp_units, imp_prov, imp_store, imp_list);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}

}  // namespace wsc
