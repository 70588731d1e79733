#include <algorithm>
#include <array>
#include <cstdlib>
#include <string>

#include "json.hpp"
#include "wsc/errors.hpp"
#include "wsc/solvers.hpp"

namespace wsc {

namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

constexpr std::array<std::pair<SolverId, std::string_view>, 6> kNames{{
    {SolverId::sa, "sa"},
    {SolverId::pa, "pa"},
    {SolverId::pt_icm, "pt-icm"},
    {SolverId::rmc_icm, "rmc-icm"},
    {SolverId::hcm, "hcm"},
    {SolverId::ss, "ss"},
}};

// Published per-size parameters.
struct PaRow {
  std::size_t n;
  int population;
  int temperatures;
};
constexpr std::array<PaRow, 5> kPaTable{{
    {180, 100, 100}, {296, 300, 100}, {489, 10000, 200}, {681, 100000, 300}, {945, 3000000, 300}}};
struct HcmRow {
  std::size_t n;
  int steps;
};
constexpr std::array<HcmRow, 5> kHcmTable{{{192, 5}, {300, 6}, {520, 8}, {720, 11}, {992, 14}}};

template <class Table>
const auto& nearest(const Table& table, std::size_t n) {
  const auto* best = &table[0];
  for (const auto& row : table) {
    const auto d = [n](std::size_t m) { return n > m ? n - m : m - n; };
    if (d(row.n) < d(best->n)) best = &row;
  }
  return *best;
}

ordered pt_json(const PtParams& p) {
  return ordered{{"t_min", p.t_min},
                 {"t_max", p.t_max},
                 {"temperatures", p.temperatures},
                 {"cluster_temperatures", p.cluster_temperatures},
                 {"sweeps", p.sweeps},
                 {"replicas", p.replicas}};
}

// Assigns j[key] to out when present; rejects unknown keys so typos surface.
class Reader {
 public:
  Reader(const json& j, std::string ctx) : j_(j), ctx_(std::move(ctx)) {
    if (!j.is_object()) throw ValidationError(ctx_ + ": expected an object");
  }
  template <class T>
  Reader& get(const char* key, T& out) {
    seen_.push_back(key);
    auto it = j_.find(key);
    if (it == j_.end()) return *this;
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      throw ValidationError(ctx_ + "." + key + ": wrong type");
    }
    return *this;
  }
  const json* child(const char* key) {
    seen_.push_back(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  void done() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end())
        throw ValidationError(ctx_ + ": unknown key '" + it.key() + "'");
  }

 private:
  const json& j_;
  std::string ctx_;
  std::vector<std::string> seen_;
};

void read_pt(const json& j, PtParams& p, const std::string& ctx) {
  Reader r(j, ctx);
  r.get("t_min", p.t_min)
      .get("t_max", p.t_max)
      .get("temperatures", p.temperatures)
      .get("cluster_temperatures", p.cluster_temperatures)
      .get("sweeps", p.sweeps)
      .get("replicas", p.replicas);
  r.done();
}

void check_pt(const PtParams& p, const char* who) {
  const std::string w(who);
  if (!(p.t_min > 0) || !(p.t_max > p.t_min)) throw ValidationError(w + ": need 0 < t_min < t_max");
  if (p.temperatures < 2) throw ValidationError(w + ": temperatures must be >= 2");
  if (p.cluster_temperatures < 0 || p.cluster_temperatures > p.temperatures)
    throw ValidationError(w + ": cluster_temperatures must lie in [0, temperatures]");
  if (p.sweeps < 1) throw ValidationError(w + ": sweeps must be >= 1");
  if (p.replicas < 1) throw ValidationError(w + ": replicas must be >= 1");
}

}  // namespace

std::string_view to_string(SolverId id) {
  for (const auto& [k, name] : kNames)
    if (k == id) return name;
  return "?";
}

SolverId parse_solver_id(std::string_view s) {
  for (const auto& [k, name] : kNames)
    if (name == s) return k;
  throw UsageError("unknown solver '" + std::string(s) +
                   "' (expected one of sa, pa, pt-icm, rmc-icm, hcm, ss)");
}

const std::vector<SolverId>& all_solvers() {
  static const std::vector<SolverId> ids{SolverId::sa,      SolverId::pa,  SolverId::pt_icm,
                                         SolverId::rmc_icm, SolverId::hcm, SolverId::ss};
  return ids;
}

SolverParams default_params(SolverId id, std::size_t n) {
  SolverParams p;
  p.solver = id;
  const auto& pa = nearest(kPaTable, n);
  p.pa.population = pa.population;
  p.pa.temperatures = pa.temperatures;
  p.hcm.steps = nearest(kHcmTable, n).steps;
  return p;
}

std::string params_to_json(const SolverParams& p) {
  ordered j;
  j["solver"] = std::string(to_string(p.solver));
  j["seed"] = p.seed;
  j["work_budget"] = p.work_budget;
  j["sa"] = ordered{{"beta_ini", p.sa.beta_ini},
                    {"beta_end", p.sa.beta_end},
                    {"steps", p.sa.steps},
                    {"sweeps_per_beta", p.sa.sweeps_per_beta}};
  j["pa"] = ordered{{"population", p.pa.population},
                    {"temperatures", p.pa.temperatures},
                    {"sweeps", p.pa.sweeps},
                    {"beta_max", p.pa.beta_max}};
  j["pt"] = pt_json(p.pt);
  j["hcm"] = ordered{{"beta_ini", p.hcm.beta_ini}, {"beta_end", p.hcm.beta_end}, {"steps", p.hcm.steps}};
  j["ss"] = ordered{{"pt", pt_json(p.ss.pt)}, {"temperature_factor", p.ss.temperature_factor}};
  return j.dump(2);
}

SolverParams params_from_json(std::string_view text, SolverParams base) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("params: malformed JSON: ") + e.what());
  }
  Reader top(j, "params");
  std::string solver(to_string(base.solver));
  top.get("solver", solver).get("seed", base.seed).get("work_budget", base.work_budget);
  try {
    base.solver = parse_solver_id(solver);
  } catch (const UsageError& e) {
    throw ValidationError(std::string("params.solver: ") + e.what());
  }
  if (const json* s = top.child("sa")) {
    Reader r(*s, "params.sa");
    r.get("beta_ini", base.sa.beta_ini)
        .get("beta_end", base.sa.beta_end)
        .get("steps", base.sa.steps)
        .get("sweeps_per_beta", base.sa.sweeps_per_beta);
    r.done();
  }
  if (const json* s = top.child("pa")) {
    Reader r(*s, "params.pa");
    r.get("population", base.pa.population)
        .get("temperatures", base.pa.temperatures)
        .get("sweeps", base.pa.sweeps)
        .get("beta_max", base.pa.beta_max);
    r.done();
  }
  if (const json* s = top.child("pt")) read_pt(*s, base.pt, "params.pt");
  if (const json* s = top.child("hcm")) {
    Reader r(*s, "params.hcm");
    r.get("beta_ini", base.hcm.beta_ini).get("beta_end", base.hcm.beta_end).get("steps", base.hcm.steps);
    r.done();
  }
  if (const json* s = top.child("ss")) {
    Reader r(*s, "params.ss");
    if (const json* pt = r.child("pt")) read_pt(*pt, base.ss.pt, "params.ss.pt");
    r.get("temperature_factor", base.ss.temperature_factor);
    r.done();
  }
  top.done();
  validate(base);
  return base;
}

void validate(const SolverParams& p) {
  switch (p.solver) {
    case SolverId::sa:
      if (p.sa.steps < 2) throw ValidationError("sa: steps must be >= 2");
      if (p.sa.beta_ini < 0 || !(p.sa.beta_end > p.sa.beta_ini))
        throw ValidationError("sa: need 0 <= beta_ini < beta_end");
      if (p.sa.sweeps_per_beta < 0) throw ValidationError("sa: sweeps_per_beta must be >= 0");
      break;
    case SolverId::pa:
      if (p.pa.population < 1) throw ValidationError("pa: population must be >= 1");
      if (p.pa.temperatures < 2) throw ValidationError("pa: temperatures must be >= 2");
      if (p.pa.sweeps < 0) throw ValidationError("pa: sweeps must be >= 0");
      if (!(p.pa.beta_max > 0)) throw ValidationError("pa: beta_max must be positive");
      break;
    case SolverId::pt_icm:
    case SolverId::rmc_icm:
      check_pt(p.pt, to_string(p.solver).data());
      break;
    case SolverId::hcm:
      if (p.hcm.steps < 2) throw ValidationError("hcm: steps must be >= 2");
      if (p.hcm.beta_ini < 0 || !(p.hcm.beta_end > p.hcm.beta_ini))
        throw ValidationError("hcm: need 0 <= beta_ini < beta_end");
      break;
    case SolverId::ss:
      check_pt(p.ss.pt, "ss");
      if (!(p.ss.temperature_factor > 0)) throw ValidationError("ss: temperature_factor must be positive");
      break;
  }
}

std::uint64_t planned_work(const SolverParams& p, const ProblemInstance& inst) {
  const std::uint64_t n = inst.n();
  switch (p.solver) {
    case SolverId::sa:
      return n * p.sa.steps * p.sa.sweeps_per_beta;
    case SolverId::pa:
      return n * p.pa.population * p.pa.temperatures * p.pa.sweeps;
    case SolverId::pt_icm:
      return n * p.pt.sweeps * p.pt.temperatures * p.pt.replicas;
    case SolverId::rmc_icm:
      return n * p.pt.sweeps * p.pt.temperatures * 2;
    case SolverId::hcm:
      return n * p.hcm.steps;
    case SolverId::ss:
      return (n / 8) * p.ss.pt.sweeps * p.ss.pt.temperatures * p.ss.pt.replicas;
  }
  return 0;
}

SolveOutcome run_solver(const ProblemInstance& inst, const SolverParams& p) {
  validate(p);
  Rng rng(p.seed, {static_cast<std::uint64_t>(p.solver)});
  switch (p.solver) {
    case SolverId::sa:
      return simulated_annealing(inst, linear_beta_schedule(p.sa.beta_ini, p.sa.beta_end, p.sa.steps),
                                 p.sa.sweeps_per_beta, rng, p.work_budget);
    case SolverId::pa:
      return population_annealing(inst, p.pa, rng, p.work_budget);
    case SolverId::pt_icm:
      return pt_icm(inst, p.pt, rng, p.work_budget);
    case SolverId::rmc_icm:
      return replica_mc_icm(inst, p.pt, rng, p.work_budget);
    case SolverId::hcm:
      return hcm_anneal(inst, p.hcm, rng, p.work_budget);
    case SolverId::ss:
      return ss_solve(inst, p.ss, rng, p.work_budget);
  }
  throw ValidationError("unknown solver");
}

}  // namespace wsc
