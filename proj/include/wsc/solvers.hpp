#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wsc/instance.hpp"
#include "wsc/mcmc.hpp"
#include "wsc/rng.hpp"

namespace wsc {

enum class SolverId { sa, pa, pt_icm, rmc_icm, hcm, ss };

std::string_view to_string(SolverId id);
SolverId parse_solver_id(std::string_view s);  // throws UsageError
const std::vector<SolverId>& all_solvers();

struct SaParams {
  double beta_ini = 0.1;
  double beta_end = 3.0;
  int steps = 100;  // M
  int sweeps_per_beta = 10;
};

struct PaParams {
  int population = 100;  // R
  int temperatures = 100;  // N_T, evenly spaced in beta over [0, beta_max]
  int sweeps = 10;  // N_S per replica per temperature
  double beta_max = 1.0;
};

struct PtParams {
  double t_min = 0.2279;
  double t_max = 2.5;
  int temperatures = 21;  // N_T
  int cluster_temperatures = 5;  // N_c
  int sweeps = 1000;
  int replicas = 4;  // independent chains at every temperature
};

struct HcmParams {
  double beta_ini = 0.5;
  double beta_end = 3.0;
  int steps = 5;  // M
};

struct SsParams {
  PtParams pt{.sweeps = 100};
  // Ladder temperatures are multiplied by this factor on the reduced problem.
  // 1 keeps the physical ladder, which must stay cold enough to resolve the
  // weak-cluster gap.
  double temperature_factor = 1.0;
};

struct SolverParams {
  SolverId solver = SolverId::sa;
  std::uint64_t seed = 0;
  std::uint64_t work_budget = 0;  // 0 = unlimited; checked between sweeps
  SaParams sa;
  PaParams pa;
  PtParams pt;
  HcmParams hcm;
  SsParams ss;
};

// Per-solver defaults. PA and HCM follow the published parameter tables,
// keyed by the nearest tabulated size.
SolverParams default_params(SolverId id, std::size_t n);

// JSON with one object per solver family; absent keys keep their defaults.
std::string params_to_json(const SolverParams& p);
SolverParams params_from_json(std::string_view text, SolverParams base);
// Throws ValidationError when a parameter violates a solver precondition.
void validate(const SolverParams& p);

struct SolveOutcome {
  Energy best_energy = 0;
  std::vector<Spin> best_state;
  bool success = false;  // best_energy == instance reference energy
  bool below_reference = false;  // best_energy < reference: the reference is wrong
  std::uint64_t work = 0;  // site updates
  std::chrono::nanoseconds wall_time{0};
  std::optional<bool> gs_criteria_met;  // PT+ICM and SS only
  std::optional<std::size_t> final_population;  // PA only
};

// The site-update count a run of these parameters performs without a budget.
// This is T_ann in work units.
std::uint64_t planned_work(const SolverParams& p, const ProblemInstance& inst);

SolveOutcome simulated_annealing(const ProblemInstance& inst, const Schedule& schedule,
                                 int sweeps_per_beta, Rng& rng, std::uint64_t work_budget = 0);

SolveOutcome population_annealing(const ProblemInstance& inst, const PaParams& p, Rng& rng,
                                  std::uint64_t work_budget = 0);

// Population needed for 99% success given success probability p at population r.
double critical_population(double r, double p);

struct ClusterMove {
  std::size_t cluster_size = 0;  // 0 when no move was possible
  bool accepted = false;
};

// Houdayer move: grows the connected cluster of disagreeing sites around a
// random disagreeing site and flips it in both states.
ClusterMove houdayer_icm_move(const ProblemInstance& inst, SpinState& a, SpinState& b, Rng& rng);

// Replica Monte Carlo move between states at inverse temperatures beta_a and
// beta_b. The disagreement cluster is flipped in both states (equivalently,
// exchanged between them); the move is accepted with probability
// min(1, exp(-(beta_a - beta_b) * dE_a / scale)), which is exact detailed
// balance because dE_b = -dE_a for such a cluster.
ClusterMove replica_cluster_move(const ProblemInstance& inst, SpinState& a, double beta_a,
                                 SpinState& b, double beta_b, Rng& rng);

SolveOutcome pt_icm(const ProblemInstance& inst, const PtParams& p, Rng& rng,
                    std::uint64_t work_budget = 0);

SolveOutcome replica_mc_icm(const ProblemInstance& inst, const PtParams& p, Rng& rng,
                            std::uint64_t work_budget = 0);

// Domains used by HCM and SS: the 8 sites of every K4,4 cell of the layout.
// Throws ValidationError "... requires cell structure" without a layout.
std::vector<std::vector<SiteId>> cell_domains(const ProblemInstance& inst, std::string_view who);

// In-domain Wolff cluster grown from a uniform site of `domain`, flipped with
// Metropolis acceptance on the couplings leaving the domain plus the fields
// of the cluster.
ClusterMove hcm_cluster_move(const ProblemInstance& inst, SpinState& state,
                             const std::vector<SiteId>& domain, const std::vector<int>& domain_of,
                             int domain_index, double beta, Rng& rng);

SolveOutcome hcm_anneal(const ProblemInstance& inst, const HcmParams& p, Rng& rng,
                        std::uint64_t work_budget = 0);

// One logical spin per cell. energy(lift(x)) == energy(logical, x) + offset.
struct ReducedProblem {
  ProblemInstance logical;
  Energy offset = 0;
  std::vector<std::vector<SiteId>> cells;  // logical spin -> physical sites
  std::size_t physical_n = 0;
};

ReducedProblem superspin_reduce(const ProblemInstance& inst);
std::vector<Spin> superspin_lift(const ReducedProblem& r, std::span<const Spin> logical);
Energy reduced_energy(const ReducedProblem& r, std::span<const Spin> logical);

SolveOutcome ss_solve(const ProblemInstance& inst, const SsParams& p, Rng& rng,
                      std::uint64_t work_budget = 0);

// Dispatches on p.solver with an Rng derived from p.seed.
SolveOutcome run_solver(const ProblemInstance& inst, const SolverParams& p);

}  // namespace wsc
