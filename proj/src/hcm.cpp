#include <cmath>
#include <map>
#include <string>

#include "solver_util.hpp"
#include "wsc/errors.hpp"

namespace wsc {

using detail::BestTracker;
using detail::Clock;

namespace {
thread_local detail::ClusterScratch tls_scratch;
}  // namespace

std::vector<std::vector<SiteId>> cell_domains(const ProblemInstance& inst, std::string_view who) {
  if (!inst.layout())
    throw ValidationError(std::string(who) + " requires cell structure (instance has no layout)");
  // Generated numbering: cell c (strong cell of pair c/2 for even c, weak for
  // odd c) owns sites [8c, 8c + 8).
  const std::size_t cells = inst.n() / 8;
  std::vector<std::vector<SiteId>> d(cells);
  for (std::size_t c = 0; c < cells; ++c)
    for (SiteId k = 0; k < 8; ++k) d[c].push_back(static_cast<SiteId>(8 * c + k));
  return d;
}

ClusterMove hcm_cluster_move(const ProblemInstance& inst, SpinState& state,
                             const std::vector<SiteId>& domain, const std::vector<int>& domain_of,
                             int domain_index, double beta, Rng& rng) {
  auto& c = tls_scratch;
  c.reset(inst.n());
  std::vector<Spin>& s = state.spins;
  c.mark(domain[rng.below(domain.size())]);
  // Wolff growth over satisfied bonds inside the domain.
  for (std::size_t head = 0; head < c.members.size(); ++head) {
    const SiteId i = c.members[head];
    for (const Neighbor& nb : inst.neighbors(i)) {
      if (domain_of[nb.site] != domain_index || c.marked(nb.site)) continue;
      if (std::int64_t{nb.coupling} * s[i] * s[nb.site] <= 0) continue;
      const double p_add = -std::expm1(-2.0 * beta * std::abs(nb.coupling) / inst.scale());
      if (rng.uniform() < p_add) c.mark(nb.site);
    }
  }
  // Metropolis on the terms the Wolff rule does not account for: fields of the
  // cluster and couplings leaving the domain.
  Energy outside = 0;
  Energy total = 0;
  for (SiteId i : c.members) {
    std::int64_t local_out = inst.field(i);
    std::int64_t local_all = inst.field(i);
    for (const Neighbor& nb : inst.neighbors(i)) {
      if (c.marked(nb.site)) continue;
      const std::int64_t term = std::int64_t{nb.coupling} * s[nb.site];
      local_all += term;
      if (domain_of[nb.site] != domain_index) local_out += term;
    }
    outside += 2 * s[i] * local_out;
    total += 2 * s[i] * local_all;
  }
  const double u = rng.uniform();
  ClusterMove m{c.members.size(), false};
  if (outside <= 0 || u < std::exp(-beta * static_cast<double>(outside) / inst.scale())) {
    for (SiteId i : c.members) s[i] = static_cast<Spin>(-s[i]);
    state.energy += total;
    m.accepted = true;
  }
  return m;
}

SolveOutcome hcm_anneal(const ProblemInstance& inst, const HcmParams& p, Rng& rng,
                        std::uint64_t work_budget) {
  const auto domains = cell_domains(inst, "HCM");
  const Schedule schedule = linear_beta_schedule(p.beta_ini, p.beta_end, p.steps);
  const auto start = Clock::now();
  std::vector<int> domain_of(inst.n());
  for (std::size_t d = 0; d < domains.size(); ++d)
    for (SiteId i : domains[d]) domain_of[i] = static_cast<int>(d);

  SpinState state = SpinState::random(inst, rng);
  BestTracker best;
  best.offer(state);
  std::uint64_t work = 0;
  for (double beta : schedule.betas) {
    if (detail::over_budget(work, work_budget)) break;
    // One full update: n cluster proposals in uniformly chosen domains.
    for (std::size_t k = 0; k < inst.n(); ++k) {
      const auto d = static_cast<int>(rng.below(domains.size()));
      work += hcm_cluster_move(inst, state, domains[d], domain_of, d, beta, rng).cluster_size;
    }
    best.offer(state);
  }
  return detail::finish(inst, best, work, start);
}

ReducedProblem superspin_reduce(const ProblemInstance& inst) {
  ReducedProblem r;
  r.cells = cell_domains(inst, "SS");
  r.physical_n = inst.n();
  std::vector<std::size_t> cell_of(inst.n());
  for (std::size_t d = 0; d < r.cells.size(); ++d)
    for (SiteId i : r.cells[d]) cell_of[i] = d;

  std::map<std::pair<SiteId, SiteId>, std::int64_t> joint;
  for (const Coupling& c : inst.couplings()) {
    const auto a = static_cast<SiteId>(cell_of[c.i]);
    const auto b = static_cast<SiteId>(cell_of[c.j]);
    if (a == b)
      r.offset -= c.value;  // aligned inside a cell
    else
      joint[std::minmax(a, b)] += c.value;
  }
  std::vector<std::int64_t> field(r.cells.size(), 0);
  for (const FieldTerm& f : inst.fields()) field[cell_of[f.site]] += f.value;

  std::vector<Coupling> couplings;
  for (const auto& [key, value] : joint)
    if (value != 0) couplings.push_back({key.first, key.second, static_cast<std::int32_t>(value)});
  std::vector<FieldTerm> fields;
  for (std::size_t d = 0; d < field.size(); ++d)
    if (field[d] != 0) fields.push_back({static_cast<SiteId>(d), static_cast<std::int32_t>(field[d])});
  r.logical = ProblemInstance::create(r.cells.size(), std::move(couplings), std::move(fields),
                                      inst.scale());
  return r;
}

std::vector<Spin> superspin_lift(const ReducedProblem& r, std::span<const Spin> logical) {
  if (logical.size() != r.cells.size())
    throw ValidationError("superspin_lift: expected " + std::to_string(r.cells.size()) +
                          " logical spins, got " + std::to_string(logical.size()));
  std::vector<Spin> full(r.physical_n, Spin{-1});
  for (std::size_t d = 0; d < r.cells.size(); ++d)
    for (SiteId i : r.cells[d]) full[i] = logical[d];
  return full;
}

Energy reduced_energy(const ReducedProblem& r, std::span<const Spin> logical) {
  return energy(r.logical, logical) + r.offset;
}

SolveOutcome ss_solve(const ProblemInstance& inst, const SsParams& p, Rng& rng,
                      std::uint64_t work_budget) {
  if (!(p.temperature_factor > 0)) throw ValidationError("ss: temperature_factor must be positive");
  const auto start = Clock::now();
  const ReducedProblem r = superspin_reduce(inst);
  SolveOutcome inner = detail::pt_icm_scaled(r.logical, p.pt, p.temperature_factor, rng, work_budget);
  SolveOutcome out;
  out.best_state = superspin_lift(r, inner.best_state);
  out.best_energy = inner.best_energy + r.offset;
  out.work = inner.work;
  out.gs_criteria_met = inner.gs_criteria_met;
  if (auto ref = inst.reference_energy()) {
    out.success = out.best_energy == *ref;
    out.below_reference = out.best_energy < *ref;
  }
  out.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
  return out;
}

}  // namespace wsc
