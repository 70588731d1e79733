#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "solver_util.hpp"
#include "wsc/errors.hpp"

namespace wsc {

using detail::BestTracker;
using detail::Clock;

SolveOutcome simulated_annealing(const ProblemInstance& inst, const Schedule& schedule,
                                 int sweeps_per_beta, Rng& rng, std::uint64_t work_budget) {
  if (sweeps_per_beta < 0) throw ValidationError("sa: sweeps_per_beta must be >= 0");
  for (std::size_t k = 1; k < schedule.betas.size(); ++k)
    if (!(schedule.betas[k] > schedule.betas[k - 1]))
      throw ValidationError("sa: schedule must be increasing in beta");
  const auto start = Clock::now();
  SpinState state = SpinState::random(inst, rng);
  BestTracker best;
  best.offer(state);
  std::uint64_t work = 0;
  for (double beta : schedule.betas) {
    if (detail::over_budget(work, work_budget)) break;
    const AcceptanceTable table(inst, beta);
    for (int s = 0; s < sweeps_per_beta && !detail::over_budget(work, work_budget); ++s) {
      work += metropolis_sweep(inst, state, table, rng);
      best.offer(state);
    }
  }
  return detail::finish(inst, best, work, start);
}

SolveOutcome population_annealing(const ProblemInstance& inst, const PaParams& p, Rng& rng,
                                  std::uint64_t work_budget) {
  if (p.population < 1 || p.temperatures < 2 || p.sweeps < 0 || !(p.beta_max > 0))
    throw ValidationError("pa: need R >= 1, N_T >= 2, N_S >= 0 and beta_max > 0");
  const auto start = Clock::now();
  const auto r = static_cast<std::size_t>(p.population);
  std::vector<SpinState> pop;
  pop.reserve(r);
  for (std::size_t k = 0; k < r; ++k) pop.push_back(SpinState::random(inst, rng));
  BestTracker best;
  for (const auto& s : pop) best.offer(s);

  std::uint64_t work = 0;
  std::vector<double> weight(r);
  std::vector<SpinState> next;
  double prev_beta = 0.0;
  for (int t = 0; t < p.temperatures && !detail::over_budget(work, work_budget); ++t) {
    const double beta = p.beta_max * t / (p.temperatures - 1);
    if (t > 0) {
      // Systematic resampling with weights exp(-dbeta * E / scale); shifting
      // by the minimum energy keeps the largest weight at 1.
      const double dbeta = beta - prev_beta;
      Energy e_min = pop[0].energy;
      for (const auto& s : pop) e_min = std::min(e_min, s.energy);
      for (std::size_t k = 0; k < r; ++k)
        weight[k] = std::exp(-dbeta * static_cast<double>(pop[k].energy - e_min) / inst.scale());
      const double total = std::accumulate(weight.begin(), weight.end(), 0.0);
      const double u = rng.uniform();
      next.clear();
      double cumulative = 0.0;
      std::size_t k = 0;
      for (std::size_t j = 0; j < r; ++j) {
        const double target = (u + static_cast<double>(j)) / static_cast<double>(r) * total;
        while (k + 1 < r && cumulative + weight[k] <= target) cumulative += weight[k++];
        next.push_back(pop[k]);
      }
      pop.swap(next);
    }
    prev_beta = beta;
    const AcceptanceTable table(inst, beta);
    for (auto& s : pop) {
      for (int sweep = 0; sweep < p.sweeps; ++sweep) {
        work += metropolis_sweep(inst, s, table, rng);
        best.offer(s);
      }
    }
  }
  SolveOutcome out = detail::finish(inst, best, work, start);
  out.final_population = pop.size();
  return out;
}

double critical_population(double r, double p) {
  if (!(r > 0)) throw ValidationError("critical population: R must be positive");
  if (!(p >= 0 && p <= 1)) throw ValidationError("critical population: p must lie in [0, 1]");
  if (p == 0) return std::numeric_limits<double>::infinity();
  if (p == 1) return r;
  // Never below the population actually used (one run already suffices).
  return std::max(r, r * std::log(0.01) / std::log1p(-p));
}

}  // namespace wsc
