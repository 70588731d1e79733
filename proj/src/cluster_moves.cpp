#include <algorithm>
#include <cmath>
#include <limits>

#include "solver_util.hpp"
#include "wsc/errors.hpp"

namespace wsc {

using detail::BestTracker;
using detail::Clock;
using detail::finish;
using detail::over_budget;

namespace {

using detail::ClusterScratch;

// Grows the connected cluster of sites where a and b disagree, starting from a
// uniformly chosen disagreeing site. Leaves the members in scratch.members and
// returns false when the states agree everywhere.
bool grow_disagreement_cluster(const ProblemInstance& inst, const SpinState& a,
                               const SpinState& b, Rng& rng, ClusterScratch& scratch) {
  const std::size_t n = inst.n();
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) count += a.spins[i] != b.spins[i];
  scratch.reset(n);
  if (count == 0) return false;
  std::uint64_t pick = rng.below(count);
  SiteId seed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (a.spins[i] != b.spins[i] && pick-- == 0) {
      seed = static_cast<SiteId>(i);
      break;
    }
  }
  scratch.mark(seed);
  for (std::size_t head = 0; head < scratch.members.size(); ++head) {
    const SiteId i = scratch.members[head];
    for (const Neighbor& nb : inst.neighbors(i))
      if (!scratch.marked(nb.site) && a.spins[nb.site] != b.spins[nb.site]) scratch.mark(nb.site);
  }
  return true;
}

// Energy change of flipping every marked site of `s`.
Energy cluster_delta(const ProblemInstance& inst, const SpinState& s, const ClusterScratch& c) {
  Energy d = 0;
  for (SiteId i : c.members) {
    std::int64_t local = inst.field(i);
    for (const Neighbor& nb : inst.neighbors(i))
      if (!c.marked(nb.site)) local += std::int64_t{nb.coupling} * s.spins[nb.site];
    d += 2 * s.spins[i] * local;
  }
  return d;
}

void flip_cluster(SpinState& s, const ClusterScratch& c, Energy delta) {
  for (SiteId i : c.members) s.spins[i] = static_cast<Spin>(-s.spins[i]);
  s.energy += delta;
}

thread_local ClusterScratch tls_scratch;

}  // namespace

ClusterMove houdayer_icm_move(const ProblemInstance& inst, SpinState& a, SpinState& b, Rng& rng) {
  auto& c = tls_scratch;
  if (!grow_disagreement_cluster(inst, a, b, rng, c)) return {};
  const Energy da = cluster_delta(inst, a, c);
  const Energy db = cluster_delta(inst, b, c);
  flip_cluster(a, c, da);
  flip_cluster(b, c, db);
  return {c.members.size(), true};
}

ClusterMove replica_cluster_move(const ProblemInstance& inst, SpinState& a, double beta_a,
                                 SpinState& b, double beta_b, Rng& rng) {
  auto& c = tls_scratch;
  if (!grow_disagreement_cluster(inst, a, b, rng, c)) return {};
  const Energy da = cluster_delta(inst, a, c);
  const Energy db = cluster_delta(inst, b, c);
  // Boundary neighbours agree in both states while cluster sites disagree, so
  // db == -da and the joint weight changes by exp(-(beta_a - beta_b) * da).
  const double x = -(beta_a - beta_b) * static_cast<double>(da) / inst.scale();
  const double u = rng.uniform();
  ClusterMove m{c.members.size(), false};
  if (x >= 0 || u < std::exp(x)) {
    flip_cluster(a, c, da);
    flip_cluster(b, c, db);
    m.accepted = true;
  }
  return m;
}

namespace {

std::vector<double> ladder_betas(const PtParams& p, double factor = 1.0) {
  if (p.temperatures < 2) throw ValidationError("pt: need N_T >= 2");
  if (p.cluster_temperatures < 0 || p.cluster_temperatures > p.temperatures)
    throw ValidationError("pt: N_c must lie in [0, N_T]");
  if (p.sweeps < 1 || p.replicas < 1) throw ValidationError("pt: need sweeps >= 1 and replicas >= 1");
  return geometric_temperature_ladder(p.t_min * factor, p.t_max * factor, p.temperatures).betas();
}

}  // namespace

namespace detail {

SolveOutcome pt_icm_scaled(const ProblemInstance& inst, const PtParams& p, double factor, Rng& rng,
                           std::uint64_t work_budget) {
  const auto start = Clock::now();
  const std::vector<double> betas = ladder_betas(p, factor);
  const auto r = static_cast<std::size_t>(p.replicas);
  std::vector<Rng> chain_rng;
  std::vector<TemperingChain> chains;
  chain_rng.reserve(r);
  chains.reserve(r);
  for (std::size_t c = 0; c < r; ++c) {
    chain_rng.push_back(rng.derive({c}));
    chains.emplace_back(inst, betas, chain_rng.back());
  }
  BestTracker best;
  std::vector<Energy> chain_best(r, std::numeric_limits<Energy>::max());
  std::vector<int> first_reached(r, 0);
  auto observe = [&](int sweep) {
    for (std::size_t c = 0; c < r; ++c) {
      for (std::size_t k = 0; k < chains[c].size(); ++k) best.offer(chains[c].at(k));
      if (chains[c].at(0).energy < chain_best[c]) {
        chain_best[c] = chains[c].at(0).energy;
        first_reached[c] = sweep;
      }
    }
  };
  observe(0);

  std::vector<std::size_t> order(r);
  std::uint64_t work = 0;
  int done = 0;
  for (int sweep = 1; sweep <= p.sweeps && !over_budget(work, work_budget); ++sweep) {
    for (std::size_t c = 0; c < r; ++c) work += chains[c].sweep(chain_rng[c]);
    for (int k = 0; k < p.cluster_temperatures && r >= 2; ++k) {
      // Random pairing of the chains at this temperature.
      for (std::size_t c = 0; c < r; ++c) order[c] = c;
      for (std::size_t c = r - 1; c > 0; --c) std::swap(order[c], order[rng.below(c + 1)]);
      for (std::size_t c = 0; c + 1 < r; c += 2) {
        const auto m = houdayer_icm_move(inst, chains[order[c]].at(k), chains[order[c + 1]].at(k), rng);
        work += 2 * m.cluster_size;
      }
    }
    for (std::size_t c = 0; c < r; ++c) chains[c].exchange(chain_rng[c]);
    observe(sweep);
    done = sweep;
  }

  SolveOutcome out = finish(inst, best, work, start);
  // Ground-state criteria: every chain's coldest replica reached the best
  // energy, each within the first quarter of the sweeps.
  bool met = done > 0;
  for (std::size_t c = 0; c < r; ++c)
    met = met && chain_best[c] == out.best_energy && 4 * first_reached[c] <= done;
  out.gs_criteria_met = met;
  return out;
}

}  // namespace detail

SolveOutcome pt_icm(const ProblemInstance& inst, const PtParams& p, Rng& rng,
                    std::uint64_t work_budget) {
  return detail::pt_icm_scaled(inst, p, 1.0, rng, work_budget);
}

SolveOutcome replica_mc_icm(const ProblemInstance& inst, const PtParams& p, Rng& rng,
                            std::uint64_t work_budget) {
  const auto start = Clock::now();
  const std::vector<double> betas = ladder_betas(p);
  // Two copies of the ladder: RMC acts inside a copy between neighbouring
  // temperatures, ICM between the copies at equal temperature.
  Rng rng_a = rng.derive({0});
  Rng rng_b = rng.derive({1});
  TemperingChain a(inst, betas, rng_a);
  TemperingChain b(inst, betas, rng_b);
  BestTracker best;
  auto observe = [&] {
    for (std::size_t k = 0; k < betas.size(); ++k) {
      best.offer(a.at(k));
      best.offer(b.at(k));
    }
  };
  observe();
  std::uint64_t work = 0;
  for (int round = 0; round < p.sweeps && !over_budget(work, work_budget); ++round) {
    work += a.sweep(rng_a);
    work += b.sweep(rng_b);
    for (TemperingChain* chain : {&a, &b}) {
      Rng& cr = chain == &a ? rng_a : rng_b;
      for (std::size_t k = 0; k + 1 < betas.size(); ++k) {
        const auto m =
            replica_cluster_move(inst, chain->at(k), betas[k], chain->at(k + 1), betas[k + 1], cr);
        work += 2 * m.cluster_size;
      }
    }
    for (int k = 0; k < p.cluster_temperatures; ++k) {
      const auto m = houdayer_icm_move(inst, a.at(k), b.at(k), rng);
      work += 2 * m.cluster_size;
    }
    observe();
  }
  return finish(inst, best, work, start);
}

}  // namespace wsc
