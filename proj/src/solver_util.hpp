#pragma once

#include <chrono>
#include <limits>
#include <vector>

#include "wsc/mcmc.hpp"
#include "wsc/solvers.hpp"

namespace wsc::detail {

// Lowest-energy configuration seen so far.
class BestTracker {
 public:
  void offer(const SpinState& s) {
    if (s.energy < energy_) {
      energy_ = s.energy;
      state_ = s.spins;
    }
  }
  Energy energy() const { return energy_; }
  const std::vector<Spin>& state() const { return state_; }

 private:
  Energy energy_ = std::numeric_limits<Energy>::max();
  std::vector<Spin> state_;
};

inline bool over_budget(std::uint64_t work, std::uint64_t budget) {
  return budget != 0 && work >= budget;
}

using Clock = std::chrono::steady_clock;

inline SolveOutcome finish(const ProblemInstance& inst, const BestTracker& best,
                           std::uint64_t work, Clock::time_point start) {
  SolveOutcome out;
  out.best_energy = best.energy();
  out.best_state = best.state();
  out.work = work;
  out.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
  if (auto ref = inst.reference_energy()) {
    out.success = out.best_energy == *ref;
    out.below_reference = out.best_energy < *ref;
  }
  return out;
}

// Reusable marks for cluster growth, reset lazily through a generation stamp.
class ClusterScratch {
 public:
  void reset(std::size_t n) {
    if (stamp_.size() != n) {
      stamp_.assign(n, 0);
      generation_ = 0;
    }
    if (++generation_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      generation_ = 1;
    }
    members.clear();
  }
  bool marked(SiteId i) const { return stamp_[i] == generation_; }
  void mark(SiteId i) {
    stamp_[i] = generation_;
    members.push_back(i);
  }

  std::vector<SiteId> members;

 private:
  std::vector<std::uint32_t> stamp_;
  std::uint32_t generation_ = 0;
};

// PT+ICM with every ladder temperature multiplied by `factor`.
SolveOutcome pt_icm_scaled(const ProblemInstance& inst, const PtParams& p, double factor, Rng& rng,
                           std::uint64_t work_budget);

}  // namespace wsc::detail
