#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wsc/instance.hpp"
#include "wsc/rng.hpp"

namespace wsc {

// Spin configuration with its energy kept in sync by every update.
struct SpinState {
  std::vector<Spin> spins;
  Energy energy = 0;

  static SpinState random(const ProblemInstance& inst, Rng& rng);
  static SpinState uniform(const ProblemInstance& inst, Spin value);
  static SpinState from_spins(const ProblemInstance& inst, std::vector<Spin> spins);

  void flip(const ProblemInstance& inst, SiteId site) {
    energy += delta_energy(inst, spins, site);
    spins[site] = static_cast<Spin>(-spins[site]);
  }

  // True when the cached energy matches a full recomputation.
  bool coherent(const ProblemInstance& inst) const { return energy == wsc::energy(inst, spins); }
};

// Metropolis acceptance probabilities min(1, exp(-beta * dE / scale)) for one
// inverse temperature. dE = 2 * s_i * local_i, so the table is indexed by
// s_i * local_i over [0, max_local_field]; instances whose local
// fields are too large for a table fall back to calling exp().
class AcceptanceTable {
 public:
  AcceptanceTable(const ProblemInstance& inst, double beta);

  double beta() const { return beta_; }
  double probability(Energy delta) const {
    if (delta <= 0) return 1.0;
    const Energy half = delta / 2;
    if (half <= limit_) return table_[static_cast<std::size_t>(half)];
    return direct(delta);
  }
  bool accept(Energy delta, double u) const { return u < probability(delta); }

 private:
  double direct(Energy delta) const;

  double beta_;
  double inv_scale_;
  Energy limit_ = -1;
  std::vector<double> table_;
};

// One pass over sites 0..n-1, one uniform draw per proposal. Returns the number
// of proposals made (= n), which is the work charged for the sweep.
std::uint64_t metropolis_sweep(const ProblemInstance& inst, SpinState& state,
                               const AcceptanceTable& table, Rng& rng);
std::uint64_t metropolis_sweep(const ProblemInstance& inst, SpinState& state, double beta, Rng& rng);

// Inverse temperatures in physical units (applied to energy / scale).
struct Schedule {
  std::vector<double> betas;
};

// M evenly spaced betas from beta_ini to beta_end inclusive.
Schedule linear_beta_schedule(double beta_ini, double beta_end, int steps);

// Temperatures, coldest first.
struct TemperatureLadder {
  std::vector<double> temperatures;

  std::size_t size() const { return temperatures.size(); }
  std::vector<double> betas() const;
};

// Geometric progression from t_min to t_max with both endpoints exact.
TemperatureLadder geometric_temperature_ladder(double t_min, double t_max, int count);

// One parallel-tempering chain: a replica per temperature, Metropolis sweeps
// and neighbour exchanges. Replicas are exchanged by permuting slots, never by
// copying spins.
class TemperingChain {
 public:
  // betas[k] is the inverse temperature of ladder position k; position 0 is
  // the coldest. Replicas start in independent random states.
  TemperingChain(const ProblemInstance& inst, const std::vector<double>& betas, Rng& rng);

  std::size_t size() const { return slot_.size(); }
  double beta(std::size_t k) const { return tables_[k].beta(); }
  const AcceptanceTable& table(std::size_t k) const { return tables_[k]; }

  SpinState& at(std::size_t k) { return replicas_[slot_[k]]; }
  const SpinState& at(std::size_t k) const { return replicas_[slot_[k]]; }

  // Sweeps every replica once; returns the work (proposals).
  std::uint64_t sweep(Rng& rng);

  // Attempts an exchange between every neighbouring pair of positions,
  // coldest pair first. Returns the number of accepted exchanges.
  std::size_t exchange(Rng& rng);

  // Exchange acceptance min(1, exp((beta_a - beta_b) * (E_a - E_b) / scale)).
  static double exchange_probability(double beta_a, double beta_b, Energy e_a, Energy e_b,
                                     int scale);

 private:
  const ProblemInstance* inst_;
  std::vector<AcceptanceTable> tables_;
  std::vector<SpinState> replicas_;
  std::vector<std::size_t> slot_;
};

}  // namespace wsc
