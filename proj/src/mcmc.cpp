#include "wsc/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wsc/errors.hpp"

namespace wsc {

namespace {
// Above this many entries a table is no faster than exp() and wastes memory.
constexpr Energy kMaxTable = 1 << 16;
}  // namespace

SpinState SpinState::random(const ProblemInstance& inst, Rng& rng) {
  std::vector<Spin> s(inst.n());
  for (auto& x : s) x = rng.spin();
  return from_spins(inst, std::move(s));
}

SpinState SpinState::uniform(const ProblemInstance& inst, Spin value) {
  return from_spins(inst, std::vector<Spin>(inst.n(), value));
}

SpinState SpinState::from_spins(const ProblemInstance& inst, std::vector<Spin> spins) {
  SpinState st;
  st.energy = wsc::energy(inst, spins);
  st.spins = std::move(spins);
  return st;
}

AcceptanceTable::AcceptanceTable(const ProblemInstance& inst, double beta)
    : beta_(beta), inv_scale_(1.0 / inst.scale()) {
  if (!(beta >= 0) || !std::isfinite(beta))
    throw ValidationError("acceptance table: beta must be finite and >= 0");
  if (inst.max_local_field() <= kMaxTable) {
    limit_ = inst.max_local_field();
    table_.resize(static_cast<std::size_t>(limit_) + 1);
    for (Energy k = 0; k <= limit_; ++k) table_[k] = direct(2 * k);
  }
}

double AcceptanceTable::direct(Energy delta) const {
  if (delta <= 0) return 1.0;
  return std::min(1.0, std::exp(-beta_ * static_cast<double>(delta) * inv_scale_));
}

std::uint64_t metropolis_sweep(const ProblemInstance& inst, SpinState& state,
                               const AcceptanceTable& table, Rng& rng) {
  const std::size_t n = inst.n();
  Spin* s = state.spins.data();
  for (std::size_t i = 0; i < n; ++i) {
    const auto site = static_cast<SiteId>(i);
    std::int64_t local = inst.field(site);
    for (const Neighbor& nb : inst.neighbors(site)) local += std::int64_t{nb.coupling} * s[nb.site];
    const Energy delta = 2 * s[i] * local;
    if (table.accept(delta, rng.uniform())) {
      s[i] = static_cast<Spin>(-s[i]);
      state.energy += delta;
    }
  }
#ifndef NDEBUG
  if (!state.coherent(inst)) throw std::logic_error("metropolis_sweep: cached energy drifted");
#endif
  return n;
}

std::uint64_t metropolis_sweep(const ProblemInstance& inst, SpinState& state, double beta, Rng& rng) {
  return metropolis_sweep(inst, state, AcceptanceTable(inst, beta), rng);
}

Schedule linear_beta_schedule(double beta_ini, double beta_end, int steps) {
  if (steps < 2) throw ValidationError("linear schedule: need at least 2 steps");
  if (!(beta_end > beta_ini) || beta_ini < 0)
    throw ValidationError("linear schedule: need 0 <= beta_ini < beta_end");
  Schedule s;
  s.betas.resize(steps);
  for (int k = 0; k < steps; ++k)
    s.betas[k] = beta_ini + (beta_end - beta_ini) * k / (steps - 1);
  s.betas.back() = beta_end;
  return s;
}

std::vector<double> TemperatureLadder::betas() const {
  std::vector<double> b(temperatures.size());
  std::transform(temperatures.begin(), temperatures.end(), b.begin(),
                 [](double t) { return 1.0 / t; });
  return b;
}

TemperatureLadder geometric_temperature_ladder(double t_min, double t_max, int count) {
  if (count < 2) throw ValidationError("temperature ladder: need at least 2 temperatures");
  if (!(t_min > 0) || !(t_max > t_min))
    throw ValidationError("temperature ladder: need 0 < T_min < T_max");
  TemperatureLadder l;
  l.temperatures.resize(count);
  const double ratio = std::pow(t_max / t_min, 1.0 / (count - 1));
  for (int k = 0; k < count; ++k) l.temperatures[k] = t_min * std::pow(ratio, k);
  l.temperatures.front() = t_min;
  l.temperatures.back() = t_max;
  return l;
}

TemperingChain::TemperingChain(const ProblemInstance& inst, const std::vector<double>& betas,
                               Rng& rng)
    : inst_(&inst) {
  if (betas.empty()) throw ValidationError("tempering chain: empty ladder");
  tables_.reserve(betas.size());
  for (double b : betas) tables_.emplace_back(inst, b);
  replicas_.reserve(betas.size());
  for (std::size_t k = 0; k < betas.size(); ++k) replicas_.push_back(SpinState::random(inst, rng));
  slot_.resize(betas.size());
  for (std::size_t k = 0; k < slot_.size(); ++k) slot_[k] = k;
}

std::uint64_t TemperingChain::sweep(Rng& rng) {
  std::uint64_t work = 0;
  for (std::size_t k = 0; k < slot_.size(); ++k)
    work += metropolis_sweep(*inst_, replicas_[slot_[k]], tables_[k], rng);
  return work;
}

double TemperingChain::exchange_probability(double beta_a, double beta_b, Energy e_a, Energy e_b,
                                            int scale) {
  const double x = (beta_a - beta_b) * static_cast<double>(e_a - e_b) / scale;
  return x >= 0 ? 1.0 : std::exp(x);
}

std::size_t TemperingChain::exchange(Rng& rng) {
  std::size_t accepted = 0;
  for (std::size_t k = 0; k + 1 < slot_.size(); ++k) {
    const double p = exchange_probability(tables_[k].beta(), tables_[k + 1].beta(),
                                          replicas_[slot_[k]].energy,
                                          replicas_[slot_[k + 1]].energy, inst_->scale());
    if (rng.uniform() < p) {
      std::swap(slot_[k], slot_[k + 1]);
      ++accepted;
    }
  }
  return accepted;
}

}  // namespace wsc
