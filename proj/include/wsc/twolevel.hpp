#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace wsc {

struct TwoLevelParams {
  int n = 1;  // qubits; the overlap of start and target is 2^(-n/2)
  double t_ann = 500;
  double dt = 0.01;
  double q_noise = 0;  // independent per-qubit error probability

  void validate() const;
};

struct AnnealResult {
  double p_succ = 0;
  double p_succ_noisy = 0;  // (1 - q)^n * p_succ
  double norm_drift = 0;  // max | |phi| - 1 | over the run
  long steps = 0;
};

// H(s) = -(1-s)|psi><psi| - s|w><w| restricted to span{|w>, |psi>}, in the
// orthonormal basis {|w>, (|psi> - a|w>)/sqrt(1-a^2)} with a = 2^(-n/2).
Eigen::Matrix2d effective_hamiltonian(double s, int n);

// Closed-form gap sqrt((1-2s)^2 + 4 s (1-s) 2^-n).
double effective_gap(double s, int n);

// Linear schedule s = t / T_ann, starting in |psi>. Each step applies the exact
// 2x2 propagator of H at the step midpoint. The step count is
// ceil(T_ann / dt) with the step shortened to divide T_ann evenly.
AnnealResult integrate_schrodinger(const TwoLevelParams& p);

struct DoubleScalingRow {
  int n = 0;
  double sqrt_n = 0;
  double q = 0;
  double p_succ = 0;
  double p_succ_noisy = 0;
  double tts = 0;  // T_ann * repetitions(p_succ_noisy), arbitrary units
};

// Rows ordered by q, then n.
std::vector<DoubleScalingRow> double_scaling_curve(int n_min, int n_max, const TwoLevelParams& base,
                                                   const std::vector<double>& q_values);

std::string double_scaling_csv(const std::vector<DoubleScalingRow>& rows);

}  // namespace wsc
