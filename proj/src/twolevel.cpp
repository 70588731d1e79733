#include "wsc/twolevel.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <sstream>

#include "wsc/errors.hpp"
#include "wsc/tts.hpp"

namespace wsc {

void TwoLevelParams::validate() const {
  if (n < 1) throw ValidationError("twolevel: n must be >= 1");
  if (!(t_ann > 0)) throw ValidationError("twolevel: T_ann must be positive");
  if (!(dt > 0)) throw ValidationError("twolevel: dt must be positive");
  if (!(q_noise >= 0 && q_noise < 1)) throw ValidationError("twolevel: q must lie in [0, 1)");
}

Eigen::Matrix2d effective_hamiltonian(double s, int n) {
  const double a2 = std::ldexp(1.0, -n);  // alpha^2
  const double a = std::sqrt(a2);
  Eigen::Matrix2d h;
  h(0, 0) = -s - (1 - s) * a2;
  h(0, 1) = h(1, 0) = -(1 - s) * a * std::sqrt(1 - a2);
  h(1, 1) = -(1 - s) * (1 - a2);
  return h;
}

double effective_gap(double s, int n) {
  return std::sqrt((1 - 2 * s) * (1 - 2 * s) + 4 * s * (1 - s) * std::ldexp(1.0, -n));
}

AnnealResult integrate_schrodinger(const TwoLevelParams& p) {
  p.validate();
  using cd = std::complex<double>;
  const double a2 = std::ldexp(1.0, -p.n);
  cd c0 = std::sqrt(a2);  // amplitude on |w>
  cd c1 = std::sqrt(1 - a2);
  const long steps = static_cast<long>(std::ceil(p.t_ann / p.dt - 1e-9));
  const double h = p.t_ann / static_cast<double>(steps);
  AnnealResult r;
  r.steps = steps;
  for (long k = 0; k < steps; ++k) {
    const double s = (static_cast<double>(k) + 0.5) * h / p.t_ann;
    const Eigen::Matrix2d m = effective_hamiltonian(s, p.n);
    // H = e0 I + x X + z Z; exp(-i H h) = e^{-i e0 h} (cos(w h) I - i sin(w h) (x X + z Z) / w).
    const double e0 = 0.5 * (m(0, 0) + m(1, 1));
    const double z = 0.5 * (m(0, 0) - m(1, 1));
    const double x = m(0, 1);
    const double w = std::hypot(x, z);
    const double cw = std::cos(w * h);
    const double sw = w > 0 ? std::sin(w * h) / w : h;
    const cd phase = std::polar(1.0, -e0 * h);
    const cd i(0, 1);
    const cd u00 = phase * (cw - i * sw * z);
    const cd u11 = phase * (cw + i * sw * z);
    const cd u01 = phase * (-i * sw * x);
    const cd n0 = u00 * c0 + u01 * c1;
    const cd n1 = u01 * c0 + u11 * c1;
    c0 = n0;
    c1 = n1;
    const double norm = std::sqrt(std::norm(c0) + std::norm(c1));
    r.norm_drift = std::max(r.norm_drift, std::abs(norm - 1));
  }
  r.p_succ = std::norm(c0);
  r.p_succ_noisy = std::pow(1 - p.q_noise, p.n) * r.p_succ;
  return r;
}

std::vector<DoubleScalingRow> double_scaling_curve(int n_min, int n_max, const TwoLevelParams& base,
                                                   const std::vector<double>& q_values) {
  if (n_min < 1 || n_max < n_min) throw ValidationError("twolevel: need 1 <= n_min <= n_max");
  if (q_values.empty()) throw ValidationError("twolevel: no noise levels");
  std::map<int, double> p_clean;
  for (int n = n_min; n <= n_max; ++n) {
    TwoLevelParams p = base;
    p.n = n;
    p.q_noise = 0;
    p_clean[n] = integrate_schrodinger(p).p_succ;
  }
  std::vector<DoubleScalingRow> rows;
  for (double q : q_values) {
    TwoLevelParams check = base;
    check.q_noise = q;
    check.validate();
    for (int n = n_min; n <= n_max; ++n) {
      DoubleScalingRow r;
      r.n = n;
      r.sqrt_n = std::sqrt(static_cast<double>(n));
      r.q = q;
      r.p_succ = p_clean[n];
      r.p_succ_noisy = std::pow(1 - q, n) * r.p_succ;
      r.tts = time_to_solution(r.p_succ_noisy, base.t_ann);
      rows.push_back(r);
    }
  }
  return rows;
}

std::string double_scaling_csv(const std::vector<DoubleScalingRow>& rows) {
  std::ostringstream os;
  os.precision(12);
  os << "n,sqrt_n,q,p_succ,p_succ_noisy,tts\n";
  for (const auto& r : rows)
    os << r.n << "," << r.sqrt_n << "," << r.q << "," << r.p_succ << "," << r.p_succ_noisy << ","
       << r.tts << "\n";
  return os.str();
}

}  // namespace wsc
