#include "spooky/quantum.hpp"

#include <cmath>
#include <stdexcept>

namespace spooky::quantum {

double correlation(const NoisySingletState& state, PolarizationSetting sa,
                   PolarizationSetting sb) {
  if (!(state.visibility >= 0.0 && state.visibility <= 1.0))
    throw std::domain_error("visibility must be in [0, 1]");
  return -state.visibility * std::cos(2.0 * (sa.angle_rad - sb.angle_rad));
}

OutcomePair sample_outcome(const NoisySingletState& state, PolarizationSetting sa,
                           PolarizationSetting sb, std::mt19937_64& rng) {
  const double e = correlation(state, sa, sb);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int a = u(rng) < 0.5 ? +1 : -1;
  // P(ab = +1) = (1 + E)/2; marginals stay uniform.
  const int product = u(rng) < 0.5 * (1.0 + e) ? +1 : -1;
  return {a, product * a};
}

double chsh_value(double e_ab, double e_apb, double e_abp, double e_apbp,
                  ChshCombination comb) {
  double s = 0.0;
  switch (comb) {
    case ChshCombination::MinusOnAB:   s = -e_ab + e_apb + e_abp + e_apbp; break;
    case ChshCombination::MinusOnApB:  s = e_ab - e_apb + e_abp + e_apbp; break;
    case ChshCombination::MinusOnABp:  s = e_ab + e_apb - e_abp + e_apbp; break;
    case ChshCombination::MinusOnApBp: s = e_ab + e_apb + e_abp - e_apbp; break;
    case ChshCombination::AllPlus:     s = e_ab + e_apb + e_abp + e_apbp; break;
  }
  return std::abs(s);
}

ChshSettings optimal_settings() {
  return {{0.0}, {M_PI / 4.0}, {M_PI / 8.0}, {-M_PI / 8.0}};
}

}  // namespace spooky::quantum
