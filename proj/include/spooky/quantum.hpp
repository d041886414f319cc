#pragma once

#include <cstdint>
#include <random>

namespace spooky::quantum {

struct PolarizationSetting {
  double angle_rad = 0.0;
};

// Singlet fraction V mixed with white noise; the fringe visibility equals V.
struct NoisySingletState {
  double visibility = 1.0;  // in [0, 1]
};

struct OutcomePair {
  int outcome_a = +1;  // +-1
  int outcome_b = +1;
};

struct ChshSettings {
  PolarizationSetting a, a_prime, b, b_prime;
};

// E(theta_a, theta_b) = -V cos 2(theta_a - theta_b)
double correlation(const NoisySingletState& state, PolarizationSetting sa,
                   PolarizationSetting sb);

// Joint sample with P(product = -1) = (1 + V cos 2(theta_a - theta_b))/2 and
// uniform marginals on each side.
OutcomePair sample_outcome(const NoisySingletState& state, PolarizationSetting sa,
                           PolarizationSetting sb, std::mt19937_64& rng);

// Which term of the CHSH combination carries the minus sign; AllPlus is the
// literal four-term sum (which caps at sqrt(2) for the singlet).
enum class ChshCombination { MinusOnAB = 0, MinusOnApB, MinusOnABp, MinusOnApBp, AllPlus };

double chsh_value(double e_ab, double e_apb, double e_abp, double e_apbp,
                  ChshCombination comb = ChshCombination::MinusOnApBp);

// theta_a = 0, theta_a' = pi/4, theta_b = pi/8, theta_b' = -pi/8
ChshSettings optimal_settings();

}  // namespace spooky::quantum
