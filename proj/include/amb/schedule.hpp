#pragma once

#include <cstdint>
#include <vector>

namespace amb {

/// Step size for the t-th visit of a pair: (H+1)/(H+t). Throws for t == 0.
double learning_rate(std::int64_t t, int horizon);

/// Coefficients of the unrolled interpolation after n visits.
///
/// `alpha0` multiplies the initial value; `weights[t-1]` multiplies the
/// target observed on visit t.
struct AlphaWeights {
  double alpha0 = 1.0;
  std::vector<double> weights;
};

AlphaWeights alpha_weights(std::int64_t n, int horizon);

/// Hoeffding bonus c * sqrt(H^3 * ln(S*A*K/delta) / n). Throws for n == 0.
double bonus(std::int64_t n, double bonus_constant, int horizon, double log_term);

/// ln(S*A*K/delta), the confidence term shared by every bonus of a run.
double bonus_log_term(std::size_t num_states, std::size_t num_actions, std::int64_t num_episodes, double delta);

/// x if x >= threshold, else 0.
inline double clip(double x, double threshold) { return x >= threshold ? x : 0.0; }

}  // namespace amb
