#include "amb/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace amb {

double learning_rate(std::int64_t t, int horizon) {
  if (t < 1) throw std::invalid_argument("learning rate is defined from the first visit on");
  return static_cast<double>(horizon + 1) / static_cast<double>(horizon + t);
}

AlphaWeights alpha_weights(std::int64_t n, int horizon) {
  if (n < 0) throw std::invalid_argument("visit count must be nonnegative");
  AlphaWeights out;
  out.weights.resize(static_cast<std::size_t>(n));
  // Backward accumulation of the running product prod_{j>t} (1 - alpha_j).
  double tail = 1.0;
  for (std::int64_t t = n; t >= 1; --t) {
    const double a = learning_rate(t, horizon);
    out.weights[static_cast<std::size_t>(t - 1)] = a * tail;
    tail *= 1.0 - a;
  }
  out.alpha0 = tail;
  return out;
}

double bonus_log_term(std::size_t num_states, std::size_t num_actions, std::int64_t num_episodes, double delta) {
  return std::log(static_cast<double>(num_states) * static_cast<double>(num_actions) *
                  static_cast<double>(num_episodes) / delta);
}

double bonus(std::int64_t n, double bonus_constant, int horizon, double log_term) {
  if (n < 1) throw std::invalid_argument("bonus is undefined before the first visit");
  const double h = static_cast<double>(horizon);
  return bonus_constant * std::sqrt(h * h * h * log_term / static_cast<double>(n));
}

}  // namespace amb
