#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "amb/mdp.hpp"

namespace amb {

/// Seeded 64-bit stream with a build-independent uniform draw.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  /// Uniform in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Independent streams for the three random sources of an episode.
struct EpisodeStreams {
  RandomStream initial;
  RandomStream transition;
  RandomStream reward;

  explicit EpisodeStreams(std::uint64_t master_seed);
};

/// Samples episodes from precomputed cumulative tables.
class EpisodeSampler {
 public:
  explicit EpisodeSampler(const TabularMdp& mdp);

  /// Overwrites `out` with one H-step episode under `pi`.
  void sample(const DeterministicPolicy& pi, EpisodeStreams& rng, Trajectory& out) const;

 private:
  static StateId draw(const std::vector<Transition>& row, const std::vector<double>& cdf, double u);

  const TabularMdp* mdp_;
  std::vector<std::vector<double>> cdf_;  // per pair
  std::vector<double> initial_cdf_;
};

/// Samples one episode under `pi`; the result is fixed by the stream state.
Trajectory sample_episode(const TabularMdp& mdp, const DeterministicPolicy& pi, EpisodeStreams& rng,
                          std::int64_t episode_index = 0);

}  // namespace amb
