#include "amb/sampling.hpp"

#include <algorithm>

namespace amb {

namespace {

std::vector<double> cumulative(const std::vector<Transition>& row) {
  std::vector<double> cdf;
  cdf.reserve(row.size());
  double acc = 0.0;
  for (const auto& t : row) cdf.push_back(acc += t.prob);
  return cdf;
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
  engine_.seed(seq);
}

EpisodeStreams::EpisodeStreams(std::uint64_t master_seed)
    : initial(master_seed, 1), transition(master_seed, 2), reward(master_seed, 3) {}

EpisodeSampler::EpisodeSampler(const TabularMdp& mdp) : mdp_(&mdp), initial_cdf_(cumulative(mdp.initial)) {
  cdf_.reserve(mdp.num_pairs());
  for (const auto& row : mdp.transitions) cdf_.push_back(cumulative(row));
}

StateId EpisodeSampler::draw(const std::vector<Transition>& row, const std::vector<double>& cdf, double u) {
  // Scale by the row mass so rounding in the last partial sum never drops a draw.
  const double x = u * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
  std::size_t i = static_cast<std::size_t>(it - cdf.begin());
  if (i == row.size()) {
    i = row.size() - 1;
    while (i > 0 && row[i].prob == 0.0) --i;
  }
  return row[i].next;
}

void EpisodeSampler::sample(const DeterministicPolicy& pi, EpisodeStreams& rng, Trajectory& out) const {
  const TabularMdp& mdp = *mdp_;
  out.steps.resize(static_cast<std::size_t>(mdp.horizon));
  StateId s = draw(mdp.initial, initial_cdf_, rng.initial.uniform());
  for (int h = 1; h <= mdp.horizon; ++h) {
    const ActionId a = pi.action[s];
    const PairId p = mdp.pair(s, a);
    const double r = rng.reward.uniform() < mdp.reward_mean[p] ? 1.0 : 0.0;
    out.steps[static_cast<std::size_t>(h - 1)] = {s, a, r};
    if (h < mdp.horizon) s = draw(mdp.transitions[p], cdf_[p], rng.transition.uniform());
  }
}

Trajectory sample_episode(const TabularMdp& mdp, const DeterministicPolicy& pi, EpisodeStreams& rng,
                          std::int64_t episode_index) {
  require_valid(mdp, pi);
  EpisodeSampler sampler(mdp);
  Trajectory traj;
  traj.episode_index = episode_index;
  sampler.sample(pi, rng, traj);
  return traj;
}

}  // namespace amb
