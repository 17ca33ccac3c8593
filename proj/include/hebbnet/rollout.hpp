#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "hebbnet/crawler.hpp"
#include "hebbnet/episode.hpp"

namespace hebbnet {

// (weight init, env) seed pair for one episode.
struct EpisodeSeeds {
    std::uint64_t weight_seed = 0;
    std::uint64_t env_seed = 0;
};

// Deterministic bank of per-episode seeds derived from (root, tag, index).
std::vector<EpisodeSeeds> make_seed_bank(std::uint64_t root, std::uint64_t tag, int episodes);

using EnvFactory = std::function<std::unique_ptr<Environment>()>;

struct EvalStats {
    double mean = 0.0;
    double stddev = 0.0;  // population std over episodes
    std::vector<double> per_episode;
    int diverged_episodes = 0;
};

// Mean/std fitness over `seed_bank.size()` independent lifetimes, each with
// fresh weights on a fresh env instance. Episodes fan out over `workers`
// threads; the reduction always runs in episode-index order, so the result
// is identical for any worker count. Divergent episodes contribute the
// floor fitness.
EvalStats evaluate(const NetworkTopology& topology, const DecodedGenome& genome,
                   const EnvFactory& make_env, const std::vector<EpisodeSeeds>& seed_bank,
                   const LifetimeOptions& base_options, int workers = 1);

// Training fitness: mean over the given (seen) environments of the mean
// episode fitness. Takes factories rather than a morphology set so tests can
// instrument env construction; the morphology-set overload below only ever
// builds envs for `seen`.
double multi_env_fitness(const NetworkTopology& topology, const DecodedGenome& genome,
                         const std::vector<EnvFactory>& seen_envs, int episodes_per_env,
                         std::uint64_t seed_root, const LifetimeOptions& base_options,
                         int workers = 1);

double multi_morphology_fitness(const NetworkTopology& topology, const DecodedGenome& genome,
                                const MorphologySet& morphologies, const CrawlerParams& params,
                                int episodes_per_morph, std::uint64_t seed_root,
                                const LifetimeOptions& base_options, int workers = 1);

// run_lifetime with a perturbation schedule attached.
EpisodeOutcome apply_perturbations(const NetworkTopology& topology, const DecodedGenome& genome,
                                   Environment& env, const PerturbationSchedule& schedule,
                                   LifetimeOptions options);

// Distance-style success test (crawler fitness is displacement).
bool solved(const EpisodeOutcome& outcome, double threshold = 100.0);
bool solved(double fitness, double threshold = 100.0);

}  // namespace hebbnet
