#include "hebbnet/rollout.hpp"

#include <cmath>
#include <stdexcept>

#include "hebbnet/parallel.hpp"
#include "hebbnet/rng.hpp"

namespace hebbnet {

std::vector<EpisodeSeeds> make_seed_bank(std::uint64_t root, std::uint64_t tag, int episodes) {
    std::vector<EpisodeSeeds> bank;
    bank.reserve(static_cast<std::size_t>(episodes));
    for (int i = 0; i < episodes; ++i) {
        const std::uint64_t e = static_cast<std::uint64_t>(i);
        bank.push_back({derive_seed(root, {tag, e, stream::weight_init}),
                        derive_seed(root, {tag, e, stream::env})});
    }
    return bank;
}

EvalStats evaluate(const NetworkTopology& topology, const DecodedGenome& genome,
                   const EnvFactory& make_env, const std::vector<EpisodeSeeds>& seed_bank,
                   const LifetimeOptions& base_options, int workers) {
    if (seed_bank.empty()) throw std::invalid_argument("evaluate needs at least one episode seed");

    EvalStats stats;
    stats.per_episode.assign(seed_bank.size(), 0.0);
    std::vector<unsigned char> diverged(seed_bank.size(), 0);

    parallel_for(static_cast<int>(seed_bank.size()), workers, [&](int i) {
        auto env = make_env();
        LifetimeOptions options = base_options;
        options.weight_seed = seed_bank[static_cast<std::size_t>(i)].weight_seed;
        options.env_seed = seed_bank[static_cast<std::size_t>(i)].env_seed;
        const EpisodeOutcome outcome = run_lifetime(topology, genome, *env, options);
        stats.per_episode[static_cast<std::size_t>(i)] = outcome.fitness;
        diverged[static_cast<std::size_t>(i)] = outcome.diverged ? 1 : 0;
    });

    // Fixed-order reduction: always episode 0,1,2,... regardless of which
    // thread ran what.
    double sum = 0.0;
    for (const double f : stats.per_episode) sum += f;
    stats.mean = sum / static_cast<double>(stats.per_episode.size());
    double sq = 0.0;
    for (const double f : stats.per_episode) sq += (f - stats.mean) * (f - stats.mean);
    stats.stddev = std::sqrt(sq / static_cast<double>(stats.per_episode.size()));
    for (const auto d : diverged) stats.diverged_episodes += d;
    return stats;
}

double multi_env_fitness(const NetworkTopology& topology, const DecodedGenome& genome,
                         const std::vector<EnvFactory>& seen_envs, int episodes_per_env,
                         std::uint64_t seed_root, const LifetimeOptions& base_options,
                         int workers) {
    if (seen_envs.empty()) throw std::invalid_argument("training fitness needs at least one env");
    if (episodes_per_env < 1) throw std::invalid_argument("episodes_per_env must be >= 1");

    double total = 0.0;
    for (std::size_t m = 0; m < seen_envs.size(); ++m) {
        const auto bank = make_seed_bank(seed_root, derive_seed(0, {stream::train_episode, m}),
                                         episodes_per_env);
        total += evaluate(topology, genome, seen_envs[m], bank, base_options, workers).mean;
    }
    return total / static_cast<double>(seen_envs.size());
}

double multi_morphology_fitness(const NetworkTopology& topology, const DecodedGenome& genome,
                                const MorphologySet& morphologies, const CrawlerParams& params,
                                int episodes_per_morph, std::uint64_t seed_root,
                                const LifetimeOptions& base_options, int workers) {
    if (morphologies.seen.empty()) {
        throw std::invalid_argument("morphology set has no seen morphologies");
    }
    std::vector<EnvFactory> envs;
    envs.reserve(morphologies.seen.size());
    for (const auto& morph : morphologies.seen) {
        envs.push_back([&params, &morph]() -> std::unique_ptr<Environment> {
            return std::make_unique<CrawlerEnv>(params, morph);
        });
    }
    return multi_env_fitness(topology, genome, envs, episodes_per_morph, seed_root, base_options,
                             workers);
}

EpisodeOutcome apply_perturbations(const NetworkTopology& topology, const DecodedGenome& genome,
                                   Environment& env, const PerturbationSchedule& schedule,
                                   LifetimeOptions options) {
    options.schedule = schedule;
    return run_lifetime(topology, genome, env, options);
}

bool solved(const EpisodeOutcome& outcome, double threshold) {
    return outcome.fitness >= threshold;
}

bool solved(double fitness, double threshold) { return fitness >= threshold; }

}  // namespace hebbnet
