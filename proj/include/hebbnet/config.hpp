#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hebbnet/crawler.hpp"
#include "hebbnet/episode.hpp"
#include "hebbnet/es.hpp"
#include "hebbnet/genome.hpp"
#include "hebbnet/topology.hpp"
#include "hebbnet/track.hpp"

namespace hebbnet {

// Complete description of one experiment: network, genome mode, environment,
// optimizer hyperparameters, budget, and seeds. Everything a run needs to be
// reproduced byte for byte.
struct ExperimentConfig {
    std::string name = "experiment";  // run label, becomes the output dir component

    NetworkTopology topology;
    GenomeMode mode;

    // environment
    std::string env_kind = "crawler";  // crawler | track | sphere
    CrawlerParams crawler;
    std::uint64_t morphology_seed = 1;  // crawler response-matrix / damage-set draw
    TrackParams track;
    int sphere_dim = 10;
    // Zero-pad flat observations up to topology.input_dim (for driving a
    // wider policy with a narrower env).
    bool pad_observations = false;

    // evolution strategy
    int population = 500;
    double alpha = 0.2;
    double sigma = 0.1;
    double alpha_decay = 0.995;
    double sigma_decay = 0.999;
    bool mirrored = true;
    FitnessShaping shaping = FitnessShaping::raw;

    // budget
    int generations = 100;
    int episodes_per_env = 1;  // training episodes per candidate per env
    int eval_episodes = 4;     // current-solution evaluation bank size
    int checkpoint_every = 25;  // generations between checkpoints; 0 = final only

    // seeds
    std::uint64_t master_seed = 1;
    std::uint64_t eval_bank_seed = 0;  // 0 = derive from master

    // rollout
    int horizon = 1000;
    UpdateOrder update_order = UpdateOrder::synchronous;
    InitDistribution init_distribution = InitDistribution::uniform;
    double floor_fitness = -1000.0;

    // execution
    int workers = 1;
    bool record_wall_time = false;   // off by default so curve CSVs are byte-comparable
    bool common_episode_seed = false;
    std::string output_dir;          // "" = $HEBBNET_OUT, then ./runs

    // Throws std::invalid_argument naming the offending field with a dotted
    // path (e.g. "es.population").
    void validate() const;

    // Native observation width / action width of the configured env.
    int env_obs_dim() const;
    int env_action_dim() const;
};

// Named default configurations.

std::vector<std::string> preset_names();
ExperimentConfig preset_config(const std::string& name);

// JSON text form. parse_config accepts a partial object — a "preset" key
// selects the baseline, remaining keys override it — validates, and returns
// the resolved config. serialize_config emits the canonical form: fully
// resolved, keys sorted, no preset key. Unknown keys are rejected with
// their path.
ExperimentConfig parse_config(const std::string& text);
std::string serialize_config(const ExperimentConfig& config);

// Hash of the canonical serialization; manifests key on it.
std::uint64_t config_hash(const ExperimentConfig& config);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace hebbnet
