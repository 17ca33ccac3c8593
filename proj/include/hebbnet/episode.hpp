#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hebbnet/env.hpp"
#include "hebbnet/genome.hpp"
#include "hebbnet/plastic_net.hpp"
#include "hebbnet/topology.hpp"

namespace hebbnet {

// Mid-episode interventions. Events fire at the start of their step, before
// that step's forward pass, so the weight snapshot *at* at_step already
// reflects the event.
//   freeze_plasticity : plasticity updates stop permanently from at_step on.
//   zero_weights      : a seeded uniform subset of fc weights is set to 0
//                       (fraction of all fc connections; contiguous=true
//                       zeroes one flat-index band instead). Zeroed
//                       connections keep updating afterwards.
//   saturate_actions  : the environment receives constant `value` actions on
//                       [at_step, at_step+duration); the network still runs
//                       and updates from its own outputs.
enum class PerturbationKind { freeze_plasticity, zero_weights, saturate_actions };

std::string to_string(PerturbationKind kind);
PerturbationKind perturbation_kind_from_string(const std::string& s);

struct PerturbationEvent {
    PerturbationKind kind = PerturbationKind::freeze_plasticity;
    int at_step = 0;
    int duration = 1;        // saturate_actions only
    double fraction = 1.0 / 3.0;  // zero_weights only, in (0,1]
    double value = 1.0;      // saturate_actions only
    bool contiguous = false; // zero_weights only: band instead of uniform draw
};

struct PerturbationSchedule {
    std::vector<PerturbationEvent> events;  // sorted by at_step
    std::uint64_t seed = 0;                 // drives the zero_weights draw

    // Throws std::invalid_argument on unsorted events, fraction outside
    // (0,1], or duration < 1.
    void validate() const;
    bool empty() const { return events.empty(); }
};

struct PerturbationLogEntry {
    PerturbationKind kind;
    int step = 0;
    int zeroed_count = 0;  // zero_weights only
};

struct StepRecord {
    int step = 0;
    Eigen::VectorXd action;  // what the environment received
    double reward = 0.0;
};

struct RecordingOptions {
    bool record_steps = false;    // per-step action + reward
    bool record_weights = false;  // flattened fc weight snapshots
    int weight_stride = 1;        // record every k-th step
};

enum class UpdateOrder { synchronous, sequential };

std::string to_string(UpdateOrder order);
UpdateOrder update_order_from_string(const std::string& s);

struct EpisodeOutcome {
    double fitness = 0.0;  // cumulative reward (floor_fitness when diverged)
    int steps = 0;
    bool diverged = false;
    std::vector<StepRecord> step_records;
    std::vector<int> snapshot_steps;
    std::vector<Eigen::VectorXd> weight_snapshots;  // one flat vector per entry
    std::vector<PerturbationLogEntry> perturbation_log;
    std::vector<std::string> warnings;  // e.g. events past the horizon
};

struct LifetimeOptions {
    std::uint64_t weight_seed = 0;  // fc init draw (unused when the genome carries weights)
    std::uint64_t env_seed = 0;
    int horizon = 1000;
    UpdateOrder update_order = UpdateOrder::synchronous;
    InitDistribution init_distribution = InitDistribution::uniform;
    double floor_fitness = -1000.0;
    RecordingOptions recording;
    PerturbationSchedule schedule;
};

// One agent lifetime: fresh weights, then forward -> act -> plastic update
// every step until the horizon, done, or divergence. The reward stream is
// accumulated into fitness but never fed to the network — learning inside
// the episode is activity-driven only.
EpisodeOutcome run_lifetime(const NetworkTopology& topology, const DecodedGenome& genome,
                            Environment& env, const LifetimeOptions& options);

// Summary + perturbation log + (when recorded) step records as a JSON
// document. Weight snapshots are deliberately excluded — they go to the
// binary trajectory format instead.
std::string episode_outcome_to_json(const EpisodeOutcome& outcome);

}  // namespace hebbnet
