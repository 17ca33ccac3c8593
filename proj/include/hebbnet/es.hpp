#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace hebbnet {

// Monotone transform applied to raw fitnesses before the update. raw is the
// literal weighted-noise estimator; centered_rank maps fitnesses to average
// ranks rescaled to [-0.5, 0.5]; z_score standardizes to zero mean / unit
// std within the generation.
enum class FitnessShaping { raw, centered_rank, z_score };

std::string to_string(FitnessShaping shaping);
FitnessShaping fitness_shaping_from_string(const std::string& s);

struct EsState {
    Eigen::VectorXd h;  // current solution
    double alpha = 0.2;
    double sigma = 0.1;
    double alpha_decay = 0.995;
    double sigma_decay = 0.999;
    int population = 100;
    bool mirrored = true;
    FitnessShaping shaping = FitnessShaping::raw;
    int generation = 0;
    std::uint64_t master_seed = 0;

    // Throws std::invalid_argument on non-positive alpha/sigma/population,
    // or an odd / too-small population with mirroring on.
    void validate() const;
};

// Everything an evaluator needs to rebuild one candidate: the noise vector
// is regenerated from the seed, never shipped around.
struct CandidateTicket {
    int index = 0;
    std::uint64_t noise_seed = 0;
    double sign = 1.0;  // -1 for the mirrored half
};

struct FitnessReport {
    int index = -1;
    double fitness = 0.0;
    bool diverged = false;
    int steps = 0;
};

// Standard-normal vector deterministically regenerated from its seed.
Eigen::VectorXd noise_vector(std::uint64_t noise_seed, Eigen::Index dim);

// One ticket per candidate. With mirroring, tickets i and i + n/2 share a
// noise seed with opposite signs.
std::vector<CandidateTicket> sample_population(const EsState& state);

// h + sign * sigma * eps(noise_seed).
Eigen::VectorXd materialize(const CandidateTicket& ticket, const EsState& state);

std::vector<double> shape_fitnesses(const std::vector<double>& raw, FitnessShaping shaping);

// The weighted-noise step: h' = h + (alpha/(n*sigma)) * sum_i f_i * sign_i *
// eps_i, with shaped fitnesses substituted for f when shaping != raw,
// followed by the decay step and a generation bump. Requires exactly one
// report per candidate index or it rejects the generation. The summation
// always runs in fixed index order so the result is independent of which
// evaluator produced which report.
EsState es_update(const EsState& state, const std::vector<FitnessReport>& reports);

// alpha *= alpha_decay; sigma *= sigma_decay. Folded into es_update; exposed
// for direct checks.
EsState decay_step(EsState state);

// Training-fitness callback: candidate vector plus the seed that namespaces
// this evaluation's episodes. Must be pure and thread-safe.
using CandidateFitnessFn = std::function<double(const Eigen::VectorXd& candidate,
                                                std::uint64_t episode_seed)>;

struct CurveRow {
    int generation = 0;
    double pop_mean_fitness = 0.0;
    double pop_max_fitness = 0.0;
    double eval_fitness_mean = 0.0;
    double eval_fitness_std = 0.0;
    double alpha = 0.0;
    double sigma = 0.0;
    double wall_time = 0.0;  // 0.0 unless record_wall_time (keeps curves byte-comparable)
};

struct EvolutionResult {
    EsState state;  // after the last update
    Eigen::VectorXd best;  // current solution with the highest eval mean seen
    double best_eval = 0.0;
    int best_generation = -1;  // -1 when generations == 0
    std::vector<CurveRow> curve;  // one row per generation
};

struct EvolutionOptions {
    int generations = 100;
    int eval_episodes = 4;  // current-solution evaluation per generation
    int workers = 1;
    int checkpoint_every = 0;  // generations between checkpoint callbacks; 0 = off
    bool record_wall_time = false;
    // Root of the current-solution evaluation bank; 0 falls back to the
    // state's master seed. The bank never overlaps candidate episode seeds.
    std::uint64_t eval_bank_seed = 0;
    // When set, every candidate in a generation shares one episode seed
    // (common random weight inits) instead of per-candidate seeds.
    bool common_episode_seed = false;
    // Called after every checkpoint_every-th update with the live state and
    // the run's progress so far (curve rows, best-so-far).
    std::function<void(const EsState& state, const EvolutionResult& progress)> on_checkpoint;
    // Called once per generation with the freshly appended curve row.
    std::function<void(const CurveRow& row)> on_generation;
};

// The outer loop: sample -> evaluate candidates (parallel, deterministic
// reduction) -> evaluate the current solution on a fixed seed bank -> update.
// Candidate episode seeds derive from (master_seed, generation, index); the
// evaluation bank derives from master_seed alone and is identical across
// generations, so the curve tracks generalization over weight inits.
EvolutionResult run_evolution(EsState state, const CandidateFitnessFn& fitness,
                              const EvolutionOptions& options);

}  // namespace hebbnet
