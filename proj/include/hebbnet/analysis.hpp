#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hebbnet/episode.hpp"
#include "hebbnet/genome.hpp"
#include "hebbnet/rollout.hpp"

namespace hebbnet {

// Flattened fc weight vectors sampled over one lifetime, one row per
// recorded step.
struct WeightTrajectory {
    std::uint64_t topology_hash = 0;
    int stride = 1;
    std::vector<int> timesteps;  // strictly increasing
    Eigen::MatrixXd rows;        // T x D

    // Throws std::invalid_argument on shape mismatch or non-increasing steps.
    void validate() const;

    static WeightTrajectory from_outcome(const EpisodeOutcome& outcome,
                                         const NetworkTopology& topology, int stride);
};

// Binary trajectory file: magic/version header, topology hash, stride,
// timesteps, row-major float64 rows, trailing checksum.
void save_trajectory(const std::string& path, const WeightTrajectory& trajectory);
WeightTrajectory load_trajectory(const std::string& path);

struct PcaResult {
    Eigen::MatrixXd components;          // D x 3, orthonormal columns
    Eigen::Vector3d explained_variance;  // non-increasing, >= 0
    Eigen::MatrixXd projection;          // T x 3 (centered data onto components)
    Eigen::VectorXd mean;                // D
    double total_variance = 0.0;         // trace of the sample covariance
};

// Top-3 PCA of the trajectory via eigendecomposition of the D x D sample
// covariance, or of the T x T Gram matrix when D exceeds gram_threshold
// (recorded steps are few, weight dimensions are many). Components follow a
// deterministic sign convention: the largest-magnitude entry of each is
// positive. Requires T >= 2 and D >= 3.
PcaResult pca3(const WeightTrajectory& trajectory, int gram_threshold = 2000);

struct SweepPoint {
    int freeze_step = 0;
    double mean_fitness = 0.0;
    double std_fitness = 0.0;
};

// Mean fitness as a function of the step at which plasticity freezes; the
// reward-vs-T convergence curve. Each point evaluates `seed_bank.size()`
// episodes with a freeze_plasticity event at T.
std::vector<SweepPoint> convergence_sweep(const NetworkTopology& topology,
                                          const DecodedGenome& genome, const EnvFactory& make_env,
                                          const std::vector<int>& freeze_steps,
                                          const std::vector<EpisodeSeeds>& seed_bank,
                                          const LifetimeOptions& base_options, int workers = 1);

// Smallest sweep T such that every point at or after it stays within
// rel_tol of `reference` (the unperturbed fitness); -1 when no such point.
int plateau_onset(const std::vector<SweepPoint>& sweep, double reference, double rel_tol = 0.05);

struct HistogramResult {
    std::string coefficient_class;  // "A".."D", "eta"
    Eigen::VectorXd edges;          // bins + 1
    Eigen::VectorXi counts;         // bins; sums to the class coefficient count
};

// Per-class value histograms of a hebbian genome's plasticity coefficients.
// Only the variant's active classes are emitted.
std::vector<HistogramResult> coefficient_histogram(const Genome& genome,
                                                   const NetworkTopology& topology, int bins);

// One layer's weight matrix as a pre-neurons x post-neurons grid.
Eigen::MatrixXd weight_frame(const WeightState& snapshot, int layer);
Eigen::MatrixXd weight_frame(const Eigen::VectorXd& flat_snapshot,
                             const NetworkTopology& topology, int layer);

}  // namespace hebbnet
