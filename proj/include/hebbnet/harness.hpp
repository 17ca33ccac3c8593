#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hebbnet/analysis.hpp"
#include "hebbnet/config.hpp"
#include "hebbnet/es.hpp"
#include "hebbnet/rollout.hpp"

namespace hebbnet {

inline constexpr const char* kCodeVersion = "0.1.0";
// Default output root when config.output_dir is empty and this env var is
// unset.
inline constexpr const char* kOutputRootEnvVar = "HEBBNET_OUT";

std::string output_root(const ExperimentConfig& config);
std::string run_directory(const ExperimentConfig& config);  // output_root()/name

// Factories for the envs a candidate trains against: one per seen crawler
// morphology, or the single track env. Observation padding from the config
// is already applied. Unseen morphologies are never built here.
std::vector<EnvFactory> training_factories(const ExperimentConfig& config);

struct NamedEnvFactory {
    std::string morphology;
    bool seen = true;
    EnvFactory make;
};
// Everything evaluation reports on: seen factories first, then held-out
// ones.
std::vector<NamedEnvFactory> evaluation_factories(const ExperimentConfig& config);

// Candidate-fitness callback for run_evolution: decodes the candidate
// vector and averages episode fitness over the seen envs (or scores the
// analytic sphere objective directly).
CandidateFitnessFn make_fitness(const ExperimentConfig& config);

// Episode options implied by the config's rollout block.
LifetimeOptions rollout_options(const ExperimentConfig& config);

// The h vector training starts from: a fresh genome draw, or zeros on the
// sphere.
Eigen::VectorXd initial_solution(const ExperimentConfig& config);

// ---- checkpoints -------------------------------------------------------

// Versioned binary snapshot of a training run; enough to resume or to
// reproduce every later artifact.
struct TrainCheckpoint {
    ExperimentConfig config;
    EsState state;
    Eigen::VectorXd best;
    double best_eval = 0.0;
    int best_generation = -1;
    std::vector<CurveRow> curve;  // from generation 0 up to state.generation
};

void save_train_checkpoint(const std::string& path, const TrainCheckpoint& checkpoint);
// Rejects unknown format versions, checksum mismatches, and configs that no
// longer validate.
TrainCheckpoint load_train_checkpoint(const std::string& path);

// ---- manifests ----------------------------------------------------------

struct ManifestEntry {
    std::string path;  // relative to the run directory
    std::string content_hash;  // 16 hex digits
};

struct RunManifest {
    std::string name;
    std::string config_hash;  // 16 hex digits
    std::string code_version;
    std::string started_at;   // ISO 8601 UTC
    std::string finished_at;
    std::vector<ManifestEntry> outputs;      // every file the run wrote
    std::vector<std::string> checkpoints;    // subset of outputs
    std::map<std::string, double> final_metrics;
};

std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const std::string& text);

// ---- commands -----------------------------------------------------------

// Runs the evolution loop and writes config.json, curve.csv, periodic
// checkpoints, final.ckpt, best_genome.bin (policy runs), and
// manifest.json into run_directory(config). Pass a loaded checkpoint to
// continue an interrupted run; the merged curve is identical to an
// uninterrupted run's.
RunManifest cmd_train(const ExperimentConfig& config,
                      const std::optional<TrainCheckpoint>& resume = std::nullopt,
                      const std::function<void(const CurveRow&)>& progress = {});

struct EvalRow {
    std::string morphology;
    bool seen = true;
    std::string rule;
    double mean = 0.0;
    double stddev = 0.0;
    int episodes = 0;
    int diverged = 0;
    int solved_count = 0;  // episodes with fitness >= the solved threshold
    bool solved = false;   // mean >= threshold
};

struct EvaluateReport {
    std::vector<EvalRow> rows;
    std::string to_text() const;  // aligned table
    std::string to_csv() const;
};

// Rolls the solution out per morphology (seen and unseen) on a fixed seed
// bank and reports mean +- std distance with solved flags. On the sphere it
// scores the objective once.
EvaluateReport cmd_evaluate(const ExperimentConfig& config, const Eigen::VectorXd& solution,
                            int episodes = 100, std::uint64_t eval_seed = 1,
                            double solved_threshold = 100.0);

struct PerturbRequest {
    std::vector<int> freeze_at;  // non-empty selects sweep mode (exclusive)
    double zero_fraction = 0.0;  // > 0 schedules a weight-zeroing event
    int zero_at = -1;
    bool zero_contiguous = false;
    int saturate_at = -1;  // >= 0 with duration > 0 schedules action clamping
    int saturate_duration = 0;
    double saturate_value = 1.0;
    int episodes = 5;
    std::uint64_t seed = 1;
    bool record_weights = false;  // snapshot weights of the first episode
    int weight_stride = 1;
    std::string morphology;  // "" = first seen
};

struct PerturbResult {
    std::vector<SweepPoint> sweep;             // sweep mode
    std::vector<double> mean_reward;           // event mode: per-step mean over episodes
    std::vector<PerturbationLogEntry> events;  // event mode: first episode's log
    EpisodeOutcome first_episode;              // event mode: with step records
};

PerturbResult cmd_perturb(const ExperimentConfig& config, const Eigen::VectorXd& solution,
                          const PerturbRequest& request);

// Analysis exports; each returns the paths written (relative to out_dir).
std::vector<std::string> analyze_pca(const std::string& trajectory_path,
                                     const std::string& out_dir);
std::vector<std::string> analyze_histogram(const Genome& genome, const NetworkTopology& topology,
                                           int bins, const std::string& out_dir);
std::vector<std::string> analyze_frames(const std::string& trajectory_path,
                                        const NetworkTopology& topology, int row,
                                        const std::string& out_dir);

// Recovery detection on a per-step reward trace. The baseline is the moving
// average over the `window` steps before `baseline_end` (the perturbation
// onset); scanning starts once a full post-`resume_at` window is available
// (resume_at = onset for instantaneous events, onset + duration for action
// clamping). Returns the step offset after resume_at at which the trailing
// moving average is back within rel_tol of the baseline, or -1 if never.
int recovery_step(const std::vector<double>& rewards, int baseline_end, int resume_at,
                  int window = 50, double rel_tol = 0.2);

}  // namespace hebbnet
