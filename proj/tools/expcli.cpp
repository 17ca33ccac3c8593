// expcli — experiment harness CLI.
//
// Subcommands: train, resume, evaluate, perturb, analyze, presets.
// All heavy lifting lives in the hebbnet library; this file is argument
// plumbing, file IO, and progress printing.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hebbnet/analysis.hpp"
#include "hebbnet/config.hpp"
#include "hebbnet/genome.hpp"
#include "hebbnet/harness.hpp"
#include "hebbnet/io.hpp"

namespace {

using namespace hebbnet;

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string describe_topology(const NetworkTopology& t) {
    std::ostringstream out;
    if (t.conv_frontend) out << "conv+";
    out << "[" << t.input_dim << " ->";
    for (int n : t.fc_layer_sizes) out << " " << n;
    out << "]";
    return out.str();
}

void print_curve_row(const CurveRow& row) {
    std::printf("gen %5d  pop mean %12.4f  max %12.4f  eval %12.4f +- %-10.4f  a %.4f  s %.4f\n",
                row.generation, row.pop_mean_fitness, row.pop_max_fitness, row.eval_fitness_mean,
                row.eval_fitness_std, row.alpha, row.sigma);
    std::fflush(stdout);
}

// The trained solution a checkpoint carries: the tracked best when one was
// recorded, otherwise the current ES mean.
Eigen::VectorXd checkpoint_solution(const TrainCheckpoint& ckpt) {
    if (ckpt.best_generation >= 0 && ckpt.best.size() > 0) return ckpt.best;
    return ckpt.state.h;
}

struct TrainArgs {
    std::string preset;
    std::string config_path;
    std::string resume_path;
    std::string name;
    std::string out_dir;
    int generations = -1;
    int population = -1;
    int workers = -1;
    int checkpoint_every = -1;
    std::int64_t master_seed = -1;
    bool quiet = false;
};

ExperimentConfig apply_train_overrides(ExperimentConfig config, const TrainArgs& args) {
    if (!args.name.empty()) config.name = args.name;
    if (!args.out_dir.empty()) config.output_dir = args.out_dir;
    if (args.generations >= 0) config.generations = args.generations;
    if (args.population >= 0) config.population = args.population;
    if (args.workers >= 0) config.workers = args.workers;
    if (args.checkpoint_every >= 0) config.checkpoint_every = args.checkpoint_every;
    if (args.master_seed >= 0) config.master_seed = static_cast<std::uint64_t>(args.master_seed);
    return config;
}

int run_training(const ExperimentConfig& config, const std::optional<TrainCheckpoint>& resume,
                 bool quiet) {
    std::function<void(const CurveRow&)> progress;
    if (!quiet) progress = print_curve_row;
    if (!quiet && resume) {
        std::printf("resuming at generation %d of %d\n", resume->state.generation,
                    config.generations);
    }
    const RunManifest manifest = cmd_train(config, resume, progress);
    const std::string run_dir = run_directory(config);
    std::printf("run complete: %s\n", run_dir.c_str());
    for (const auto& [key, value] : manifest.final_metrics) {
        std::printf("  %-18s %.6f\n", key.c_str(), value);
    }
    std::printf("  outputs: %zu files, manifest.json written\n", manifest.outputs.size());
    return 0;
}

int cli_train(const TrainArgs& args) {
    std::optional<TrainCheckpoint> resume;
    if (!args.resume_path.empty()) resume = load_train_checkpoint(args.resume_path);

    ExperimentConfig config;
    if (!args.config_path.empty()) {
        config = parse_config(read_text_file(args.config_path));
    } else if (!args.preset.empty()) {
        config = preset_config(args.preset);
    } else if (resume) {
        config = resume->config;
    } else {
        throw CLI::ValidationError("train", "pass --preset, --config, or --resume");
    }
    config = apply_train_overrides(config, args);
    return run_training(config, resume, args.quiet);
}

int cli_resume(const std::string& checkpoint_path, const TrainArgs& args) {
    TrainCheckpoint ckpt = load_train_checkpoint(checkpoint_path);
    const ExperimentConfig config = apply_train_overrides(ckpt.config, args);
    return run_training(config, ckpt, args.quiet);
}

int cli_evaluate(const std::string& checkpoint_path, int episodes, std::uint64_t seed,
                 double threshold, int workers, std::int64_t morphology_seed, int horizon,
                 const std::string& out_dir) {
    const TrainCheckpoint ckpt = load_train_checkpoint(checkpoint_path);
    ExperimentConfig config = ckpt.config;
    if (workers >= 1) config.workers = workers;
    if (morphology_seed >= 0) config.morphology_seed = static_cast<std::uint64_t>(morphology_seed);
    if (horizon >= 1) config.horizon = horizon;

    const EvaluateReport report =
        cmd_evaluate(config, checkpoint_solution(ckpt), episodes, seed, threshold);
    std::printf("%s", report.to_text().c_str());
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        const std::string path = (std::filesystem::path(out_dir) / "eval_report.csv").string();
        io::atomic_write_file(path, report.to_csv());
        std::printf("wrote %s\n", path.c_str());
    }
    return 0;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoi(item));
    }
    return out;
}

// "A:B" -> clamp actions on [A, B).
std::pair<int, int> parse_span(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw CLI::ValidationError("--saturate", "expected START:END, got '" + text + "'");
    }
    const int a = std::stoi(text.substr(0, colon));
    const int b = std::stoi(text.substr(colon + 1));
    if (b <= a) throw CLI::ValidationError("--saturate", "END must exceed START");
    return {a, b};
}

std::string sweep_csv(const std::vector<SweepPoint>& sweep) {
    std::string out = "freeze_step,mean_fitness,std_fitness\n";
    for (const auto& p : sweep) {
        out += io::csv_row({std::to_string(p.freeze_step), io::format_double(p.mean_fitness),
                            io::format_double(p.std_fitness)});
    }
    return out;
}

// Per-step trace: mean reward over episodes, an event marker column, and the
// first episode's actions (so action clamping is visible in the file).
std::string trace_csv(const PerturbResult& result, const PerturbRequest& request) {
    const auto& steps = result.first_episode.step_records;
    const int action_dim = steps.empty() ? 0 : static_cast<int>(steps.front().action.size());

    std::map<int, std::string> marker;
    auto mark = [&](int step, const std::string& label) {
        auto [it, inserted] = marker.emplace(step, label);
        if (!inserted && it->second.find(label) == std::string::npos) it->second += "+" + label;
    };
    for (const auto& entry : result.events) {
        mark(entry.step, to_string(entry.kind));
        if (entry.kind == PerturbationKind::saturate_actions) {
            for (int s = entry.step + 1; s < entry.step + request.saturate_duration; ++s) {
                mark(s, to_string(entry.kind));
            }
        }
    }

    std::vector<std::string> header = {"step", "reward_mean", "event"};
    for (int a = 0; a < action_dim; ++a) header.push_back("a" + std::to_string(a));
    std::string out = io::csv_row(header);

    const int n = static_cast<int>(result.mean_reward.size());
    for (int step = 0; step < n; ++step) {
        std::vector<std::string> row = {std::to_string(step),
                                        io::format_double(result.mean_reward[step])};
        const auto it = marker.find(step);
        row.push_back(it == marker.end() ? "" : it->second);
        if (step < static_cast<int>(steps.size())) {
            for (int a = 0; a < action_dim; ++a) {
                row.push_back(io::format_double(steps[step].action[a]));
            }
        } else {
            for (int a = 0; a < action_dim; ++a) row.push_back("");
        }
        out += io::csv_row(row);
    }
    return out;
}

int cli_perturb(const std::string& checkpoint_path, const PerturbRequest& request,
                const std::string& out_dir, int workers, int horizon) {
    const TrainCheckpoint ckpt = load_train_checkpoint(checkpoint_path);
    ExperimentConfig config = ckpt.config;
    if (workers >= 1) config.workers = workers;
    if (horizon >= 1) config.horizon = horizon;

    const PerturbResult result = cmd_perturb(config, checkpoint_solution(ckpt), request);
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path out(out_dir);

    if (!request.freeze_at.empty()) {
        const std::string path = (out / "sweep.csv").string();
        io::atomic_write_file(path, sweep_csv(result.sweep));
        std::printf("wrote %s (%zu points)\n", path.c_str(), result.sweep.size());
        for (const auto& p : result.sweep) {
            std::printf("  freeze %5d  fitness %10.3f +- %.3f\n", p.freeze_step, p.mean_fitness,
                        p.std_fitness);
        }
        return 0;
    }

    const std::string path = (out / "trace.csv").string();
    io::atomic_write_file(path, trace_csv(result, request));
    std::printf("wrote %s (%zu steps, %zu events)\n", path.c_str(), result.mean_reward.size(),
                result.events.size());
    for (const auto& entry : result.events) {
        std::printf("  step %5d  %s", entry.step, to_string(entry.kind).c_str());
        if (entry.kind == PerturbationKind::zero_weights) {
            std::printf("  (%d weights zeroed)", entry.zeroed_count);
        }
        std::printf("\n");
    }
    if (request.record_weights) {
        const WeightTrajectory trajectory = WeightTrajectory::from_outcome(
            result.first_episode, config.topology, request.weight_stride);
        const std::string traj_path = (out / "trajectory.bin").string();
        save_trajectory(traj_path, trajectory);
        std::printf("wrote %s (%ld snapshots of %ld weights)\n", traj_path.c_str(),
                    static_cast<long>(trajectory.rows.rows()),
                    static_cast<long>(trajectory.rows.cols()));
    }
    return 0;
}

int cli_analyze_pca(const std::string& trajectory_path, const std::string& out_dir) {
    for (const auto& path : analyze_pca(trajectory_path, out_dir)) {
        std::printf("wrote %s\n", (std::filesystem::path(out_dir) / path).string().c_str());
    }
    return 0;
}

int cli_analyze_histogram(const std::string& checkpoint_path, int bins,
                          const std::string& out_dir) {
    const TrainCheckpoint ckpt = load_train_checkpoint(checkpoint_path);
    Genome genome;
    genome.values = checkpoint_solution(ckpt);
    genome.layout = layout_for(ckpt.config.topology, ckpt.config.mode);
    genome.seed = ckpt.config.master_seed;
    genome.generation = std::max(0, ckpt.best_generation);
    for (const auto& path : analyze_histogram(genome, ckpt.config.topology, bins, out_dir)) {
        std::printf("wrote %s\n", (std::filesystem::path(out_dir) / path).string().c_str());
    }
    return 0;
}

int cli_analyze_frames(const std::string& trajectory_path, const std::string& checkpoint_path,
                       int row, const std::string& out_dir) {
    const TrainCheckpoint ckpt = load_train_checkpoint(checkpoint_path);
    for (const auto& path : analyze_frames(trajectory_path, ckpt.config.topology, row, out_dir)) {
        std::printf("wrote %s\n", (std::filesystem::path(out_dir) / path).string().c_str());
    }
    return 0;
}

int cli_presets() {
    for (const auto& name : preset_names()) {
        const ExperimentConfig config = preset_config(name);
        std::printf("%-18s %-8s %-28s pop %-5d gens %-5d %s\n", name.c_str(),
                    config.env_kind.c_str(), describe_topology(config.topology).c_str(),
                    config.population, config.generations, to_string(config.mode).c_str());
    }
    std::printf("\noutput root: --out, else $%s, else ./runs\n", kOutputRootEnvVar);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hebbnet experiment harness: evolve plastic policy networks and analyze them"};
    app.require_subcommand(1);

    // ---- train ----
    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "run an evolution-strategy training loop");
    auto* preset_opt = train->add_option("--preset", train_args.preset, "named built-in config");
    train->add_option("--config", train_args.config_path, "config JSON file")
        ->excludes(preset_opt)
        ->check(CLI::ExistingFile);
    train->add_option("--resume", train_args.resume_path, "checkpoint to continue from")
        ->check(CLI::ExistingFile);
    train->add_option("--name", train_args.name, "run label (output dir component)");
    train->add_option("--generations", train_args.generations, "total generation budget");
    train->add_option("--population", train_args.population, "candidates per generation");
    train->add_option("--workers", train_args.workers, "evaluation threads");
    train->add_option("--checkpoint-every", train_args.checkpoint_every,
                      "generations between checkpoints (0 = final only)");
    train->add_option("--master-seed", train_args.master_seed, "run master seed");
    train->add_option("--out", train_args.out_dir, "output root directory");
    train->add_flag("--quiet", train_args.quiet, "suppress per-generation progress");

    // ---- resume ----
    std::string resume_ckpt;
    TrainArgs resume_args;
    auto* resume = app.add_subcommand("resume", "continue training from a checkpoint");
    resume->add_option("checkpoint", resume_ckpt, "checkpoint file")
        ->required()
        ->check(CLI::ExistingFile);
    resume->add_option("--generations", resume_args.generations,
                       "new total generation budget (not an increment)");
    resume->add_option("--workers", resume_args.workers, "evaluation threads");
    resume->add_option("--out", resume_args.out_dir, "output root directory");
    resume->add_flag("--quiet", resume_args.quiet, "suppress per-generation progress");

    // ---- evaluate ----
    std::string eval_ckpt, eval_out;
    int eval_episodes = 100, eval_workers = -1, eval_horizon = -1;
    std::uint64_t eval_seed = 1;
    std::int64_t eval_morph_seed = -1;
    double eval_threshold = 100.0;
    auto* evaluate = app.add_subcommand("evaluate", "score a trained solution per morphology");
    evaluate->add_option("--checkpoint", eval_ckpt, "training checkpoint")
        ->required()
        ->check(CLI::ExistingFile);
    evaluate->add_option("--episodes", eval_episodes, "rollouts per morphology");
    evaluate->add_option("--seed", eval_seed, "evaluation seed bank root");
    evaluate->add_option("--threshold", eval_threshold, "solved threshold on episode fitness");
    evaluate->add_option("--workers", eval_workers, "evaluation threads");
    evaluate->add_option("--morphology-seed", eval_morph_seed, "override morphology draw");
    evaluate->add_option("--horizon", eval_horizon, "override episode length");
    evaluate->add_option("--out", eval_out, "also write eval_report.csv here");

    // ---- perturb ----
    std::string perturb_ckpt, perturb_out = ".", freeze_list, saturate_span;
    PerturbRequest request;
    int perturb_workers = -1, perturb_horizon = -1;
    auto* perturb = app.add_subcommand("perturb", "mid-episode perturbation studies");
    perturb->add_option("--checkpoint", perturb_ckpt, "training checkpoint")
        ->required()
        ->check(CLI::ExistingFile);
    perturb->add_option("--freeze-at", freeze_list,
                        "comma list of steps; sweeps plasticity freezing (exclusive mode)");
    perturb->add_option("--zero-fraction", request.zero_fraction,
                        "fraction of weights to zero at --at");
    perturb->add_option("--at", request.zero_at, "step of the weight-zeroing event");
    perturb->add_flag("--contiguous", request.zero_contiguous,
                      "zero a contiguous band instead of a uniform draw");
    perturb->add_option("--saturate", saturate_span, "clamp actions on START:END");
    perturb->add_option("--value", request.saturate_value, "clamped action value");
    perturb->add_option("--episodes", request.episodes, "episodes to average");
    perturb->add_option("--seed", request.seed, "episode seed bank root");
    perturb->add_option("--morphology", request.morphology, "morphology name ('' = first seen)");
    perturb->add_flag("--record-weights", request.record_weights,
                      "save the first episode's weight trajectory");
    perturb->add_option("--stride", request.weight_stride, "snapshot every k-th step");
    perturb->add_option("--workers", perturb_workers, "evaluation threads");
    perturb->add_option("--horizon", perturb_horizon, "override episode length");
    perturb->add_option("--out", perturb_out, "output directory");

    // ---- analyze ----
    auto* analyze = app.add_subcommand("analyze", "export analysis artifacts");
    analyze->require_subcommand(1);
    std::string pca_traj, pca_out = ".";
    auto* pca = analyze->add_subcommand("pca", "top-3 principal components of a trajectory");
    pca->add_option("--trajectory", pca_traj, "recorded weight trajectory")
        ->required()
        ->check(CLI::ExistingFile);
    pca->add_option("--out", pca_out, "output directory");

    std::string hist_ckpt, hist_out = ".";
    int hist_bins = 50;
    auto* hist = analyze->add_subcommand("histogram", "per-class coefficient histograms");
    hist->add_option("--checkpoint", hist_ckpt, "training checkpoint")
        ->required()
        ->check(CLI::ExistingFile);
    hist->add_option("--bins", hist_bins, "histogram bins");
    hist->add_option("--out", hist_out, "output directory");

    std::string frames_traj, frames_ckpt, frames_out = ".";
    int frames_row = -1;
    auto* frames = analyze->add_subcommand("frames", "per-layer weight grids at one snapshot");
    frames->add_option("--trajectory", frames_traj, "recorded weight trajectory")
        ->required()
        ->check(CLI::ExistingFile);
    frames->add_option("--checkpoint", frames_ckpt, "checkpoint carrying the topology")
        ->required()
        ->check(CLI::ExistingFile);
    frames->add_option("--row", frames_row, "snapshot index (negative counts from the end)");
    frames->add_option("--out", frames_out, "output directory");

    // ---- presets ----
    app.add_subcommand("presets", "list built-in configurations");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("train")) return cli_train(train_args);
        if (app.got_subcommand("resume")) return cli_resume(resume_ckpt, resume_args);
        if (app.got_subcommand("evaluate")) {
            return cli_evaluate(eval_ckpt, eval_episodes, eval_seed, eval_threshold, eval_workers,
                                eval_morph_seed, eval_horizon, eval_out);
        }
        if (app.got_subcommand("perturb")) {
            if (!freeze_list.empty()) request.freeze_at = parse_int_list(freeze_list);
            if (!saturate_span.empty()) {
                const auto [start, end] = parse_span(saturate_span);
                request.saturate_at = start;
                request.saturate_duration = end - start;
            }
            return cli_perturb(perturb_ckpt, request, perturb_out, perturb_workers,
                               perturb_horizon);
        }
        if (app.got_subcommand("analyze")) {
            if (analyze->got_subcommand("pca")) return cli_analyze_pca(pca_traj, pca_out);
            if (analyze->got_subcommand("histogram")) {
                return cli_analyze_histogram(hist_ckpt, hist_bins, hist_out);
            }
            if (analyze->got_subcommand("frames")) {
                return cli_analyze_frames(frames_traj, frames_ckpt, frames_row, frames_out);
            }
        }
        if (app.got_subcommand("presets")) return cli_presets();
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
