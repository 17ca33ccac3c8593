#include "hebbnet/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "hebbnet/io.hpp"
#include "hebbnet/parallel.hpp"
#include "hebbnet/sphere.hpp"
#include "hebbnet/track.hpp"

namespace hebbnet {

using nlohmann::json;

namespace {

constexpr std::uint32_t kCheckpointMagic = 0x6b636268;  // "hbck"
constexpr std::uint32_t kCheckpointVersion = 1;

std::string slurp(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open " + path);
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return buffer.str();
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string iso_utc_now() {
    const std::time_t now =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string rule_label(const ExperimentConfig& config) {
    if (config.mode.kind == GenomeMode::Kind::hebbian) {
        return "hebbian/" + to_string(config.mode.variant);
    }
    return "static";
}

EnvFactory wrap_padding(EnvFactory make, const ExperimentConfig& config) {
    if (!config.pad_observations) return make;
    const int width = config.topology.input_dim;
    return [make = std::move(make), width] {
        return std::make_unique<PaddedObsEnv>(make(), width);
    };
}

}  // namespace

std::string output_root(const ExperimentConfig& config) {
    if (!config.output_dir.empty()) return config.output_dir;
    if (const char* env = std::getenv(kOutputRootEnvVar); env != nullptr && *env != '\0') {
        return env;
    }
    return "runs";
}

std::string run_directory(const ExperimentConfig& config) {
    return output_root(config) + "/" + config.name;
}

std::vector<EnvFactory> training_factories(const ExperimentConfig& config) {
    std::vector<EnvFactory> out;
    if (config.env_kind == "crawler") {
        const MorphologySet set = make_morphology_set(config.morphology_seed, config.crawler);
        for (const auto& morphology : set.seen) {
            out.push_back(wrap_padding(
                [params = config.crawler, morphology] {
                    return std::make_unique<CrawlerEnv>(params, morphology);
                },
                config));
        }
    } else if (config.env_kind == "track") {
        out.push_back([params = config.track] { return std::make_unique<TrackEnv>(params); });
    } else {
        throw std::invalid_argument("the sphere objective has no rollout env");
    }
    return out;
}

std::vector<NamedEnvFactory> evaluation_factories(const ExperimentConfig& config) {
    std::vector<NamedEnvFactory> out;
    if (config.env_kind == "crawler") {
        const MorphologySet set = make_morphology_set(config.morphology_seed, config.crawler);
        for (const auto& morphology : set.seen) {
            out.push_back({morphology.name, true,
                           wrap_padding(
                               [params = config.crawler, morphology] {
                                   return std::make_unique<CrawlerEnv>(params, morphology);
                               },
                               config)});
        }
        for (const auto& morphology : set.unseen) {
            out.push_back({morphology.name, false,
                           wrap_padding(
                               [params = config.crawler, morphology] {
                                   return std::make_unique<CrawlerEnv>(params, morphology);
                               },
                               config)});
        }
    } else if (config.env_kind == "track") {
        out.push_back({"track", true,
                       [params = config.track] { return std::make_unique<TrackEnv>(params); }});
    } else {
        throw std::invalid_argument("the sphere objective has no rollout env");
    }
    return out;
}

LifetimeOptions rollout_options(const ExperimentConfig& config) {
    LifetimeOptions options;
    options.horizon = config.horizon;
    options.update_order = config.update_order;
    options.init_distribution = config.init_distribution;
    options.floor_fitness = config.floor_fitness;
    return options;
}

Eigen::VectorXd initial_solution(const ExperimentConfig& config) {
    if (config.env_kind == "sphere") return Eigen::VectorXd::Zero(config.sphere_dim);
    return init_genome(layout_for(config.topology, config.mode), config.master_seed).values;
}

CandidateFitnessFn make_fitness(const ExperimentConfig& config) {
    if (config.env_kind == "sphere") {
        const SphereObjective objective(config.sphere_dim, config.master_seed);
        return [objective](const Eigen::VectorXd& h, std::uint64_t) { return objective(h); };
    }
    const NetworkTopology topology = config.topology;
    const GenomeLayout layout = layout_for(topology, config.mode);
    const std::vector<EnvFactory> factories = training_factories(config);
    const LifetimeOptions base = rollout_options(config);
    const int episodes = config.episodes_per_env;
    return [topology, layout, factories, base, episodes](const Eigen::VectorXd& h,
                                                         std::uint64_t episode_seed) {
        Genome genome;
        genome.values = h;
        genome.layout = layout;
        const DecodedGenome decoded = decode(genome, topology);
        return multi_env_fitness(topology, decoded, factories, episodes, episode_seed, base, 1);
    };
}

// ---- checkpoints ---------------------------------------------------------

void save_train_checkpoint(const std::string& path, const TrainCheckpoint& checkpoint) {
    checkpoint.state.validate();
    std::ostringstream body;
    io::write_u32(body, kCheckpointMagic);
    io::write_u32(body, kCheckpointVersion);
    io::write_string(body, serialize_config(checkpoint.config));
    io::write_f64_array(body, checkpoint.state.h);
    io::write_f64(body, checkpoint.state.alpha);
    io::write_f64(body, checkpoint.state.sigma);
    io::write_f64(body, checkpoint.state.alpha_decay);
    io::write_f64(body, checkpoint.state.sigma_decay);
    io::write_i32(body, checkpoint.state.population);
    io::write_u32(body, checkpoint.state.mirrored ? 1u : 0u);
    io::write_string(body, to_string(checkpoint.state.shaping));
    io::write_i32(body, checkpoint.state.generation);
    io::write_u64(body, checkpoint.state.master_seed);
    io::write_f64_array(body, checkpoint.best);
    io::write_f64(body, checkpoint.best_eval);
    io::write_i32(body, checkpoint.best_generation);
    io::write_u32(body, static_cast<std::uint32_t>(checkpoint.curve.size()));
    for (const CurveRow& row : checkpoint.curve) {
        io::write_i32(body, row.generation);
        io::write_f64(body, row.pop_mean_fitness);
        io::write_f64(body, row.pop_max_fitness);
        io::write_f64(body, row.eval_fitness_mean);
        io::write_f64(body, row.eval_fitness_std);
        io::write_f64(body, row.alpha);
        io::write_f64(body, row.sigma);
        io::write_f64(body, row.wall_time);
    }
    std::string content = body.str();
    const std::uint64_t checksum = io::fnv1a64(content.data(), content.size());
    std::ostringstream tail;
    io::write_u64(tail, checksum);
    content += tail.str();
    io::atomic_write_file(path, content);
}

TrainCheckpoint load_train_checkpoint(const std::string& path) {
    const std::string content = slurp(path);
    if (content.size() < 16) throw std::runtime_error("checkpoint truncated: " + path);
    const std::size_t body_len = content.size() - 8;

    std::istringstream in(content);
    if (io::read_u32(in) != kCheckpointMagic) {
        throw std::runtime_error("not a training checkpoint (bad magic): " + path);
    }
    const auto version = io::read_u32(in);
    if (version != kCheckpointVersion) {
        throw std::runtime_error("unsupported checkpoint format version " +
                                 std::to_string(version));
    }
    // Verify the trailer before interpreting anything else so corruption
    // anywhere in the body reads as corruption, not as a field error.
    {
        std::istringstream trailer(content.substr(body_len));
        if (io::read_u64(trailer) != io::fnv1a64(content.data(), body_len)) {
            throw std::runtime_error("checkpoint checksum mismatch: " + path);
        }
    }
    TrainCheckpoint cp;
    cp.config = parse_config(io::read_string(in));
    cp.state.h = io::read_f64_array(in);
    cp.state.alpha = io::read_f64(in);
    cp.state.sigma = io::read_f64(in);
    cp.state.alpha_decay = io::read_f64(in);
    cp.state.sigma_decay = io::read_f64(in);
    cp.state.population = io::read_i32(in);
    cp.state.mirrored = io::read_u32(in) != 0;
    cp.state.shaping = fitness_shaping_from_string(io::read_string(in));
    cp.state.generation = io::read_i32(in);
    cp.state.master_seed = io::read_u64(in);
    cp.best = io::read_f64_array(in);
    cp.best_eval = io::read_f64(in);
    cp.best_generation = io::read_i32(in);
    const auto rows = io::read_u32(in);
    if (rows > (1u << 24)) throw std::runtime_error("checkpoint curve implausibly long");
    cp.curve.resize(rows);
    for (auto& row : cp.curve) {
        row.generation = io::read_i32(in);
        row.pop_mean_fitness = io::read_f64(in);
        row.pop_max_fitness = io::read_f64(in);
        row.eval_fitness_mean = io::read_f64(in);
        row.eval_fitness_std = io::read_f64(in);
        row.alpha = io::read_f64(in);
        row.sigma = io::read_f64(in);
        row.wall_time = io::read_f64(in);
    }
    if (static_cast<std::size_t>(in.tellg()) != body_len) {
        throw std::runtime_error("checkpoint has trailing or missing data: " + path);
    }
    cp.state.validate();
    return cp;
}

// ---- manifests -------------------------------------------------------------

std::string manifest_to_json(const RunManifest& manifest) {
    json j;
    j["name"] = manifest.name;
    j["config_hash"] = manifest.config_hash;
    j["code_version"] = manifest.code_version;
    j["started_at"] = manifest.started_at;
    j["finished_at"] = manifest.finished_at;
    j["outputs"] = json::array();
    for (const auto& entry : manifest.outputs) {
        j["outputs"].push_back({{"path", entry.path}, {"content_hash", entry.content_hash}});
    }
    j["checkpoints"] = manifest.checkpoints;
    j["final_metrics"] = manifest.final_metrics;
    return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("manifest is not valid JSON: ") + e.what());
    }
    RunManifest manifest;
    manifest.name = j.at("name").get<std::string>();
    manifest.config_hash = j.at("config_hash").get<std::string>();
    manifest.code_version = j.at("code_version").get<std::string>();
    manifest.started_at = j.at("started_at").get<std::string>();
    manifest.finished_at = j.at("finished_at").get<std::string>();
    for (const auto& entry : j.at("outputs")) {
        manifest.outputs.push_back({entry.at("path").get<std::string>(),
                                    entry.at("content_hash").get<std::string>()});
    }
    for (const auto& name : j.at("checkpoints")) {
        manifest.checkpoints.push_back(name.get<std::string>());
    }
    if (j.contains("final_metrics")) {
        for (const auto& [key, value] : j["final_metrics"].items()) {
            manifest.final_metrics[key] = value.get<double>();
        }
    }
    return manifest;
}

// ---- train -----------------------------------------------------------------

namespace {

std::string curve_csv(const std::vector<CurveRow>& curve) {
    std::string out =
        "generation,pop_mean_fitness,pop_max_fitness,eval_fitness_mean,eval_fitness_std,"
        "alpha,sigma,wall_time\n";
    for (const CurveRow& row : curve) {
        out += io::csv_row({std::to_string(row.generation),
                            io::format_double(row.pop_mean_fitness),
                            io::format_double(row.pop_max_fitness),
                            io::format_double(row.eval_fitness_mean),
                            io::format_double(row.eval_fitness_std),
                            io::format_double(row.alpha), io::format_double(row.sigma),
                            io::format_double(row.wall_time)});
    }
    return out;
}

void ensure_resume_compatible(const ExperimentConfig& config, const ExperimentConfig& saved) {
    ExperimentConfig neutral = saved;
    neutral.name = config.name;
    neutral.generations = config.generations;
    neutral.checkpoint_every = config.checkpoint_every;
    neutral.workers = config.workers;
    neutral.output_dir = config.output_dir;
    neutral.record_wall_time = config.record_wall_time;
    if (!(neutral == config)) {
        throw std::invalid_argument(
            "checkpoint was trained under a different experiment identity; only name, "
            "budget.generations, budget.checkpoint_every, and execution fields may change "
            "on resume");
    }
}

struct BestSoFar {
    Eigen::VectorXd h;
    double eval = -std::numeric_limits<double>::infinity();
    int generation = -1;
};

// Earlier best wins ties, matching the uninterrupted loop's strict
// improvement rule.
BestSoFar merge_best(const BestSoFar& prior, const EvolutionResult& progress) {
    if (progress.best_generation >= 0 && progress.best_eval > prior.eval) {
        return {progress.best, progress.best_eval, progress.best_generation};
    }
    return prior;
}

}  // namespace

RunManifest cmd_train(const ExperimentConfig& config,
                      const std::optional<TrainCheckpoint>& resume,
                      const std::function<void(const CurveRow&)>& progress) {
    config.validate();
    const std::string run_dir = run_directory(config);
    std::filesystem::create_directories(run_dir);

    RunManifest manifest;
    manifest.name = config.name;
    manifest.config_hash = hex64(config_hash(config));
    manifest.code_version = kCodeVersion;
    manifest.started_at = iso_utc_now();

    EsState state;
    std::vector<CurveRow> prior_curve;
    BestSoFar prior_best;
    if (resume) {
        ensure_resume_compatible(config, resume->config);
        state = resume->state;
        prior_curve = resume->curve;
        prior_best = {resume->best, resume->best_eval, resume->best_generation};
    } else {
        state.h = initial_solution(config);
        state.alpha = config.alpha;
        state.sigma = config.sigma;
        state.alpha_decay = config.alpha_decay;
        state.sigma_decay = config.sigma_decay;
        state.population = config.population;
        state.mirrored = config.mirrored;
        state.shaping = config.shaping;
        state.master_seed = config.master_seed;
    }
    if (state.generation > config.generations) {
        throw std::invalid_argument("checkpoint is already past budget.generations (" +
                                    std::to_string(state.generation) + " > " +
                                    std::to_string(config.generations) + ")");
    }

    const CandidateFitnessFn fitness = make_fitness(config);

    EvolutionOptions options;
    options.generations = config.generations - state.generation;
    options.eval_episodes = config.eval_episodes;
    options.workers = config.workers;
    options.checkpoint_every = config.checkpoint_every;
    options.record_wall_time = config.record_wall_time;
    options.eval_bank_seed = config.eval_bank_seed;
    options.common_episode_seed = config.common_episode_seed;
    options.on_generation = progress;

    std::vector<std::string> checkpoint_files;
    options.on_checkpoint = [&](const EsState& live, const EvolutionResult& progress) {
        TrainCheckpoint cp;
        cp.config = config;
        cp.state = live;
        const BestSoFar best = merge_best(prior_best, progress);
        cp.best = best.h;
        cp.best_eval = best.eval;
        cp.best_generation = best.generation;
        cp.curve = prior_curve;
        cp.curve.insert(cp.curve.end(), progress.curve.begin(), progress.curve.end());
        char name[32];
        std::snprintf(name, sizeof name, "ckpt_%06d.bin", live.generation);
        save_train_checkpoint(run_dir + "/" + name, cp);
        checkpoint_files.push_back(name);
    };

    const EvolutionResult result = run_evolution(state, fitness, options);

    std::vector<CurveRow> curve = prior_curve;
    curve.insert(curve.end(), result.curve.begin(), result.curve.end());
    const BestSoFar best = merge_best(prior_best, result);

    const std::string config_text = serialize_config(config);
    io::atomic_write_file(run_dir + "/config.json", config_text);
    io::atomic_write_file(run_dir + "/curve.csv", curve_csv(curve));

    TrainCheckpoint final_cp;
    final_cp.config = config;
    final_cp.state = result.state;
    final_cp.best = best.generation >= 0 ? best.h : result.state.h;
    final_cp.best_eval = best.eval;
    final_cp.best_generation = best.generation;
    final_cp.curve = curve;
    save_train_checkpoint(run_dir + "/final.ckpt", final_cp);
    checkpoint_files.push_back("final.ckpt");

    std::vector<std::string> written = {"config.json", "curve.csv"};
    if (config.env_kind != "sphere") {
        Genome genome;
        genome.values = final_cp.best;
        genome.layout = layout_for(config.topology, config.mode);
        genome.seed = config.master_seed;
        genome.generation = std::max(0, best.generation);
        save_genome(run_dir + "/best_genome.bin", genome);
        written.push_back("best_genome.bin");
    }
    written.insert(written.end(), checkpoint_files.begin(), checkpoint_files.end());

    manifest.checkpoints = checkpoint_files;
    for (const std::string& rel : written) {
        const std::string bytes = slurp(run_dir + "/" + rel);
        manifest.outputs.push_back({rel, hex64(io::fnv1a64(bytes.data(), bytes.size()))});
    }
    manifest.final_metrics["generations"] = static_cast<double>(result.state.generation);
    manifest.final_metrics["final_alpha"] = result.state.alpha;
    manifest.final_metrics["final_sigma"] = result.state.sigma;
    if (best.generation >= 0 && std::isfinite(best.eval)) {
        manifest.final_metrics["best_eval_mean"] = best.eval;
        manifest.final_metrics["best_generation"] = static_cast<double>(best.generation);
    }
    if (!curve.empty()) {
        manifest.final_metrics["last_eval_mean"] = curve.back().eval_fitness_mean;
    }
    manifest.finished_at = iso_utc_now();
    io::atomic_write_file(run_dir + "/manifest.json", manifest_to_json(manifest));
    return manifest;
}

// ---- evaluate ----------------------------------------------------------------

std::string EvaluateReport::to_text() const {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%-16s %-8s %-22s %-20s %-9s %s\n", "morphology",
                  "exposure", "rule", "distance", "solved", "episodes");
    out += line;
    out += std::string(84, '-') + "\n";
    for (const EvalRow& row : rows) {
        char distance[64];
        std::snprintf(distance, sizeof distance, "%.2f +- %.2f", row.mean, row.stddev);
        char solved_text[32];
        std::snprintf(solved_text, sizeof solved_text, "%s %d/%d", row.solved ? "yes" : "no",
                      row.solved_count, row.episodes);
        std::snprintf(line, sizeof line, "%-16s %-8s %-22s %-20s %-9s %d\n",
                      row.morphology.c_str(), row.seen ? "seen" : "unseen", row.rule.c_str(),
                      distance, solved_text, row.episodes);
        out += line;
    }
    return out;
}

std::string EvaluateReport::to_csv() const {
    std::string out = "morphology,exposure,rule,distance_mean,distance_std,episodes,diverged,"
                      "solved_count,solved\n";
    for (const EvalRow& row : rows) {
        out += io::csv_row({row.morphology, row.seen ? "seen" : "unseen", row.rule,
                            io::format_double(row.mean), io::format_double(row.stddev),
                            std::to_string(row.episodes), std::to_string(row.diverged),
                            std::to_string(row.solved_count), row.solved ? "1" : "0"});
    }
    return out;
}

EvaluateReport cmd_evaluate(const ExperimentConfig& config, const Eigen::VectorXd& solution,
                            int episodes, std::uint64_t eval_seed, double solved_threshold) {
    config.validate();
    if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
    EvaluateReport report;

    if (config.env_kind == "sphere") {
        const SphereObjective objective(config.sphere_dim, config.master_seed);
        const double value = objective(solution);
        report.rows.push_back({"sphere", true, "analytic", value, 0.0, 1, 0,
                               solved(value, solved_threshold) ? 1 : 0,
                               solved(value, solved_threshold)});
        return report;
    }

    const GenomeLayout layout = layout_for(config.topology, config.mode);
    if (solution.size() != layout.total_len) {
        throw std::invalid_argument("solution length " + std::to_string(solution.size()) +
                                    " does not fit the genome layout length " +
                                    std::to_string(layout.total_len));
    }
    Genome genome;
    genome.values = solution;
    genome.layout = layout;
    genome.seed = config.master_seed;
    const DecodedGenome decoded = decode(genome, config.topology);
    const LifetimeOptions base = rollout_options(config);
    const std::string rule = rule_label(config);

    const auto factories = evaluation_factories(config);
    for (std::size_t i = 0; i < factories.size(); ++i) {
        const auto bank = make_seed_bank(eval_seed, static_cast<std::uint64_t>(i), episodes);
        const EvalStats stats =
            evaluate(config.topology, decoded, factories[i].make, bank, base, config.workers);
        int solved_count = 0;
        for (double f : stats.per_episode) {
            if (solved(f, solved_threshold)) ++solved_count;
        }
        report.rows.push_back({factories[i].morphology, factories[i].seen, rule, stats.mean,
                               stats.stddev, episodes, stats.diverged_episodes, solved_count,
                               solved(stats.mean, solved_threshold)});
    }
    return report;
}

// ---- perturb -------------------------------------------------------------------

PerturbResult cmd_perturb(const ExperimentConfig& config, const Eigen::VectorXd& solution,
                          const PerturbRequest& request) {
    config.validate();
    if (config.env_kind == "sphere") {
        throw std::invalid_argument("perturbation studies need a rollout env");
    }
    if (request.episodes < 1) throw std::invalid_argument("episodes must be >= 1");

    const GenomeLayout layout = layout_for(config.topology, config.mode);
    if (solution.size() != layout.total_len) {
        throw std::invalid_argument("solution length " + std::to_string(solution.size()) +
                                    " does not fit the genome layout length " +
                                    std::to_string(layout.total_len));
    }
    Genome genome;
    genome.values = solution;
    genome.layout = layout;
    const DecodedGenome decoded = decode(genome, config.topology);

    const auto factories = evaluation_factories(config);
    const NamedEnvFactory* chosen = &factories.front();
    if (!request.morphology.empty()) {
        chosen = nullptr;
        for (const auto& f : factories) {
            if (f.morphology == request.morphology) chosen = &f;
        }
        if (chosen == nullptr) {
            std::string known;
            for (const auto& f : factories) known += " " + f.morphology;
            throw std::invalid_argument("unknown morphology \"" + request.morphology +
                                        "\"; available:" + known);
        }
    }

    const LifetimeOptions base = rollout_options(config);
    const auto bank = make_seed_bank(request.seed, 0, request.episodes);
    PerturbResult result;

    if (!request.freeze_at.empty()) {
        if (request.zero_fraction > 0.0 || request.saturate_at >= 0) {
            throw std::invalid_argument(
                "freeze sweeps cannot be combined with other perturbations");
        }
        result.sweep = convergence_sweep(config.topology, decoded, chosen->make,
                                         request.freeze_at, bank, base, config.workers);
        return result;
    }

    PerturbationSchedule schedule;
    schedule.seed = request.seed;
    if (request.zero_fraction > 0.0) {
        if (request.zero_at < 0) {
            throw std::invalid_argument("--zero-fraction needs an onset step (--at)");
        }
        PerturbationEvent event;
        event.kind = PerturbationKind::zero_weights;
        event.at_step = request.zero_at;
        event.fraction = request.zero_fraction;
        event.contiguous = request.zero_contiguous;
        schedule.events.push_back(event);
    }
    if (request.saturate_at >= 0) {
        if (request.saturate_duration < 1) {
            throw std::invalid_argument("action clamping needs a positive duration");
        }
        PerturbationEvent event;
        event.kind = PerturbationKind::saturate_actions;
        event.at_step = request.saturate_at;
        event.duration = request.saturate_duration;
        event.value = request.saturate_value;
        schedule.events.push_back(event);
    }
    if (schedule.events.empty()) {
        throw std::invalid_argument("no perturbation requested");
    }
    std::sort(schedule.events.begin(), schedule.events.end(),
              [](const PerturbationEvent& a, const PerturbationEvent& b) {
                  return a.at_step < b.at_step;
              });
    schedule.validate();

    std::vector<EpisodeOutcome> outcomes(static_cast<std::size_t>(request.episodes));
    parallel_for(request.episodes, config.workers, [&](int e) {
        LifetimeOptions options = base;
        options.weight_seed = bank[static_cast<std::size_t>(e)].weight_seed;
        options.env_seed = bank[static_cast<std::size_t>(e)].env_seed;
        options.schedule = schedule;
        options.recording.record_steps = true;
        if (e == 0 && request.record_weights) {
            options.recording.record_weights = true;
            options.recording.weight_stride = request.weight_stride;
        }
        auto env = chosen->make();
        outcomes[static_cast<std::size_t>(e)] =
            run_lifetime(config.topology, decoded, *env, options);
    });

    std::vector<double> sum;
    std::vector<int> count;
    for (const EpisodeOutcome& outcome : outcomes) {
        for (const StepRecord& record : outcome.step_records) {
            const auto step = static_cast<std::size_t>(record.step);
            if (step >= sum.size()) {
                sum.resize(step + 1, 0.0);
                count.resize(step + 1, 0);
            }
            sum[step] += record.reward;
            count[step] += 1;
        }
    }
    result.mean_reward.resize(sum.size());
    for (std::size_t i = 0; i < sum.size(); ++i) {
        result.mean_reward[i] = count[i] > 0 ? sum[i] / count[i] : 0.0;
    }
    result.first_episode = std::move(outcomes.front());
    result.events = result.first_episode.perturbation_log;
    return result;
}

// ---- analyze -----------------------------------------------------------------

std::vector<std::string> analyze_pca(const std::string& trajectory_path,
                                     const std::string& out_dir) {
    const WeightTrajectory trajectory = load_trajectory(trajectory_path);
    const PcaResult pca = pca3(trajectory);
    std::filesystem::create_directories(out_dir);

    json j;
    j["total_variance"] = pca.total_variance;
    j["explained_variance"] = {pca.explained_variance[0], pca.explained_variance[1],
                               pca.explained_variance[2]};
    j["topology_hash"] = hex64(trajectory.topology_hash);
    j["timesteps"] = trajectory.timesteps;
    j["mean"] = std::vector<double>(pca.mean.data(), pca.mean.data() + pca.mean.size());
    j["components"] = json::array();
    for (int k = 0; k < 3; ++k) {
        j["components"].push_back(std::vector<double>(
            pca.components.col(k).data(), pca.components.col(k).data() + pca.components.rows()));
    }
    io::atomic_write_file(out_dir + "/pca.json", j.dump(2) + "\n");

    std::string csv = "step,pc1,pc2,pc3\n";
    for (Eigen::Index t = 0; t < pca.projection.rows(); ++t) {
        csv += io::csv_row({std::to_string(trajectory.timesteps[static_cast<std::size_t>(t)]),
                            io::format_double(pca.projection(t, 0)),
                            io::format_double(pca.projection(t, 1)),
                            io::format_double(pca.projection(t, 2))});
    }
    io::atomic_write_file(out_dir + "/projection.csv", csv);
    return {"pca.json", "projection.csv"};
}

std::vector<std::string> analyze_histogram(const Genome& genome, const NetworkTopology& topology,
                                           int bins, const std::string& out_dir) {
    const auto histograms = coefficient_histogram(genome, topology, bins);
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> written;
    for (const HistogramResult& h : histograms) {
        std::string csv = "bin_lo,bin_hi,count\n";
        for (int b = 0; b < h.counts.size(); ++b) {
            csv += io::csv_row({io::format_double(h.edges[b]), io::format_double(h.edges[b + 1]),
                                std::to_string(h.counts[b])});
        }
        const std::string name = "histogram_" + h.coefficient_class + ".csv";
        io::atomic_write_file(out_dir + "/" + name, csv);
        written.push_back(name);
    }
    return written;
}

std::vector<std::string> analyze_frames(const std::string& trajectory_path,
                                        const NetworkTopology& topology, int row,
                                        const std::string& out_dir) {
    const WeightTrajectory trajectory = load_trajectory(trajectory_path);
    if (trajectory.topology_hash != topology.hash()) {
        throw std::runtime_error("trajectory was recorded for a different topology");
    }
    const Eigen::Index t = trajectory.rows.rows();
    Eigen::Index r = row < 0 ? t + row : row;
    if (r < 0 || r >= t) {
        throw std::invalid_argument("row " + std::to_string(row) + " out of range for " +
                                    std::to_string(t) + " snapshots");
    }
    std::filesystem::create_directories(out_dir);

    const Eigen::VectorXd flat = trajectory.rows.row(r).transpose();
    std::vector<std::string> written;
    for (int layer = 0; layer < topology.fc_layer_count(); ++layer) {
        const Eigen::MatrixXd frame = weight_frame(flat, topology, layer);
        std::string csv;
        for (Eigen::Index i = 0; i < frame.rows(); ++i) {
            std::vector<std::string> fields;
            fields.reserve(static_cast<std::size_t>(frame.cols()));
            for (Eigen::Index c = 0; c < frame.cols(); ++c) {
                fields.push_back(io::format_double(frame(i, c)));
            }
            csv += io::csv_row(fields);
        }
        const std::string name = "frame_layer" + std::to_string(layer) + ".csv";
        io::atomic_write_file(out_dir + "/" + name, csv);
        written.push_back(name);
    }
    return written;
}

int recovery_step(const std::vector<double>& rewards, int baseline_end, int resume_at,
                  int window, double rel_tol) {
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    if (baseline_end < window) {
        throw std::invalid_argument("need " + std::to_string(window) +
                                    " pre-event steps for the baseline");
    }
    if (resume_at < baseline_end) throw std::invalid_argument("resume_at precedes the baseline");
    const int n = static_cast<int>(rewards.size());
    if (baseline_end > n) throw std::invalid_argument("baseline_end beyond the trace");

    double baseline = 0.0;
    for (int t = baseline_end - window; t < baseline_end; ++t) baseline += rewards[t];
    baseline /= window;
    const double bound = rel_tol * std::abs(baseline);

    // first step where a full window of post-resume steps exists
    for (int t = resume_at + window - 1; t < n; ++t) {
        double ma = 0.0;
        for (int k = t - window + 1; k <= t; ++k) ma += rewards[k];
        ma /= window;
        if (std::abs(ma - baseline) <= bound) return t - resume_at;
    }
    return -1;
}

}  // namespace hebbnet
