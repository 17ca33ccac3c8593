#include "hebbnet/config.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

#include "hebbnet/io.hpp"

namespace hebbnet {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::invalid_argument("config field " + path + ": " + what);
}

void require(bool ok, const std::string& path, const std::string& what) {
    if (!ok) fail(path, what);
}

}  // namespace

int ExperimentConfig::env_obs_dim() const {
    if (env_kind == "crawler") return crawler.legs + 3;
    if (env_kind == "track") return track.channels * track.patch * track.patch;
    return sphere_dim;
}

int ExperimentConfig::env_action_dim() const {
    if (env_kind == "crawler") return crawler.legs;
    if (env_kind == "track") return 3;
    return sphere_dim;
}

void ExperimentConfig::validate() const {
    require(!name.empty(), "name", "must be non-empty");
    require(name.find('/') == std::string::npos && name.find('\\') == std::string::npos, "name",
            "must not contain path separators");
    require(env_kind == "crawler" || env_kind == "track" || env_kind == "sphere", "env.kind",
            "must be one of crawler | track | sphere, got \"" + env_kind + "\"");

    require(population >= 1, "es.population", "must be >= 1");
    if (mirrored) {
        require(population >= 2 && population % 2 == 0, "es.population",
                "mirrored sampling needs an even population >= 2");
    }
    require(alpha > 0.0, "es.alpha", "must be > 0");
    require(sigma > 0.0, "es.sigma", "must be > 0");
    require(alpha_decay > 0.0 && alpha_decay <= 1.0, "es.alpha_decay", "must be in (0, 1]");
    require(sigma_decay > 0.0 && sigma_decay <= 1.0, "es.sigma_decay", "must be in (0, 1]");

    require(generations >= 0, "budget.generations", "must be >= 0");
    require(episodes_per_env >= 1, "budget.episodes_per_env", "must be >= 1");
    require(eval_episodes >= 1, "budget.eval_episodes", "must be >= 1");
    require(checkpoint_every >= 0, "budget.checkpoint_every", "must be >= 0");

    require(horizon >= 1, "rollout.horizon", "must be >= 1");
    require(workers >= 1, "execution.workers", "must be >= 1");

    if (env_kind == "sphere") {
        require(sphere_dim >= 1, "env.sphere_dim", "must be >= 1");
        return;  // the analytic objective bypasses topology and genome
    }

    try {
        topology.validate();
    } catch (const std::invalid_argument& e) {
        fail("topology", e.what());
    }
    try {
        layout_for(topology, mode);
    } catch (const std::invalid_argument& e) {
        fail("genome", e.what());
    }

    if (env_kind == "crawler") {
        require(crawler.legs >= 1, "env.crawler.legs", "must be >= 1");
        require(crawler.energy_cost >= 0.0, "env.crawler.energy_cost", "must be >= 0");
        require(crawler.smoothing > 0.0 && crawler.smoothing <= 1.0, "env.crawler.smoothing",
                "must be in (0, 1]");
        require(crawler.phase_period >= 1, "env.crawler.phase_period", "must be >= 1");
        require(crawler.damage_severity >= 0.0 && crawler.damage_severity <= 1.0,
                "env.crawler.damage_severity", "must be in [0, 1]");
        require(crawler.episode_steps >= 1, "env.crawler.episode_steps", "must be >= 1");
        require(!topology.conv_frontend, "topology.conv",
                "crawler observations are flat; a conv frontend cannot consume them");
    } else {  // track
        require(track.patch >= 4, "env.track.patch", "must be >= 4");
        require(track.channels == 1 || track.channels == 3, "env.track.channels",
                "must be 1 or 3");
        require(track.min_width >= 4 && track.min_width <= track.max_width,
                "env.track.min_width", "needs 4 <= min_width <= max_width");
        require(track.min_height >= 4 && track.min_height <= track.max_height,
                "env.track.min_height", "needs 4 <= min_height <= max_height");
        require(track.bumps >= 0, "env.track.bumps", "must be >= 0");
        require(track.max_bump_depth >= 0, "env.track.max_bump_depth", "must be >= 0");
        require(track.cell > 0.0, "env.track.cell", "must be > 0");
        require(track.episode_steps >= 1, "env.track.episode_steps", "must be >= 1");
        require(topology.conv_frontend.has_value(), "topology.conv",
                "track observations are images; the topology needs a conv frontend");
    }

    if (topology.conv_frontend) {
        const auto& conv = *topology.conv_frontend;
        require(conv.in_channels == track.channels, "env.track.channels",
                "conv frontend expects " + std::to_string(conv.in_channels) + " channels");
        require(conv.in_height == track.patch && conv.in_width == track.patch,
                "env.track.patch",
                "conv frontend expects " + std::to_string(conv.in_height) + "x" +
                    std::to_string(conv.in_width) + " input");
        require(!pad_observations, "env.pad_observations",
                "padding applies to flat observations only");
    } else {
        const int native = env_obs_dim();
        if (pad_observations) {
            require(native <= topology.input_dim, "env.pad_observations",
                    "env produces " + std::to_string(native) +
                        " values, more than the input layer's " +
                        std::to_string(topology.input_dim));
        } else {
            require(native == topology.input_dim, "topology.input_dim",
                    "must match the env observation width " + std::to_string(native) +
                        " (or set env.pad_observations)");
        }
    }

    require(topology.action_dim() == env_action_dim(), "topology.fc_layers",
            "final layer width " + std::to_string(topology.action_dim()) +
                " must match the env action width " + std::to_string(env_action_dim()));
}

std::vector<std::string> preset_names() {
    return {"desk-crawler", "desk-track", "paper-quadruped", "paper-vision", "sphere-smoke"};
}

ExperimentConfig preset_config(const std::string& name) {
    ExperimentConfig c;
    c.name = name;
    if (name == "desk-crawler") {
        c.topology.input_dim = 7;
        c.topology.fc_layer_sizes = {16, 8, 4};
        c.topology.normalization = WeightNorm::layer_max_abs;
        c.mode = GenomeMode::hebbian(PlasticityVariant::ABCD_plus_eta);
        c.env_kind = "crawler";
        c.population = 100;
        c.generations = 300;
        c.checkpoint_every = 50;
    } else if (name == "desk-track") {
        ConvFrontendSpec conv;
        conv.in_channels = 1;
        conv.in_height = 16;
        conv.in_width = 16;
        conv.layers = {{.in_channels = 1,
                        .out_channels = 4,
                        .kernel = 3,
                        .stride = 1,
                        .pool_window = 2,
                        .pool_stride = 2}};
        c.topology.conv_frontend = conv;
        c.topology.input_dim = conv.flattened_output_dim();  // 4 * 7 * 7 = 196
        c.topology.fc_layer_sizes = {32, 3};
        c.topology.normalization = WeightNorm::layer_max_abs;
        c.mode = GenomeMode::hebbian(PlasticityVariant::ABCD_plus_eta);
        c.env_kind = "track";
        c.track.patch = 16;
        c.track.channels = 1;
        c.population = 100;
        c.generations = 300;
        c.checkpoint_every = 50;
    } else if (name == "paper-quadruped") {
        // 8-actuator crawler analogue driving the full-size net; the narrow
        // observation is zero-padded up to the 28-wide input layer.
        c.topology = quadruped_topology();
        c.mode = GenomeMode::hebbian(PlasticityVariant::ABCD_plus_eta);
        c.env_kind = "crawler";
        c.crawler.legs = 8;
        c.pad_observations = true;
        c.population = 500;
        c.generations = 300;
        c.checkpoint_every = 25;
    } else if (name == "paper-vision") {
        c.topology = vision_topology();
        c.mode = GenomeMode::hebbian(PlasticityVariant::ABCD_plus_eta);
        c.env_kind = "track";
        c.track.patch = 84;
        c.track.channels = 3;
        c.population = 200;
        c.generations = 300;
        c.checkpoint_every = 25;
    } else if (name == "sphere-smoke") {
        c.env_kind = "sphere";
        c.sphere_dim = 10;
        c.population = 100;
        c.generations = 40;
        c.eval_episodes = 1;
        c.checkpoint_every = 0;
        c.master_seed = 7;
    } else {
        throw std::invalid_argument("unknown preset \"" + name + "\"");
    }
    c.validate();
    return c;
}

namespace {

// ---- parsing ---------------------------------------------------------

double as_double(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
}

std::uint64_t as_u64(const json& v, const std::string& path) {
    if (!(v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0))) {
        fail(path, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

bool as_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) fail(path, "expected true or false");
    return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

template <typename FromString, typename T>
void parse_enum(const json& v, const std::string& path, FromString from_string, T& out) {
    const std::string s = as_string(v, path);
    try {
        out = from_string(s);
    } catch (const std::exception& e) {
        fail(path, e.what());
    }
}

void parse_topology(const json& obj, const std::string& path, NetworkTopology& out) {
    for (const auto& [key, value] : obj.items()) {
        const std::string p = path + "." + key;
        if (key == "input_dim") {
            out.input_dim = as_int(value, p);
        } else if (key == "fc_layers") {
            // Empty is tolerated here; envs that need a network reject it in
            // validate() with a topology.* path.
            if (!value.is_array()) fail(p, "expected an array");
            out.fc_layer_sizes.clear();
            for (std::size_t i = 0; i < value.size(); ++i) {
                out.fc_layer_sizes.push_back(as_int(value[i], p + "[" + std::to_string(i) + "]"));
            }
        } else if (key == "normalization") {
            parse_enum(value, p, weight_norm_from_string, out.normalization);
        } else if (key == "conv") {
            if (value.is_null()) {
                out.conv_frontend.reset();
                continue;
            }
            if (!value.is_object()) fail(p, "expected an object or null");
            ConvFrontendSpec conv;
            for (const auto& [ckey, cval] : value.items()) {
                const std::string cp = p + "." + ckey;
                if (ckey == "in_channels") conv.in_channels = as_int(cval, cp);
                else if (ckey == "in_height") conv.in_height = as_int(cval, cp);
                else if (ckey == "in_width") conv.in_width = as_int(cval, cp);
                else if (ckey == "layers") {
                    if (!cval.is_array() || cval.empty()) fail(cp, "expected a non-empty array");
                    conv.layers.clear();
                    for (std::size_t i = 0; i < cval.size(); ++i) {
                        const std::string lp = cp + "[" + std::to_string(i) + "]";
                        if (!cval[i].is_object()) fail(lp, "expected an object");
                        ConvLayerSpec layer;
                        for (const auto& [lkey, lval] : cval[i].items()) {
                            const std::string fp = lp + "." + lkey;
                            if (lkey == "out_channels") layer.out_channels = as_int(lval, fp);
                            else if (lkey == "kernel") layer.kernel = as_int(lval, fp);
                            else if (lkey == "stride") layer.stride = as_int(lval, fp);
                            else if (lkey == "pool_window") layer.pool_window = as_int(lval, fp);
                            else if (lkey == "pool_stride") layer.pool_stride = as_int(lval, fp);
                            else fail(fp, "unknown field");
                        }
                        conv.layers.push_back(layer);
                    }
                } else {
                    fail(cp, "unknown field");
                }
            }
            // per-layer input channels chain from the frontend input
            int chan = conv.in_channels;
            for (auto& layer : conv.layers) {
                layer.in_channels = chan;
                chan = layer.out_channels;
            }
            out.conv_frontend = conv;
        } else {
            fail(p, "unknown field");
        }
    }
}

void parse_genome(const json& obj, const std::string& path, GenomeMode& out) {
    std::string kind = out.kind == GenomeMode::Kind::hebbian ? "hebbian" : "static";
    if (obj.contains("kind")) kind = as_string(obj["kind"], path + ".kind");
    if (kind == "hebbian") out.kind = GenomeMode::Kind::hebbian;
    else if (kind == "static") out.kind = GenomeMode::Kind::static_weights;
    else fail(path + ".kind", "must be hebbian or static");

    for (const auto& [key, value] : obj.items()) {
        const std::string p = path + "." + key;
        if (key == "kind") continue;
        if (key == "variant") {
            require(out.kind == GenomeMode::Kind::hebbian, p, "only hebbian genomes have one");
            parse_enum(value, p, variant_from_string, out.variant);
        } else if (key == "coevolve_init") {
            require(out.kind == GenomeMode::Kind::hebbian, p, "only hebbian genomes have one");
            out.coevolve_init = as_bool(value, p);
        } else {
            fail(p, "unknown field");
        }
    }
    if (out.kind == GenomeMode::Kind::static_weights) {
        out = GenomeMode::static_weights();
    }
}

void parse_crawler(const json& obj, const std::string& path, CrawlerParams& out) {
    for (const auto& [key, value] : obj.items()) {
        const std::string p = path + "." + key;
        if (key == "legs") out.legs = as_int(value, p);
        else if (key == "energy_cost") out.energy_cost = as_double(value, p);
        else if (key == "smoothing") out.smoothing = as_double(value, p);
        else if (key == "phase_period") out.phase_period = as_int(value, p);
        else if (key == "damage_severity") out.damage_severity = as_double(value, p);
        else if (key == "episode_steps") out.episode_steps = as_int(value, p);
        else if (key == "polarity_flips") out.polarity_flips = as_bool(value, p);
        else fail(p, "unknown field");
    }
}

void parse_track(const json& obj, const std::string& path, TrackParams& out) {
    for (const auto& [key, value] : obj.items()) {
        const std::string p = path + "." + key;
        if (key == "min_width") out.min_width = as_int(value, p);
        else if (key == "max_width") out.max_width = as_int(value, p);
        else if (key == "min_height") out.min_height = as_int(value, p);
        else if (key == "max_height") out.max_height = as_int(value, p);
        else if (key == "bumps") out.bumps = as_int(value, p);
        else if (key == "max_bump_depth") out.max_bump_depth = as_int(value, p);
        else if (key == "patch") out.patch = as_int(value, p);
        else if (key == "channels") out.channels = as_int(value, p);
        else if (key == "cell") out.cell = as_double(value, p);
        else if (key == "episode_steps") out.episode_steps = as_int(value, p);
        else fail(p, "unknown field");
    }
}

void parse_env(const json& obj, const std::string& path, ExperimentConfig& out) {
    if (obj.contains("kind")) out.env_kind = as_string(obj["kind"], path + ".kind");
    for (const auto& [key, value] : obj.items()) {
        const std::string p = path + "." + key;
        if (key == "kind") continue;
        if (key == "crawler") {
            require(out.env_kind == "crawler", p, "present but env.kind is " + out.env_kind);
            if (!value.is_object()) fail(p, "expected an object");
            parse_crawler(value, p, out.crawler);
        } else if (key == "track") {
            require(out.env_kind == "track", p, "present but env.kind is " + out.env_kind);
            if (!value.is_object()) fail(p, "expected an object");
            parse_track(value, p, out.track);
        } else if (key == "sphere_dim") {
            require(out.env_kind == "sphere", p, "present but env.kind is " + out.env_kind);
            out.sphere_dim = as_int(value, p);
        } else if (key == "morphology_seed") {
            out.morphology_seed = as_u64(value, p);
        } else if (key == "pad_observations") {
            out.pad_observations = as_bool(value, p);
        } else {
            fail(p, "unknown field");
        }
    }
}

void parse_es(const json& obj, const std::string& path, ExperimentConfig& out) {
    for (const auto& [key, value] : obj.items()) {
        const std::string p = path + "." + key;
        if (key == "population") out.population = as_int(value, p);
        else if (key == "alpha") out.alpha = as_double(value, p);
        else if (key == "sigma") out.sigma = as_double(value, p);
        else if (key == "alpha_decay") out.alpha_decay = as_double(value, p);
        else if (key == "sigma_decay") out.sigma_decay = as_double(value, p);
        else if (key == "mirrored") out.mirrored = as_bool(value, p);
        else if (key == "shaping") parse_enum(value, p, fitness_shaping_from_string, out.shaping);
        else fail(p, "unknown field");
    }
}

void parse_budget(const json& obj, const std::string& path, ExperimentConfig& out) {
    for (const auto& [key, value] : obj.items()) {
        const std::string p = path + "." + key;
        if (key == "generations") out.generations = as_int(value, p);
        else if (key == "episodes_per_env") out.episodes_per_env = as_int(value, p);
        else if (key == "eval_episodes") out.eval_episodes = as_int(value, p);
        else if (key == "checkpoint_every") out.checkpoint_every = as_int(value, p);
        else fail(p, "unknown field");
    }
}

void parse_seeds(const json& obj, const std::string& path, ExperimentConfig& out) {
    for (const auto& [key, value] : obj.items()) {
        const std::string p = path + "." + key;
        if (key == "master") out.master_seed = as_u64(value, p);
        else if (key == "eval_bank") out.eval_bank_seed = as_u64(value, p);
        else fail(p, "unknown field");
    }
}

void parse_rollout(const json& obj, const std::string& path, ExperimentConfig& out) {
    for (const auto& [key, value] : obj.items()) {
        const std::string p = path + "." + key;
        if (key == "horizon") out.horizon = as_int(value, p);
        else if (key == "update_order") parse_enum(value, p, update_order_from_string, out.update_order);
        else if (key == "init_distribution")
            parse_enum(value, p, init_distribution_from_string, out.init_distribution);
        else if (key == "floor_fitness") out.floor_fitness = as_double(value, p);
        else fail(p, "unknown field");
    }
}

void parse_execution(const json& obj, const std::string& path, ExperimentConfig& out) {
    for (const auto& [key, value] : obj.items()) {
        const std::string p = path + "." + key;
        if (key == "workers") out.workers = as_int(value, p);
        else if (key == "record_wall_time") out.record_wall_time = as_bool(value, p);
        else if (key == "common_episode_seed") out.common_episode_seed = as_bool(value, p);
        else if (key == "output_dir") out.output_dir = as_string(value, p);
        else fail(p, "unknown field");
    }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw std::invalid_argument("config must be a JSON object");

    ExperimentConfig out;
    if (root.contains("preset")) {
        out = preset_config(as_string(root["preset"], "preset"));
    }

    for (const auto& [key, value] : root.items()) {
        if (key == "preset") continue;
        if (key == "name") {
            out.name = as_string(value, "name");
        } else if (key == "topology") {
            if (!value.is_object()) fail("topology", "expected an object");
            parse_topology(value, "topology", out.topology);
        } else if (key == "genome") {
            if (!value.is_object()) fail("genome", "expected an object");
            parse_genome(value, "genome", out.mode);
        } else if (key == "env") {
            if (!value.is_object()) fail("env", "expected an object");
            parse_env(value, "env", out);
        } else if (key == "es") {
            if (!value.is_object()) fail("es", "expected an object");
            parse_es(value, "es", out);
        } else if (key == "budget") {
            if (!value.is_object()) fail("budget", "expected an object");
            parse_budget(value, "budget", out);
        } else if (key == "seeds") {
            if (!value.is_object()) fail("seeds", "expected an object");
            parse_seeds(value, "seeds", out);
        } else if (key == "rollout") {
            if (!value.is_object()) fail("rollout", "expected an object");
            parse_rollout(value, "rollout", out);
        } else if (key == "execution") {
            if (!value.is_object()) fail("execution", "expected an object");
            parse_execution(value, "execution", out);
        } else {
            fail(key, "unknown field");
        }
    }
    out.validate();
    return out;
}

std::string serialize_config(const ExperimentConfig& config) {
    json root;
    root["name"] = config.name;

    json topo;
    topo["input_dim"] = config.topology.input_dim;
    topo["fc_layers"] = config.topology.fc_layer_sizes;
    topo["normalization"] = to_string(config.topology.normalization);
    if (config.topology.conv_frontend) {
        const auto& conv = *config.topology.conv_frontend;
        json c;
        c["in_channels"] = conv.in_channels;
        c["in_height"] = conv.in_height;
        c["in_width"] = conv.in_width;
        c["layers"] = json::array();
        for (const auto& layer : conv.layers) {
            c["layers"].push_back({{"out_channels", layer.out_channels},
                                   {"kernel", layer.kernel},
                                   {"stride", layer.stride},
                                   {"pool_window", layer.pool_window},
                                   {"pool_stride", layer.pool_stride}});
        }
        topo["conv"] = c;
    }
    root["topology"] = topo;

    json genome;
    if (config.mode.kind == GenomeMode::Kind::hebbian) {
        genome["kind"] = "hebbian";
        genome["variant"] = to_string(config.mode.variant);
        genome["coevolve_init"] = config.mode.coevolve_init;
    } else {
        genome["kind"] = "static";
    }
    root["genome"] = genome;

    json env;
    env["kind"] = config.env_kind;
    if (config.env_kind == "crawler") {
        env["crawler"] = {{"legs", config.crawler.legs},
                          {"energy_cost", config.crawler.energy_cost},
                          {"smoothing", config.crawler.smoothing},
                          {"phase_period", config.crawler.phase_period},
                          {"damage_severity", config.crawler.damage_severity},
                          {"episode_steps", config.crawler.episode_steps},
                          {"polarity_flips", config.crawler.polarity_flips}};
        env["morphology_seed"] = config.morphology_seed;
    } else if (config.env_kind == "track") {
        env["track"] = {{"min_width", config.track.min_width},
                        {"max_width", config.track.max_width},
                        {"min_height", config.track.min_height},
                        {"max_height", config.track.max_height},
                        {"bumps", config.track.bumps},
                        {"max_bump_depth", config.track.max_bump_depth},
                        {"patch", config.track.patch},
                        {"channels", config.track.channels},
                        {"cell", config.track.cell},
                        {"episode_steps", config.track.episode_steps}};
    } else {
        env["sphere_dim"] = config.sphere_dim;
    }
    if (config.env_kind != "sphere") env["pad_observations"] = config.pad_observations;
    root["env"] = env;

    root["es"] = {{"population", config.population},
                  {"alpha", config.alpha},
                  {"sigma", config.sigma},
                  {"alpha_decay", config.alpha_decay},
                  {"sigma_decay", config.sigma_decay},
                  {"mirrored", config.mirrored},
                  {"shaping", to_string(config.shaping)}};

    root["budget"] = {{"generations", config.generations},
                      {"episodes_per_env", config.episodes_per_env},
                      {"eval_episodes", config.eval_episodes},
                      {"checkpoint_every", config.checkpoint_every}};

    root["seeds"] = {{"master", config.master_seed}, {"eval_bank", config.eval_bank_seed}};

    root["rollout"] = {{"horizon", config.horizon},
                       {"update_order", to_string(config.update_order)},
                       {"init_distribution", to_string(config.init_distribution)},
                       {"floor_fitness", config.floor_fitness}};

    root["execution"] = {{"workers", config.workers},
                         {"record_wall_time", config.record_wall_time},
                         {"common_episode_seed", config.common_episode_seed},
                         {"output_dir", config.output_dir}};

    return root.dump(2) + "\n";
}

std::uint64_t config_hash(const ExperimentConfig& config) {
    const std::string canonical = serialize_config(config);
    return io::fnv1a64(canonical.data(), canonical.size());
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return serialize_config(a) == serialize_config(b);
}

}  // namespace hebbnet
