#include "hebbnet/episode.hpp"

#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>

#include "json.hpp"

#include "hebbnet/rng.hpp"

namespace hebbnet {

std::string to_string(PerturbationKind kind) {
    switch (kind) {
        case PerturbationKind::freeze_plasticity: return "freeze_plasticity";
        case PerturbationKind::zero_weights: return "zero_weights";
        case PerturbationKind::saturate_actions: return "saturate_actions";
    }
    throw std::logic_error("unreachable perturbation kind");
}

PerturbationKind perturbation_kind_from_string(const std::string& s) {
    if (s == "freeze_plasticity") return PerturbationKind::freeze_plasticity;
    if (s == "zero_weights") return PerturbationKind::zero_weights;
    if (s == "saturate_actions") return PerturbationKind::saturate_actions;
    throw std::invalid_argument("unknown perturbation kind: " + s);
}

std::string to_string(UpdateOrder order) {
    return order == UpdateOrder::synchronous ? "synchronous" : "sequential";
}

UpdateOrder update_order_from_string(const std::string& s) {
    if (s == "synchronous") return UpdateOrder::synchronous;
    if (s == "sequential") return UpdateOrder::sequential;
    throw std::invalid_argument("unknown update order: " + s);
}

void PerturbationSchedule::validate() const {
    int prev = 0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& ev = events[i];
        if (ev.at_step < 0) {
            throw std::invalid_argument("perturbation event " + std::to_string(i) +
                                        ": at_step must be >= 0");
        }
        if (i > 0 && ev.at_step < prev) {
            throw std::invalid_argument("perturbation events must be sorted by at_step");
        }
        prev = ev.at_step;
        if (ev.kind == PerturbationKind::zero_weights &&
            (ev.fraction <= 0.0 || ev.fraction > 1.0)) {
            throw std::invalid_argument("zero_weights fraction must lie in (0,1]");
        }
        if (ev.kind == PerturbationKind::saturate_actions && ev.duration < 1) {
            throw std::invalid_argument("saturate_actions duration must be >= 1");
        }
    }
}

namespace {

int zero_weight_subset(WeightState& weights, const NetworkTopology& topology,
                       const PerturbationEvent& ev, std::uint64_t event_seed) {
    Eigen::VectorXd flat = weights.flatten();
    const int total = static_cast<int>(flat.size());
    const int count = static_cast<int>(std::llround(ev.fraction * total));
    if (count <= 0) return 0;
    Rng rng(event_seed);
    if (ev.contiguous) {
        const int start = rng.uniform_int(0, total - count);
        flat.segment(start, count).setZero();
    } else {
        // Partial Fisher-Yates: the first `count` slots end up holding a
        // uniform sample without replacement.
        std::vector<int> idx(total);
        std::iota(idx.begin(), idx.end(), 0);
        for (int k = 0; k < count; ++k) {
            const int j = rng.uniform_int(k, total - 1);
            std::swap(idx[k], idx[j]);
            flat[idx[k]] = 0.0;
        }
    }
    weights = WeightState::from_flat(topology, flat);
    return count;
}

}  // namespace

EpisodeOutcome run_lifetime(const NetworkTopology& topology, const DecodedGenome& genome,
                            Environment& env, const LifetimeOptions& options) {
    options.schedule.validate();
    const bool plastic = genome.mode.kind == GenomeMode::Kind::hebbian;
    if (plastic && !genome.coeffs) {
        throw std::invalid_argument("hebbian genome has no plasticity coefficients");
    }
    if (!plastic && !genome.direct_weights) {
        throw std::invalid_argument("static genome has no direct weights");
    }

    WeightState weights;
    if (!plastic) {
        weights = *genome.direct_weights;
    } else if (genome.init_weights) {
        weights = *genome.init_weights;
    } else {
        weights = init_weights(topology, options.weight_seed, options.init_distribution);
    }
    const std::span<const double> conv(genome.conv_params);

    EpisodeOutcome out;
    const auto& events = options.schedule.events;
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (events[i].at_step >= options.horizon) {
            out.warnings.push_back("event " + std::to_string(i) + " (" +
                                   to_string(events[i].kind) + ") at step " +
                                   std::to_string(events[i].at_step) +
                                   " is beyond the horizon and was ignored");
        }
    }

    Observation obs = env.reset(options.env_seed);

    std::size_t next_event = 0;
    bool frozen = false;
    int saturate_until = -1;
    double saturate_value = 1.0;

    ActivationTrace trace;
    Eigen::VectorXd action;
    Eigen::VectorXd env_action;

    const auto& rec = options.recording;
    for (int step = 0; step < options.horizon; ++step) {
        while (next_event < events.size() && events[next_event].at_step == step) {
            const auto& ev = events[next_event];
            PerturbationLogEntry entry{ev.kind, step, 0};
            switch (ev.kind) {
                case PerturbationKind::freeze_plasticity:
                    frozen = true;
                    break;
                case PerturbationKind::zero_weights:
                    entry.zeroed_count = zero_weight_subset(
                        weights, topology, ev,
                        derive_seed(options.schedule.seed,
                                    {stream::perturbation, next_event}));
                    break;
                case PerturbationKind::saturate_actions:
                    saturate_until = std::max(saturate_until, step + ev.duration);
                    saturate_value = ev.value;
                    break;
            }
            out.perturbation_log.push_back(entry);
            ++next_event;
        }

        if (rec.record_weights && step % rec.weight_stride == 0) {
            out.snapshot_steps.push_back(step);
            out.weight_snapshots.push_back(weights.flatten());
        }

        bool plastic_ok = true;
        if (plastic && !frozen && options.update_order == UpdateOrder::sequential) {
            plastic_ok =
                forward_update_sequential(topology, weights, *genome.coeffs, conv, obs, trace, action);
        } else {
            forward_into(topology, weights, conv, obs, trace, action);
        }

        if (step < saturate_until) {
            env_action = Eigen::VectorXd::Constant(env.action_dim(), saturate_value);
        } else {
            env_action = action;
        }

        StepResult sr = env.step(env_action);
        out.fitness += sr.reward;
        ++out.steps;
        if (rec.record_steps) {
            out.step_records.push_back({step, env_action, sr.reward});
        }

        if (plastic && !frozen && options.update_order == UpdateOrder::synchronous) {
            plastic_ok = hebbian_step(weights, *genome.coeffs, trace);
        }
        if (!plastic_ok) {
            out.diverged = true;
            out.fitness = options.floor_fitness;
            break;
        }

        obs = std::move(sr.obs);
        if (sr.done) break;
    }

    if (rec.record_weights && !out.diverged) {
        out.snapshot_steps.push_back(out.steps);
        out.weight_snapshots.push_back(weights.flatten());
    }
    return out;
}

std::string episode_outcome_to_json(const EpisodeOutcome& outcome) {
    nlohmann::json j;
    j["fitness"] = outcome.fitness;
    j["steps"] = outcome.steps;
    j["diverged"] = outcome.diverged;
    auto log = nlohmann::json::array();
    for (const auto& entry : outcome.perturbation_log) {
        nlohmann::json e;
        e["kind"] = to_string(entry.kind);
        e["step"] = entry.step;
        if (entry.kind == PerturbationKind::zero_weights) {
            e["zeroed_count"] = entry.zeroed_count;
        }
        log.push_back(e);
    }
    j["perturbation_log"] = log;
    if (!outcome.step_records.empty()) {
        auto steps = nlohmann::json::array();
        for (const auto& r : outcome.step_records) {
            nlohmann::json s;
            s["step"] = r.step;
            s["reward"] = r.reward;
            s["action"] = std::vector<double>(r.action.begin(), r.action.end());
            steps.push_back(s);
        }
        j["step_records"] = steps;
    }
    if (!outcome.warnings.empty()) j["warnings"] = outcome.warnings;
    return j.dump(2);
}

}  // namespace hebbnet
