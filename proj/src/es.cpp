#include "hebbnet/es.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "hebbnet/parallel.hpp"
#include "hebbnet/rng.hpp"

namespace hebbnet {

std::string to_string(FitnessShaping shaping) {
    switch (shaping) {
        case FitnessShaping::raw: return "raw";
        case FitnessShaping::centered_rank: return "centered_rank";
        case FitnessShaping::z_score: return "z_score";
    }
    throw std::logic_error("unreachable fitness shaping");
}

FitnessShaping fitness_shaping_from_string(const std::string& s) {
    if (s == "raw") return FitnessShaping::raw;
    if (s == "centered_rank") return FitnessShaping::centered_rank;
    if (s == "z_score") return FitnessShaping::z_score;
    throw std::invalid_argument("unknown fitness shaping: " + s);
}

void EsState::validate() const {
    if (!(alpha > 0.0) || !(sigma > 0.0)) {
        throw std::invalid_argument("alpha and sigma must be positive");
    }
    if (population < 1) throw std::invalid_argument("population must be >= 1");
    if (mirrored && (population < 2 || population % 2 != 0)) {
        throw std::invalid_argument("mirrored sampling needs an even population >= 2");
    }
    if (h.size() == 0) throw std::invalid_argument("solution vector is empty");
}

Eigen::VectorXd noise_vector(std::uint64_t noise_seed, Eigen::Index dim) {
    Rng rng(noise_seed);
    Eigen::VectorXd eps(dim);
    for (Eigen::Index i = 0; i < dim; ++i) eps[i] = rng.normal();
    return eps;
}

namespace {

std::uint64_t ticket_seed(const EsState& state, int base_index) {
    return derive_seed(state.master_seed,
                       {stream::es_noise, static_cast<std::uint64_t>(state.generation),
                        static_cast<std::uint64_t>(base_index)});
}

}  // namespace

std::vector<CandidateTicket> sample_population(const EsState& state) {
    state.validate();
    std::vector<CandidateTicket> tickets(static_cast<std::size_t>(state.population));
    if (state.mirrored) {
        const int half = state.population / 2;
        for (int i = 0; i < half; ++i) {
            const std::uint64_t seed = ticket_seed(state, i);
            tickets[static_cast<std::size_t>(i)] = {i, seed, 1.0};
            tickets[static_cast<std::size_t>(i + half)] = {i + half, seed, -1.0};
        }
    } else {
        for (int i = 0; i < state.population; ++i) {
            tickets[static_cast<std::size_t>(i)] = {i, ticket_seed(state, i), 1.0};
        }
    }
    return tickets;
}

Eigen::VectorXd materialize(const CandidateTicket& ticket, const EsState& state) {
    // sign * sigma * eps first: mirrored pairs perturb by exact negations.
    return state.h + (ticket.sign * state.sigma) * noise_vector(ticket.noise_seed, state.h.size());
}

std::vector<double> shape_fitnesses(const std::vector<double>& raw, FitnessShaping shaping) {
    const std::size_t n = raw.size();
    if (shaping == FitnessShaping::raw || n == 0) return raw;

    if (shaping == FitnessShaping::z_score) {
        double mean = 0.0;
        for (double f : raw) mean += f;
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double f : raw) var += (f - mean) * (f - mean);
        const double sd = std::sqrt(var / static_cast<double>(n));
        std::vector<double> shaped(n, 0.0);
        if (sd > 0.0) {
            for (std::size_t i = 0; i < n; ++i) shaped[i] = (raw[i] - mean) / sd;
        }
        return shaped;
    }

    // centered_rank: average ranks over ties, rescaled to [-0.5, 0.5]. All
    // fitnesses equal -> all shaped values exactly 0.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&raw](std::size_t a, std::size_t b) { return raw[a] < raw[b]; });
    std::vector<double> rank(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && raw[order[j + 1]] == raw[order[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j));
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
        i = j + 1;
    }
    std::vector<double> shaped(n);
    if (n == 1) {
        shaped[0] = 0.0;
        return shaped;
    }
    const double denom = static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k) shaped[k] = rank[k] / denom - 0.5;
    return shaped;
}

EsState es_update(const EsState& state, const std::vector<FitnessReport>& reports) {
    state.validate();
    const int n = state.population;
    if (static_cast<int>(reports.size()) != n) {
        throw std::invalid_argument("expected " + std::to_string(n) + " fitness reports, got " +
                                    std::to_string(reports.size()));
    }
    std::vector<double> raw(static_cast<std::size_t>(n), 0.0);
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (const auto& r : reports) {
        if (r.index < 0 || r.index >= n || seen[static_cast<std::size_t>(r.index)]) {
            throw std::invalid_argument("fitness reports must cover each candidate exactly once");
        }
        seen[static_cast<std::size_t>(r.index)] = 1;
        raw[static_cast<std::size_t>(r.index)] = r.fitness;
    }

    const std::vector<double> f = shape_fitnesses(raw, state.shaping);
    const double scale = state.alpha / (static_cast<double>(n) * state.sigma);

    EsState next = state;
    if (state.mirrored) {
        const int half = n / 2;
        for (int k = 0; k < half; ++k) {
            const double weight =
                f[static_cast<std::size_t>(k)] - f[static_cast<std::size_t>(k + half)];
            if (weight != 0.0) {
                next.h += (scale * weight) * noise_vector(ticket_seed(state, k), state.h.size());
            }
        }
    } else {
        for (int i = 0; i < n; ++i) {
            const double weight = f[static_cast<std::size_t>(i)];
            if (weight != 0.0) {
                next.h += (scale * weight) * noise_vector(ticket_seed(state, i), state.h.size());
            }
        }
    }
    next.alpha *= next.alpha_decay;
    next.sigma *= next.sigma_decay;
    next.generation += 1;
    return next;
}

EsState decay_step(EsState state) {
    state.alpha *= state.alpha_decay;
    state.sigma *= state.sigma_decay;
    return state;
}

EvolutionResult run_evolution(EsState state, const CandidateFitnessFn& fitness,
                              const EvolutionOptions& options) {
    state.validate();
    if (options.generations < 0) throw std::invalid_argument("generations must be >= 0");
    if (options.eval_episodes < 1) throw std::invalid_argument("eval_episodes must be >= 1");

    EvolutionResult result;
    result.best = state.h;
    result.best_eval = -std::numeric_limits<double>::infinity();
    result.curve.reserve(static_cast<std::size_t>(options.generations));

    const std::uint64_t eval_root =
        options.eval_bank_seed != 0 ? options.eval_bank_seed : state.master_seed;
    std::vector<std::uint64_t> eval_bank(static_cast<std::size_t>(options.eval_episodes));
    for (int e = 0; e < options.eval_episodes; ++e) {
        eval_bank[static_cast<std::size_t>(e)] =
            derive_seed(eval_root, {stream::eval_bank, static_cast<std::uint64_t>(e)});
    }

    const auto start = std::chrono::steady_clock::now();
    auto eval_current = [&](const Eigen::VectorXd& h, double& mean, double& sd) {
        std::vector<double> fit(eval_bank.size(), 0.0);
        parallel_for(static_cast<int>(eval_bank.size()), options.workers, [&](int e) {
            fit[static_cast<std::size_t>(e)] = fitness(h, eval_bank[static_cast<std::size_t>(e)]);
        });
        mean = 0.0;
        for (double v : fit) mean += v;
        mean /= static_cast<double>(fit.size());
        double var = 0.0;
        for (double v : fit) var += (v - mean) * (v - mean);
        sd = std::sqrt(var / static_cast<double>(fit.size()));
    };

    for (int g = 0; g < options.generations; ++g) {
        const auto tickets = sample_population(state);
        std::vector<FitnessReport> reports(tickets.size());
        parallel_for(static_cast<int>(tickets.size()), options.workers, [&](int i) {
            const auto& ticket = tickets[static_cast<std::size_t>(i)];
            const Eigen::VectorXd candidate = materialize(ticket, state);
            const std::uint64_t gen = static_cast<std::uint64_t>(state.generation);
            const std::uint64_t episode_seed =
                options.common_episode_seed
                    ? derive_seed(state.master_seed, {stream::train_episode, gen})
                    : derive_seed(state.master_seed,
                                  {stream::train_episode, gen,
                                   static_cast<std::uint64_t>(ticket.index)});
            reports[static_cast<std::size_t>(i)] = {ticket.index,
                                                    fitness(candidate, episode_seed), false, 0};
        });

        CurveRow row;
        row.generation = state.generation;
        row.pop_mean_fitness = 0.0;
        row.pop_max_fitness = -std::numeric_limits<double>::infinity();
        for (const auto& r : reports) {
            row.pop_mean_fitness += r.fitness;
            row.pop_max_fitness = std::max(row.pop_max_fitness, r.fitness);
        }
        row.pop_mean_fitness /= static_cast<double>(reports.size());
        eval_current(state.h, row.eval_fitness_mean, row.eval_fitness_std);
        row.alpha = state.alpha;
        row.sigma = state.sigma;
        if (options.record_wall_time) {
            row.wall_time =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
        result.curve.push_back(row);
        if (options.on_generation) options.on_generation(row);

        if (row.eval_fitness_mean > result.best_eval) {
            result.best_eval = row.eval_fitness_mean;
            result.best = state.h;
            result.best_generation = state.generation;
        }

        state = es_update(state, reports);

        if (options.checkpoint_every > 0 && (g + 1) % options.checkpoint_every == 0 &&
            options.on_checkpoint) {
            result.state = state;
            options.on_checkpoint(state, result);
        }
    }

    if (options.generations > 0) {
        double mean = 0.0, sd = 0.0;
        eval_current(state.h, mean, sd);
        if (mean > result.best_eval) {
            result.best_eval = mean;
            result.best = state.h;
            result.best_generation = state.generation;
        }
    }
    result.state = std::move(state);
    return result;
}

}  // namespace hebbnet
