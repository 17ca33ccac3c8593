#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hebbnet/env.hpp"

namespace hebbnet {

// Desk-scale limbed crawler. Each leg k contributes a load
// load_k = delta_k * (M a_eff)_k; the body accelerates toward the mean load
// minus a quadratic energy cost:
//   a_eff   = s .* a      (s = per-episode drive polarity, see below)
//   v_target = mean(loads) - c * |a|^2 / L
//   v       <- (1 - rho) * v + rho * v_target
//   d       <- d + v,   reward = v
// Observation: [v, loads (L values), sin(phase), cos(phase)].
//
// Polarity: when polarity_flips is on, each episode re-rigs the two front
// (keystone) legs with an independent random drive direction s in {-1,+1},
// drawn from the reset seed; rear legs always keep s = +1. A policy
// therefore cannot hard-code which way to drive a keystone — it has to
// discover the effective gain sign within the episode from load and
// velocity feedback. That is the adaptation pressure that makes in-lifetime
// learning pay off where a fixed reactive mapping cannot.
//
// This is a response-matrix model, not rigid-body physics: it keeps the
// experimental logic (proprioceptive feedback, parametric leg damage,
// distance fitness) while staying deterministic and dependency-free.
struct CrawlerParams {
    int legs = 4;
    double energy_cost = 0.1;       // c
    double smoothing = 0.2;         // rho
    int phase_period = 16;          // steps per sin/cos gait-clock cycle
    double damage_severity = 0.2;   // delta of a damaged leg
    int episode_steps = 1000;
    bool polarity_flips = true;     // per-episode front-leg drive polarity
};

struct CrawlerMorphology {
    std::string name;               // "healthy", "damaged_leg_1", ...
    Eigen::MatrixXd response;       // M, legs x legs
    Eigen::VectorXd damage;         // delta in [0,1]^L, all-ones = healthy
};

// Training uses `seen` only; `unseen` is held out for evaluation.
struct MorphologySet {
    std::vector<CrawlerMorphology> seen;
    std::vector<CrawlerMorphology> unseen;
};

// Builds {healthy, damaged leg 1} as seen and {damaged leg 0} as unseen,
// sharing one response matrix M sampled per experiment seed. M is mirror
// symmetric in the two front legs (0 and 1), each acting as a keystone
// whose damage flips the sign of its own optimal drive, so no single
// constant action works across morphologies.
MorphologySet make_morphology_set(std::uint64_t seed, const CrawlerParams& params = {});

class CrawlerEnv final : public Environment {
public:
    CrawlerEnv(CrawlerParams params, CrawlerMorphology morphology);

    Observation reset(std::uint64_t seed) override;
    StepResult step(const Eigen::Ref<const Eigen::VectorXd>& action) override;

    int action_dim() const override { return params_.legs; }
    int obs_dim() const override { return params_.legs + 3; }
    int obs_channels() const override { return 0; }
    int obs_height() const override { return 0; }
    int obs_width() const override { return 0; }
    std::string name() const override { return "crawler/" + morphology_.name; }

    double distance() const { return distance_; }
    double velocity() const { return velocity_; }
    const CrawlerMorphology& morphology() const { return morphology_; }
    const CrawlerParams& params() const { return params_; }
    const Eigen::VectorXd& polarity() const { return polarity_; }  // after reset

private:
    Observation make_obs(const Eigen::VectorXd& loads) const;

    CrawlerParams params_;
    CrawlerMorphology morphology_;
    Eigen::MatrixXd damped_response_;  // diag(delta) * M, fixed per morphology
    Eigen::VectorXd polarity_;         // s, redrawn on reset
    double velocity_ = 0.0;
    double distance_ = 0.0;
    int t_ = 0;
    bool done_ = true;
};

}  // namespace hebbnet
