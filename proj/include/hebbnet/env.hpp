#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "hebbnet/observation.hpp"

namespace hebbnet {

struct StepResult {
    Observation obs;
    double reward = 0.0;
    bool done = false;
};

// Deterministic episodic environment. One instance runs one episode at a
// time: reset(seed) then step() until done or the caller's horizon.
class Environment {
public:
    virtual ~Environment() = default;

    virtual Observation reset(std::uint64_t seed) = 0;
    virtual StepResult step(const Eigen::Ref<const Eigen::VectorXd>& action) = 0;

    virtual int action_dim() const = 0;
    // Observation layout; flat envs report channels=0.
    virtual int obs_dim() const = 0;
    virtual int obs_channels() const = 0;
    virtual int obs_height() const = 0;
    virtual int obs_width() const = 0;

    virtual std::string name() const = 0;
};

// Widens a flat observation with trailing zeros so an env can drive a
// policy whose input layer is larger than the env's native observation.
class PaddedObsEnv final : public Environment {
public:
    PaddedObsEnv(std::unique_ptr<Environment> inner, int obs_dim)
        : inner_(std::move(inner)), obs_dim_(obs_dim) {
        if (!inner_) throw std::invalid_argument("padded env needs an inner env");
        if (inner_->obs_channels() != 0) {
            throw std::invalid_argument("padding applies to flat observations only");
        }
        if (obs_dim_ < inner_->obs_dim()) {
            throw std::invalid_argument("padded obs dim is smaller than the env's own");
        }
    }

    Observation reset(std::uint64_t seed) override { return pad(inner_->reset(seed)); }
    StepResult step(const Eigen::Ref<const Eigen::VectorXd>& action) override {
        StepResult r = inner_->step(action);
        r.obs = pad(std::move(r.obs));
        return r;
    }

    int action_dim() const override { return inner_->action_dim(); }
    int obs_dim() const override { return obs_dim_; }
    int obs_channels() const override { return 0; }
    int obs_height() const override { return 0; }
    int obs_width() const override { return 0; }
    std::string name() const override { return inner_->name() + "+pad"; }

private:
    Observation pad(Observation obs) const {
        const Eigen::Index native = obs.values.size();
        obs.values.conservativeResize(obs_dim_);
        obs.values.tail(obs_dim_ - native).setZero();
        return obs;
    }

    std::unique_ptr<Environment> inner_;
    int obs_dim_;
};

}  // namespace hebbnet
