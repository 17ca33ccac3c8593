#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "hebbnet/rng.hpp"

namespace hebbnet {

// Analytic objective for optimizer oracles: F(h) = -|h - target|^2, maximal
// at the hidden target. Deterministic per seed.
struct SphereObjective {
    Eigen::VectorXd target;

    SphereObjective(int dim, std::uint64_t seed) : target(dim) {
        Rng rng(derive_seed(seed, {stream::sphere_target}));
        for (int i = 0; i < dim; ++i) target[i] = rng.uniform(-1.0, 1.0);
    }

    double operator()(const Eigen::Ref<const Eigen::VectorXd>& h) const {
        return -(h - target).squaredNorm();
    }
};

}  // namespace hebbnet
