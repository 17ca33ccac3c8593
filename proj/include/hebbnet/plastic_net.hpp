#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hebbnet/observation.hpp"
#include "hebbnet/topology.hpp"

namespace hebbnet {

// Ablations of the generalized rule dw = eta * (A*oi*oj + B*oi + C*oj + D).
// Inactive coefficients are pinned to zero; eta is pinned to 1 when not
// evolved, so A_only reduces to plain Hebb.
enum class PlasticityVariant {
    A_only,
    A_plus_eta,
    AD,
    ABCD,
    ABCD_plus_eta,
};

int coeffs_per_synapse(PlasticityVariant v);
bool variant_evolves_eta(PlasticityVariant v);
std::string to_string(PlasticityVariant v);
PlasticityVariant variant_from_string(const std::string& s);
// Canonical order of active coefficient classes, subset of {A,B,C,D,eta}.
std::vector<std::string> active_coefficient_classes(PlasticityVariant v);

// Per-layer fc weight matrices, pre-neurons x post-neurons so w(i, j) is the
// synapse from input neuron i to output neuron j.
struct WeightState {
    std::vector<Eigen::MatrixXd> layers;
    WeightNorm mode = WeightNorm::none;

    bool all_finite() const;
    Eigen::VectorXd flatten() const;  // row-major per layer, layers in order
    static WeightState from_flat(const NetworkTopology& topology,
                                 const Eigen::Ref<const Eigen::VectorXd>& flat);
    static WeightState zeros(const NetworkTopology& topology);
};

// Five coefficient tensors shaped like the weight matrices. Tensors of
// inactive classes are present but never read by hebbian_step; the variant
// decides which terms apply.
struct HebbianCoefficients {
    PlasticityVariant variant = PlasticityVariant::ABCD_plus_eta;
    std::vector<Eigen::MatrixXd> A, B, C, D, eta;

    static HebbianCoefficients zeros(const NetworkTopology& topology, PlasticityVariant v);
};

// Pre/post activations of every fc layer from one forward pass. pre[0] is
// the flattened network input (conv output for vision nets); post[l] is the
// post-tanh output of layer l.
struct ActivationTrace {
    std::vector<Eigen::VectorXd> pre;
    std::vector<Eigen::VectorXd> post;
};

enum class InitDistribution {
    uniform,  // U(-0.1, 0.1)
    normal,   // N(0, 0.1)
};
std::string to_string(InitDistribution d);
InitDistribution init_distribution_from_string(const std::string& s);

WeightState init_weights(const NetworkTopology& topology, std::uint64_t seed,
                         InitDistribution dist = InitDistribution::uniform);

struct ForwardResult {
    Eigen::VectorXd action;
    ActivationTrace trace;
};

// action = tanh(W3^T tanh(W2^T tanh(W1^T x))) with x the (conv-processed,
// flattened) observation. conv_params must be empty when the topology has no
// conv frontend. Throws std::invalid_argument on any shape mismatch.
ForwardResult forward(const NetworkTopology& topology, const WeightState& weights,
                      std::span<const double> conv_params, const Observation& obs);

// Allocation-free variant for the episode hot loop; trace is resized on
// first use and reused afterwards.
void forward_into(const NetworkTopology& topology, const WeightState& weights,
                  std::span<const double> conv_params, const Observation& obs,
                  ActivationTrace& trace, Eigen::VectorXd& action);

// In-place update of a single fc layer from its (pre, post) activation pair.
// Building block of hebbian_step, also used directly when layers are updated
// one at a time during the forward pass.
void hebbian_update_layer(Eigen::MatrixXd& w, const HebbianCoefficients& coeffs, int layer,
                          const Eigen::VectorXd& pre, const Eigen::VectorXd& post);

// Fused forward + plasticity pass: each layer is updated from its own
// (pre, post) pair immediately after computing post, before the next layer
// runs. For a feedforward stack every weight matrix is read exactly once,
// before its own update, so this produces the same trajectory as
// forward_into followed by hebbian_step; it exists as an explicit traversal
// mode. Returns false on a non-finite update (divergence).
bool forward_update_sequential(const NetworkTopology& topology, WeightState& weights,
                               const HebbianCoefficients& coeffs,
                               std::span<const double> conv_params, const Observation& obs,
                               ActivationTrace& trace, Eigen::VectorXd& action);

// One plasticity update from the trace of the immediately preceding forward
// pass, then per-layer normalization when the mode asks for it. Returns
// false when any updated weight is non-finite; the caller must abort the
// episode (divergence).
bool hebbian_step(WeightState& weights, const HebbianCoefficients& coeffs,
                  const ActivationTrace& trace);

// Divide each layer by its max |entry| when that max exceeds 1. Idempotent;
// all-zero layers pass through.
void normalize_layer_max_abs(WeightState& weights);

}  // namespace hebbnet
