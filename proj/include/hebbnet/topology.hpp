#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hebbnet {

enum class WeightNorm {
    none,           // weights free to grow (state-vector configs)
    layer_max_abs,  // divide each layer by its max |w| when it exceeds 1
};

std::string to_string(WeightNorm mode);
WeightNorm weight_norm_from_string(const std::string& s);

// One convolutional stage: conv (no bias, stride given) followed by a
// max-pool. Activation between conv and pool is tanh, fixed.
struct ConvLayerSpec {
    int in_channels = 0;
    int out_channels = 0;
    int kernel = 0;
    int stride = 1;
    int pool_window = 1;
    int pool_stride = 1;

    int param_count() const { return in_channels * out_channels * kernel * kernel; }
};

struct ConvFrontendSpec {
    int in_channels = 0;
    int in_height = 0;
    int in_width = 0;
    std::vector<ConvLayerSpec> layers;

    int param_count() const;
    // (channels, height, width) after every stage.
    std::vector<std::array<int, 3>> stage_output_dims() const;
    int flattened_output_dim() const;
    void validate() const;
};

// Feedforward policy net: optional static conv frontend feeding fully
// connected tanh layers, no bias anywhere.
struct NetworkTopology {
    int input_dim = 0;                 // first fc layer input (conv flatten when conv present)
    std::vector<int> fc_layer_sizes;   // e.g. {128, 64, 8}
    std::optional<ConvFrontendSpec> conv_frontend;
    WeightNorm normalization = WeightNorm::none;

    int fc_layer_count() const { return static_cast<int>(fc_layer_sizes.size()); }
    // (in, out) per fc layer.
    std::vector<std::pair<int, int>> fc_shapes() const;
    int fc_synapse_count() const;
    int conv_param_count() const { return conv_frontend ? conv_frontend->param_count() : 0; }
    int action_dim() const { return fc_layer_sizes.empty() ? 0 : fc_layer_sizes.back(); }

    // Stable structural hash; checkpoints refuse to load against a
    // different topology.
    std::uint64_t hash() const;
    void validate() const;  // throws std::invalid_argument with a field diagnostic
};

// The two architectures whose parameter counts are pinned by tests:
// quadruped [28 -> 128, 64, 8] (12,288 synapses) and the vision net
// (1,362 conv params, 648-dim flatten, 91,328 fc synapses).
NetworkTopology quadruped_topology();
NetworkTopology vision_topology();

}  // namespace hebbnet
