#include "hebbnet/topology.hpp"

#include <stdexcept>

#include "hebbnet/rng.hpp"

namespace hebbnet {

std::string to_string(WeightNorm mode) {
    return mode == WeightNorm::layer_max_abs ? "layer_max_abs" : "none";
}

WeightNorm weight_norm_from_string(const std::string& s) {
    if (s == "none") return WeightNorm::none;
    if (s == "layer_max_abs") return WeightNorm::layer_max_abs;
    throw std::invalid_argument("unknown normalization mode: " + s);
}

int ConvFrontendSpec::param_count() const {
    int total = 0;
    for (const auto& l : layers) total += l.param_count();
    return total;
}

static int conv_out(int in, int kernel, int stride) {
    return (in - kernel) / stride + 1;
}

std::vector<std::array<int, 3>> ConvFrontendSpec::stage_output_dims() const {
    std::vector<std::array<int, 3>> dims;
    int c = in_channels, h = in_height, w = in_width;
    for (const auto& l : layers) {
        h = conv_out(h, l.kernel, l.stride);
        w = conv_out(w, l.kernel, l.stride);
        h = conv_out(h, l.pool_window, l.pool_stride);
        w = conv_out(w, l.pool_window, l.pool_stride);
        c = l.out_channels;
        dims.push_back({c, h, w});
    }
    return dims;
}

int ConvFrontendSpec::flattened_output_dim() const {
    const auto dims = stage_output_dims();
    if (dims.empty()) return in_channels * in_height * in_width;
    const auto& last = dims.back();
    return last[0] * last[1] * last[2];
}

void ConvFrontendSpec::validate() const {
    if (in_channels <= 0 || in_height <= 0 || in_width <= 0) {
        throw std::invalid_argument("conv_frontend: input dims must be positive");
    }
    if (layers.empty()) {
        throw std::invalid_argument("conv_frontend: needs at least one layer");
    }
    int c = in_channels, h = in_height, w = in_width;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        const std::string where = "conv_frontend.layers[" + std::to_string(i) + "]";
        if (l.in_channels != c) {
            throw std::invalid_argument(where + ": in_channels " + std::to_string(l.in_channels) +
                                        " does not match incoming " + std::to_string(c));
        }
        if (l.out_channels <= 0 || l.kernel <= 0 || l.stride <= 0 ||
            l.pool_window <= 0 || l.pool_stride <= 0) {
            throw std::invalid_argument(where + ": all dims must be positive");
        }
        if (l.kernel > h || l.kernel > w) {
            throw std::invalid_argument(where + ": kernel larger than input");
        }
        h = conv_out(h, l.kernel, l.stride);
        w = conv_out(w, l.kernel, l.stride);
        if (l.pool_window > h || l.pool_window > w) {
            throw std::invalid_argument(where + ": pool window larger than conv output");
        }
        h = conv_out(h, l.pool_window, l.pool_stride);
        w = conv_out(w, l.pool_window, l.pool_stride);
        c = l.out_channels;
        if (h <= 0 || w <= 0) {
            throw std::invalid_argument(where + ": output collapsed to zero size");
        }
    }
}

std::vector<std::pair<int, int>> NetworkTopology::fc_shapes() const {
    std::vector<std::pair<int, int>> shapes;
    int in = input_dim;
    for (int out : fc_layer_sizes) {
        shapes.emplace_back(in, out);
        in = out;
    }
    return shapes;
}

int NetworkTopology::fc_synapse_count() const {
    int total = 0;
    for (const auto& [in, out] : fc_shapes()) total += in * out;
    return total;
}

std::uint64_t NetworkTopology::hash() const {
    std::uint64_t h = 0x746f706f6c6f6779ULL;  // "topology"
    auto mix = [&h](std::uint64_t v) { h = splitmix64(h ^ splitmix64(v)); };
    mix(static_cast<std::uint64_t>(input_dim));
    mix(static_cast<std::uint64_t>(fc_layer_sizes.size()));
    for (int s : fc_layer_sizes) mix(static_cast<std::uint64_t>(s));
    mix(static_cast<std::uint64_t>(normalization == WeightNorm::layer_max_abs ? 1 : 0));
    if (conv_frontend) {
        const auto& c = *conv_frontend;
        mix(0xc04fULL);
        mix(static_cast<std::uint64_t>(c.in_channels));
        mix(static_cast<std::uint64_t>(c.in_height));
        mix(static_cast<std::uint64_t>(c.in_width));
        for (const auto& l : c.layers) {
            mix(static_cast<std::uint64_t>(l.in_channels));
            mix(static_cast<std::uint64_t>(l.out_channels));
            mix(static_cast<std::uint64_t>(l.kernel));
            mix(static_cast<std::uint64_t>(l.stride));
            mix(static_cast<std::uint64_t>(l.pool_window));
            mix(static_cast<std::uint64_t>(l.pool_stride));
        }
    }
    return h;
}

void NetworkTopology::validate() const {
    if (input_dim <= 0) throw std::invalid_argument("topology.input_dim: must be positive");
    if (fc_layer_sizes.empty()) {
        throw std::invalid_argument("topology.fc_layer_sizes: at least one layer required");
    }
    for (std::size_t i = 0; i < fc_layer_sizes.size(); ++i) {
        if (fc_layer_sizes[i] <= 0) {
            throw std::invalid_argument("topology.fc_layer_sizes[" + std::to_string(i) +
                                        "]: must be positive");
        }
    }
    if (conv_frontend) {
        conv_frontend->validate();
        const int flat = conv_frontend->flattened_output_dim();
        if (flat != input_dim) {
            throw std::invalid_argument(
                "topology.input_dim: expected conv flatten dim " + std::to_string(flat) +
                ", got " + std::to_string(input_dim));
        }
    }
}

NetworkTopology quadruped_topology() {
    NetworkTopology t;
    t.input_dim = 28;
    t.fc_layer_sizes = {128, 64, 8};
    t.normalization = WeightNorm::none;
    return t;
}

NetworkTopology vision_topology() {
    ConvFrontendSpec conv;
    conv.in_channels = 3;
    conv.in_height = 84;
    conv.in_width = 84;
    conv.layers = {
        {.in_channels = 3, .out_channels = 6, .kernel = 3, .stride = 1, .pool_window = 2, .pool_stride = 2},
        {.in_channels = 6, .out_channels = 8, .kernel = 5, .stride = 1, .pool_window = 4, .pool_stride = 4},
    };
    NetworkTopology t;
    t.conv_frontend = conv;
    t.input_dim = conv.flattened_output_dim();  // 8 * 9 * 9 = 648
    t.fc_layer_sizes = {128, 64, 3};
    t.normalization = WeightNorm::layer_max_abs;
    return t;
}

}  // namespace hebbnet
