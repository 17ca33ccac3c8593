#include "hebbnet/plastic_net.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hebbnet/rng.hpp"

namespace hebbnet {

int coeffs_per_synapse(PlasticityVariant v) {
    switch (v) {
        case PlasticityVariant::A_only: return 1;
        case PlasticityVariant::A_plus_eta: return 2;
        case PlasticityVariant::AD: return 2;
        case PlasticityVariant::ABCD: return 4;
        case PlasticityVariant::ABCD_plus_eta: return 5;
    }
    return 0;
}

bool variant_evolves_eta(PlasticityVariant v) {
    return v == PlasticityVariant::A_plus_eta || v == PlasticityVariant::ABCD_plus_eta;
}

std::string to_string(PlasticityVariant v) {
    switch (v) {
        case PlasticityVariant::A_only: return "A_only";
        case PlasticityVariant::A_plus_eta: return "A_plus_eta";
        case PlasticityVariant::AD: return "AD";
        case PlasticityVariant::ABCD: return "ABCD";
        case PlasticityVariant::ABCD_plus_eta: return "ABCD_plus_eta";
    }
    return "?";
}

PlasticityVariant variant_from_string(const std::string& s) {
    if (s == "A_only") return PlasticityVariant::A_only;
    if (s == "A_plus_eta") return PlasticityVariant::A_plus_eta;
    if (s == "AD") return PlasticityVariant::AD;
    if (s == "ABCD") return PlasticityVariant::ABCD;
    if (s == "ABCD_plus_eta") return PlasticityVariant::ABCD_plus_eta;
    throw std::invalid_argument("unknown plasticity variant: " + s);
}

std::vector<std::string> active_coefficient_classes(PlasticityVariant v) {
    switch (v) {
        case PlasticityVariant::A_only: return {"A"};
        case PlasticityVariant::A_plus_eta: return {"A", "eta"};
        case PlasticityVariant::AD: return {"A", "D"};
        case PlasticityVariant::ABCD: return {"A", "B", "C", "D"};
        case PlasticityVariant::ABCD_plus_eta: return {"A", "B", "C", "D", "eta"};
    }
    return {};
}

std::string to_string(InitDistribution d) {
    return d == InitDistribution::uniform ? "uniform" : "normal";
}

InitDistribution init_distribution_from_string(const std::string& s) {
    if (s == "uniform") return InitDistribution::uniform;
    if (s == "normal") return InitDistribution::normal;
    throw std::invalid_argument("unknown init distribution: " + s);
}

bool WeightState::all_finite() const {
    for (const auto& w : layers) {
        if (!w.allFinite()) return false;
    }
    return true;
}

Eigen::VectorXd WeightState::flatten() const {
    Eigen::Index total = 0;
    for (const auto& w : layers) total += w.size();
    Eigen::VectorXd flat(total);
    Eigen::Index at = 0;
    for (const auto& w : layers) {
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            for (Eigen::Index j = 0; j < w.cols(); ++j) {
                flat[at++] = w(i, j);
            }
        }
    }
    return flat;
}

WeightState WeightState::from_flat(const NetworkTopology& topology,
                                   const Eigen::Ref<const Eigen::VectorXd>& flat) {
    if (flat.size() != topology.fc_synapse_count()) {
        throw std::invalid_argument("weight vector length " + std::to_string(flat.size()) +
                                    " does not match synapse count " +
                                    std::to_string(topology.fc_synapse_count()));
    }
    WeightState ws;
    ws.mode = topology.normalization;
    Eigen::Index at = 0;
    for (const auto& [in, out] : topology.fc_shapes()) {
        Eigen::MatrixXd w(in, out);
        for (int i = 0; i < in; ++i) {
            for (int j = 0; j < out; ++j) {
                w(i, j) = flat[at++];
            }
        }
        ws.layers.push_back(std::move(w));
    }
    return ws;
}

WeightState WeightState::zeros(const NetworkTopology& topology) {
    WeightState ws;
    ws.mode = topology.normalization;
    for (const auto& [in, out] : topology.fc_shapes()) {
        ws.layers.push_back(Eigen::MatrixXd::Zero(in, out));
    }
    return ws;
}

HebbianCoefficients HebbianCoefficients::zeros(const NetworkTopology& topology,
                                               PlasticityVariant v) {
    HebbianCoefficients c;
    c.variant = v;
    for (const auto& [in, out] : topology.fc_shapes()) {
        c.A.push_back(Eigen::MatrixXd::Zero(in, out));
        c.B.push_back(Eigen::MatrixXd::Zero(in, out));
        c.C.push_back(Eigen::MatrixXd::Zero(in, out));
        c.D.push_back(Eigen::MatrixXd::Zero(in, out));
        c.eta.push_back(Eigen::MatrixXd::Ones(in, out));
    }
    return c;
}

WeightState init_weights(const NetworkTopology& topology, std::uint64_t seed,
                         InitDistribution dist) {
    topology.validate();
    Rng rng(derive_seed(seed, {stream::weight_init}));
    WeightState ws;
    ws.mode = topology.normalization;
    for (const auto& [in, out] : topology.fc_shapes()) {
        Eigen::MatrixXd w(in, out);
        // Row-major fill so the sampling order matches the flat layout.
        for (int i = 0; i < in; ++i) {
            for (int j = 0; j < out; ++j) {
                w(i, j) = dist == InitDistribution::uniform ? rng.uniform(-0.1, 0.1)
                                                            : rng.normal(0.0, 0.1);
            }
        }
        ws.layers.push_back(std::move(w));
    }
    return ws;
}

namespace {

void conv_layer_forward(const ConvLayerSpec& l, const double* in, int in_h, int in_w,
                        const double* params, double* out, int out_h, int out_w) {
    for (int oc = 0; oc < l.out_channels; ++oc) {
        for (int y = 0; y < out_h; ++y) {
            for (int x = 0; x < out_w; ++x) {
                double acc = 0.0;
                for (int ic = 0; ic < l.in_channels; ++ic) {
                    const double* img = in + static_cast<std::size_t>(ic) * in_h * in_w;
                    const double* k = params +
                        (static_cast<std::size_t>(oc) * l.in_channels + ic) *
                            static_cast<std::size_t>(l.kernel) * l.kernel;
                    const int y0 = y * l.stride;
                    const int x0 = x * l.stride;
                    for (int ky = 0; ky < l.kernel; ++ky) {
                        const double* row = img + static_cast<std::size_t>(y0 + ky) * in_w + x0;
                        const double* krow = k + static_cast<std::size_t>(ky) * l.kernel;
                        for (int kx = 0; kx < l.kernel; ++kx) {
                            acc += row[kx] * krow[kx];
                        }
                    }
                }
                out[(static_cast<std::size_t>(oc) * out_h + y) * out_w + x] = std::tanh(acc);
            }
        }
    }
}

void max_pool(int channels, int window, int stride, const double* in, int in_h, int in_w,
              double* out, int out_h, int out_w) {
    for (int c = 0; c < channels; ++c) {
        const double* img = in + static_cast<std::size_t>(c) * in_h * in_w;
        for (int y = 0; y < out_h; ++y) {
            for (int x = 0; x < out_w; ++x) {
                double best = -std::numeric_limits<double>::infinity();
                const int y0 = y * stride;
                const int x0 = x * stride;
                for (int py = 0; py < window; ++py) {
                    const double* row = img + static_cast<std::size_t>(y0 + py) * in_w + x0;
                    for (int px = 0; px < window; ++px) {
                        best = std::max(best, row[px]);
                    }
                }
                out[(static_cast<std::size_t>(c) * out_h + y) * out_w + x] = best;
            }
        }
    }
}

// conv -> tanh -> max-pool per stage, then flatten into `features`.
void conv_frontend_forward(const ConvFrontendSpec& spec, std::span<const double> params,
                           const Observation& obs, Eigen::VectorXd& features) {
    if (!obs.is_image()) {
        throw std::invalid_argument("topology has a conv frontend but observation is a flat vector");
    }
    if (obs.channels != spec.in_channels || obs.height != spec.in_height ||
        obs.width != spec.in_width) {
        throw std::invalid_argument(
            "observation shape " + std::to_string(obs.channels) + "x" +
            std::to_string(obs.height) + "x" + std::to_string(obs.width) +
            " does not match conv input " + std::to_string(spec.in_channels) + "x" +
            std::to_string(spec.in_height) + "x" + std::to_string(spec.in_width));
    }
    if (static_cast<int>(params.size()) != spec.param_count()) {
        throw std::invalid_argument("conv param vector length " + std::to_string(params.size()) +
                                    " does not match spec count " +
                                    std::to_string(spec.param_count()));
    }

    thread_local std::vector<double> buf_a, buf_b;
    const double* cur = obs.values.data();
    int h = spec.in_height;
    int w = spec.in_width;
    std::size_t param_at = 0;
    bool use_a = true;
    for (const auto& l : spec.layers) {
        const int ch = (h - l.kernel) / l.stride + 1;
        const int cw = (w - l.kernel) / l.stride + 1;
        std::vector<double>& conv_buf = use_a ? buf_a : buf_b;
        conv_buf.resize(static_cast<std::size_t>(l.out_channels) * ch * cw);
        conv_layer_forward(l, cur, h, w, params.data() + param_at, conv_buf.data(), ch, cw);
        param_at += static_cast<std::size_t>(l.param_count());

        const int ph = (ch - l.pool_window) / l.pool_stride + 1;
        const int pw = (cw - l.pool_window) / l.pool_stride + 1;
        std::vector<double>& pool_buf = use_a ? buf_b : buf_a;
        pool_buf.resize(static_cast<std::size_t>(l.out_channels) * ph * pw);
        max_pool(l.out_channels, l.pool_window, l.pool_stride, conv_buf.data(), ch, cw,
                 pool_buf.data(), ph, pw);

        cur = pool_buf.data();
        h = ph;
        w = pw;
        // pool output lives in the buffer we did NOT conv into; flip roles
        use_a = !use_a;
    }
    const int flat_dim = spec.flattened_output_dim();
    features.resize(flat_dim);
    for (int i = 0; i < flat_dim; ++i) features[i] = cur[i];
}

void check_fc_shapes(const NetworkTopology& topology, const WeightState& weights) {
    const auto shapes = topology.fc_shapes();
    if (weights.layers.size() != shapes.size()) {
        throw std::invalid_argument("weight state has " + std::to_string(weights.layers.size()) +
                                    " layers, topology expects " + std::to_string(shapes.size()));
    }
    for (std::size_t l = 0; l < shapes.size(); ++l) {
        if (weights.layers[l].rows() != shapes[l].first ||
            weights.layers[l].cols() != shapes[l].second) {
            throw std::invalid_argument(
                "layer " + std::to_string(l) + " weights are " +
                std::to_string(weights.layers[l].rows()) + "x" +
                std::to_string(weights.layers[l].cols()) + ", topology expects " +
                std::to_string(shapes[l].first) + "x" + std::to_string(shapes[l].second));
        }
    }
}

}  // namespace

namespace {

// Resolves what feeds fc layer 0: the conv frontend's flattened output for
// image topologies, the observation vector itself otherwise.
void resolve_input(const NetworkTopology& topology, std::span<const double> conv_params,
                   const Observation& obs, Eigen::VectorXd& pre0) {
    if (topology.conv_frontend) {
        conv_frontend_forward(*topology.conv_frontend, conv_params, obs, pre0);
        return;
    }
    if (!conv_params.empty()) {
        throw std::invalid_argument("conv params supplied but topology has no conv frontend");
    }
    if (obs.is_image()) {
        throw std::invalid_argument("image observation fed to a flat-input topology");
    }
    if (obs.values.size() != topology.input_dim) {
        throw std::invalid_argument("observation dim " + std::to_string(obs.values.size()) +
                                    " does not match input_dim " +
                                    std::to_string(topology.input_dim));
    }
    pre0 = obs.values;
}

}  // namespace

void forward_into(const NetworkTopology& topology, const WeightState& weights,
                  std::span<const double> conv_params, const Observation& obs,
                  ActivationTrace& trace, Eigen::VectorXd& action) {
    check_fc_shapes(topology, weights);
    const std::size_t n_layers = weights.layers.size();
    trace.pre.resize(n_layers);
    trace.post.resize(n_layers);
    resolve_input(topology, conv_params, obs, trace.pre[0]);

    for (std::size_t l = 0; l < n_layers; ++l) {
        const Eigen::MatrixXd& w = weights.layers[l];
        trace.post[l].resize(w.cols());
        trace.post[l].noalias() = w.transpose() * trace.pre[l];
        trace.post[l] = trace.post[l].array().tanh();
        if (l + 1 < n_layers) {
            trace.pre[l + 1] = trace.post[l];
        }
    }
    action = trace.post.back();
}

bool forward_update_sequential(const NetworkTopology& topology, WeightState& weights,
                               const HebbianCoefficients& coeffs,
                               std::span<const double> conv_params, const Observation& obs,
                               ActivationTrace& trace, Eigen::VectorXd& action) {
    check_fc_shapes(topology, weights);
    const std::size_t n_layers = weights.layers.size();
    trace.pre.resize(n_layers);
    trace.post.resize(n_layers);
    resolve_input(topology, conv_params, obs, trace.pre[0]);

    bool finite = true;
    for (std::size_t l = 0; l < n_layers; ++l) {
        Eigen::MatrixXd& w = weights.layers[l];
        trace.post[l].resize(w.cols());
        trace.post[l].noalias() = w.transpose() * trace.pre[l];
        trace.post[l] = trace.post[l].array().tanh();
        if (l + 1 < n_layers) {
            trace.pre[l + 1] = trace.post[l];
        }
        // Layer l is done feeding forward; update it before layer l+1 runs.
        hebbian_update_layer(w, coeffs, static_cast<int>(l), trace.pre[l], trace.post[l]);
        if (!w.allFinite()) finite = false;
    }
    action = trace.post.back();
    if (!finite) return false;
    if (weights.mode == WeightNorm::layer_max_abs) {
        normalize_layer_max_abs(weights);
    }
    return true;
}

ForwardResult forward(const NetworkTopology& topology, const WeightState& weights,
                      std::span<const double> conv_params, const Observation& obs) {
    ForwardResult r;
    forward_into(topology, weights, conv_params, obs, r.trace, r.action);
    return r;
}

void normalize_layer_max_abs(WeightState& weights) {
    for (auto& w : weights.layers) {
        const double m = w.cwiseAbs().maxCoeff();
        if (m > 1.0) {
            w /= m;
        }
    }
}

void hebbian_update_layer(Eigen::MatrixXd& w, const HebbianCoefficients& coeffs, int layer,
                          const Eigen::VectorXd& pre, const Eigen::VectorXd& post) {
    const Eigen::Index in = w.rows();
    const Eigen::Index out = w.cols();
    if (pre.size() != in || post.size() != out) {
        throw std::invalid_argument("trace shapes do not match layer " + std::to_string(layer));
    }
    const std::size_t l = static_cast<std::size_t>(layer);
    // Broadcast o_i down columns and o_j across rows; all terms fuse into
    // one elementwise pass per layer.
    const auto oi = pre.array().replicate(1, out);
    const auto oj = post.transpose().array().replicate(in, 1);
    switch (coeffs.variant) {
        case PlasticityVariant::A_only:
            w.array() += coeffs.A[l].array() * oi * oj;
            break;
        case PlasticityVariant::A_plus_eta:
            w.array() += coeffs.eta[l].array() * (coeffs.A[l].array() * oi * oj);
            break;
        case PlasticityVariant::AD:
            w.array() += coeffs.A[l].array() * oi * oj + coeffs.D[l].array();
            break;
        case PlasticityVariant::ABCD:
            w.array() += coeffs.A[l].array() * oi * oj + coeffs.B[l].array() * oi +
                         coeffs.C[l].array() * oj + coeffs.D[l].array();
            break;
        case PlasticityVariant::ABCD_plus_eta:
            w.array() += coeffs.eta[l].array() *
                         (coeffs.A[l].array() * oi * oj + coeffs.B[l].array() * oi +
                          coeffs.C[l].array() * oj + coeffs.D[l].array());
            break;
    }
}

bool hebbian_step(WeightState& weights, const HebbianCoefficients& coeffs,
                  const ActivationTrace& trace) {
    const std::size_t n_layers = weights.layers.size();
    if (trace.pre.size() != n_layers || trace.post.size() != n_layers) {
        throw std::invalid_argument("trace layer count does not match weight state");
    }

    bool finite = true;
    for (std::size_t l = 0; l < n_layers; ++l) {
        Eigen::MatrixXd& w = weights.layers[l];
        hebbian_update_layer(w, coeffs, static_cast<int>(l), trace.pre[l], trace.post[l]);
        if (!w.allFinite()) finite = false;
    }
    if (!finite) return false;
    if (weights.mode == WeightNorm::layer_max_abs) {
        normalize_layer_max_abs(weights);
    }
    return true;
}

}  // namespace hebbnet
