#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "hebbnet/genome.hpp"
#include "hebbnet/rng.hpp"

using namespace hebbnet;

namespace {

NetworkTopology tiny_topology() {
    NetworkTopology t;
    t.input_dim = 5;
    t.fc_layer_sizes = {7, 4, 3};
    return t;
}

NetworkTopology tiny_conv_topology() {
    ConvFrontendSpec conv;
    conv.in_channels = 1;
    conv.in_height = 6;
    conv.in_width = 6;
    conv.layers = {{.in_channels = 1, .out_channels = 2, .kernel = 3, .stride = 1,
                    .pool_window = 2, .pool_stride = 2}};
    NetworkTopology t;
    t.conv_frontend = conv;
    t.input_dim = conv.flattened_output_dim();  // 2 * 2 * 2 = 8
    t.fc_layer_sizes = {4, 2};
    t.normalization = WeightNorm::layer_max_abs;
    return t;
}

Genome random_genome(const GenomeLayout& layout, std::uint64_t seed) {
    Genome g;
    g.layout = layout;
    g.values.resize(layout.total_len);
    Rng rng(seed);
    for (int i = 0; i < layout.total_len; ++i) g.values[i] = rng.uniform(-2.0, 2.0);
    return g;
}

const PlasticityVariant kAllVariants[] = {
    PlasticityVariant::A_only, PlasticityVariant::A_plus_eta, PlasticityVariant::AD,
    PlasticityVariant::ABCD, PlasticityVariant::ABCD_plus_eta};

}  // namespace

TEST_CASE("layouts reproduce the pinned parameter counts") {
    const auto quad = quadruped_topology();
    const auto vis = vision_topology();

    SUBCASE("full hebbian rule") {
        const auto lq = layout_for(quad, GenomeMode::hebbian());
        CHECK(lq.total_len == 61440);
        REQUIRE(lq.segments.size() == 1);
        CHECK(lq.segments[0].name == "plasticity");

        const auto lv = layout_for(vis, GenomeMode::hebbian());
        REQUIRE(lv.segments.size() == 2);
        CHECK(lv.segments[0].name == "conv_static");
        CHECK(lv.segments[0].length == 1362);
        CHECK(lv.segments[1].name == "plasticity");
        CHECK(lv.segments[1].length == 456640);
        CHECK(lv.total_len == 1362 + 456640);
    }
    SUBCASE("static baseline") {
        const auto lq = layout_for(quad, GenomeMode::static_weights());
        REQUIRE(lq.segments.size() == 1);
        CHECK(lq.segments[0].name == "direct_weights");
        CHECK(lq.total_len == 12288);

        const auto lv = layout_for(vis, GenomeMode::static_weights());
        CHECK(lv.total_len == 92690);
    }
    SUBCASE("variant scaling") {
        const int base = 12288;
        CHECK(layout_for(quad, GenomeMode::hebbian(PlasticityVariant::A_only)).total_len == base);
        CHECK(layout_for(quad, GenomeMode::hebbian(PlasticityVariant::A_plus_eta)).total_len ==
              2 * base);
        CHECK(layout_for(quad, GenomeMode::hebbian(PlasticityVariant::AD)).total_len == 2 * base);
        CHECK(layout_for(quad, GenomeMode::hebbian(PlasticityVariant::ABCD)).total_len == 4 * base);
        CHECK(layout_for(quad, GenomeMode::hebbian(PlasticityVariant::ABCD_plus_eta)).total_len ==
              5 * base);
    }
    SUBCASE("co-evolved initial weights add one synapse-count segment") {
        const auto l = layout_for(quad, GenomeMode::hebbian(PlasticityVariant::ABCD_plus_eta, true));
        CHECK(l.total_len == 61440 + 12288);
        CHECK(l.find("init_weights") != nullptr);
        CHECK(l.find("init_weights")->length == 12288);
    }
}

TEST_CASE("segments are contiguous, non-overlapping, and cover the genome") {
    for (const auto& topology : {tiny_topology(), tiny_conv_topology()}) {
        for (auto v : kAllVariants) {
            for (bool co : {false, true}) {
                const auto l = layout_for(topology, GenomeMode::hebbian(v, co));
                int at = 0;
                for (const auto& seg : l.segments) {
                    CHECK(seg.offset == at);
                    CHECK(seg.length > 0);
                    at += seg.length;
                }
                CHECK(at == l.total_len);
            }
        }
    }
}

TEST_CASE("decode/encode is a bit-exact bijection for every mode and variant") {
    int round_trips = 0;
    for (const auto& topology : {tiny_topology(), tiny_conv_topology()}) {
        std::vector<GenomeMode> modes;
        for (auto v : kAllVariants) {
            modes.push_back(GenomeMode::hebbian(v, false));
            modes.push_back(GenomeMode::hebbian(v, true));
        }
        modes.push_back(GenomeMode::static_weights());

        for (const auto& mode : modes) {
            const auto layout = layout_for(topology, mode);
            for (int rep = 0; rep < 50; ++rep) {
                const auto g = random_genome(layout, 100 + round_trips);
                const auto decoded = decode(g, topology);
                const auto back = encode(decoded, topology);
                REQUIRE(back.values.size() == g.values.size());
                CHECK(back.values == g.values);
                ++round_trips;
            }
        }
    }
    CHECK(round_trips == 2 * 11 * 50);  // 1,100 random genomes
}

TEST_CASE("all-zero hebbian genome decodes to all-zero coefficient tensors") {
    const auto t = tiny_topology();
    const auto layout = layout_for(t, GenomeMode::hebbian());
    Genome g;
    g.layout = layout;
    g.values = Eigen::VectorXd::Zero(layout.total_len);
    const auto decoded = decode(g, t);
    REQUIRE(decoded.coeffs.has_value());
    for (const auto* tensor :
         {&decoded.coeffs->A, &decoded.coeffs->B, &decoded.coeffs->C, &decoded.coeffs->D,
          &decoded.coeffs->eta}) {
        for (const auto& m : *tensor) CHECK(m.cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("hand-built single-synapse genome reduces to plain Hebb") {
    NetworkTopology t;
    t.input_dim = 1;
    t.fc_layer_sizes = {1};
    const auto layout = layout_for(t, GenomeMode::hebbian());
    REQUIRE(layout.total_len == 5);

    Genome g;
    g.layout = layout;
    g.values.resize(5);
    g.values << 1.0, 0.0, 0.0, 0.0, 1.0;  // A, B, C, D, eta

    const auto decoded = decode(g, t);
    auto w = WeightState::zeros(t);
    ActivationTrace trace;
    trace.pre = {Eigen::VectorXd::Constant(1, 0.3)};
    trace.post = {Eigen::VectorXd::Constant(1, 0.7)};
    REQUIRE(hebbian_step(w, *decoded.coeffs, trace));
    CHECK(w.layers[0](0, 0) == doctest::Approx(0.3 * 0.7).epsilon(1e-15));
}

TEST_CASE("inactive classes stay pinned after decode") {
    const auto t = tiny_topology();
    const auto layout = layout_for(t, GenomeMode::hebbian(PlasticityVariant::AD));
    const auto g = random_genome(layout, 9);
    const auto d = decode(g, t);
    for (const auto& m : d.coeffs->B) CHECK(m.cwiseAbs().maxCoeff() == 0.0);
    for (const auto& m : d.coeffs->C) CHECK(m.cwiseAbs().maxCoeff() == 0.0);
    for (const auto& m : d.coeffs->eta) {
        CHECK(m.minCoeff() == 1.0);  // eta pinned to one when not evolved
        CHECK(m.maxCoeff() == 1.0);
    }
    bool a_nonzero = false, d_nonzero = false;
    for (const auto& m : d.coeffs->A) a_nonzero |= m.cwiseAbs().maxCoeff() > 0;
    for (const auto& m : d.coeffs->D) d_nonzero |= m.cwiseAbs().maxCoeff() > 0;
    CHECK(a_nonzero);
    CHECK(d_nonzero);
}

TEST_CASE("static vision genome splits into conv params and fc weights") {
    const auto t = tiny_conv_topology();
    const auto layout = layout_for(t, GenomeMode::static_weights());
    CHECK(layout.total_len == t.conv_param_count() + t.fc_synapse_count());
    const auto g = random_genome(layout, 13);
    const auto d = decode(g, t);
    CHECK(static_cast<int>(d.conv_params.size()) == t.conv_param_count());
    REQUIRE(d.direct_weights.has_value());
    CHECK(d.direct_weights->layers.size() == 2);
    CHECK(!d.coeffs.has_value());
    // First conv_param_count genome entries are the conv segment, in order.
    for (int i = 0; i < t.conv_param_count(); ++i) {
        CHECK(d.conv_params[i] == g.values[i]);
    }
}

TEST_CASE("init_genome respects per-segment supports and is deterministic") {
    const auto t = tiny_conv_topology();
    for (const auto& mode :
         {GenomeMode::hebbian(PlasticityVariant::ABCD_plus_eta, true), GenomeMode::static_weights()}) {
        const auto layout = layout_for(t, mode);
        const auto g = init_genome(layout, 77);
        const auto h = init_genome(layout, 77);
        const auto k = init_genome(layout, 78);
        CHECK(g.values == h.values);
        CHECK(g.values != k.values);
        CHECK(g.seed == 77);

        for (const auto& seg : layout.segments) {
            const double bound = seg.name == "plasticity" ? 1.0 : 0.1;
            const double max_abs = g.values.segment(seg.offset, seg.length).cwiseAbs().maxCoeff();
            CHECK(max_abs <= bound);
            if (seg.name == "plasticity") {
                CHECK(max_abs > 0.1);  // actually uses the wider support
            }
        }
    }
}

TEST_CASE("decode rejects length and layout mismatches") {
    const auto t = tiny_topology();
    const auto layout = layout_for(t, GenomeMode::hebbian());
    Genome g;
    g.layout = layout;
    g.values = Eigen::VectorXd::Zero(layout.total_len - 1);
    CHECK_THROWS_AS(decode(g, t), std::invalid_argument);

    Genome h = random_genome(layout, 1);
    NetworkTopology other = t;
    other.fc_layer_sizes.back() += 1;
    CHECK_THROWS_AS(decode(h, other), std::invalid_argument);
}

TEST_CASE("genome checkpoints round-trip and reject mismatches") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "hebbnet_genome_test";
    fs::create_directories(dir);
    const std::string path = (dir / "g.hbgen").string();

    const auto t = tiny_conv_topology();
    const auto layout = layout_for(t, GenomeMode::hebbian(PlasticityVariant::AD, true));
    auto g = init_genome(layout, 123);
    g.generation = 42;
    save_genome(path, g);

    SUBCASE("round trip") {
        const auto loaded = load_genome(path, t);
        CHECK(loaded.values == g.values);
        CHECK(loaded.generation == 42);
        CHECK(loaded.seed == 123);
        CHECK(loaded.layout == g.layout);
    }
    SUBCASE("wrong topology is rejected") {
        CHECK_THROWS_AS(load_genome(path, tiny_topology()), std::runtime_error);
    }
    SUBCASE("corruption is detected") {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(64);
        char byte = 0;
        f.read(&byte, 1);
        f.seekp(64);
        byte ^= 0x40;
        f.write(&byte, 1);
        f.close();
        CHECK_THROWS_AS(load_genome(path, t), std::runtime_error);
    }
    SUBCASE("truncation is detected") {
        const auto full = fs::file_size(path);
        fs::resize_file(path, full / 2);
        CHECK_THROWS_AS(load_genome(path, t), std::runtime_error);
    }
    fs::remove_all(dir);
}
