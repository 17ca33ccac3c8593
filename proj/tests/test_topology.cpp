#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <stdexcept>

#include "hebbnet/topology.hpp"

using namespace hebbnet;

TEST_CASE("quadruped topology has the pinned synapse count") {
    const auto t = quadruped_topology();
    t.validate();
    CHECK(t.input_dim == 28);
    CHECK(t.fc_layer_sizes == std::vector<int>{128, 64, 8});
    CHECK(t.fc_synapse_count() == 12288);
    CHECK(t.action_dim() == 8);
    CHECK(!t.conv_frontend.has_value());
    CHECK(t.normalization == WeightNorm::none);

    const auto shapes = t.fc_shapes();
    REQUIRE(shapes.size() == 3);
    CHECK(shapes[0] == std::pair<int, int>{28, 128});
    CHECK(shapes[1] == std::pair<int, int>{128, 64});
    CHECK(shapes[2] == std::pair<int, int>{64, 8});
}

TEST_CASE("vision topology has the pinned parameter counts") {
    const auto t = vision_topology();
    t.validate();
    REQUIRE(t.conv_frontend.has_value());
    const auto& conv = *t.conv_frontend;

    CHECK(conv.param_count() == 1362);
    REQUIRE(conv.layers.size() == 2);
    CHECK(conv.layers[0].param_count() == 162);
    CHECK(conv.layers[1].param_count() == 1200);

    const auto dims = conv.stage_output_dims();
    REQUIRE(dims.size() == 2);
    CHECK(dims[0] == std::array<int, 3>{6, 41, 41});
    CHECK(dims[1] == std::array<int, 3>{8, 9, 9});
    CHECK(conv.flattened_output_dim() == 648);

    CHECK(t.input_dim == 648);
    CHECK(t.fc_synapse_count() == 91328);
    CHECK(t.action_dim() == 3);
    CHECK(t.normalization == WeightNorm::layer_max_abs);

    // conv + fc parameters together
    CHECK(conv.param_count() + t.fc_synapse_count() == 92690);
}

TEST_CASE("structural hash is stable and shape sensitive") {
    const auto a = quadruped_topology();
    auto b = quadruped_topology();
    CHECK(a.hash() == b.hash());

    b.fc_layer_sizes.back() = 9;
    CHECK(a.hash() != b.hash());

    auto c = quadruped_topology();
    c.input_dim = 29;
    CHECK(a.hash() != c.hash());

    auto d = quadruped_topology();
    d.normalization = WeightNorm::layer_max_abs;
    CHECK(a.hash() != d.hash());

    const auto v = vision_topology();
    CHECK(a.hash() != v.hash());
    auto v2 = vision_topology();
    v2.conv_frontend->layers[0].kernel = 5;
    CHECK(v.hash() != v2.hash());
}

TEST_CASE("validate rejects malformed topologies") {
    NetworkTopology t;
    CHECK_THROWS_AS(t.validate(), std::invalid_argument);

    t.input_dim = 4;
    CHECK_THROWS_AS(t.validate(), std::invalid_argument);  // no layers

    t.fc_layer_sizes = {8, 0};
    CHECK_THROWS_AS(t.validate(), std::invalid_argument);  // zero width

    t.fc_layer_sizes = {8, 2};
    CHECK_NOTHROW(t.validate());

    SUBCASE("conv flatten must match input_dim") {
        auto v = vision_topology();
        v.input_dim = 100;
        CHECK_THROWS_AS(v.validate(), std::invalid_argument);
    }
    SUBCASE("conv channel chain must be consistent") {
        auto v = vision_topology();
        v.conv_frontend->layers[1].in_channels = 5;
        CHECK_THROWS_AS(v.validate(), std::invalid_argument);
    }
    SUBCASE("kernel larger than image") {
        ConvFrontendSpec c;
        c.in_channels = 1;
        c.in_height = 4;
        c.in_width = 4;
        c.layers = {{.in_channels = 1, .out_channels = 1, .kernel = 5}};
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }
}

TEST_CASE("weight norm round-trips through strings") {
    CHECK(weight_norm_from_string(to_string(WeightNorm::none)) == WeightNorm::none);
    CHECK(weight_norm_from_string(to_string(WeightNorm::layer_max_abs)) ==
          WeightNorm::layer_max_abs);
    CHECK_THROWS_AS(weight_norm_from_string("bogus"), std::invalid_argument);
}
