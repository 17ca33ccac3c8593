#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "hebbnet/analysis.hpp"
#include "hebbnet/crawler.hpp"
#include "hebbnet/rng.hpp"
#include "oracles.hpp"

using namespace hebbnet;

namespace {

NetworkTopology desk_topology() {
    NetworkTopology t;
    t.input_dim = 7;
    t.fc_layer_sizes = {16, 8, 4};
    t.normalization = WeightNorm::layer_max_abs;
    return t;
}

WeightTrajectory random_walk_trajectory(std::uint64_t seed, int t, int d) {
    Rng rng(seed);
    WeightTrajectory traj;
    traj.topology_hash = seed;
    traj.timesteps.resize(t);
    traj.rows.resize(t, d);
    Eigen::VectorXd w(d);
    for (int j = 0; j < d; ++j) w[j] = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < t; ++i) {
        traj.timesteps[i] = i;
        traj.rows.row(i) = w.transpose();
        for (int j = 0; j < d; ++j) w[j] += 0.1 * rng.normal();
    }
    traj.validate();
    return traj;
}

double abs_cos(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return std::abs(a.dot(b)) / (a.norm() * b.norm());
}

void check_pca_invariants(const PcaResult& pca) {
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const double expected = (i == j) ? 1.0 : 0.0;
            CHECK(std::abs(pca.components.col(i).dot(pca.components.col(j)) - expected) < 1e-10);
        }
    }
    CHECK(pca.explained_variance[0] >= pca.explained_variance[1]);
    CHECK(pca.explained_variance[1] >= pca.explained_variance[2]);
    CHECK(pca.explained_variance[2] >= 0.0);
    // sign convention: largest-magnitude entry positive
    for (int k = 0; k < 3; ++k) {
        Eigen::Index at = 0;
        pca.components.col(k).cwiseAbs().maxCoeff(&at);
        CHECK(pca.components(at, k) > 0.0);
    }
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) {
        path = (std::filesystem::temp_directory_path() / name).string();
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("jacobi oracle solves a textbook 2x2") {
    Eigen::MatrixXd a(2, 2);
    a << 2, 1, 1, 2;
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    oracle::jacobi_eigen_symmetric(a, values, vectors);
    CHECK(values[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(values[1] == doctest::Approx(1.0).epsilon(1e-12));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(vectors(0, 0)) == doctest::Approx(inv_sqrt2).epsilon(1e-12));
    CHECK(std::abs(vectors(1, 0)) == doctest::Approx(inv_sqrt2).epsilon(1e-12));
    CHECK(vectors(0, 0) * vectors(1, 0) > 0.0);  // (1,1) direction
    CHECK(vectors(0, 1) * vectors(1, 1) < 0.0);  // (1,-1) direction
}

TEST_CASE("jacobi oracle satisfies the eigen equation on random symmetric matrices") {
    Rng rng(771);
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::MatrixXd m(6, 6);
        for (int i = 0; i < 36; ++i) m(i / 6, i % 6) = rng.normal();
        Eigen::MatrixXd a = 0.5 * (m + m.transpose());
        Eigen::VectorXd values;
        Eigen::MatrixXd vectors;
        oracle::jacobi_eigen_symmetric(a, values, vectors);
        for (int k = 0; k < 6; ++k) {
            CHECK((a * vectors.col(k) - values[k] * vectors.col(k)).norm() < 1e-10);
            if (k > 0) CHECK(values[k] <= values[k - 1]);
        }
        CHECK((vectors.transpose() * vectors - Eigen::MatrixXd::Identity(6, 6)).norm() < 1e-10);
    }
}

TEST_CASE("pca3 matches the brute-force oracle on 50 random trajectories") {
    for (int rep = 0; rep < 50; ++rep) {
        const WeightTrajectory traj = random_walk_trajectory(1000 + rep, 50, 20);
        const PcaResult pca = pca3(traj);
        check_pca_invariants(pca);

        Eigen::VectorXd top_values;
        Eigen::MatrixXd top_vectors;
        oracle::pca3_reference(traj.rows, top_values, top_vectors);
        for (int k = 0; k < 3; ++k) {
            CHECK(std::abs(pca.explained_variance[k] - top_values[k]) < 1e-8);
            CHECK(abs_cos(pca.components.col(k), top_vectors.col(k)) > 1.0 - 1e-8);
        }
    }
}

TEST_CASE("pca projection has zero column mean and reconstructs the retained variance") {
    const WeightTrajectory traj = random_walk_trajectory(42, 60, 25);
    const PcaResult pca = pca3(traj);

    for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(pca.projection.col(k).mean()) < 1e-10);
    }

    const Eigen::MatrixXd centered = traj.rows.rowwise() - pca.mean.transpose();
    const Eigen::MatrixXd residual = centered - pca.projection * pca.components.transpose();
    const double dropped = residual.squaredNorm() / static_cast<double>(traj.rows.rows() - 1);
    const double retained = pca.explained_variance.sum();
    CHECK(std::abs(dropped - (pca.total_variance - retained)) < 1e-8);
}

TEST_CASE("pca3 on a constant trajectory reports zero variance") {
    WeightTrajectory traj;
    traj.timesteps = {0, 1, 2, 3};
    traj.rows = Eigen::MatrixXd::Ones(4, 6) * 0.37;
    const PcaResult pca = pca3(traj);
    check_pca_invariants(pca);
    CHECK(pca.total_variance == 0.0);
    CHECK(pca.explained_variance.maxCoeff() == 0.0);
    CHECK(pca.projection.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pca3 on a collinear trajectory recovers the line") {
    Eigen::VectorXd u(5);
    u << 0.3, -0.8, 0.1, 0.4, -0.2;
    u.normalize();
    WeightTrajectory traj;
    traj.rows.resize(9, 5);
    for (int t = 0; t < 9; ++t) {
        traj.timesteps.push_back(t);
        traj.rows.row(t) = (static_cast<double>(t) * u).transpose();
    }
    const PcaResult pca = pca3(traj);
    check_pca_invariants(pca);
    CHECK(abs_cos(pca.components.col(0), u) > 1.0 - 1e-12);
    // the dominant entry of u is -0.8, so the sign-fixed component flips it
    CHECK(pca.components(1, 0) > 0.0);
    CHECK(pca.explained_variance[0] == doctest::Approx(pca.total_variance).epsilon(1e-12));
    CHECK(pca.explained_variance[1] < 1e-10);
    CHECK(pca.explained_variance[2] < 1e-10);
}

TEST_CASE("gram-matrix path agrees with the direct covariance path") {
    SUBCASE("full-rank tall-wide case") {
        const WeightTrajectory traj = random_walk_trajectory(99, 10, 40);
        const PcaResult direct = pca3(traj, 2000);
        const PcaResult gram = pca3(traj, 5);  // force the T x T path
        check_pca_invariants(gram);
        for (int k = 0; k < 3; ++k) {
            CHECK(std::abs(direct.explained_variance[k] - gram.explained_variance[k]) < 1e-9);
            CHECK(abs_cos(direct.components.col(k), gram.components.col(k)) > 1.0 - 1e-9);
        }
        CHECK((direct.projection - gram.projection).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(direct.total_variance == doctest::Approx(gram.total_variance).epsilon(1e-12));
    }
    SUBCASE("rank-deficient case still yields an orthonormal basis") {
        // 3 snapshots span at most a 2-dim subspace: the third component is
        // synthetic and must carry zero variance.
        const WeightTrajectory traj = random_walk_trajectory(7, 3, 12);
        const PcaResult gram = pca3(traj, 5);
        check_pca_invariants(gram);
        CHECK(gram.explained_variance[2] < 1e-12);
        const PcaResult direct = pca3(traj, 2000);
        for (int k = 0; k < 2; ++k) {
            CHECK(std::abs(direct.explained_variance[k] - gram.explained_variance[k]) < 1e-9);
            CHECK(abs_cos(direct.components.col(k), gram.components.col(k)) > 1.0 - 1e-9);
        }
    }
}

TEST_CASE("pca3 rejects undersized inputs") {
    WeightTrajectory one_row;
    one_row.timesteps = {0};
    one_row.rows = Eigen::MatrixXd::Zero(1, 8);
    CHECK_THROWS_AS(pca3(one_row), std::invalid_argument);

    WeightTrajectory thin;
    thin.timesteps = {0, 1, 2};
    thin.rows = Eigen::MatrixXd::Zero(3, 2);
    CHECK_THROWS_AS(pca3(thin), std::invalid_argument);
}

TEST_CASE("trajectory validation catches malformed shapes") {
    WeightTrajectory traj;
    traj.timesteps = {0, 1, 2};
    traj.rows = Eigen::MatrixXd::Zero(2, 4);
    CHECK_THROWS_AS(traj.validate(), std::invalid_argument);

    traj.rows = Eigen::MatrixXd::Zero(3, 4);
    traj.validate();

    traj.timesteps = {0, 2, 2};
    CHECK_THROWS_AS(traj.validate(), std::invalid_argument);

    traj.timesteps = {0, 1, 2};
    traj.stride = 0;
    CHECK_THROWS_AS(traj.validate(), std::invalid_argument);
}

TEST_CASE("trajectory capture from a recorded lifetime") {
    const NetworkTopology topology = desk_topology();
    const Genome genome =
        init_genome(layout_for(topology, GenomeMode::hebbian(PlasticityVariant::ABCD)), 404);
    const DecodedGenome decoded = decode(genome, topology);
    // scripted env kept local: fixed sinusoidal observations, no dynamics
    struct SineEnv final : Environment {
        int steps = 0;
        Observation reset(std::uint64_t) override {
            steps = 0;
            Observation o;
            o.values = Eigen::VectorXd::Zero(7);
            return o;
        }
        StepResult step(const Eigen::Ref<const Eigen::VectorXd>&) override {
            ++steps;
            Observation o;
            o.values.resize(7);
            for (int i = 0; i < 7; ++i) o.values[i] = std::sin(0.1 * steps + i);
            return {o, 0.0, false};
        }
        int action_dim() const override { return 4; }
        int obs_dim() const override { return 7; }
        int obs_channels() const override { return 0; }
        int obs_height() const override { return 0; }
        int obs_width() const override { return 0; }
        std::string name() const override { return "sine"; }
    } env;

    LifetimeOptions options;
    options.weight_seed = 5;
    options.env_seed = 6;
    options.horizon = 50;
    options.recording.record_weights = true;
    options.recording.weight_stride = 10;
    const EpisodeOutcome outcome = run_lifetime(topology, decoded, env, options);

    const WeightTrajectory traj = WeightTrajectory::from_outcome(outcome, topology, 10);
    CHECK(traj.timesteps == std::vector<int>{0, 10, 20, 30, 40, 50});
    CHECK(traj.rows.rows() == 6);
    CHECK(traj.rows.cols() == topology.fc_synapse_count());
    CHECK(traj.topology_hash == topology.hash());
    // plasticity moved the weights, so consecutive rows differ
    CHECK((traj.rows.row(0) - traj.rows.row(5)).cwiseAbs().maxCoeff() > 0.0);

    EpisodeOutcome bare;
    CHECK_THROWS_AS(WeightTrajectory::from_outcome(bare, topology, 1), std::invalid_argument);
}

TEST_CASE("trajectory files round-trip and reject corruption") {
    const WeightTrajectory traj = random_walk_trajectory(314, 12, 9);
    TempFile file("hebbnet_test_traj.bin");
    save_trajectory(file.path, traj);

    SUBCASE("round-trip is bit-exact") {
        const WeightTrajectory back = load_trajectory(file.path);
        CHECK(back.topology_hash == traj.topology_hash);
        CHECK(back.stride == traj.stride);
        CHECK(back.timesteps == traj.timesteps);
        CHECK(back.rows == traj.rows);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_trajectory(file.path + ".nope"), std::runtime_error);
    }
    SUBCASE("wrong magic") {
        std::fstream f(file.path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(0);
        f.put('X');
        f.close();
        CHECK_THROWS_AS(load_trajectory(file.path), std::runtime_error);
    }
    SUBCASE("flipped payload byte fails the checksum") {
        std::fstream f(file.path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekg(40);
        const char byte = static_cast<char>(f.get());
        f.seekp(40);
        f.put(static_cast<char>(byte ^ 0x10));
        f.close();
        CHECK_THROWS_AS(load_trajectory(file.path), std::runtime_error);
    }
    SUBCASE("truncation") {
        const auto full = std::filesystem::file_size(file.path);
        std::filesystem::resize_file(file.path, full - 13);
        CHECK_THROWS_AS(load_trajectory(file.path), std::runtime_error);
    }
}

TEST_CASE("coefficient histograms") {
    const NetworkTopology topology = quadruped_topology();

    SUBCASE("zero genome lands every coefficient in one bin per class") {
        const GenomeLayout layout =
            layout_for(topology, GenomeMode::hebbian(PlasticityVariant::ABCD_plus_eta));
        Genome genome;
        genome.values = Eigen::VectorXd::Zero(layout.total_len);
        genome.layout = layout;
        const auto histograms = coefficient_histogram(genome, topology, 10);
        REQUIRE(histograms.size() == 5);
        const std::vector<std::string> classes = {"A", "B", "C", "D", "eta"};
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK(histograms[i].coefficient_class == classes[i]);
            CHECK(histograms[i].edges.size() == 11);
            CHECK(histograms[i].counts.sum() == 12288);
            int nonzero = 0;
            for (int b = 0; b < histograms[i].counts.size(); ++b) {
                if (histograms[i].counts[b] > 0) ++nonzero;
            }
            CHECK(nonzero == 1);
            // degenerate support widens to a unit window around the value
            CHECK(histograms[i].edges[0] == doctest::Approx(-0.5));
            CHECK(histograms[i].edges[10] == doctest::Approx(0.5));
        }
    }

    SUBCASE("fresh genome support stays inside the init range") {
        const GenomeLayout layout =
            layout_for(topology, GenomeMode::hebbian(PlasticityVariant::ABCD_plus_eta));
        const Genome genome = init_genome(layout, 2024);
        for (const auto& h : coefficient_histogram(genome, topology, 32)) {
            CHECK(h.edges[0] >= -1.0);
            CHECK(h.edges[h.edges.size() - 1] <= 1.0);
            CHECK(h.counts.sum() == 12288);
            CHECK(h.counts.minCoeff() >= 0);
        }
    }

    SUBCASE("only the variant's active classes are reported") {
        const GenomeLayout layout = layout_for(topology, GenomeMode::hebbian(PlasticityVariant::AD));
        const Genome genome = init_genome(layout, 7);
        const auto histograms = coefficient_histogram(genome, topology, 8);
        REQUIRE(histograms.size() == 2);
        CHECK(histograms[0].coefficient_class == "A");
        CHECK(histograms[1].coefficient_class == "D");
    }

    SUBCASE("histogram is invariant to shuffling values within a class") {
        const GenomeLayout layout =
            layout_for(topology, GenomeMode::hebbian(PlasticityVariant::A_only));
        Genome genome = init_genome(layout, 99);
        const auto before = coefficient_histogram(genome, topology, 16);

        // A_only genomes are one class end to end, so any permutation of the
        // whole vector stays within the class.
        Rng rng(55);
        for (int i = static_cast<int>(genome.values.size()) - 1; i > 0; --i) {
            const int j = rng.uniform_int(0, i);
            std::swap(genome.values[i], genome.values[j]);
        }
        const auto after = coefficient_histogram(genome, topology, 16);
        REQUIRE(before.size() == after.size());
        CHECK(before[0].edges == after[0].edges);
        CHECK(before[0].counts == after[0].counts);
    }

    SUBCASE("static genomes are rejected") {
        const GenomeLayout layout = layout_for(topology, GenomeMode::static_weights());
        const Genome genome = init_genome(layout, 3);
        CHECK_THROWS_AS(coefficient_histogram(genome, topology, 8), std::invalid_argument);
    }

    SUBCASE("bin count must be positive") {
        const GenomeLayout layout =
            layout_for(topology, GenomeMode::hebbian(PlasticityVariant::A_only));
        const Genome genome = init_genome(layout, 1);
        CHECK_THROWS_AS(coefficient_histogram(genome, topology, 0), std::invalid_argument);
    }
}

TEST_CASE("convergence sweep endpoints match direct evaluations exactly") {
    NetworkTopology topology;
    topology.input_dim = 7;
    topology.fc_layer_sizes = {12, 4};
    topology.normalization = WeightNorm::layer_max_abs;

    const Genome genome =
        init_genome(layout_for(topology, GenomeMode::hebbian(PlasticityVariant::ABCD_plus_eta)), 17);
    const DecodedGenome decoded = decode(genome, topology);

    const CrawlerParams params;
    const MorphologySet morphologies = make_morphology_set(1234, params);
    const EnvFactory make_env = [&] {
        return std::make_unique<CrawlerEnv>(params, morphologies.seen.front());
    };

    LifetimeOptions options;
    options.horizon = 40;
    const auto bank = make_seed_bank(88, 0, 3);

    const auto sweep = convergence_sweep(topology, decoded, make_env, {0, 10, 40}, bank, options);
    REQUIRE(sweep.size() == 3);
    CHECK(sweep[0].freeze_step == 0);
    CHECK(sweep[1].freeze_step == 10);
    CHECK(sweep[2].freeze_step == 40);

    // T = horizon: the freeze never fires, so the point equals the
    // unperturbed evaluation bit for bit.
    const EvalStats plain = evaluate(topology, decoded, make_env, bank, options);
    CHECK(sweep[2].mean_fitness == plain.mean);
    CHECK(sweep[2].std_fitness == plain.stddev);

    // T = 0: identical to explicitly freezing plasticity at step 0.
    LifetimeOptions frozen = options;
    frozen.schedule.events = {{.kind = PerturbationKind::freeze_plasticity, .at_step = 0}};
    const EvalStats static_run = evaluate(topology, decoded, make_env, bank, frozen);
    CHECK(sweep[0].mean_fitness == static_run.mean);
    CHECK(sweep[0].std_fitness == static_run.stddev);

    // worker count must not change the numbers
    const auto parallel = convergence_sweep(topology, decoded, make_env, {0, 10, 40}, bank,
                                            options, 4);
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        CHECK(parallel[i].mean_fitness == sweep[i].mean_fitness);
        CHECK(parallel[i].std_fitness == sweep[i].std_fitness);
    }
}

TEST_CASE("plateau onset detection") {
    const std::vector<SweepPoint> sweep = {
        {0, 10.0, 0.0}, {10, 50.0, 0.0}, {20, 96.0, 0.0},
        {30, 99.0, 0.0}, {40, 101.0, 0.0}, {50, 100.0, 0.0},
    };
    CHECK(plateau_onset(sweep, 100.0, 0.05) == 20);
    // 101 at T=40 misses a 0.1% band, so the plateau shrinks to the last point
    CHECK(plateau_onset(sweep, 100.0, 0.001) == 50);
    CHECK(plateau_onset(sweep, 100.0, 0.02) == 30);
    CHECK(plateau_onset({}, 100.0, 0.05) == -1);
    CHECK(plateau_onset(sweep, 1000.0, 0.01) == -1);  // nothing in tolerance anywhere

    const std::vector<SweepPoint> flat = {{0, 7.0, 0.0}, {5, 7.0, 0.0}};
    CHECK(plateau_onset(flat, 7.0, 0.05) == 0);

    // an out-of-tolerance tail hides earlier in-tolerance points
    const std::vector<SweepPoint> dip = {{0, 100.0, 0.0}, {10, 0.0, 0.0}, {20, 100.0, 0.0}};
    CHECK(plateau_onset(dip, 100.0, 0.05) == 20);
}

TEST_CASE("weight frames expose per-layer pre x post grids") {
    const NetworkTopology topology = quadruped_topology();
    const WeightState zeros = WeightState::zeros(topology);

    CHECK(weight_frame(zeros, 0).rows() == 28);
    CHECK(weight_frame(zeros, 0).cols() == 128);
    CHECK(weight_frame(zeros, 1).rows() == 128);
    CHECK(weight_frame(zeros, 1).cols() == 64);
    CHECK(weight_frame(zeros, 2).rows() == 64);
    CHECK(weight_frame(zeros, 2).cols() == 8);
    CHECK_THROWS_AS(weight_frame(zeros, 3), std::invalid_argument);
    CHECK_THROWS_AS(weight_frame(zeros, -1), std::invalid_argument);

    // flat overload: row-major per layer, layers in order
    Eigen::VectorXd flat = Eigen::VectorXd::Zero(topology.fc_synapse_count());
    flat[4 * 128 + 9] = 0.625;  // layer 0, pre 4, post 9
    flat[28 * 128 + 3 * 64 + 11] = -0.25;  // layer 1, pre 3, post 11
    const Eigen::MatrixXd frame0 = weight_frame(flat, topology, 0);
    const Eigen::MatrixXd frame1 = weight_frame(flat, topology, 1);
    CHECK(frame0(4, 9) == 0.625);
    CHECK(frame0.cwiseAbs().sum() == 0.625);
    CHECK(frame1(3, 11) == -0.25);
    CHECK(frame1.cwiseAbs().sum() == 0.25);
}
