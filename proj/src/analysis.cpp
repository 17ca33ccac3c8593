#include "hebbnet/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "hebbnet/io.hpp"

namespace hebbnet {

namespace {
constexpr std::uint32_t kTrajectoryMagic = 0x72746268;  // "hbtr"
constexpr std::uint32_t kTrajectoryVersion = 1;
}  // namespace

void WeightTrajectory::validate() const {
    if (rows.rows() != static_cast<Eigen::Index>(timesteps.size())) {
        throw std::invalid_argument("trajectory has " + std::to_string(rows.rows()) +
                                    " rows but " + std::to_string(timesteps.size()) +
                                    " timesteps");
    }
    for (std::size_t i = 1; i < timesteps.size(); ++i) {
        if (timesteps[i] <= timesteps[i - 1]) {
            throw std::invalid_argument("trajectory timesteps must be strictly increasing");
        }
    }
    if (stride < 1) throw std::invalid_argument("trajectory stride must be >= 1");
}

WeightTrajectory WeightTrajectory::from_outcome(const EpisodeOutcome& outcome,
                                                const NetworkTopology& topology, int stride) {
    if (outcome.weight_snapshots.empty()) {
        throw std::invalid_argument("episode outcome carries no weight snapshots");
    }
    WeightTrajectory traj;
    traj.topology_hash = topology.hash();
    traj.stride = stride;
    traj.timesteps = outcome.snapshot_steps;
    const Eigen::Index d = outcome.weight_snapshots.front().size();
    traj.rows.resize(static_cast<Eigen::Index>(outcome.weight_snapshots.size()), d);
    for (std::size_t i = 0; i < outcome.weight_snapshots.size(); ++i) {
        if (outcome.weight_snapshots[i].size() != d) {
            throw std::invalid_argument("snapshot " + std::to_string(i) + " has mismatched size");
        }
        traj.rows.row(static_cast<Eigen::Index>(i)) = outcome.weight_snapshots[i].transpose();
    }
    traj.validate();
    return traj;
}

void save_trajectory(const std::string& path, const WeightTrajectory& trajectory) {
    trajectory.validate();
    std::ostringstream body;
    io::write_u32(body, kTrajectoryMagic);
    io::write_u32(body, kTrajectoryVersion);
    io::write_u64(body, trajectory.topology_hash);
    io::write_u32(body, static_cast<std::uint32_t>(trajectory.stride));
    io::write_u32(body, static_cast<std::uint32_t>(trajectory.rows.rows()));
    io::write_u32(body, static_cast<std::uint32_t>(trajectory.rows.cols()));
    for (const int t : trajectory.timesteps) io::write_i32(body, t);
    for (Eigen::Index r = 0; r < trajectory.rows.rows(); ++r) {
        for (Eigen::Index c = 0; c < trajectory.rows.cols(); ++c) {
            io::write_f64(body, trajectory.rows(r, c));
        }
    }
    std::string content = body.str();
    const std::uint64_t checksum = io::fnv1a64(content.data(), content.size());
    std::ostringstream tail;
    io::write_u64(tail, checksum);
    content += tail.str();
    io::atomic_write_file(path, content);
}

WeightTrajectory load_trajectory(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open trajectory file: " + path);
    std::stringstream buffer;
    buffer << file.rdbuf();
    const std::string content = buffer.str();
    if (content.size() < 8) throw std::runtime_error("trajectory file truncated: " + path);
    const std::size_t body_len = content.size() - 8;

    std::istringstream in(content);
    if (io::read_u32(in) != kTrajectoryMagic) {
        throw std::runtime_error("not a trajectory file: " + path);
    }
    const auto version = io::read_u32(in);
    if (version != kTrajectoryVersion) {
        throw std::runtime_error("unsupported trajectory format version " +
                                 std::to_string(version));
    }
    WeightTrajectory traj;
    traj.topology_hash = io::read_u64(in);
    traj.stride = static_cast<int>(io::read_u32(in));
    const auto t = io::read_u32(in);
    const auto d = io::read_u32(in);
    if (t > (1u << 24) || d > (1u << 24)) {
        throw std::runtime_error("trajectory dimensions implausibly large");
    }
    traj.timesteps.resize(t);
    for (std::uint32_t i = 0; i < t; ++i) traj.timesteps[i] = io::read_i32(in);
    traj.rows.resize(t, d);
    for (std::uint32_t r = 0; r < t; ++r) {
        for (std::uint32_t c = 0; c < d; ++c) traj.rows(r, c) = io::read_f64(in);
    }
    if (static_cast<std::size_t>(in.tellg()) != body_len) {
        throw std::runtime_error("trajectory file has trailing or missing data: " + path);
    }
    const std::uint64_t stored = io::read_u64(in);
    if (stored != io::fnv1a64(content.data(), body_len)) {
        throw std::runtime_error("trajectory file checksum mismatch: " + path);
    }
    traj.validate();
    return traj;
}

namespace {

// Orthonormal fill-in for zero-variance directions the Gram path cannot
// recover: Gram-Schmidt a canonical basis vector against what's there.
Eigen::VectorXd orthonormal_filler(const Eigen::MatrixXd& components, int have, Eigen::Index d) {
    for (Eigen::Index basis = 0; basis < d; ++basis) {
        Eigen::VectorXd v = Eigen::VectorXd::Unit(d, basis);
        for (int k = 0; k < have; ++k) {
            v -= components.col(k).dot(v) * components.col(k);
        }
        const double norm = v.norm();
        if (norm > 1e-8) return v / norm;
    }
    throw std::logic_error("could not construct an orthonormal filler component");
}

}  // namespace

PcaResult pca3(const WeightTrajectory& trajectory, int gram_threshold) {
    trajectory.validate();
    const Eigen::Index t = trajectory.rows.rows();
    const Eigen::Index d = trajectory.rows.cols();
    if (t < 2) throw std::invalid_argument("PCA needs at least 2 recorded timesteps");
    if (d < 3) throw std::invalid_argument("PCA needs at least 3 weight dimensions");

    PcaResult result;
    result.mean = trajectory.rows.colwise().mean().transpose();
    const Eigen::MatrixXd centered = trajectory.rows.rowwise() - result.mean.transpose();
    const double denom = static_cast<double>(t - 1);
    result.total_variance = centered.squaredNorm() / denom;
    result.components.resize(d, 3);

    if (d <= gram_threshold) {
        const Eigen::MatrixXd cov = (centered.transpose() * centered) / denom;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
        if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
        // Eigen sorts ascending; take the top three from the back.
        for (int k = 0; k < 3; ++k) {
            const Eigen::Index src = d - 1 - k;
            result.components.col(k) = solver.eigenvectors().col(src);
            result.explained_variance[k] = std::max(0.0, solver.eigenvalues()[src]);
        }
    } else {
        const Eigen::MatrixXd gram = centered * centered.transpose();  // T x T
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
        if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
        const double scale_floor = std::max(1.0, solver.eigenvalues().cwiseAbs().maxCoeff());
        for (int k = 0; k < 3; ++k) {
            const Eigen::Index src = t - 1 - k;
            const double lambda = (src >= 0) ? solver.eigenvalues()[src] : 0.0;
            if (src >= 0 && lambda > 1e-12 * scale_floor) {
                Eigen::VectorXd u = centered.transpose() * solver.eigenvectors().col(src);
                result.components.col(k) = u / u.norm();
                result.explained_variance[k] = lambda / denom;
            } else {
                result.components.col(k) = orthonormal_filler(result.components, k, d);
                result.explained_variance[k] = std::max(0.0, lambda / denom);
            }
        }
    }

    // Deterministic sign: make the largest-magnitude entry of each component
    // positive.
    for (int k = 0; k < 3; ++k) {
        Eigen::Index at = 0;
        result.components.col(k).cwiseAbs().maxCoeff(&at);
        if (result.components(at, k) < 0.0) result.components.col(k) *= -1.0;
    }
    result.projection = centered * result.components;
    return result;
}

std::vector<SweepPoint> convergence_sweep(const NetworkTopology& topology,
                                          const DecodedGenome& genome, const EnvFactory& make_env,
                                          const std::vector<int>& freeze_steps,
                                          const std::vector<EpisodeSeeds>& seed_bank,
                                          const LifetimeOptions& base_options, int workers) {
    std::vector<SweepPoint> sweep;
    sweep.reserve(freeze_steps.size());
    for (const int at : freeze_steps) {
        LifetimeOptions options = base_options;
        options.schedule.events = {
            {.kind = PerturbationKind::freeze_plasticity, .at_step = at}};
        const EvalStats stats = evaluate(topology, genome, make_env, seed_bank, options, workers);
        sweep.push_back({at, stats.mean, stats.stddev});
    }
    return sweep;
}

int plateau_onset(const std::vector<SweepPoint>& sweep, double reference, double rel_tol) {
    const double bound = rel_tol * std::abs(reference);
    int onset = -1;
    // scan from the right: the onset is the first point of the final run of
    // in-tolerance points.
    for (auto it = sweep.rbegin(); it != sweep.rend(); ++it) {
        if (std::abs(it->mean_fitness - reference) <= bound) {
            onset = it->freeze_step;
        } else {
            break;
        }
    }
    return onset;
}

std::vector<HistogramResult> coefficient_histogram(const Genome& genome,
                                                   const NetworkTopology& topology, int bins) {
    if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");
    if (genome.layout.mode.kind != GenomeMode::Kind::hebbian) {
        throw std::invalid_argument("coefficient histograms require a hebbian-mode genome");
    }
    const DecodedGenome decoded = decode(genome, topology);

    std::vector<HistogramResult> out;
    for (const std::string& klass : active_coefficient_classes(genome.layout.mode.variant)) {
        const std::vector<Eigen::MatrixXd>* tensor = nullptr;
        if (klass == "A") tensor = &decoded.coeffs->A;
        else if (klass == "B") tensor = &decoded.coeffs->B;
        else if (klass == "C") tensor = &decoded.coeffs->C;
        else if (klass == "D") tensor = &decoded.coeffs->D;
        else tensor = &decoded.coeffs->eta;

        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        Eigen::Index total = 0;
        for (const auto& m : *tensor) {
            if (m.size() == 0) continue;
            lo = std::min(lo, m.minCoeff());
            hi = std::max(hi, m.maxCoeff());
            total += m.size();
        }
        if (total == 0) continue;
        if (lo == hi) {
            // Degenerate support: widen so the single value falls in one bin.
            lo -= 0.5;
            hi += 0.5;
        }

        HistogramResult h;
        h.coefficient_class = klass;
        h.edges = Eigen::VectorXd::LinSpaced(bins + 1, lo, hi);
        h.counts = Eigen::VectorXi::Zero(bins);
        const double width = (hi - lo) / bins;
        for (const auto& m : *tensor) {
            for (Eigen::Index i = 0; i < m.size(); ++i) {
                const double v = *(m.data() + i);
                const int bin =
                    std::min(bins - 1, std::max(0, static_cast<int>((v - lo) / width)));
                h.counts[bin] += 1;
            }
        }
        out.push_back(std::move(h));
    }
    return out;
}

Eigen::MatrixXd weight_frame(const WeightState& snapshot, int layer) {
    if (layer < 0 || layer >= static_cast<int>(snapshot.layers.size())) {
        throw std::invalid_argument("layer index " + std::to_string(layer) +
                                    " out of range for " +
                                    std::to_string(snapshot.layers.size()) + " layers");
    }
    return snapshot.layers[static_cast<std::size_t>(layer)];
}

Eigen::MatrixXd weight_frame(const Eigen::VectorXd& flat_snapshot,
                             const NetworkTopology& topology, int layer) {
    return weight_frame(WeightState::from_flat(topology, flat_snapshot), layer);
}

}  // namespace hebbnet
