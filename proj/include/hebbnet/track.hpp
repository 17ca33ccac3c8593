#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "hebbnet/env.hpp"

namespace hebbnet {

// Procedurally generated driving task on a grid-tile circuit. Geometry,
// car kinematics, and rendering are deliberately simple and deterministic;
// only the fitness structure (tile bonus minus per-frame cost) is the part
// that carries over from the benchmark this stands in for.
struct TrackParams {
    int min_width = 10;
    int max_width = 16;
    int min_height = 8;
    int max_height = 12;
    int bumps = 3;          // outward detours mutated into the rectangle; 0 = plain rectangle
    int max_bump_depth = 3;

    int patch = 16;         // egocentric observation is patch x patch
    int channels = 1;       // 1 = road mask; 3 = road / visited / speed planes
    double cell = 0.5;      // world units per observation pixel
    int episode_steps = 1000;
};

struct Tile {
    int x = 0;
    int y = 0;
    bool operator==(const Tile&) const = default;
};

struct TileHash {
    std::size_t operator()(const Tile& t) const {
        return static_cast<std::size_t>(static_cast<std::uint64_t>(static_cast<std::uint32_t>(t.x)) << 32 |
                                        static_cast<std::uint32_t>(t.y));
    }
};

struct Track {
    std::vector<Tile> cycle;                     // ordered, closed: cycle[N-1] adjacent to cycle[0]
    std::unordered_set<Tile, TileHash> lookup;   // same tiles, O(1) membership

    int size() const { return static_cast<int>(cycle.size()); }
    bool contains(int x, int y) const { return lookup.count(Tile{x, y}) > 0; }
};

// Every tile of a valid track has exactly two 4-neighbors in the set and
// the set is connected: a single simple cycle.
bool track_is_valid(const std::vector<Tile>& tiles);

// Deterministic per seed. Starts from a rectangle ring and applies `bumps`
// outward detour mutations, keeping only mutations that preserve validity.
Track generate_track(std::uint64_t seed, const TrackParams& params = {});

// 1000 * visited/N - 0.1 * frames; the per-step env rewards sum to this.
double tile_fitness(int tiles_visited, int total_tiles, int frames);

class TrackEnv final : public Environment {
public:
    explicit TrackEnv(TrackParams params = {});

    Observation reset(std::uint64_t seed) override;
    StepResult step(const Eigen::Ref<const Eigen::VectorXd>& action) override;

    int action_dim() const override { return 3; }  // steer, accelerate, brake
    int obs_dim() const override { return params_.channels * params_.patch * params_.patch; }
    int obs_channels() const override { return params_.channels; }
    int obs_height() const override { return params_.patch; }
    int obs_width() const override { return params_.patch; }
    std::string name() const override { return "track"; }

    const Track& track() const { return track_; }
    int tiles_visited() const { return visited_count_; }
    int frames() const { return t_; }

private:
    Observation render() const;
    void visit_current_tile();

    TrackParams params_;
    Track track_;
    std::unordered_set<Tile, TileHash> visited_;
    int visited_count_ = 0;
    double x_ = 0.0, y_ = 0.0, heading_ = 0.0, speed_ = 0.0;
    int t_ = 0;
    bool done_ = true;
};

}  // namespace hebbnet
