#include "hebbnet/track.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "hebbnet/rng.hpp"

namespace hebbnet {

namespace {

constexpr int kDx[4] = {1, -1, 0, 0};
constexpr int kDy[4] = {0, 0, 1, -1};

int neighbor_count(const std::unordered_set<Tile, TileHash>& set, const Tile& t) {
    int n = 0;
    for (int d = 0; d < 4; ++d) {
        if (set.count(Tile{t.x + kDx[d], t.y + kDy[d]})) ++n;
    }
    return n;
}

// Walks the cycle from the lexicographically smallest tile so the ordering
// is a pure function of the tile set.
std::vector<Tile> order_cycle(const std::unordered_set<Tile, TileHash>& set) {
    Tile start = *set.begin();
    for (const Tile& t : set) {
        if (t.x < start.x || (t.x == start.x && t.y < start.y)) start = t;
    }
    std::vector<Tile> cycle;
    cycle.reserve(set.size());
    Tile prev{start.x - 100000, start.y};  // sentinel: not a neighbor
    Tile cur = start;
    do {
        cycle.push_back(cur);
        Tile next = cur;
        bool found = false;
        for (int d = 0; d < 4; ++d) {
            const Tile cand{cur.x + kDx[d], cur.y + kDy[d]};
            if (set.count(cand) && !(cand == prev)) {
                next = cand;
                found = true;
                break;
            }
        }
        if (!found) throw std::logic_error("track cycle walk hit a dead end");
        prev = cur;
        cur = next;
    } while (!(cur == start));
    return cycle;
}

}  // namespace

bool track_is_valid(const std::vector<Tile>& tiles) {
    if (tiles.size() < 8) return false;
    std::unordered_set<Tile, TileHash> set(tiles.begin(), tiles.end());
    if (set.size() != tiles.size()) return false;  // duplicates
    for (const Tile& t : set) {
        if (neighbor_count(set, t) != 2) return false;
    }
    // Connectivity: BFS from any tile must reach all.
    std::queue<Tile> frontier;
    std::unordered_set<Tile, TileHash> seen;
    frontier.push(*set.begin());
    seen.insert(*set.begin());
    while (!frontier.empty()) {
        const Tile t = frontier.front();
        frontier.pop();
        for (int d = 0; d < 4; ++d) {
            const Tile n{t.x + kDx[d], t.y + kDy[d]};
            if (set.count(n) && !seen.count(n)) {
                seen.insert(n);
                frontier.push(n);
            }
        }
    }
    return seen.size() == set.size();
}

Track generate_track(std::uint64_t seed, const TrackParams& params) {
    if (params.min_width < 6 || params.min_height < 6 ||
        params.max_width < params.min_width || params.max_height < params.min_height) {
        throw std::invalid_argument("track params: rectangle bounds must be >= 6 and ordered");
    }
    Rng rng(derive_seed(seed, {stream::track}));
    const int w = rng.uniform_int(params.min_width, params.max_width);
    const int h = rng.uniform_int(params.min_height, params.max_height);

    std::unordered_set<Tile, TileHash> set;
    for (int x = 0; x < w; ++x) {
        set.insert(Tile{x, 0});
        set.insert(Tile{x, h - 1});
    }
    for (int y = 0; y < h; ++y) {
        set.insert(Tile{0, y});
        set.insert(Tile{w - 1, y});
    }

    // Outward detours: displace a straight run on one side away from the
    // rectangle. Mutations that would break the exactly-two-neighbors cycle
    // property are discarded.
    int applied = 0;
    for (int attempt = 0; attempt < params.bumps * 8 && applied < params.bumps; ++attempt) {
        const int side = rng.uniform_int(0, 3);  // 0=top 1=bottom 2=left 3=right
        const bool horizontal = side < 2;
        const int extent = horizontal ? w : h;
        if (extent < 8) continue;
        const int run_len = rng.uniform_int(3, std::min(5, extent - 5));
        const int start = rng.uniform_int(2, extent - run_len - 2);
        const int depth = rng.uniform_int(1, params.max_bump_depth);

        const auto cell = [&](int along, int away) -> Tile {
            switch (side) {
                case 0: return Tile{along, -away};            // top edge y=0, outward -y
                case 1: return Tile{along, h - 1 + away};     // bottom edge, outward +y
                case 2: return Tile{-away, along};            // left edge x=0, outward -x
                default: return Tile{w - 1 + away, along};    // right edge, outward +x
            }
        };

        auto candidate = set;
        // Keep the run's end posts, remove its interior, and route the path
        // over the displaced run via two outward connectors.
        for (int i = start + 1; i < start + run_len - 1; ++i) candidate.erase(cell(i, 0));
        bool clash = false;
        const auto add = [&](const Tile& t) {
            if (!candidate.insert(t).second) clash = true;
        };
        for (int dj = 1; dj <= depth; ++dj) {
            add(cell(start, dj));
            add(cell(start + run_len - 1, dj));
        }
        for (int i = start + 1; i < start + run_len - 1; ++i) add(cell(i, depth));

        if (!clash) {
            std::vector<Tile> as_list(candidate.begin(), candidate.end());
            if (track_is_valid(as_list)) {
                set = std::move(candidate);
                ++applied;
            }
        }
    }

    Track track;
    track.lookup = set;
    track.cycle = order_cycle(set);
    if (!track_is_valid(track.cycle)) {
        throw std::logic_error("track generation produced an invalid cycle (seed " +
                               std::to_string(seed) + ")");
    }
    return track;
}

double tile_fitness(int tiles_visited, int total_tiles, int frames) {
    if (total_tiles <= 0) throw std::invalid_argument("tile_fitness: total_tiles must be positive");
    if (tiles_visited > total_tiles) {
        throw std::invalid_argument("tile_fitness: visited exceeds total");
    }
    return 1000.0 * static_cast<double>(tiles_visited) / static_cast<double>(total_tiles) -
           0.1 * static_cast<double>(frames);
}

TrackEnv::TrackEnv(TrackParams params) : params_(params) {
    if (params_.channels != 1 && params_.channels != 3) {
        throw std::invalid_argument("track observation supports 1 or 3 channels");
    }
    if (params_.patch < 4) throw std::invalid_argument("track patch must be at least 4");
}

Observation TrackEnv::reset(std::uint64_t seed) {
    track_ = generate_track(seed, params_);
    visited_.clear();
    visited_count_ = 0;
    t_ = 0;
    done_ = false;
    speed_ = 0.0;

    const Tile& first = track_.cycle[0];
    const Tile& second = track_.cycle[1];
    x_ = first.x + 0.5;
    y_ = first.y + 0.5;
    heading_ = std::atan2(static_cast<double>(second.y - first.y),
                          static_cast<double>(second.x - first.x));
    // The start tile is not credited here; the car cannot leave it in one
    // step, so its bonus lands in the first step's reward and the summed
    // rewards telescope exactly to tile_fitness().
    return render();
}

void TrackEnv::visit_current_tile() {
    const Tile here{static_cast<int>(std::floor(x_)), static_cast<int>(std::floor(y_))};
    if (track_.lookup.count(here) && visited_.insert(here).second) {
        ++visited_count_;
    }
}

StepResult TrackEnv::step(const Eigen::Ref<const Eigen::VectorXd>& action) {
    if (done_) throw std::logic_error("track stepped after episode end");
    if (action.size() != 3) {
        throw std::invalid_argument("track action dim " + std::to_string(action.size()) +
                                    ", expected 3 (steer, accelerate, brake)");
    }
    const double steer = std::clamp(action[0], -1.0, 1.0);
    const double gas = std::clamp(action[1], 0.0, 1.0);    // negative throttle coasts
    const double brake = std::clamp(action[2], 0.0, 1.0);  // negative brake is no brake

    // Kinematic unicycle, invented for this artifact; only the fitness
    // structure mirrors the benchmark.
    const bool on_track = track_.contains(static_cast<int>(std::floor(x_)),
                                          static_cast<int>(std::floor(y_)));
    constexpr double kMaxSpeed = 0.5;
    speed_ += 0.05 * gas - 0.1 * brake - 0.005;
    if (!on_track) speed_ -= 0.02;  // grass drag
    speed_ = std::clamp(speed_, 0.0, kMaxSpeed);
    heading_ += 0.15 * steer * (0.25 + 0.75 * speed_ / kMaxSpeed);

    x_ += speed_ * std::cos(heading_);
    y_ += speed_ * std::sin(heading_);

    const int before = visited_count_;
    visit_current_tile();
    ++t_;

    StepResult r;
    r.reward = -0.1 + 1000.0 / track_.size() * (visited_count_ - before);
    done_ = visited_count_ == track_.size() || t_ >= params_.episode_steps;
    r.done = done_;
    r.obs = render();
    return r;
}

Observation TrackEnv::render() const {
    const int p = params_.patch;
    const int c = params_.channels;
    Eigen::VectorXd values(c * p * p);
    values.setZero();

    const double cs = std::cos(heading_);
    const double sn = std::sin(heading_);
    const double center = (p - 1) / 2.0;
    for (int row = 0; row < p; ++row) {
        for (int col = 0; col < p; ++col) {
            // Egocentric: forward is up, car sits two pixels above the
            // bottom edge of the patch.
            const double fwd = (p - 3 - row) * params_.cell;
            const double lat = (col - center) * params_.cell;
            const double wx = x_ + fwd * cs - lat * sn;
            const double wy = y_ + fwd * sn + lat * cs;
            const int tx = static_cast<int>(std::floor(wx));
            const int ty = static_cast<int>(std::floor(wy));
            const bool road = track_.contains(tx, ty);
            values[(0 * p + row) * p + col] = road ? 1.0 : 0.0;
            if (c == 3) {
                const bool seen = road && visited_.count(Tile{tx, ty}) > 0;
                values[(1 * p + row) * p + col] = seen ? 1.0 : 0.0;
                values[(2 * p + row) * p + col] = speed_ / 0.5;
            }
        }
    }
    return Observation::image(values, c, p, p);
}

}  // namespace hebbnet
