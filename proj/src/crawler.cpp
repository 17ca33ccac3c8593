#include "hebbnet/crawler.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hebbnet/rng.hpp"

namespace hebbnet {

namespace {

// Base response matrix. Legs 0 and 1 ("front pair") are keystones: each has
// a strong positive self-response, and the remaining legs couple negatively
// to both, so that
//   - healthy:          optimum drives every leg at +1,
//   - leg 1 damaged:    optimum flips leg 1 to -1 (seen during training),
//   - leg 0 damaged:    optimum flips leg 0 to -1 (held out),
// and neither the all-ones policy nor the "always flip leg 1" hedge clears
// the solved threshold on the morphology it was not adapted to. The matrix
// is normalized to a unit-mean diagonal.
Eigen::MatrixXd base_response(int legs) {
    if (legs < 3) throw std::invalid_argument("crawler needs at least 3 legs");

    const int rear = legs - 2;
    // Column-sum (healthy gain) targets before normalization: front legs
    // carry 0.7 each, the rear legs share 0.5. Keeping the rear share small
    // matters: it caps the fitness of a policy that ignores the keystone
    // legs and just drags itself with the rear pair well below the solved
    // threshold, so nothing clears the bar without handling the fronts.
    const double front_gain = 0.7;
    const double rear_gain = 0.5 / rear;
    const double front_row_sum = 2.75;  // keystone strength

    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(legs, legs);
    m(0, 0) = front_row_sum;
    m(1, 1) = front_row_sum;
    // Rear rows: own positive diagonal, negative coupling to the front pair
    // sized so the front columns sum to front_gain.
    const double front_coupling = (front_gain - front_row_sum) / rear;
    for (int k = 2; k < legs; ++k) {
        m(k, k) = rear_gain;
        m(k, 0) = front_coupling;
        m(k, 1) = front_coupling;
    }
    const double diag_mean = m.diagonal().mean();
    return m / diag_mean;
}

}  // namespace

MorphologySet make_morphology_set(std::uint64_t seed, const CrawlerParams& params) {
    const int legs = params.legs;
    Eigen::MatrixXd m = base_response(legs);

    // Seeded jitter keeps the experiment-to-experiment variation real
    // without disturbing the structure above.
    Rng rng(derive_seed(seed, {stream::morphology}));
    for (int i = 0; i < legs; ++i) {
        for (int j = 0; j < legs; ++j) {
            m(i, j) += rng.uniform(-0.01, 0.01);
        }
    }

    const auto with_damage = [&](const std::string& name, int damaged_leg) {
        CrawlerMorphology morph;
        morph.name = name;
        morph.response = m;
        morph.damage = Eigen::VectorXd::Ones(legs);
        if (damaged_leg >= 0) morph.damage[damaged_leg] = params.damage_severity;
        return morph;
    };

    MorphologySet set;
    set.seen.push_back(with_damage("healthy", -1));
    set.seen.push_back(with_damage("damaged_leg_1", 1));
    set.unseen.push_back(with_damage("damaged_leg_0", 0));
    return set;
}

CrawlerEnv::CrawlerEnv(CrawlerParams params, CrawlerMorphology morphology)
    : params_(params), morphology_(std::move(morphology)) {
    if (morphology_.response.rows() != params_.legs ||
        morphology_.response.cols() != params_.legs ||
        morphology_.damage.size() != params_.legs) {
        throw std::invalid_argument("crawler morphology shape does not match leg count");
    }
    if ((morphology_.damage.array() < 0.0).any() || (morphology_.damage.array() > 1.0).any()) {
        throw std::invalid_argument("crawler damage entries must lie in [0,1]");
    }
    damped_response_ = morphology_.damage.asDiagonal() * morphology_.response;
    polarity_ = Eigen::VectorXd::Ones(params_.legs);
}

Observation CrawlerEnv::make_obs(const Eigen::VectorXd& loads) const {
    Eigen::VectorXd v(params_.legs + 3);
    v[0] = velocity_;
    v.segment(1, params_.legs) = loads;
    const double phase =
        2.0 * std::numbers::pi * static_cast<double>(t_ % params_.phase_period) /
        static_cast<double>(params_.phase_period);
    v[params_.legs + 1] = std::sin(phase);
    v[params_.legs + 2] = std::cos(phase);
    return Observation::flat(v);
}

Observation CrawlerEnv::reset(std::uint64_t seed) {
    velocity_ = 0.0;
    distance_ = 0.0;
    t_ = 0;
    done_ = false;
    // The dynamics themselves are noise-free; the only seeded quantity is
    // the episode's drive polarity of the front pair.
    polarity_ = Eigen::VectorXd::Ones(params_.legs);
    if (params_.polarity_flips && params_.legs >= 2) {
        Rng rng(derive_seed(seed, {stream::episode_polarity}));
        polarity_[0] = rng.uniform01() < 0.5 ? -1.0 : 1.0;
        polarity_[1] = rng.uniform01() < 0.5 ? -1.0 : 1.0;
    }
    return make_obs(Eigen::VectorXd::Zero(params_.legs));
}

StepResult CrawlerEnv::step(const Eigen::Ref<const Eigen::VectorXd>& action) {
    if (done_) throw std::logic_error("crawler stepped after episode end");
    if (action.size() != params_.legs) {
        throw std::invalid_argument("crawler action dim " + std::to_string(action.size()) +
                                    ", expected " + std::to_string(params_.legs));
    }
    const Eigen::VectorXd loads = damped_response_ * polarity_.cwiseProduct(action);
    const double l = static_cast<double>(params_.legs);
    const double v_target = loads.sum() / l - params_.energy_cost * action.squaredNorm() / l;
    velocity_ = (1.0 - params_.smoothing) * velocity_ + params_.smoothing * v_target;
    distance_ += velocity_;
    ++t_;
    done_ = t_ >= params_.episode_steps;

    StepResult r;
    r.obs = make_obs(loads);
    r.reward = velocity_;
    r.done = done_;
    return r;
}

}  // namespace hebbnet
