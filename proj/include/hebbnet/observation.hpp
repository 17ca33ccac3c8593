#pragma once

#include <Eigen/Core>

namespace hebbnet {

// Either a flat state vector (channels == 0) or a CHW image tensor stored
// row-major in `values` (index = (c * height + y) * width + x).
struct Observation {
    Eigen::VectorXd values;
    int channels = 0;
    int height = 0;
    int width = 0;

    bool is_image() const { return channels > 0; }
    Eigen::Index dim() const { return values.size(); }

    static Observation flat(Eigen::VectorXd v) {
        Observation o;
        o.values = std::move(v);
        return o;
    }

    static Observation image(Eigen::VectorXd v, int c, int h, int w) {
        Observation o;
        o.values = std::move(v);
        o.channels = c;
        o.height = h;
        o.width = w;
        return o;
    }
};

}  // namespace hebbnet
