#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "drlcheck/network.hpp"
#include "drlcheck/transition.hpp"

namespace drlcheck::testing {

inline std::string fixture_path(const std::string& name) {
    return std::string(DRLCHECK_FIXTURE_DIR) + "/" + name;
}

// The worked 2-2-1 example used throughout the suite. On [0,1]^2 the first
// hidden neuron is provably active ([1, 8]) and the second provably
// inactive ([-6, -1]), so out = 6 x0 + 15 x1 + 3 there.
inline Network make_fig1() {
    Eigen::MatrixXd w1(2, 2);
    w1 << 2, 5, -4, 1;
    Eigen::VectorXd b1(2);
    b1 << 1, -2;
    Eigen::MatrixXd w2(1, 2);
    w2 << 3, -1;
    Eigen::VectorXd b2(1);
    b2 << 0;
    return Network(2, {Layer::weighted_sum(w1, b1), Layer::relu(),
                       Layer::weighted_sum(w2, b2)});
}

inline std::shared_ptr<const Network> share(Network net) {
    return std::make_shared<const Network>(std::move(net));
}

// Fully connected ReLU net with uniform [-1, 1] weights and biases.
// dims = {inputs, hidden..., outputs}; ReLU after every hidden layer.
inline Network make_random_net(std::mt19937_64& rng,
                               const std::vector<std::size_t>& dims) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::vector<Layer> layers;
    for (std::size_t i = 1; i < dims.size(); ++i) {
        Eigen::MatrixXd w(dims[i], dims[i - 1]);
        Eigen::VectorXd b(dims[i]);
        for (long r = 0; r < w.rows(); ++r) {
            b(r) = coef(rng);
            for (long c = 0; c < w.cols(); ++c)
                w(r, c) = coef(rng);
        }
        layers.push_back(Layer::weighted_sum(std::move(w), std::move(b)));
        if (i + 1 < dims.size())
            layers.push_back(Layer::relu());
    }
    return Network(dims.front(), std::move(layers));
}

inline TransitionSpec make_spec(std::shared_ptr<const Network> net,
                                std::size_t window, std::size_t fields,
                                Box field_box) {
    TransitionSpec spec;
    spec.net = std::move(net);
    spec.window = window;
    spec.fields_per_step = fields;
    spec.field_boxes.assign(fields, field_box);
    return spec;
}

}
