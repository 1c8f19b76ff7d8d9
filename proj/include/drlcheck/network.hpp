#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

namespace drlcheck {

enum class LayerKind { WeightedSum, Relu };

// One computed layer. The input layer is implicit: a network with
// input_size n and an empty layer list is rejected, the first entry of
// layers consumes the raw inputs.
struct Layer {
    LayerKind kind = LayerKind::Relu;
    // WeightedSum only: weights is (size x prev_size), biases has length size.
    Eigen::MatrixXd weights;
    Eigen::VectorXd biases;
    // Neuron count. For Relu this always equals the predecessor's size.
    std::size_t size = 0;

    static Layer weighted_sum(Eigen::MatrixXd weights, Eigen::VectorXd biases);
    static Layer relu();
};

class Network {
public:
    // Validates shapes; throws ModelError naming the offending layer and
    // dimension on any mismatch, and on non-finite weights or biases.
    Network(std::size_t input_size, std::vector<Layer> layers);

    std::size_t input_size() const { return input_size_; }
    std::size_t output_size() const { return output_size_; }
    const std::vector<Layer>& layers() const { return layers_; }

    // Neuron count of layer i (0-based over computed layers).
    std::size_t layer_size(std::size_t i) const { return layers_[i].size; }

    // Forward pass. Throws ModelError if input length differs from
    // input_size or the input carries non-finite values.
    Eigen::VectorXd evaluate(const Eigen::VectorXd& input) const;

private:
    std::size_t input_size_;
    std::size_t output_size_;
    std::vector<Layer> layers_;
};

// Model files are JSON with the keys input_size and layers, each layer
// being {"kind": "weighted_sum", "weights": [[...]], "biases": [...]} or
// {"kind": "relu"}. Serialization keeps full double round-trip precision.
Network load_network(const std::string& path);
Network parse_network(const std::string& text, const std::string& origin = "<string>");
void save_network(const Network& net, const std::string& path);
std::string format_network(const Network& net);

}
