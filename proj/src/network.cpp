#include "drlcheck/network.hpp"

#include <cmath>
#include <utility>

#include "drlcheck/errors.hpp"
#include "json_util.hpp"

namespace drlcheck {

Layer Layer::weighted_sum(Eigen::MatrixXd weights, Eigen::VectorXd biases) {
    if (biases.size() != weights.rows())
        throw ModelError("weighted_sum: " + std::to_string(biases.size()) + " biases for " +
                         std::to_string(weights.rows()) + " rows");
    Layer l;
    l.kind = LayerKind::WeightedSum;
    l.size = static_cast<std::size_t>(weights.rows());
    l.weights = std::move(weights);
    l.biases = std::move(biases);
    return l;
}

Layer Layer::relu() {
    Layer l;
    l.kind = LayerKind::Relu;
    return l;
}

Network::Network(std::size_t input_size, std::vector<Layer> layers)
    : input_size_(input_size), output_size_(0), layers_(std::move(layers)) {
    if (input_size_ == 0)
        throw ModelError("input_size must be positive");
    if (layers_.empty())
        throw ModelError("network must contain at least input and output layers");

    std::size_t prev = input_size_;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        Layer& l = layers_[i];
        if (l.kind == LayerKind::WeightedSum) {
            if (l.weights.rows() == 0)
                throw ModelError("layer " + std::to_string(i) +
                                 ": weighted_sum needs at least one row");
            if (static_cast<std::size_t>(l.weights.cols()) != prev)
                throw ModelError("layer " + std::to_string(i) + ": weights have " +
                                 std::to_string(l.weights.cols()) + " columns, expected " +
                                 std::to_string(prev));
            if (l.biases.size() != l.weights.rows())
                throw ModelError("layer " + std::to_string(i) + ": " +
                                 std::to_string(l.biases.size()) + " biases for " +
                                 std::to_string(l.weights.rows()) + " rows");
            if (!l.weights.allFinite() || !l.biases.allFinite())
                throw ModelError("layer " + std::to_string(i) +
                                 ": non-finite weight or bias");
            l.size = static_cast<std::size_t>(l.weights.rows());
        } else {
            // A ReLU layer mirrors its predecessor's width exactly.
            l.size = prev;
        }
        prev = l.size;
    }
    output_size_ = prev;
}

Eigen::VectorXd Network::evaluate(const Eigen::VectorXd& input) const {
    if (static_cast<std::size_t>(input.size()) != input_size_)
        throw ModelError("evaluate: input has length " + std::to_string(input.size()) +
                         ", network expects " + std::to_string(input_size_));
    if (!input.allFinite())
        throw ModelError("evaluate: non-finite input value");

    Eigen::VectorXd v = input;
    for (const Layer& l : layers_) {
        if (l.kind == LayerKind::WeightedSum)
            v = (l.weights * v + l.biases).eval();
        else
            v = v.cwiseMax(0.0).eval();
    }
    return v;
}

namespace {

Layer parse_layer(const Json& j, std::size_t index, const std::string& origin) {
    const std::string where = "layers[" + std::to_string(index) + "]";
    const std::string kind =
        require_string(require_field(j, "kind", origin), where + ".kind", origin);
    if (kind == "relu")
        return Layer::relu();
    if (kind != "weighted_sum")
        throw ParseError(origin + ": " + where + " has unknown kind \"" + kind + "\"");

    const Json& jw = require_array(require_field(j, "weights", origin),
                                   where + ".weights", origin);
    const Json& jb = require_array(require_field(j, "biases", origin),
                                   where + ".biases", origin);
    const std::size_t rows = jw.size();
    if (rows == 0)
        throw ParseError(origin + ": " + where + ".weights is empty");
    const std::size_t cols =
        require_array(jw[0], where + ".weights[0]", origin).size();

    Eigen::MatrixXd weights(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const Json& row = require_array(jw[r], where + ".weights row", origin);
        if (row.size() != cols)
            throw ParseError(origin + ": " + where + ".weights row " + std::to_string(r) +
                             " has " + std::to_string(row.size()) + " entries, expected " +
                             std::to_string(cols));
        for (std::size_t c = 0; c < cols; ++c)
            weights(static_cast<long>(r), static_cast<long>(c)) =
                require_number(row[c], where + ".weights entry", origin);
    }
    Eigen::VectorXd biases(static_cast<long>(jb.size()));
    for (std::size_t r = 0; r < jb.size(); ++r)
        biases(static_cast<long>(r)) =
            require_number(jb[r], where + ".biases entry", origin);
    return Layer::weighted_sum(std::move(weights), std::move(biases));
}

}

Network parse_network(const std::string& text, const std::string& origin) {
    const Json doc = parse_json_text(text, origin);
    const long input_size =
        require_int(require_field(doc, "input_size", origin), "input_size", origin);
    if (input_size <= 0)
        throw ParseError(origin + ": input_size must be positive");
    const Json& jl = require_array(require_field(doc, "layers", origin), "layers", origin);

    std::vector<Layer> layers;
    layers.reserve(jl.size());
    for (std::size_t i = 0; i < jl.size(); ++i)
        layers.push_back(parse_layer(jl[i], i, origin));

    try {
        return Network(static_cast<std::size_t>(input_size), std::move(layers));
    } catch (const ModelError& e) {
        throw ParseError(origin + ": " + e.what());
    }
}

Network load_network(const std::string& path) {
    return parse_network(read_text_file(path), path);
}

std::string format_network(const Network& net) {
    Json doc;
    doc["input_size"] = net.input_size();
    Json layers = Json::array();
    for (const Layer& l : net.layers()) {
        Json jl;
        if (l.kind == LayerKind::WeightedSum) {
            jl["kind"] = "weighted_sum";
            Json rows = Json::array();
            for (long r = 0; r < l.weights.rows(); ++r) {
                Json row = Json::array();
                for (long c = 0; c < l.weights.cols(); ++c)
                    row.push_back(l.weights(r, c));
                rows.push_back(std::move(row));
            }
            jl["weights"] = std::move(rows);
            Json biases = Json::array();
            for (long r = 0; r < l.biases.size(); ++r)
                biases.push_back(l.biases(r));
            jl["biases"] = std::move(biases);
        } else {
            jl["kind"] = "relu";
        }
        layers.push_back(std::move(jl));
    }
    doc["layers"] = std::move(layers);
    return doc.dump(2) + "\n";
}

void save_network(const Network& net, const std::string& path) {
    write_text_file(path, format_network(net));
}

}
