#include "neglr/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "json.hpp"
#include "neglr/errors.hpp"
#include "neglr/rng.hpp"

namespace neglr {

namespace {

void check_chain(const std::vector<DenseLayer>& layers) {
    if (layers.empty()) throw InvalidArchitecture("network has no layers");
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const auto& layer = layers[k];
        if (layer.in_dim == 0 || layer.out_dim == 0)
            throw InvalidArchitecture("layer " + std::to_string(k) + " has a zero dimension");
        if (layer.weights.size() != layer.in_dim * layer.out_dim ||
            layer.biases.size() != layer.out_dim)
            throw InvalidArchitecture("layer " + std::to_string(k) + " parameter shape mismatch");
        if (k + 1 < layers.size() && layer.out_dim != layers[k + 1].in_dim)
            throw InvalidArchitecture("layer " + std::to_string(k) + " does not chain into layer " +
                                      std::to_string(k + 1));
        const Activation expected =
            k + 1 == layers.size() ? Activation::Identity : Activation::Tanh;
        if (layer.activation != expected)
            throw InvalidArchitecture("hidden layers must be tanh and the output identity");
    }
}

}  // namespace

void Gradients::scale(double factor) {
    for (auto& layer : layers) {
        for (double& g : layer.weights) g *= factor;
        for (double& g : layer.biases) g *= factor;
    }
}

void Gradients::accumulate(const Gradients& other) {
    if (other.layers.size() != layers.size()) throw ShapeError("gradient layer count mismatch");
    for (std::size_t k = 0; k < layers.size(); ++k) {
        auto& dst = layers[k];
        const auto& src = other.layers[k];
        if (dst.weights.size() != src.weights.size() || dst.biases.size() != src.biases.size())
            throw ShapeError("gradient shape mismatch");
        for (std::size_t i = 0; i < dst.weights.size(); ++i) dst.weights[i] += src.weights[i];
        for (std::size_t i = 0; i < dst.biases.size(); ++i) dst.biases[i] += src.biases[i];
    }
}

Mlp::Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) { check_chain(layers_); }

Mlp Mlp::init(std::span<const std::size_t> layer_sizes, std::uint64_t seed) {
    if (layer_sizes.size() < 2)
        throw InvalidArchitecture("need at least an input and an output size");
    if (std::any_of(layer_sizes.begin(), layer_sizes.end(), [](std::size_t s) { return s == 0; }))
        throw InvalidArchitecture("layer sizes must be positive");

    Rng rng(seed);
    std::vector<DenseLayer> layers;
    layers.reserve(layer_sizes.size() - 1);
    for (std::size_t k = 0; k + 1 < layer_sizes.size(); ++k) {
        DenseLayer layer;
        layer.in_dim = layer_sizes[k];
        layer.out_dim = layer_sizes[k + 1];
        layer.activation = k + 2 == layer_sizes.size() ? Activation::Identity : Activation::Tanh;
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in_dim));
        layer.weights.resize(layer.in_dim * layer.out_dim);
        for (double& w : layer.weights) w = rng.uniform(-bound, bound);
        layer.biases.assign(layer.out_dim, 0.0);
        layers.push_back(std::move(layer));
    }
    return Mlp(std::move(layers));
}

std::vector<std::size_t> Mlp::layer_sizes() const {
    std::vector<std::size_t> sizes{layers_.front().in_dim};
    for (const auto& layer : layers_) sizes.push_back(layer.out_dim);
    return sizes;
}

std::size_t Mlp::parameter_count() const noexcept {
    std::size_t n = 0;
    for (const auto& layer : layers_) n += layer.weights.size() + layer.biases.size();
    return n;
}

ForwardResult Mlp::forward(std::span<const double> x) const {
    if (x.size() != input_dim())
        throw ShapeError("input has dimension " + std::to_string(x.size()) + ", expected " +
                         std::to_string(input_dim()));
    ForwardResult result;
    auto& trace = result.trace;
    trace.input.assign(x.begin(), x.end());
    trace.pre_activations.reserve(layers_.size());
    trace.activations.reserve(layers_.size());

    std::span<const double> in = trace.input;
    for (const auto& layer : layers_) {
        std::vector<double> pre(layer.biases);
        for (std::size_t r = 0; r < layer.out_dim; ++r) {
            const double* row = layer.weights.data() + r * layer.in_dim;
            double acc = 0.0;
            for (std::size_t c = 0; c < layer.in_dim; ++c)
                if (in[c] != 0.0) acc += row[c] * in[c];
            pre[r] += acc;
        }
        std::vector<double> act(pre);
        if (layer.activation == Activation::Tanh)
            for (double& a : act) a = std::tanh(a);
        trace.pre_activations.push_back(std::move(pre));
        trace.activations.push_back(std::move(act));
        in = trace.activations.back();
    }
    result.output = trace.activations.back();
    return result;
}

std::vector<double> Mlp::predict(std::span<const double> x) const {
    return forward(x).output;
}

Gradients Mlp::backward(const ForwardTrace& trace, std::span<const double> output_grad) const {
    if (trace.input.size() != input_dim() || trace.activations.size() != layers_.size() ||
        trace.pre_activations.size() != layers_.size())
        throw ShapeError("trace does not belong to this network");
    for (std::size_t k = 0; k < layers_.size(); ++k)
        if (trace.activations[k].size() != layers_[k].out_dim ||
            trace.pre_activations[k].size() != layers_[k].out_dim)
            throw ShapeError("trace does not belong to this network");
    if (output_grad.size() != output_dim()) throw ShapeError("output gradient dimension mismatch");

    Gradients grads;
    grads.layers.resize(layers_.size());

    // delta holds d(objective)/d(post-activation) of the current layer.
    std::vector<double> delta(output_grad.begin(), output_grad.end());
    for (std::size_t k = layers_.size(); k-- > 0;) {
        const auto& layer = layers_[k];
        if (layer.activation == Activation::Tanh) {
            const auto& act = trace.activations[k];
            for (std::size_t r = 0; r < layer.out_dim; ++r) delta[r] *= 1.0 - act[r] * act[r];
        }
        const std::vector<double>& in = k == 0 ? trace.input : trace.activations[k - 1];
        auto& g = grads.layers[k];
        g.biases = delta;
        g.weights.resize(layer.weights.size());
        for (std::size_t r = 0; r < layer.out_dim; ++r) {
            double* row = g.weights.data() + r * layer.in_dim;
            for (std::size_t c = 0; c < layer.in_dim; ++c) row[c] = delta[r] * in[c];
        }
        if (k > 0) {
            std::vector<double> upstream(layer.in_dim, 0.0);
            for (std::size_t r = 0; r < layer.out_dim; ++r) {
                if (delta[r] == 0.0) continue;
                const double* row = layer.weights.data() + r * layer.in_dim;
                for (std::size_t c = 0; c < layer.in_dim; ++c) upstream[c] += row[c] * delta[r];
            }
            delta = std::move(upstream);
        }
    }
    return grads;
}

void Mlp::sgd_step(const Gradients& grads, double effective_lr, double grad_clip) {
    if (!std::isfinite(effective_lr)) throw InvalidUpdate("effective learning rate is not finite");
    if (!(grad_clip > 0.0)) throw InvalidUpdate("grad_clip must be positive");
    if (grads.layers.size() != layers_.size()) throw ShapeError("gradient layer count mismatch");
    for (std::size_t k = 0; k < layers_.size(); ++k)
        if (grads.layers[k].weights.size() != layers_[k].weights.size() ||
            grads.layers[k].biases.size() != layers_[k].biases.size())
            throw ShapeError("gradient shape mismatch at layer " + std::to_string(k));
    if (effective_lr == 0.0) return;

    auto apply = [&](std::vector<double>& params, const std::vector<double>& g) {
        for (std::size_t i = 0; i < params.size(); ++i)
            params[i] -= effective_lr * std::clamp(g[i], -grad_clip, grad_clip);
    };
    for (std::size_t k = 0; k < layers_.size(); ++k) {
        apply(layers_[k].weights, grads.layers[k].weights);
        apply(layers_[k].biases, grads.layers[k].biases);
    }
}

void Mlp::train_step(const ForwardTrace& trace, std::span<const double> output_grad,
                     double effective_lr, double grad_clip) {
    if (!std::isfinite(effective_lr)) throw InvalidUpdate("effective learning rate is not finite");
    if (!(grad_clip > 0.0)) throw InvalidUpdate("grad_clip must be positive");
    if (trace.input.size() != input_dim() || trace.activations.size() != layers_.size())
        throw ShapeError("trace does not belong to this network");
    if (output_grad.size() != output_dim()) throw ShapeError("output gradient dimension mismatch");
    if (effective_lr == 0.0) return;

    std::vector<double> delta(output_grad.begin(), output_grad.end());
    std::vector<double> upstream;
    for (std::size_t k = layers_.size(); k-- > 0;) {
        auto& layer = layers_[k];
        if (trace.activations[k].size() != layer.out_dim)
            throw ShapeError("trace does not belong to this network");
        if (layer.activation == Activation::Tanh) {
            const auto& act = trace.activations[k];
            for (std::size_t r = 0; r < layer.out_dim; ++r) delta[r] *= 1.0 - act[r] * act[r];
        }
        const std::vector<double>& in = k == 0 ? trace.input : trace.activations[k - 1];
        // Upstream gradient needs the weights as they were before this update.
        if (k > 0) {
            upstream.assign(layer.in_dim, 0.0);
            for (std::size_t r = 0; r < layer.out_dim; ++r) {
                if (delta[r] == 0.0) continue;
                const double* row = layer.weights.data() + r * layer.in_dim;
                for (std::size_t c = 0; c < layer.in_dim; ++c) upstream[c] += row[c] * delta[r];
            }
        }
        for (std::size_t r = 0; r < layer.out_dim; ++r) {
            if (delta[r] == 0.0) continue;
            double* row = layer.weights.data() + r * layer.in_dim;
            for (std::size_t c = 0; c < layer.in_dim; ++c) {
                if (in[c] == 0.0) continue;
                row[c] -= effective_lr * std::clamp(delta[r] * in[c], -grad_clip, grad_clip);
            }
            layer.biases[r] -= effective_lr * std::clamp(delta[r], -grad_clip, grad_clip);
        }
        if (k > 0) delta.swap(upstream);
    }
}

Gradients Mlp::zero_gradients() const {
    Gradients grads;
    for (const auto& layer : layers_)
        grads.layers.push_back({std::vector<double>(layer.weights.size(), 0.0),
                                std::vector<double>(layer.biases.size(), 0.0)});
    return grads;
}

bool Mlp::all_finite() const noexcept {
    auto finite = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    };
    return std::all_of(layers_.begin(), layers_.end(), [&](const DenseLayer& layer) {
        return finite(layer.weights) && finite(layer.biases);
    });
}

std::string Mlp::to_json() const {
    nlohmann::json doc;
    doc["layer_sizes"] = layer_sizes();
    doc["weights"] = nlohmann::json::array();
    doc["biases"] = nlohmann::json::array();
    for (const auto& layer : layers_) {
        doc["weights"].push_back(layer.weights);
        doc["biases"].push_back(layer.biases);
    }
    return doc.dump();
}

Mlp Mlp::from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model JSON: ") + e.what());
    }
    try {
        const auto sizes = doc.at("layer_sizes").get<std::vector<std::size_t>>();
        const auto& weights = doc.at("weights");
        const auto& biases = doc.at("biases");
        if (sizes.size() < 2 || weights.size() + 1 != sizes.size() ||
            biases.size() + 1 != sizes.size())
            throw ParseError("model JSON: layer count mismatch");
        std::vector<DenseLayer> layers;
        for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
            DenseLayer layer;
            layer.in_dim = sizes[k];
            layer.out_dim = sizes[k + 1];
            layer.weights = weights[k].get<std::vector<double>>();
            layer.biases = biases[k].get<std::vector<double>>();
            layer.activation = k + 2 == sizes.size() ? Activation::Identity : Activation::Tanh;
            layers.push_back(std::move(layer));
        }
        return Mlp(std::move(layers));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model JSON: ") + e.what());
    } catch (const InvalidArchitecture& e) {
        throw ParseError(std::string("model JSON: ") + e.what());
    }
}

}  // namespace neglr
