#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace neglr {

enum class Activation { Tanh, Identity };

/// Fully connected layer. Weights are stored row-major, out_dim x in_dim.
struct DenseLayer {
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    std::vector<double> weights;
    std::vector<double> biases;
    Activation activation = Activation::Identity;

    double& weight(std::size_t row, std::size_t col) { return weights[row * in_dim + col]; }
    double weight(std::size_t row, std::size_t col) const { return weights[row * in_dim + col]; }
};

/// Intermediates of one forward pass, consumed by `Mlp::backward`.
struct ForwardTrace {
    std::vector<double> input;
    std::vector<std::vector<double>> pre_activations;
    std::vector<std::vector<double>> activations;
};

struct LayerGradients {
    std::vector<double> weights;
    std::vector<double> biases;
};

/// Parameter gradients, shape-congruent with the network that produced them.
struct Gradients {
    std::vector<LayerGradients> layers;

    void scale(double factor);
    void accumulate(const Gradients& other);
};

struct ForwardResult {
    std::vector<double> output;
    ForwardTrace trace;
};

/// Dense feed-forward network: tanh hidden layers, identity output layer.
///
/// All operations are deterministic functions of their inputs; the only
/// source of randomness is the seed handed to `Mlp::init`.
class Mlp {
public:
    /// Takes ownership of prebuilt layers after checking the chaining and
    /// activation invariants. Throws InvalidArchitecture on violation.
    explicit Mlp(std::vector<DenseLayer> layers);

    /// Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) weights, zero biases.
    static Mlp init(std::span<const std::size_t> layer_sizes, std::uint64_t seed);
    static Mlp init(std::initializer_list<std::size_t> layer_sizes, std::uint64_t seed) {
        return init(std::span<const std::size_t>(layer_sizes.begin(), layer_sizes.size()), seed);
    }

    const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
    std::vector<DenseLayer>& layers() noexcept { return layers_; }

    std::vector<std::size_t> layer_sizes() const;
    std::size_t input_dim() const noexcept { return layers_.front().in_dim; }
    std::size_t output_dim() const noexcept { return layers_.back().out_dim; }
    std::size_t parameter_count() const noexcept;

    ForwardResult forward(std::span<const double> x) const;
    std::vector<double> predict(std::span<const double> x) const;

    /// Gradient of dot(output_grad, output) with respect to every parameter.
    Gradients backward(const ForwardTrace& trace, std::span<const double> output_grad) const;

    /// theta <- theta - effective_lr * clip(g, +-grad_clip). Negative rates
    /// are legal and move parameters uphill.
    void sgd_step(const Gradients& grads, double effective_lr, double grad_clip);

    /// backward followed by sgd_step, fused: no Gradients buffer is built and
    /// inputs that are exactly zero are skipped. Produces the same parameters
    /// as the two-call sequence.
    void train_step(const ForwardTrace& trace, std::span<const double> output_grad,
                    double effective_lr, double grad_clip);

    Gradients zero_gradients() const;
    bool all_finite() const noexcept;

    /// {"layer_sizes":[...], "weights":[[row-major]...], "biases":[[...]...]}
    std::string to_json() const;
    static Mlp from_json(const std::string& text);

    friend bool operator==(const Mlp&, const Mlp&) = default;

private:
    std::vector<DenseLayer> layers_;
};

inline bool operator==(const DenseLayer& a, const DenseLayer& b) {
    return a.in_dim == b.in_dim && a.out_dim == b.out_dim && a.weights == b.weights &&
           a.biases == b.biases && a.activation == b.activation;
}

}  // namespace neglr
