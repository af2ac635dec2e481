#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace neglr {

/// How a batch of distances becomes per-example learning-rate factors.
enum class Scheme {
    RawDistance,   ///< factor = distance
    UnitInterval,  ///< closest -> 1, farthest -> 0
    SignedUnit,    ///< closest -> +1, farthest -> -1, mean distance -> 0
};

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view name);

/// One training example e_i = (x_i, z_i, r_i).
struct RatedExample {
    std::vector<double> x;
    std::vector<double> z;
    double factor = 0.0;
};

struct ExamplePair {
    std::vector<double> x;
    std::vector<double> z;
};

using DistanceFn = std::function<double(std::span<const double> x, std::span<const double> z)>;

/// |sin(x) - z|
double dist_sine(double x, double z);

/// Adapter of dist_sine for one-dimensional ExamplePair inputs.
double dist_sine_vec(std::span<const double> x, std::span<const double> z);

std::vector<double> factors_raw(std::span<const double> dists);

/// (max - d) / (max - min); all zeros when every distance is equal.
/// Throws EmptyInput on an empty batch.
std::vector<double> factors_unit(std::span<const double> dists);

/// -(d - mean) / max|d - mean|; all zeros when every distance is equal.
/// Throws EmptyInput on an empty batch.
std::vector<double> factors_signed(std::span<const double> dists);

/// (v - mean) / max|v - mean|; the polarity-preserving counterpart of
/// factors_signed, used where larger values are better (returns).
std::vector<double> center_and_scale(std::span<const double> values);

std::vector<double> compute_factors(std::span<const double> dists, Scheme scheme);

/// Distances are evaluated pairwise, then normalized jointly over the batch.
std::vector<RatedExample> rate_examples(std::span<const ExamplePair> pairs,
                                        const DistanceFn& dist, Scheme scheme);

}  // namespace neglr
