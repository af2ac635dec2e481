#include "neglr/lr_channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "neglr/errors.hpp"

namespace neglr {

namespace {

void require_nonempty(std::span<const double> values, const char* what) {
    if (values.empty()) throw EmptyInput(std::string(what) + ": empty batch");
}

bool all_equal(std::span<const double> values) {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return *lo == *hi;
}

double mean_of(std::span<const double> values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

}  // namespace

std::string_view to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::RawDistance: return "raw";
        case Scheme::UnitInterval: return "unit";
        case Scheme::SignedUnit: return "signed";
    }
    return "unknown";
}

Scheme parse_scheme(std::string_view name) {
    if (name == "raw") return Scheme::RawDistance;
    if (name == "unit") return Scheme::UnitInterval;
    if (name == "signed") return Scheme::SignedUnit;
    throw InvalidArgument("unknown scheme '" + std::string(name) + "'");
}

double dist_sine(double x, double z) { return std::abs(std::sin(x) - z); }

double dist_sine_vec(std::span<const double> x, std::span<const double> z) {
    if (x.size() != 1 || z.size() != 1) throw ShapeError("dist_sine expects scalar x and z");
    return dist_sine(x[0], z[0]);
}

std::vector<double> factors_raw(std::span<const double> dists) {
    return {dists.begin(), dists.end()};
}

std::vector<double> factors_unit(std::span<const double> dists) {
    require_nonempty(dists, "factors_unit");
    std::vector<double> out(dists.size(), 0.0);
    if (all_equal(dists)) return out;
    const auto [lo, hi] = std::minmax_element(dists.begin(), dists.end());
    const double span = *hi - *lo;
    for (std::size_t i = 0; i < dists.size(); ++i) out[i] = (*hi - dists[i]) / span;
    return out;
}

std::vector<double> center_and_scale(std::span<const double> values) {
    require_nonempty(values, "center_and_scale");
    std::vector<double> out(values.size(), 0.0);
    if (all_equal(values)) return out;
    const double mean = mean_of(values);
    double max_dev = 0.0;
    for (double v : values) max_dev = std::max(max_dev, std::abs(v - mean));
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - mean) / max_dev;
    return out;
}

std::vector<double> factors_signed(std::span<const double> dists) {
    require_nonempty(dists, "factors_signed");
    auto out = center_and_scale(dists);
    // Closer is better: flip polarity. Negating keeps +-1 and 0 exact.
    for (double& f : out) f = f == 0.0 ? 0.0 : -f;
    return out;
}

std::vector<double> compute_factors(std::span<const double> dists, Scheme scheme) {
    switch (scheme) {
        case Scheme::RawDistance: return factors_raw(dists);
        case Scheme::UnitInterval: return factors_unit(dists);
        case Scheme::SignedUnit: return factors_signed(dists);
    }
    throw InvalidArgument("unknown scheme");
}

std::vector<RatedExample> rate_examples(std::span<const ExamplePair> pairs,
                                        const DistanceFn& dist, Scheme scheme) {
    if (pairs.empty()) throw EmptyInput("rate_examples: empty batch");
    std::vector<double> dists;
    dists.reserve(pairs.size());
    for (const auto& p : pairs) dists.push_back(dist(p.x, p.z));
    const auto factors = compute_factors(dists, scheme);
    std::vector<RatedExample> out;
    out.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) out.push_back({pairs[i].x, pairs[i].z, factors[i]});
    return out;
}

}  // namespace neglr
