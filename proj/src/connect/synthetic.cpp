#include <map>
#include <numbers>

#include "cortex_atlas/connect.hpp"
#include "../util/rng.hpp"

namespace cortex::synth {

namespace {

std::vector<double> oscillation(detail::Rng& rng, std::size_t samples) {
    std::vector<double> s(samples, 0.0);
    for (int c = 0; c < 3; ++c) {
        const double period = 8.0 + 40.0 * rng.uniform();
        const double phase = 2.0 * std::numbers::pi * rng.uniform();
        const double amp = 0.5 + rng.uniform();
        for (std::size_t t = 0; t < samples; ++t)
            s[t] += amp * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period + phase);
    }
    return s;
}

}  // namespace

TimeSeriesField time_series(const std::vector<int>& labels, const TimeSeriesOptions& o) {
    detail::Rng rng(o.seed);
    const auto global = oscillation(rng, o.samples);
    std::map<int, std::vector<double>> regional;
    for (int l : labels)
        if (!regional.count(l)) regional[l] = {};
    for (auto& [id, s] : regional) s = oscillation(rng, o.samples);

    std::vector<double> values(labels.size() * o.samples);
    for (std::size_t v = 0; v < labels.size(); ++v) {
        const auto& r = regional[labels[v]];
        const double baseline = 100.0 + 10.0 * rng.uniform();
        for (std::size_t t = 0; t < o.samples; ++t)
            values[v * o.samples + t] =
                baseline + o.global_amplitude * global[t] + o.region_amplitude * r[t] + o.noise * rng.normal();
    }
    return make_time_series(labels.size(), o.samples, std::move(values));
}

}  // namespace cortex::synth
