#include "pitchfuse/track.hpp"

#include "pitchfuse/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pitchfuse {

std::vector<double> TimeGrid::times() const {
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) {
        out[k] = time(k);
    }
    return out;
}

std::size_t F0Track::voiced_count() const {
    return static_cast<std::size_t>(
        std::count_if(values.begin(), values.end(), [](const F0Value& v) { return v.has_value(); }));
}

F0Track F0Track::from_values(const TimeGrid& grid, std::vector<F0Value> values) {
    F0Track track;
    track.times = grid.times();
    track.values = std::move(values);
    track.values.resize(track.times.size());
    track.voicing_prob.resize(track.times.size());
    for (std::size_t t = 0; t < track.values.size(); ++t) {
        track.voicing_prob[t] = track.values[t] ? 1.0 : 0.0;
    }
    return track;
}

bool same_times(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i] - b[i]) > 1e-9) {
            return false;
        }
    }
    return true;
}

void require_same_grid(const F0Track& a, const F0Track& b, const char* what) {
    if (!same_times(a.times, b.times)) {
        throw GridMismatch(std::string(what) + ": tracks do not share a time grid (" +
                           std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " frames)");
    }
}

double cents(double from, double to) {
    return 1200.0 * std::log2(to / from);
}

}  // namespace pitchfuse
