#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace pitchfuse {

/// A per-frame fundamental frequency. std::nullopt is the unvoiced marker.
using F0Value = std::optional<double>;

inline constexpr F0Value kUnvoiced = std::nullopt;

/// Uniform frame grid: frame k sits at first + k * step seconds.
struct TimeGrid {
    double first = 0.0;
    double step = 0.0;
    std::size_t count = 0;

    double time(std::size_t k) const { return first + static_cast<double>(k) * step; }
    std::vector<double> times() const;
};

struct F0Track {
    std::vector<double> times;
    std::vector<F0Value> values;
    std::vector<double> voicing_prob;

    std::size_t size() const { return values.size(); }
    bool voiced(std::size_t t) const { return values[t].has_value(); }
    std::size_t voiced_count() const;

    /// Builds a track on `grid` with the given values and voicing
    /// probability 1 for voiced frames, 0 otherwise.
    static F0Track from_values(const TimeGrid& grid, std::vector<F0Value> values);
};

/// Ordered voices on one time grid; voice 0 is the first voice (M1).
struct MultiF0Track {
    std::vector<F0Track> voices;

    std::size_t num_voices() const { return voices.size(); }
    std::size_t num_frames() const { return voices.empty() ? 0 : voices.front().size(); }
    const std::vector<double>& times() const { return voices.front().times; }
};

/// True when both time vectors have equal length and agree within 1e-9 s.
bool same_times(const std::vector<double>& a, const std::vector<double>& b);

/// Throws GridMismatch with `what` in the message unless same_times(a, b).
void require_same_grid(const F0Track& a, const F0Track& b, const char* what);

/// Signed pitch distance in cents from `from` to `to`.
double cents(double from, double to);

}  // namespace pitchfuse
