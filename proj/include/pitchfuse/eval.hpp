#pragma once

#include "pitchfuse/track.hpp"

#include <cstddef>
#include <optional>
#include <string>

namespace pitchfuse {

/// Mean |1200 log2(f[t+1] / f[t])| over consecutive voiced-voiced frame
/// pairs, in cents per frame. 0 when there is no such pair.
double flatness(const F0Track& track);

/// Fraction of voiced frames. Throws std::invalid_argument for an empty track.
double completeness(const F0Track& track);

/// Over frames where `reference` is voiced, the fraction where `track` is
/// voiced and within `gate_cents` of it. Throws GridMismatch; returns 0 when
/// the reference has no voiced frame.
double raw_pitch_accuracy(const F0Track& track, const F0Track& reference, double gate_cents = 50.0);

struct EvalReport {
    double flatness = 0.0;
    double completeness = 0.0;
    std::size_t voiced_frames = 0;
    std::size_t total_frames = 0;
    std::optional<double> raw_pitch_accuracy;

    /// One `key=value` line per metric, 4 decimals for real values.
    std::string to_string() const;
};

EvalReport evaluate(const F0Track& track, const F0Track* reference = nullptr, double gate_cents = 50.0);

}  // namespace pitchfuse
