#pragma once

#include "pitchfuse/audio.hpp"
#include "pitchfuse/spectral.hpp"
#include "pitchfuse/track.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace pitchfuse {

struct SalienceMap {
    std::size_t num_frames = 0;
    std::vector<double> f0_axis;
    std::vector<double> times;
    std::vector<double> values;  // row-major [frame][f0 index]

    std::span<const double> frame(std::size_t t) const {
        return {values.data() + t * f0_axis.size(), f0_axis.size()};
    }
    double at(std::size_t t, std::size_t i) const { return values[t * f0_axis.size() + i]; }
};

struct SalienceParams {
    std::size_t harmonics = 10;
    double decay = 0.8;
    /// A lattice F0 scores zero in a frame when the magnitude at its own bin
    /// is below this fraction of the frame's largest magnitude. 0 disables
    /// the gate and leaves the plain harmonic sum.
    double fundamental_gate = 0.0;
};

struct PeakPickParams {
    double rel_threshold = 0.3;
    std::size_t max_polyphony = 4;
    /// Picked F0s in one frame must differ by more than this many Hz.
    double min_separation_hz = 0.0;
};

struct MultiF0Settings {
    double f_min = 55.0;
    double f_max = 1760.0;
    double resolution_cents = 20.0;
    SalienceParams salience{10, 0.8, 0.1};
    PeakPickParams peaks;
    double continuity_cents = 100.0;
};

/// Log-spaced F0 lattice from f_min in `resolution_cents` steps with
/// floor(1200 log2(f_max / f_min) / resolution) points.
std::vector<double> f0_lattice(double f_min, double f_max, double resolution_cents);

/// salience(t, f0) = sum_{h=1..H} decay^(h-1) * |X(t, nearest_bin(h * f0))|;
/// partials above Nyquist contribute nothing.
///
/// Throws std::invalid_argument on an empty or non-increasing lattice,
/// H == 0 or decay outside (0, 1].
SalienceMap harmonic_salience(const Spectrogram& spec, std::span<const double> f0_axis,
                              const SalienceParams& params);

/// Local maxima along the F0 axis whose salience reaches rel_threshold times
/// the frame maximum, strongest first, at most max_polyphony per frame.
/// A flat-topped maximum reports the middle of its plateau. Frames whose
/// maximum is zero yield nothing. Each frame's result is sorted ascending.
std::vector<std::vector<double>> peak_pick(const SalienceMap& sal, const PeakPickParams& params);

/// Greedy voice building. Each voice, in index order, continues with the
/// unclaimed frame F0 nearest to its last voiced value when within
/// `continuity_cents`; the remaining F0s, ascending, fill voices left free in
/// this frame (lowest index first) and then open new voices. Voice 0 is
/// therefore seeded by the lowest F0 of the first non-empty frame.
MultiF0Track assign_voices(std::span<const std::vector<double>> frame_sets, const TimeGrid& grid,
                           double continuity_cents = 100.0);

/// Spectrogram -> salience -> peaks -> voices with the given settings.
/// The distinct-pitch separation is one STFT bin unless set explicitly.
MultiF0Track multif0_track(const AudioBuffer& buf, const AnalysisConfig& config,
                           const MultiF0Settings& settings = {});

}  // namespace pitchfuse
