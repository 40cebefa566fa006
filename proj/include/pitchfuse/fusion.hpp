#pragma once

#include "pitchfuse/spectral.hpp"
#include "pitchfuse/track.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace pitchfuse {

/// Settings for merging a monophonic track P into the first voice M1.
///
/// A frame where both are voiced takes P when their STFT bins differ by at
/// most bin_tolerance. A frame where M1 is unvoiced takes P only when M1 is
/// unvoiced on every frame t+i, i in [-window_before, +window_after].
struct FusionParams {
    int bin_tolerance = 2;
    std::size_t window_before = 5;
    std::size_t window_after = 4;
    BinGrid grid;
};

struct BinnedFrame {
    F0Value hz;
    std::optional<std::size_t> bin;
    double voicing_prob = 0.0;
};

struct BinnedTrack {
    std::vector<double> times;
    std::vector<BinnedFrame> frames;

    std::size_t size() const { return frames.size(); }
};

/// Attaches the nearest STFT bin to every voiced frame; the frequency itself
/// is kept. Throws std::out_of_range for a value above Nyquist.
BinnedTrack quantize_track(const F0Track& track, const BinGrid& grid);

/// Frames where M1 is voiced: P's frequency if P is voiced within
/// bin_tolerance bins of M1, else M1's. Frames where M1 is unvoiced stay
/// unvoiced. Throws GridMismatch when the time grids differ.
F0Track substitute_m1(const BinnedTrack& m1, const BinnedTrack& p, const FusionParams& params);

/// Frames where M1 is unvoiced: P (voiced or not) if the whole M1 window
/// around the frame is unvoiced, else unvoiced. Frames outside the clip count
/// as unvoiced. Frames where M1 is voiced keep M1. Throws GridMismatch.
F0Track fill_gaps(const BinnedTrack& m1, const BinnedTrack& p, const FusionParams& params);

/// Substitution on M1-voiced frames, gap filling on M1-unvoiced frames. The
/// window test always reads the original M1 voicing.
F0Track fuse_first_voice(const F0Track& m1, const F0Track& p, const FusionParams& params);

/// `original` with voice 0 replaced by `fused_m1`. Throws GridMismatch.
MultiF0Track merge_into_multif0(const F0Track& fused_m1, const MultiF0Track& original);

}  // namespace pitchfuse
