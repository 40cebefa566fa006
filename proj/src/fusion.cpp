#include "pitchfuse/fusion.hpp"

#include "pitchfuse/error.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace pitchfuse {

namespace {

void require_same_grid(const BinnedTrack& a, const BinnedTrack& b, const char* what) {
    if (!same_times(a.times, b.times)) {
        throw GridMismatch(std::string(what) + ": M1 and P do not share a time grid");
    }
}

F0Track empty_like(const BinnedTrack& track) {
    F0Track out;
    out.times = track.times;
    out.values.assign(track.size(), kUnvoiced);
    out.voicing_prob.assign(track.size(), 0.0);
    return out;
}

void take(F0Track& out, std::size_t t, const BinnedFrame& frame) {
    out.values[t] = frame.hz;
    out.voicing_prob[t] = frame.hz ? frame.voicing_prob : 0.0;
}

bool within_tolerance(const BinnedFrame& m1, const BinnedFrame& p, int tolerance) {
    if (!m1.bin || !p.bin) {
        return false;
    }
    const auto diff = static_cast<long long>(*p.bin) - static_cast<long long>(*m1.bin);
    return std::llabs(diff) <= tolerance;
}

bool window_unvoiced(const BinnedTrack& m1, std::size_t t, const FusionParams& params) {
    const std::size_t lo = t >= params.window_before ? t - params.window_before : 0;
    const std::size_t hi = std::min(m1.size() - 1, t + params.window_after);
    for (std::size_t k = lo; k <= hi; ++k) {
        if (m1.frames[k].hz) {
            return false;
        }
    }
    return true;
}

}  // namespace

BinnedTrack quantize_track(const F0Track& track, const BinGrid& grid) {
    BinnedTrack out;
    out.times = track.times;
    out.frames.resize(track.size());
    for (std::size_t t = 0; t < track.size(); ++t) {
        auto& frame = out.frames[t];
        frame.hz = track.values[t];
        frame.voicing_prob = t < track.voicing_prob.size() ? track.voicing_prob[t] : (frame.hz ? 1.0 : 0.0);
        if (frame.hz) {
            frame.bin = freq_to_bin(*frame.hz, grid);
        }
    }
    return out;
}

F0Track substitute_m1(const BinnedTrack& m1, const BinnedTrack& p, const FusionParams& params) {
    require_same_grid(m1, p, "substitute_m1");
    F0Track out = empty_like(m1);
    for (std::size_t t = 0; t < m1.size(); ++t) {
        if (!m1.frames[t].hz) {
            continue;
        }
        take(out, t, within_tolerance(m1.frames[t], p.frames[t], params.bin_tolerance) ? p.frames[t] : m1.frames[t]);
    }
    return out;
}

F0Track fill_gaps(const BinnedTrack& m1, const BinnedTrack& p, const FusionParams& params) {
    require_same_grid(m1, p, "fill_gaps");
    F0Track out = empty_like(m1);
    for (std::size_t t = 0; t < m1.size(); ++t) {
        if (m1.frames[t].hz) {
            take(out, t, m1.frames[t]);
        } else if (window_unvoiced(m1, t, params)) {
            take(out, t, p.frames[t]);
        }
    }
    return out;
}

F0Track fuse_first_voice(const F0Track& m1, const F0Track& p, const FusionParams& params) {
    require_same_grid(m1, p, "fuse_first_voice");
    const auto m1_binned = quantize_track(m1, params.grid);
    const auto p_binned = quantize_track(p, params.grid);
    const auto substituted = substitute_m1(m1_binned, p_binned, params);
    auto out = fill_gaps(m1_binned, p_binned, params);
    for (std::size_t t = 0; t < out.size(); ++t) {
        if (m1.values[t]) {
            out.values[t] = substituted.values[t];
            out.voicing_prob[t] = substituted.voicing_prob[t];
        }
    }
    return out;
}

MultiF0Track merge_into_multif0(const F0Track& fused_m1, const MultiF0Track& original) {
    if (original.voices.empty()) {
        return MultiF0Track{{fused_m1}};
    }
    pitchfuse::require_same_grid(fused_m1, original.voices.front(), "merge_into_multif0");
    MultiF0Track out = original;
    out.voices.front() = fused_m1;
    return out;
}

}  // namespace pitchfuse
