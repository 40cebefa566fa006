#pragma once

#include "pitchfuse/audio.hpp"
#include "pitchfuse/hmm.hpp"
#include "pitchfuse/spectral.hpp"
#include "pitchfuse/track.hpp"
#include "pitchfuse/yin.hpp"

namespace pitchfuse {

struct PitchSettings {
    double f_min = 55.0;
    double f_max = 1760.0;
    double resolution_cents = 20.0;
    HmmParams hmm;
    ThresholdPrior prior = ThresholdPrior::beta();
};

/// Per-frame PYIN candidates on the STFT frame grid. The correlation window
/// and the maximum lag are both window_size / 2.
std::vector<FrameCandidates> pyin_observations(const AudioBuffer& buf, const AnalysisConfig& config,
                                               const PitchSettings& settings);

/// Monophonic F0 track: difference function, CMNDF, probabilistic
/// thresholding and Viterbi smoothing, one frame per STFT frame.
F0Track pyin_track(const AudioBuffer& buf, const AnalysisConfig& config, const PitchSettings& settings = {});

}  // namespace pitchfuse
