#include "pitchfuse/pyin.hpp"

#include "pitchfuse/error.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pitchfuse {

std::vector<FrameCandidates> pyin_observations(const AudioBuffer& buf, const AnalysisConfig& config,
                                               const PitchSettings& settings) {
    config.validate();
    if (buf.sample_rate != config.sample_rate) {
        throw std::invalid_argument("pyin: buffer rate " + std::to_string(buf.sample_rate) +
                                    " Hz differs from analysis rate " + std::to_string(config.sample_rate) + " Hz");
    }
    if (buf.size() < config.window_size) {
        throw DataError("pyin: buffer of " + std::to_string(buf.size()) + " samples is shorter than one window");
    }

    const std::size_t tau_max = config.window_size / 2;
    const double rate = config.sample_rate;
    LagRange range;
    range.lo = std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(rate / settings.f_max)));
    range.hi = std::min(tau_max - 1, static_cast<std::size_t>(std::ceil(rate / settings.f_min)));

    const std::size_t frames = config.num_frames(buf.size());
    std::vector<FrameCandidates> out(frames);
    for (std::size_t t = 0; t < frames; ++t) {
        std::span<const double> frame(buf.samples.data() + t * config.hop_size, config.window_size);
        auto diff = difference_function(frame, tau_max);
        cmndf(diff);
        out[t] = pyin_candidates(diff, settings.prior, rate, range);
    }
    return out;
}

F0Track pyin_track(const AudioBuffer& buf, const AnalysisConfig& config, const PitchSettings& settings) {
    const auto model = build_hmm(settings.f_min, settings.f_max, settings.resolution_cents, settings.hmm);
    const auto observations = pyin_observations(buf, config, settings);
    return viterbi_decode(observations, model, config.grid(observations.size()));
}

}  // namespace pitchfuse
