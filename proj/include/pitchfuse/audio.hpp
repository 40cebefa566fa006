#pragma once

#include "pitchfuse/track.hpp"

#include <filesystem>
#include <span>
#include <vector>

namespace pitchfuse {

inline constexpr int kCanonicalRate = 22050;

/// Mono samples at a known rate. Samples are finite, nominally in [-1, 1].
struct AudioBuffer {
    std::vector<double> samples;
    int sample_rate = kCanonicalRate;

    std::size_t size() const { return samples.size(); }
    double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
};

/// Decodes a RIFF/WAVE file holding PCM16, PCM24 or IEEE float32 samples.
/// Multichannel audio is mixed to mono by the arithmetic mean of channels.
///
/// Throws UnreadableFile when the file cannot be opened or is not a RIFF/WAVE
/// container, UnsupportedFormat for any other codec or bit depth, and
/// EmptyAudio when the data chunk holds no frames.
AudioBuffer load_wav(const std::filesystem::path& path);

/// Writes a mono IEEE float32 WAV file.
void save_wav(const std::filesystem::path& path, const AudioBuffer& buf);

/// Band-limited rational resampling with a Kaiser-windowed sinc (beta 8)
/// polyphase filter. Output length is round(n * target / source). Content
/// above the lower of the two Nyquist frequencies is attenuated by at least
/// 60 dB. Equal rates return the input unchanged.
AudioBuffer resample(const AudioBuffer& buf, int target_rate);

/// Loads `path` and resamples it to `rate`.
AudioBuffer load_canonical(const std::filesystem::path& path, int rate = kCanonicalRate);

/// Phase-continuous additive synthesis along an F0 contour.
///
/// The contour's frame times are treated as frame centres: the output spans
/// round((times.front() + times.back()) * sample_rate) samples, so a contour
/// laid on an analysis grid re-analyses to the same number of frames.
/// Between two voiced frames the frequency is interpolated linearly; a sample
/// whose nearest frame is unvoiced is silent. The result is scaled so its
/// peak magnitude is 0.8 (silence stays silent).
///
/// Throws std::invalid_argument when `partial_amps` is empty or when a voiced
/// frame would put a partial at or above Nyquist.
AudioBuffer synthesize_harmonic(const F0Track& contour, std::span<const double> partial_amps,
                                int sample_rate);

}  // namespace pitchfuse
