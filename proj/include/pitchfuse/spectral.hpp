#pragma once

#include "pitchfuse/audio.hpp"
#include "pitchfuse/track.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace pitchfuse {

enum class WindowFunction { Hann };

/// Shared analysis resolution for every tracker in the toolkit.
struct AnalysisConfig {
    int sample_rate = kCanonicalRate;
    std::size_t window_size = 1024;
    std::size_t hop_size = 256;
    WindowFunction window_function = WindowFunction::Hann;

    /// Throws std::invalid_argument unless window_size >= hop_size > 0,
    /// window_size is a power of two and sample_rate > 0.
    void validate() const;

    /// floor((num_samples - window_size) / hop_size) + 1, or 0 for short input.
    std::size_t num_frames(std::size_t num_samples) const;

    /// Frame t is stamped at the centre of its window.
    double frame_time(std::size_t t) const;

    TimeGrid grid(std::size_t num_frames) const;
};

/// Mapping between frequencies and STFT bin indices.
struct BinGrid {
    int sample_rate = kCanonicalRate;
    std::size_t fft_size = 1024;

    std::size_t num_bins() const { return fft_size / 2 + 1; }
    double bin_width() const { return static_cast<double>(sample_rate) / static_cast<double>(fft_size); }
    double nyquist() const { return sample_rate / 2.0; }

    static BinGrid from(const AnalysisConfig& config) { return {config.sample_rate, config.window_size}; }
};

/// Nearest bin, ties rounding up. Throws std::out_of_range outside [0, Nyquist].
std::size_t freq_to_bin(double hz, const BinGrid& grid);

/// Centre frequency of bin k. Throws std::out_of_range when k >= num_bins.
double bin_to_freq(std::size_t k, const BinGrid& grid);

struct Spectrogram {
    AnalysisConfig config;
    std::size_t num_frames = 0;
    std::size_t num_bins = 0;
    std::vector<double> magnitudes;  // row-major [frame][bin]
    std::vector<double> times;

    std::span<const double> frame(std::size_t t) const {
        return {magnitudes.data() + t * num_bins, num_bins};
    }
    double at(std::size_t t, std::size_t k) const { return magnitudes[t * num_bins + k]; }
};

/// Periodic Hann window of length n.
std::vector<double> hann_window(std::size_t n);

/// Magnitude STFT. Frame t covers samples [t*hop, t*hop + window_size);
/// trailing samples shorter than a window are dropped.
///
/// Throws std::invalid_argument on a sample-rate mismatch or an invalid
/// config, and DataError when the buffer is shorter than one window.
Spectrogram stft(const AudioBuffer& buf, const AnalysisConfig& config);

}  // namespace pitchfuse
