#include "pitchfuse/spectral.hpp"

#include "pitchfuse/error.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pitchfuse {

namespace {

// FFTW planning touches global state; execution on distinct arrays does not.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

class RealFft {
public:
    explicit RealFft(std::size_t n)
        : n_(n),
          in_(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
          out_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)))) {
        if (!in_ || !out_) {
            throw std::bad_alloc();
        }
        std::lock_guard lock(planner_mutex());
        plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_.get(), out_.get(), FFTW_ESTIMATE);
    }
    ~RealFft() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    double* input() { return in_.get(); }
    void execute() { fftw_execute(plan_); }
    double magnitude(std::size_t k) const { return std::hypot(out_.get()[k][0], out_.get()[k][1]); }
    std::size_t size() const { return n_; }

private:
    std::size_t n_;
    std::unique_ptr<double, FftwFree> in_;
    std::unique_ptr<fftw_complex, FftwFree> out_;
    fftw_plan plan_ = nullptr;
};

}  // namespace

void AnalysisConfig::validate() const {
    if (sample_rate <= 0) {
        throw std::invalid_argument("sample rate must be positive");
    }
    if (hop_size == 0 || window_size < hop_size) {
        throw std::invalid_argument("need window_size >= hop_size > 0");
    }
    if (!std::has_single_bit(window_size)) {
        throw std::invalid_argument("window_size must be a power of two, got " + std::to_string(window_size));
    }
}

std::size_t AnalysisConfig::num_frames(std::size_t num_samples) const {
    if (num_samples < window_size) {
        return 0;
    }
    return (num_samples - window_size) / hop_size + 1;
}

double AnalysisConfig::frame_time(std::size_t t) const {
    return static_cast<double>(t * hop_size + window_size / 2) / sample_rate;
}

TimeGrid AnalysisConfig::grid(std::size_t frames) const {
    return {frame_time(0), static_cast<double>(hop_size) / sample_rate, frames};
}

std::size_t freq_to_bin(double hz, const BinGrid& grid) {
    if (!(hz >= 0.0 && hz <= grid.nyquist())) {
        throw std::out_of_range("frequency " + std::to_string(hz) + " Hz outside [0, Nyquist]");
    }
    return static_cast<std::size_t>(std::floor(hz / grid.bin_width() + 0.5));
}

double bin_to_freq(std::size_t k, const BinGrid& grid) {
    if (k >= grid.num_bins()) {
        throw std::out_of_range("bin " + std::to_string(k) + " outside grid of " +
                                std::to_string(grid.num_bins()) + " bins");
    }
    return static_cast<double>(k) * grid.bin_width();
}

std::vector<double> hann_window(std::size_t n) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
    }
    return w;
}

Spectrogram stft(const AudioBuffer& buf, const AnalysisConfig& config) {
    config.validate();
    if (buf.sample_rate != config.sample_rate) {
        throw std::invalid_argument("stft: buffer rate " + std::to_string(buf.sample_rate) +
                                    " Hz differs from analysis rate " + std::to_string(config.sample_rate) + " Hz");
    }
    if (buf.size() < config.window_size) {
        throw DataError("stft: buffer of " + std::to_string(buf.size()) + " samples is shorter than one window (" +
                        std::to_string(config.window_size) + ")");
    }

    Spectrogram spec;
    spec.config = config;
    spec.num_frames = config.num_frames(buf.size());
    spec.num_bins = config.window_size / 2 + 1;
    spec.magnitudes.resize(spec.num_frames * spec.num_bins);
    spec.times = config.grid(spec.num_frames).times();

    const auto window = hann_window(config.window_size);
    RealFft fft(config.window_size);
    for (std::size_t t = 0; t < spec.num_frames; ++t) {
        const double* src = buf.samples.data() + t * config.hop_size;
        double* in = fft.input();
        for (std::size_t i = 0; i < config.window_size; ++i) {
            in[i] = src[i] * window[i];
        }
        fft.execute();
        double* row = spec.magnitudes.data() + t * spec.num_bins;
        for (std::size_t k = 0; k < spec.num_bins; ++k) {
            row[k] = fft.magnitude(k);
        }
    }
    return spec;
}

}  // namespace pitchfuse
