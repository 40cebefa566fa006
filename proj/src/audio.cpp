#include "pitchfuse/audio.hpp"

#include "pitchfuse/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace pitchfuse {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
}

struct WavFormat {
    std::uint16_t tag = 0;
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t bits = 0;
};

double decode_sample(const unsigned char* p, const WavFormat& fmt) {
    if (fmt.tag == kFormatPcm && fmt.bits == 16) {
        return static_cast<std::int16_t>(read_u16(p)) / 32768.0;
    }
    if (fmt.tag == kFormatPcm && fmt.bits == 24) {
        std::int32_t v = static_cast<std::int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
        if (v & 0x800000) {
            v -= 0x1000000;
        }
        return v / 8388608.0;
    }
    std::uint32_t bits = read_u32(p);
    float f;
    std::memcpy(&f, &bits, sizeof f);
    return static_cast<double>(f);
}

// Kaiser-windowed sinc kernel shared by all polyphase branches.
double bessel_i0(double x) {
    double sum = 1.0;
    double term = 1.0;
    const double q = x * x / 4.0;
    for (int k = 1; k < 64; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < sum * 1e-17) {
            break;
        }
    }
    return sum;
}

constexpr double kKaiserBeta = 8.0;
constexpr int kZeroCrossings = 32;
constexpr double kPassFraction = 0.9;

}  // namespace

AudioBuffer load_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UnreadableFile("cannot open " + path.string());
    }
    const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
    if (bytes.size() < 12 || std::memcmp(data, "RIFF", 4) != 0 || std::memcmp(data + 8, "WAVE", 4) != 0) {
        throw UnreadableFile(path.string() + " is not a RIFF/WAVE file");
    }

    WavFormat fmt;
    bool have_fmt = false;
    const unsigned char* pcm = nullptr;
    std::size_t pcm_bytes = 0;
    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const unsigned char* chunk = data + pos;
        const std::size_t size = read_u32(chunk + 4);
        const std::size_t body = pos + 8;
        const std::size_t avail = std::min(size, bytes.size() - body);
        if (std::memcmp(chunk, "fmt ", 4) == 0) {
            if (avail < 16) {
                throw UnreadableFile(path.string() + ": truncated fmt chunk");
            }
            fmt.tag = read_u16(data + body);
            fmt.channels = read_u16(data + body + 2);
            fmt.sample_rate = read_u32(data + body + 4);
            fmt.bits = read_u16(data + body + 14);
            if (fmt.tag == kFormatExtensible) {
                if (avail < 26) {
                    throw UnreadableFile(path.string() + ": truncated extensible fmt chunk");
                }
                // First two bytes of the sub-format GUID carry the real tag.
                fmt.tag = read_u16(data + body + 24);
            }
            have_fmt = true;
        } else if (std::memcmp(chunk, "data", 4) == 0) {
            pcm = data + body;
            pcm_bytes = avail;
        }
        pos = body + size + (size & 1);
    }
    if (!have_fmt || pcm == nullptr) {
        throw UnreadableFile(path.string() + ": missing fmt or data chunk");
    }

    const bool supported = (fmt.tag == kFormatPcm && (fmt.bits == 16 || fmt.bits == 24)) ||
                           (fmt.tag == kFormatFloat && fmt.bits == 32);
    if (!supported) {
        throw UnsupportedFormat(path.string() + ": unsupported codec (format tag " + std::to_string(fmt.tag) +
                                ", " + std::to_string(fmt.bits) + " bits)");
    }
    if (fmt.channels == 0 || fmt.sample_rate == 0) {
        throw UnsupportedFormat(path.string() + ": zero channels or zero sample rate");
    }

    const std::size_t sample_bytes = fmt.bits / 8;
    const std::size_t frame_bytes = sample_bytes * fmt.channels;
    const std::size_t num_frames = pcm_bytes / frame_bytes;
    if (num_frames == 0) {
        throw EmptyAudio(path.string() + " contains no audio frames");
    }

    AudioBuffer buf;
    buf.sample_rate = static_cast<int>(fmt.sample_rate);
    buf.samples.resize(num_frames);
    for (std::size_t i = 0; i < num_frames; ++i) {
        const unsigned char* frame = pcm + i * frame_bytes;
        double sum = 0.0;
        for (std::size_t c = 0; c < fmt.channels; ++c) {
            sum += decode_sample(frame + c * sample_bytes, fmt);
        }
        const double mono = sum / fmt.channels;
        if (!std::isfinite(mono)) {
            throw UnsupportedFormat(path.string() + ": non-finite sample at frame " + std::to_string(i));
        }
        buf.samples[i] = mono;
    }
    return buf;
}

void save_wav(const std::filesystem::path& path, const AudioBuffer& buf) {
    const auto data_bytes = static_cast<std::uint32_t>(buf.samples.size() * 4);
    std::string out;
    out.reserve(44 + data_bytes);
    out += "RIFF";
    put_u32(out, 36 + data_bytes);
    out += "WAVEfmt ";
    put_u32(out, 16);
    put_u16(out, kFormatFloat);
    put_u16(out, 1);
    put_u32(out, static_cast<std::uint32_t>(buf.sample_rate));
    put_u32(out, static_cast<std::uint32_t>(buf.sample_rate) * 4);
    put_u16(out, 4);
    put_u16(out, 32);
    out += "data";
    put_u32(out, data_bytes);
    for (double s : buf.samples) {
        const auto f = static_cast<float>(s);
        std::uint32_t bits;
        std::memcpy(&bits, &f, sizeof bits);
        put_u32(out, bits);
    }
    std::ofstream file(path, std::ios::binary);
    if (!file || !file.write(out.data(), static_cast<std::streamsize>(out.size()))) {
        throw UnreadableFile("cannot write " + path.string());
    }
}

AudioBuffer resample(const AudioBuffer& buf, int target_rate) {
    if (target_rate <= 0 || buf.sample_rate <= 0) {
        throw std::invalid_argument("resample: sample rates must be positive");
    }
    if (target_rate == buf.sample_rate) {
        return buf;
    }

    // Output sample n sits at input position n * down / up.
    const long g = std::gcd(static_cast<long>(buf.sample_rate), static_cast<long>(target_rate));
    const long up = target_rate / g;
    const long down = buf.sample_rate / g;

    const double ratio = static_cast<double>(target_rate) / buf.sample_rate;
    const double scale = std::min(1.0, ratio);
    const double cutoff = 0.5 * scale * kPassFraction;  // cycles per input sample
    const int half_width = static_cast<int>(std::ceil(kZeroCrossings / scale));
    const int taps = 2 * half_width;

    // phase p holds the kernel for fractional offset p / up.
    std::vector<double> bank(static_cast<std::size_t>(up) * taps);
    const double i0_beta = bessel_i0(kKaiserBeta);
    for (long p = 0; p < up; ++p) {
        const double frac = static_cast<double>(p) / up;
        for (int k = 0; k < taps; ++k) {
            // Tap k multiplies input sample (base - half_width + 1 + k).
            const double x = static_cast<double>(k - half_width + 1) - frac;
            const double r = x / half_width;
            double w = 0.0;
            if (std::abs(r) < 1.0) {
                w = bessel_i0(kKaiserBeta * std::sqrt(1.0 - r * r)) / i0_beta;
            }
            const double arg = 2.0 * cutoff * x;
            const double sinc = x == 0.0 ? 1.0 : std::sin(std::numbers::pi * arg) / (std::numbers::pi * arg);
            bank[static_cast<std::size_t>(p) * taps + k] = 2.0 * cutoff * sinc * w;
        }
    }

    const auto n_in = static_cast<long>(buf.samples.size());
    const auto n_out = static_cast<long>(std::llround(static_cast<double>(n_in) * target_rate / buf.sample_rate));
    AudioBuffer out;
    out.sample_rate = target_rate;
    out.samples.resize(static_cast<std::size_t>(n_out));
    for (long n = 0; n < n_out; ++n) {
        const long num = n * down;
        const long base = num / up;
        const long phase = num % up;
        const double* kernel = bank.data() + phase * taps;
        const long start = base - half_width + 1;
        const long k_lo = std::max(0L, -start);
        const long k_hi = std::min(static_cast<long>(taps), n_in - start);
        double acc = 0.0;
        for (long k = k_lo; k < k_hi; ++k) {
            acc += kernel[k] * buf.samples[static_cast<std::size_t>(start + k)];
        }
        out.samples[static_cast<std::size_t>(n)] = acc;
    }
    return out;
}

AudioBuffer load_canonical(const std::filesystem::path& path, int rate) {
    return resample(load_wav(path), rate);
}

AudioBuffer synthesize_harmonic(const F0Track& contour, std::span<const double> partial_amps,
                                int sample_rate) {
    if (partial_amps.empty()) {
        throw std::invalid_argument("synthesize_harmonic: partial_amps is empty");
    }
    if (sample_rate <= 0) {
        throw std::invalid_argument("synthesize_harmonic: sample rate must be positive");
    }
    const double nyquist = sample_rate / 2.0;
    const auto num_partials = static_cast<double>(partial_amps.size());
    for (const auto& v : contour.values) {
        if (v && (*v <= 0.0 || *v * num_partials >= nyquist)) {
            throw std::invalid_argument("synthesize_harmonic: " + std::to_string(*v) + " Hz with " +
                                        std::to_string(partial_amps.size()) + " partials aliases above Nyquist");
        }
    }

    AudioBuffer out;
    out.sample_rate = sample_rate;
    if (contour.times.empty()) {
        return out;
    }
    const std::size_t frames = contour.times.size();
    const double first = contour.times.front();
    const double step = frames > 1 ? (contour.times.back() - first) / static_cast<double>(frames - 1) : 1.0;
    const auto length = static_cast<std::size_t>(
        std::max(0LL, std::llround((contour.times.front() + contour.times.back()) * sample_rate)));
    out.samples.assign(length, 0.0);

    std::vector<double> phases(partial_amps.size(), 0.0);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t n = 0; n < length; ++n) {
        const double pos = (static_cast<double>(n) / sample_rate - first) / step;
        const auto nearest = static_cast<std::size_t>(
            std::clamp(std::llround(pos), 0LL, static_cast<long long>(frames - 1)));
        if (!contour.values[nearest]) {
            continue;
        }
        double f0 = *contour.values[nearest];
        if (pos > 0.0 && pos < static_cast<double>(frames - 1)) {
            const auto lo = static_cast<std::size_t>(std::floor(pos));
            const auto& a = contour.values[lo];
            const auto& b = contour.values[lo + 1];
            if (a && b) {
                const double frac = pos - static_cast<double>(lo);
                f0 = *a + frac * (*b - *a);
            }
        }
        double sample = 0.0;
        for (std::size_t h = 0; h < partial_amps.size(); ++h) {
            sample += partial_amps[h] * std::sin(phases[h]);
            phases[h] = std::fmod(phases[h] + two_pi * static_cast<double>(h + 1) * f0 / sample_rate, two_pi);
        }
        out.samples[n] = sample;
    }

    double peak = 0.0;
    for (double s : out.samples) {
        peak = std::max(peak, std::abs(s));
    }
    if (peak > 0.0) {
        const double gain = 0.8 / peak;
        for (double& s : out.samples) {
            s *= gain;
        }
    }
    return out;
}

}  // namespace pitchfuse
