#include "pitchfuse/multif0.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pitchfuse {

std::vector<double> f0_lattice(double f_min, double f_max, double resolution_cents) {
    if (!(f_min > 0.0) || !(f_max > f_min) || !(resolution_cents > 0.0)) {
        throw std::invalid_argument("f0_lattice: need 0 < f_min < f_max and a positive resolution");
    }
    const auto n = static_cast<std::size_t>(
        std::floor(1200.0 * std::log2(f_max / f_min) / resolution_cents + 1e-9));
    if (n == 0) {
        throw std::invalid_argument("f0_lattice: range is narrower than one step");
    }
    std::vector<double> axis(n);
    for (std::size_t i = 0; i < n; ++i) {
        axis[i] = f_min * std::exp2(static_cast<double>(i) * resolution_cents / 1200.0);
    }
    return axis;
}

SalienceMap harmonic_salience(const Spectrogram& spec, std::span<const double> f0_axis,
                              const SalienceParams& params) {
    if (f0_axis.empty()) {
        throw std::invalid_argument("harmonic_salience: empty F0 lattice");
    }
    if (params.harmonics == 0 || !(params.decay > 0.0 && params.decay <= 1.0)) {
        throw std::invalid_argument("harmonic_salience: need H >= 1 and decay in (0, 1]");
    }
    const BinGrid grid = BinGrid::from(spec.config);
    for (std::size_t i = 0; i < f0_axis.size(); ++i) {
        if (!(f0_axis[i] > 0.0 && f0_axis[i] < grid.nyquist()) || (i > 0 && !(f0_axis[i] > f0_axis[i - 1]))) {
            throw std::invalid_argument("harmonic_salience: lattice must be increasing within (0, Nyquist)");
        }
    }

    // Bin lookups per (f0, partial); partials past Nyquist are dropped.
    struct Partial {
        std::size_t bin;
        double weight;
    };
    std::vector<std::vector<Partial>> partials(f0_axis.size());
    std::vector<std::size_t> own_bin(f0_axis.size());
    for (std::size_t i = 0; i < f0_axis.size(); ++i) {
        own_bin[i] = freq_to_bin(f0_axis[i], grid);
        double weight = 1.0;
        for (std::size_t h = 1; h <= params.harmonics; ++h) {
            const double hz = static_cast<double>(h) * f0_axis[i];
            if (hz > grid.nyquist()) {
                break;
            }
            partials[i].push_back({freq_to_bin(hz, grid), weight});
            weight *= params.decay;
        }
    }

    SalienceMap sal;
    sal.num_frames = spec.num_frames;
    sal.f0_axis.assign(f0_axis.begin(), f0_axis.end());
    sal.times = spec.times;
    sal.values.assign(spec.num_frames * f0_axis.size(), 0.0);
    for (std::size_t t = 0; t < spec.num_frames; ++t) {
        const auto mags = spec.frame(t);
        const double gate = params.fundamental_gate > 0.0
                                ? params.fundamental_gate * *std::max_element(mags.begin(), mags.end())
                                : 0.0;
        double* row = sal.values.data() + t * f0_axis.size();
        for (std::size_t i = 0; i < f0_axis.size(); ++i) {
            if (gate > 0.0 && mags[own_bin[i]] < gate) {
                continue;
            }
            double sum = 0.0;
            for (const auto& p : partials[i]) {
                sum += p.weight * mags[p.bin];
            }
            row[i] = sum;
        }
    }
    return sal;
}

std::vector<std::vector<double>> peak_pick(const SalienceMap& sal, const PeakPickParams& params) {
    if (params.max_polyphony == 0) {
        throw std::invalid_argument("peak_pick: max_polyphony must be at least 1");
    }
    const std::size_t n = sal.f0_axis.size();
    std::vector<std::vector<double>> out(sal.num_frames);
    for (std::size_t t = 0; t < sal.num_frames; ++t) {
        const auto row = sal.frame(t);
        const double top = n == 0 ? 0.0 : *std::max_element(row.begin(), row.end());
        if (!(top > 0.0)) {
            continue;
        }
        const double floor_value = params.rel_threshold * top;

        struct Peak {
            std::size_t index;
            double value;
        };
        std::vector<Peak> peaks;
        for (std::size_t a = 0; a < n;) {
            std::size_t b = a;
            while (b + 1 < n && row[b + 1] == row[a]) {
                ++b;
            }
            const bool left = a == 0 || row[a - 1] < row[a];
            const bool right = b + 1 == n || row[b + 1] < row[b];
            if (left && right && row[a] > 0.0 && row[a] >= floor_value) {
                peaks.push_back({a + (b - a) / 2, row[a]});
            }
            a = b + 1;
        }
        std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& x, const Peak& y) { return x.value > y.value; });

        auto& chosen = out[t];
        for (const auto& p : peaks) {
            if (chosen.size() == params.max_polyphony) {
                break;
            }
            const double hz = sal.f0_axis[p.index];
            const bool clear = std::none_of(chosen.begin(), chosen.end(), [&](double other) {
                return std::abs(other - hz) <= params.min_separation_hz;
            });
            if (clear) {
                chosen.push_back(hz);
            }
        }
        std::sort(chosen.begin(), chosen.end());
    }
    return out;
}

MultiF0Track assign_voices(std::span<const std::vector<double>> frame_sets, const TimeGrid& grid,
                           double continuity_cents) {
    if (grid.count != frame_sets.size()) {
        throw std::invalid_argument("assign_voices: grid has " + std::to_string(grid.count) + " frames, got " +
                                    std::to_string(frame_sets.size()) + " frame sets");
    }
    const std::size_t frames = frame_sets.size();
    MultiF0Track out;
    std::vector<F0Value> last;  // last voiced value per voice

    const auto open_voice = [&]() {
        out.voices.push_back(F0Track::from_values(grid, {}));
        last.push_back(kUnvoiced);
    };

    for (std::size_t t = 0; t < frames; ++t) {
        std::vector<double> f0s = frame_sets[t];
        std::sort(f0s.begin(), f0s.end());
        std::vector<bool> claimed(f0s.size(), false);
        std::vector<bool> busy(out.voices.size(), false);

        for (std::size_t v = 0; v < out.voices.size(); ++v) {
            if (!last[v]) {
                continue;
            }
            std::size_t best = f0s.size();
            double best_dist = continuity_cents;
            for (std::size_t k = 0; k < f0s.size(); ++k) {
                if (claimed[k]) {
                    continue;
                }
                const double dist = std::abs(cents(*last[v], f0s[k]));
                if (dist <= best_dist && (best == f0s.size() || dist < best_dist)) {
                    best = k;
                    best_dist = dist;
                }
            }
            if (best < f0s.size()) {
                claimed[best] = true;
                busy[v] = true;
                out.voices[v].values[t] = f0s[best];
            }
        }

        std::size_t next_free = 0;
        for (std::size_t k = 0; k < f0s.size(); ++k) {
            if (claimed[k]) {
                continue;
            }
            while (next_free < busy.size() && busy[next_free]) {
                ++next_free;
            }
            if (next_free == busy.size()) {
                open_voice();
                busy.push_back(false);
            }
            busy[next_free] = true;
            out.voices[next_free].values[t] = f0s[k];
        }

        for (std::size_t v = 0; v < out.voices.size(); ++v) {
            auto& voice = out.voices[v];
            voice.voicing_prob[t] = voice.values[t] ? 1.0 : 0.0;
            if (voice.values[t]) {
                last[v] = voice.values[t];
            }
        }
    }

    if (out.voices.empty()) {
        open_voice();
    }
    return out;
}

MultiF0Track multif0_track(const AudioBuffer& buf, const AnalysisConfig& config, const MultiF0Settings& settings) {
    const auto spec = stft(buf, config);
    const auto axis = f0_lattice(settings.f_min, settings.f_max, settings.resolution_cents);
    const auto sal = harmonic_salience(spec, axis, settings.salience);
    PeakPickParams peaks = settings.peaks;
    if (peaks.min_separation_hz <= 0.0) {
        peaks.min_separation_hz = BinGrid::from(config).bin_width();
    }
    const auto sets = peak_pick(sal, peaks);
    return assign_voices(sets, config.grid(spec.num_frames), settings.continuity_cents);
}

}  // namespace pitchfuse
