#include "pitchfuse/plot.hpp"

#include "pitchfuse/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace pitchfuse {

namespace {

constexpr double kWidth = 960.0;
constexpr double kHeight = 540.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 160.0;
constexpr double kTop = 20.0;
constexpr double kBottom = 50.0;
constexpr std::size_t kRasterColumns = 320;
constexpr std::size_t kRasterRows = 160;

constexpr std::array<const char*, 6> kPalette = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Axes {
    double t0, t1, f0, f1;

    double x(double t) const {
        const double span = t1 > t0 ? t1 - t0 : 1.0;
        return kLeft + (t - t0) / span * (kWidth - kLeft - kRight);
    }
    double y(double hz) const {
        const double pos = std::log2(hz / f0) / std::log2(f1 / f0);
        return kHeight - kBottom - pos * (kHeight - kTop - kBottom);
    }
};

void draw_spectrogram(std::string& svg, const Spectrogram& spec, const Axes& axes) {
    if (spec.num_frames == 0) {
        return;
    }
    const BinGrid grid = BinGrid::from(spec.config);
    const std::size_t cols = std::min(kRasterColumns, spec.num_frames);
    double peak = 0.0;
    for (double m : spec.magnitudes) {
        peak = std::max(peak, m);
    }
    if (!(peak > 0.0)) {
        return;
    }
    const double cell_w = (kWidth - kLeft - kRight) / static_cast<double>(cols);
    const double cell_h = (kHeight - kTop - kBottom) / static_cast<double>(kRasterRows);
    svg += "<g class=\"spectrogram\">\n";
    for (std::size_t c = 0; c < cols; ++c) {
        const std::size_t t_lo = c * spec.num_frames / cols;
        const std::size_t t_hi = std::max(t_lo + 1, (c + 1) * spec.num_frames / cols);
        for (std::size_t r = 0; r < kRasterRows; ++r) {
            const double hz_lo = axes.f0 * std::pow(axes.f1 / axes.f0, static_cast<double>(r) / kRasterRows);
            const double hz_hi = axes.f0 * std::pow(axes.f1 / axes.f0, static_cast<double>(r + 1) / kRasterRows);
            const std::size_t k_lo = freq_to_bin(std::min(hz_lo, grid.nyquist()), grid);
            const std::size_t k_hi = std::max(k_lo, freq_to_bin(std::min(hz_hi, grid.nyquist()), grid));
            double m = 0.0;
            for (std::size_t t = t_lo; t < t_hi; ++t) {
                for (std::size_t k = k_lo; k <= k_hi; ++k) {
                    m = std::max(m, spec.at(t, k));
                }
            }
            // 60 dB range mapped onto white..black.
            const double db = 20.0 * std::log10(std::max(m / peak, 1e-3));
            const int shade = static_cast<int>(std::lround(255.0 * (-db / 60.0)));
            if (shade >= 250) {
                continue;
            }
            char cell[160];
            std::snprintf(cell, sizeof cell,
                          "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"rgb(%d,%d,%d)\"/>\n",
                          kLeft + static_cast<double>(c) * cell_w,
                          kHeight - kBottom - static_cast<double>(r + 1) * cell_h, cell_w + 0.05, cell_h + 0.05,
                          shade, shade, shade);
            svg += cell;
        }
    }
    svg += "</g>\n";
}

}  // namespace

std::string plot_svg(const std::vector<LabelledTrack>& tracks, const Spectrogram* spec) {
    for (std::size_t i = 1; i < tracks.size(); ++i) {
        require_same_grid(tracks[0].track, tracks[i].track, "plot_tracks");
    }

    Axes axes{0.0, 1.0, 55.0, 1760.0};
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    bool have_time = false;
    for (const auto& [label, track] : tracks) {
        if (!track.times.empty()) {
            axes.t0 = track.times.front();
            axes.t1 = track.times.back();
            have_time = true;
        }
        for (const auto& v : track.values) {
            if (v) {
                lo = std::min(lo, *v);
                hi = std::max(hi, *v);
            }
        }
    }
    if (spec && !spec->times.empty() && !have_time) {
        axes.t0 = spec->times.front();
        axes.t1 = spec->times.back();
    }
    if (hi > 0.0) {
        axes.f0 = lo / std::exp2(0.5);
        axes.f1 = hi * std::exp2(0.5);
    }

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(kWidth) + "\" height=\"" +
           num(kHeight) + "\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) + "\" fill=\"white\"/>\n";
    if (spec) {
        draw_spectrogram(svg, *spec, axes);
    }

    // Axes frame, octave ticks on the frequency axis, second ticks on time.
    const double x0 = kLeft;
    const double x1 = kWidth - kRight;
    const double y0 = kHeight - kBottom;
    const double y1 = kTop;
    svg += "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
    svg += "<rect x=\"" + num(x0) + "\" y=\"" + num(y1) + "\" width=\"" + num(x1 - x0) + "\" height=\"" +
           num(y0 - y1) + "\"/>\n</g>\n";
    svg += "<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
    for (double hz = 27.5; hz <= axes.f1; hz *= 2.0) {
        if (hz < axes.f0) {
            continue;
        }
        svg += "<text x=\"" + num(x0 - 6) + "\" y=\"" + num(axes.y(hz) + 4) + "\" text-anchor=\"end\">" +
               num(hz) + "</text>\n";
    }
    const double span = axes.t1 - axes.t0;
    const double tick = span > 20 ? 5.0 : (span > 5 ? 1.0 : 0.25);
    for (double t = std::ceil(axes.t0 / tick) * tick; t <= axes.t1; t += tick) {
        svg += "<text x=\"" + num(axes.x(t)) + "\" y=\"" + num(y0 + 16) + "\" text-anchor=\"middle\">" + num(t) +
               "</text>\n";
    }
    svg += "<text x=\"" + num((x0 + x1) / 2) + "\" y=\"" + num(kHeight - 10) +
           "\" text-anchor=\"middle\">time (s)</text>\n";
    svg += "<text x=\"14\" y=\"" + num((y0 + y1) / 2) + "\" transform=\"rotate(-90 14 " + num((y0 + y1) / 2) +
           ")\" text-anchor=\"middle\">frequency (Hz)</text>\n</g>\n";

    for (std::size_t i = 0; i < tracks.size(); ++i) {
        const auto& track = tracks[i].track;
        const char* colour = kPalette[i % kPalette.size()];
        svg += "<g class=\"track\" id=\"track-" + std::to_string(i) + "\" stroke=\"" + colour +
               "\" stroke-width=\"1.5\" fill=\"none\">\n";
        std::string points;
        const auto flush = [&]() {
            if (!points.empty()) {
                svg += "<polyline points=\"" + points + "\"/>\n";
                points.clear();
            }
        };
        for (std::size_t t = 0; t < track.size(); ++t) {
            if (!track.values[t]) {
                flush();
                continue;
            }
            if (!points.empty()) {
                points += ' ';
            }
            points += num(axes.x(track.times[t])) + "," + num(axes.y(*track.values[t]));
        }
        flush();
        svg += "</g>\n";
    }

    svg += "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        const double y = kTop + 14.0 + 18.0 * static_cast<double>(i);
        const char* colour = kPalette[i % kPalette.size()];
        svg += "<line x1=\"" + num(x1 + 12) + "\" y1=\"" + num(y) + "\" x2=\"" + num(x1 + 36) + "\" y2=\"" + num(y) +
               "\" stroke=\"" + colour + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + num(x1 + 42) + "\" y=\"" + num(y + 4) + "\">" + escape(tracks[i].label) + "</text>\n";
    }
    svg += "</g>\n</svg>\n";
    return svg;
}

void plot_tracks(const std::vector<LabelledTrack>& tracks, const Spectrogram* spec,
                 const std::filesystem::path& out) {
    const std::string svg = plot_svg(tracks, spec);
    std::ofstream file(out, std::ios::binary);
    if (!file || !file.write(svg.data(), static_cast<std::streamsize>(svg.size()))) {
        throw UnreadableFile("cannot write " + out.string());
    }
}

}  // namespace pitchfuse
