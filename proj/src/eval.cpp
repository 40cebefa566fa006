#include "pitchfuse/eval.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace pitchfuse {

double flatness(const F0Track& track) {
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t t = 0; t + 1 < track.size(); ++t) {
        if (track.values[t] && track.values[t + 1]) {
            sum += std::abs(cents(*track.values[t], *track.values[t + 1]));
            ++pairs;
        }
    }
    return pairs == 0 ? 0.0 : sum / static_cast<double>(pairs);
}

double completeness(const F0Track& track) {
    if (track.size() == 0) {
        throw std::invalid_argument("completeness of an empty track");
    }
    return static_cast<double>(track.voiced_count()) / static_cast<double>(track.size());
}

double raw_pitch_accuracy(const F0Track& track, const F0Track& reference, double gate_cents) {
    require_same_grid(track, reference, "raw_pitch_accuracy");
    std::size_t voiced = 0;
    std::size_t hits = 0;
    for (std::size_t t = 0; t < reference.size(); ++t) {
        if (!reference.values[t]) {
            continue;
        }
        ++voiced;
        if (track.values[t] && std::abs(cents(*reference.values[t], *track.values[t])) <= gate_cents) {
            ++hits;
        }
    }
    return voiced == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(voiced);
}

EvalReport evaluate(const F0Track& track, const F0Track* reference, double gate_cents) {
    EvalReport report;
    report.flatness = flatness(track);
    report.completeness = completeness(track);
    report.voiced_frames = track.voiced_count();
    report.total_frames = track.size();
    if (reference) {
        report.raw_pitch_accuracy = raw_pitch_accuracy(track, *reference, gate_cents);
    }
    return report;
}

std::string EvalReport::to_string() const {
    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof buf, "flatness=%.4f\ncompleteness=%.4f\nvoiced_frames=%zu\ntotal_frames=%zu\n",
                  flatness, completeness, voiced_frames, total_frames);
    out += buf;
    if (raw_pitch_accuracy) {
        std::snprintf(buf, sizeof buf, "raw_pitch_accuracy=%.4f\n", *raw_pitch_accuracy);
        out += buf;
    }
    return out;
}

}  // namespace pitchfuse
