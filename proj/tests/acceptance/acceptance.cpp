// Acceptance run: one PASS/FAIL line per criterion.
//
// Exit status is non-zero when a criterion fails unexpectedly, or when a
// criterion listed as an expected failure starts passing (so the list is
// kept honest).

#include "../../tools/cli.hpp"
#include "../fusion_oracle.hpp"
#include "../hmm_oracle.hpp"
#include "../test_support.hpp"

#include "pitchfuse/audio.hpp"
#include "pitchfuse/eval.hpp"
#include "pitchfuse/fusion.hpp"
#include "pitchfuse/hmm.hpp"
#include "pitchfuse/multif0.hpp"
#include "pitchfuse/pyin.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>

using namespace pitchfuse;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
    // A failure beyond the documented shortfall of an expected failure.
    bool broken = false;
};

// Criteria that cannot be met as written; the reason is printed with the line.
const std::map<int, std::string> kExpectedFailures = {
    {4, "joint enumeration of every M1/P pair up to length 12 is 4^24 ~ 2.8e14 fusions"},
    {5, "with flatness averaged over voiced pairs, the filled frames inherit the local vibrato slope; "
        "the flatness condition holds only for some gap placements"},
};

std::string format(const char* spec, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, spec, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<double> voiced_values(const F0Track& track) {
    std::vector<double> out;
    for (const auto& v : track.values) {
        if (v) {
            out.push_back(*v);
        }
    }
    return out;
}

AudioBuffer mix(const AudioBuffer& a, const AudioBuffer& b) {
    AudioBuffer out = a;
    for (std::size_t i = 0; i < out.samples.size() && i < b.samples.size(); ++i) {
        out.samples[i] += b.samples[i];
    }
    return out;
}

AudioBuffer harmonic_tone(double hz, const std::vector<double>& amps, double seconds) {
    return synthesize_harmonic(testing::constant_contour(hz, testing::frames_for(seconds)), amps, kCanonicalRate);
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> time_column(const std::string& csv) {
    std::vector<std::string> out;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        out.push_back(line.substr(0, line.find(',')));
    }
    return out;
}

Outcome monophonic_accuracy() {
    const auto buf = testing::sine(440.0, 2.0, kCanonicalRate);
    const auto start = std::chrono::steady_clock::now();
    const auto track = pyin_track(buf, {});
    const double elapsed = seconds_since(start);
    const auto voiced = voiced_values(track);
    const double voiced_frac = static_cast<double>(voiced.size()) / static_cast<double>(track.size());
    const double err = voiced.empty() ? 1.0 : std::abs(testing::median(voiced) / 440.0 - 1.0);
    return {voiced_frac >= 0.99 && err < 0.005 && elapsed < 2.0,
            format("voiced %.2f%% of %zu frames, median error %.4f%%, %.3f s", 100.0 * voiced_frac, track.size(),
                   100.0 * err, elapsed)};
}

Outcome octave_robustness() {
    const auto track = pyin_track(harmonic_tone(220.0, {1.0, 0.5, 0.25}, 2.0), {});
    const auto voiced = voiced_values(track);
    if (voiced.empty()) {
        return {false, "no voiced frames"};
    }
    std::size_t octave = 0;
    for (double v : voiced) {
        if (std::abs(cents(440.0, v)) <= 50.0 || std::abs(cents(110.0, v)) <= 50.0) {
            ++octave;
        }
    }
    const double median = testing::median(voiced);
    const double octave_frac = static_cast<double>(octave) / static_cast<double>(voiced.size());
    return {std::abs(median / 220.0 - 1.0) < 0.005 && octave_frac < 0.01,
            format("median %.3f Hz, octave errors %.2f%% of %zu voiced frames", median, 100.0 * octave_frac,
                   voiced.size())};
}

Outcome multif0_recovery() {
    const std::vector<double> partials = {1.0, 0.5, 0.25};
    const auto buf = mix(harmonic_tone(220.0, partials, 2.0), harmonic_tone(330.0, partials, 2.0));
    MultiF0Settings settings;
    settings.peaks.max_polyphony = 2;
    const auto track = multif0_track(buf, {}, settings);
    std::size_t both = 0;
    for (std::size_t t = 0; t < track.num_frames(); ++t) {
        bool low = false;
        bool high = false;
        for (const auto& voice : track.voices) {
            if (const auto v = voice.values[t]) {
                low |= std::abs(cents(220.0, *v)) <= 20.0;
                high |= std::abs(cents(330.0, *v)) <= 20.0;
            }
        }
        both += low && high;
    }
    const double frac = static_cast<double>(both) / static_cast<double>(track.num_frames());
    const auto m1 = track.num_voices() ? voiced_values(track.voices[0]) : std::vector<double>{};
    const double m1_median = m1.empty() ? 0.0 : testing::median(m1);
    return {frac >= 0.9 && !m1.empty() && std::abs(cents(220.0, m1_median)) <= 20.0,
            format("both F0s within 20 cents in %.2f%% of %zu frames, M1 median %.3f Hz", 100.0 * frac,
                   track.num_frames(), m1_median)};
}

Outcome fusion_exhaustive() {
    const BinGrid grid;
    const std::vector<F0Value> alphabet = {kUnvoiced, bin_to_freq(20, grid), bin_to_freq(21, grid),
                                           bin_to_freq(25, grid)};
    FusionParams params;
    params.grid = grid;
    std::size_t mismatches = 0;
    std::size_t joint = 0;
    std::size_t per_m1 = 0;
    const auto start = std::chrono::steady_clock::now();

    const auto check = [&](F0Track& m1, F0Track& p) {
        if (fuse_first_voice(m1, p, params).values != testing::fuse_oracle(m1.values, p.values)) {
            ++mismatches;
        }
    };

    // Every (M1, P) pair up to length 6.
    constexpr std::size_t kJointMax = 6;
    for (std::size_t len = 1; len <= kJointMax; ++len) {
        auto m1 = testing::contour(std::vector<F0Value>(len));
        auto p = m1;
        std::size_t total = std::size_t{1} << (4 * len);
        for (std::size_t code = 0; code < total; ++code) {
            std::size_t c = code;
            for (std::size_t t = 0; t < len; ++t, c >>= 4) {
                m1.values[t] = alphabet[c & 3];
                p.values[t] = alphabet[(c >> 2) & 3];
            }
            check(m1, p);
            ++joint;
        }
    }
    // Longer tracks: every M1 pattern, each against the four cyclic P
    // patterns, so every frame meets every P value under every M1 pattern.
    for (std::size_t len = kJointMax + 1; len <= 12; ++len) {
        auto m1 = testing::contour(std::vector<F0Value>(len));
        std::vector<F0Track> cyclic(4, m1);
        for (std::size_t k = 0; k < 4; ++k) {
            for (std::size_t t = 0; t < len; ++t) {
                cyclic[k].values[t] = alphabet[(t + k) % 4];
            }
        }
        const std::size_t total = std::size_t{1} << (2 * len);
        for (std::size_t code = 0; code < total; ++code) {
            std::size_t c = code;
            for (std::size_t t = 0; t < len; ++t, c >>= 2) {
                m1.values[t] = alphabet[c & 3];
            }
            for (auto& p : cyclic) {
                check(m1, p);
                ++per_m1;
            }
        }
    }
    return {false,
            format("%zu mismatches; every pair up to length %zu (%zu pairs), every M1 pattern of length "
                          "%zu-12 against 4 cyclic P patterns (%zu pairs), %.1f s",
                          mismatches, kJointMax, joint, kJointMax + 1, per_m1, seconds_since(start)),
            mismatches != 0};
}

Outcome supplement_property() {
    // Vibrato between 440 and 466.16 Hz (0..100 cents) at 5.5 Hz, 300 frames;
    // three 15-frame gaps, evenly spaced. The vibrato phase is swept.
    const std::size_t n = 300;
    const std::vector<std::size_t> gap_starts = {60, 140, 220};
    const AnalysisConfig config;
    const int phases = 100;
    int completeness_ok = 0;
    int flatness_ok = 0;
    int truth_ok = 0;
    double worst_excess = 0.0;
    for (int ph = 0; ph < phases; ++ph) {
        const double phase = 2.0 * std::numbers::pi * ph / phases;
        std::vector<F0Value> truth(n), gapped(n);
        for (std::size_t t = 0; t < n; ++t) {
            const double c = 50.0 + 50.0 * std::sin(2.0 * std::numbers::pi * 5.5 * config.frame_time(t) + phase);
            truth[t] = 440.0 * std::exp2(c / 1200.0);
            gapped[t] = truth[t];
        }
        for (std::size_t g : gap_starts) {
            for (std::size_t t = g; t < g + 15; ++t) {
                gapped[t].reset();
            }
        }
        const auto m1 = testing::contour(gapped);
        const auto p = testing::contour(truth);
        const auto fused = fuse_first_voice(m1, p, {});

        completeness_ok += completeness(fused) > completeness(m1);
        const double excess = flatness(fused) - flatness(m1);
        flatness_ok += excess <= 0.0;
        worst_excess = std::max(worst_excess, excess);
        bool matches = true;
        for (std::size_t t = 0; t < n; ++t) {
            if (!m1.values[t] && fused.values[t] && fused.values[t] != truth[t]) {
                matches = false;
            }
        }
        truth_ok += matches;
    }
    const bool pass = completeness_ok == phases && flatness_ok == phases && truth_ok == phases;
    return {pass, format("over %d vibrato phases: completeness up in %d, fused == truth on filled frames in %d, "
                         "flatness(fused) <= flatness(M1) in %d (worst excess %.3f cents/frame)",
                         phases, completeness_ok, truth_ok, flatness_ok, worst_excess),
            completeness_ok != phases || truth_ok != phases};
}

Outcome viterbi_exactness() {
    std::mt19937 rng;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t failures = 0;
    std::size_t unique = 0;
    for (int seed = 0; seed < 1000; ++seed) {
        rng.seed(static_cast<unsigned>(seed) + 7919u);
        const std::size_t bins = 1 + rng() % 4;
        const std::size_t frames = 1 + rng() % 3;
        const double slew = 100.0 * static_cast<double>(rng() % 4);
        const double p_switch = rng() % 5 == 0 ? 0.0 : 0.5 * unit(rng);
        const auto model = build_hmm(100.0, 100.0 * std::exp2(static_cast<double>(bins) / 12.0) * 1.0001, 100.0,
                                     {slew, p_switch});
        std::vector<FrameCandidates> obs(frames);
        for (auto& f : obs) {
            double remaining = 1.0;
            const std::size_t count = rng() % 3;
            for (std::size_t c = 0; c < count; ++c) {
                const double semis = -1.0 + unit(rng) * (static_cast<double>(bins) + 1.0);
                const double prob = remaining * unit(rng);
                remaining -= prob;
                f.candidates.push_back({100.0 * std::exp2(semis / 12.0), prob, 0.0});
            }
            f.unvoiced_prob = remaining;
        }
        const auto path = viterbi_path(obs, model);
        testing::BruteForce oracle(model, obs);
        std::vector<std::size_t> best;
        const auto [top, runner_up] = oracle.enumerate(best);
        const bool optimal = std::abs(oracle.score(path) - top) <= 1e-9 * std::max(1.0, std::abs(top));
        const bool distinct = top - runner_up > 1e-9;
        if (!optimal || (distinct && path != best)) {
            ++failures;
        }
        unique += distinct;
    }
    return {failures == 0, format("%zu of 1000 instances disagree with enumeration (%zu with a unique best path)",
                                  failures, unique)};
}

Outcome determinism() {
    const auto dir = testing::tmp_dir();
    const std::vector<double> partials = {1.0, 0.5, 0.25};
    save_wav(dir / "determinism.wav", mix(harmonic_tone(262.0, partials, 1.5), harmonic_tone(392.0, partials, 1.5)));
    std::ostringstream sink;
    const auto cli = [&](std::vector<std::string> args) { return cli::run(args, sink, sink); };
    const std::string wav = (dir / "determinism.wav").string();
    int code = 0;
    for (const char* run : {"a", "b"}) {
        code |= cli({"pyin", wav, "-o", (dir / (std::string("p_") + run + ".csv")).string()});
        code |= cli({"multif0", wav, "-o", (dir / (std::string("m_") + run + ".csv")).string()});
        code |= cli({"fuse", "--m1", (dir / (std::string("m_") + run + ".csv")).string(), "--pyin",
                     (dir / (std::string("p_") + run + ".csv")).string(), "-o",
                     (dir / (std::string("f_") + run + ".csv")).string()});
    }
    if (code != 0) {
        return {false, "a command failed: " + sink.str()};
    }
    bool identical = true;
    for (const char* kind : {"p_", "m_", "f_"}) {
        identical &= slurp(dir / (std::string(kind) + "a.csv")) == slurp(dir / (std::string(kind) + "b.csv"));
    }
    const auto p_times = time_column(slurp(dir / "p_a.csv"));
    const auto m_times = time_column(slurp(dir / "m_a.csv"));
    bool on_grid = !p_times.empty();
    for (std::size_t k = 0; k < p_times.size(); ++k) {
        on_grid &= p_times[k] == format("%.6f", (static_cast<double>(k) * 256.0 + 512.0) / 22050.0);
    }
    return {identical && p_times == m_times && on_grid,
            format("byte-identical reruns: %s; pyin/multif0 time columns equal: %s; %zu frames at hop 256/22050: %s",
                   identical ? "yes" : "no", p_times == m_times ? "yes" : "no", p_times.size(),
                   on_grid ? "yes" : "no")};
}

Outcome performance() {
    // 60 s melody with vibrato over a sustained lower voice.
    const AnalysisConfig config;
    const std::size_t frames = testing::frames_for(60.0);
    std::vector<F0Value> melody(frames);
    for (std::size_t t = 0; t < frames; ++t) {
        const double note = 440.0 * std::exp2(static_cast<double>((t / 86) % 5) / 12.0);
        melody[t] = note * std::exp2(0.3 * std::sin(2.0 * std::numbers::pi * 5.5 * config.frame_time(t)) / 12.0);
    }
    const std::vector<double> partials = {1.0, 0.5, 0.25, 0.125};
    const auto buf =
        mix(synthesize_harmonic(testing::contour(melody), partials, kCanonicalRate),
            synthesize_harmonic(testing::constant_contour(220.0, frames), partials, kCanonicalRate));

    const auto start = std::chrono::steady_clock::now();
    const auto p = pyin_track(buf, config);
    const auto multi = multif0_track(buf, config);
    FusionParams params;
    params.grid = BinGrid::from(config);
    const auto fused = fuse_first_voice(multi.voices.front(), p, params);
    const auto merged = merge_into_multif0(fused, multi);
    const auto report = evaluate(merged.voices.front(), &p);
    const double elapsed = seconds_since(start);
    return {elapsed < 10.0, format("%.1f s of audio (%zu frames) in %.2f s on %u hardware thread(s); "
                                   "fused completeness %.3f",
                                   static_cast<double>(buf.samples.size()) / kCanonicalRate, p.size(), elapsed,
                                   std::thread::hardware_concurrency(), report.completeness)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"monophonic accuracy", monophonic_accuracy},
        {"octave robustness", octave_robustness},
        {"multi-F0 recovery", multif0_recovery},
        {"fusion oracle equivalence", fusion_exhaustive},
        {"supplement property", supplement_property},
        {"Viterbi exactness", viterbi_exactness},
        {"determinism and grid contract", determinism},
        {"performance envelope", performance},
    };
    int unexpected = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        Outcome outcome;
        try {
            outcome = criteria[i].second();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const auto expected = kExpectedFailures.find(id);
        std::cout << (outcome.pass ? "PASS" : "FAIL") << " [" << id << "] " << criteria[i].first << ": "
                  << outcome.detail;
        if (expected != kExpectedFailures.end()) {
            std::cout << (outcome.pass ? " (listed as an expected failure: " : " (expected failure: ")
                      << expected->second << ")";
        }
        std::cout << std::endl;
        if (outcome.broken || outcome.pass == (expected != kExpectedFailures.end())) {
            ++unexpected;
        }
    }
    return unexpected == 0 ? 0 : 1;
}
