#include "cli.hpp"

#include "pitchfuse/audio.hpp"
#include "pitchfuse/csv.hpp"
#include "pitchfuse/error.hpp"
#include "pitchfuse/eval.hpp"
#include "pitchfuse/fusion.hpp"
#include "pitchfuse/multif0.hpp"
#include "pitchfuse/plot.hpp"
#include "pitchfuse/pyin.hpp"
#include "pitchfuse/spectral.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

namespace pitchfuse::cli {

namespace {

namespace fs = std::filesystem;

struct GlobalOptions {
    int sample_rate = kCanonicalRate;
    std::size_t window = 1024;
    std::size_t hop = 256;

    AnalysisConfig config() const {
        AnalysisConfig c;
        c.sample_rate = sample_rate;
        c.window_size = window;
        c.hop_size = hop;
        return c;
    }
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> parse_partials(const std::string& text) {
    std::vector<double> amps;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            amps.push_back(std::stod(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception&) {
            throw UsageError("--partials: '" + item + "' is not a number");
        }
    }
    if (amps.empty()) {
        throw UsageError("--partials needs at least one amplitude");
    }
    return amps;
}

TimeGrid analysis_grid(const AnalysisConfig& config) {
    return {config.frame_time(0), static_cast<double>(config.hop_size) / config.sample_rate, 0};
}

F0Track read_any_first_voice(const fs::path& path, const TimeGrid& grid) {
    if (detect_csv_kind(path) == CsvKind::F0Track) {
        return read_f0_csv(path, grid);
    }
    return import_multif0_csv(path, grid).voices.front();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"pitchfuse: monophonic and multi-F0 pitch tracking with track fusion", "pitchfuse"};
    app.require_subcommand(1);
    GlobalOptions global;
    app.add_option("--sample-rate", global.sample_rate, "Analysis sample rate in Hz")->capture_default_str();
    app.add_option("--window", global.window, "Analysis window in samples")->capture_default_str();
    app.add_option("--hop", global.hop, "Hop size in samples")->capture_default_str();

    std::string pyin_in, pyin_out;
    auto* pyin = app.add_subcommand("pyin", "Monophonic F0 track of a WAV file");
    pyin->add_option("input", pyin_in, "Input WAV")->required();
    pyin->add_option("-o,--output", pyin_out, "Output F0 CSV")->required();

    std::string mf0_in, mf0_out;
    std::size_t polyphony = 4;
    double threshold = 0.3;
    auto* multif0 = app.add_subcommand("multif0", "Multi-F0 tracks of a WAV file");
    multif0->add_option("input", mf0_in, "Input WAV")->required();
    multif0->add_option("-o,--output", mf0_out, "Output multi-F0 CSV")->required();
    multif0->add_option("--polyphony", polyphony, "Maximum simultaneous F0s per frame")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    multif0->add_option("--threshold", threshold, "Peak threshold relative to the frame maximum")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));

    std::string fuse_m1, fuse_pyin, fuse_out;
    FusionParams fusion;
    auto* fuse = app.add_subcommand("fuse", "Merge a PYIN track into the first voice of a multi-F0 CSV");
    fuse->add_option("--m1", fuse_m1, "Multi-F0 CSV")->required();
    fuse->add_option("--pyin", fuse_pyin, "PYIN F0 CSV")->required();
    fuse->add_option("-o,--output", fuse_out, "Fused multi-F0 CSV")->required();
    fuse->add_option("--bin-tolerance", fusion.bin_tolerance, "Largest bin distance that prefers PYIN")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    fuse->add_option("--window-before", fusion.window_before, "Frames before t that must be unvoiced in M1")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    fuse->add_option("--window-after", fusion.window_after, "Frames after t that must be unvoiced in M1")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);

    std::string eval_in, eval_ref;
    auto* eval = app.add_subcommand("eval", "Curve metrics of an F0 or multi-F0 CSV (first voice)");
    eval->add_option("track", eval_in, "Track CSV")->required();
    eval->add_option("--ref", eval_ref, "Reference track CSV for raw pitch accuracy");

    std::string synth_f0, synth_partials, synth_out;
    auto* synth = app.add_subcommand("synth", "Additive synthesis along an F0 contour");
    synth->add_option("--f0", synth_f0, "Contour as an F0 CSV")->required();
    synth->add_option("--partials", synth_partials, "Comma-separated partial amplitudes")->required();
    synth->add_option("-o,--output", synth_out, "Output WAV (float32)")->required();

    std::vector<std::string> plot_in;
    std::string plot_spec, plot_out;
    auto* plot = app.add_subcommand("plot", "SVG plot of F0 / multi-F0 CSVs");
    plot->add_option("inputs", plot_in, "Track CSVs")->required();
    plot->add_option("--spec", plot_spec, "WAV whose spectrogram is drawn underneath");
    plot->add_option("-o,--output", plot_out, "Output SVG")->required();

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    AnalysisConfig config = global.config();
    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }
    fusion.grid = BinGrid::from(config);

    try {
        if (pyin->parsed()) {
            const auto buf = load_canonical(pyin_in, config.sample_rate);
            write_f0_csv(fs::path(pyin_out), pyin_track(buf, config));
        } else if (multif0->parsed()) {
            const auto buf = load_canonical(mf0_in, config.sample_rate);
            MultiF0Settings settings;
            settings.peaks.max_polyphony = polyphony;
            settings.peaks.rel_threshold = threshold;
            write_multif0_csv(fs::path(mf0_out), multif0_track(buf, config, settings));
        } else if (fuse->parsed()) {
            const auto grid = analysis_grid(config);
            auto multi = import_multif0_csv(fuse_m1, grid);
            auto p = read_f0_csv(fuse_pyin, grid);
            const auto fused = fuse_first_voice(multi.voices.front(), p, fusion);
            write_multif0_csv(fs::path(fuse_out), merge_into_multif0(fused, multi));
        } else if (eval->parsed()) {
            const auto grid = analysis_grid(config);
            const auto track = read_any_first_voice(eval_in, grid);
            std::optional<F0Track> ref;
            if (!eval_ref.empty()) {
                ref = read_any_first_voice(eval_ref, grid);
            }
            out << evaluate(track, ref ? &*ref : nullptr).to_string();
        } else if (synth->parsed()) {
            const auto amps = parse_partials(synth_partials);
            const auto contour = read_f0_csv(synth_f0, TimeGrid{});
            save_wav(synth_out, synthesize_harmonic(contour, amps, config.sample_rate));
        } else if (plot->parsed()) {
            const auto grid = analysis_grid(config);
            std::vector<LabelledTrack> tracks;
            for (const auto& name : plot_in) {
                const fs::path path(name);
                const std::string stem = path.stem().string();
                if (detect_csv_kind(path) == CsvKind::F0Track) {
                    tracks.push_back({stem, read_f0_csv(path, grid)});
                } else {
                    const auto multi = import_multif0_csv(path, grid);
                    for (std::size_t v = 0; v < multi.num_voices(); ++v) {
                        tracks.push_back({stem + ":f0_" + std::to_string(v + 1), multi.voices[v]});
                    }
                }
            }
            // Files from one analysis may still differ in length by trailing
            // rows; trim everything to the shortest.
            std::size_t frames = tracks.empty() ? 0 : tracks.front().track.size();
            for (const auto& t : tracks) {
                frames = std::min(frames, t.track.size());
            }
            for (auto& t : tracks) {
                t.track.times.resize(frames);
                t.track.values.resize(frames);
                t.track.voicing_prob.resize(frames);
            }
            std::optional<Spectrogram> spec;
            if (!plot_spec.empty()) {
                spec = stft(load_canonical(plot_spec, config.sample_rate), config);
            }
            plot_tracks(tracks, spec ? &*spec : nullptr, plot_out);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitOk;
}

}  // namespace pitchfuse::cli
