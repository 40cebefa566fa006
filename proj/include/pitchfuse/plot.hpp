#pragma once

#include "pitchfuse/spectral.hpp"
#include "pitchfuse/track.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace pitchfuse {

struct LabelledTrack {
    std::string label;
    F0Track track;
};

/// SVG 1.1 time / log-frequency plot. Each track becomes one polyline per
/// voiced run (broken at unvoiced frames) with a legend entry; an optional
/// spectrogram is drawn underneath as a grey raster.
///
/// Throws GridMismatch when the tracks do not share a time grid.
std::string plot_svg(const std::vector<LabelledTrack>& tracks, const Spectrogram* spec = nullptr);

/// Writes plot_svg() to `out`. Throws UnreadableFile when it cannot be written.
void plot_tracks(const std::vector<LabelledTrack>& tracks, const Spectrogram* spec,
                 const std::filesystem::path& out);

}  // namespace pitchfuse
