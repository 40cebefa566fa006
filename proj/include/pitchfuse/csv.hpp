#pragma once

#include "pitchfuse/track.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace pitchfuse {

// F0 track CSV:    time_sec,f0_hz,voicing_prob
// Multi-F0 CSV:    time_sec,f0_1,...,f0_K   (f0_1 is the first voice)
// Times print with 6 decimals, frequencies and probabilities with 4. An
// empty frequency field is an unvoiced frame.

void write_f0_csv(std::ostream& out, const F0Track& track);
void write_f0_csv(const std::filesystem::path& path, const F0Track& track);
std::string f0_csv_string(const F0Track& track);

void write_multif0_csv(std::ostream& out, const MultiF0Track& track);
void write_multif0_csv(const std::filesystem::path& path, const MultiF0Track& track);
std::string multif0_csv_string(const MultiF0Track& track);

/// Reads an F0 track CSV and snaps every row onto `grid` by nearest frame.
/// A grid with count == 0 takes its length from the last row; a grid with
/// step == 0 is inferred from the first two rows. Frames with no
/// row are unvoiced.
///
/// Throws UnreadableFile, MalformedCsv for bad headers/rows or two rows on
/// one frame, and GridMismatch when a row sits more than half a step from
/// its frame or past the end of the grid.
F0Track read_f0_csv(const std::filesystem::path& path, const TimeGrid& grid);
F0Track parse_f0_csv(std::istream& in, const TimeGrid& grid);

/// Multi-F0 counterpart of read_f0_csv; voice columns map positionally.
MultiF0Track import_multif0_csv(const std::filesystem::path& path, const TimeGrid& grid);
MultiF0Track parse_multif0_csv(std::istream& in, const TimeGrid& grid);

enum class CsvKind { F0Track, MultiF0 };

/// Classifies a CSV by its header line. Throws MalformedCsv otherwise.
CsvKind detect_csv_kind(const std::filesystem::path& path);

}  // namespace pitchfuse
