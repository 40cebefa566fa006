#include "pitchfuse/csv.hpp"

#include "pitchfuse/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pitchfuse {

namespace {

constexpr std::string_view kF0Header = "time_sec,f0_hz,voicing_prob";

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string freq_field(const F0Value& v) {
    return v ? fixed(*v, 4) : std::string();
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string_view trim_cr(std::string_view s) {
    if (!s.empty() && s.back() == '\r') {
        s.remove_suffix(1);
    }
    return s;
}

double parse_number(std::string_view field, std::size_t line_no) {
    double value = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw MalformedCsv("line " + std::to_string(line_no) + ": bad number '" + std::string(field) + "'");
    }
    return value;
}

F0Value parse_frequency(std::string_view field, std::size_t line_no) {
    if (field.empty()) {
        return kUnvoiced;
    }
    const double hz = parse_number(field, line_no);
    if (!(hz > 0.0)) {
        throw MalformedCsv("line " + std::to_string(line_no) + ": frequency must be positive");
    }
    return hz;
}

struct Row {
    double time;
    std::vector<F0Value> values;
    double voicing_prob;
};

// Places rows on the grid; returns the frame index of each row.
std::vector<std::size_t> align(const std::vector<Row>& rows, TimeGrid& grid) {
    if (!(grid.step > 0.0)) {
        // No expected grid: take it from the first two rows.
        if (rows.empty()) {
            throw MalformedCsv("cannot infer a time grid from a file without rows");
        }
        grid.first = rows.front().time;
        grid.step = rows.size() > 1 ? rows[1].time - rows[0].time : 1.0;
        if (!(grid.step > 0.0)) {
            throw MalformedCsv("row times must increase");
        }
        // Printed times are rounded; the farthest row pins the step down.
        const double span = rows.back().time - grid.first;
        const double frames = std::round(span / grid.step);
        if (frames > 1.0) {
            grid.step = span / frames;
        }
    }
    std::vector<std::size_t> index(rows.size());
    std::size_t needed = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const double pos = (rows[r].time - grid.first) / grid.step;
        const double k = std::round(pos);
        if (k < 0.0 || std::abs(pos - k) > 0.5 + 1e-9) {
            throw GridMismatch("row at t=" + fixed(rows[r].time, 6) + " s lies off the expected frame grid");
        }
        index[r] = static_cast<std::size_t>(k);
        needed = std::max(needed, index[r] + 1);
    }
    if (grid.count == 0) {
        grid.count = needed;
    } else if (needed > grid.count) {
        throw GridMismatch("row at frame " + std::to_string(needed - 1) + " is past the expected " +
                           std::to_string(grid.count) + " frames");
    }
    std::vector<bool> seen(grid.count, false);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (seen[index[r]]) {
            throw MalformedCsv("two rows fall on frame " + std::to_string(index[r]));
        }
        seen[index[r]] = true;
    }
    return index;
}

std::ifstream open(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw UnreadableFile("cannot open " + path.string());
    }
    return in;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !out.write(text.data(), static_cast<std::streamsize>(text.size()))) {
        throw UnreadableFile("cannot write " + path.string());
    }
}

}  // namespace

void write_f0_csv(std::ostream& out, const F0Track& track) {
    out << kF0Header << '\n';
    for (std::size_t t = 0; t < track.size(); ++t) {
        out << fixed(track.times[t], 6) << ',' << freq_field(track.values[t]) << ','
            << fixed(track.voicing_prob[t], 4) << '\n';
    }
}

std::string f0_csv_string(const F0Track& track) {
    std::ostringstream out;
    write_f0_csv(out, track);
    return out.str();
}

void write_f0_csv(const std::filesystem::path& path, const F0Track& track) {
    write_file(path, f0_csv_string(track));
}

void write_multif0_csv(std::ostream& out, const MultiF0Track& track) {
    out << "time_sec";
    for (std::size_t v = 0; v < track.num_voices(); ++v) {
        out << ",f0_" << v + 1;
    }
    out << '\n';
    for (std::size_t t = 0; t < track.num_frames(); ++t) {
        out << fixed(track.voices.front().times[t], 6);
        for (const auto& voice : track.voices) {
            out << ',' << freq_field(voice.values[t]);
        }
        out << '\n';
    }
}

std::string multif0_csv_string(const MultiF0Track& track) {
    std::ostringstream out;
    write_multif0_csv(out, track);
    return out.str();
}

void write_multif0_csv(const std::filesystem::path& path, const MultiF0Track& track) {
    write_file(path, multif0_csv_string(track));
}

F0Track parse_f0_csv(std::istream& in, const TimeGrid& expected) {
    std::string line;
    if (!std::getline(in, line) || trim_cr(line) != kF0Header) {
        throw MalformedCsv("expected header '" + std::string(kF0Header) + "'");
    }
    std::vector<Row> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim_cr(line);
        if (text.empty()) {
            continue;
        }
        const auto fields = split(text);
        if (fields.size() != 3) {
            throw MalformedCsv("line " + std::to_string(line_no) + ": expected 3 fields, got " +
                               std::to_string(fields.size()));
        }
        Row row{parse_number(fields[0], line_no), {parse_frequency(fields[1], line_no)},
                parse_number(fields[2], line_no)};
        if (row.voicing_prob < 0.0 || row.voicing_prob > 1.0) {
            throw MalformedCsv("line " + std::to_string(line_no) + ": voicing_prob outside [0, 1]");
        }
        rows.push_back(std::move(row));
    }

    TimeGrid grid = expected;
    const auto index = align(rows, grid);
    F0Track track = F0Track::from_values(grid, {});
    for (std::size_t r = 0; r < rows.size(); ++r) {
        track.values[index[r]] = rows[r].values.front();
        track.voicing_prob[index[r]] = rows[r].voicing_prob;
    }
    return track;
}

F0Track read_f0_csv(const std::filesystem::path& path, const TimeGrid& grid) {
    auto in = open(path);
    return parse_f0_csv(in, grid);
}

MultiF0Track parse_multif0_csv(std::istream& in, const TimeGrid& expected) {
    std::string line;
    if (!std::getline(in, line)) {
        throw MalformedCsv("empty multi-F0 file");
    }
    const auto header = split(trim_cr(line));
    if (header.size() < 2 || header[0] != "time_sec") {
        throw MalformedCsv("expected header 'time_sec,f0_1,...'");
    }
    for (std::size_t v = 1; v < header.size(); ++v) {
        if (header[v] != "f0_" + std::to_string(v)) {
            throw MalformedCsv("header column " + std::to_string(v + 1) + " should be f0_" + std::to_string(v));
        }
    }
    const std::size_t voices = header.size() - 1;

    std::vector<Row> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim_cr(line);
        if (text.empty()) {
            continue;
        }
        const auto fields = split(text);
        if (fields.size() != voices + 1) {
            throw MalformedCsv("line " + std::to_string(line_no) + ": expected " + std::to_string(voices + 1) +
                               " fields, got " + std::to_string(fields.size()));
        }
        Row row{parse_number(fields[0], line_no), {}, 0.0};
        for (std::size_t v = 0; v < voices; ++v) {
            row.values.push_back(parse_frequency(fields[v + 1], line_no));
        }
        rows.push_back(std::move(row));
    }

    TimeGrid grid = expected;
    const auto index = align(rows, grid);
    MultiF0Track track;
    track.voices.assign(voices, F0Track::from_values(grid, {}));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t v = 0; v < voices; ++v) {
            track.voices[v].values[index[r]] = rows[r].values[v];
            track.voices[v].voicing_prob[index[r]] = rows[r].values[v] ? 1.0 : 0.0;
        }
    }
    return track;
}

MultiF0Track import_multif0_csv(const std::filesystem::path& path, const TimeGrid& grid) {
    auto in = open(path);
    return parse_multif0_csv(in, grid);
}

CsvKind detect_csv_kind(const std::filesystem::path& path) {
    auto in = open(path);
    std::string line;
    std::getline(in, line);
    const auto header = trim_cr(line);
    if (header == kF0Header) {
        return CsvKind::F0Track;
    }
    if (header.starts_with("time_sec,f0_1")) {
        return CsvKind::MultiF0;
    }
    throw MalformedCsv(path.string() + ": unrecognised CSV header '" + std::string(header) + "'");
}

}  // namespace pitchfuse
