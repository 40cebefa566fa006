#include "pitchfuse/csv.hpp"
#include "pitchfuse/error.hpp"
#include "test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <random>
#include <sstream>

using namespace pitchfuse;
using Catch::Approx;

namespace {

const TimeGrid kGrid = AnalysisConfig{}.grid(5);

F0Track parse(const std::string& text, const TimeGrid& grid = kGrid) {
    std::istringstream in(text);
    return parse_f0_csv(in, grid);
}

MultiF0Track parse_multi(const std::string& text, const TimeGrid& grid = kGrid) {
    std::istringstream in(text);
    return parse_multif0_csv(in, grid);
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("f0 CSV layout", "[csv]") {
    F0Track track = F0Track::from_values(kGrid, {440.0, kUnvoiced, 441.23456, 55.0, kUnvoiced});
    track.voicing_prob = {0.9, 0.1, 0.87654, 1.0, 0.0};
    CHECK(f0_csv_string(track) ==
          "time_sec,f0_hz,voicing_prob\n"
          "0.023220,440.0000,0.9000\n"
          "0.034830,,0.1000\n"
          "0.046440,441.2346,0.8765\n"
          "0.058050,55.0000,1.0000\n"
          "0.069660,,0.0000\n");
}

TEST_CASE("multi-F0 CSV layout", "[csv]") {
    const MultiF0Track track{{F0Track::from_values(kGrid, {220.0, 220.5, kUnvoiced, kUnvoiced, 221.0}),
                              F0Track::from_values(kGrid, {kUnvoiced, 330.0, 330.0, kUnvoiced, kUnvoiced})}};
    CHECK(multif0_csv_string(track) ==
          "time_sec,f0_1,f0_2\n"
          "0.023220,220.0000,\n"
          "0.034830,220.5000,330.0000\n"
          "0.046440,,330.0000\n"
          "0.058050,,\n"
          "0.069660,221.0000,\n");
}

TEST_CASE("f0 CSV round trip is byte exact", "[csv][property]") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> hz(55.0, 1760.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto dir = testing::tmp_dir();
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng() % 200;
        std::vector<F0Value> values(n);
        std::vector<double> probs(n);
        for (std::size_t t = 0; t < n; ++t) {
            if (rng() % 3) {
                values[t] = hz(rng);
            }
            probs[t] = unit(rng);
        }
        F0Track track = F0Track::from_values(AnalysisConfig{}.grid(n), values);
        track.voicing_prob = probs;
        const auto text = f0_csv_string(track);

        const auto path = dir / "roundtrip.csv";
        write_f0_csv(path, track);
        REQUIRE(slurp(path) == text);

        const auto back = read_f0_csv(path, AnalysisConfig{}.grid(n));
        REQUIRE(back.size() == n);
        REQUIRE(f0_csv_string(back) == text);
        for (std::size_t t = 0; t < n; ++t) {
            REQUIRE(back.values[t].has_value() == values[t].has_value());
            if (values[t]) {
                REQUIRE(*back.values[t] == Approx(*values[t]).margin(5e-5));
            }
            REQUIRE(back.voicing_prob[t] == Approx(probs[t]).margin(5e-5));
        }

        // Reading without an expected grid infers the same one, up to the
        // rounding of the printed times.
        const auto inferred = read_f0_csv(path, TimeGrid{});
        REQUIRE(inferred.size() == n);
        REQUIRE(inferred.values == back.values);
        for (std::size_t t = 0; t < n; ++t) {
            REQUIRE(inferred.times[t] == Approx(track.times[t]).margin(1.5e-6));
        }
    }
}

TEST_CASE("multi-F0 CSV round trip", "[csv]") {
    const MultiF0Track track{{F0Track::from_values(kGrid, {220.0, 220.5, kUnvoiced, kUnvoiced, 221.0}),
                              F0Track::from_values(kGrid, {kUnvoiced, 330.0, 330.0, kUnvoiced, kUnvoiced}),
                              F0Track::from_values(kGrid, {kUnvoiced, kUnvoiced, 500.0, kUnvoiced, kUnvoiced})}};
    const auto back = parse_multi(multif0_csv_string(track));
    REQUIRE(back.num_voices() == 3);
    for (std::size_t v = 0; v < 3; ++v) {
        CHECK(back.voices[v].values == track.voices[v].values);
    }
    CHECK(back.voices[2].voicing_prob == std::vector<double>{0, 0, 1, 0, 0});
    CHECK(multif0_csv_string(back) == multif0_csv_string(track));
}

TEST_CASE("rows snap to the nearest frame", "[csv][align]") {
    const double hop = kGrid.step;
    std::ostringstream text;
    text << "time_sec,f0_hz,voicing_prob\n";
    text.precision(9);
    // Offsets just under half a hop either way; frame 3 has no row.
    text << kGrid.time(0) + 0.49 * hop << ",100,1\n";
    text << kGrid.time(1) - 0.49 * hop << ",101,1\n";
    text << kGrid.time(2) + 0.2 * hop << ",102,1\n";
    text << kGrid.time(4) - 0.3 * hop << ",,0.25\n";
    const auto track = parse(text.str());
    REQUIRE(track.size() == 5);
    CHECK(track.values == std::vector<F0Value>{100.0, 101.0, 102.0, kUnvoiced, kUnvoiced});
    CHECK(track.voicing_prob[4] == 0.25);
    CHECK(track.voicing_prob[3] == 0.0);
    CHECK(same_times(track.times, kGrid.times()));

    // Too far off any frame, before the grid, and past its end.
    std::ostringstream far;
    far << "time_sec,f0_hz,voicing_prob\n" << kGrid.time(4) + 0.6 * hop << ",100,1\n";
    CHECK_THROWS_AS(parse(far.str()), GridMismatch);
    std::ostringstream early;
    early << "time_sec,f0_hz,voicing_prob\n" << kGrid.time(0) - 0.7 * hop << ",100,1\n";
    CHECK_THROWS_AS(parse(early.str()), GridMismatch);
}

TEST_CASE("grid length is taken from the file when unknown", "[csv][align]") {
    TimeGrid open = kGrid;
    open.count = 0;
    const auto track = parse("time_sec,f0_hz,voicing_prob\n0.023220,440,1\n0.069660,441,1\n", open);
    REQUIRE(track.size() == 5);
    CHECK(track.values == std::vector<F0Value>{440.0, kUnvoiced, kUnvoiced, kUnvoiced, 441.0});
}

TEST_CASE("malformed CSV input", "[csv][errors]") {
    CHECK_THROWS_AS(parse(""), MalformedCsv);
    CHECK_THROWS_AS(parse("time,f0,prob\n"), MalformedCsv);
    CHECK_THROWS_AS(parse("time_sec,f0_hz,voicing_prob\n0.023220,440\n"), MalformedCsv);
    CHECK_THROWS_AS(parse("time_sec,f0_hz,voicing_prob\n0.023220,440,1,2\n"), MalformedCsv);
    CHECK_THROWS_AS(parse("time_sec,f0_hz,voicing_prob\n0.023220,4x0,1\n"), MalformedCsv);
    CHECK_THROWS_AS(parse("time_sec,f0_hz,voicing_prob\n0.023220,-440,1\n"), MalformedCsv);
    CHECK_THROWS_AS(parse("time_sec,f0_hz,voicing_prob\n0.023220,440,1.5\n"), MalformedCsv);
    CHECK_THROWS_AS(parse("time_sec,f0_hz,voicing_prob\n0.023220,nan,1\n"), MalformedCsv);
    // Two rows on one frame.
    CHECK_THROWS_AS(parse("time_sec,f0_hz,voicing_prob\n0.023220,440,1\n0.024000,441,1\n"), MalformedCsv);
    // Cannot infer a grid from nothing or from decreasing times.
    CHECK_THROWS_AS(parse("time_sec,f0_hz,voicing_prob\n", TimeGrid{}), MalformedCsv);
    CHECK_THROWS_AS(parse("time_sec,f0_hz,voicing_prob\n0.5,440,1\n0.4,440,1\n", TimeGrid{}), MalformedCsv);

    CHECK_THROWS_AS(parse_multi("time_sec\n"), MalformedCsv);
    CHECK_THROWS_AS(parse_multi("time_sec,f0_2\n"), MalformedCsv);
    CHECK_THROWS_AS(parse_multi("time_sec,f0_1,f0_2\n0.023220,220\n"), MalformedCsv);

    CHECK_THROWS_AS(read_f0_csv(testing::tmp_dir() / "missing.csv", kGrid), UnreadableFile);
    CHECK_THROWS_AS(write_f0_csv(testing::tmp_dir() / "no_such_dir" / "x.csv", F0Track{}), UnreadableFile);
}

TEST_CASE("CRLF line endings and blank lines are accepted", "[csv]") {
    const auto track = parse("time_sec,f0_hz,voicing_prob\r\n0.023220,440,1\r\n\r\n0.034830,,0\r\n");
    CHECK(track.values[0] == 440.0);
    CHECK_FALSE(track.values[1]);
}

TEST_CASE("detect_csv_kind", "[csv]") {
    const auto dir = testing::tmp_dir();
    write_f0_csv(dir / "kind_f0.csv", F0Track::from_values(kGrid, {440.0}));
    write_multif0_csv(dir / "kind_mf0.csv", MultiF0Track{{F0Track::from_values(kGrid, {440.0})}});
    {
        std::ofstream(dir / "kind_bad.csv") << "a,b,c\n";
    }
    CHECK(detect_csv_kind(dir / "kind_f0.csv") == CsvKind::F0Track);
    CHECK(detect_csv_kind(dir / "kind_mf0.csv") == CsvKind::MultiF0);
    CHECK_THROWS_AS(detect_csv_kind(dir / "kind_bad.csv"), MalformedCsv);
}
