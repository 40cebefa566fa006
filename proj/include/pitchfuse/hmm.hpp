#pragma once

#include "pitchfuse/track.hpp"
#include "pitchfuse/yin.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace pitchfuse {

struct HmmParams {
    double max_slew_cents = 80.0;
    double switch_prob = 0.01;
};

/// Pitch-tracking HMM. State i < num_bins() is "voiced at pitch bin i";
/// state num_bins() + i is "unvoiced, last pitch bin i".
///
/// Pitch moves by a triangular kernel over at most max_slew_cents per frame
/// (row-normalised); voicing flips with probability switch_prob.
class HmmModel {
public:
    HmmModel(double f_min, double f_max, double resolution_cents, HmmParams params);

    std::size_t num_bins() const { return pitch_hz_.size(); }
    std::size_t num_states() const { return 2 * pitch_hz_.size(); }
    double f_min() const { return f_min_; }
    double resolution_cents() const { return resolution_cents_; }
    const HmmParams& params() const { return params_; }
    std::span<const double> pitch_lattice() const { return pitch_hz_; }

    bool is_voiced_state(std::size_t s) const { return s < num_bins(); }
    std::size_t bin_of_state(std::size_t s) const { return s % num_bins(); }

    /// Nearest lattice bin to `hz` in cents, or num_bins() when `hz` lies
    /// more than half a step outside the lattice.
    std::size_t nearest_bin(double hz) const;

    /// P(to | from) of the full transition matrix.
    double transition(std::size_t from, std::size_t to) const;

    /// Pitch-kernel half width in bins; kernel weight for a move of d bins
    /// from bin i is pitch_weight(i, d).
    std::size_t slew_bins() const { return slew_bins_; }
    double pitch_weight(std::size_t from_bin, std::size_t to_bin) const;

    /// Per-state observation likelihoods. Voiced state i gets the mass of the
    /// candidates nearest to bin i; every unvoiced state gets the residual
    /// (unvoiced plus out-of-lattice) mass spread evenly over the bins.
    std::vector<double> observation(const FrameCandidates& frame) const;

private:
    double f_min_;
    double resolution_cents_;
    HmmParams params_;
    std::vector<double> pitch_hz_;
    std::size_t slew_bins_ = 0;
    std::vector<double> row_norm_;  // per-bin sum of raw triangular weights
};

/// Log-spaced lattice from f_min at `resolution_cents`, with
/// floor(1200 log2(f_max / f_min) / resolution) bins. Throws
/// std::invalid_argument on an empty lattice or non-positive settings.
HmmModel build_hmm(double f_min, double f_max, double resolution_cents, HmmParams params = {});

/// Maximum a posteriori state sequence (log domain, uniform initial
/// distribution). Ties resolve to the lowest state index.
std::vector<std::size_t> viterbi_path(std::span<const FrameCandidates> observations, const HmmModel& model);

/// Log probability of a state path under the model. Used to compare paths.
double path_log_prob(std::span<const std::size_t> path, std::span<const FrameCandidates> observations,
                     const HmmModel& model);

/// Decodes the observations into a track on `grid`. Voiced states report
/// their lattice frequency, replaced by the nearest same-frame candidate
/// when one lies within half a lattice step. voicing_prob is the frame's
/// candidate mass.
F0Track viterbi_decode(std::span<const FrameCandidates> observations, const HmmModel& model,
                       const TimeGrid& grid);

}  // namespace pitchfuse
