#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace pitchfuse {

/// Difference function of one frame and its cumulative-mean normalisation.
struct DifferenceFrame {
    std::vector<double> d;       // d[tau], tau in [0, tau_max]
    std::vector<double> d_norm;  // empty until cmndf() runs
};

/// Inclusive lag interval searched for minima. hi == 0 means "up to
/// tau_max - 1", the last lag with a right neighbour.
struct LagRange {
    std::size_t lo = 1;
    std::size_t hi = 0;
};

struct PitchCandidate {
    double frequency = 0.0;
    double probability = 0.0;
    double lag = 0.0;
};

struct FrameCandidates {
    std::vector<PitchCandidate> candidates;  // ascending lag
    double unvoiced_prob = 1.0;

    double voiced_mass() const;
};

/// Normalised weights over a finite grid of thresholds in (0, 1].
struct ThresholdPrior {
    std::vector<double> thresholds;
    std::vector<double> weights;

    /// Beta(alpha, beta) density sampled on k/n for k = 1..n, normalised.
    static ThresholdPrior beta(double alpha = 2.0, double beta = 18.0, std::size_t n = 100);

    /// All mass on one threshold.
    static ThresholdPrior single(double threshold);
};

/// d[tau] = sum_{j<W} (x[j] - x[j+tau])^2 for tau in [0, tau_max] with
/// W = frame.size() - tau_max. Throws std::invalid_argument when tau_max
/// leaves no correlation window.
DifferenceFrame difference_function(std::span<const double> frame, std::size_t tau_max);

/// Fills d_norm: d_norm[0] = 1, d_norm[tau] = d[tau] * tau / sum_{j=1..tau} d[j],
/// or 1 where that running sum is zero.
void cmndf(DifferenceFrame& frame);

/// True when d_norm[tau] < d_norm[tau-1] and d_norm[tau] <= d_norm[tau+1].
bool is_local_minimum(std::span<const double> d_norm, std::size_t tau);

/// Smallest lag in `range` holding a local minimum of d_norm below `threshold`.
std::optional<std::size_t> yin_pick_lag(const DifferenceFrame& frame, double threshold, LagRange range = {});

/// Fixed-threshold YIN: the picked lag, parabolic-refined, as a frequency.
/// std::nullopt when no local minimum falls below the threshold.
std::optional<double> yin_pick(const DifferenceFrame& frame, double threshold, double sample_rate,
                               LagRange range = {});

/// Vertex of the parabola through d_norm at tau-1, tau, tau+1, clamped to
/// [tau - 0.5, tau + 0.5]. A flat triple returns tau.
double parabolic_refine(std::span<const double> d_norm, std::size_t tau);

/// Probabilistic thresholding: every threshold of the prior runs the
/// yin_pick rule, and each picked lag collects the weight of the thresholds
/// that chose it. Thresholds that pick nothing feed the unvoiced mass.
FrameCandidates pyin_candidates(const DifferenceFrame& frame, const ThresholdPrior& prior, double sample_rate,
                                LagRange range = {});

}  // namespace pitchfuse
