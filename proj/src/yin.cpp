#include "pitchfuse/yin.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace pitchfuse {

namespace {

std::size_t last_lag(const DifferenceFrame& frame, LagRange range) {
    const std::size_t tau_max = frame.d_norm.size() - 1;
    const std::size_t cap = tau_max >= 1 ? tau_max - 1 : 0;
    return range.hi == 0 ? cap : std::min(range.hi, cap);
}

void require_normalised(const DifferenceFrame& frame) {
    if (frame.d_norm.size() != frame.d.size() || frame.d_norm.empty()) {
        throw std::invalid_argument("difference frame has no normalised values; run cmndf first");
    }
}

}  // namespace

double FrameCandidates::voiced_mass() const {
    double sum = 0.0;
    for (const auto& c : candidates) {
        sum += c.probability;
    }
    return sum;
}

ThresholdPrior ThresholdPrior::beta(double alpha, double beta, std::size_t n) {
    if (n == 0 || alpha <= 0.0 || beta <= 0.0) {
        throw std::invalid_argument("beta prior needs n > 0 and positive shape parameters");
    }
    ThresholdPrior prior;
    prior.thresholds.resize(n);
    prior.weights.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double s = static_cast<double>(k + 1) / static_cast<double>(n);
        prior.thresholds[k] = s;
        // Unnormalised density; the Beta function cancels below.
        prior.weights[k] = std::pow(s, alpha - 1.0) * std::pow(1.0 - s, beta - 1.0);
    }
    const double total = std::accumulate(prior.weights.begin(), prior.weights.end(), 0.0);
    for (double& w : prior.weights) {
        w /= total;
    }
    return prior;
}

ThresholdPrior ThresholdPrior::single(double threshold) {
    return {{threshold}, {1.0}};
}

DifferenceFrame difference_function(std::span<const double> frame, std::size_t tau_max) {
    if (tau_max >= frame.size()) {
        throw std::invalid_argument("difference_function: tau_max " + std::to_string(tau_max) +
                                    " leaves no correlation window in a frame of " + std::to_string(frame.size()));
    }
    const std::size_t w = frame.size() - tau_max;
    const double* x = frame.data();

    DifferenceFrame out;
    out.d.resize(tau_max + 1);
    out.d[0] = 0.0;
    for (std::size_t tau = 1; tau <= tau_max; ++tau) {
        const double* y = x + tau;
        // Four independent partial sums keep the loop pipelined.
        double acc[4] = {0.0, 0.0, 0.0, 0.0};
        std::size_t j = 0;
        for (; j + 4 <= w; j += 4) {
            for (std::size_t lane = 0; lane < 4; ++lane) {
                const double diff = x[j + lane] - y[j + lane];
                acc[lane] += diff * diff;
            }
        }
        for (; j < w; ++j) {
            const double diff = x[j] - y[j];
            acc[0] += diff * diff;
        }
        out.d[tau] = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    }
    return out;
}

void cmndf(DifferenceFrame& frame) {
    frame.d_norm.assign(frame.d.size(), 1.0);
    double running = 0.0;
    for (std::size_t tau = 1; tau < frame.d.size(); ++tau) {
        running += frame.d[tau];
        if (running > 0.0) {
            frame.d_norm[tau] = frame.d[tau] * static_cast<double>(tau) / running;
        }
    }
}

bool is_local_minimum(std::span<const double> d_norm, std::size_t tau) {
    if (tau == 0 || tau + 1 >= d_norm.size()) {
        return false;
    }
    return d_norm[tau] < d_norm[tau - 1] && d_norm[tau] <= d_norm[tau + 1];
}

std::optional<std::size_t> yin_pick_lag(const DifferenceFrame& frame, double threshold, LagRange range) {
    require_normalised(frame);
    const std::size_t hi = last_lag(frame, range);
    for (std::size_t tau = std::max<std::size_t>(range.lo, 1); tau <= hi; ++tau) {
        if (frame.d_norm[tau] < threshold && is_local_minimum(frame.d_norm, tau)) {
            return tau;
        }
    }
    return std::nullopt;
}

std::optional<double> yin_pick(const DifferenceFrame& frame, double threshold, double sample_rate,
                               LagRange range) {
    const auto tau = yin_pick_lag(frame, threshold, range);
    if (!tau) {
        return std::nullopt;
    }
    return sample_rate / parabolic_refine(frame.d_norm, *tau);
}

double parabolic_refine(std::span<const double> d_norm, std::size_t tau) {
    const auto centre = static_cast<double>(tau);
    if (tau == 0 || tau + 1 >= d_norm.size()) {
        return centre;
    }
    const double a = d_norm[tau - 1];
    const double b = d_norm[tau];
    const double c = d_norm[tau + 1];
    const double curvature = a - 2.0 * b + c;
    if (curvature == 0.0) {
        return centre;
    }
    const double offset = 0.5 * (a - c) / curvature;
    return centre + std::clamp(offset, -0.5, 0.5);
}

FrameCandidates pyin_candidates(const DifferenceFrame& frame, const ThresholdPrior& prior, double sample_rate,
                                LagRange range) {
    require_normalised(frame);
    if (prior.thresholds.size() != prior.weights.size()) {
        throw std::invalid_argument("threshold prior: thresholds and weights differ in length");
    }

    // Local minima in ascending lag order; each threshold picks the first one
    // strictly below it, exactly as yin_pick_lag would.
    std::vector<std::size_t> minima;
    const std::size_t hi = last_lag(frame, range);
    for (std::size_t tau = std::max<std::size_t>(range.lo, 1); tau <= hi; ++tau) {
        if (is_local_minimum(frame.d_norm, tau)) {
            minima.push_back(tau);
        }
    }

    std::map<std::size_t, double> mass;
    FrameCandidates out;
    out.unvoiced_prob = 0.0;
    for (std::size_t k = 0; k < prior.thresholds.size(); ++k) {
        const double s = prior.thresholds[k];
        const auto hit = std::find_if(minima.begin(), minima.end(),
                                      [&](std::size_t tau) { return frame.d_norm[tau] < s; });
        if (hit == minima.end()) {
            out.unvoiced_prob += prior.weights[k];
        } else {
            mass[*hit] += prior.weights[k];
        }
    }

    out.candidates.reserve(mass.size());
    for (const auto& [tau, p] : mass) {
        const double lag = parabolic_refine(frame.d_norm, tau);
        out.candidates.push_back({sample_rate / lag, p, lag});
    }
    return out;
}

}  // namespace pitchfuse
