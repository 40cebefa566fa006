#include "pitchfuse/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace pitchfuse {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double p) {
    return p > 0.0 ? std::log(p) : kNegInf;
}

std::size_t distance(std::size_t a, std::size_t b) {
    return a > b ? a - b : b - a;
}

}  // namespace

HmmModel::HmmModel(double f_min, double f_max, double resolution_cents, HmmParams params)
    : f_min_(f_min), resolution_cents_(resolution_cents), params_(params) {
    if (!(f_min > 0.0) || !(f_max > f_min) || !(resolution_cents > 0.0)) {
        throw std::invalid_argument("build_hmm: need 0 < f_min < f_max and a positive resolution");
    }
    if (params.max_slew_cents < 0.0 || params.switch_prob < 0.0 || params.switch_prob > 1.0) {
        throw std::invalid_argument("build_hmm: slew must be >= 0 and switch probability in [0, 1]");
    }
    const double span = 1200.0 * std::log2(f_max / f_min) / resolution_cents;
    const auto bins = static_cast<std::size_t>(std::floor(span + 1e-9));
    if (bins == 0) {
        throw std::invalid_argument("build_hmm: range narrower than one lattice step");
    }
    pitch_hz_.resize(bins);
    for (std::size_t i = 0; i < bins; ++i) {
        pitch_hz_[i] = f_min * std::exp2(static_cast<double>(i) * resolution_cents / 1200.0);
    }
    slew_bins_ = static_cast<std::size_t>(std::floor(params.max_slew_cents / resolution_cents + 1e-9));

    row_norm_.resize(bins);
    for (std::size_t i = 0; i < bins; ++i) {
        double sum = 0.0;
        const std::size_t lo = i >= slew_bins_ ? i - slew_bins_ : 0;
        const std::size_t hi = std::min(bins - 1, i + slew_bins_);
        for (std::size_t j = lo; j <= hi; ++j) {
            sum += static_cast<double>(slew_bins_ + 1 - distance(i, j));
        }
        row_norm_[i] = sum;
    }
}

std::size_t HmmModel::nearest_bin(double hz) const {
    if (!(hz > 0.0)) {
        return num_bins();
    }
    const double pos = 1200.0 * std::log2(hz / f_min_) / resolution_cents_;
    if (pos < -0.5 || pos >= static_cast<double>(num_bins()) - 0.5) {
        return num_bins();
    }
    return static_cast<std::size_t>(std::max(0.0, std::floor(pos + 0.5)));
}

double HmmModel::pitch_weight(std::size_t from_bin, std::size_t to_bin) const {
    const std::size_t d = distance(from_bin, to_bin);
    if (d > slew_bins_) {
        return 0.0;
    }
    return static_cast<double>(slew_bins_ + 1 - d) / row_norm_[from_bin];
}

double HmmModel::transition(std::size_t from, std::size_t to) const {
    const double voicing =
        is_voiced_state(from) == is_voiced_state(to) ? 1.0 - params_.switch_prob : params_.switch_prob;
    return voicing * pitch_weight(bin_of_state(from), bin_of_state(to));
}

std::vector<double> HmmModel::observation(const FrameCandidates& frame) const {
    const std::size_t n = num_bins();
    std::vector<double> obs(2 * n, 0.0);
    double residual = frame.unvoiced_prob;
    for (const auto& c : frame.candidates) {
        const std::size_t bin = nearest_bin(c.frequency);
        if (bin < n) {
            obs[bin] += c.probability;
        } else {
            residual += c.probability;
        }
    }
    const double per_bin = residual / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        obs[n + i] = per_bin;
    }
    return obs;
}

HmmModel build_hmm(double f_min, double f_max, double resolution_cents, HmmParams params) {
    return HmmModel(f_min, f_max, resolution_cents, params);
}

std::vector<std::size_t> viterbi_path(std::span<const FrameCandidates> observations, const HmmModel& model) {
    const std::size_t frames = observations.size();
    if (frames == 0) {
        return {};
    }
    const std::size_t n = model.num_bins();
    const std::size_t states = model.num_states();
    const std::size_t w = model.slew_bins();

    // log pitch_weight(i, j) stored as [i][j - i + w].
    std::vector<double> log_kernel(n * (2 * w + 1), kNegInf);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d <= 2 * w; ++d) {
            if (i + d < w || i + d - w >= n) {
                continue;
            }
            log_kernel[i * (2 * w + 1) + d] = safe_log(model.pitch_weight(i, i + d - w));
        }
    }
    const double log_stay = safe_log(1.0 - model.params().switch_prob);
    const double log_switch = safe_log(model.params().switch_prob);

    std::vector<double> delta(states);
    std::vector<double> next(states);
    std::vector<std::uint32_t> back(frames * states, 0);

    {
        const auto obs = model.observation(observations[0]);
        const double log_init = -std::log(static_cast<double>(states));
        for (std::size_t s = 0; s < states; ++s) {
            delta[s] = log_init + safe_log(obs[s]);
        }
    }

    for (std::size_t t = 1; t < frames; ++t) {
        const auto obs = model.observation(observations[t]);
        std::uint32_t* bp = back.data() + t * states;
        for (std::size_t to = 0; to < states; ++to) {
            const bool to_voiced = model.is_voiced_state(to);
            const std::size_t j = model.bin_of_state(to);
            const std::size_t lo = j >= w ? j - w : 0;
            const std::size_t hi = std::min(n - 1, j + w);
            double best = kNegInf;
            std::size_t arg = lo;  // voiced source states come first in index order
            bool found = false;
            for (int block = 0; block < 2; ++block) {
                const bool from_voiced = block == 0;
                const double log_voicing = from_voiced == to_voiced ? log_stay : log_switch;
                const std::size_t offset = from_voiced ? 0 : n;
                for (std::size_t i = lo; i <= hi; ++i) {
                    const double score = delta[offset + i] + log_voicing + log_kernel[i * (2 * w + 1) + (j + w - i)];
                    if (!found || score > best) {
                        best = score;
                        arg = offset + i;
                        found = true;
                    }
                }
            }
            next[to] = best + safe_log(obs[to]);
            bp[to] = static_cast<std::uint32_t>(arg);
        }
        delta.swap(next);
    }

    std::vector<std::size_t> path(frames);
    std::size_t best_state = 0;
    for (std::size_t s = 1; s < states; ++s) {
        if (delta[s] > delta[best_state]) {
            best_state = s;
        }
    }
    path[frames - 1] = best_state;
    for (std::size_t t = frames - 1; t > 0; --t) {
        path[t - 1] = back[t * states + path[t]];
    }
    return path;
}

double path_log_prob(std::span<const std::size_t> path, std::span<const FrameCandidates> observations,
                     const HmmModel& model) {
    if (path.size() != observations.size() || path.empty()) {
        throw std::invalid_argument("path_log_prob: path and observations differ in length");
    }
    double total = -std::log(static_cast<double>(model.num_states()));
    for (std::size_t t = 0; t < path.size(); ++t) {
        if (t > 0) {
            total += safe_log(model.transition(path[t - 1], path[t]));
        }
        total += safe_log(model.observation(observations[t])[path[t]]);
    }
    return total;
}

F0Track viterbi_decode(std::span<const FrameCandidates> observations, const HmmModel& model,
                       const TimeGrid& grid) {
    if (grid.count != observations.size()) {
        throw std::invalid_argument("viterbi_decode: grid has " + std::to_string(grid.count) +
                                    " frames but there are " + std::to_string(observations.size()) +
                                    " observations");
    }
    const auto path = viterbi_path(observations, model);
    const auto lattice = model.pitch_lattice();
    const double f_lo = lattice.front();
    const double f_hi = lattice.back() * std::exp2(model.resolution_cents() / 2400.0);
    const double half_step = model.resolution_cents() / 2.0;

    F0Track track;
    track.times = grid.times();
    track.values.resize(path.size());
    track.voicing_prob.resize(path.size());
    for (std::size_t t = 0; t < path.size(); ++t) {
        const FrameCandidates& frame = observations[t];
        track.voicing_prob[t] = std::min(1.0, frame.voiced_mass());
        if (!model.is_voiced_state(path[t])) {
            continue;
        }
        const double lattice_hz = lattice[model.bin_of_state(path[t])];
        double value = lattice_hz;
        double best = half_step;
        for (const auto& c : frame.candidates) {
            const double dist = std::abs(cents(lattice_hz, c.frequency));
            if (dist <= best && c.frequency >= f_lo && c.frequency <= f_hi) {
                best = dist;
                value = c.frequency;
            }
        }
        track.values[t] = value;
    }
    return track;
}

}  // namespace pitchfuse
