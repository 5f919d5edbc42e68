/*
 * Copyright 2026 The chcntk Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "chcntk/chansim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "chcntk/error.hpp"

namespace chcntk {

TdlProfile::TdlProfile(std::vector<Tap> taps, double doppler_hz, std::uint64_t seed)
    : taps_(std::move(taps)), doppler_hz_(doppler_hz), seed_(seed) {
    if (taps_.empty()) { throw Error(ErrorCode::InvalidArgument, "TDL profile needs at least one tap"); }
    if (!(doppler_hz_ >= 0.0) || !std::isfinite(doppler_hz_)) {
        throw Error(ErrorCode::InvalidArgument, "maximum Doppler must be finite and non-negative");
    }
    double total = 0.0;
    for (const auto &t : taps_) {
        if (!(t.delay_s >= 0.0) || !std::isfinite(t.delay_s) || !std::isfinite(t.power_db)) {
            throw Error(ErrorCode::InvalidArgument, "tap delays must be finite and non-negative, powers finite");
        }
        total += std::pow(10.0, t.power_db / 10.0);
    }
    std::stable_sort(taps_.begin(), taps_.end(), [](const Tap &a, const Tap &b) { return a.delay_s < b.delay_s; });
    const double offset_db = 10.0 * std::log10(total);
    for (auto &t : taps_) { t.power_db -= offset_db; }
}

TdlProfile TdlProfile::default_profile(std::uint64_t seed) {
    return TdlProfile({{0.0, 0.0}, {30e-9, -2.0}, {150e-9, -4.0}, {310e-9, -8.0}, {710e-9, -16.0}}, 300.0, seed);
}

TdlProfile TdlProfile::with_seed(std::uint64_t seed) const {
    TdlProfile copy = *this;
    copy.seed_ = seed;
    return copy;
}

std::vector<PathDraw> draw_paths(const TdlProfile &profile) {
    std::mt19937_64 rng(profile.seed());
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);

    std::vector<PathDraw> paths;
    paths.reserve(profile.taps().size());
    for (const auto &tap : profile.taps()) {
        const double sd = std::sqrt(std::pow(10.0, tap.power_db / 10.0) / 2.0);
        const double re = normal(rng);
        const double im = normal(rng);
        const double theta = angle(rng);
        paths.push_back({cdouble(sd * re, sd * im), profile.doppler_hz() * std::cos(theta)});
    }
    return paths;
}

ComplexMatrix synthesize_channel(const TdlProfile &profile, const std::vector<PathDraw> &paths, int rows,
                                 int cols, double subcarrier_spacing_hz, double symbol_duration_s) {
    if (rows < 1 || cols < 1) { throw Error(ErrorCode::InvalidArgument, "channel grid needs rows, cols >= 1"); }
    if (!(subcarrier_spacing_hz > 0.0) || !(symbol_duration_s > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "subcarrier spacing and symbol duration must be positive");
    }
    if (paths.size() != profile.taps().size()) {
        throw Error(ErrorCode::DimensionMismatch, "one path draw per profile tap is required");
    }
    constexpr double two_pi = 2.0 * std::numbers::pi;
    ComplexMatrix h = ComplexMatrix::Zero(rows, cols);
    for (std::size_t p = 0; p < paths.size(); ++p) {
        const double tau = profile.taps()[p].delay_s;
        const double nu = paths[p].doppler_shift_hz;
        for (int n = 0; n < cols; ++n) {
            const cdouble time_phase = std::polar(1.0, two_pi * nu * (n * symbol_duration_s));
            const cdouble g = paths[p].gain * time_phase;
            for (int m = 0; m < rows; ++m) {
                h(m, n) += g * std::polar(1.0, -two_pi * (m * subcarrier_spacing_hz) * tau);
            }
        }
    }
    return h;
}

ChannelRealization generate_channel(const TdlProfile &profile, int rows, int cols, double subcarrier_spacing_hz,
                                    double symbol_duration_s) {
    auto paths = draw_paths(profile);
    auto h = synthesize_channel(profile, paths, rows, cols, subcarrier_spacing_hz, symbol_duration_s);
    return {std::move(h), profile, subcarrier_spacing_hz, symbol_duration_s, std::move(paths)};
}

ResourceGrid transmit(const ChannelRealization &channel, const ResourceGrid &symbols, const NoiseSpec &noise) {
    if (symbols.rows() != channel.h.rows() || symbols.cols() != channel.h.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "transmitted grid and channel differ in shape");
    }
    ComplexMatrix y = symbols.data().cwiseProduct(channel.h);
    if (!noise.is_noiseless()) {
        if (!std::isfinite(noise.snr_db)) { throw Error(ErrorCode::InvalidArgument, "SNR must be finite or +inf"); }
        const double signal_power = y.cwiseAbs2().mean();
        const double variance = signal_power / std::pow(10.0, noise.snr_db / 10.0);
        const double sd = std::sqrt(variance / 2.0);
        std::mt19937_64 rng(noise.seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (Eigen::Index m = 0; m < y.rows(); ++m) {
            for (Eigen::Index n = 0; n < y.cols(); ++n) {
                const double re = normal(rng);
                const double im = normal(rng);
                y(m, n) += cdouble(sd * re, sd * im);
            }
        }
    }
    return ResourceGrid(std::move(y), symbols.subcarrier_spacing_hz(), symbols.symbol_duration_s());
}

ResourceGrid make_qpsk_grid(int rows, int cols, std::uint64_t seed, double subcarrier_spacing_hz,
                            double symbol_duration_s) {
    if (rows < 1 || cols < 1) { throw Error(ErrorCode::InvalidArgument, "QPSK grid needs rows, cols >= 1"); }
    const double a = std::numbers::sqrt2 / 2.0;
    std::mt19937_64 rng(seed);
    ComplexMatrix x(rows, cols);
    for (int m = 0; m < rows; ++m) {
        for (int n = 0; n < cols; ++n) {
            const auto bits = rng();
            x(m, n) = cdouble((bits & 1u) ? -a : a, (bits & 2u) ? -a : a);
        }
    }
    return ResourceGrid(std::move(x), subcarrier_spacing_hz, symbol_duration_s);
}

}  // namespace chcntk
