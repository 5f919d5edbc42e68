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

#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "chcntk/grid.hpp"

namespace chcntk {

struct Tap {
    double delay_s = 0.0;
    double power_db = 0.0;
};

/// Tapped-delay-line profile. Taps are sorted by delay and their powers are
/// renormalized to unit total linear power on construction.
class TdlProfile {
public:
    TdlProfile(std::vector<Tap> taps, double doppler_hz, std::uint64_t seed);

    /// Five-tap profile: delays {0, 30, 150, 310, 710} ns, powers
    /// {0, -2, -4, -8, -16} dB, 300 Hz maximum Doppler.
    static TdlProfile default_profile(std::uint64_t seed);

    [[nodiscard]] const std::vector<Tap> &taps() const noexcept { return taps_; }
    [[nodiscard]] double doppler_hz() const noexcept { return doppler_hz_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] TdlProfile with_seed(std::uint64_t seed) const;

private:
    std::vector<Tap> taps_;
    double doppler_hz_;
    std::uint64_t seed_;
};

/// One drawn path: complex gain and its Doppler shift f_D cos(theta).
struct PathDraw {
    cdouble gain;
    double doppler_shift_hz = 0.0;
};

struct ChannelRealization {
    ComplexMatrix h;
    TdlProfile profile;
    double subcarrier_spacing_hz;
    double symbol_duration_s;
    std::vector<PathDraw> paths;

    [[nodiscard]] ResourceGrid grid() const { return ResourceGrid(h, subcarrier_spacing_hz, symbol_duration_s); }
};

/// Draws per-path gains (zero-mean complex Gaussian, variance = tap power)
/// and Jakes arrival angles from the profile seed.
std::vector<PathDraw> draw_paths(const TdlProfile &profile);

/// h[m][n] = sum_p g_p exp(-i 2pi m df tau_p) exp(i 2pi nu_p n T).
ComplexMatrix synthesize_channel(const TdlProfile &profile, const std::vector<PathDraw> &paths, int rows,
                                 int cols, double subcarrier_spacing_hz, double symbol_duration_s);

ChannelRealization generate_channel(const TdlProfile &profile, int rows, int cols,
                                    double subcarrier_spacing_hz = kDefaultSubcarrierSpacingHz,
                                    double symbol_duration_s = kDefaultSymbolDurationS);

struct NoiseSpec {
    double snr_db = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;

    static NoiseSpec noiseless() { return {}; }
    [[nodiscard]] bool is_noiseless() const noexcept { return snr_db == std::numeric_limits<double>::infinity(); }
};

/// Y = X .* H + Z, where Z is circular complex Gaussian with variance set from
/// the realized mean power of X .* H and the requested SNR.
ResourceGrid transmit(const ChannelRealization &channel, const ResourceGrid &symbols, const NoiseSpec &noise);

/// Unit-modulus QPSK symbols (+-1 +-i)/sqrt(2).
ResourceGrid make_qpsk_grid(int rows, int cols, std::uint64_t seed,
                            double subcarrier_spacing_hz = kDefaultSubcarrierSpacingHz,
                            double symbol_duration_s = kDefaultSymbolDurationS);

}  // namespace chcntk
