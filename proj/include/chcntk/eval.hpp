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
#include <iosfwd>
#include <string>
#include <vector>

#include "chcntk/chansim.hpp"
#include "chcntk/methods.hpp"

namespace chcntk {

/// Error ratios at or below this are treated as an exact match and reported
/// as the "-inf" sentinel. It corresponds to a relative error of 1e-12,
/// i.e. agreement to floating-point round-off of unit-scale channels.
inline constexpr double kExactRatioFloor = 1e-24;

/// ||H - Hhat||_F^2 / ||H||_F^2. Throws ZeroReference when ||H|| = 0.
double nmse_ratio(const ComplexMatrix &h_true, const ComplexMatrix &h_hat);
/// 10 log10 of a ratio; -inf for ratios at or below kExactRatioFloor.
double ratio_to_db(double ratio);
double nmse_db(const ComplexMatrix &h_true, const ComplexMatrix &h_hat);
/// "-inf" for the sentinel, otherwise the shortest round-trip decimal.
std::string format_number(double v);

struct PatternSpec {
    int sc_spacing = 2;
    int sym_spacing = 4;
    int sc_offset = 0;
    int sym_offset = 0;

    static PatternSpec from_preset(const PilotPreset &p) { return {p.sc_spacing, p.sym_spacing, 0, 0}; }
    [[nodiscard]] PilotPattern make(int rows, int cols) const {
        return make_pilot_pattern(rows, cols, sc_spacing, sym_spacing, sc_offset, sym_offset);
    }
};

struct SweepConfig {
    std::vector<Method> methods{Method::Cntk, Method::Knn, Method::Linear};
    std::vector<double> snr_db{0.0, 10.0, 20.0, 30.0};
    std::vector<PatternSpec> patterns{PatternSpec::from_preset(pilot_preset(24))};
    int realizations = 20;
    std::uint64_t seed = 1;
    int rows = 360;
    int cols = 14;
    double subcarrier_spacing_hz = kDefaultSubcarrierSpacingHz;
    double symbol_duration_s = kDefaultSymbolDurationS;
    std::vector<Tap> taps = TdlProfile::default_profile(0).taps();
    double doppler_hz = 300.0;
    MethodOptions method_options;
    /// Record wall-clock solve times; off keeps the CSV byte-reproducible.
    bool timing = false;
    unsigned threads = 0;

    void validate() const;
};

struct SweepRow {
    std::string method;
    double snr_db = 0.0;
    int pilots_per_rb = 0;
    double nmse_db = 0.0;
    double mean_solve_s = 0.0;
    int realizations = 0;
    std::uint64_t seed = 0;
    /// Per-realization NMSE in dB, kept for debugging; not part of the CSV.
    std::vector<double> per_realization_db;
};

struct SweepResult {
    std::vector<SweepRow> rows;

    [[nodiscard]] const SweepRow &at(std::string_view method, double snr_db, int pilots_per_rb) const;
};

/// One simulated observation: ground truth, symbols, received grid, pilots.
struct Observation {
    ChannelRealization channel;
    ResourceGrid transmitted;
    ResourceGrid received;
    PilotPattern pattern;
    SparseChannelEstimate sparse;
};

/// Channel and symbols depend on (seed, realization); noise additionally on
/// the SNR index. Methods and pilot patterns see the same channels.
Observation simulate_observation(const SweepConfig &cfg, int realization, std::size_t snr_index,
                                 const PatternSpec &pattern);

SweepResult run_sweep(const SweepConfig &cfg);

inline constexpr const char *kSweepCsvHeader = "method,snr_db,pilots_per_rb,nmse_db,mean_solve_s,realizations,seed";
std::string to_csv(const SweepResult &result);
SweepResult parse_sweep_csv(const std::string &text);
/// Whitespace-separated "snr nmse" series, one block per (method, density).
std::string to_plot_series(const SweepResult &result);

struct TimingStats {
    double mean_s = 0.0;
    double stddev_s = 0.0;
    int runs = 0;
};

/// Wall-clock statistics over `repeats` runs after one discarded warm-up.
TimingStats time_method(Method method, const SparseChannelEstimate &sparse, int repeats,
                        const MethodOptions &options = {});

}  // namespace chcntk
