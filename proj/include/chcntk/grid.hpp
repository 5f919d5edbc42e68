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

#include <array>
#include <complex>
#include <cstddef>
#include <string_view>

#include <Eigen/Dense>

namespace chcntk {

using cdouble = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Subcarriers per resource block (5G-NR convention).
inline constexpr int kSubcarriersPerRb = 12;

inline constexpr double kDefaultSubcarrierSpacingHz = 15e3;
inline constexpr double kDefaultSymbolDurationS = 1.0 / 14e3;
inline constexpr double kDefaultDivisionEpsilon = 1e-12;

/// Complex time-frequency grid. Rows are subcarriers (m), columns are OFDM
/// symbols (n); this convention holds everywhere in the library.
class ResourceGrid {
public:
    explicit ResourceGrid(ComplexMatrix data,
                          double subcarrier_spacing_hz = kDefaultSubcarrierSpacingHz,
                          double symbol_duration_s = kDefaultSymbolDurationS);

    [[nodiscard]] int rows() const noexcept { return static_cast<int>(data_.rows()); }
    [[nodiscard]] int cols() const noexcept { return static_cast<int>(data_.cols()); }
    [[nodiscard]] const ComplexMatrix &data() const noexcept { return data_; }
    [[nodiscard]] cdouble operator()(int m, int n) const { return data_(m, n); }
    [[nodiscard]] double subcarrier_spacing_hz() const noexcept { return subcarrier_spacing_hz_; }
    [[nodiscard]] double symbol_duration_s() const noexcept { return symbol_duration_s_; }

private:
    ComplexMatrix data_;
    double subcarrier_spacing_hz_;
    double symbol_duration_s_;
};

/// Lattice pilot placement. mask(m, n) is set iff
/// (m - sc_offset) % sc_spacing == 0 and (n - sym_offset) % sym_spacing == 0.
struct PilotPattern {
    int sc_spacing = 1;
    int sym_spacing = 1;
    int sc_offset = 0;
    int sym_offset = 0;
    Mask mask;

    [[nodiscard]] int rows() const noexcept { return static_cast<int>(mask.rows()); }
    [[nodiscard]] int cols() const noexcept { return static_cast<int>(mask.cols()); }
    [[nodiscard]] int pilot_count() const noexcept { return static_cast<int>(mask.count()); }
    /// Pilots in one 12-subcarrier x N-symbol resource block, averaged over
    /// the full blocks of the grid (exact when sc_spacing divides 12).
    [[nodiscard]] double pilots_per_rb() const;
    [[nodiscard]] double density() const noexcept {
        return static_cast<double>(pilot_count()) / static_cast<double>(mask.size());
    }
};

/// Number of lattice points along an axis of length `len`.
constexpr int lattice_points(int len, int spacing, int offset) {
    return len > offset ? (len - offset + spacing - 1) / spacing : 0;
}

constexpr int lattice_pilot_count(int rows, int cols, int sc_spacing, int sym_spacing,
                                  int sc_offset = 0, int sym_offset = 0) {
    return lattice_points(rows, sc_spacing, sc_offset) * lattice_points(cols, sym_spacing, sym_offset);
}

/// Named pilot densities expressed as pilots per 12x14 resource block.
struct PilotPreset {
    std::string_view name;
    int pilots_per_rb;
    int sc_spacing;
    int sym_spacing;
};

inline constexpr std::array<PilotPreset, 3> kPilotPresets{{
    {"dense", 24, 2, 4},
    {"medium", 16, 3, 4},
    {"sparse", 12, 4, 4},
}};

static_assert([] {
    for (const auto &p : kPilotPresets) {
        if (lattice_pilot_count(kSubcarriersPerRb, 14, p.sc_spacing, p.sym_spacing) != p.pilots_per_rb) {
            return false;
        }
    }
    return true;
}(), "pilot preset spacing does not produce its target pilots per resource block");

/// Looks up a preset by its pilots-per-RB count (24, 16 or 12).
const PilotPreset &pilot_preset(int pilots_per_rb);
const PilotPreset &pilot_preset(std::string_view name);

PilotPattern make_pilot_pattern(int rows, int cols, int sc_spacing, int sym_spacing,
                                int sc_offset = 0, int sym_offset = 0);
PilotPattern make_pilot_pattern(int rows, int cols, const PilotPreset &preset);

/// Channel values observed at pilot cells; zero everywhere else.
class SparseChannelEstimate {
public:
    SparseChannelEstimate(ComplexMatrix values, Mask mask);

    /// Keeps `dense` where `mask` is set and zeroes the remaining cells.
    static SparseChannelEstimate from_dense(const ComplexMatrix &dense, const Mask &mask);

    [[nodiscard]] int rows() const noexcept { return static_cast<int>(values_.rows()); }
    [[nodiscard]] int cols() const noexcept { return static_cast<int>(values_.cols()); }
    [[nodiscard]] int pilot_count() const noexcept { return static_cast<int>(mask_.count()); }
    [[nodiscard]] const ComplexMatrix &values() const noexcept { return values_; }
    [[nodiscard]] const Mask &mask() const noexcept { return mask_; }

private:
    ComplexMatrix values_;
    Mask mask_;
};

/// Least-squares channel at pilot cells: received / transmitted.
SparseChannelEstimate ls_estimate(const ResourceGrid &received, const ResourceGrid &transmitted,
                                  const PilotPattern &pattern,
                                  double eps_div = kDefaultDivisionEpsilon);

bool all_finite(const ComplexMatrix &m);

}  // namespace chcntk
