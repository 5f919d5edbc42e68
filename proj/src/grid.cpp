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

#include "chcntk/grid.hpp"

#include <cmath>
#include <string>

#include "chcntk/error.hpp"

namespace chcntk {

bool all_finite(const ComplexMatrix &m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) { return false; }
        }
    }
    return true;
}

ResourceGrid::ResourceGrid(ComplexMatrix data, double subcarrier_spacing_hz, double symbol_duration_s)
    : data_(std::move(data)),
      subcarrier_spacing_hz_(subcarrier_spacing_hz),
      symbol_duration_s_(symbol_duration_s) {
    if (data_.rows() < 1 || data_.cols() < 1) {
        throw Error(ErrorCode::InvalidArgument, "resource grid needs at least one row and one column");
    }
    if (!(subcarrier_spacing_hz_ > 0.0) || !(symbol_duration_s_ > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "subcarrier spacing and symbol duration must be positive");
    }
    if (!all_finite(data_)) { throw Error(ErrorCode::InvalidArgument, "resource grid contains NaN or Inf"); }
}

double PilotPattern::pilots_per_rb() const {
    const int blocks = rows() / kSubcarriersPerRb;
    if (blocks == 0) {
        // Grid narrower than one resource block: scale the count up.
        return static_cast<double>(pilot_count()) * kSubcarriersPerRb / rows();
    }
    const auto band = mask.topRows(static_cast<Eigen::Index>(blocks) * kSubcarriersPerRb);
    return static_cast<double>(band.count()) / blocks;
}

const PilotPreset &pilot_preset(int pilots_per_rb) {
    for (const auto &p : kPilotPresets) {
        if (p.pilots_per_rb == pilots_per_rb) { return p; }
    }
    throw Error(ErrorCode::InvalidArgument,
                "no pilot preset with " + std::to_string(pilots_per_rb) + " pilots per resource block (valid: 24, 16, 12)");
}

const PilotPreset &pilot_preset(std::string_view name) {
    for (const auto &p : kPilotPresets) {
        if (p.name == name) { return p; }
    }
    throw Error(ErrorCode::InvalidArgument,
                "unknown pilot preset '" + std::string(name) + "' (valid: dense, medium, sparse)");
}

PilotPattern make_pilot_pattern(int rows, int cols, int sc_spacing, int sym_spacing, int sc_offset,
                                int sym_offset) {
    if (rows < 1 || cols < 1) { throw Error(ErrorCode::InvalidSpacing, "grid dimensions must be >= 1"); }
    if (sc_spacing < 1 || sym_spacing < 1) { throw Error(ErrorCode::InvalidSpacing, "pilot spacings must be >= 1"); }
    if (sc_offset < 0 || sc_offset >= sc_spacing || sym_offset < 0 || sym_offset >= sym_spacing) {
        throw Error(ErrorCode::InvalidSpacing, "pilot offsets must lie in [0, spacing)");
    }

    PilotPattern p;
    p.sc_spacing = sc_spacing;
    p.sym_spacing = sym_spacing;
    p.sc_offset = sc_offset;
    p.sym_offset = sym_offset;
    p.mask = Mask::Constant(rows, cols, false);
    for (int m = sc_offset; m < rows; m += sc_spacing) {
        for (int n = sym_offset; n < cols; n += sym_spacing) { p.mask(m, n) = true; }
    }
    if (p.pilot_count() < 2) {
        throw Error(ErrorCode::InvalidSpacing, "pilot pattern must contain at least two pilots, got " +
                                                   std::to_string(p.pilot_count()));
    }
    return p;
}

PilotPattern make_pilot_pattern(int rows, int cols, const PilotPreset &preset) {
    return make_pilot_pattern(rows, cols, preset.sc_spacing, preset.sym_spacing);
}

SparseChannelEstimate::SparseChannelEstimate(ComplexMatrix values, Mask mask)
    : values_(std::move(values)), mask_(std::move(mask)) {
    if (values_.rows() != mask_.rows() || values_.cols() != mask_.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "sparse estimate values and mask differ in shape");
    }
    if (values_.size() == 0) { throw Error(ErrorCode::InvalidArgument, "sparse estimate is empty"); }
    if (!all_finite(values_)) { throw Error(ErrorCode::InvalidArgument, "sparse estimate contains NaN or Inf"); }
    for (Eigen::Index n = 0; n < values_.cols(); ++n) {
        for (Eigen::Index m = 0; m < values_.rows(); ++m) {
            if (!mask_(m, n) && values_(m, n) != cdouble{}) {
                throw Error(ErrorCode::InvalidArgument, "sparse estimate is nonzero outside its pilot mask");
            }
        }
    }
}

SparseChannelEstimate SparseChannelEstimate::from_dense(const ComplexMatrix &dense, const Mask &mask) {
    if (dense.rows() != mask.rows() || dense.cols() != mask.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "dense values and mask differ in shape");
    }
    ComplexMatrix values = mask.select(dense.array(), cdouble{}).matrix();
    return {std::move(values), mask};
}

SparseChannelEstimate ls_estimate(const ResourceGrid &received, const ResourceGrid &transmitted,
                                  const PilotPattern &pattern, double eps_div) {
    if (received.rows() != transmitted.rows() || received.cols() != transmitted.cols() ||
        received.rows() != pattern.rows() || received.cols() != pattern.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "received, transmitted and pilot mask must share dimensions");
    }
    ComplexMatrix values = ComplexMatrix::Zero(received.rows(), received.cols());
    for (int n = 0; n < received.cols(); ++n) {
        for (int m = 0; m < received.rows(); ++m) {
            if (!pattern.mask(m, n)) { continue; }
            const cdouble x = transmitted(m, n);
            if (std::abs(x) < eps_div) {
                throw Error(ErrorCode::ZeroPilotSymbol, "transmitted pilot symbol at (" + std::to_string(m) + ", " +
                                                            std::to_string(n) + ") is zero");
            }
            values(m, n) = received(m, n) / x;
        }
    }
    return {std::move(values), pattern.mask};
}

}  // namespace chcntk
