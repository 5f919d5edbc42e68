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
#include <string>
#include <vector>

#include "chcntk/grid.hpp"

namespace chcntk {

/// Plane order of the prior tensor fed to the kernel.
enum class PriorPlane : int { Real = 0, Imag = 1, Mask = 2, RowCoord = 3, ColCoord = 4 };
inline constexpr int kPriorChannels = 5;

/// Real C x M x N prior built from a sparse pilot image.
struct PriorTensor {
    std::vector<RealMatrix> planes;
    /// Factor that maps the normalized real/imag planes back to channel units.
    double scale = 1.0;

    [[nodiscard]] int channels() const noexcept { return static_cast<int>(planes.size()); }
    [[nodiscard]] int rows() const noexcept { return planes.empty() ? 0 : static_cast<int>(planes.front().rows()); }
    [[nodiscard]] int cols() const noexcept { return planes.empty() ? 0 : static_cast<int>(planes.front().cols()); }
    [[nodiscard]] const RealMatrix &plane(PriorPlane p) const { return planes[static_cast<int>(p)]; }
};

/// Planes: real and imaginary pilot values (jointly scaled to max |.| = 1),
/// pilot mask, m/(M-1) and n/(N-1).
PriorTensor build_prior(const SparseChannelEstimate &sparse);

/// Data-free prior on a canvas extending `margin` pixels past a rows x cols
/// block on every side. Planes: row and column coordinates (0..1 across the
/// block, continuing linearly into the margin) and a constant plane `level`.
PriorTensor build_position_prior(int rows, int cols, int margin, double level);

struct CntkConfig {
    int depth = 8;
    int filter_size = 3;
    double neg_slope = 0.05;
    double pos_slope = 1.0;
    double corr_eps = 1e-9;

    void validate() const;
    /// Stable 16-hex-digit hash of the hyperparameters.
    [[nodiscard]] std::string fingerprint() const;
    /// Pixels a single output pixel sees in each direction: depth * (q / 2).
    [[nodiscard]] int receptive_radius() const noexcept { return depth * (filter_size / 2); }
};

/// Gaussian expectations through a leaky ReLU with slopes (a, b):
///   sigma     = E[act(u) act(v)]
///   sigma_dot = E[act'(u) act'(v)]
/// for (u, v) ~ N(0, [[l11, l12], [l12, l22]]).
struct DualValues {
    double sigma = 0.0;
    double sigma_dot = 0.0;
};

DualValues leaky_relu_duals(double l11, double l22, double l12, double a, double b, double corr_eps = 1e-9);

/// Diagonal patch trace over a P x P pixel-pair field, P = rows * cols with
/// row-major flattening: out(i, j) = q^-2 sum_off field(i + off, j + off),
/// zero padding outside the grid.
RealMatrix patch_aggregate(const RealMatrix &field, int rows, int cols, int q);

struct CoordinateKernel {
    RealMatrix gram;
    int rows = 0;
    int cols = 0;

    [[nodiscard]] int size() const noexcept { return static_cast<int>(gram.rows()); }
};

/// Pixelwise CNTK of a depth-L leaky-ReLU conv net with a 1x1 linear readout,
/// evaluated on a single prior image. The result is symmetrized.
CoordinateKernel compute_cntk(const PriorTensor &prior, const CntkConfig &cfg);

/// Same recursion without the final (G + G^T) / 2 step.
CoordinateKernel compute_cntk_raw(const PriorTensor &prior, const CntkConfig &cfg);

/// Restriction of a kernel computed on a padded canvas to the inner
/// (rows - 2 margin) x (cols - 2 margin) pixels.
CoordinateKernel crop_kernel(const CoordinateKernel &kernel, int margin);

}  // namespace chcntk
