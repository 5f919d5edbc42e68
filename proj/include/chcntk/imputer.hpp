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

#include <functional>
#include <memory>
#include <vector>

#include "chcntk/cntk.hpp"
#include "chcntk/grid.hpp"

namespace chcntk {

/// Kernel regression from observed pixels to every pixel of the kernel's grid.
struct RegressionProblem {
    std::reference_wrapper<const RealMatrix> gram;
    /// Strictly increasing flattened (row-major) pixel indices.
    std::vector<Eigen::Index> observed_idx;
    Eigen::VectorXcd observed_vals;
    double ridge = 0.0;

    void validate() const;
};

struct RegressionResult {
    Eigen::VectorXcd prediction;
    double ridge_used = 0.0;
    /// 1 / rcond of the regularized observed Gram block.
    double condition_estimate = 0.0;
    int retries = 0;
};

/// prediction = K_ao (K_oo + ridge I)^-1 y, one Cholesky factorization shared
/// by the real and imaginary parts. Throws SingularKernel if it fails.
RegressionResult kernel_regress(const RegressionProblem &problem);

/// kernel_regress, retrying on factorization failure with
/// ridge <- max(ridge, 1e-10 trace(K_oo)/|obs|), then x10 per retry.
RegressionResult kernel_regress_escalating(RegressionProblem problem, int max_retries = 6);

/// Relative ridge candidates searched by leave-one-out selection:
/// 1e-9 to 1e2 in quarter-decade steps.
std::vector<double> loo_ridge_grid();

/// Squared leave-one-out residuals of one ridge candidate, poolable across
/// blocks.
struct LooScore {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t count = 0;

    void merge(const LooScore &other);
    [[nodiscard]] double mean() const;
    [[nodiscard]] double standard_error() const;
};

/// Closed-form leave-one-out scores for each relative ridge in the grid (each
/// value scaled by trace(K_oo)/|obs|). Infinite where K_oo + ridge I is not
/// positive definite.
std::vector<LooScore> loo_scores(const RealMatrix &gram, const std::vector<Eigen::Index> &observed,
                                 const Eigen::VectorXcd &values, const std::vector<double> &relative_grid);

/// Largest ridge whose mean score is within one standard error of the best.
/// `scores` must follow the increasing ridge grid.
std::size_t pick_ridge_index(const std::vector<LooScore> &scores);

/// Ridge chosen from the leave-one-out scores of a single block.
double select_ridge_loo(const RealMatrix &gram, const std::vector<Eigen::Index> &observed,
                        const Eigen::VectorXcd &values, const std::vector<double> &relative_grid = loo_ridge_grid());

/// Ridge as an absolute value, relative to trace(K_oo)/|obs|, or chosen per
/// block by leave-one-out cross-validation.
struct RidgeSpec {
    enum class Mode { Auto, Relative, Absolute };
    Mode mode = Mode::Auto;
    double value = 1e-8;

    static RidgeSpec automatic() { return {Mode::Auto, 0.0}; }
    static RidgeSpec absolute(double v) { return {Mode::Absolute, v}; }
    static RidgeSpec relative(double v) { return {Mode::Relative, v}; }
    /// Auto mode needs the observed values.
    [[nodiscard]] double resolve(const RealMatrix &gram, const std::vector<Eigen::Index> &observed,
                                 const Eigen::VectorXcd &values) const;
};

/// Which image the kernel is computed on.
///   Position  coordinates and a constant plane on a canvas padded by the
///             receptive radius; independent of the observations
///   Pilot     build_prior of the block (pilot values, mask, coordinates)
enum class PriorKind { Position, Pilot };

struct BlockDiagnostics {
    double ridge = 0.0;
    double condition_estimate = 0.0;
    int retries = 0;
    double kernel_seconds = 0.0;
    double solve_seconds = 0.0;
};

struct ImputedChannel {
    ComplexMatrix h_hat;
    std::vector<BlockDiagnostics> blocks;
};

struct ImputeOptions {
    CntkConfig cntk;
    RidgeSpec ridge;
    PriorKind prior = PriorKind::Position;
    /// Constant plane of the position prior.
    double position_level = 1000.0;
    int block_rows = kSubcarriersPerRb;
    /// Auto ridge: one leave-one-out choice for the whole grid instead of one
    /// per block.
    bool pool_ridge = true;
    /// 0 = default thread count.
    unsigned threads = 0;
};

/// Kernel over the pixels of `block` and the factor that maps regression
/// outputs back to channel units.
struct BlockKernel {
    std::shared_ptr<const CoordinateKernel> kernel;
    double scale = 1.0;
};

/// Position kernels are shared across blocks and calls with the same shape and
/// configuration.
BlockKernel block_kernel(const SparseChannelEstimate &block, const ImputeOptions &options);
void clear_kernel_cache();

/// Non-overlapping bands of `block_rows` subcarriers, top to bottom.
std::vector<SparseChannelEstimate> split_blocks(const SparseChannelEstimate &sparse, int block_rows);
ComplexMatrix stitch_blocks(const std::vector<ComplexMatrix> &blocks);

/// Channel estimate for one block: prior -> CNTK -> kernel regression,
/// de-normalized by the prior scale. A fully observed block under the Auto
/// ridge is returned as observed.
ComplexMatrix impute_block(const SparseChannelEstimate &block, const ImputeOptions &options,
                           BlockDiagnostics *diag = nullptr);

/// Full-grid estimate: split into row bands, impute each independently, stitch.
ImputedChannel estimate_channel_cntk(const SparseChannelEstimate &sparse, const ImputeOptions &options = {});

}  // namespace chcntk
