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

#include "chcntk/imputer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <string>

#include "chcntk/error.hpp"
#include "chcntk/parallel.hpp"

namespace chcntk {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

RealMatrix observed_block(const RealMatrix &gram, const std::vector<Eigen::Index> &idx) {
    const auto n = static_cast<Eigen::Index>(idx.size());
    RealMatrix k(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index r = 0; r < n; ++r) { k(r, c) = gram(idx[r], idx[c]); }
    }
    return k;
}

double mean_observed_diagonal(const RealMatrix &gram, const std::vector<Eigen::Index> &idx) {
    double tr = 0.0;
    for (auto i : idx) { tr += gram(i, i); }
    return tr / static_cast<double>(idx.size());
}

}  // namespace

void RegressionProblem::validate() const {
    const RealMatrix &k = gram.get();
    if (k.rows() != k.cols()) { throw Error(ErrorCode::DimensionMismatch, "kernel gram must be square"); }
    if (observed_idx.empty()) { throw Error(ErrorCode::EmptyPilot, "regression needs at least one observation"); }
    if (static_cast<Eigen::Index>(observed_idx.size()) != observed_vals.size()) {
        throw Error(ErrorCode::DimensionMismatch, "observed indices and values differ in length");
    }
    for (std::size_t t = 0; t < observed_idx.size(); ++t) {
        if (observed_idx[t] < 0 || observed_idx[t] >= k.rows()) {
            throw Error(ErrorCode::IndexOutOfRange, "observed index outside the kernel");
        }
        if (t > 0 && observed_idx[t] <= observed_idx[t - 1]) {
            throw Error(ErrorCode::InvalidArgument, "observed indices must be strictly increasing");
        }
    }
    if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
        throw Error(ErrorCode::InvalidArgument, "ridge must be finite and non-negative");
    }
}

RegressionResult kernel_regress(const RegressionProblem &problem) {
    problem.validate();
    const RealMatrix &gram = problem.gram.get();
    const auto &idx = problem.observed_idx;
    const auto n_obs = static_cast<Eigen::Index>(idx.size());

    RealMatrix k_oo = observed_block(gram, idx);
    k_oo.diagonal().array() += problem.ridge;
    Eigen::LLT<RealMatrix> llt(k_oo);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::SingularKernel, "Cholesky factorization of K_oo + ridge I failed (ridge = " +
                                                   std::to_string(problem.ridge) + ")");
    }

    RealMatrix rhs(n_obs, 2);
    rhs.col(0) = problem.observed_vals.real();
    rhs.col(1) = problem.observed_vals.imag();
    const RealMatrix alpha = llt.solve(rhs);
    if (!alpha.allFinite()) { throw Error(ErrorCode::SingularKernel, "kernel regression produced non-finite weights"); }

    RealMatrix k_ao(gram.rows(), n_obs);
    for (Eigen::Index c = 0; c < n_obs; ++c) { k_ao.col(c) = gram.col(idx[c]); }
    const RealMatrix pred = k_ao * alpha;

    RegressionResult result;
    result.prediction.resize(gram.rows());
    result.prediction.real() = pred.col(0);
    result.prediction.imag() = pred.col(1);
    result.ridge_used = problem.ridge;
    const double rc = llt.rcond();
    result.condition_estimate = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    return result;
}

RegressionResult kernel_regress_escalating(RegressionProblem problem, int max_retries) {
    problem.validate();
    const double floor = 1e-10 * mean_observed_diagonal(problem.gram.get(), problem.observed_idx);
    for (int attempt = 0;; ++attempt) {
        try {
            auto r = kernel_regress(problem);
            r.retries = attempt;
            return r;
        } catch (const Error &e) {
            if (e.code() != ErrorCode::SingularKernel || attempt >= max_retries) { throw; }
        }
        problem.ridge = problem.ridge < floor ? floor : problem.ridge * 10.0;
    }
}

std::vector<double> loo_ridge_grid() {
    std::vector<double> grid;
    for (int k = -36; k <= 8; ++k) { grid.push_back(std::pow(10.0, 0.25 * k)); }
    return grid;
}

void LooScore::merge(const LooScore &other) {
    sum += other.sum;
    sum_sq += other.sum_sq;
    count += other.count;
}

double LooScore::mean() const { return count > 0 ? sum / static_cast<double>(count) : 0.0; }

double LooScore::standard_error() const {
    if (count < 2) { return 0.0; }
    const double n = static_cast<double>(count);
    const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
    return std::sqrt(var / n);
}

std::vector<LooScore> loo_scores(const RealMatrix &gram, const std::vector<Eigen::Index> &observed,
                                 const Eigen::VectorXcd &values, const std::vector<double> &relative_grid) {
    if (relative_grid.empty()) { throw Error(ErrorCode::InvalidArgument, "empty ridge grid"); }
    if (static_cast<Eigen::Index>(observed.size()) != values.size()) {
        throw Error(ErrorCode::DimensionMismatch, "observed indices and values differ in length");
    }
    const double unit = mean_observed_diagonal(gram, observed);
    const Eigen::SelfAdjointEigenSolver<RealMatrix> eig(observed_block(gram, observed));
    const RealMatrix &vecs = eig.eigenvectors();
    const Eigen::VectorXd &vals = eig.eigenvalues();
    RealMatrix rhs(values.size(), 2);
    rhs.col(0) = values.real();
    rhs.col(1) = values.imag();
    const RealMatrix projected = vecs.transpose() * rhs;

    std::vector<LooScore> out(relative_grid.size());
    for (std::size_t g = 0; g < relative_grid.size(); ++g) {
        const Eigen::ArrayXd inv = (vals.array() + relative_grid[g] * unit).inverse();
        if (!inv.allFinite() || (inv <= 0.0).any()) {
            out[g].sum = std::numeric_limits<double>::infinity();
            out[g].count = observed.size();
            continue;
        }
        // Leave-one-out residual_i = alpha_i / [(K + ridge I)^-1]_ii.
        const RealMatrix alpha = vecs * (inv.matrix().asDiagonal() * projected);
        const Eigen::VectorXd inv_diag = vecs.array().square().matrix() * inv.matrix();
        for (Eigen::Index i = 0; i < alpha.rows(); ++i) {
            const double e = alpha.row(i).squaredNorm() / (inv_diag(i) * inv_diag(i));
            out[g].sum += e;
            out[g].sum_sq += e * e;
        }
        out[g].count = observed.size();
        if (!std::isfinite(out[g].sum)) { out[g].sum = std::numeric_limits<double>::infinity(); }
    }
    return out;
}

std::size_t pick_ridge_index(const std::vector<LooScore> &scores) {
    if (scores.empty()) { throw Error(ErrorCode::InvalidArgument, "no ridge candidates"); }
    std::size_t best = 0;
    for (std::size_t g = 1; g < scores.size(); ++g) {
        if (scores[g].mean() < scores[best].mean()) { best = g; }
    }
    // One-standard-error rule: the most regularized candidate that is not
    // distinguishable from the minimum.
    const double limit = scores[best].mean() + scores[best].standard_error();
    std::size_t pick = best;
    for (std::size_t g = best + 1; g < scores.size(); ++g) {
        if (scores[g].mean() <= limit) { pick = g; }
    }
    return pick;
}

double select_ridge_loo(const RealMatrix &gram, const std::vector<Eigen::Index> &observed,
                        const Eigen::VectorXcd &values, const std::vector<double> &relative_grid) {
    const auto idx = pick_ridge_index(loo_scores(gram, observed, values, relative_grid));
    return relative_grid[idx] * mean_observed_diagonal(gram, observed);
}

double RidgeSpec::resolve(const RealMatrix &gram, const std::vector<Eigen::Index> &observed,
                          const Eigen::VectorXcd &values) const {
    switch (mode) {
        case Mode::Auto: return select_ridge_loo(gram, observed, values);
        case Mode::Absolute:
        case Mode::Relative:
            if (!(value >= 0.0) || !std::isfinite(value)) {
                throw Error(ErrorCode::InvalidArgument, "ridge value must be finite and non-negative");
            }
            return mode == Mode::Absolute ? value : value * mean_observed_diagonal(gram, observed);
    }
    return value;
}

namespace {

struct KernelCache {
    std::mutex mutex;
    std::map<std::string, std::shared_ptr<const CoordinateKernel>> entries;
};

KernelCache &kernel_cache() {
    static KernelCache cache;
    return cache;
}

}  // namespace

void clear_kernel_cache() {
    auto &cache = kernel_cache();
    const std::lock_guard lock(cache.mutex);
    cache.entries.clear();
}

BlockKernel block_kernel(const SparseChannelEstimate &block, const ImputeOptions &options) {
    if (options.prior == PriorKind::Pilot) {
        const PriorTensor prior = build_prior(block);
        return {std::make_shared<const CoordinateKernel>(compute_cntk(prior, options.cntk)), prior.scale};
    }
    const double peak = block.values().cwiseAbs().maxCoeff();
    const double scale = peak > 0.0 ? peak : 1.0;

    auto &cache = kernel_cache();
    char key[96];
    std::snprintf(key, sizeof(key), "%dx%d;%.17g;", block.rows(), block.cols(), options.position_level);
    const std::string full_key = key + options.cntk.fingerprint();
    const std::lock_guard lock(cache.mutex);
    auto &slot = cache.entries[full_key];
    if (!slot) {
        const int margin = options.cntk.receptive_radius();
        const PriorTensor prior = build_position_prior(block.rows(), block.cols(), margin, options.position_level);
        slot = std::make_shared<const CoordinateKernel>(crop_kernel(compute_cntk(prior, options.cntk), margin));
    }
    return {slot, scale};
}

std::vector<SparseChannelEstimate> split_blocks(const SparseChannelEstimate &sparse, int block_rows) {
    if (block_rows < 1 || sparse.rows() % block_rows != 0) {
        throw Error(ErrorCode::Divisibility, std::to_string(sparse.rows()) + " subcarriers are not divisible into " +
                                                 std::to_string(block_rows) + "-row blocks");
    }
    std::vector<SparseChannelEstimate> blocks;
    const int count = sparse.rows() / block_rows;
    blocks.reserve(static_cast<std::size_t>(count));
    for (int b = 0; b < count; ++b) {
        blocks.emplace_back(sparse.values().middleRows(static_cast<Eigen::Index>(b) * block_rows, block_rows),
                            sparse.mask().middleRows(static_cast<Eigen::Index>(b) * block_rows, block_rows));
    }
    return blocks;
}

ComplexMatrix stitch_blocks(const std::vector<ComplexMatrix> &blocks) {
    if (blocks.empty()) { throw Error(ErrorCode::InvalidArgument, "nothing to stitch"); }
    Eigen::Index rows = 0;
    const auto cols = blocks.front().cols();
    for (const auto &b : blocks) {
        if (b.cols() != cols) { throw Error(ErrorCode::DimensionMismatch, "blocks differ in column count"); }
        rows += b.rows();
    }
    ComplexMatrix out(rows, cols);
    Eigen::Index r = 0;
    for (const auto &b : blocks) {
        out.middleRows(r, b.rows()) = b;
        r += b.rows();
    }
    return out;
}

namespace {

bool is_complete(const SparseChannelEstimate &block) { return block.pilot_count() == block.rows() * block.cols(); }

std::vector<Eigen::Index> observed_indices(const SparseChannelEstimate &block) {
    std::vector<Eigen::Index> idx;
    idx.reserve(static_cast<std::size_t>(block.pilot_count()));
    for (int m = 0; m < block.rows(); ++m) {
        for (int n = 0; n < block.cols(); ++n) {
            if (block.mask()(m, n)) { idx.push_back(static_cast<Eigen::Index>(m) * block.cols() + n); }
        }
    }
    return idx;
}

// Leave-one-out error summed over all incomplete blocks, in channel units.
double pooled_relative_ridge(const std::vector<SparseChannelEstimate> &blocks, const ImputeOptions &options) {
    const auto grid = loo_ridge_grid();
    std::vector<std::vector<LooScore>> per_block(blocks.size());
    parallel_for(blocks.size(), options.threads, [&](std::size_t b) {
        if (is_complete(blocks[b])) { return; }
        const BlockKernel bk = block_kernel(blocks[b], options);
        const auto idx = observed_indices(blocks[b]);
        Eigen::VectorXcd y(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t t = 0; t < idx.size(); ++t) {
            y(static_cast<Eigen::Index>(t)) = blocks[b].values()(idx[t] / blocks[b].cols(), idx[t] % blocks[b].cols());
        }
        per_block[b] = loo_scores(bk.kernel->gram, idx, y, grid);
    });
    std::vector<LooScore> total(grid.size());
    for (const auto &scores : per_block) {
        for (std::size_t g = 0; g < scores.size(); ++g) { total[g].merge(scores[g]); }
    }
    return grid[pick_ridge_index(total)];
}

}  // namespace

ComplexMatrix impute_block(const SparseChannelEstimate &block, const ImputeOptions &options,
                           BlockDiagnostics *diag) {
    if (options.ridge.mode == RidgeSpec::Mode::Auto && is_complete(block)) {
        if (diag != nullptr) { *diag = {}; }
        return block.values();
    }
    const auto t0 = Clock::now();
    const BlockKernel bk = block_kernel(block, options);
    const RealMatrix &gram = bk.kernel->gram;
    const double kernel_seconds = seconds_since(t0);

    const int cols = block.cols();
    std::vector<Eigen::Index> idx = observed_indices(block);
    Eigen::VectorXcd y(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t t = 0; t < idx.size(); ++t) {
        y(static_cast<Eigen::Index>(t)) = block.values()(idx[t] / cols, idx[t] % cols) / bk.scale;
    }

    const auto t1 = Clock::now();
    const double ridge = options.ridge.resolve(gram, idx, y);
    RegressionProblem problem{std::cref(gram), std::move(idx), std::move(y), ridge};
    const RegressionResult reg = kernel_regress_escalating(std::move(problem));
    const double solve_seconds = seconds_since(t1);

    ComplexMatrix out(block.rows(), cols);
    for (int m = 0; m < block.rows(); ++m) {
        for (int n = 0; n < cols; ++n) { out(m, n) = reg.prediction(static_cast<Eigen::Index>(m) * cols + n) * bk.scale; }
    }
    if (diag != nullptr) {
        *diag = {reg.ridge_used, reg.condition_estimate, reg.retries, kernel_seconds, solve_seconds};
    }
    return out;
}

ImputedChannel estimate_channel_cntk(const SparseChannelEstimate &sparse, const ImputeOptions &options) {
    options.cntk.validate();
    const auto blocks = split_blocks(sparse, options.block_rows);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (blocks[b].pilot_count() == 0) {
            throw Error(ErrorCode::EmptyBlockPilot, "block " + std::to_string(b) + " contains no pilots");
        }
    }
    ImputeOptions block_options = options;
    if (options.ridge.mode == RidgeSpec::Mode::Auto && options.pool_ridge) {
        block_options.ridge = RidgeSpec::relative(pooled_relative_ridge(blocks, options));
    }
    std::vector<ComplexMatrix> estimates(blocks.size());
    ImputedChannel result;
    result.blocks.resize(blocks.size());
    parallel_for(blocks.size(), options.threads, [&](std::size_t b) {
        estimates[b] = is_complete(blocks[b]) && options.ridge.mode == RidgeSpec::Mode::Auto
                           ? blocks[b].values()
                           : impute_block(blocks[b], block_options, &result.blocks[b]);
    });
    result.h_hat = stitch_blocks(estimates);
    return result;
}

}  // namespace chcntk
