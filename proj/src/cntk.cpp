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

#include "chcntk/cntk.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "chcntk/error.hpp"

namespace chcntk {
namespace {

constexpr double kCovarianceTolerance = 1e-8;

void validate_prior(const PriorTensor &prior) {
    if (prior.planes.empty()) { throw Error(ErrorCode::InvalidArgument, "prior tensor has no channels"); }
    const auto rows = prior.planes.front().rows();
    const auto cols = prior.planes.front().cols();
    if (rows < 1 || cols < 1) { throw Error(ErrorCode::InvalidArgument, "prior planes must be non-empty"); }
    for (const auto &p : prior.planes) {
        if (p.rows() != rows || p.cols() != cols) {
            throw Error(ErrorCode::DimensionMismatch, "prior planes differ in shape");
        }
        if (!p.allFinite()) { throw Error(ErrorCode::InvalidArgument, "prior tensor contains NaN or Inf"); }
    }
}

}  // namespace

PriorTensor build_prior(const SparseChannelEstimate &sparse) {
    if (sparse.pilot_count() < 1) { throw Error(ErrorCode::EmptyPilot, "cannot build a prior without pilots"); }
    const int rows = sparse.rows();
    const int cols = sparse.cols();

    PriorTensor prior;
    RealMatrix re = sparse.values().real();
    RealMatrix im = sparse.values().imag();
    const double peak = std::max(re.cwiseAbs().maxCoeff(), im.cwiseAbs().maxCoeff());
    prior.scale = peak > 0.0 ? peak : 1.0;
    re /= prior.scale;
    im /= prior.scale;

    RealMatrix mask = sparse.mask().cast<double>().matrix();
    RealMatrix row_coord(rows, cols);
    RealMatrix col_coord(rows, cols);
    for (int m = 0; m < rows; ++m) {
        for (int n = 0; n < cols; ++n) {
            row_coord(m, n) = rows > 1 ? static_cast<double>(m) / (rows - 1) : 0.0;
            col_coord(m, n) = cols > 1 ? static_cast<double>(n) / (cols - 1) : 0.0;
        }
    }
    prior.planes = {std::move(re), std::move(im), std::move(mask), std::move(row_coord), std::move(col_coord)};
    return prior;
}

PriorTensor build_position_prior(int rows, int cols, int margin, double level) {
    if (rows < 1 || cols < 1 || margin < 0) { throw Error(ErrorCode::InvalidArgument, "invalid prior canvas shape"); }
    if (!std::isfinite(level)) { throw Error(ErrorCode::InvalidArgument, "constant plane level must be finite"); }
    const int canvas_rows = rows + 2 * margin;
    const int canvas_cols = cols + 2 * margin;
    PriorTensor prior;
    RealMatrix row_coord(canvas_rows, canvas_cols);
    RealMatrix col_coord(canvas_rows, canvas_cols);
    for (int m = 0; m < canvas_rows; ++m) {
        for (int n = 0; n < canvas_cols; ++n) {
            row_coord(m, n) = rows > 1 ? static_cast<double>(m - margin) / (rows - 1) : 0.0;
            col_coord(m, n) = cols > 1 ? static_cast<double>(n - margin) / (cols - 1) : 0.0;
        }
    }
    prior.planes = {std::move(row_coord), std::move(col_coord), RealMatrix::Constant(canvas_rows, canvas_cols, level)};
    return prior;
}

void CntkConfig::validate() const {
    if (depth < 1) { throw Error(ErrorCode::InvalidArgument, "CNTK depth must be >= 1"); }
    if (filter_size < 1 || filter_size % 2 == 0) {
        throw Error(ErrorCode::InvalidArgument, "CNTK filter size must be a positive odd integer");
    }
    if (!(pos_slope > 0.0) || !(neg_slope >= 0.0) || neg_slope > pos_slope) {
        throw Error(ErrorCode::InvalidArgument, "leaky ReLU slopes must satisfy 0 <= a <= b, b > 0");
    }
    if (!(corr_eps > 0.0)) { throw Error(ErrorCode::InvalidArgument, "correlation clamp epsilon must be positive"); }
}

std::string CntkConfig::fingerprint() const {
    char text[160];
    std::snprintf(text, sizeof(text), "L=%d;q=%d;a=%.17g;b=%.17g;eps=%.17g", depth, filter_size, neg_slope,
                  pos_slope, corr_eps);
    // FNV-1a, 64 bit.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char *c = text; *c != '\0'; ++c) {
        h ^= static_cast<unsigned char>(*c);
        h *= 0x100000001b3ULL;
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

DualValues leaky_relu_duals(double l11, double l22, double l12, double a, double b, double corr_eps) {
    if (!(l11 >= 0.0) || !(l22 >= 0.0)) {
        throw Error(ErrorCode::CovarianceValidity, "variances must be non-negative");
    }
    const double norm = std::sqrt(l11 * l22);
    if (!(std::abs(l12) <= norm + kCovarianceTolerance)) {
        throw Error(ErrorCode::CovarianceValidity, "|covariance| exceeds sqrt(var1 * var2)");
    }
    const double ab = a * b;
    const double half_gap = 0.5 * (b - a) * (b - a);
    constexpr double pi = std::numbers::pi;

    if (l11 * l22 < corr_eps * corr_eps) {
        // Zero-energy limit: sigma -> 0, derivative term at rho = 0.
        return {0.0, ab + half_gap * 0.5};
    }
    const double rho = std::clamp(l12 / norm, -1.0, 1.0);
    const double angle = pi - std::acos(rho);
    const double kappa0 = angle / pi;
    const double kappa1 = (std::sqrt(std::max(0.0, 1.0 - rho * rho)) + angle * rho) / pi;
    return {norm * (ab * rho + half_gap * kappa1), ab + half_gap * kappa0};
}

RealMatrix patch_aggregate(const RealMatrix &field, int rows, int cols, int q) {
    const Eigen::Index size = static_cast<Eigen::Index>(rows) * cols;
    if (field.rows() != size || field.cols() != size) {
        throw Error(ErrorCode::DimensionMismatch, "pixel-pair field must be (rows*cols) x (rows*cols)");
    }
    if (q < 1 || q % 2 == 0) { throw Error(ErrorCode::InvalidArgument, "filter size must be a positive odd integer"); }

    const int r = q / 2;
    RealMatrix out = RealMatrix::Zero(size, size);
    std::vector<Eigen::Index> target;
    std::vector<Eigen::Index> source;
    target.reserve(static_cast<std::size_t>(size));
    source.reserve(static_cast<std::size_t>(size));
    for (int dm = -r; dm <= r; ++dm) {
        for (int dn = -r; dn <= r; ++dn) {
            // Pixels whose shifted position stays on the grid.
            target.clear();
            source.clear();
            for (int m = std::max(0, -dm); m < std::min(rows, rows - dm); ++m) {
                for (int n = std::max(0, -dn); n < std::min(cols, cols - dn); ++n) {
                    target.push_back(static_cast<Eigen::Index>(m) * cols + n);
                    source.push_back(static_cast<Eigen::Index>(m + dm) * cols + (n + dn));
                }
            }
            for (std::size_t b = 0; b < target.size(); ++b) {
                const double *src = field.col(source[b]).data();
                double *dst = out.col(target[b]).data();
                for (std::size_t a = 0; a < target.size(); ++a) { dst[target[a]] += src[source[a]]; }
            }
        }
    }
    out *= 1.0 / (static_cast<double>(q) * q);
    return out;
}

CoordinateKernel compute_cntk_raw(const PriorTensor &prior, const CntkConfig &cfg) {
    cfg.validate();
    validate_prior(prior);
    const int rows = prior.rows();
    const int cols = prior.cols();
    const Eigen::Index size = static_cast<Eigen::Index>(rows) * cols;

    // Sigma^(0)[i][j] = sum_c A[c][i] A[c][j]; flatten each plane row-major.
    RealMatrix features(prior.channels(), size);
    for (int c = 0; c < prior.channels(); ++c) {
        const auto &p = prior.planes[static_cast<std::size_t>(c)];
        for (int m = 0; m < rows; ++m) {
            for (int n = 0; n < cols; ++n) { features(c, static_cast<Eigen::Index>(m) * cols + n) = p(m, n); }
        }
    }
    RealMatrix sigma = features.transpose() * features;
    RealMatrix theta = sigma;

    for (int layer = 1; layer <= cfg.depth; ++layer) {
        const RealMatrix t_sigma = patch_aggregate(sigma, rows, cols, cfg.filter_size);
        const RealMatrix t_theta = patch_aggregate(theta, rows, cols, cfg.filter_size);
        for (Eigen::Index j = 0; j < size; ++j) {
            for (Eigen::Index i = 0; i < size; ++i) {
                const auto d = leaky_relu_duals(t_sigma(i, i), t_sigma(j, j), t_sigma(i, j), cfg.neg_slope,
                                                cfg.pos_slope, cfg.corr_eps);
                sigma(i, j) = d.sigma;
                theta(i, j) = t_theta(i, j) * d.sigma_dot + d.sigma;
            }
        }
    }
    if (!theta.allFinite()) { throw Error(ErrorCode::NonFiniteKernel, "CNTK gram contains NaN or Inf"); }
    return {std::move(theta), rows, cols};
}

CoordinateKernel compute_cntk(const PriorTensor &prior, const CntkConfig &cfg) {
    auto k = compute_cntk_raw(prior, cfg);
    RealMatrix sym = 0.5 * (k.gram + k.gram.transpose());
    k.gram = std::move(sym);
    return k;
}

CoordinateKernel crop_kernel(const CoordinateKernel &kernel, int margin) {
    const int rows = kernel.rows - 2 * margin;
    const int cols = kernel.cols - 2 * margin;
    if (margin < 0 || rows < 1 || cols < 1) { throw Error(ErrorCode::InvalidArgument, "crop margin too large"); }
    std::vector<Eigen::Index> keep;
    keep.reserve(static_cast<std::size_t>(rows) * cols);
    for (int m = 0; m < rows; ++m) {
        for (int n = 0; n < cols; ++n) { keep.push_back(static_cast<Eigen::Index>(m + margin) * kernel.cols + n + margin); }
    }
    return {kernel.gram(keep, keep), rows, cols};
}

}  // namespace chcntk
