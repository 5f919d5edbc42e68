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


#include <doctest.h>

#include <cmath>
#include <random>

#include "chcntk/cntk.hpp"
#include "chcntk/error.hpp"
#include "chcntk/mc_dual_oracle.hpp"
#include "empirical_ntk.hpp"

using namespace chcntk;

namespace {

RealMatrix random_plane(int rows, int cols, std::mt19937_64 &rng) {
    std::normal_distribution<double> nd;
    RealMatrix p(rows, cols);
    for (int m = 0; m < rows; ++m) {
        for (int n = 0; n < cols; ++n) { p(m, n) = nd(rng); }
    }
    return p;
}

PriorTensor random_prior(int rows, int cols, int channels, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    PriorTensor prior;
    for (int c = 0; c < channels; ++c) { prior.planes.push_back(random_plane(rows, cols, rng)); }
    return prior;
}

RealMatrix input_covariance(const PriorTensor &prior) {
    const int p = prior.rows() * prior.cols();
    RealMatrix s = RealMatrix::Zero(p, p);
    for (const auto &plane : prior.planes) {
        for (int i = 0; i < p; ++i) {
            for (int j = 0; j < p; ++j) {
                s(i, j) += plane(i / prior.cols(), i % prior.cols()) * plane(j / prior.cols(), j % prior.cols());
            }
        }
    }
    return s;
}

/// Direct enumeration of the diagonal patch trace.
RealMatrix enumerate_patch_trace(const RealMatrix &field, int rows, int cols, int q) {
    const int p = rows * cols;
    const int r = q / 2;
    RealMatrix out = RealMatrix::Zero(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            double acc = 0.0;
            for (int a = -r; a <= r; ++a) {
                for (int b = -r; b <= r; ++b) {
                    const int mi = i / cols + a;
                    const int ni = i % cols + b;
                    const int mj = j / cols + a;
                    const int nj = j % cols + b;
                    if (mi < 0 || mi >= rows || ni < 0 || ni >= cols || mj < 0 || mj >= rows || nj < 0 || nj >= cols) {
                        continue;
                    }
                    acc += field(mi * cols + ni, mj * cols + nj);
                }
            }
            out(i, j) = acc / (q * q);
        }
    }
    return out;
}

double cosine(const RealMatrix &a, const RealMatrix &b) {
    return (a.array() * b.array()).sum() / (a.norm() * b.norm());
}

ErrorCode code_of(auto &&fn) {
    try {
        fn();
    } catch (const Error &e) { return e.code(); }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_SUITE("cntk") {
    TEST_CASE("dual activation closed forms") {
        auto d = leaky_relu_duals(1, 1, 1, 0.05, 1);
        CHECK(d.sigma == doctest::Approx(0.50125).epsilon(1e-14));
        CHECK(d.sigma_dot == doctest::Approx(0.50125).epsilon(1e-14));

        d = leaky_relu_duals(1, 1, 1, 1, 1);
        CHECK(d.sigma == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(d.sigma_dot == doctest::Approx(1.0).epsilon(1e-14));

        d = leaky_relu_duals(1, 1, 0, 0.05, 1);
        CHECK(d.sigma_dot == doctest::Approx(0.05 + 0.9025 / 4).epsilon(1e-14));

        d = leaky_relu_duals(1, 1, -1, 0, 1);
        CHECK(std::abs(d.sigma) < 1e-15);
        CHECK(std::abs(d.sigma_dot) < 1e-15);
    }

    TEST_CASE("second moment of a leaky ReLU is (a^2 + b^2) / 2 times the variance") {
        for (double var : {0.25, 1.0, 9.0}) {
            for (double a : {0.0, 0.05, 0.3, 1.0}) {
                const auto d = leaky_relu_duals(var, var, var, a, 1.0);
                CHECK(d.sigma == doctest::Approx(var * (a * a + 1.0) / 2.0).epsilon(1e-13));
            }
        }
    }

    TEST_CASE("zero-energy pixels take the independent-input branch") {
        const auto d = leaky_relu_duals(0, 1, 0, 0.05, 1);
        CHECK(d.sigma == 0.0);
        CHECK(d.sigma_dot == doctest::Approx(0.275625));
    }

    TEST_CASE("covariance validity") {
        CHECK(code_of([] { (void)leaky_relu_duals(1, 1, 1.1, 0.05, 1); }) == ErrorCode::CovarianceValidity);
        CHECK(code_of([] { (void)leaky_relu_duals(-1, 1, 0, 0.05, 1); }) == ErrorCode::CovarianceValidity);
        // Rounding slack of 1e-8 is accepted and clamped.
        const auto d = leaky_relu_duals(1, 1, 1 + 5e-9, 0.05, 1);
        CHECK(d.sigma == doctest::Approx(0.50125).epsilon(1e-8));
    }

    TEST_CASE("Monte-Carlo oracle agrees with the closed form") {
        const long samples = 200000;
        const double rhos[] = {-1.0, -0.6, 0.0, 0.5, 0.9, 1.0};
        const std::pair<double, double> vars[] = {{1, 1}, {4, 1}, {0.25, 9}};
        std::uint64_t seed = 100;
        for (const auto &[v1, v2] : vars) {
            for (double rho : rhos) {
                const double l12 = rho * std::sqrt(v1 * v2);
                const auto closed = leaky_relu_duals(v1, v2, l12, 0.05, 1);
                const auto mc = mc_dual_oracle(v1, v2, l12, 0.05, 1, samples, seed++);
                CHECK(std::abs(mc.sigma - closed.sigma) <= 4 * mc.sigma_se + 1e-12);
                CHECK(std::abs(mc.sigma_dot - closed.sigma_dot) <= 4 * mc.sigma_dot_se + 1e-12);
            }
        }
    }

    TEST_CASE("Monte-Carlo oracle examples") {
        const auto mc = mc_dual_oracle(1, 1, 0.5, 0.05, 1, 1000000, 7);
        const auto closed = leaky_relu_duals(1, 1, 0.5, 0.05, 1);
        CHECK(std::abs(mc.sigma - closed.sigma) <= 3 * mc.sigma_se);
        CHECK(std::abs(mc.sigma_dot - closed.sigma_dot) <= 3 * mc.sigma_dot_se);

        const auto identity = mc_dual_oracle(1, 1, 1, 1, 1, 100000, 8);
        CHECK(std::abs(identity.sigma - 1.0) <= 3 * identity.sigma_se);

        const auto relu = mc_dual_oracle(4, 1, 0, 0, 1, 100000, 9);
        CHECK(std::abs(relu.sigma_dot - 0.25) <= 3 * relu.sigma_dot_se);

        const auto again = mc_dual_oracle(4, 1, 0, 0, 1, 100000, 9);
        CHECK(again.sigma_dot == relu.sigma_dot);
    }

    TEST_CASE("prior from a sparse estimate") {
        ComplexMatrix v = ComplexMatrix::Zero(2, 2);
        v(0, 0) = {2.0, 0.0};
        Mask mask = Mask::Constant(2, 2, false);
        mask(0, 0) = true;
        const auto prior = build_prior(SparseChannelEstimate(v, mask));
        REQUIRE(prior.channels() == kPriorChannels);
        CHECK(prior.scale == 2.0);
        RealMatrix expected_re(2, 2);
        expected_re << 1, 0, 0, 0;
        CHECK(prior.plane(PriorPlane::Real) == expected_re);
        CHECK(prior.plane(PriorPlane::Imag) == RealMatrix::Zero(2, 2));
        CHECK(prior.plane(PriorPlane::Mask) == expected_re);
        RealMatrix rows(2, 2);
        rows << 0, 0, 1, 1;
        CHECK(prior.plane(PriorPlane::RowCoord) == rows);
        CHECK(prior.plane(PriorPlane::ColCoord) == RealMatrix(rows.transpose()));
    }

    TEST_CASE("prior with zero pilots, full mask and a single row") {
        const auto zero = build_prior(SparseChannelEstimate(ComplexMatrix::Zero(3, 4), Mask::Constant(3, 4, true)));
        CHECK(zero.scale == 1.0);
        CHECK(zero.plane(PriorPlane::Real).isZero(0));
        CHECK(zero.plane(PriorPlane::Mask) == RealMatrix::Ones(3, 4));

        ComplexMatrix v(1, 3);
        v << cdouble(0.5, -4.0), cdouble(1.0, 0.0), cdouble(0.0, 2.0);
        const auto row = build_prior(SparseChannelEstimate(v, Mask::Constant(1, 3, true)));
        CHECK(row.scale == 4.0);
        CHECK(row.plane(PriorPlane::Imag)(0, 0) == -1.0);
        CHECK(row.plane(PriorPlane::RowCoord).isZero(0));
        CHECK(row.plane(PriorPlane::ColCoord)(0, 2) == 1.0);

        CHECK(code_of([] {
                  (void)build_prior(SparseChannelEstimate(ComplexMatrix::Zero(2, 2), Mask::Constant(2, 2, false)));
              }) == ErrorCode::EmptyPilot);
    }

    TEST_CASE("position prior extends coordinates into the margin") {
        const auto prior = build_position_prior(12, 14, 2, 30.0);
        REQUIRE(prior.channels() == 3);
        CHECK(prior.rows() == 16);
        CHECK(prior.cols() == 18);
        CHECK(prior.planes[0](2, 5) == 0.0);
        CHECK(prior.planes[0](13, 0) == 1.0);
        CHECK(prior.planes[0](0, 0) == doctest::Approx(-2.0 / 11));
        CHECK(prior.planes[1](0, 15) == 1.0);
        CHECK(prior.planes[1](0, 17) == doctest::Approx(15.0 / 13));
        CHECK(prior.planes[2] == RealMatrix::Constant(16, 18, 30.0));
        CHECK_THROWS_AS((void)build_position_prior(12, 14, -1, 1.0), Error);
    }

    TEST_CASE("patch aggregation of a constant field") {
        const RealMatrix c = RealMatrix::Constant(16, 16, 2.5);
        const auto out = patch_aggregate(c, 4, 4, 3);
        CHECK(out(0, 0) == doctest::Approx(2.5 * 4.0 / 9.0));
        CHECK(out(5, 10) == doctest::Approx(2.5));
        const auto wide = patch_aggregate(RealMatrix::Constant(49, 49, 1.0), 7, 7, 5);
        CHECK(wide(24, 24) == doctest::Approx(1.0));
    }

    TEST_CASE("patch aggregation support of a single pixel pair") {
        const int rows = 5;
        const int cols = 6;
        const int p = rows * cols;
        RealMatrix field = RealMatrix::Zero(p, p);
        const int i0 = 2 * cols + 3;
        const int j0 = 1 * cols + 1;
        field(i0, j0) = 1.0;
        const auto out = patch_aggregate(field, rows, cols, 3);
        for (int i = 0; i < p; ++i) {
            for (int j = 0; j < p; ++j) {
                const int dm = i0 / cols - i / cols;
                const int dn = i0 % cols - i % cols;
                const bool expected = std::abs(dm) <= 1 && std::abs(dn) <= 1 && j / cols + dm == j0 / cols &&
                                      j % cols + dn == j0 % cols;
                CHECK((out(i, j) != 0.0) == expected);
                if (expected) { CHECK(out(i, j) == doctest::Approx(1.0 / 9.0)); }
            }
        }
    }

    TEST_CASE("patch aggregation matches direct enumeration") {
        std::mt19937_64 rng(3);
        for (const auto &[rows, cols, q] : {std::tuple{4, 5, 3}, std::tuple{6, 3, 5}, std::tuple{3, 3, 1}}) {
            const RealMatrix a = random_plane(rows * cols, rows * cols, rng);
            const RealMatrix field = a + a.transpose();
            const auto fast = patch_aggregate(field, rows, cols, q);
            const auto slow = enumerate_patch_trace(field, rows, cols, q);
            CHECK((fast - slow).cwiseAbs().maxCoeff() <= 1e-13 * slow.cwiseAbs().maxCoeff());
        }
        CHECK_THROWS_AS((void)patch_aggregate(RealMatrix::Zero(4, 4), 2, 2, 2), Error);
        CHECK_THROWS_AS((void)patch_aggregate(RealMatrix::Zero(4, 4), 2, 3, 3), Error);
    }

    TEST_CASE("identity activation with a 1x1 filter doubles the input covariance") {
        CntkConfig cfg;
        cfg.depth = 1;
        cfg.filter_size = 1;
        cfg.neg_slope = 1.0;
        cfg.pos_slope = 1.0;
        PriorTensor basis;
        basis.planes.push_back(RealMatrix::Zero(3, 3));
        for (int i = 0; i < 9; ++i) { basis.planes[0](i / 3, i % 3) = i + 1.0; }
        const auto k = compute_cntk(basis, cfg);
        const RealMatrix sigma0 = input_covariance(basis);
        CHECK((k.gram - 2.0 * sigma0).cwiseAbs().maxCoeff() <= 1e-12 * sigma0.cwiseAbs().maxCoeff());

        const auto prior = random_prior(4, 3, 3, 9);
        const auto kr = compute_cntk(prior, cfg);
        const RealMatrix s0 = input_covariance(prior);
        CHECK((kr.gram - 2.0 * s0).cwiseAbs().maxCoeff() <= 1e-12 * s0.cwiseAbs().maxCoeff());
    }

    TEST_CASE("kernel is symmetric and positive semi-definite") {
        for (std::uint64_t seed = 1; seed <= 4; ++seed) {
            const auto prior = random_prior(6, 7, 5, seed);
            CntkConfig cfg;
            cfg.depth = 3 + static_cast<int>(seed);
            const auto raw = compute_cntk_raw(prior, cfg);
            const double peak = raw.gram.cwiseAbs().maxCoeff();
            CHECK((raw.gram - raw.gram.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * peak);
            const auto k = compute_cntk(prior, cfg);
            CHECK(k.gram == k.gram.transpose());
            const Eigen::SelfAdjointEigenSolver<RealMatrix> eig(k.gram);
            CHECK(eig.eigenvalues().minCoeff() >= -1e-8 * k.gram.trace() / k.size());
            CHECK((k.gram.diagonal().array() > 0.0).all());
        }
    }

    TEST_CASE("identity slopes make the kernel quadratic in the prior") {
        CntkConfig cfg;
        cfg.depth = 4;
        cfg.neg_slope = 1.0;
        cfg.pos_slope = 1.0;
        const auto prior = random_prior(5, 6, 3, 21);
        const auto base = compute_cntk(prior, cfg);
        for (double s : {0.5, 3.0, -2.0}) {
            PriorTensor scaled = prior;
            for (auto &p : scaled.planes) { p *= s; }
            const auto k = compute_cntk(scaled, cfg);
            CHECK((k.gram - s * s * base.gram).cwiseAbs().maxCoeff() <= 1e-10 * s * s * base.gram.cwiseAbs().maxCoeff());
        }
    }

    TEST_CASE("constant prior gives a translation-stationary interior") {
        PriorTensor prior;
        prior.planes = {RealMatrix::Constant(15, 15, 1.0), RealMatrix::Constant(15, 15, -0.5)};
        CntkConfig cfg;
        cfg.depth = 2;
        const auto k = compute_cntk(prior, cfg);
        auto at = [&](int m1, int n1, int m2, int n2) { return k.gram(m1 * 15 + n1, m2 * 15 + n2); };
        // The receptive field of a pair spans 2 pixels; pixels 3 or more from every edge are interior.
        for (int dm = -2; dm <= 2; ++dm) {
            for (int dn = -2; dn <= 2; ++dn) {
                const double ref = at(5, 5, 5 + dm, 5 + dn);
                for (int m = 5; m <= 7; ++m) {
                    for (int n = 5; n <= 7; ++n) {
                        CHECK(at(m, n, m + dm, n + dn) == doctest::Approx(ref).epsilon(1e-12));
                    }
                }
            }
        }
        // Mirror-image boundary positions agree.
        CHECK(at(0, 3, 1, 4) == doctest::Approx(at(14, 11, 13, 10)).epsilon(1e-12));
        CHECK(at(0, 0, 0, 0) != doctest::Approx(at(7, 7, 7, 7)));
    }

    TEST_CASE("cropping a padded canvas keeps the inner block") {
        CntkConfig cfg;
        cfg.depth = 2;
        const auto prior = build_position_prior(4, 5, cfg.receptive_radius(), 30.0);
        const auto full = compute_cntk(prior, cfg);
        const auto crop = crop_kernel(full, cfg.receptive_radius());
        CHECK(crop.rows == 4);
        CHECK(crop.cols == 5);
        REQUIRE(crop.size() == 20);
        const int margin = cfg.receptive_radius();
        for (int i = 0; i < 20; ++i) {
            for (int j = 0; j < 20; ++j) {
                const int fi = (i / 5 + margin) * full.cols + i % 5 + margin;
                const int fj = (j / 5 + margin) * full.cols + j % 5 + margin;
                CHECK(crop.gram(i, j) == full.gram(fi, fj));
            }
        }
        CHECK_THROWS_AS((void)crop_kernel(full, 5), Error);
    }

    TEST_CASE("finite-width network agrees with the analytic kernel") {
        const auto prior = random_prior(4, 4, 2, 31);
        CntkConfig cfg;
        cfg.depth = 2;
        const auto analytic = compute_cntk(prior, cfg);
        oracle::EmpiricalNtkSpec spec;
        spec.planes = prior.planes;
        spec.width = 128;
        spec.inits = 6;
        const RealMatrix empirical = oracle::empirical_ntk(spec);
        CHECK(cosine(analytic.gram, empirical) >= 0.9);
    }

    TEST_CASE("configuration validation and fingerprint") {
        CntkConfig cfg;
        CHECK_NOTHROW(cfg.validate());
        CHECK(cfg.fingerprint().size() == 16);
        CHECK(cfg.fingerprint() == CntkConfig{}.fingerprint());
        CntkConfig other = cfg;
        other.neg_slope = 0.1;
        CHECK(other.fingerprint() != cfg.fingerprint());
        CHECK(cfg.receptive_radius() == 8);

        for (auto mutate : {+[](CntkConfig &c) { c.depth = 0; }, +[](CntkConfig &c) { c.filter_size = 4; },
                            +[](CntkConfig &c) { c.neg_slope = 2.0; }, +[](CntkConfig &c) { c.pos_slope = 0.0; },
                            +[](CntkConfig &c) { c.corr_eps = 0.0; }}) {
            CntkConfig bad;
            mutate(bad);
            CHECK_THROWS_AS(bad.validate(), Error);
        }
    }

    TEST_CASE("invalid priors are rejected") {
        CHECK_THROWS_AS((void)compute_cntk(PriorTensor{}, CntkConfig{}), Error);
        PriorTensor mismatched;
        mismatched.planes = {RealMatrix::Ones(2, 2), RealMatrix::Ones(2, 3)};
        CHECK_THROWS_AS((void)compute_cntk(mismatched, CntkConfig{}), Error);
        PriorTensor nan;
        nan.planes = {RealMatrix::Constant(2, 2, std::nan(""))};
        CHECK_THROWS_AS((void)compute_cntk(nan, CntkConfig{}), Error);
    }
}
