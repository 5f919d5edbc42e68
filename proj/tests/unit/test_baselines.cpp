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

#include <random>

#include "chcntk/baselines.hpp"
#include "chcntk/error.hpp"
#include "reference.hpp"

using namespace chcntk;

namespace {

SparseChannelEstimate random_sparse(int rows, int cols, double density, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u;
    std::normal_distribution<double> nd;
    Mask mask(rows, cols);
    ComplexMatrix v = ComplexMatrix::Zero(rows, cols);
    for (int m = 0; m < rows; ++m) {
        for (int n = 0; n < cols; ++n) {
            mask(m, n) = u(rng) < density;
            if (mask(m, n)) { v(m, n) = {nd(rng), nd(rng)}; }
        }
    }
    mask(0, 0) = true;
    mask(rows - 1, cols - 1) = true;
    v(0, 0) = {1.0, 0.0};
    v(rows - 1, cols - 1) = {0.0, -1.0};
    return {v, mask};
}

SparseChannelEstimate two_pilots(int rows, int cols, int m1, int n1, cdouble v1, int m2, int n2, cdouble v2) {
    Mask mask = Mask::Constant(rows, cols, false);
    ComplexMatrix v = ComplexMatrix::Zero(rows, cols);
    mask(m1, n1) = mask(m2, n2) = true;
    v(m1, n1) = v1;
    v(m2, n2) = v2;
    return {v, mask};
}

SparseChannelEstimate shifted(const SparseChannelEstimate &s, cdouble c) {
    ComplexMatrix v = s.values();
    for (int m = 0; m < s.rows(); ++m) {
        for (int n = 0; n < s.cols(); ++n) {
            if (s.mask()(m, n)) { v(m, n) += c; }
        }
    }
    return {v, s.mask()};
}

}  // namespace

TEST_SUITE("baselines") {
    TEST_CASE("nearest breaks ties by row-major pilot index") {
        const auto s = two_pilots(1, 3, 0, 0, {1, 0}, 0, 2, {2, 0});
        const auto out = nearest_interpolate(s);
        CHECK(out(0, 1) == cdouble(1, 0));
        CHECK(out(0, 2) == cdouble(2, 0));

        const auto diag = two_pilots(2, 2, 0, 1, {5, 0}, 1, 0, {7, 0});
        const auto d = nearest_interpolate(diag);
        CHECK(d(0, 0) == cdouble(5, 0));
        CHECK(d(1, 1) == cdouble(5, 0));
    }

    TEST_CASE("nearest uses squared index distance") {
        // Cell (0, 3): pilot (2, 3) at distance 4 beats (0, 0) at distance 9.
        const auto s = two_pilots(3, 4, 0, 0, {1, 0}, 2, 3, {2, 0});
        CHECK(nearest_interpolate(s)(0, 3) == cdouble(2, 0));
    }

    TEST_CASE("one neighbour is the nearest pilot") {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const auto s = random_sparse(12, 14, 0.1, seed);
            CHECK(knn_interpolate(s, 1) == nearest_interpolate(s));
        }
    }

    TEST_CASE("knn matches brute-force ranking") {
        for (std::uint64_t seed = 1; seed <= 4; ++seed) {
            const auto s = random_sparse(12, 14, 0.15, seed + 10);
            for (int k : {1, 2, 4, 7}) {
                const auto fast = knn_interpolate(s, k);
                const auto slow = oracle::brute_knn(s, k);
                CHECK((fast - slow).cwiseAbs().maxCoeff() <= 1e-12);
            }
        }
    }

    TEST_CASE("equidistant neighbours average evenly") {
        Mask mask = Mask::Constant(3, 3, false);
        ComplexMatrix v = ComplexMatrix::Zero(3, 3);
        const cdouble vals[] = {{1, 0}, {0, 2}, {-3, 0}, {0, -1}};
        const int cells[][2] = {{0, 1}, {1, 0}, {1, 2}, {2, 1}};
        for (int t = 0; t < 4; ++t) {
            mask(cells[t][0], cells[t][1]) = true;
            v(cells[t][0], cells[t][1]) = vals[t];
        }
        const auto out = knn_interpolate({v, mask}, 4);
        CHECK(std::abs(out(1, 1) - (vals[0] + vals[1] + vals[2] + vals[3]) / 4.0) < 1e-15);
        CHECK(out(0, 1) == vals[0]);
    }

    TEST_CASE("knn keeps pilot values") {
        const auto s = random_sparse(12, 14, 0.2, 3);
        const auto out = knn_interpolate(s, 4);
        for (int m = 0; m < 12; ++m) {
            for (int n = 0; n < 14; ++n) {
                if (s.mask()(m, n)) { CHECK(out(m, n) == s.values()(m, n)); }
            }
        }
    }

    TEST_CASE("invalid neighbour counts") {
        const auto s = random_sparse(4, 4, 0.0, 1);
        REQUIRE(s.pilot_count() == 2);
        for (int k : {0, -1, 3}) {
            try {
                (void)knn_interpolate(s, k);
                FAIL("invalid k accepted");
            } catch (const Error &e) { CHECK(e.code() == ErrorCode::InvalidK); }
        }
        CHECK_NOTHROW((void)knn_interpolate(s, 2));
    }

    TEST_CASE("linear interpolation midpoint") {
        const auto s = two_pilots(3, 1, 0, 0, {0, 0}, 2, 0, {1, 0});
        const auto out = linear_interpolate(s);
        CHECK(std::abs(out(1, 0) - cdouble(0.5, 0)) < 1e-15);
        const auto t = two_pilots(1, 5, 0, 0, {0, 2}, 0, 4, {4, 2});
        CHECK(std::abs(linear_interpolate(t)(0, 1) - cdouble(1, 2)) < 1e-15);
    }

    TEST_CASE("linear interpolation reproduces bilinear surfaces inside the pilot span") {
        const int rows = 13;
        const int cols = 13;
        const auto pattern = make_pilot_pattern(rows, cols, 4, 3);
        ComplexMatrix h(rows, cols);
        for (int m = 0; m < rows; ++m) {
            for (int n = 0; n < cols; ++n) {
                h(m, n) = cdouble(0.3, -1.0) + cdouble(0.1, 0.02) * double(m) + cdouble(-0.05, 0.2) * double(n) +
                          cdouble(0.01, 0.0) * double(m * n);
            }
        }
        const auto out = linear_interpolate(SparseChannelEstimate::from_dense(h, pattern.mask));
        CHECK((out - h).cwiseAbs().maxCoeff() < 1e-12);
    }

    TEST_CASE("linear interpolation holds the boundary value outside the span") {
        ComplexMatrix h(6, 3);
        for (int m = 0; m < 6; ++m) {
            for (int n = 0; n < 3; ++n) { h(m, n) = double(m); }
        }
        Mask mask = Mask::Constant(6, 3, false);
        mask(1, 1) = mask(3, 1) = true;
        const auto out = linear_interpolate(SparseChannelEstimate::from_dense(h, mask));
        CHECK(out(0, 0) == cdouble(1, 0));
        CHECK(out(2, 2) == cdouble(2, 0));
        CHECK(out(5, 0) == cdouble(3, 0));
    }

    TEST_CASE("constants are reproduced by every method") {
        const auto base = random_sparse(12, 14, 0.1, 21);
        const cdouble c(0.25, 4.0);
        ComplexMatrix v = ComplexMatrix::Zero(12, 14);
        for (int m = 0; m < 12; ++m) {
            for (int n = 0; n < 14; ++n) {
                if (base.mask()(m, n)) { v(m, n) = c; }
            }
        }
        const SparseChannelEstimate s(v, base.mask());
        const ComplexMatrix expected = ComplexMatrix::Constant(12, 14, c);
        CHECK((nearest_interpolate(s) - expected).cwiseAbs().maxCoeff() < 1e-14);
        CHECK((knn_interpolate(s, 4) - expected).cwiseAbs().maxCoeff() < 1e-14);
        CHECK((linear_interpolate(s) - expected).cwiseAbs().maxCoeff() < 1e-14);
    }

    TEST_CASE("adding a constant to the pilots shifts every estimate") {
        const auto s = random_sparse(12, 14, 0.12, 33);
        const cdouble c(-1.5, 0.75);
        const auto t = shifted(s, c);
        const ComplexMatrix offset = ComplexMatrix::Constant(12, 14, c);
        CHECK((nearest_interpolate(t) - nearest_interpolate(s) - offset).cwiseAbs().maxCoeff() < 1e-13);
        CHECK((knn_interpolate(t, 4) - knn_interpolate(s, 4) - offset).cwiseAbs().maxCoeff() < 1e-13);
        CHECK((linear_interpolate(t) - linear_interpolate(s) - offset).cwiseAbs().maxCoeff() < 1e-13);
    }

    TEST_CASE("no pilots") {
        const SparseChannelEstimate empty(ComplexMatrix::Zero(2, 2), Mask::Constant(2, 2, false));
        CHECK_THROWS_AS((void)nearest_interpolate(empty), Error);
        CHECK_THROWS_AS((void)knn_interpolate(empty, 1), Error);
        CHECK_THROWS_AS((void)linear_interpolate(empty), Error);
    }
}
