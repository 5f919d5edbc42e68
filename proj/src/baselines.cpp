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

#include "chcntk/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "chcntk/error.hpp"

namespace chcntk {
namespace {

struct Pilot {
    int m;
    int n;
    cdouble value;
};

// Row-major order, which is also the tie-break order.
std::vector<Pilot> collect_pilots(const SparseChannelEstimate &sparse) {
    if (sparse.pilot_count() < 1) { throw Error(ErrorCode::EmptyPilot, "interpolation needs at least one pilot"); }
    std::vector<Pilot> pilots;
    pilots.reserve(static_cast<std::size_t>(sparse.pilot_count()));
    for (int m = 0; m < sparse.rows(); ++m) {
        for (int n = 0; n < sparse.cols(); ++n) {
            if (sparse.mask()(m, n)) { pilots.push_back({m, n, sparse.values()(m, n)}); }
        }
    }
    return pilots;
}

inline long dist2(const Pilot &p, int m, int n) {
    const long dm = p.m - m;
    const long dn = p.n - n;
    return dm * dm + dn * dn;
}

/// 1-D piecewise-linear interpolation with constant extension; `pos` sorted.
cdouble interp1(const std::vector<int> &pos, const std::vector<cdouble> &vals, int x) {
    if (x <= pos.front()) { return vals.front(); }
    if (x >= pos.back()) { return vals.back(); }
    const auto hi = static_cast<std::size_t>(std::upper_bound(pos.begin(), pos.end(), x) - pos.begin());
    const std::size_t lo = hi - 1;
    if (pos[lo] == x) { return vals[lo]; }
    const double t = static_cast<double>(x - pos[lo]) / static_cast<double>(pos[hi] - pos[lo]);
    return vals[lo] + (vals[hi] - vals[lo]) * t;
}

}  // namespace

ComplexMatrix nearest_interpolate(const SparseChannelEstimate &sparse) {
    const auto pilots = collect_pilots(sparse);
    ComplexMatrix out(sparse.rows(), sparse.cols());
    for (int m = 0; m < sparse.rows(); ++m) {
        for (int n = 0; n < sparse.cols(); ++n) {
            const Pilot *best = &pilots.front();
            long best_d = dist2(*best, m, n);
            for (const auto &p : pilots) {
                const long d = dist2(p, m, n);
                if (d < best_d) {
                    best_d = d;
                    best = &p;
                }
            }
            out(m, n) = best->value;
        }
    }
    return out;
}

ComplexMatrix knn_interpolate(const SparseChannelEstimate &sparse, int k) {
    const auto pilots = collect_pilots(sparse);
    if (k < 1 || k > static_cast<int>(pilots.size())) {
        throw Error(ErrorCode::InvalidK, "k must lie in [1, " + std::to_string(pilots.size()) + "], got " +
                                             std::to_string(k));
    }
    // (squared distance, pilot index); the index doubles as the tie-break.
    std::vector<std::pair<long, std::size_t>> ranked(pilots.size());
    ComplexMatrix out(sparse.rows(), sparse.cols());
    for (int m = 0; m < sparse.rows(); ++m) {
        for (int n = 0; n < sparse.cols(); ++n) {
            for (std::size_t i = 0; i < pilots.size(); ++i) { ranked[i] = {dist2(pilots[i], m, n), i}; }
            std::partial_sort(ranked.begin(), ranked.begin() + k, ranked.end());
            if (ranked.front().first == 0) {
                out(m, n) = pilots[ranked.front().second].value;
                continue;
            }
            double total = 0.0;
            std::vector<double> w(static_cast<std::size_t>(k));
            for (int t = 0; t < k; ++t) {
                w[t] = 1.0 / (std::sqrt(static_cast<double>(ranked[t].first)) + kKnnDistanceEpsilon);
                total += w[t];
            }
            cdouble acc{};
            for (int t = 0; t < k; ++t) { acc += pilots[ranked[t].second].value * (w[t] / total); }
            out(m, n) = acc;
        }
    }
    return out;
}

ComplexMatrix linear_interpolate(const SparseChannelEstimate &sparse) {
    collect_pilots(sparse);
    const int rows = sparse.rows();
    const int cols = sparse.cols();

    // Frequency pass inside every pilot-bearing symbol.
    std::vector<int> pilot_cols;
    ComplexMatrix freq(rows, cols);
    for (int n = 0; n < cols; ++n) {
        std::vector<int> pos;
        std::vector<cdouble> vals;
        for (int m = 0; m < rows; ++m) {
            if (sparse.mask()(m, n)) {
                pos.push_back(m);
                vals.push_back(sparse.values()(m, n));
            }
        }
        if (pos.empty()) { continue; }
        pilot_cols.push_back(n);
        for (int m = 0; m < rows; ++m) { freq(m, n) = interp1(pos, vals, m); }
    }

    // Time pass across the pilot-bearing symbols.
    ComplexMatrix out(rows, cols);
    std::vector<cdouble> vals(pilot_cols.size());
    for (int m = 0; m < rows; ++m) {
        for (std::size_t t = 0; t < pilot_cols.size(); ++t) { vals[t] = freq(m, pilot_cols[t]); }
        for (int n = 0; n < cols; ++n) { out(m, n) = interp1(pilot_cols, vals, n); }
    }
    return out;
}

}  // namespace chcntk
