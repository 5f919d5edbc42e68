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

#include "chcntk/mc_dual_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace chcntk {

McDualEstimate mc_dual_oracle(double l11, double l22, double l12, double a, double b, long samples,
                              std::uint64_t seed) {
    if (samples < 10000) { throw std::invalid_argument("mc_dual_oracle needs at least 10^4 samples"); }
    if (l11 < 0.0 || l22 < 0.0 || std::abs(l12) > std::sqrt(l11 * l22) + 1e-8) {
        throw std::invalid_argument("mc_dual_oracle: invalid covariance");
    }
    const double s1 = std::sqrt(l11);
    const double s2 = std::sqrt(l22);
    const double rho = s1 * s2 > 0.0 ? std::clamp(l12 / (s1 * s2), -1.0, 1.0) : 0.0;
    const double ortho = std::sqrt(std::max(0.0, 1.0 - rho * rho));

    auto act = [a, b](double x) { return x > 0.0 ? b * x : a * x; };
    auto dact = [a, b](double x) { return x > 0.0 ? b : a; };

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    // Welford accumulators.
    double mean_s = 0.0, m2_s = 0.0, mean_d = 0.0, m2_d = 0.0;
    for (long k = 1; k <= samples; ++k) {
        const double z1 = normal(rng);
        const double z2 = normal(rng);
        const double u = s1 * z1;
        const double v = s2 * (rho * z1 + ortho * z2);
        const double ps = act(u) * act(v);
        const double pd = dact(u) * dact(v);
        const double ds = ps - mean_s;
        mean_s += ds / static_cast<double>(k);
        m2_s += ds * (ps - mean_s);
        const double dd = pd - mean_d;
        mean_d += dd / static_cast<double>(k);
        m2_d += dd * (pd - mean_d);
    }
    const double n = static_cast<double>(samples);
    return {mean_s, mean_d, std::sqrt(m2_s / (n - 1.0) / n), std::sqrt(m2_d / (n - 1.0) / n)};
}

}  // namespace chcntk
