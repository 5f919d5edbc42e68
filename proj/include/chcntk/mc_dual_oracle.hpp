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

namespace chcntk {

/// Sample means of act(u)act(v) and act'(u)act'(v) with their standard errors.
struct McDualEstimate {
    double sigma = 0.0;
    double sigma_dot = 0.0;
    double sigma_se = 0.0;
    double sigma_dot_se = 0.0;
};

/// Monte-Carlo estimate of the leaky-ReLU dual activations over bivariate
/// normal draws. Independent of the closed form; used as its reference.
/// Requires samples >= 10^4 and a valid covariance.
McDualEstimate mc_dual_oracle(double l11, double l22, double l12, double a, double b, long samples,
                              std::uint64_t seed);

}  // namespace chcntk
