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
#include <vector>

#include "chcntk/grid.hpp"

namespace chcntk::oracle {

/// Finite-width network matching the analytic kernel for depth 2:
///   z1 = conv(A) / q,  x1 = act(z1)
///   z2 = conv(x1) / (q sqrt(width)),  x2 = act(z2)
///   f  = sum_o v_o x2_o / sqrt(width)    (one output per pixel)
/// with all weights standard normal and zero padding.
struct EmpiricalNtkSpec {
    std::vector<RealMatrix> planes;
    int width = 512;
    int inits = 20;
    int filter_size = 3;
    double neg_slope = 0.05;
    double pos_slope = 1.0;
    /// Central-difference step on every parameter.
    double step = 1e-4;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

/// Mean over initializations of sum_p df(i)/dp df(j)/dp, with every partial
/// derivative taken by central finite differences. P x P, row-major pixels.
RealMatrix empirical_ntk(const EmpiricalNtkSpec &spec);

}  // namespace chcntk::oracle
