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

#include "chcntk/grid.hpp"

namespace chcntk {

inline constexpr int kDefaultKnnK = 4;
inline constexpr double kKnnDistanceEpsilon = 1e-9;

/// Value of the pilot with the smallest squared index distance
/// dm^2 + dn^2; ties go to the smallest row-major pilot index.
ComplexMatrix nearest_interpolate(const SparseChannelEstimate &sparse);

/// Inverse-distance weighted mean (w = 1 / (d + 1e-9)) of the k nearest
/// pilots, ranked by (distance, row-major index). Pilot cells keep their value.
ComplexMatrix knn_interpolate(const SparseChannelEstimate &sparse, int k = kDefaultKnnK);

/// Separable linear interpolation: along frequency inside each pilot-bearing
/// symbol, then along time for every subcarrier. Cells outside the pilot span
/// take the nearest boundary value.
ComplexMatrix linear_interpolate(const SparseChannelEstimate &sparse);

}  // namespace chcntk
