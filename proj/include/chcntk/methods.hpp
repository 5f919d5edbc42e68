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

#include <string>
#include <string_view>
#include <vector>

#include "chcntk/baselines.hpp"
#include "chcntk/imputer.hpp"

namespace chcntk {

enum class Method { Cntk, Nearest, Knn, Linear };

std::string_view method_tag(Method m);
/// Throws UnknownMethod listing the valid tags.
Method parse_method(std::string_view tag);
const std::vector<Method> &all_methods();

struct MethodOptions {
    ImputeOptions cntk;
    int knn_k = kDefaultKnnK;
};

ComplexMatrix run_method(Method method, const SparseChannelEstimate &sparse, const MethodOptions &options = {});

}  // namespace chcntk
