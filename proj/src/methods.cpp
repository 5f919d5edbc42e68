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

#include "chcntk/methods.hpp"

#include "chcntk/error.hpp"

namespace chcntk {

std::string_view method_tag(Method m) {
    switch (m) {
        case Method::Cntk: return "cntk";
        case Method::Nearest: return "nearest";
        case Method::Knn: return "knn";
        case Method::Linear: return "linear";
    }
    return "unknown";
}

const std::vector<Method> &all_methods() {
    static const std::vector<Method> methods{Method::Cntk, Method::Nearest, Method::Knn, Method::Linear};
    return methods;
}

Method parse_method(std::string_view tag) {
    for (auto m : all_methods()) {
        if (method_tag(m) == tag) { return m; }
    }
    throw Error(ErrorCode::UnknownMethod,
                "unknown method '" + std::string(tag) + "'; valid methods are {cntk, nearest, knn, linear}");
}

ComplexMatrix run_method(Method method, const SparseChannelEstimate &sparse, const MethodOptions &options) {
    switch (method) {
        case Method::Cntk: return estimate_channel_cntk(sparse, options.cntk).h_hat;
        case Method::Nearest: return nearest_interpolate(sparse);
        case Method::Knn: return knn_interpolate(sparse, options.knn_k);
        case Method::Linear: return linear_interpolate(sparse);
    }
    throw Error(ErrorCode::UnknownMethod, "unhandled method");
}

}  // namespace chcntk
