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

#include "chcntk/error.hpp"

namespace chcntk {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid-argument";
        case ErrorCode::InvalidSpacing: return "invalid-spacing";
        case ErrorCode::DimensionMismatch: return "dimension-mismatch";
        case ErrorCode::ZeroPilotSymbol: return "zero-pilot-symbol";
        case ErrorCode::EmptyPilot: return "empty-pilot";
        case ErrorCode::EmptyBlockPilot: return "empty-block-pilot";
        case ErrorCode::CovarianceValidity: return "covariance-validity";
        case ErrorCode::NonFiniteKernel: return "non-finite-kernel";
        case ErrorCode::SingularKernel: return "singular-kernel";
        case ErrorCode::Divisibility: return "divisibility";
        case ErrorCode::InvalidK: return "invalid-k";
        case ErrorCode::ZeroReference: return "zero-reference";
        case ErrorCode::ConfigParse: return "config-parse";
        case ErrorCode::Io: return "io";
        case ErrorCode::Format: return "format";
        case ErrorCode::UnknownMethod: return "unknown-method";
        case ErrorCode::IndexOutOfRange: return "index-out-of-range";
    }
    return "unknown";
}

Error::Error(ErrorCode code, const std::string &what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace chcntk
