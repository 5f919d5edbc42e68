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

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace chcntk {

/// Worker count used by parallel_for when the caller passes 0.
/// Honors CHCNTK_THREADS when set; otherwise hardware concurrency.
inline unsigned default_thread_count() {
    if (const char *env = std::getenv("CHCNTK_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) { return static_cast<unsigned>(v); }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, count). Each index is handled by exactly one
/// thread and writes only its own output slot, so results do not depend on
/// the thread count. The first exception thrown (lowest index) is rethrown.
template<typename Body>
void parallel_for(std::size_t count, unsigned threads, Body &&body) {
    if (threads == 0) { threads = default_thread_count(); }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) { body(i); }
        return;
    }

    std::vector<std::exception_ptr> errors(count);
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < count; i += threads) {
                    try {
                        body(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
    }
    for (auto &e : errors) {
        if (e) { std::rethrow_exception(e); }
    }
}

}  // namespace chcntk
