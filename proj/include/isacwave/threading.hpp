// SPDX-License-Identifier: Apache-2.0
//
// threading.hpp - a minimal fan-out helper. Jobs write into their own
// slots; callers reduce the slots afterwards in a fixed order, which keeps
// results bit-identical for any thread count.

#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace isacwave {

inline void parallel_for(std::size_t count, int threads,
                         const std::function<void(std::size_t)>& body) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(threads), count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) {
                body(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

} // namespace isacwave
