#pragma once

// Deterministic index-sharded parallel map: each worker owns a fixed stripe
// and writes results by index, so the output never depends on the job count.

#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace padiclab {

inline constexpr const char* kVersion = "0.1.0";

inline void parallel_for(size_t count, int jobs, const std::function<void(size_t)>& body) {
    if (jobs <= 1 || count < 2) {
        for (size_t i = 0; i < count; ++i) body(i);
        return;
    }
    size_t workers = std::min<size_t>(static_cast<size_t>(jobs), count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (size_t i = w; i < count; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace padiclab
