#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace hetverify {

// Worker count: HETVERIFY_THREADS caps it, 0 or unset means auto.
int worker_count();

// Runs fn(block_index, begin, end) over [0, n) split into fixed-size blocks.
// Blocks are claimed from an atomic counter, so any write pattern that only
// touches a block's own slot is deterministic for every worker count.
void parallel_blocks(int64_t n, int64_t block_size,
                     const std::function<void(int64_t, int64_t, int64_t)>& fn);

}  // namespace hetverify
