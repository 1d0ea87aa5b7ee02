#pragma once

#include <cstddef>

#include <functional>

namespace vs {

// Worker cap: VOCAB_SURGEON_THREADS if set (clamped to >= 1), otherwise
// hardware concurrency.
std::size_t worker_count();

// Splits [0, n) into at most worker_count() contiguous chunks and runs
// fn(chunk_index, begin, end) on each, one thread per chunk. Callers that
// need deterministic results write into a per-chunk slot and reduce in
// chunk order after the call returns.
void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

}  // namespace vs
