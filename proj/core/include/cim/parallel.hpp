#pragma once

#include <cstddef>
#include <functional>

namespace cim {

/// Fixed chunk width for data-parallel reductions. Chunk boundaries depend
/// only on the input size, never on the worker count, so per-chunk partial
/// results can be merged in chunk order to give bit-identical output for any
/// number of threads.
inline constexpr std::size_t kReduceChunk = 1024;

std::size_t chunk_count(std::size_t n);

/// Resolves a user-facing thread-count request: 0 means hardware concurrency.
int resolve_threads(int threads);

/// Calls fn(chunk_index, begin, end) for every fixed-size chunk of [0, n).
/// Chunks may run concurrently; callers must write results into
/// chunk-indexed (or otherwise disjoint) storage and merge in chunk order
/// when the merge is order-sensitive.
void parallel_chunks(std::size_t n, int threads,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

/// Calls fn(i) for i in [0, n) with one task per index. Intended for coarse
/// independent work items (e.g. surface grid nodes) writing to their own slot.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace cim
