#pragma once

#include <cstddef>
#include <functional>
#include <optional>

namespace junction {

/// Environment variable consulted for the worker count when no explicit
/// value is given.
inline constexpr const char* kThreadsEnv = "JUNCTION_HJ_THREADS";

/// Explicit request wins, then the environment variable, then 1.
std::size_t resolve_threads(std::optional<std::size_t> requested);

/// Splits [0, n) into contiguous blocks, one per worker, and waits for all of
/// them. Blocks depend only on (n, threads), so results written to disjoint
/// outputs are independent of scheduling.
void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t begin, std::size_t end)>& body);

}  // namespace junction
