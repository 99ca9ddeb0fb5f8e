#pragma once

// Parallel per-cell evaluation over a grid. Each cell is written by exactly one
// worker into its own slot, so the result does not depend on scheduling.

#include <atomic>
#include <cstdlib>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "koopman_sp/field.hpp"

namespace koopman_sp {

/// Worker count from KOOPMAN_SP_WORKERS, else the hardware concurrency.
inline unsigned default_workers() {
  if (const char* env = std::getenv("KOOPMAN_SP_WORKERS")) {
    try {
      const long n = std::stol(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

template <class T>
struct SweepResult {
  Field<T> field;
  std::size_t failures = 0;
};

/// Evaluate `cell_fn(State) -> std::optional<T>` at every node. An empty optional
/// or an exception from a cell becomes the sentinel.
template <class T, class CellFn>
SweepResult<T> sweep(const GridSpec& grid, CellFn&& cell_fn, unsigned workers = 0, FieldMeta meta = {}) {
  grid.validate();
  SweepResult<T> out{Field<T>(grid, std::move(meta)), 0};
  const std::size_t n = grid.size();
  std::vector<unsigned char> failed(n, 0);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    constexpr std::size_t chunk = 16;
    while (true) {
      const std::size_t begin = next.fetch_add(chunk);
      if (begin >= n) return;
      const std::size_t end = std::min(n, begin + chunk);
      for (std::size_t k = begin; k < end; ++k) {
        std::optional<T> v;
        try {
          v = cell_fn(grid.node(k));
        } catch (const std::exception&) {
          v.reset();
        }
        if (v && !Sentinel<T>::is(*v)) {
          out.field.values[k] = *v;
        } else {
          failed[k] = 1;
        }
      }
    }
  };

  if (workers == 0) workers = default_workers();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, n)));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (unsigned char f : failed) out.failures += f;
  return out;
}

}  // namespace koopman_sp
