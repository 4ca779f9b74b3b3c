#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sqa/error.hpp"

namespace sqa {

// Runs task(0..count-1) on up to `workers` threads. Results land in their
// own slot, so output order never depends on scheduling. The first exception
// thrown by any task is rethrown after all workers stop.
template <class Result, class Task>
std::vector<Result> parallel_map(std::size_t count, std::size_t workers, Task&& task) {
  std::vector<Result> out(count);
  workers = std::max<std::size_t>(1, std::min(workers, count));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= count) return;
      try {
        out[j] = task(j);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
      }
    }
  };
  if (workers == 1) {
    body();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
  }
  if (error) std::rethrow_exception(error);
  return out;
}

// Per-point results of a sweep; a failed point keeps its error message and
// leaves its result empty.
template <class Result>
struct SweepOutcome {
  std::vector<std::optional<Result>> results;
  std::vector<std::string> errors;

  bool complete() const {
    return std::all_of(errors.begin(), errors.end(), [](const std::string& e) { return e.empty(); });
  }
};

// Evaluates task(point) for every point on up to `workers` threads. Failures
// do not stop the other points.
template <class Result, class Point, class Task>
SweepOutcome<Result> sweep_execute(const std::vector<Point>& points, std::size_t workers, Task&& task) {
  if (points.empty()) throw ValidationError("no parameter points");
  struct Slot {
    std::optional<Result> value;
    std::string error;
  };
  auto slots = parallel_map<Slot>(points.size(), workers, [&](std::size_t j) {
    Slot s;
    try {
      s.value = task(points[j]);
    } catch (const std::exception& e) {
      s.error = e.what();
      if (s.error.empty()) s.error = "unknown failure";
    }
    return s;
  });
  SweepOutcome<Result> out;
  for (auto& s : slots) {
    out.results.push_back(std::move(s.value));
    out.errors.push_back(std::move(s.error));
  }
  return out;
}

}  // namespace sqa
