#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace cygan {

inline unsigned default_thread_count() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1u : n;
}

// Runs fn(i) for i in [0, n) on up to `threads` workers using contiguous
// static chunks. Callers write results into slot i only, so output does not
// depend on scheduling. The first exception thrown by any worker is rethrown.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (n == 0) return;
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  CompensatedSum& operator+=(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      carry_ += (sum_ - t) + v;
    else
      carry_ += (v - t) + sum_;
    sum_ = t;
    return *this;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

inline double compensated_sum(std::span<const double> values) {
  CompensatedSum s;
  for (double v : values) s += v;
  return s.value();
}

inline double compensated_mean(std::span<const double> values) {
  return values.empty() ? 0.0 : compensated_sum(values) / static_cast<double>(values.size());
}

}  // namespace cygan
