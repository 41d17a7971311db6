// SPDX-License-Identifier: Apache-2.0
//
// Deterministic replication: values are produced per replica index (in
// parallel if requested) and reduced by pairwise summation, so results do
// not depend on thread count or scheduling.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace cpspace {

inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 16) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc;
  }
  const std::size_t h = xs.size() / 2;
  return pairwise_sum(xs.first(h)) + pairwise_sum(xs.subspan(h));
}

struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
  double variance = 0.0;
};

/// Sample mean and standard error, both from pairwise sums.
inline MeanEstimate estimate_mean(std::span<const double> xs) {
  MeanEstimate e;
  e.n = xs.size();
  if (e.n == 0) return e;
  e.mean = pairwise_sum(xs) / static_cast<double>(e.n);
  if (e.n > 1) {
    std::vector<double> sq(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - e.mean) * (xs[i] - e.mean);
    e.variance = pairwise_sum(sq) / static_cast<double>(e.n - 1);
    e.se = std::sqrt(e.variance / static_cast<double>(e.n));
  }
  return e;
}

class NonFiniteError : public std::runtime_error {
 public:
  NonFiniteError(std::size_t replica, std::uint64_t seed, std::uint64_t stream)
      : std::runtime_error("non-finite functional value at replica " + std::to_string(replica) + " (seed " +
                           std::to_string(seed) + ", stream " + std::to_string(stream) + ")"),
        replica_(replica) {}
  std::size_t replica() const { return replica_; }

 private:
  std::size_t replica_;
};

/// Number of worker threads used by replicate(); 0 = hardware concurrency.
inline std::size_t& replication_threads() {
  static std::size_t n = 0;
  return n;
}

/// out[i] = f(i) for i < n, computed on up to replication_threads() workers.
/// f must only write state owned by index i.
inline void parallel_indexed(std::size_t n, const std::function<void(std::size_t)>& f) {
  std::size_t threads = replication_threads();
  if (threads == 0) threads = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(1, n / 256));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex m;
  auto worker = [&] {
    for (;;) {
      const std::size_t begin = next.fetch_add(256);
      if (begin >= n) return;
      const std::size_t end = std::min(n, begin + 256);
      try {
        for (std::size_t i = begin; i < end; ++i) f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(m);
        if (!error) error = std::current_exception();
        next = n;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Evaluates a k-valued functional on n replicas; column c of the result
/// holds the c-th value of every replica.
inline std::vector<std::vector<double>> replicate(std::size_t n, std::size_t width,
                                                  const std::function<void(std::size_t, std::span<double>)>& f) {
  std::vector<double> flat(n * width);
  parallel_indexed(n, [&](std::size_t i) { f(i, std::span<double>(flat.data() + i * width, width)); });
  std::vector<std::vector<double>> cols(width, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < width; ++c) cols[c][i] = flat[i * width + c];
  }
  return cols;
}

}  // namespace cpspace
