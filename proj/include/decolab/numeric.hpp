#pragma once

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace decolab {

using complexd = std::complex<double>;

// sinc(x) is defined here as sin(x)/x, value 1 at x = 0.
// Series branch below |x| = 1e-4 avoids the 0/0 evaluation; three terms keep
// the truncation error near 1e-28 at the crossover.
inline double sinc(double x) {
  double ax = std::fabs(x);
  if (ax < 1e-4) {
    double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

// Neumaier compensated summation: the accumulation order fixes the result to
// well below 1e-12 regardless of how work was partitioned beforehand.
struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

struct ComplexKahan {
  KahanSum re, im;
  void add(complexd z) {
    re.add(z.real());
    im.add(z.imag());
  }
  complexd value() const { return {re.value(), im.value()}; }
};

// Deterministic 64-bit generator for seeded sampling; avoids the
// implementation-defined std:: distributions so byte-identical output holds
// across platforms.
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // Uniform in [0,1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

// Wynn epsilon extrapolation of a sequence of partial sums. Even table
// columns implement iterated Shanks transforms, which remove both geometric
// (oscillatory-cycle) and rational (inverse-power) convergence tails.
class WynnEpsilon {
 public:
  void push(complexd partial_sum) {
    std::vector<complexd> next(diag_.size() + 1);
    next[0] = partial_sum;
    for (std::size_t k = 1; k < next.size(); ++k) {
      complexd denom = next[k - 1] - diag_[k - 1];
      if (std::abs(denom) < 1e-300) {
        // Exact repetition: the sequence already converged at depth k-1.
        next.resize(k);
        break;
      }
      complexd prev = (k >= 2) ? diag_[k - 2] : complexd(0.0, 0.0);
      next[k] = prev + 1.0 / denom;
    }
    diag_ = std::move(next);
    prev_best_ = best_;
    best_ = best_even();
    have_prev_ = have_best_;
    have_best_ = true;
  }
  complexd estimate() const { return best_; }
  // Distance between the last two extrapolations: the working error measure.
  double spread() const {
    if (!have_prev_) return std::abs(best_);
    return std::abs(best_ - prev_best_);
  }
  int depth() const { return static_cast<int>(diag_.size()); }

 private:
  complexd best_even() const {
    std::size_t k = diag_.size() - 1;
    if (k % 2 == 1) --k;  // odd columns are auxiliary reciprocals
    return diag_[k];
  }
  std::vector<complexd> diag_;
  complexd best_{0.0, 0.0}, prev_best_{0.0, 0.0};
  bool have_best_ = false, have_prev_ = false;
};

// Worker budget: DECOLAB_THREADS caps the pool, default hardware concurrency.
inline unsigned thread_budget() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("DECOLAB_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && v < static_cast<long>(hw)) return static_cast<unsigned>(v);
    if (v >= static_cast<long>(hw)) return hw;
  }
  return hw;
}

// Index-parallel loop. Each index writes only its own slot, so the result is
// identical to the serial order; reductions happen afterwards, serially.
// The first exception thrown by any index is rethrown on the calling thread.
template <class F>
void parallel_for(std::size_t n, F&& body) {
  unsigned workers = thread_budget();
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  if (static_cast<std::size_t>(workers) > n) workers = static_cast<unsigned>(n);
  std::atomic<std::size_t> cursor{0};
  std::size_t chunk = n / (static_cast<std::size_t>(workers) * 8);
  if (chunk == 0) chunk = 1;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      try {
        for (;;) {
          std::size_t begin = cursor.fetch_add(chunk);
          if (begin >= n) return;
          std::size_t end = begin + chunk < n ? begin + chunk : n;
          for (std::size_t i = begin; i < end; ++i) body(i);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace decolab
