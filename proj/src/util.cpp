#include <algorithm>
#include <array>
#include <cstdlib>
#include <limits>
#include <mutex>

#include "hetverify/combinatorics.hpp"
#include "hetverify/parallel.hpp"

namespace hetverify {

namespace {

// Exact factorials up to 20! (the largest fitting in 64 bits).
constexpr std::array<uint64_t, 21> kFactorials = {
    1ULL,
    1ULL,
    2ULL,
    6ULL,
    24ULL,
    120ULL,
    720ULL,
    5040ULL,
    40320ULL,
    362880ULL,
    3628800ULL,
    39916800ULL,
    479001600ULL,
    6227020800ULL,
    87178291200ULL,
    1307674368000ULL,
    20922789888000ULL,
    355687428096000ULL,
    6402373705728000ULL,
    121645100408832000ULL,
    2432902008176640000ULL,
};

constexpr int kLogTableSize = 256;

const double* log_factorial_table() {
  static double table[kLogTableSize];
  static std::once_flag once;
  std::call_once(once, [] {
    table[0] = 0.0;
    for (int i = 1; i < kLogTableSize; ++i)
      table[i] = table[i - 1] + std::log(static_cast<double>(i));
  });
  return table;
}

}  // namespace

double log_factorial(int n) {
  detail::check_nonnegative(n, "log_factorial");
  if (n < kLogTableSize) return log_factorial_table()[n];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double factorial(int n) {
  detail::check_nonnegative(n, "factorial");
  if (n <= 20) return static_cast<double>(kFactorials[n]);
  return std::exp(log_factorial(n));
}

double log_binomial(int n, int k) {
  detail::check_nonnegative(n, "log_binomial");
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double binomial(int n, int k) {
  detail::check_nonnegative(n, "binomial");
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  // Multiplicative form is exact while it fits in 64 bits.
  if (n <= 62) {
    uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return static_cast<double>(r);
  }
  return std::exp(log_binomial(n, k));
}

double sqrt_binomial(int n, int k) {
  detail::check_nonnegative(n, "sqrt_binomial");
  if (k < 0 || k > n) return 0.0;
  return std::exp(0.5 * log_binomial(n, k));
}

double log_binomial_big(double n, double k) {
  if (!(n >= 0.0) || !(k >= 0.0) || k > n)
    throw ParameterError("log_binomial_big: need 0 <= k <= n");
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

int worker_count() {
  if (const char* env = std::getenv("HETVERIFY_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_blocks(int64_t n, int64_t block_size,
                     const std::function<void(int64_t, int64_t, int64_t)>& fn) {
  if (n <= 0) return;
  const int64_t num_blocks = (n + block_size - 1) / block_size;
  const int workers =
      static_cast<int>(std::min<int64_t>(worker_count(), num_blocks));
  if (workers <= 1) {
    for (int64_t b = 0; b < num_blocks; ++b)
      fn(b, b * block_size, std::min(n, (b + 1) * block_size));
    return;
  }
  std::atomic<int64_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int64_t b = next.fetch_add(1, std::memory_order_relaxed);
        if (b >= num_blocks) return;
        try {
          fn(b, b * block_size, std::min(n, (b + 1) * block_size));
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace hetverify
