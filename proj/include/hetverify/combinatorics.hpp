#pragma once

#include <cmath>
#include <cstdint>

#include "hetverify/errors.hpp"

namespace hetverify {

// Factorials and binomial coefficients. Results that fit are exact in 64-bit
// integer arithmetic; larger values fall back to log-gamma in double
// precision, which is what the planner formulas need (e.g. binom(N'+M, Q)
// with N' in the billions).

double log_factorial(int n);

// n! as a double (exact for n <= 20, lgamma beyond).
double factorial(int n);

double log_binomial(int n, int k);

double binomial(int n, int k);

// sqrt(binom(n, k)), evaluated in log space to avoid overflow.
double sqrt_binomial(int n, int k);

// log binom(n, k) for real-valued (large) arguments, via lgamma.
double log_binomial_big(double n, double k);

namespace detail {
inline void check_nonnegative(int n, const char* who) {
  if (n < 0) throw ParameterError(std::string(who) + ": negative argument");
}
}  // namespace detail

}  // namespace hetverify
