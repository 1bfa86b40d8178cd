#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "hetverify/types.hpp"

namespace hetverify {

// Closed-form heterodyne estimator functions and their analytical constants.
//
// All functions here are pure; NaN/Inf results are converted to NumericError.
// They may be called concurrently without synchronization.

// Laguerre 2D polynomial
//   L_{k,l}(z) = sum_{t=0}^{min(k,l)} sqrt(k!) sqrt(l!) (-1)^t
//                / (t! (k-t)! (l-t)!) * z^{l-t} conj(z)^{k-t}.
// Satisfies L_{k,l}(z) = conj(L_{l,k}(z)).
Complex laguerre2d(int k, int l, Complex z, int guard = kDefaultIndexGuard);

// f_{k,l}(z, eta) = eta^{-(1+(k+l)/2)} exp((1-1/eta)|z|^2) L_{l,k}(z/sqrt(eta))
Complex f_kl(int k, int l, Complex z, double eta, int guard = kDefaultIndexGuard);

// Generalised estimator function of order p:
//   g_{k,l}^{(p)}(z, eta) = sum_{j=0}^{p-1} (-1)^j eta^j f_{k+j,l+j}(z, eta)
//                           * sqrt(binom(k+j,k) binom(l+j,l)).
// Reduces to f_{k,l} for p = 1.
Complex g_kl(const EstimatorConfig& cfg, int k, int l, Complex z,
             int guard = kDefaultIndexGuard);

// Core-state estimator g_C(z) = sum_{k,l} conj(c_k) c_l g_{k,l}(z). The sum is
// Hermitian so the imaginary part vanishes analytically; the real part is
// returned after asserting |imag| < 1e-10 (1 + |real|).
double g_core(const CoreState& state, const EstimatorConfig& cfg, Complex z);

// Upper bound on |E[g_{k,l}] - rho_{kl}| over density operators. Uses the
// closed form eta^p sqrt(binom(k+p,k) binom(l+p,l)) in the small-eta regime
// and otherwise searches the first q0 >= p at which the summand sequence
// turns decreasing, returning eta^q0 binom(q0-1,p-1) sqrt(binom(k+q0,k)
// binom(l+q0,l)).
double bias_bound(int k, int l, const EstimatorConfig& cfg);

// Analytic sup-norm bound on |g_{k,l}^{(p)}|:
//   eta^{-(1+(k+l)/2)} binom(max(k,l)+p, p-1)
//     * sqrt(2^{|l-k|} binom(max(k,l), min(k,l))).
double range_bound(int k, int l, const EstimatorConfig& cfg);

// Range constant B of the core estimator at damping eta (the |g_C| bound is
// B / eta^c).
double range_constant(const CoreState& state, int p, double eta);

// Evaluates every analytical constant for a target core state. epsilon is the
// total precision goal and m_copies the number M of certified copies; the
// admissible damping cap and the non-i.i.d. constant are evaluated at the
// per-copy precision epsilon / M.
EstimatorConstants constants_for(const CoreState& state,
                                 const EstimatorConfig& cfg, double epsilon,
                                 int m_copies);

// Precompiled evaluator for g_C: the estimator is a polynomial in
// (w, conj(w)), w = z/sqrt(eta), times a Gaussian factor. Fock-state targets
// reduce to a polynomial in |z|^2 which is evaluated vectorised over blocks.
class GCoreEvaluator {
 public:
  GCoreEvaluator(const CoreState& state, const EstimatorConfig& cfg);

  double operator()(Complex z) const;

  // Accumulates sum of g and of g^2 over n samples (for mean and standard
  // error). Throws NumericError if the block sum is not finite.
  void accumulate(const Complex* z, int64_t n, double& sum,
                  double& sum_sq) const;

  bool radial() const { return radial_; }

 private:
  double eval_general(Complex z) const;

  bool radial_ = false;
  double gauss_rate_ = 0.0;           // 1 - 1/eta
  double inv_sqrt_eta_ = 1.0;
  int degree_ = 0;                    // polynomial degree + 1
  std::vector<double> radial_coeffs_;  // g(x) = exp(rate*x) * poly(x), x=|z|^2
  std::vector<Complex> coeffs_;        // row-major [a][b]: w^a conj(w)^b
};

}  // namespace hetverify
