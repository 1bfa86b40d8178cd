#include "hetverify/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>

#include <Eigen/Core>

#include "hetverify/combinatorics.hpp"

namespace hetverify {

namespace {

void check_indices(int k, int l, int guard, const char* who) {
  if (k < 0 || l < 0)
    throw BoundsError(std::string(who) + ": negative Fock index");
  if (k > guard || l > guard)
    throw BoundsError(std::string(who) + ": Fock index " +
                      std::to_string(std::max(k, l)) +
                      " exceeds combinatorics guard " + std::to_string(guard));
}

Complex require_finite(Complex v, const char* who) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw NumericError(std::string(who) + ": non-finite result");
  return v;
}

double require_finite(double v, const char* who) {
  if (!std::isfinite(v))
    throw NumericError(std::string(who) + ": non-finite result");
  return v;
}

}  // namespace

CoreState::CoreState(std::vector<Complex> coefficients)
    : coeffs_(std::move(coefficients)) {
  if (coeffs_.empty())
    throw ValidationError("core state: support size must be >= 1");
  if (static_cast<int>(coeffs_.size()) - 1 > kDefaultIndexGuard)
    throw ValidationError("core state: support exceeds the Fock index guard");
  double norm2 = 0.0;
  for (const auto& c : coeffs_) norm2 += std::norm(c);
  if (std::abs(norm2 - 1.0) > 1e-10)
    throw ValidationError("core state: coefficients are not normalized");
}

CoreState CoreState::fock(int n) {
  if (n < 0 || n > kDefaultIndexGuard)
    throw ParameterError("fock: photon number out of range");
  std::vector<Complex> c(n + 1, Complex(0.0));
  c[n] = 1.0;
  return CoreState(std::move(c));
}

int CoreState::nonzero_count() const {
  int n = 0;
  for (const auto& c : coeffs_)
    if (c != Complex(0.0)) ++n;
  return n;
}

bool CoreState::is_fock(int n) const {
  if (n >= support()) return false;
  for (int i = 0; i < support(); ++i) {
    if (i == n) {
      if (std::abs(coeffs_[i] - Complex(1.0)) > 1e-12) return false;
    } else if (std::abs(coeffs_[i]) > 1e-12) {
      return false;
    }
  }
  return true;
}

Complex laguerre2d(int k, int l, Complex z, int guard) {
  check_indices(k, l, guard, "laguerre2d");
  const Complex zc = std::conj(z);
  // Iterated powers; z^0 = 1 also at z = 0.
  std::vector<Complex> zp(l + 1), zcp(k + 1);
  zp[0] = 1.0;
  for (int i = 1; i <= l; ++i) zp[i] = zp[i - 1] * z;
  zcp[0] = 1.0;
  for (int i = 1; i <= k; ++i) zcp[i] = zcp[i - 1] * zc;

  Complex sum = 0.0;
  const int tmax = std::min(k, l);
  for (int t = 0; t <= tmax; ++t) {
    double log_coef = 0.5 * (log_factorial(k) + log_factorial(l)) -
                      log_factorial(t) - log_factorial(k - t) -
                      log_factorial(l - t);
    double coef = std::exp(log_coef);
    if (t & 1) coef = -coef;
    sum += coef * zp[l - t] * zcp[k - t];
  }
  return require_finite(sum, "laguerre2d");
}

Complex f_kl(int k, int l, Complex z, double eta, int guard) {
  if (!(eta > 0.0) || !(eta < 1.0))
    throw ParameterError("f_kl: eta must lie in (0, 1)");
  check_indices(k, l, guard, "f_kl");
  const double x = std::norm(z);
  const double pref =
      std::exp((1.0 - 1.0 / eta) * x - (1.0 + 0.5 * (k + l)) * std::log(eta));
  const Complex lag = laguerre2d(l, k, z / std::sqrt(eta), guard);
  return require_finite(pref * lag, "f_kl");
}

Complex g_kl(const EstimatorConfig& cfg, int k, int l, Complex z, int guard) {
  cfg.validate();
  // The sum touches indices up to k+p-1, l+p-1.
  check_indices(k + cfg.p - 1, l + cfg.p - 1, guard, "g_kl");
  Complex sum = 0.0;
  double sign_eta = 1.0;
  for (int j = 0; j < cfg.p; ++j) {
    const double w = sqrt_binomial(k + j, k) * sqrt_binomial(l + j, l);
    sum += sign_eta * w * f_kl(k + j, l + j, z, cfg.eta, guard);
    sign_eta *= -cfg.eta;
  }
  return require_finite(sum, "g_kl");
}

double g_core(const CoreState& state, const EstimatorConfig& cfg, Complex z) {
  cfg.validate();
  const auto& c = state.coefficients();
  const int n = state.support();
  Complex acc = 0.0;
  for (int k = 0; k < n; ++k) {
    if (c[k] == Complex(0.0)) continue;
    acc += std::norm(c[k]) * g_kl(cfg, k, k, z);
    for (int l = k + 1; l < n; ++l) {
      if (c[l] == Complex(0.0)) continue;
      const Complex t = std::conj(c[k]) * c[l] * g_kl(cfg, k, l, z);
      acc += t + std::conj(t);
    }
  }
  const double re = acc.real();
  if (!(std::abs(acc.imag()) < 1e-10 * (1.0 + std::abs(re))))
    throw NumericError("g_core: non-vanishing imaginary part");
  return require_finite(re, "g_core");
}

double bias_bound(int k, int l, const EstimatorConfig& cfg) {
  cfg.validate();
  check_indices(k, l, kDefaultIndexGuard, "bias_bound");
  const int p = cfg.p;
  const double eta = cfg.eta;
  // The summand eta^q binom(q-1,p-1) sqrt(binom(k+q,k) binom(l+q,l)) turns
  // decreasing at the first q with eta <= r(q); r is increasing with limit 1.
  const auto turn_ratio = [&](int q) {
    return (q - p + 1.0) * (q + 1.0) /
           (q * std::sqrt((k + q + 1.0) * (l + q + 1.0)));
  };
  int q0 = p;
  while (eta > turn_ratio(q0)) {
    ++q0;
    if (q0 > 1'000'000)
      throw NumericError("bias_bound: q0 search did not converge");
  }
  return require_finite(
      std::exp(q0 * std::log(eta) + log_binomial(q0 - 1, p - 1) +
               0.5 * (log_binomial(k + q0, k) + log_binomial(l + q0, l))),
      "bias_bound");
}

double range_bound(int k, int l, const EstimatorConfig& cfg) {
  cfg.validate();
  check_indices(k, l, kDefaultIndexGuard, "range_bound");
  const int hi = std::max(k, l);
  const int lo = std::min(k, l);
  const double log_val = -(1.0 + 0.5 * (k + l)) * std::log(cfg.eta) +
                         log_binomial(hi + cfg.p, cfg.p - 1) +
                         0.5 * ((hi - lo) * std::log(2.0) + log_binomial(hi, lo));
  return require_finite(std::exp(log_val), "range_bound");
}

double range_constant(const CoreState& state, int p, double eta) {
  if (p < 1) throw ParameterError("range_constant: p must be >= 1");
  if (!(eta > 0.0)) throw ParameterError("range_constant: eta must be > 0");
  const auto& c = state.coefficients();
  const int n = state.support();
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      const double mag = std::abs(c[k]) * std::abs(c[l]);
      if (mag == 0.0) continue;
      const int hi = std::max(k, l);
      const int lo = std::min(k, l);
      const double log_term = ((n - 1) - 0.5 * (k + l)) * std::log(eta) +
                              log_binomial(hi + p, p - 1) +
                              0.5 * ((hi - lo) * std::log(2.0) +
                                     log_binomial(hi, lo));
      sum += mag * std::exp(log_term);
    }
  }
  return require_finite(sum, "range_constant");
}

EstimatorConstants constants_for(const CoreState& state,
                                 const EstimatorConfig& cfg, double epsilon,
                                 int m_copies) {
  cfg.validate();
  if (!(epsilon > 0.0)) throw ParameterError("constants_for: epsilon must be > 0");
  if (m_copies < 1) throw ParameterError("constants_for: m_copies must be >= 1");

  const auto& coeffs = state.coefficients();
  const int c = state.support();
  const int p = cfg.p;

  double sa = 0.0;
  for (int n = 0; n < c; ++n) sa += std::abs(coeffs[n]) * sqrt_binomial(n + p, n);
  const double a = sa * sa;

  const double b = range_constant(state, p, cfg.eta);

  const double two_cp = 2.0 * c / p;
  const double log_k1 = std::log(2.0) + two_cp * std::log(a) +
                        2.0 * std::log(b) + (2.0 + two_cp) * std::log(c + p) -
                        two_cp * std::log(static_cast<double>(c)) -
                        2.0 * std::log(static_cast<double>(p));
  const double log_k2 = std::log(2.0) +
                        (2.0 * c - 2.0) * std::log(static_cast<double>(p)) +
                        2.0 * std::log(b) + (2.0 * c + 2.0) * std::log(c + p) -
                        2.0 * c * std::log(p + 1.0);
  const double k_big = std::exp(std::max(log_k1, log_k2));

  const double eps_eff = epsilon / m_copies;
  double eta_max = std::min(std::pow(c * eps_eff / ((c + p) * a), 1.0 / p),
                            (p + 1.0) / (p * static_cast<double>(p + c)));
  eta_max = std::min(eta_max, 1.0);

  const double eta_g = std::min(1.0, std::pow(eps_eff / a, 1.0 / p));
  const double g_cp = std::pow(eps_eff, c - static_cast<double>(c) / p) *
                      std::pow(a, static_cast<double>(c) / p) *
                      range_constant(state, p, eta_g);

  EstimatorConstants out;
  out.a = require_finite(a, "constants_for(a)");
  out.b = require_finite(b, "constants_for(b)");
  out.k_big = require_finite(k_big, "constants_for(k_big)");
  out.eta_max = require_finite(eta_max, "constants_for(eta_max)");
  out.g_cp = require_finite(g_cp, "constants_for(g_cp)");
  return out;
}

GCoreEvaluator::GCoreEvaluator(const CoreState& state,
                               const EstimatorConfig& cfg) {
  cfg.validate();
  const auto& c = state.coefficients();
  const int support = state.support();
  const int p = cfg.p;
  const double eta = cfg.eta;
  check_indices(support - 1 + p - 1, support - 1 + p - 1, kDefaultIndexGuard,
                "GCoreEvaluator");

  gauss_rate_ = 1.0 - 1.0 / eta;
  inv_sqrt_eta_ = 1.0 / std::sqrt(eta);
  degree_ = support + p - 1;

  // Fock-state targets: g depends only on x = |z|^2.
  int fock_idx = -1;
  radial_ = state.nonzero_count() == 1;
  if (radial_) {
    for (int n = 0; n < support; ++n)
      if (c[n] != Complex(0.0)) fock_idx = n;
    radial_coeffs_.assign(degree_, 0.0);
    const int n = fock_idx;
    for (int j = 0; j < p; ++j) {
      const int aa = n + j;
      // weight of f_{n+j,n+j}; the eta^j of the g-sum cancels the prefactor's
      // eta^{-j}, leaving eta^{-(1+n)} times binom(n+j,n).
      const double wj = ((j & 1) ? -1.0 : 1.0) * binomial(n + j, n) *
                        std::exp(-(1.0 + n) * std::log(eta));
      for (int t = 0; t <= aa; ++t) {
        const int r = aa - t;  // power of x
        const double lag_coef =
            ((t & 1) ? -1.0 : 1.0) *
            std::exp(log_factorial(aa) - log_factorial(t) -
                     2.0 * log_factorial(r));
        radial_coeffs_[r] += wj * lag_coef * std::pow(1.0 / eta, r);
      }
    }
    return;
  }

  // General targets: Hermitian coefficient matrix over w^a conj(w)^b.
  coeffs_.assign(static_cast<size_t>(degree_) * degree_, Complex(0.0));
  for (int k = 0; k < support; ++k) {
    if (c[k] == Complex(0.0)) continue;
    for (int l = 0; l < support; ++l) {
      if (c[l] == Complex(0.0)) continue;
      const Complex weight0 = std::conj(c[k]) * c[l] *
                              std::exp(-(1.0 + 0.5 * (k + l)) * std::log(eta));
      for (int j = 0; j < p; ++j) {
        const double sj = ((j & 1) ? -1.0 : 1.0) *
                          sqrt_binomial(k + j, k) * sqrt_binomial(l + j, l);
        const int ka = k + j, la = l + j;
        const int tmax = std::min(ka, la);
        for (int t = 0; t <= tmax; ++t) {
          const double lag_coef =
              ((t & 1) ? -1.0 : 1.0) *
              std::exp(0.5 * (log_factorial(la) + log_factorial(ka)) -
                       log_factorial(t) - log_factorial(la - t) -
                       log_factorial(ka - t));
          coeffs_[static_cast<size_t>(ka - t) * degree_ + (la - t)] +=
              weight0 * sj * lag_coef;
        }
      }
    }
  }
}

double GCoreEvaluator::eval_general(Complex z) const {
  const Complex w = z * inv_sqrt_eta_;
  const Complex wc = std::conj(w);
  Complex val = 0.0;
  for (int a = degree_ - 1; a >= 0; --a) {
    Complex inner = 0.0;
    const Complex* row = coeffs_.data() + static_cast<size_t>(a) * degree_;
    for (int b = degree_ - 1; b >= 0; --b) inner = inner * wc + row[b];
    val = val * w + inner;
  }
  return std::exp(gauss_rate_ * std::norm(z)) * val.real();
}

double GCoreEvaluator::operator()(Complex z) const {
  double out;
  if (radial_) {
    const double x = std::norm(z);
    double acc = radial_coeffs_[degree_ - 1];
    for (int r = degree_ - 2; r >= 0; --r) acc = acc * x + radial_coeffs_[r];
    out = std::exp(gauss_rate_ * x) * acc;
  } else {
    out = eval_general(z);
  }
  return require_finite(out, "GCoreEvaluator");
}

void GCoreEvaluator::accumulate(const Complex* z, int64_t n, double& sum,
                                double& sum_sq) const {
  if (n <= 0) return;
  if (radial_) {
    Eigen::Map<const Eigen::ArrayXcd> zs(z, n);
    Eigen::ArrayXd x = zs.abs2();
    Eigen::ArrayXd acc =
        Eigen::ArrayXd::Constant(n, radial_coeffs_[degree_ - 1]);
    for (int r = degree_ - 2; r >= 0; --r) acc = acc * x + radial_coeffs_[r];
    acc *= (gauss_rate_ * x).exp();
    sum += acc.sum();
    sum_sq += acc.square().sum();
  } else {
    for (int64_t i = 0; i < n; ++i) {
      const double g = eval_general(z[i]);
      sum += g;
      sum_sq += g * g;
    }
  }
  if (!std::isfinite(sum) || !std::isfinite(sum_sq))
    throw NumericError("GCoreEvaluator: non-finite block sum");
}

}  // namespace hetverify
