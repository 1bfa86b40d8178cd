#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "hetverify/errors.hpp"

namespace hetverify {

using Complex = std::complex<double>;

// Fock indices above this guard are rejected to keep the combinatorics sane.
inline constexpr int kDefaultIndexGuard = 64;

// Free parameters of the generalised heterodyne estimators: the order p >= 1
// and the damping 0 < eta < 1.
struct EstimatorConfig {
  int p = 1;
  double eta = 0.5;

  void validate() const {
    if (p < 1) throw ParameterError("estimator order p must be >= 1");
    if (!(eta > 0.0) || !(eta < 1.0))
      throw ParameterError("estimator damping eta must lie in (0, 1)");
  }
};

// Analytical constants attached to a (core state, config) pair.
//   a       : squared weighted-coefficient sum entering the bias bound
//   b       : range constant of the core estimator (times eta^-c)
//   k_big   : sample-complexity constant of the i.i.d. failure formula
//   eta_max : largest admissible damping for the planner inversion
//   g_cp    : constant of the non-i.i.d. Hoeffding term
struct EstimatorConstants {
  double a = 0.0;
  double b = 0.0;
  double k_big = 0.0;
  double eta_max = 1.0;
  double g_cp = 0.0;
};

// Normalized single-mode pure state with bounded Fock support c >= 1,
// stored as the amplitudes c_0 .. c_{c-1}.
class CoreState {
 public:
  explicit CoreState(std::vector<Complex> coefficients);

  static CoreState fock(int n);

  const std::vector<Complex>& coefficients() const { return coeffs_; }
  int support() const { return static_cast<int>(coeffs_.size()); }
  // Number of nonzero amplitudes; the rejection sampler's envelope constant.
  int nonzero_count() const;

  bool is_fock(int n) const;

 private:
  std::vector<Complex> coeffs_;
};

}  // namespace hetverify
