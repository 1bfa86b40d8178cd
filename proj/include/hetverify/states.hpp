#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "hetverify/types.hpp"

namespace hetverify {

// m x m unitary describing a passive linear transformation.
class PassiveUnitary {
 public:
  explicit PassiveUnitary(Eigen::MatrixXcd u);

  static PassiveUnitary identity(int m);

  const Eigen::MatrixXcd& matrix() const { return u_; }
  int modes() const { return static_cast<int>(u_.rows()); }

 private:
  Eigen::MatrixXcd u_;
};

// Haar-distributed passive unitary (QR of a complex Gaussian matrix with
// phase-fixed diagonal). Deterministic per seed.
PassiveUnitary haar_unitary(int m, uint64_t seed);

// m-mode target state S(xi) D(beta) U (tensor of core states).
struct TargetSpec {
  int modes = 0;
  std::vector<CoreState> core_states;
  PassiveUnitary unitary{Eigen::MatrixXcd::Identity(1, 1)};
  Eigen::VectorXcd beta;
  Eigen::VectorXcd xi;

  void validate() const;

  // |1...1 0...0> through an interferometer; beta = xi = 0.
  static TargetSpec boson_sampling(int modes, int photons, PassiveUnitary u);
  bool is_boson_sampling_form(int* photons_out = nullptr) const;
};

// Truncated Fock-basis density matrix. Validated on construction: Hermitian
// within 1e-10, trace within [1 - 1e-8, 1], eigenvalues >= -1e-9.
class FockDensityMatrix {
 public:
  explicit FockDensityMatrix(Eigen::MatrixXcd entries);

  static FockDensityMatrix from_pure(const Eigen::VectorXcd& psi);
  static FockDensityMatrix from_core(const CoreState& state, int dim = -1);

  int dim() const { return static_cast<int>(rho_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return rho_; }
  Complex entry(int i, int j) const { return rho_(i, j); }

 private:
  Eigen::MatrixXcd rho_;
};

// ---------------------------------------------------------------------------
// Single-mode oracle operations

// <psi| rho |psi> for a pure target. The core state is zero-padded (or the
// density matrix must cover its support).
double fidelity_pure(const CoreState& target, const FockDensityMatrix& rho);
double fidelity_pure(const Eigen::VectorXcd& psi, const Eigen::MatrixXcd& rho);

// Exact expectation of g_{k,l}^{(p)} under heterodyne sampling of rho:
//   rho_{kl} + (-1)^{p+1} sum_{q>=p} rho_{k+q,l+q} eta^q binom(q-1,p-1)
//              sqrt(binom(k+q,k) binom(l+q,l)),
// a finite sum under truncation. This is the oracle for Monte-Carlo means.
Complex expectation_g_exact(const FockDensityMatrix& rho, int k, int l,
                            const EstimatorConfig& cfg);

// Fock coefficients of S(xi) D(alpha) |0>, computed by exponentiating the
// truncated displacement and squeezing generators in a larger working space.
// deficit is the norm lost by truncating to `dim`.
struct TruncatedVector {
  Eigen::VectorXcd coeffs;
  double deficit = 0.0;
};
TruncatedVector squeezed_coherent_fock(Complex alpha, Complex xi, int dim);

namespace detail {
// Same coefficients but without the 1e-6 deficit gate, for oracle internals
// that only need an accurate head of the expansion.
TruncatedVector squeezed_coherent_head(Complex alpha, Complex xi, int dim);
}  // namespace detail

// Analytic coherent-state coefficients e^{-|a|^2/2} a^n / sqrt(n!).
Eigen::VectorXcd coherent_fock(Complex alpha, int dim);

// Pure-loss channel with transmissivity tau, as a Kraus sum in the Fock
// basis. Exactly trace preserving on the truncated space.
FockDensityMatrix apply_loss(const FockDensityMatrix& rho, double tau);

// Tight multimode fidelity lower bound from per-mode fidelities:
//   W = 1 - sum_i (1 - F_i).
double witness_exact(const std::vector<double>& per_mode_fidelities);

// ---------------------------------------------------------------------------
// Truncated operators (building blocks of the brute-force oracle)

// exp(beta a^dag - conj(beta) a) on a dim-dimensional Fock space.
Eigen::MatrixXcd displacement_operator(Complex beta, int dim);

// exp((conj(xi) a^2 - xi a^dag^2)/2) on a dim-dimensional Fock space.
Eigen::MatrixXcd squeeze_operator(Complex xi, int dim);

// ---------------------------------------------------------------------------
// Multimode brute-force oracle (desk scale: m <= 4, small per-mode dims).
// Vectors and density matrices live on the hypercube basis |n_1..n_m> with
// n_i < dim and mode-major index n_1*dim^{m-1} + ... + n_m.

struct MultimodeDensity {
  int modes = 1;
  int dim = 1;  // per mode
  Eigen::MatrixXcd rho;

  int64_t total_dim() const { return rho.rows(); }
  void validate() const;
};

// Applies a single-mode operator to one mode of a hypercube vector.
void apply_single_mode(Eigen::VectorXcd& psi, const Eigen::MatrixXcd& op,
                       int mode, int modes, int dim);

// Passive interferometer on the hypercube, applied exactly per total-photon
// shell (the generator conserves photon number, so shells below the hypercube
// edge carry no truncation error at all). Weight on shells above max_shell is
// dropped and accumulated into *deficit. max_shell = -1 means dim - 1, the
// largest shell that fits completely inside the hypercube.
class FockInterferometer {
 public:
  FockInterferometer(const Eigen::MatrixXcd& u, int modes, int dim,
                     int max_shell = -1);
  void apply(Eigen::VectorXcd& psi, double* deficit) const;
  void apply_adjoint(Eigen::VectorXcd& psi, double* deficit) const;

 private:
  void apply_impl(Eigen::VectorXcd& psi, bool adjoint, double* deficit) const;

  int modes_;
  int dim_;
  int max_shell_;
  std::vector<std::vector<int64_t>> shell_indices_;  // hypercube index per shell state
  std::vector<Eigen::MatrixXcd> shell_unitaries_;
};

// Tensor product of per-mode core states on the hypercube.
Eigen::VectorXcd product_state_vector(const std::vector<CoreState>& cores,
                                      int dim);

// Target state S(xi) D(beta) U (tensor C_i) on the hypercube, auto-escalating
// the working dimension until the projected coefficients stabilise within
// tol. Throws TruncationError (with the measured deficit) if escalation hits
// max_dim first. The reported deficit is the weight outside the hypercube.
TruncatedVector target_state_vector(const TargetSpec& target, int dim,
                                    double tol = 1e-9, int max_dim = 128);

// Partial trace keeping only `mode`.
Eigen::MatrixXcd reduced_density(const MultimodeDensity& rho, int mode);

// Tr(rho Pi^xi_gamma): unbalanced heterodyne POVM value, computed directly
// from squeezed-coherent vectors.
double heterodyne_povm_value(const MultimodeDensity& rho,
                             const Eigen::VectorXcd& gamma,
                             const Eigen::VectorXcd& xi);

// Tr(V^dag rho V Pi^0_alpha) with V = S(xi) D(beta) U: the transformed-frame
// route. The state is conjugated on an escalated working space and projected
// onto the analytic coherent vector at alpha.
double heterodyne_povm_value_transformed(const MultimodeDensity& rho,
                                         const PassiveUnitary& u,
                                         const Eigen::VectorXcd& beta,
                                         const Eigen::VectorXcd& xi,
                                         const Eigen::VectorXcd& alpha,
                                         double tol = 1e-9, int max_dim = 64);

// <psi_target| rho |psi_target> for a full multimode state.
double fidelity_target(const TargetSpec& target, const MultimodeDensity& rho);

}  // namespace hetverify
