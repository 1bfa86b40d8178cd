#include "hetverify/states.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "hetverify/combinatorics.hpp"
#include "hetverify/rng.hpp"

namespace hetverify {

PassiveUnitary::PassiveUnitary(Eigen::MatrixXcd u) : u_(std::move(u)) {
  if (u_.rows() < 1 || u_.rows() != u_.cols())
    throw ValidationError("passive unitary: matrix must be square");
  const Eigen::MatrixXcd gram = u_.adjoint() * u_;
  const double err =
      (gram - Eigen::MatrixXcd::Identity(u_.rows(), u_.cols()))
          .cwiseAbs()
          .maxCoeff();
  if (err > 1e-8)
    throw ValidationError("passive unitary: U^dag U deviates from identity by " +
                          std::to_string(err));
}

PassiveUnitary PassiveUnitary::identity(int m) {
  return PassiveUnitary(Eigen::MatrixXcd::Identity(m, m));
}

PassiveUnitary haar_unitary(int m, uint64_t seed) {
  if (m < 1) throw ParameterError("haar_unitary: m must be >= 1");
  ShotRng rng(seed, 0x4aa2);
  Eigen::MatrixXcd a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = rng.complex_gaussian();
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < m; ++j) {
    const Complex d = r(j, j);
    q.col(j) *= d / std::abs(d);
  }
  return PassiveUnitary(std::move(q));
}

void TargetSpec::validate() const {
  if (modes < 1) throw ValidationError("target: modes must be >= 1");
  if (static_cast<int>(core_states.size()) != modes ||
      unitary.modes() != modes || beta.size() != modes || xi.size() != modes)
    throw ValidationError("target: per-mode field lengths must equal modes");
}

TargetSpec TargetSpec::boson_sampling(int modes, int photons,
                                      PassiveUnitary u) {
  if (photons < 0 || photons > modes)
    throw ParameterError("boson_sampling: need 0 <= photons <= modes");
  TargetSpec t;
  t.modes = modes;
  for (int i = 0; i < modes; ++i)
    t.core_states.push_back(CoreState::fock(i < photons ? 1 : 0));
  t.unitary = std::move(u);
  t.beta = Eigen::VectorXcd::Zero(modes);
  t.xi = Eigen::VectorXcd::Zero(modes);
  t.validate();
  return t;
}

bool TargetSpec::is_boson_sampling_form(int* photons_out) const {
  validate();
  if (beta.cwiseAbs().maxCoeff() > 0.0 || xi.cwiseAbs().maxCoeff() > 0.0)
    return false;
  int photons = 0;
  bool seen_vacuum = false;
  for (const auto& c : core_states) {
    if (c.is_fock(1)) {
      if (seen_vacuum) return false;
      ++photons;
    } else if (c.is_fock(0)) {
      seen_vacuum = true;
    } else {
      return false;
    }
  }
  if (photons_out) *photons_out = photons;
  return true;
}

FockDensityMatrix::FockDensityMatrix(Eigen::MatrixXcd entries)
    : rho_(std::move(entries)) {
  if (rho_.rows() < 1 || rho_.rows() != rho_.cols())
    throw ValidationError("density matrix: must be square");
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw ValidationError("density matrix: not Hermitian");
  const double tr = rho_.trace().real();
  if (tr < 1.0 - 1e-8 || tr > 1.0 + 1e-10)
    throw ValidationError("density matrix: trace " + std::to_string(tr) +
                          " outside [1-1e-8, 1]");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_,
                                                     Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9)
    throw ValidationError("density matrix: negative eigenvalue beyond tolerance");
}

FockDensityMatrix FockDensityMatrix::from_pure(const Eigen::VectorXcd& psi) {
  return FockDensityMatrix(psi * psi.adjoint());
}

FockDensityMatrix FockDensityMatrix::from_core(const CoreState& state,
                                               int dim) {
  const int c = state.support();
  if (dim < 0) dim = c;
  if (dim < c)
    throw ParameterError("from_core: dim smaller than the core support");
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  for (int n = 0; n < c; ++n) psi(n) = state.coefficients()[n];
  return from_pure(psi);
}

double fidelity_pure(const CoreState& target, const FockDensityMatrix& rho) {
  if (rho.dim() < target.support())
    throw ValidationError("fidelity_pure: truncation below the target support");
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(rho.dim());
  for (int n = 0; n < target.support(); ++n)
    psi(n) = target.coefficients()[n];
  return fidelity_pure(psi, rho.matrix());
}

double fidelity_pure(const Eigen::VectorXcd& psi, const Eigen::MatrixXcd& rho) {
  if (psi.size() != rho.rows())
    throw ValidationError("fidelity_pure: dimension mismatch");
  const double f = (psi.adjoint() * rho * psi)(0).real();
  return std::clamp(f, 0.0, 1.0);
}

Complex expectation_g_exact(const FockDensityMatrix& rho, int k, int l,
                            const EstimatorConfig& cfg) {
  cfg.validate();
  if (k < 0 || l < 0)
    throw BoundsError("expectation_g_exact: negative Fock index");
  const int d = rho.dim();
  Complex val = (k < d && l < d) ? rho.entry(k, l) : Complex(0.0);
  const int qmax = d - 1 - std::max(k, l);
  const double sign = (cfg.p % 2 == 0) ? -1.0 : 1.0;
  for (int q = cfg.p; q <= qmax; ++q) {
    const double w =
        std::exp(q * std::log(cfg.eta) + log_binomial(q - 1, cfg.p - 1) +
                 0.5 * (log_binomial(k + q, k) + log_binomial(l + q, l)));
    val += sign * w * rho.entry(k + q, l + q);
  }
  return val;
}

Eigen::VectorXcd coherent_fock(Complex alpha, int dim) {
  if (dim < 1) throw ParameterError("coherent_fock: dim must be >= 1");
  Eigen::VectorXcd v(dim);
  const double log_norm = -0.5 * std::norm(alpha);
  Complex amp = std::exp(Complex(log_norm, 0.0));
  v(0) = amp;
  for (int n = 1; n < dim; ++n) {
    amp *= alpha / std::sqrt(static_cast<double>(n));
    v(n) = amp;
  }
  return v;
}

namespace detail {

TruncatedVector squeezed_coherent_head(Complex alpha, Complex xi, int dim) {
  if (dim < 1) throw ParameterError("squeezed_coherent_fock: dim must be >= 1");
  constexpr int kMaxWork = 1024;

  // Compute in an escalating working space until the coefficients on the
  // requested window stabilise.
  Eigen::VectorXcd prev;
  int work = std::max(2 * dim + 8, 32);
  for (;;) {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(work);
    psi(0) = 1.0;
    psi = displacement_operator(alpha, work) * psi;
    psi = squeeze_operator(xi, work) * psi;
    Eigen::VectorXcd head = psi.head(dim);
    if (prev.size() == dim && (head - prev).cwiseAbs().maxCoeff() < 1e-11) {
      TruncatedVector out;
      out.coeffs = head;
      out.deficit = std::max(0.0, 1.0 - head.squaredNorm());
      return out;
    }
    prev = std::move(head);
    if (work >= kMaxWork)
      throw TruncationError(
          "squeezed_coherent_fock: working space exhausted before convergence",
          1.0);
    work = std::min(kMaxWork, work + work / 2 + 8);
  }
}

}  // namespace detail

TruncatedVector squeezed_coherent_fock(Complex alpha, Complex xi, int dim) {
  TruncatedVector out = detail::squeezed_coherent_head(alpha, xi, dim);
  if (out.deficit > 1e-6)
    throw TruncationError("squeezed_coherent_fock: truncated norm deficit " +
                              std::to_string(out.deficit) +
                              " exceeds 1e-6 at dim " + std::to_string(dim),
                          out.deficit);
  return out;
}

FockDensityMatrix apply_loss(const FockDensityMatrix& rho, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0))
    throw ParameterError("apply_loss: tau must lie in [0, 1]");
  const int d = rho.dim();
  if (tau == 1.0) return rho;
  // Kraus operators K_j |n> = sqrt(binom(n,j) tau^{n-j} (1-tau)^j) |n-j>;
  // sum_j K_j^dag K_j = 1 exactly on the truncated space.
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  Eigen::MatrixXcd kraus(d, d);
  for (int j = 0; j < d; ++j) {
    kraus.setZero();
    for (int n = j; n < d; ++n) {
      double coef;
      if (tau == 0.0) {
        coef = (n == j) ? 1.0 : 0.0;
      } else {
        coef = std::exp(0.5 * (log_binomial(n, j) + (n - j) * std::log(tau) +
                               j * std::log(1.0 - tau)));
      }
      kraus(n - j, n) = coef;
    }
    out += kraus * rho.matrix() * kraus.adjoint();
  }
  return FockDensityMatrix(std::move(out));
}

double witness_exact(const std::vector<double>& per_mode_fidelities) {
  double w = 1.0;
  for (double f : per_mode_fidelities) {
    if (!(f >= -1e-12) || !(f <= 1.0 + 1e-12))
      throw ParameterError("witness_exact: fidelity outside [0, 1]");
    w -= 1.0 - f;
  }
  return w;
}

}  // namespace hetverify
