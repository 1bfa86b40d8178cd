#include <algorithm>
#include <cmath>
#include <memory>
#include <unordered_map>

#include <Eigen/Dense>

#include "hetverify/combinatorics.hpp"
#include "hetverify/states.hpp"

namespace hetverify {

namespace {

// exp(G) for an anti-Hermitian generator, through the unitary
// diagonalisation of -iG. Exactly unitary up to roundoff.
Eigen::MatrixXcd exp_antihermitian(const Eigen::MatrixXcd& gen) {
  const Eigen::MatrixXcd h = Complex(0.0, -1.0) * gen;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const auto& lam = es.eigenvalues();
  Eigen::VectorXcd phases(lam.size());
  for (int i = 0; i < lam.size(); ++i)
    phases(i) = std::exp(Complex(0.0, lam(i)));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

int64_t ipow(int64_t base, int exp) {
  int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Matrix logarithm of a unitary via its Schur form (diagonal for normal
// matrices); anti-Hermitian by construction.
Eigen::MatrixXcd unitary_log(const Eigen::MatrixXcd& u) {
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u);
  const auto& q = schur.matrixU();
  Eigen::VectorXcd logs(u.rows());
  for (int i = 0; i < u.rows(); ++i)
    logs(i) = std::log(schur.matrixT()(i, i));
  Eigen::MatrixXcd b = q * logs.asDiagonal() * q.adjoint();
  return 0.5 * (b - b.adjoint());
}

}  // namespace

Eigen::MatrixXcd displacement_operator(Complex beta, int dim) {
  if (dim < 1) throw ParameterError("displacement_operator: dim must be >= 1");
  Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 0; n + 1 < dim; ++n) {
    const double s = std::sqrt(n + 1.0);
    gen(n + 1, n) += beta * s;
    gen(n, n + 1) -= std::conj(beta) * s;
  }
  return exp_antihermitian(gen);
}

Eigen::MatrixXcd squeeze_operator(Complex xi, int dim) {
  if (dim < 1) throw ParameterError("squeeze_operator: dim must be >= 1");
  Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 0; n + 2 < dim; ++n) {
    const double s = std::sqrt((n + 1.0) * (n + 2.0));
    gen(n, n + 2) += 0.5 * std::conj(xi) * s;  // a^2 term
    gen(n + 2, n) -= 0.5 * xi * s;             // a^dag^2 term
  }
  return exp_antihermitian(gen);
}

void MultimodeDensity::validate() const {
  if (modes < 1 || dim < 1)
    throw ValidationError("multimode density: bad shape");
  if (rho.rows() != rho.cols() || rho.rows() != ipow(dim, modes))
    throw ValidationError("multimode density: matrix is not dim^modes square");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
    throw ValidationError("multimode density: not Hermitian");
  if (std::abs(rho.trace().real() - 1.0) > 1e-7)
    throw ValidationError("multimode density: trace far from 1");
}

void apply_single_mode(Eigen::VectorXcd& psi, const Eigen::MatrixXcd& op,
                       int mode, int modes, int dim) {
  const int64_t inner = ipow(dim, modes - 1 - mode);
  const int64_t outer = ipow(dim, mode);
  Eigen::VectorXcd fiber(dim), mixed(dim);
  for (int64_t o = 0; o < outer; ++o) {
    for (int64_t in = 0; in < inner; ++in) {
      const int64_t base = o * dim * inner + in;
      for (int n = 0; n < dim; ++n) fiber(n) = psi(base + n * inner);
      mixed.noalias() = op * fiber;
      for (int n = 0; n < dim; ++n) psi(base + n * inner) = mixed(n);
    }
  }
}

FockInterferometer::FockInterferometer(const Eigen::MatrixXcd& u, int modes,
                                       int dim, int max_shell)
    : modes_(modes), dim_(dim) {
  if (u.rows() != modes || u.cols() != modes)
    throw ValidationError("interferometer: unitary size mismatch");
  max_shell_ = (max_shell < 0) ? dim - 1 : std::min(max_shell, dim - 1);

  const Eigen::MatrixXcd b = unitary_log(u);
  const int64_t total = ipow(dim, modes);

  // Group hypercube indices by total photon number.
  shell_indices_.assign(max_shell_ + 1, {});
  std::vector<int> occ(modes);
  for (int64_t idx = 0; idx < total; ++idx) {
    int64_t rest = idx;
    int sum = 0;
    for (int i = modes - 1; i >= 0; --i) {
      occ[i] = static_cast<int>(rest % dim);
      sum += occ[i];
      rest /= dim;
    }
    if (sum <= max_shell_) shell_indices_[sum].push_back(idx);
  }

  std::unordered_map<int64_t, int> position;
  shell_unitaries_.resize(max_shell_ + 1);
  for (int s = 0; s <= max_shell_; ++s) {
    const auto& basis = shell_indices_[s];
    const int n = static_cast<int>(basis.size());
    position.clear();
    for (int a = 0; a < n; ++a) position[basis[a]] = a;

    Eigen::MatrixXcd gamma = Eigen::MatrixXcd::Zero(n, n);
    for (int a = 0; a < n; ++a) {
      int64_t rest = basis[a];
      for (int i = modes - 1; i >= 0; --i) {
        occ[i] = static_cast<int>(rest % dim);
        rest /= dim;
      }
      Complex diag = 0.0;
      for (int j = 0; j < modes; ++j) diag += b(j, j) * static_cast<double>(occ[j]);
      gamma(a, a) += diag;
      for (int k = 0; k < modes; ++k) {
        if (occ[k] == 0) continue;
        for (int j = 0; j < modes; ++j) {
          if (j == k) continue;
          // |n - e_k + e_j>; stays inside the shell, hence the hypercube.
          const int64_t idx_to = basis[a] + ipow(dim, modes - 1 - j) -
                                 ipow(dim, modes - 1 - k);
          const double amp = std::sqrt((occ[j] + 1.0) * occ[k]);
          gamma(position.at(idx_to), a) += b(j, k) * amp;
        }
      }
    }
    shell_unitaries_[s] = exp_antihermitian(gamma);
  }
}

void FockInterferometer::apply(Eigen::VectorXcd& psi, double* deficit) const {
  apply_impl(psi, false, deficit);
}

void FockInterferometer::apply_adjoint(Eigen::VectorXcd& psi,
                                       double* deficit) const {
  apply_impl(psi, true, deficit);
}

void FockInterferometer::apply_impl(Eigen::VectorXcd& psi, bool adjoint,
                                    double* deficit) const {
  if (psi.size() != ipow(dim_, modes_))
    throw ValidationError("interferometer: vector size mismatch");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.size());
  double kept = 0.0;
  for (int s = 0; s <= max_shell_; ++s) {
    const auto& basis = shell_indices_[s];
    const int n = static_cast<int>(basis.size());
    Eigen::VectorXcd block(n);
    for (int a = 0; a < n; ++a) block(a) = psi(basis[a]);
    const double w = block.squaredNorm();
    if (w == 0.0) continue;
    kept += w;
    Eigen::VectorXcd mixed = adjoint ? (shell_unitaries_[s].adjoint() * block).eval()
                                     : (shell_unitaries_[s] * block).eval();
    for (int a = 0; a < n; ++a) out(basis[a]) = mixed(a);
  }
  if (deficit) *deficit += std::max(0.0, psi.squaredNorm() - kept);
  psi = std::move(out);
}

Eigen::VectorXcd product_state_vector(const std::vector<CoreState>& cores,
                                      int dim) {
  const int m = static_cast<int>(cores.size());
  if (m < 1) throw ParameterError("product_state_vector: no modes");
  for (const auto& c : cores)
    if (c.support() > dim)
      throw ValidationError("product_state_vector: dim below core support");
  Eigen::VectorXcd psi = Eigen::VectorXcd::Ones(1);
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
    for (int n = 0; n < cores[i].support(); ++n)
      v(n) = cores[i].coefficients()[n];
    Eigen::VectorXcd next(psi.size() * dim);
    for (int64_t a = 0; a < psi.size(); ++a)
      next.segment(a * dim, dim) = psi(a) * v;
    psi = std::move(next);
  }
  return psi;
}

TruncatedVector target_state_vector(const TargetSpec& target, int dim,
                                    double tol, int max_dim) {
  target.validate();
  const int m = target.modes;
  int core_total = 0;
  int core_max = 1;
  for (const auto& c : target.core_states) {
    core_total += c.support() - 1;
    core_max = std::max(core_max, c.support());
  }

  const auto build = [&](int work) {
    Eigen::VectorXcd psi = product_state_vector(target.core_states, work);
    double deficit = 0.0;
    FockInterferometer itf(target.unitary.matrix(), m, work,
                           std::min(core_total, work - 1));
    itf.apply(psi, &deficit);
    for (int i = 0; i < m; ++i) {
      if (target.beta(i) != Complex(0.0))
        apply_single_mode(psi, displacement_operator(target.beta(i), work), i,
                          m, work);
      if (target.xi(i) != Complex(0.0))
        apply_single_mode(psi, squeeze_operator(target.xi(i), work), i, m,
                          work);
    }
    return std::make_pair(std::move(psi), deficit);
  };

  const auto project = [&](const Eigen::VectorXcd& psi, int work) {
    Eigen::VectorXcd head = Eigen::VectorXcd::Zero(ipow(dim, m));
    std::vector<int> occ(m);
    for (int64_t idx = 0; idx < psi.size(); ++idx) {
      int64_t rest = idx;
      bool inside = true;
      int64_t small = 0;
      for (int i = m - 1; i >= 0; --i) {
        const int n = static_cast<int>(rest % work);
        rest /= work;
        if (n >= dim) {
          inside = false;
          break;
        }
        occ[i] = n;
      }
      if (!inside) continue;
      for (int i = 0; i < m; ++i) small = small * dim + occ[i];
      head(small) = psi(idx);
    }
    return head;
  };

  int work = std::max({dim, core_max, core_total + 1});
  bool exact = true;  // no squeezing/displacement => construction is exact
  for (int i = 0; i < m; ++i)
    if (target.beta(i) != Complex(0.0) || target.xi(i) != Complex(0.0))
      exact = false;
  if (!exact) work = std::max(work, std::min(max_dim, 2 * dim + 8));

  Eigen::VectorXcd prev_head;
  for (;;) {
    auto [psi, shell_deficit] = build(work);
    (void)shell_deficit;  // zero by construction: cores fit in built shells
    Eigen::VectorXcd head = project(psi, work);
    const bool stable =
        exact || (prev_head.size() == head.size() &&
                  (head - prev_head).cwiseAbs().maxCoeff() < tol);
    if (stable) {
      TruncatedVector out;
      out.coeffs = head;
      out.deficit = std::max(0.0, 1.0 - head.squaredNorm());
      return out;
    }
    prev_head = std::move(head);
    if (work >= max_dim)
      throw TruncationError(
          "target_state_vector: working space exhausted; deficit " +
              std::to_string(1.0 - prev_head.squaredNorm()),
          std::max(0.0, 1.0 - prev_head.squaredNorm()));
    work = std::min(max_dim, work + work / 2 + 4);
  }
}

Eigen::MatrixXcd reduced_density(const MultimodeDensity& rho, int mode) {
  rho.validate();
  if (mode < 0 || mode >= rho.modes)
    throw ParameterError("reduced_density: mode out of range");
  const int d = rho.dim;
  const int64_t inner = ipow(d, rho.modes - 1 - mode);
  const int64_t outer = ipow(d, mode);
  Eigen::MatrixXcd red = Eigen::MatrixXcd::Zero(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int64_t o = 0; o < outer; ++o)
        for (int64_t in = 0; in < inner; ++in)
          red(a, b) += rho.rho(o * d * inner + a * inner + in,
                               o * d * inner + b * inner + in);
  return red;
}

double heterodyne_povm_value(const MultimodeDensity& rho,
                             const Eigen::VectorXcd& gamma,
                             const Eigen::VectorXcd& xi) {
  rho.validate();
  if (gamma.size() != rho.modes || xi.size() != rho.modes)
    throw ParameterError("heterodyne_povm_value: outcome size mismatch");
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(1);
  for (int i = 0; i < rho.modes; ++i) {
    // Only the head of the expansion enters Tr(rho Pi); the head is exact.
    const Eigen::VectorXcd mode_vec =
        detail::squeezed_coherent_head(gamma(i), xi(i), rho.dim).coeffs;
    Eigen::VectorXcd next(v.size() * rho.dim);
    for (int64_t a = 0; a < v.size(); ++a)
      next.segment(a * rho.dim, rho.dim) = v(a) * mode_vec;
    v = std::move(next);
  }
  const double val = (v.adjoint() * rho.rho * v)(0).real();
  return val * std::pow(M_PI, -rho.modes);
}

double heterodyne_povm_value_transformed(const MultimodeDensity& rho,
                                         const PassiveUnitary& u,
                                         const Eigen::VectorXcd& beta,
                                         const Eigen::VectorXcd& xi,
                                         const Eigen::VectorXcd& alpha,
                                         double tol, int max_dim) {
  rho.validate();
  const int m = rho.modes;
  if (u.modes() != m || beta.size() != m || xi.size() != m ||
      alpha.size() != m)
    throw ParameterError("heterodyne_povm_value_transformed: size mismatch");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.rho);

  int work = std::max(rho.dim + 8, 2 * rho.dim);
  double prev = -1.0;
  for (;;) {
    // Per-mode adjoints of S and D on the working space.
    std::vector<Eigen::MatrixXcd> sq_adj(m), disp_adj(m);
    for (int i = 0; i < m; ++i) {
      sq_adj[i] = squeeze_operator(xi(i), work).adjoint();
      disp_adj[i] = displacement_operator(beta(i), work).adjoint();
    }

    double value = 0.0;
    double deficit = 0.0;
    std::unique_ptr<FockInterferometer> itf;  // built once per working size

    for (int r = 0; r < es.eigenvalues().size(); ++r) {
      const double lam = es.eigenvalues()(r);
      if (lam < 1e-14) continue;
      // Embed the eigenvector into the working hypercube.
      Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(ipow(work, m));
      std::vector<int> occ(m);
      for (int64_t idx = 0; idx < rho.rho.rows(); ++idx) {
        int64_t rest = idx;
        for (int i = m - 1; i >= 0; --i) {
          occ[i] = static_cast<int>(rest % rho.dim);
          rest /= rho.dim;
        }
        int64_t big = 0;
        for (int i = 0; i < m; ++i) big = big * work + occ[i];
        psi(big) = es.eigenvectors()(idx, r);
      }
      for (int i = 0; i < m; ++i) {
        apply_single_mode(psi, sq_adj[i], i, m, work);
        apply_single_mode(psi, disp_adj[i], i, m, work);
      }
      if (!itf)
        itf = std::make_unique<FockInterferometer>(u.matrix(), m, work,
                                                   work - 1);
      itf->apply_adjoint(psi, &deficit);

      // Overlap with the analytic coherent vector.
      Eigen::VectorXcd coh = Eigen::VectorXcd::Ones(1);
      for (int i = 0; i < m; ++i) {
        const Eigen::VectorXcd cv = coherent_fock(alpha(i), work);
        Eigen::VectorXcd next(coh.size() * work);
        for (int64_t a2 = 0; a2 < coh.size(); ++a2)
          next.segment(a2 * work, work) = coh(a2) * cv;
        coh = std::move(next);
      }
      const Complex ov = coh.dot(psi);  // conj(coh) . psi
      value += lam * std::norm(ov);
    }
    value *= std::pow(M_PI, -m);

    if (deficit < tol && prev >= 0.0 && std::abs(value - prev) < tol)
      return value;
    if (work >= max_dim) {
      if (deficit > std::sqrt(tol))
        throw TruncationError(
            "heterodyne_povm_value_transformed: deficit " +
                std::to_string(deficit) + " at max working dim",
            deficit);
      return value;
    }
    prev = value;
    work = std::min(max_dim, work + work / 2 + 4);
  }
}

double fidelity_target(const TargetSpec& target, const MultimodeDensity& rho) {
  rho.validate();
  if (target.modes != rho.modes)
    throw ValidationError("fidelity_target: mode count mismatch");
  const TruncatedVector psi = target_state_vector(target, rho.dim);
  const double f = (psi.coeffs.adjoint() * rho.rho * psi.coeffs)(0).real();
  return std::clamp(f, 0.0, 1.0);
}

}  // namespace hetverify
