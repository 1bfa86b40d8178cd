#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hetverify/states.hpp"

namespace hetverify {

// N shots of m-mode heterodyne outcomes, shot-major:
// data[shot * modes + mode].
struct SampleBatch {
  int modes = 1;
  int64_t shots = 0;
  std::vector<Complex> data;
  uint64_t seed = 0;
  std::string prover_tag;

  Complex at(int64_t shot, int mode) const {
    return data[shot * modes + mode];
  }
  void validate() const;
};

// Simulated prover behaviours used to exercise the verifier. Samples are
// always generated in the input frame (balanced heterodyne of the per-mode
// states) and pushed through the forward transform, which reproduces the
// unbalanced heterodyne statistics of the transformed state exactly.
struct ProverModel {
  enum class Kind { kIdeal, kLossy, kSubstitute, kCoherentSpoof, kBlockNoniid };

  Kind kind = Kind::kIdeal;
  TargetSpec target;
  std::vector<double> tau;                        // lossy: per-mode transmissivity
  std::vector<FockDensityMatrix> substitutes;     // substitute: per-mode states
  Eigen::VectorXcd spoof_amplitudes;              // spoof: input-frame means
  int64_t good_count = 0;                         // block_noniid
  std::shared_ptr<const ProverModel> bad_model;   // block_noniid

  static ProverModel ideal(TargetSpec target);
  static ProverModel lossy(TargetSpec target, std::vector<double> tau);
  static ProverModel substitute(TargetSpec target,
                                std::vector<FockDensityMatrix> states);
  // Default amplitudes (empty optional) are the ideal mean field, which is
  // zero for Fock-state cores: the spoof state is then the multimode vacuum.
  static ProverModel coherent_spoof(
      TargetSpec target,
      std::optional<Eigen::VectorXcd> amplitudes = std::nullopt);
  static ProverModel block_noniid(TargetSpec target, int64_t good_count,
                                  ProverModel bad);

  void validate() const;
  std::string tag() const;
};

// i.i.d. draws from the Husimi Q function of a core state, by rejection with
// the Fock-mixture envelope: propose n with probability |c_n|^2, radius^2
// from Gamma(n+1, 1), uniform phase; accept with ratio Q_psi / (s * mixture)
// where s is the number of nonzero amplitudes (Cauchy-Schwarz envelope).
// Shot k draws from the stream keyed by (seed, k).
std::vector<Complex> sample_core_q(const CoreState& state, int64_t shots,
                                   uint64_t seed);

// Mixed-state extension: eigendecompose rho, pick an eigenvector with
// probability its eigenvalue, then draw from its Q function. Eigenvalues in
// [-1e-9, 0) are clipped to zero and the spectrum renormalised.
std::vector<Complex> sample_density_q(const FockDensityMatrix& rho,
                                      int64_t shots, uint64_t seed);

// gamma = U alpha + beta per shot.
SampleBatch forward_transform(const SampleBatch& batch,
                              const PassiveUnitary& u,
                              const Eigen::VectorXcd& beta);

// alpha = U^dag (gamma - beta) per shot; inverse of forward_transform.
SampleBatch verifier_transform(const SampleBatch& batch,
                               const PassiveUnitary& u,
                               const Eigen::VectorXcd& beta);

SampleBatch sample_prover(const ProverModel& model, int64_t shots,
                          uint64_t seed);

// Chunked generator behind sample_prover, reused by streaming verification.
// fill() writes output-frame samples for shots [begin, end) as the columns of
// an m x (end-begin) column-major block.
class ProverSampler {
 public:
  explicit ProverSampler(const ProverModel& model);
  ~ProverSampler();
  ProverSampler(ProverSampler&&) noexcept;

  int modes() const;
  void fill(int64_t begin, int64_t end, uint64_t seed, Complex* out) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace hetverify
