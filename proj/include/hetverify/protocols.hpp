#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hetverify/estimators.hpp"
#include "hetverify/sampler.hpp"
#include "hetverify/states.hpp"

namespace hetverify {

// Request for a sample-size plan: precision epsilon, failure probability
// delta, M certified copies, per-mode targets and estimator configs.
struct PlanRequest {
  double epsilon = 0.1;
  double delta = 0.1;
  int m_copies = 1;
  std::vector<CoreState> cores;
  std::vector<EstimatorConfig> cfgs;

  void validate() const;
};

struct PlanResult {
  int64_t shots_required = 1;
  std::vector<EstimatorConstants> constants;
  std::string formula_tag;
};

// Split of the N measured shots for the non-i.i.d. post-processing:
// N = N' (estimation) + K (energy test) + Q (discarded).
struct EnergyTestConfig {
  int64_t n_estimate = 0;
  int64_t k_energy = 0;
  int64_t q_discard = 0;
  std::vector<double> e_threshold;   // per mode
  std::vector<int64_t> s_allowance;  // per mode

  void validate(int modes, int64_t shots) const;
};

struct VerificationReport {
  std::vector<double> per_mode_fidelity;
  double witness = 0.0;
  std::optional<double> threshold;       // 1 - lambda + epsilon
  std::optional<bool> accept;
  std::optional<double> tvd_bound;       // present only on accept
  std::map<std::string, double> failure_probabilities;
  std::optional<PlanResult> plan_echo;
};

// ---------------------------------------------------------------------------
// Exact failure-probability formulas (evaluated, not bounded)

// Single-mode i.i.d. formula: 2 exp[-N (eps/M)^(2+2c/p) / K].
double p_iid_single(int64_t shots, double epsilon, int m_copies, int support,
                    int p, double k_big);

// Multimode union bound: sum_i 2 exp[-N eps^(e_i) / ((M m)^(e_i) K_i)],
// e_i = 2 + 2 c_i / p_i.
double p_iid_witness(int64_t shots, double epsilon, int m_copies,
                     const std::vector<int>& supports,
                     const std::vector<int>& ps,
                     const std::vector<double>& k_bigs);

// Two-term Fock-witness formula:
//   2(m-n) exp[-N e^2 eta^2/(2 p^2 m^2)] + 2n exp[-2 N e^2 eta^4/(p^2 (p+1)^2 m^2)]
// with e = epsilon / M.
double p_iid_bs(int64_t shots, double epsilon, int m_copies, int modes,
                int n_photons, const EstimatorConfig& cfg);

// ---------------------------------------------------------------------------
// Protocol operations

// Mean of g_C over the samples, clamped to [0,1], raised to the M-th power.
double protocol1_estimate(std::span<const Complex> samples,
                          const CoreState& target, const EstimatorConfig& cfg,
                          int m_copies);

// Exact inversion of the single-mode i.i.d. formula:
// N = ceil((M/eps)^(2+2c/p) K ln(2/delta)). Requires cfg.eta within the
// admissible cap for (target, eps/M).
PlanResult protocol1_plan(const PlanRequest& req);

// Witness estimation on a batch measured in the target frame: applies the
// verifier transform with the target's U and beta, estimates per-mode
// fidelities, returns W = 1 - sum_i (1 - F_i^M). No accept decision.
// If epsilon is given, the i.i.d. failure probability at the batch size is
// reported.
VerificationReport protocol2_witness(
    const SampleBatch& batch, const TargetSpec& target,
    const std::vector<EstimatorConfig>& cfgs, int m_copies,
    std::optional<double> epsilon = std::nullopt);

// Smallest N with the multimode union-bound formula <= delta (monotone
// bisection on the exact formula).
PlanResult protocol2_plan(const PlanRequest& req);

// Accept/abort verification of a Fock-witness target |1..1 0..0> through U:
// per-mode one-sided Fock estimators (p even), W as above, accept iff
// W >= 1 - lambda + epsilon, total-variation certificate sqrt(lambda) on
// accept.
VerificationReport protocol3_verify(const SampleBatch& batch,
                                    const PassiveUnitary& u, int n_photons,
                                    double lambda, double epsilon,
                                    const EstimatorConfig& cfg, int m_copies);

// Streaming variant: simulates the prover and accumulates the witness in
// fixed-size blocks without materialising the batch.
VerificationReport protocol3_verify_stream(const ProverModel& model,
                                           int64_t shots, uint64_t seed,
                                           int n_photons, double lambda,
                                           double epsilon,
                                           const EstimatorConfig& cfg,
                                           int m_copies);

// Smallest N with the two-term Fock-witness formula <= delta.
PlanResult protocol3_plan(double epsilon, double delta, int modes,
                          int n_photons, const EstimatorConfig& cfg,
                          int m_copies);

// Streaming protocol-1 estimate from a simulated single-mode prover.
double protocol1_estimate_stream(const ProverModel& model, int64_t shots,
                                 uint64_t seed, const CoreState& target,
                                 const EstimatorConfig& cfg, int m_copies);

// ---------------------------------------------------------------------------
// Non-i.i.d. post-processing

struct NoniidOutcome {
  bool aborted = false;
  std::vector<int64_t> exceed_counts;  // R_i per mode
  SampleBatch kept;                    // the N' estimation shots
};

// Seeded random permutation of the shots, discard Q, count per-mode energy
// violations |alpha_i|^2 + 1 > E_i over the K-shot energy block, abort iff
// any R_i > S_i. Operates on the batch as given (verifier frame).
NoniidOutcome noniid_postprocess(const SampleBatch& batch,
                                 const EnergyTestConfig& cfg, uint64_t seed);

struct NoniidParams {
  int64_t n_estimate = 0;  // N'
  int64_t k_energy = 0;    // K
  int64_t q_discard = 0;   // Q
  int m_copies = 1;        // M
  double e_threshold = 0;  // E
  int64_t s_allowance = 0; // S
  double epsilon = 0.1;
  int support = 1;         // c of the target core state
  int p = 1;
  double g_cp = 1.0;       // non-i.i.d. constant of the target
  int modes = 1;           // >1 applies the per-mode union bound at eps/m
};

// The four confidence terms of the non-i.i.d. analysis, evaluated exactly
// (log space where needed): keys "support", "de_finetti", "choice",
// "hoeffding". Domain violations (zero N', vacuous Hoeffding deviation, ...)
// are surfaced as errors, never clamped.
std::map<std::string, double> noniid_confidence(const NoniidParams& params);

// Scaling presets for (N', Q, K, E, S) at given M, epsilon, c, p; the stated
// asymptotic orders with unit constants.
struct NoniidPreset {
  int64_t n_estimate = 0;
  int64_t k_energy = 0;
  int64_t q_discard = 0;
  double e_threshold = 0.0;
  int64_t s_allowance = 0;
};
NoniidPreset noniid_scaling_preset(int m_copies, double epsilon, int support,
                                   int p);

// Energy threshold E with P(|alpha|^2 + 1 > E) = tail_probability under the
// Q function of the Fock state |n> (the radial law Gamma(n+1, 1)).
double energy_quantile(int photon_number, double tail_probability);

// Fuchs-van de Graaf certificate sqrt(1 - F) from a fidelity lower bound.
double tvd_bound(double fidelity_lower_bound);

}  // namespace hetverify
