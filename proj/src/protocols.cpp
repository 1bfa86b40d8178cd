#include "hetverify/protocols.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <Eigen/Dense>

#include "hetverify/combinatorics.hpp"
#include "hetverify/parallel.hpp"
#include "hetverify/rng.hpp"

namespace hetverify {

namespace {

constexpr int64_t kBlockShots = 8192;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

struct ModeSums {
  std::vector<double> sum, sum_sq;
  int64_t shots = 0;
};

// Per-mode block-deterministic accumulation over a materialised batch.
ModeSums accumulate_modes(const SampleBatch& batch,
                          const std::vector<GCoreEvaluator>& evals) {
  const int m = batch.modes;
  const int64_t nblocks = (batch.shots + kBlockShots - 1) / kBlockShots;
  std::vector<double> bs(nblocks * m, 0.0), bq(nblocks * m, 0.0);
  parallel_blocks(batch.shots, kBlockShots,
                  [&](int64_t b, int64_t s0, int64_t s1) {
                    const int64_t n = s1 - s0;
                    std::vector<Complex> scratch(n);
                    for (int i = 0; i < m; ++i) {
                      for (int64_t t = 0; t < n; ++t)
                        scratch[t] = batch.data[(s0 + t) * m + i];
                      double su = 0.0, sq = 0.0;
                      evals[i].accumulate(scratch.data(), n, su, sq);
                      bs[b * m + i] = su;
                      bq[b * m + i] = sq;
                    }
                  });
  ModeSums out;
  out.sum.assign(m, 0.0);
  out.sum_sq.assign(m, 0.0);
  out.shots = batch.shots;
  for (int64_t b = 0; b < nblocks; ++b)
    for (int i = 0; i < m; ++i) {
      out.sum[i] += bs[b * m + i];
      out.sum_sq[i] += bq[b * m + i];
    }
  return out;
}

// Same accumulation, streaming from a simulated prover through the verifier
// transform, block by block.
ModeSums stream_modes(const ProverModel& model, int64_t shots, uint64_t seed,
                      const PassiveUnitary& u, const Eigen::VectorXcd& beta,
                      const std::vector<GCoreEvaluator>& evals) {
  const int m = u.modes();
  const ProverSampler sampler(model);
  if (sampler.modes() != m)
    throw ValidationError("stream: prover/verifier mode mismatch");
  const int64_t nblocks = (shots + kBlockShots - 1) / kBlockShots;
  std::vector<double> bs(nblocks * m, 0.0), bq(nblocks * m, 0.0);
  const Eigen::MatrixXcd u_adj = u.matrix().adjoint();
  const bool trivial_frame =
      (u.matrix() - Eigen::MatrixXcd::Identity(m, m)).cwiseAbs().maxCoeff() ==
          0.0 &&
      beta.cwiseAbs().maxCoeff() == 0.0;

  parallel_blocks(shots, kBlockShots, [&](int64_t b, int64_t s0, int64_t s1) {
    const int64_t n = s1 - s0;
    Eigen::MatrixXcd block(m, n);
    sampler.fill(s0, s1, seed, block.data());
    if (!trivial_frame) {
      block.colwise() -= beta;
      block = u_adj * block;
    }
    Eigen::MatrixXcd cols = block.transpose();  // shot-major per mode
    for (int i = 0; i < m; ++i) {
      double su = 0.0, sq = 0.0;
      evals[i].accumulate(cols.col(i).data(), n, su, sq);
      bs[b * m + i] = su;
      bq[b * m + i] = sq;
    }
  });
  ModeSums out;
  out.sum.assign(m, 0.0);
  out.sum_sq.assign(m, 0.0);
  out.shots = shots;
  for (int64_t b = 0; b < nblocks; ++b)
    for (int i = 0; i < m; ++i) {
      out.sum[i] += bs[b * m + i];
      out.sum_sq[i] += bq[b * m + i];
    }
  return out;
}

// Smallest N >= 1 with p(N) <= delta, for monotone nonincreasing p.
int64_t invert_failure(const std::function<double(int64_t)>& p, double delta) {
  if (p(1) <= delta) return 1;
  int64_t hi = 2;
  while (p(hi) > delta) {
    if (hi > (int64_t{1} << 61))
      throw NumericError("planner: required N exceeds 2^62");
    hi *= 2;
  }
  int64_t lo = hi / 2;  // p(lo) > delta
  while (hi - lo > 1) {
    const int64_t mid = lo + (hi - lo) / 2;
    (p(mid) <= delta ? hi : lo) = mid;
  }
  return hi;
}

void check_bs_params(double lambda, double epsilon, const EstimatorConfig& cfg,
                     int modes, int n_photons) {
  cfg.validate();
  if (cfg.p % 2 != 0)
    throw ParameterError(
        "one-sided Fock witness requires an even estimator order p");
  if (!(epsilon > 0.0) || !(epsilon < lambda) || !(lambda <= 1.0))
    throw ParameterError("require 0 < epsilon < lambda <= 1");
  if (n_photons < 0 || n_photons > modes)
    throw ParameterError("require 0 <= photons <= modes");
}

std::vector<GCoreEvaluator> bs_evaluators(int modes, int n_photons,
                                          const EstimatorConfig& cfg) {
  const GCoreEvaluator one(CoreState::fock(1), cfg);
  const GCoreEvaluator zero(CoreState::fock(0), cfg);
  std::vector<GCoreEvaluator> evals;
  evals.reserve(modes);
  for (int i = 0; i < modes; ++i)
    evals.push_back(i < n_photons ? one : zero);
  return evals;
}

VerificationReport finalize_bs(const ModeSums& sums, int modes, int n_photons,
                               double lambda, double epsilon,
                               const EstimatorConfig& cfg, int m_copies) {
  VerificationReport rep;
  double w = 1.0;
  for (int i = 0; i < modes; ++i) {
    const double f =
        std::pow(clamp01(sums.sum[i] / sums.shots), m_copies);
    rep.per_mode_fidelity.push_back(f);
    w -= 1.0 - f;
  }
  rep.witness = w;
  rep.threshold = 1.0 - lambda + epsilon;
  rep.accept = (w >= *rep.threshold);
  if (*rep.accept) rep.tvd_bound = std::sqrt(lambda);
  rep.failure_probabilities["bs_iid"] =
      p_iid_bs(sums.shots, epsilon, m_copies, modes, n_photons, cfg);
  return rep;
}

uint64_t bounded_uniform(ShotRng& rng, uint64_t n) {
  // Power-of-two rejection; exact and platform independent.
  if (n <= 1) return 0;
  const int bits = 64 - std::countl_zero(n - 1);
  for (;;) {
    const uint64_t v = rng.next() >> (64 - bits);
    if (v < n) return v;
  }
}

}  // namespace

void PlanRequest::validate() const {
  if (!(epsilon > 0.0)) throw ParameterError("plan: epsilon must be > 0");
  if (!(delta > 0.0) || !(delta < 1.0))
    throw ParameterError("plan: delta must lie in (0, 1)");
  if (m_copies < 1) throw ParameterError("plan: m_copies must be >= 1");
  if (cores.empty() || cores.size() != cfgs.size())
    throw ParameterError("plan: need one estimator config per target mode");
  for (const auto& cfg : cfgs) cfg.validate();
}

void EnergyTestConfig::validate(int modes, int64_t shots) const {
  if (n_estimate < 0 || k_energy < 0 || q_discard < 0)
    throw ParameterError("energy test: negative block size");
  if (n_estimate + k_energy + q_discard != shots)
    throw ParameterError("energy test: N' + K + Q must equal the shot count");
  if (static_cast<int>(e_threshold.size()) != modes ||
      static_cast<int>(s_allowance.size()) != modes)
    throw ParameterError("energy test: per-mode threshold lists must match modes");
  for (double e : e_threshold)
    if (!(e >= 0.0)) throw ParameterError("energy test: E must be >= 0");
  for (int64_t s : s_allowance)
    if (s < 0) throw ParameterError("energy test: S must be >= 0");
}

double p_iid_single(int64_t shots, double epsilon, int m_copies, int support,
                    int p, double k_big) {
  const double e = 2.0 + 2.0 * support / static_cast<double>(p);
  return 2.0 * std::exp(-shots * std::pow(epsilon / m_copies, e) / k_big);
}

double p_iid_witness(int64_t shots, double epsilon, int m_copies,
                     const std::vector<int>& supports,
                     const std::vector<int>& ps,
                     const std::vector<double>& k_bigs) {
  const size_t m = supports.size();
  if (ps.size() != m || k_bigs.size() != m)
    throw ParameterError("p_iid_witness: per-mode list size mismatch");
  double total = 0.0;
  for (size_t i = 0; i < m; ++i) {
    const double e = 2.0 + 2.0 * supports[i] / static_cast<double>(ps[i]);
    total += 2.0 * std::exp(-shots *
                            std::pow(epsilon / (m_copies * static_cast<double>(m)), e) /
                            k_bigs[i]);
  }
  return total;
}

double p_iid_bs(int64_t shots, double epsilon, int m_copies, int modes,
                int n_photons, const EstimatorConfig& cfg) {
  cfg.validate();
  const double e = epsilon / m_copies;
  const double p = cfg.p;
  const double eta = cfg.eta;
  const double m2 = static_cast<double>(modes) * modes;
  const double a_vac = e * e * eta * eta / (2.0 * p * p * m2);
  const double a_one =
      2.0 * e * e * eta * eta * eta * eta / (p * p * (p + 1.0) * (p + 1.0) * m2);
  return 2.0 * (modes - n_photons) * std::exp(-shots * a_vac) +
         2.0 * n_photons * std::exp(-shots * a_one);
}

double protocol1_estimate(std::span<const Complex> samples,
                          const CoreState& target, const EstimatorConfig& cfg,
                          int m_copies) {
  if (samples.empty()) throw ParameterError("protocol1_estimate: no samples");
  if (m_copies < 1) throw ParameterError("protocol1_estimate: m_copies < 1");
  const GCoreEvaluator eval(target, cfg);
  double sum = 0.0, sum_sq = 0.0;
  eval.accumulate(samples.data(), static_cast<int64_t>(samples.size()), sum,
                  sum_sq);
  return std::pow(clamp01(sum / samples.size()), m_copies);
}

double protocol1_estimate_stream(const ProverModel& model, int64_t shots,
                                 uint64_t seed, const CoreState& target,
                                 const EstimatorConfig& cfg, int m_copies) {
  if (shots < 1) throw ParameterError("protocol1_estimate_stream: no samples");
  std::vector<GCoreEvaluator> evals{GCoreEvaluator(target, cfg)};
  const ModeSums sums =
      stream_modes(model, shots, seed, model.target.unitary, model.target.beta,
                   evals);
  return std::pow(clamp01(sums.sum[0] / shots), m_copies);
}

PlanResult protocol1_plan(const PlanRequest& req) {
  req.validate();
  if (req.cores.size() != 1)
    throw ParameterError("protocol1_plan: expects a single-mode target");
  const CoreState& core = req.cores[0];
  const EstimatorConfig& cfg = req.cfgs[0];
  const EstimatorConstants consts =
      constants_for(core, cfg, req.epsilon, req.m_copies);
  if (cfg.eta > consts.eta_max * (1.0 + 1e-12))
    throw ParameterError(
        "protocol1_plan: eta " + std::to_string(cfg.eta) +
        " exceeds the admissible cap " + std::to_string(consts.eta_max) +
        " for this target and precision");

  const int c = core.support();
  const double e = 2.0 + 2.0 * c / static_cast<double>(cfg.p);
  const double x = std::pow(req.m_copies / req.epsilon, e) * consts.k_big *
                   std::log(2.0 / req.delta);
  int64_t n = std::max<int64_t>(1, static_cast<int64_t>(std::ceil(x)));
  const auto p_at = [&](int64_t nn) {
    return p_iid_single(nn, req.epsilon, req.m_copies, c, cfg.p, consts.k_big);
  };
  while (p_at(n) > req.delta) ++n;  // guard against ceil roundoff
  while (n > 1 && p_at(n - 1) <= req.delta) --n;

  PlanResult out;
  out.shots_required = n;
  out.constants = {consts};
  out.formula_tag = "fe-closed-form";
  return out;
}

VerificationReport protocol2_witness(const SampleBatch& batch,
                                     const TargetSpec& target,
                                     const std::vector<EstimatorConfig>& cfgs,
                                     int m_copies,
                                     std::optional<double> epsilon) {
  target.validate();
  batch.validate();
  if (batch.modes != target.modes)
    throw ValidationError("protocol2_witness: batch/target mode mismatch");
  if (static_cast<int>(cfgs.size()) != target.modes)
    throw ParameterError("protocol2_witness: one estimator config per mode");
  if (m_copies < 1) throw ParameterError("protocol2_witness: m_copies < 1");
  if (batch.shots < 1) throw ParameterError("protocol2_witness: empty batch");

  const SampleBatch transformed =
      verifier_transform(batch, target.unitary, target.beta);
  std::vector<GCoreEvaluator> evals;
  for (int i = 0; i < target.modes; ++i)
    evals.emplace_back(target.core_states[i], cfgs[i]);
  const ModeSums sums = accumulate_modes(transformed, evals);

  VerificationReport rep;
  double w = 1.0;
  for (int i = 0; i < target.modes; ++i) {
    const double f = std::pow(clamp01(sums.sum[i] / sums.shots), m_copies);
    rep.per_mode_fidelity.push_back(f);
    w -= 1.0 - f;
  }
  rep.witness = w;
  if (epsilon) {
    std::vector<int> supports, ps;
    std::vector<double> ks;
    for (int i = 0; i < target.modes; ++i) {
      supports.push_back(target.core_states[i].support());
      ps.push_back(cfgs[i].p);
      ks.push_back(constants_for(target.core_states[i], cfgs[i],
                                 *epsilon / target.modes, m_copies)
                       .k_big);
    }
    rep.failure_probabilities["witness_iid"] =
        p_iid_witness(batch.shots, *epsilon, m_copies, supports, ps, ks);
  }
  return rep;
}

PlanResult protocol2_plan(const PlanRequest& req) {
  req.validate();
  const int m = static_cast<int>(req.cores.size());
  std::vector<int> supports, ps;
  std::vector<double> ks;
  PlanResult out;
  for (int i = 0; i < m; ++i) {
    const EstimatorConstants consts = constants_for(
        req.cores[i], req.cfgs[i], req.epsilon / m, req.m_copies);
    if (req.cfgs[i].eta > consts.eta_max * (1.0 + 1e-12))
      throw ParameterError("protocol2_plan: eta for mode " + std::to_string(i) +
                           " exceeds the admissible cap " +
                           std::to_string(consts.eta_max));
    supports.push_back(req.cores[i].support());
    ps.push_back(req.cfgs[i].p);
    ks.push_back(consts.k_big);
    out.constants.push_back(consts);
  }
  out.shots_required = invert_failure(
      [&](int64_t n) {
        return p_iid_witness(n, req.epsilon, req.m_copies, supports, ps, ks);
      },
      req.delta);
  out.formula_tag = "witness-union-bisection";
  return out;
}

VerificationReport protocol3_verify(const SampleBatch& batch,
                                    const PassiveUnitary& u, int n_photons,
                                    double lambda, double epsilon,
                                    const EstimatorConfig& cfg, int m_copies) {
  batch.validate();
  check_bs_params(lambda, epsilon, cfg, batch.modes, n_photons);
  if (u.modes() != batch.modes)
    throw ValidationError("protocol3_verify: batch/unitary mode mismatch");
  if (m_copies < 1) throw ParameterError("protocol3_verify: m_copies < 1");
  if (batch.shots < 1) throw ParameterError("protocol3_verify: empty batch");

  const SampleBatch transformed =
      verifier_transform(batch, u, Eigen::VectorXcd::Zero(batch.modes));
  const ModeSums sums =
      accumulate_modes(transformed, bs_evaluators(batch.modes, n_photons, cfg));
  return finalize_bs(sums, batch.modes, n_photons, lambda, epsilon, cfg,
                     m_copies);
}

VerificationReport protocol3_verify_stream(const ProverModel& model,
                                           int64_t shots, uint64_t seed,
                                           int n_photons, double lambda,
                                           double epsilon,
                                           const EstimatorConfig& cfg,
                                           int m_copies) {
  const int m = model.target.modes;
  check_bs_params(lambda, epsilon, cfg, m, n_photons);
  if (m_copies < 1) throw ParameterError("protocol3_verify_stream: m_copies < 1");
  if (shots < 1) throw ParameterError("protocol3_verify_stream: empty run");
  const ModeSums sums =
      stream_modes(model, shots, seed, model.target.unitary,
                   Eigen::VectorXcd::Zero(m), bs_evaluators(m, n_photons, cfg));
  return finalize_bs(sums, m, n_photons, lambda, epsilon, cfg, m_copies);
}

PlanResult protocol3_plan(double epsilon, double delta, int modes,
                          int n_photons, const EstimatorConfig& cfg,
                          int m_copies) {
  check_bs_params(/*lambda=*/1.0, epsilon, cfg, modes, n_photons);
  if (!(delta > 0.0) || !(delta < 1.0))
    throw ParameterError("protocol3_plan: delta must lie in (0, 1)");
  if (m_copies < 1) throw ParameterError("protocol3_plan: m_copies < 1");

  PlanResult out;
  out.shots_required = invert_failure(
      [&](int64_t n) {
        return p_iid_bs(n, epsilon, m_copies, modes, n_photons, cfg);
      },
      delta);
  for (int i = 0; i < modes; ++i)
    out.constants.push_back(constants_for(
        CoreState::fock(i < n_photons ? 1 : 0), cfg, epsilon / modes,
        m_copies));
  out.formula_tag = "bs-two-term-bisection";
  return out;
}

NoniidOutcome noniid_postprocess(const SampleBatch& batch,
                                 const EnergyTestConfig& cfg, uint64_t seed) {
  batch.validate();
  cfg.validate(batch.modes, batch.shots);
  const int m = batch.modes;

  // Seeded Fisher-Yates permutation of the shot indices.
  std::vector<int64_t> perm(batch.shots);
  for (int64_t i = 0; i < batch.shots; ++i) perm[i] = i;
  ShotRng rng(seed, 0x5u);
  for (int64_t i = batch.shots - 1; i > 0; --i) {
    const int64_t j = static_cast<int64_t>(
        bounded_uniform(rng, static_cast<uint64_t>(i + 1)));
    std::swap(perm[i], perm[j]);
  }

  NoniidOutcome out;
  out.exceed_counts.assign(m, 0);
  for (int64_t k = cfg.n_estimate; k < cfg.n_estimate + cfg.k_energy; ++k) {
    const int64_t shot = perm[k];
    for (int i = 0; i < m; ++i) {
      if (std::norm(batch.at(shot, i)) + 1.0 > cfg.e_threshold[i])
        ++out.exceed_counts[i];
    }
  }
  for (int i = 0; i < m; ++i)
    if (out.exceed_counts[i] > cfg.s_allowance[i]) out.aborted = true;

  out.kept.modes = m;
  out.kept.shots = cfg.n_estimate;
  out.kept.seed = batch.seed;
  out.kept.prover_tag = batch.prover_tag;
  out.kept.data.resize(static_cast<size_t>(cfg.n_estimate) * m);
  for (int64_t k = 0; k < cfg.n_estimate; ++k)
    for (int i = 0; i < m; ++i)
      out.kept.data[k * m + i] = batch.at(perm[k], i);
  return out;
}

std::map<std::string, double> noniid_confidence(const NoniidParams& prm) {
  if (prm.n_estimate < 1)
    throw ParameterError("noniid_confidence: N' must be >= 1");
  if (prm.k_energy < 1)
    throw ParameterError("noniid_confidence: K must be >= 1");
  if (prm.q_discard < 0 || prm.s_allowance < 0)
    throw ParameterError("noniid_confidence: negative Q or S");
  if (prm.m_copies < 1 || prm.support < 1 || prm.p < 1 || prm.modes < 1)
    throw ParameterError("noniid_confidence: bad M/c/p/modes");
  if (!(prm.epsilon > 0.0) || !(prm.g_cp > 0.0))
    throw ParameterError("noniid_confidence: epsilon and G must be > 0");
  if (!(prm.e_threshold >= 0.0))
    throw ParameterError("noniid_confidence: E must be >= 0");

  const double np = static_cast<double>(prm.n_estimate);
  const double k = static_cast<double>(prm.k_energy);
  const double q = static_cast<double>(prm.q_discard);
  const double mm = static_cast<double>(prm.m_copies);
  const double s = static_cast<double>(prm.s_allowance);
  const double e_cap = prm.e_threshold;
  const double eps = prm.epsilon / prm.modes;  // per-mode union bound
  const double n_tot = np + mm + q;

  const double dev_support = q / (4.0 * n_tot) - 2.0 * s / k;
  const double p_support =
      8.0 * std::pow(k, 1.5) * std::exp(-(k / 9.0) * dev_support * dev_support);

  double p_definetti;
  if (q == 0.0) {
    p_definetti = (e_cap == 0.0) ? 1.0 : 0.0;
  } else {
    p_definetti = std::exp(0.5 * e_cap * e_cap * std::log(q / 4.0) -
                           q * (q + 4.0) / (8.0 * n_tot));
  }

  const double p_choice = mm * (q + mm - 1.0) / (np + mm);

  const double cp = static_cast<double>(prm.support) / prm.p;
  const double dev_hoeff =
      std::pow(eps, 1.0 + cp) / prm.g_cp - 2.0 * q * std::pow(mm, 1.0 + cp) / np;
  if (dev_hoeff < 0.0)
    throw ParameterError(
        "noniid_confidence: Hoeffding deviation negative (N' too small "
        "relative to Q); the bound is vacuous here");
  const double log_hoeff =
      std::log(2.0) + log_binomial_big(np + mm, q) -
      (np + mm - q) / (2.0 * std::pow(mm, 2.0 + 2.0 * cp)) * dev_hoeff *
          dev_hoeff;
  const double p_hoeff = std::exp(log_hoeff);

  const double u = static_cast<double>(prm.modes);
  std::map<std::string, double> out;
  out["support"] = u * p_support;
  out["de_finetti"] = u * p_definetti;
  out["choice"] = u * p_choice;
  out["hoeffding"] = u * p_hoeff;
  for (const auto& [name, value] : out)
    if (std::isnan(value))
      throw NumericError("noniid_confidence: " + name + " evaluated to NaN");
  return out;
}

NoniidPreset noniid_scaling_preset(int m_copies, double epsilon, int support,
                                   int p) {
  if (m_copies < 1 || support < 1 || p < 1 || !(epsilon > 0.0))
    throw ParameterError("noniid_scaling_preset: bad parameters");
  const double mm = m_copies;
  const double cp = static_cast<double>(support) / p;
  const double np = std::pow(mm, 7.0 + 4.0 * cp) / std::pow(epsilon, 4.0 + 4.0 * cp);
  const double q = std::pow(mm, 4.0 + 2.0 * cp) / std::pow(epsilon, 2.0 + 2.0 * cp);
  if (np > 4.0e18 || q > 4.0e18)
    throw ParameterError(
        "noniid_scaling_preset: counts exceed 64-bit range; evaluate the "
        "formulas directly");
  NoniidPreset out;
  out.n_estimate = static_cast<int64_t>(std::ceil(np));
  out.q_discard = static_cast<int64_t>(std::ceil(q));
  out.k_energy = out.n_estimate;
  out.e_threshold = std::max(4.0, std::ceil(3.0 * std::log(mm + 1.0)));
  out.s_allowance =
      static_cast<int64_t>(std::ceil(std::pow(static_cast<double>(out.q_discard), 2.0 / 3.0)));
  return out;
}

double energy_quantile(int photon_number, double tail_probability) {
  if (photon_number < 0 || photon_number > kDefaultIndexGuard)
    throw ParameterError("energy_quantile: photon number out of range");
  if (!(tail_probability > 0.0) || !(tail_probability < 1.0))
    throw ParameterError("energy_quantile: tail probability must lie in (0,1)");
  // Survival of Gamma(n+1, 1): exp(-x) sum_{j<=n} x^j / j!.
  const auto survival = [&](double x) {
    double term = 1.0, sum = 1.0;
    for (int j = 1; j <= photon_number; ++j) {
      term *= x / j;
      sum += term;
    }
    return std::exp(-x) * sum;
  };
  double hi = 1.0;
  while (survival(hi) > tail_probability) {
    hi *= 2.0;
    if (hi > 1e9) throw NumericError("energy_quantile: no convergence");
  }
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (survival(mid) > tail_probability ? lo : hi) = mid;
  }
  return 1.0 + 0.5 * (lo + hi);
}

double tvd_bound(double fidelity_lower_bound) {
  if (!(fidelity_lower_bound >= -1e-12) ||
      !(fidelity_lower_bound <= 1.0 + 1e-12))
    throw ParameterError("tvd_bound: fidelity must lie in [0, 1]");
  return std::sqrt(1.0 - clamp01(fidelity_lower_bound));
}

}  // namespace hetverify
