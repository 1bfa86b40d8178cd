#include "hetverify/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "hetverify/combinatorics.hpp"
#include "hetverify/parallel.hpp"
#include "hetverify/rng.hpp"

namespace hetverify {

namespace {

constexpr int64_t kBlockShots = 8192;
constexpr int64_t kMaxConsecutiveRejections = 1'000'000;

// Rejection sampler for the Q function of a single core state.
class CoreQSampler {
 public:
  explicit CoreQSampler(const CoreState& state) {
    const auto& c = state.coefficients();
    for (int n = 0; n < state.support(); ++n) {
      if (c[n] == Complex(0.0)) continue;
      ns_.push_back(n);
      probs_.push_back(std::norm(c[n]));
      amp_.push_back(c[n] / std::sqrt(factorial(n)));
      inv_fact_.push_back(1.0 / factorial(n));
    }
    double acc = 0.0;
    cdf_.reserve(probs_.size());
    for (double p : probs_) {
      acc += p;
      cdf_.push_back(acc);
    }
    cdf_.back() = 1.0;
    envelope_ = static_cast<double>(ns_.size());
  }

  Complex draw(ShotRng& rng) const {
    const bool single = ns_.size() == 1;
    for (int64_t attempt = 0; attempt < kMaxConsecutiveRejections; ++attempt) {
      int idx = 0;
      if (!single) {
        const double u = rng.uniform();
        while (cdf_[idx] < u) ++idx;
      }
      const double x = rng.gamma_int(ns_[idx] + 1);
      const Complex alpha = std::sqrt(x) * rng.unit_circle();
      if (single) return alpha;

      // Q_psi / (s * mixture); the exp(-|alpha|^2)/pi factors cancel.
      const Complex ac = std::conj(alpha);
      Complex poly = 0.0;
      double mixture = 0.0;
      for (size_t t = 0; t < ns_.size(); ++t) {
        Complex pw = 1.0;
        for (int e = 0; e < ns_[t]; ++e) pw *= ac;
        poly += amp_[t] * pw;
        double xp = 1.0;
        for (int e = 0; e < ns_[t]; ++e) xp *= x;
        mixture += probs_[t] * xp * inv_fact_[t];
      }
      const double ratio = std::norm(poly) / (envelope_ * mixture);
      if (rng.uniform() < ratio) return alpha;
    }
    throw NumericError(
        "sample_core_q: acceptance starvation, envelope invariant broken");
  }

 private:
  std::vector<int> ns_;
  std::vector<double> probs_;
  std::vector<double> cdf_;
  std::vector<Complex> amp_;      // c_n / sqrt(n!)
  std::vector<double> inv_fact_;  // 1 / n!
  double envelope_ = 1.0;
};

// Eigen-mixture sampler for a density matrix.
class DensityQSampler {
 public:
  explicit DensityQSampler(const FockDensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix());
    std::vector<double> lams;
    for (int r = 0; r < es.eigenvalues().size(); ++r) {
      double lam = es.eigenvalues()(r);
      if (lam < -1e-9)
        throw ValidationError("sample_density_q: state is not PSD");
      lam = std::max(lam, 0.0);
      if (lam < 1e-15) continue;
      lams.push_back(lam);
      Eigen::VectorXcd v = es.eigenvectors().col(r);
      v /= v.norm();
      std::vector<Complex> coeffs(v.data(), v.data() + v.size());
      components_.emplace_back(CoreState(std::move(coeffs)));
    }
    const double total = std::accumulate(lams.begin(), lams.end(), 0.0);
    double acc = 0.0;
    for (double lam : lams) {
      acc += lam / total;
      cdf_.push_back(acc);
    }
    cdf_.back() = 1.0;
  }

  Complex draw(ShotRng& rng) const {
    int idx = 0;
    if (cdf_.size() > 1) {
      const double u = rng.uniform();
      while (cdf_[idx] < u) ++idx;
    }
    return components_[idx].draw(rng);
  }

 private:
  std::vector<CoreQSampler> components_;
  std::vector<double> cdf_;
};

}  // namespace

void SampleBatch::validate() const {
  if (modes < 1) throw ValidationError("sample batch: modes must be >= 1");
  if (shots < 0 || data.size() != static_cast<size_t>(shots) * modes)
    throw ValidationError(
        "sample batch: data size does not match (shots, modes)");
  for (const auto& v : data)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw ValidationError("sample batch: non-finite entry");
}

ProverModel ProverModel::ideal(TargetSpec target) {
  ProverModel m;
  m.kind = Kind::kIdeal;
  m.target = std::move(target);
  m.validate();
  return m;
}

ProverModel ProverModel::lossy(TargetSpec target, std::vector<double> tau) {
  ProverModel m;
  m.kind = Kind::kLossy;
  m.target = std::move(target);
  m.tau = std::move(tau);
  m.validate();
  return m;
}

ProverModel ProverModel::substitute(TargetSpec target,
                                    std::vector<FockDensityMatrix> states) {
  ProverModel m;
  m.kind = Kind::kSubstitute;
  m.target = std::move(target);
  m.substitutes = std::move(states);
  m.validate();
  return m;
}

ProverModel ProverModel::coherent_spoof(
    TargetSpec target, std::optional<Eigen::VectorXcd> amplitudes) {
  ProverModel m;
  m.kind = Kind::kCoherentSpoof;
  m.target = std::move(target);
  m.spoof_amplitudes =
      amplitudes.value_or(Eigen::VectorXcd::Zero(m.target.modes));
  m.validate();
  return m;
}

ProverModel ProverModel::block_noniid(TargetSpec target, int64_t good_count,
                                      ProverModel bad) {
  ProverModel m;
  m.kind = Kind::kBlockNoniid;
  m.target = std::move(target);
  m.good_count = good_count;
  m.bad_model = std::make_shared<const ProverModel>(std::move(bad));
  m.validate();
  return m;
}

void ProverModel::validate() const {
  target.validate();
  switch (kind) {
    case Kind::kIdeal:
      break;
    case Kind::kLossy:
      if (static_cast<int>(tau.size()) != target.modes)
        throw ValidationError("prover: tau list length must equal modes");
      for (double t : tau)
        if (!(t >= 0.0 && t <= 1.0))
          throw ParameterError("prover: transmissivity outside [0, 1]");
      break;
    case Kind::kSubstitute:
      if (static_cast<int>(substitutes.size()) != target.modes)
        throw ValidationError(
            "prover: substitute list length must equal modes");
      break;
    case Kind::kCoherentSpoof:
      if (spoof_amplitudes.size() != target.modes)
        throw ValidationError(
            "prover: amplitude list length must equal modes");
      break;
    case Kind::kBlockNoniid:
      if (good_count < 0) throw ParameterError("prover: good_count < 0");
      if (!bad_model) throw ValidationError("prover: missing bad model");
      bad_model->validate();
      if (bad_model->target.modes != target.modes)
        throw ValidationError("prover: bad model mode count mismatch");
      break;
  }
}

std::string ProverModel::tag() const {
  switch (kind) {
    case Kind::kIdeal:
      return "ideal";
    case Kind::kLossy: {
      std::string s = "lossy:";
      for (size_t i = 0; i < tau.size(); ++i)
        s += (i ? "," : "") + std::to_string(tau[i]);
      return s;
    }
    case Kind::kSubstitute:
      return "substitute";
    case Kind::kCoherentSpoof:
      return "coherent_spoof";
    case Kind::kBlockNoniid:
      return "block_noniid:" + std::to_string(good_count) + ":" +
             bad_model->tag();
  }
  return "unknown";
}

std::vector<Complex> sample_core_q(const CoreState& state, int64_t shots,
                                   uint64_t seed) {
  if (shots < 0) throw ParameterError("sample_core_q: negative shot count");
  CoreQSampler sampler(state);
  std::vector<Complex> out(shots);
  parallel_blocks(shots, kBlockShots, [&](int64_t, int64_t begin, int64_t end) {
    for (int64_t s = begin; s < end; ++s) {
      ShotRng rng(seed, static_cast<uint64_t>(s));
      out[s] = sampler.draw(rng);
    }
  });
  return out;
}

std::vector<Complex> sample_density_q(const FockDensityMatrix& rho,
                                      int64_t shots, uint64_t seed) {
  if (shots < 0) throw ParameterError("sample_density_q: negative shot count");
  DensityQSampler sampler(rho);
  std::vector<Complex> out(shots);
  parallel_blocks(shots, kBlockShots, [&](int64_t, int64_t begin, int64_t end) {
    for (int64_t s = begin; s < end; ++s) {
      ShotRng rng(seed, static_cast<uint64_t>(s));
      out[s] = sampler.draw(rng);
    }
  });
  return out;
}

namespace {

SampleBatch transform_batch(const SampleBatch& batch, const PassiveUnitary& u,
                            const Eigen::VectorXcd& beta, bool forward) {
  batch.validate();
  if (u.modes() != batch.modes || beta.size() != batch.modes)
    throw ValidationError("transform: mode count mismatch");
  SampleBatch out = batch;
  const int m = batch.modes;
  const Eigen::MatrixXcd mat = forward ? u.matrix() : u.matrix().adjoint();
  parallel_blocks(batch.shots, kBlockShots,
                  [&](int64_t, int64_t begin, int64_t end) {
                    const int64_t cols = end - begin;
                    Eigen::Map<const Eigen::MatrixXcd> in(
                        batch.data.data() + begin * m, m, cols);
                    Eigen::Map<Eigen::MatrixXcd> dst(
                        out.data.data() + begin * m, m, cols);
                    if (forward) {
                      dst.noalias() = mat * in;
                      dst.colwise() += beta;
                    } else {
                      dst.noalias() = mat * (in.colwise() - beta);
                    }
                  });
  return out;
}

}  // namespace

SampleBatch forward_transform(const SampleBatch& batch, const PassiveUnitary& u,
                              const Eigen::VectorXcd& beta) {
  return transform_batch(batch, u, beta, true);
}

SampleBatch verifier_transform(const SampleBatch& batch,
                               const PassiveUnitary& u,
                               const Eigen::VectorXcd& beta) {
  return transform_batch(batch, u, beta, false);
}

// ---------------------------------------------------------------------------

struct ProverSampler::Impl {
  ProverModel model;
  int modes = 1;
  bool identity_frame = false;  // U = 1 and beta = 0: skip the GEMM
  std::vector<CoreQSampler> core_samplers;        // ideal
  std::vector<DensityQSampler> density_samplers;  // lossy / substitute
  std::unique_ptr<ProverSampler> good, bad;       // block_noniid

  explicit Impl(const ProverModel& m) : model(m) {
    model.validate();
    modes = model.target.modes;
    const Eigen::MatrixXcd& u = model.target.unitary.matrix();
    identity_frame =
        (u - Eigen::MatrixXcd::Identity(modes, modes)).cwiseAbs().maxCoeff() ==
            0.0 &&
        model.target.beta.cwiseAbs().maxCoeff() == 0.0;

    switch (model.kind) {
      case ProverModel::Kind::kIdeal:
        for (const auto& c : model.target.core_states)
          core_samplers.emplace_back(c);
        break;
      case ProverModel::Kind::kLossy:
        for (int i = 0; i < modes; ++i) {
          const FockDensityMatrix pure =
              FockDensityMatrix::from_core(model.target.core_states[i]);
          density_samplers.emplace_back(apply_loss(pure, model.tau[i]));
        }
        break;
      case ProverModel::Kind::kSubstitute:
        for (const auto& s : model.substitutes) density_samplers.emplace_back(s);
        break;
      case ProverModel::Kind::kCoherentSpoof:
        break;
      case ProverModel::Kind::kBlockNoniid:
        good =
            std::make_unique<ProverSampler>(ProverModel::ideal(model.target));
        bad = std::make_unique<ProverSampler>(*model.bad_model);
        break;
    }
  }

  void fill_input_frame(int64_t begin, int64_t end, uint64_t seed,
                        Complex* out) const {
    const int64_t cols = end - begin;
    for (int64_t c = 0; c < cols; ++c) {
      ShotRng rng(seed, static_cast<uint64_t>(begin + c));
      Complex* col = out + c * modes;
      switch (model.kind) {
        case ProverModel::Kind::kIdeal:
          for (int i = 0; i < modes; ++i) col[i] = core_samplers[i].draw(rng);
          break;
        case ProverModel::Kind::kLossy:
        case ProverModel::Kind::kSubstitute:
          for (int i = 0; i < modes; ++i) col[i] = density_samplers[i].draw(rng);
          break;
        case ProverModel::Kind::kCoherentSpoof:
          for (int i = 0; i < modes; ++i)
            col[i] = model.spoof_amplitudes(i) + rng.complex_gaussian();
          break;
        case ProverModel::Kind::kBlockNoniid:
          break;  // handled in fill()
      }
    }
  }
};

ProverSampler::ProverSampler(const ProverModel& model)
    : impl_(std::make_unique<Impl>(model)) {}
ProverSampler::~ProverSampler() = default;
ProverSampler::ProverSampler(ProverSampler&&) noexcept = default;

int ProverSampler::modes() const { return impl_->modes; }

void ProverSampler::fill(int64_t begin, int64_t end, uint64_t seed,
                         Complex* out) const {
  if (end <= begin) return;
  const int m = impl_->modes;

  if (impl_->model.kind == ProverModel::Kind::kBlockNoniid) {
    // First good_count shots from the ideal prover, the rest from the bad
    // model; shot streams are keyed by absolute index either way.
    const int64_t split = std::clamp(impl_->model.good_count, begin, end);
    if (split > begin) impl_->good->fill(begin, split, seed, out);
    if (end > split)
      impl_->bad->fill(split, end, seed, out + (split - begin) * m);
    return;
  }

  impl_->fill_input_frame(begin, end, seed, out);
  if (!impl_->identity_frame) {
    const int64_t cols = end - begin;
    Eigen::Map<Eigen::MatrixXcd> block(out, m, cols);
    block = impl_->model.target.unitary.matrix() * block;
    block.colwise() += impl_->model.target.beta;
  }
}

SampleBatch sample_prover(const ProverModel& model, int64_t shots,
                          uint64_t seed) {
  if (shots < 0) throw ParameterError("sample_prover: negative shot count");
  ProverSampler sampler(model);
  SampleBatch batch;
  batch.modes = sampler.modes();
  batch.shots = shots;
  batch.seed = seed;
  batch.prover_tag = model.tag();
  batch.data.resize(static_cast<size_t>(shots) * batch.modes);
  parallel_blocks(shots, kBlockShots,
                  [&](int64_t, int64_t begin, int64_t end) {
                    sampler.fill(begin, end, seed,
                                 batch.data.data() + begin * batch.modes);
                  });
  return batch;
}

}  // namespace hetverify
