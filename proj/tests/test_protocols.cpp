#include <doctest.h>

#include <cmath>
#include <random>

#include "hetverify/protocols.hpp"
#include "test_util.hpp"

using namespace hetverify;
using doctest::Approx;

namespace {

TargetSpec product_target(const std::vector<CoreState>& cores) {
  TargetSpec t;
  t.modes = static_cast<int>(cores.size());
  t.core_states = cores;
  t.unitary = PassiveUnitary::identity(t.modes);
  t.beta = Eigen::VectorXcd::Zero(t.modes);
  t.xi = Eigen::VectorXcd::Zero(t.modes);
  return t;
}

}  // namespace

TEST_CASE("protocol1_estimate") {
  const CoreState vac = CoreState::fock(0);
  EstimatorConfig cfg{2, 0.3};
  SUBCASE("ideal vacuum samples estimate fidelity 1") {
    const auto xs = sample_core_q(vac, 100000, 3);
    const double est = protocol1_estimate(xs, vac, cfg, 1);
    // Oracle expectation is exactly 1; the clamped estimate sits at or just
    // below it.
    CHECK(est <= 1.0);
    CHECK(est > 0.98);
  }
  SUBCASE("M powers the clamped mean") {
    const auto xs = sample_core_q(vac, 2000, 4);
    const double e1 = protocol1_estimate(xs, vac, cfg, 1);
    const double e3 = protocol1_estimate(xs, vac, cfg, 3);
    CHECK(e3 == Approx(e1 * e1 * e1).epsilon(1e-14));
  }
  SUBCASE("clamping caps at 1") {
    // g_C(0) = p/eta > 1 for the vacuum target: a batch of zeros overflows
    // the raw mean, the estimate clamps to exactly 1.
    std::vector<Complex> zeros(100, Complex(0.0));
    CHECK(protocol1_estimate(zeros, vac, cfg, 2) == 1.0);
  }
  SUBCASE("wrong state estimates near zero under the bias bound") {
    const auto xs = sample_core_q(CoreState::fock(1), 100000, 5);
    const GCoreEvaluator eval(vac, cfg);
    double sum = 0.0, sq = 0.0;
    eval.accumulate(xs.data(), 100000, sum, sq);
    const double mean = sum / 100000;
    const double se = std::sqrt((sq / 100000 - mean * mean) / 100000);
    // E[g_00 over Q_{|1>}] = 0 exactly for p = 2 (no occupied tail terms).
    CHECK(std::abs(mean) < bias_bound(0, 0, cfg) + 5.0 * se);
  }
  CHECK_THROWS_AS(protocol1_estimate({}, vac, cfg, 1), ParameterError);
}

TEST_CASE("protocol1_plan") {
  PlanRequest req;
  req.epsilon = 0.1;
  req.delta = 0.1;
  req.m_copies = 1;
  req.cores = {CoreState::fock(0)};
  req.cfgs = {{1, 0.01}};

  const PlanResult base = protocol1_plan(req);
  CHECK(base.formula_tag == "fe-closed-form");
  CHECK(base.shots_required >= 1);

  SUBCASE("doubling M scales N by 2^(2+2c/p)") {
    PlanRequest req2 = req;
    req2.m_copies = 2;
    const PlanResult doubled = protocol1_plan(req2);
    const double ratio = static_cast<double>(doubled.shots_required) /
                         static_cast<double>(base.shots_required);
    CHECK(ratio == Approx(16.0).epsilon(1e-6));  // c=1, p=1
  }
  SUBCASE("delta = 2/e^2 gives the ln factor 2") {
    PlanRequest req2 = req;
    req2.delta = 2.0 / std::exp(2.0);
    const PlanResult r = protocol1_plan(req2);
    const double expect = std::pow(1.0 / req.epsilon, 4.0) *
                          r.constants[0].k_big * 2.0;
    CHECK(static_cast<double>(r.shots_required) ==
          Approx(std::ceil(expect)).epsilon(1e-9));
  }
  SUBCASE("epsilon exponent is 2+2c/p") {
    PlanRequest half = req;
    half.epsilon = 0.05;
    const double ratio = static_cast<double>(protocol1_plan(half).shots_required) /
                         static_cast<double>(base.shots_required);
    CHECK(ratio == Approx(16.0).epsilon(1e-5));
  }
  SUBCASE("eta above the admissible cap is rejected with the cap") {
    PlanRequest bad = req;
    bad.cores = {CoreState::fock(1)};
    bad.cfgs = {{1, 0.5}};  // cap is 1/30 at eps=0.1
    CHECK_THROWS_AS(protocol1_plan(bad), ParameterError);
    try {
      protocol1_plan(bad);
    } catch (const ParameterError& e) {
      CHECK(std::string(e.what()).find("0.033333") != std::string::npos);
    }
  }
}

TEST_CASE("planner sharpness") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> eps_d(0.05, 0.4);
  std::uniform_real_distribution<double> delta_d(0.01, 0.4);

  SUBCASE("protocol 1") {
    for (int it = 0; it < 20; ++it) {
      PlanRequest req;
      req.epsilon = eps_d(rng);
      req.delta = delta_d(rng);
      req.m_copies = 1 + it % 3;
      req.cores = {testutil::random_core(rng, 1 + it % 3)};
      EstimatorConfig cfg{1 + it % 2, 0.0};
      cfg.eta = 0.9 * constants_for(req.cores[0], {cfg.p, 0.5}, req.epsilon,
                                    req.m_copies)
                          .eta_max;
      req.cfgs = {cfg};
      const PlanResult plan = protocol1_plan(req);
      const int c = req.cores[0].support();
      const double at_n =
          p_iid_single(plan.shots_required, req.epsilon, req.m_copies, c,
                       cfg.p, plan.constants[0].k_big);
      CHECK(at_n <= req.delta);
      if (plan.shots_required > 1) {
        const double at_prev =
            p_iid_single(plan.shots_required - 1, req.epsilon, req.m_copies, c,
                         cfg.p, plan.constants[0].k_big);
        CHECK(at_prev > req.delta);
      }
    }
  }
  SUBCASE("protocol 2") {
    for (int it = 0; it < 10; ++it) {
      PlanRequest req;
      req.epsilon = eps_d(rng);
      req.delta = delta_d(rng);
      req.m_copies = 1;
      const int m = 2 + it % 2;
      std::vector<int> supports, ps;
      std::vector<double> ks;
      for (int i = 0; i < m; ++i) {
        req.cores.push_back(testutil::random_core(rng, 1 + (it + i) % 2));
        EstimatorConfig cfg{1, 0.0};
        cfg.eta = 0.9 * constants_for(req.cores[i], {1, 0.5},
                                      req.epsilon / m, 1)
                            .eta_max;
        req.cfgs.push_back(cfg);
      }
      const PlanResult plan = protocol2_plan(req);
      for (int i = 0; i < m; ++i) {
        supports.push_back(req.cores[i].support());
        ps.push_back(req.cfgs[i].p);
        ks.push_back(plan.constants[i].k_big);
      }
      CHECK(p_iid_witness(plan.shots_required, req.epsilon, 1, supports, ps,
                          ks) <= req.delta);
      if (plan.shots_required > 1)
        CHECK(p_iid_witness(plan.shots_required - 1, req.epsilon, 1, supports,
                            ps, ks) > req.delta);
    }
  }
  SUBCASE("protocol 3") {
    for (int it = 0; it < 10; ++it) {
      const double eps = eps_d(rng);
      const double delta = delta_d(rng);
      const int m = 2 + it % 5;
      const int n = it % (m + 1);
      EstimatorConfig cfg{2, 0.3};
      const PlanResult plan = protocol3_plan(eps, delta, m, n, cfg, 1);
      CHECK(p_iid_bs(plan.shots_required, eps, 1, m, n, cfg) <= delta);
      if (plan.shots_required > 1)
        CHECK(p_iid_bs(plan.shots_required - 1, eps, 1, m, n, cfg) > delta);
    }
  }
}

TEST_CASE("protocol2_plan structure") {
  SUBCASE("m identical modes match the closed form with delta/m") {
    const int m = 3;
    PlanRequest req;
    req.epsilon = 0.2;
    req.delta = 0.1;
    req.m_copies = 1;
    EstimatorConfig cfg{1, 0.0};
    cfg.eta =
        0.9 * constants_for(CoreState::fock(0), {1, 0.5}, req.epsilon / m, 1)
                  .eta_max;
    for (int i = 0; i < m; ++i) {
      req.cores.push_back(CoreState::fock(0));
      req.cfgs.push_back(cfg);
    }
    const PlanResult plan = protocol2_plan(req);
    // Single-term inversion with delta/m and per-mode precision eps/m:
    const double k = plan.constants[0].k_big;
    const double expect =
        std::pow(m / req.epsilon, 4.0) * k * std::log(2.0 * m / req.delta);
    CHECK(static_cast<double>(plan.shots_required) ==
          Approx(std::ceil(expect)).epsilon(1e-9));
  }
  SUBCASE("m=1 reduces to protocol1_plan") {
    PlanRequest req;
    req.epsilon = 0.15;
    req.delta = 0.05;
    req.m_copies = 2;
    req.cores = {CoreState::fock(1)};
    EstimatorConfig cfg{2, 0.0};
    cfg.eta = 0.9 * constants_for(req.cores[0], {2, 0.5}, req.epsilon, 2)
                        .eta_max;
    req.cfgs = {cfg};
    CHECK(protocol2_plan(req).shots_required ==
          protocol1_plan(req).shots_required);
  }
  SUBCASE("monotonicity") {
    PlanRequest req;
    req.epsilon = 0.2;
    req.delta = 0.2;
    req.m_copies = 1;
    EstimatorConfig cfg{1, 0.005};
    req.cores = {CoreState::fock(0)};
    req.cfgs = {cfg};
    const int64_t n1 = protocol2_plan(req).shots_required;
    req.cores.push_back(CoreState::fock(0));
    req.cfgs.push_back(cfg);
    const int64_t n2 = protocol2_plan(req).shots_required;
    CHECK(n2 >= n1);
    req.m_copies = 2;
    const int64_t n3 = protocol2_plan(req).shots_required;
    CHECK(n3 >= n2);
    req.epsilon = 0.1;
    const int64_t n4 = protocol2_plan(req).shots_required;
    CHECK(n4 >= n3);
    req.delta = 0.1;
    const int64_t n5 = protocol2_plan(req).shots_required;
    CHECK(n5 >= n4);
  }
}

TEST_CASE("protocol3_plan") {
  EstimatorConfig cfg{2, 0.3};
  SUBCASE("n=0 has a closed-form single-term inversion") {
    const double eps = 0.1, delta = 0.05;
    const int m = 4;
    const PlanResult plan = protocol3_plan(eps, delta, m, 0, cfg, 1);
    const double expect = 2.0 * cfg.p * cfg.p * m * m /
                          (eps * eps * cfg.eta * cfg.eta) *
                          std::log(2.0 * m / delta);
    CHECK(static_cast<double>(plan.shots_required) ==
          Approx(std::ceil(expect)).epsilon(1e-9));
  }
  SUBCASE("doubling m at fixed n/m roughly quadruples N") {
    const int64_t n8 = protocol3_plan(0.1, 0.05, 8, 2, cfg, 1).shots_required;
    const int64_t n16 = protocol3_plan(0.1, 0.05, 16, 4, cfg, 1).shots_required;
    const double ratio = static_cast<double>(n16) / n8;
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
  }
  SUBCASE("halving delta adds an additive log term") {
    const int64_t n1 = protocol3_plan(0.1, 0.1, 4, 2, cfg, 1).shots_required;
    const int64_t n2 = protocol3_plan(0.1, 0.05, 4, 2, cfg, 1).shots_required;
    CHECK(n2 > n1);
    // The dominant term scales like ln(1/delta): the increase stays within a
    // small multiple of N * ln2 / ln(2n/delta).
    const double frac = static_cast<double>(n2 - n1) / n1;
    CHECK(frac < 0.3);
  }
  CHECK_THROWS_AS(protocol3_plan(0.1, 0.05, 4, 2, {1, 0.3}, 1), ParameterError);
}

TEST_CASE("protocol2_witness") {
  EstimatorConfig cfg{2, 0.25};
  SUBCASE("single mode degenerates to protocol1_estimate") {
    const TargetSpec t = product_target({CoreState::fock(1)});
    const SampleBatch batch = sample_prover(ProverModel::ideal(t), 20000, 11);
    const VerificationReport rep =
        protocol2_witness(batch, t, {cfg}, 1);
    std::vector<Complex> col(batch.shots);
    for (int64_t s = 0; s < batch.shots; ++s) col[s] = batch.at(s, 0);
    const double est = protocol1_estimate(col, CoreState::fock(1), cfg, 1);
    CHECK(rep.witness == Approx(est).epsilon(1e-12));
    CHECK(!rep.accept.has_value());
    CHECK(!rep.threshold.has_value());
  }
  SUBCASE("ideal prover approaches witness 1; vacuum substitution kills it") {
    Eigen::MatrixXcd bs(2, 2);
    bs << M_SQRT1_2, M_SQRT1_2, M_SQRT1_2, -M_SQRT1_2;
    const TargetSpec t = TargetSpec::boson_sampling(2, 1, PassiveUnitary(bs));
    const SampleBatch good = sample_prover(ProverModel::ideal(t), 200000, 12);
    const VerificationReport rep_good =
        protocol2_witness(good, t, {cfg, cfg}, 1);
    CHECK(rep_good.witness > 0.9);
    CHECK(rep_good.witness < 1.0 + 1e-9);

    // Substitute vacuum into the photon mode (input frame).
    std::vector<FockDensityMatrix> subs{
        FockDensityMatrix::from_core(CoreState::fock(0), 2),
        FockDensityMatrix::from_core(CoreState::fock(0))};
    const SampleBatch bad =
        sample_prover(ProverModel::substitute(t, subs), 200000, 13);
    const VerificationReport rep_bad = protocol2_witness(bad, t, {cfg, cfg}, 1);
    CHECK(rep_bad.per_mode_fidelity[0] < 0.1);
    CHECK(rep_bad.witness < 0.1);
  }
  SUBCASE("failure probability echo when epsilon is given") {
    const TargetSpec t = product_target({CoreState::fock(0)});
    const SampleBatch batch = sample_prover(ProverModel::ideal(t), 1000, 14);
    EstimatorConfig tight{1, 0.001};
    const VerificationReport rep =
        protocol2_witness(batch, t, {tight}, 1, 0.2);
    CHECK(rep.failure_probabilities.count("witness_iid") == 1);
    const double p = rep.failure_probabilities.at("witness_iid");
    CHECK(p > 0.0);
    CHECK(p <= 2.0);
  }
}

TEST_CASE("protocol3_verify") {
  Eigen::MatrixXcd bs(2, 2);
  bs << M_SQRT1_2, M_SQRT1_2, M_SQRT1_2, -M_SQRT1_2;
  const TargetSpec t = TargetSpec::boson_sampling(2, 1, PassiveUnitary(bs));
  EstimatorConfig cfg{2, 0.3};

  SUBCASE("parameter validation") {
    const SampleBatch batch = sample_prover(ProverModel::ideal(t), 100, 1);
    CHECK_THROWS_AS(
        protocol3_verify(batch, t.unitary, 1, 0.2, 0.25, cfg, 1),
        ParameterError);  // epsilon >= lambda
    CHECK_THROWS_AS(
        protocol3_verify(batch, t.unitary, 1, 0.2, 0.05, {1, 0.3}, 1),
        ParameterError);  // odd p
  }
  SUBCASE("ideal prover accepts at a planned sample size") {
    const PlanResult plan = protocol3_plan(0.1, 0.1, 2, 1, cfg, 1);
    const VerificationReport rep = protocol3_verify_stream(
        ProverModel::ideal(t), plan.shots_required, 21, 1, 0.3, 0.1, cfg, 1);
    CHECK(rep.accept.has_value());
    CHECK(*rep.accept);
    CHECK(*rep.tvd_bound == Approx(std::sqrt(0.3)));
    CHECK(rep.failure_probabilities.at("bs_iid") <= 0.1);
  }
  SUBCASE("vacuum spoof aborts") {
    const PlanResult plan = protocol3_plan(0.1, 0.1, 2, 1, cfg, 1);
    const VerificationReport rep = protocol3_verify_stream(
        ProverModel::coherent_spoof(t), plan.shots_required, 22, 1, 0.3, 0.1,
        cfg, 1);
    CHECK(!*rep.accept);
    CHECK(!rep.tvd_bound.has_value());
  }
  SUBCASE("vacuous threshold accepts with certificate 1") {
    const VerificationReport rep = protocol3_verify_stream(
        ProverModel::ideal(t), 20000, 23, 1, 1.0, 1e-3, cfg, 1);
    CHECK(*rep.accept);
    CHECK(*rep.tvd_bound == Approx(1.0));
  }
  SUBCASE("batch and stream paths agree") {
    const SampleBatch batch = sample_prover(ProverModel::ideal(t), 30000, 24);
    const VerificationReport a =
        protocol3_verify(batch, t.unitary, 1, 0.3, 0.1, cfg, 1);
    const VerificationReport b = protocol3_verify_stream(
        ProverModel::ideal(t), 30000, 24, 1, 0.3, 0.1, cfg, 1);
    CHECK(a.witness == Approx(b.witness).epsilon(1e-12));
  }
}

TEST_CASE("noniid postprocess") {
  const int m = 2;
  SampleBatch batch;
  batch.modes = m;
  batch.shots = 100;
  batch.data.assign(200, Complex(2.0, 1.0));  // |z|^2 + 1 = 6 everywhere

  EnergyTestConfig cfg;
  cfg.n_estimate = 60;
  cfg.k_energy = 30;
  cfg.q_discard = 10;

  SUBCASE("counts every shot above the threshold") {
    cfg.e_threshold = {5.0, 7.0};  // mode 0 counts all, mode 1 none
    cfg.s_allowance = {30, 0};
    const NoniidOutcome out = noniid_postprocess(batch, cfg, 5);
    CHECK(out.exceed_counts[0] == 30);
    CHECK(out.exceed_counts[1] == 0);
    CHECK(!out.aborted);
    CHECK(out.kept.shots == 60);
    CHECK(out.kept.modes == m);
  }
  SUBCASE("aborts above the allowance") {
    cfg.e_threshold = {5.0, 5.0};
    cfg.s_allowance = {29, 30};
    const NoniidOutcome out = noniid_postprocess(batch, cfg, 5);
    CHECK(out.aborted);
  }
  SUBCASE("S = K never aborts") {
    cfg.e_threshold = {0.0, 0.0};
    cfg.s_allowance = {30, 30};
    CHECK(!noniid_postprocess(batch, cfg, 5).aborted);
  }
  SUBCASE("deterministic permutation per seed") {
    cfg.e_threshold = {5.0, 5.0};
    cfg.s_allowance = {30, 30};
    const NoniidOutcome a = noniid_postprocess(batch, cfg, 5);
    const NoniidOutcome b = noniid_postprocess(batch, cfg, 5);
    CHECK(a.kept.data == b.kept.data);
  }
  SUBCASE("split must cover the batch") {
    cfg.e_threshold = {5.0, 5.0};
    cfg.s_allowance = {30, 30};
    cfg.q_discard = 11;
    CHECK_THROWS_AS(noniid_postprocess(batch, cfg, 5), ParameterError);
  }
}

TEST_CASE("noniid confidence terms") {
  SUBCASE("choice term is exact") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int64_t> nd(10, 1000000);
    std::uniform_int_distribution<int64_t> qd(0, 5000);
    std::uniform_int_distribution<int> md(1, 20);
    for (int it = 0; it < 100; ++it) {
      NoniidParams prm;
      prm.n_estimate = nd(rng);
      prm.k_energy = 100;
      prm.q_discard = qd(rng);
      prm.m_copies = md(rng);
      prm.e_threshold = 5.0;
      prm.s_allowance = 10;
      prm.epsilon = 0.25;
      prm.support = 2;
      prm.p = 2;
      prm.g_cp = 1.0;
      // keep the Hoeffding deviation positive
      prm.n_estimate += 64 * prm.q_discard *
                        static_cast<int64_t>(std::pow(prm.m_copies, 3.0)) /
                        static_cast<int64_t>(
                            std::max(1.0, std::pow(prm.epsilon, 2.0)));
      const auto probs = noniid_confidence(prm);
      const double expect =
          static_cast<double>(prm.m_copies) *
          (prm.q_discard + prm.m_copies - 1.0) /
          (static_cast<double>(prm.n_estimate) + prm.m_copies);
      CHECK(probs.at("choice") == Approx(expect).epsilon(1e-14));
    }
  }
  SUBCASE("Q=0, M=1 has zero choice probability") {
    NoniidParams prm;
    prm.n_estimate = 1000;
    prm.k_energy = 100;
    prm.q_discard = 0;
    prm.m_copies = 1;
    prm.e_threshold = 4.0;
    prm.s_allowance = 5;
    prm.epsilon = 0.3;
    prm.support = 1;
    prm.p = 1;
    prm.g_cp = 1.0;
    CHECK(noniid_confidence(prm).at("choice") == 0.0);
  }
  SUBCASE("hoeffding decreases in N', support decreases in K") {
    NoniidParams prm;
    prm.k_energy = 2000;
    prm.q_discard = 50;
    prm.m_copies = 1;
    prm.e_threshold = 6.0;
    prm.s_allowance = 10;
    prm.epsilon = 0.3;
    prm.support = 1;
    prm.p = 1;
    prm.g_cp = 0.5;
    double last = std::numeric_limits<double>::infinity();
    for (int64_t np = 100000; np <= 1000000; np += 100000) {
      prm.n_estimate = np;
      const double h = noniid_confidence(prm).at("hoeffding");
      CHECK(h < last);
      CHECK(h > 0.0);
      CHECK(std::isfinite(h));
      last = h;
    }
    prm.n_estimate = 500000;
    last = std::numeric_limits<double>::infinity();
    for (int64_t k = 5000; k <= 50000; k += 5000) {
      prm.k_energy = k;
      const double s = noniid_confidence(prm).at("support");
      CHECK(s < last);
      CHECK(s > 0.0);
      last = s;
    }
  }
  SUBCASE("vacuous Hoeffding deviation is surfaced") {
    NoniidParams prm;
    prm.n_estimate = 10;
    prm.k_energy = 10;
    prm.q_discard = 1000;
    prm.m_copies = 4;
    prm.e_threshold = 4.0;
    prm.s_allowance = 5;
    prm.epsilon = 0.1;
    prm.support = 2;
    prm.p = 1;
    prm.g_cp = 1.0;
    CHECK_THROWS_AS(noniid_confidence(prm), ParameterError);
  }
  SUBCASE("scaling preset keeps all four terms finite and positive") {
    const NoniidPreset preset = noniid_scaling_preset(1, 0.05, 1, 2);
    NoniidParams prm;
    prm.n_estimate = preset.n_estimate;
    prm.k_energy = preset.k_energy;
    prm.q_discard = preset.q_discard;
    prm.m_copies = 1;
    prm.e_threshold = preset.e_threshold;
    prm.s_allowance = preset.s_allowance;
    prm.epsilon = 0.05;
    prm.support = 1;
    prm.p = 2;
    prm.g_cp = constants_for(CoreState::fock(0), {2, 0.3}, 0.05, 1).g_cp;
    const auto probs = noniid_confidence(prm);
    for (const auto& [name, value] : probs) {
      CAPTURE(name);
      CHECK(std::isfinite(value));
      CHECK(value >= 0.0);
    }
  }
}

TEST_CASE("energy quantile") {
  // Vacuum: survival exp(-x) = tail  =>  E = 1 - ln(tail).
  CHECK(energy_quantile(0, 1e-4) == Approx(1.0 - std::log(1e-4)).epsilon(1e-9));
  // Single photon at the numeric level: survival (1+x) exp(-x).
  const double e1 = energy_quantile(1, 1e-3);
  const double x = e1 - 1.0;
  CHECK((1.0 + x) * std::exp(-x) == Approx(1e-3).epsilon(1e-9));
  CHECK_THROWS_AS(energy_quantile(-1, 0.1), ParameterError);
  CHECK_THROWS_AS(energy_quantile(0, 0.0), ParameterError);
}

TEST_CASE("tvd bound") {
  CHECK(tvd_bound(1.0) == 0.0);
  CHECK(tvd_bound(0.96) == Approx(0.2));
  CHECK(tvd_bound(0.75) == Approx(0.5));
  CHECK_THROWS_AS(tvd_bound(1.5), ParameterError);
  CHECK_THROWS_AS(tvd_bound(-0.1), ParameterError);
}

TEST_CASE("one-sided estimator for even p") {
  // For p even and diagonal Fock targets the exact expectation never exceeds
  // the true diagonal entry.
  std::mt19937_64 rng(6);
  EstimatorConfig cfg{2, 0.4};
  for (int it = 0; it < 100; ++it) {
    const int d = 2 + it % 6;
    const FockDensityMatrix rho(testutil::random_density(rng, d, 2));
    for (int k = 0; k < 2; ++k) {
      const double e = expectation_g_exact(rho, k, k, cfg).real();
      const double truth = (k < d) ? rho.entry(k, k).real() : 0.0;
      CHECK(e <= truth + 1e-12);
    }
  }
}
