// Command-line front end: planning, simulation, estimation, witness and
// accept/abort verification, non-i.i.d. post-processing, and exact oracle
// cross-checks.
//
// Exit codes: 0 success (or verifier accept), 1 protocol abort (a result,
// not an error), 2 parameter/usage error, 3 numeric or truncation error.

#include <charconv>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hetverify/estimators.hpp"
#include "hetverify/io.hpp"
#include "hetverify/protocols.hpp"
#include "hetverify/sampler.hpp"
#include "hetverify/states.hpp"

using namespace hetverify;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAbort = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

Complex parse_complex(std::string tok) {
  if (tok.empty()) throw ParameterError("empty complex literal");
  // forms: "1.5", "-2", "0.5i", "1+2i", "0.3-0.2i", "i", "-i"
  const bool has_i = tok.back() == 'i' || tok.back() == 'j';
  if (!has_i) {
    double re = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), re);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
      throw ParameterError("bad complex literal: " + tok);
    return {re, 0.0};
  }
  tok.pop_back();
  // split at the last +/- that is not an exponent sign or leading sign
  size_t split = std::string::npos;
  for (size_t i = tok.size(); i-- > 1;) {
    if ((tok[i] == '+' || tok[i] == '-') && tok[i - 1] != 'e' &&
        tok[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  const auto parse_real = [](const std::string& s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
      throw ParameterError("bad complex literal component: " + s);
    return v;
  };
  if (split == std::string::npos) return {0.0, parse_real(tok)};
  return {parse_real(tok.substr(0, split)), parse_real(tok.substr(split))};
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

// "--core 0,1" amplitudes, normalised here for convenience (the library
// itself is strict about normalisation).
CoreState parse_core(const std::string& text) {
  std::vector<Complex> coeffs;
  for (const auto& tok : split(text, ',')) coeffs.push_back(parse_complex(tok));
  double norm2 = 0.0;
  for (const auto& c : coeffs) norm2 += std::norm(c);
  if (norm2 <= 0.0) throw ParameterError("core state must be nonzero");
  for (auto& c : coeffs) c /= std::sqrt(norm2);
  double check = 0.0;
  for (const auto& c : coeffs) check += std::norm(c);
  for (auto& c : coeffs) c /= std::sqrt(check);
  return CoreState(std::move(coeffs));
}

std::vector<double> parse_per_mode(const std::string& text, int modes,
                                   const char* what) {
  std::vector<double> vals;
  for (const auto& tok : split(text, ',')) {
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc())
      throw ParameterError(std::string("bad value for ") + what + ": " + tok);
    vals.push_back(v);
  }
  if (vals.size() == 1) vals.assign(modes, vals[0]);
  if (static_cast<int>(vals.size()) != modes)
    throw ParameterError(std::string(what) +
                         ": need one value or one per mode");
  return vals;
}

ProverModel parse_prover(const std::string& text, const TargetSpec& target) {
  const auto parts = split(text, ':');
  const std::string& kind = parts[0];
  if (kind == "ideal") return ProverModel::ideal(target);
  if (kind == "loss" || kind == "lossy") {
    if (parts.size() != 2)
      throw ParameterError("prover loss: expects loss:<tau[,tau...]>");
    return ProverModel::lossy(
        target, parse_per_mode(parts[1], target.modes, "tau"));
  }
  if (kind == "vacuum" || kind == "spoof") {
    if (parts.size() == 1) return ProverModel::coherent_spoof(target);
    Eigen::VectorXcd amps(target.modes);
    const auto toks = split(parts[1], ',');
    if (static_cast<int>(toks.size()) != target.modes)
      throw ParameterError("spoof amplitudes: one per mode");
    for (int i = 0; i < target.modes; ++i) amps(i) = parse_complex(toks[i]);
    return ProverModel::coherent_spoof(target, amps);
  }
  if (kind == "substitute") {
    if (parts.size() != 2)
      throw ParameterError("prover substitute: expects substitute:<state.json>");
    StateFile sf = read_state(parts[1]);
    if (!sf.is_product)
      throw ParameterError("substitute prover needs a product state file");
    if (static_cast<int>(sf.product.size()) == 1 && target.modes > 1)
      sf.product.assign(target.modes, sf.product[0]);
    return ProverModel::substitute(target, std::move(sf.product));
  }
  if (kind == "block") {
    if (parts.size() < 3)
      throw ParameterError("prover block: expects block:<count>:<sub-prover>");
    int64_t count = 0;
    const auto res =
        std::from_chars(parts[1].data(), parts[1].data() + parts[1].size(), count);
    if (res.ec != std::errc())
      throw ParameterError("prover block: bad count " + parts[1]);
    std::string rest = parts[2];
    for (size_t i = 3; i < parts.size(); ++i) rest += ":" + parts[i];
    return ProverModel::block_noniid(target, count, parse_prover(rest, target));
  }
  throw ParameterError("unknown prover kind: " + kind);
}

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw ParameterError("cannot write file: " + out_path);
    out << j.dump(2) << "\n";
  }
}

json flags_json(const std::vector<std::pair<std::string, json>>& kv) {
  json j;
  for (const auto& [k, v] : kv) j[k] = v;
  return j;
}

// ---------------------------------------------------------------------------

struct PlanOpts {
  std::string protocol;
  std::string core;
  std::string target_path;
  int modes = 0;
  int photons = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  std::string p_list;
  std::string eta_list;
  int m_copies = 1;
  std::string out;
};

int run_plan(const PlanOpts& o) {
  PlanResult plan;
  json flags;
  if (o.protocol == "fe") {
    if (o.core.empty()) throw ParameterError("plan fe: --core is required");
    PlanRequest req;
    req.epsilon = o.epsilon;
    req.delta = o.delta;
    req.m_copies = o.m_copies;
    req.cores = {parse_core(o.core)};
    EstimatorConfig cfg;
    cfg.p = o.p_list.empty()
                ? 1
                : static_cast<int>(parse_per_mode(o.p_list, 1, "p")[0]);
    cfg.eta = o.eta_list.empty()
                  ? constants_for(req.cores[0], {cfg.p, 0.5}, o.epsilon,
                                  o.m_copies)
                        .eta_max
                  : parse_per_mode(o.eta_list, 1, "eta")[0];
    req.cfgs = {cfg};
    plan = protocol1_plan(req);
    flags = flags_json({{"protocol", "fe"},
                        {"core", o.core},
                        {"epsilon", o.epsilon},
                        {"delta", o.delta},
                        {"p", cfg.p},
                        {"eta", cfg.eta},
                        {"m_copies", o.m_copies}});
    std::cout << "shots required: " << plan.shots_required << "  (p=" << cfg.p
              << ", eta=" << cfg.eta << ", eta_max=" << plan.constants[0].eta_max
              << ")\n";
  } else if (o.protocol == "we") {
    if (o.target_path.empty())
      throw ParameterError("plan we: --target is required");
    const TargetSpec target = read_target(o.target_path);
    PlanRequest req;
    req.epsilon = o.epsilon;
    req.delta = o.delta;
    req.m_copies = o.m_copies;
    req.cores = target.core_states;
    const auto ps = o.p_list.empty()
                        ? std::vector<double>(target.modes, 1.0)
                        : parse_per_mode(o.p_list, target.modes, "p");
    std::vector<double> etas;
    if (!o.eta_list.empty())
      etas = parse_per_mode(o.eta_list, target.modes, "eta");
    for (int i = 0; i < target.modes; ++i) {
      EstimatorConfig cfg;
      cfg.p = static_cast<int>(ps[i]);
      cfg.eta = etas.empty()
                    ? constants_for(req.cores[i], {cfg.p, 0.5},
                                    o.epsilon / target.modes, o.m_copies)
                          .eta_max
                    : etas[i];
      req.cfgs.push_back(cfg);
    }
    plan = protocol2_plan(req);
    flags = flags_json({{"protocol", "we"},
                        {"target", o.target_path},
                        {"epsilon", o.epsilon},
                        {"delta", o.delta},
                        {"p", o.p_list},
                        {"m_copies", o.m_copies}});
    std::cout << "shots required: " << plan.shots_required << " over "
              << target.modes << " modes\n";
  } else if (o.protocol == "bs") {
    if (o.modes < 1) throw ParameterError("plan bs: --modes is required");
    EstimatorConfig cfg;
    cfg.p = o.p_list.empty()
                ? 2
                : static_cast<int>(parse_per_mode(o.p_list, 1, "p")[0]);
    cfg.eta = o.eta_list.empty() ? 0.3 : parse_per_mode(o.eta_list, 1, "eta")[0];
    plan = protocol3_plan(o.epsilon, o.delta, o.modes, o.photons, cfg,
                          o.m_copies);
    flags = flags_json({{"protocol", "bs"},
                        {"modes", o.modes},
                        {"photons", o.photons},
                        {"epsilon", o.epsilon},
                        {"delta", o.delta},
                        {"p", cfg.p},
                        {"eta", cfg.eta},
                        {"m_copies", o.m_copies}});
    const double p_at = p_iid_bs(plan.shots_required, o.epsilon, o.m_copies,
                                 o.modes, o.photons, cfg);
    std::cout << "shots required: " << plan.shots_required
              << "  failure probability at N: " << p_at << " <= " << o.delta
              << "\n";
  } else {
    throw ParameterError("plan: --protocol must be fe, we or bs");
  }
  json j = json::parse(plan_to_json(plan));
  j["flags"] = flags;
  emit(j, o.out);
  return kExitOk;
}

struct SimulateOpts {
  std::string target_path;
  std::string prover = "ideal";
  int64_t shots = 0;
  uint64_t seed = 0;
  std::string out;
};

int run_simulate(const SimulateOpts& o) {
  const TargetSpec target = read_target(o.target_path);
  const ProverModel model = parse_prover(o.prover, target);
  const SampleBatch batch = sample_prover(model, o.shots, o.seed);
  write_batch_csv(batch, o.out);
  std::cout << "wrote " << batch.shots << " shots x " << batch.modes
            << " modes to " << o.out << "\n";
  return kExitOk;
}

struct EstimateOpts {
  std::string samples_path;
  std::string core;
  int p = 1;
  double eta = 0.0;
  int m_copies = 1;
  int mode = 0;
  std::string out;
};

int run_estimate(const EstimateOpts& o) {
  const SampleBatch batch = read_batch_csv(o.samples_path);
  if (o.mode < 0 || o.mode >= batch.modes)
    throw ParameterError("estimate: --mode out of range");
  const CoreState core = parse_core(o.core);
  EstimatorConfig cfg{o.p, o.eta};
  std::vector<Complex> col(batch.shots);
  for (int64_t s = 0; s < batch.shots; ++s) col[s] = batch.at(s, o.mode);
  const double est = protocol1_estimate(col, core, cfg, o.m_copies);
  json j;
  j["estimate"] = est;
  j["shots"] = batch.shots;
  j["flags"] = flags_json({{"samples", o.samples_path},
                           {"core", o.core},
                           {"p", o.p},
                           {"eta", o.eta},
                           {"m_copies", o.m_copies},
                           {"mode", o.mode}});
  std::cout << "fidelity estimate: " << est << "\n";
  emit(j, o.out);
  return kExitOk;
}

struct WitnessOpts {
  std::string samples_path;
  std::string target_path;
  std::string p_list = "1";
  std::string eta_list;
  int m_copies = 1;
  double epsilon = 0.0;
  std::string out;
};

int run_witness(const WitnessOpts& o) {
  const SampleBatch batch = read_batch_csv(o.samples_path);
  const TargetSpec target = read_target(o.target_path);
  if (o.eta_list.empty()) throw ParameterError("witness: --eta is required");
  const auto ps = parse_per_mode(o.p_list, target.modes, "p");
  const auto etas = parse_per_mode(o.eta_list, target.modes, "eta");
  std::vector<EstimatorConfig> cfgs;
  for (int i = 0; i < target.modes; ++i)
    cfgs.push_back({static_cast<int>(ps[i]), etas[i]});
  std::optional<double> eps;
  if (o.epsilon > 0.0) eps = o.epsilon;
  const VerificationReport rep =
      protocol2_witness(batch, target, cfgs, o.m_copies, eps);
  json j = json::parse(report_to_json(rep));
  j["flags"] = flags_json({{"samples", o.samples_path},
                           {"target", o.target_path},
                           {"p", o.p_list},
                           {"eta", o.eta_list},
                           {"m_copies", o.m_copies}});
  std::cout << "witness: " << rep.witness << "\n";
  emit(j, o.out);
  return kExitOk;
}

struct VerifyBsOpts {
  std::string samples_path;
  std::string target_path;
  std::string prover;
  int64_t shots = 0;
  uint64_t seed = 0;
  double lambda = 0.0;
  double epsilon = 0.0;
  int p = 2;
  double eta = 0.3;
  int m_copies = 1;
  std::string out;
};

int run_verify_bs(const VerifyBsOpts& o) {
  const TargetSpec target = read_target(o.target_path);
  int photons = 0;
  if (!target.is_boson_sampling_form(&photons))
    throw ParameterError(
        "verify-bs: target must be |1..1 0..0> through U with beta = xi = 0");
  EstimatorConfig cfg{o.p, o.eta};
  VerificationReport rep;
  if (!o.prover.empty()) {
    if (o.shots < 1)
      throw ParameterError("verify-bs: --shots required with --prover");
    const ProverModel model = parse_prover(o.prover, target);
    rep = protocol3_verify_stream(model, o.shots, o.seed, photons, o.lambda,
                                  o.epsilon, cfg, o.m_copies);
  } else {
    if (o.samples_path.empty())
      throw ParameterError("verify-bs: need --samples or --prover");
    const SampleBatch batch = read_batch_csv(o.samples_path);
    rep = protocol3_verify(batch, target.unitary, photons, o.lambda, o.epsilon,
                           cfg, o.m_copies);
  }
  json j = json::parse(report_to_json(rep));
  j["flags"] = flags_json({{"samples", o.samples_path},
                           {"prover", o.prover},
                           {"shots", o.shots},
                           {"seed", o.seed},
                           {"target", o.target_path},
                           {"lambda", o.lambda},
                           {"epsilon", o.epsilon},
                           {"p", o.p},
                           {"eta", o.eta},
                           {"m_copies", o.m_copies}});
  std::cout << "decision: " << (*rep.accept ? "accept" : "abort")
            << "  witness: " << rep.witness << "  threshold: " << *rep.threshold;
  if (rep.tvd_bound) std::cout << "  tvd_bound: " << *rep.tvd_bound;
  std::cout << "\n";
  emit(j, o.out);
  return *rep.accept ? kExitOk : kExitAbort;
}

struct NoniidOpts {
  std::string samples_path;
  std::string target_path;
  int64_t n_estimate = 0;
  int64_t k_energy = 0;
  int64_t q_discard = 0;
  std::string e_list;
  std::string s_list;
  uint64_t seed = 0;
  std::string p_list = "1";
  std::string eta_list;
  int m_copies = 1;
  double epsilon = 0.0;
  std::string out;
};

int run_noniid(const NoniidOpts& o) {
  const SampleBatch raw = read_batch_csv(o.samples_path);
  const TargetSpec target = read_target(o.target_path);
  if (raw.modes != target.modes)
    throw ParameterError("noniid: samples and target disagree on modes");
  if (o.eta_list.empty()) throw ParameterError("noniid: --eta is required");

  // Transform to the verifier frame first; the energy test runs on alpha.
  const SampleBatch batch =
      verifier_transform(raw, target.unitary, target.beta);

  EnergyTestConfig etc;
  etc.n_estimate = o.n_estimate;
  etc.k_energy = o.k_energy;
  etc.q_discard = o.q_discard;
  etc.e_threshold = parse_per_mode(o.e_list, target.modes, "ethreshold");
  for (double s : parse_per_mode(o.s_list, target.modes, "sallowance"))
    etc.s_allowance.push_back(static_cast<int64_t>(s));
  const NoniidOutcome outcome = noniid_postprocess(batch, etc, o.seed);

  const auto ps = parse_per_mode(o.p_list, target.modes, "p");
  const auto etas = parse_per_mode(o.eta_list, target.modes, "eta");

  json j;
  j["format"] = "hetverify-report-v1";
  j["energy_counts"] = outcome.exceed_counts;
  j["decision"] = outcome.aborted ? "abort" : "accept";

  if (!outcome.aborted) {
    // Witness over the kept estimation block; the batch is already in the
    // verifier frame, so the target frame here is trivial.
    TargetSpec plain = target;
    plain.unitary = PassiveUnitary::identity(target.modes);
    plain.beta = Eigen::VectorXcd::Zero(target.modes);
    plain.xi = Eigen::VectorXcd::Zero(target.modes);
    std::vector<EstimatorConfig> cfgs;
    for (int i = 0; i < target.modes; ++i)
      cfgs.push_back({static_cast<int>(ps[i]), etas[i]});
    const VerificationReport rep =
        protocol2_witness(outcome.kept, plain, cfgs, o.m_copies);
    j["witness"] = rep.witness;
    j["per_mode_fidelity"] = rep.per_mode_fidelity;
  }

  if (o.epsilon > 0.0) {
    // Per-mode union bound at epsilon/m of the four confidence terms.
    std::map<std::string, double> total{{"support", 0.0},
                                        {"de_finetti", 0.0},
                                        {"choice", 0.0},
                                        {"hoeffding", 0.0}};
    for (int i = 0; i < target.modes; ++i) {
      NoniidParams prm;
      prm.n_estimate = etc.n_estimate;
      prm.k_energy = etc.k_energy;
      prm.q_discard = etc.q_discard;
      prm.m_copies = o.m_copies;
      prm.e_threshold = etc.e_threshold[i];
      prm.s_allowance = etc.s_allowance[i];
      prm.epsilon = o.epsilon / target.modes;
      prm.support = target.core_states[i].support();
      prm.p = static_cast<int>(ps[i]);
      prm.g_cp = constants_for(target.core_states[i],
                               {prm.p, etas[i]}, o.epsilon / target.modes,
                               o.m_copies)
                     .g_cp;
      for (const auto& [name, value] : noniid_confidence(prm))
        total[name] += value;
    }
    j["failure_probabilities"] = total;
  }

  j["flags"] = flags_json({{"samples", o.samples_path},
                           {"target", o.target_path},
                           {"nprime", o.n_estimate},
                           {"kenergy", o.k_energy},
                           {"qdiscard", o.q_discard},
                           {"ethreshold", o.e_list},
                           {"sallowance", o.s_list},
                           {"seed", o.seed},
                           {"p", o.p_list},
                           {"eta", o.eta_list},
                           {"m_copies", o.m_copies}});
  std::cout << (outcome.aborted ? "energy test: abort\n"
                                : "energy test: pass\n");
  emit(j, o.out);
  return outcome.aborted ? kExitAbort : kExitOk;
}

struct OracleOpts {
  std::string target_path;
  std::string state_path;
  std::string quantity = "fidelity";
  int k = 0;
  int l = 0;
  int p = 1;
  double eta = 0.3;
  int64_t compare_mc = 0;
  uint64_t seed = 0;
  int kmax = 2;
  std::string out;
};

MultimodeDensity state_to_multimode(const StateFile& sf, int modes) {
  MultimodeDensity rho;
  if (!sf.is_product) {
    rho = sf.full;
    if (rho.modes != modes)
      throw ParameterError("oracle: state modes do not match the target");
    return rho;
  }
  std::vector<FockDensityMatrix> factors = sf.product;
  if (static_cast<int>(factors.size()) == 1 && modes > 1)
    factors.assign(modes, factors[0]);
  if (static_cast<int>(factors.size()) != modes)
    throw ParameterError("oracle: state modes do not match the target");
  int dim = 1;
  for (const auto& f : factors) dim = std::max(dim, f.dim());
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Ones(1, 1);
  for (const auto& f : factors) {
    Eigen::MatrixXcd padded = Eigen::MatrixXcd::Zero(dim, dim);
    padded.topLeftCorner(f.dim(), f.dim()) = f.matrix();
    Eigen::MatrixXcd next(acc.rows() * dim, acc.cols() * dim);
    for (Eigen::Index r = 0; r < acc.rows(); ++r)
      for (Eigen::Index c = 0; c < acc.cols(); ++c)
        next.block(r * dim, c * dim, dim, dim) = acc(r, c) * padded;
    acc = std::move(next);
  }
  rho.modes = modes;
  rho.dim = dim;
  rho.rho = std::move(acc);
  rho.validate();
  return rho;
}

int run_oracle(const OracleOpts& o) {
  const TargetSpec target = read_target(o.target_path);
  json j;
  j["flags"] = flags_json({{"target", o.target_path},
                           {"state", o.state_path},
                           {"quantity", o.quantity},
                           {"k", o.k},
                           {"l", o.l},
                           {"p", o.p},
                           {"eta", o.eta}});

  if (o.quantity == "fidelity") {
    if (o.state_path.empty()) {
      j["fidelity"] = 1.0;  // ideal prover
    } else {
      const MultimodeDensity rho =
          state_to_multimode(read_state(o.state_path), target.modes);
      j["fidelity"] = fidelity_target(target, rho);
    }
    std::cout << "fidelity: " << j["fidelity"] << "\n";
  } else if (o.quantity == "witness") {
    if (o.state_path.empty())
      throw ParameterError("oracle witness: --state is required");
    const StateFile sf = read_state(o.state_path);
    if (!sf.is_product)
      throw ParameterError(
          "oracle witness: needs a product state (per-mode factors), "
          "interpreted in the core frame");
    std::vector<FockDensityMatrix> factors = sf.product;
    if (static_cast<int>(factors.size()) == 1 && target.modes > 1)
      factors.assign(target.modes, factors[0]);
    if (static_cast<int>(factors.size()) != target.modes)
      throw ParameterError("oracle witness: state modes mismatch");
    std::vector<double> fids;
    for (int i = 0; i < target.modes; ++i)
      fids.push_back(fidelity_pure(target.core_states[i], factors[i]));
    j["per_mode_fidelity"] = fids;
    j["witness"] = witness_exact(fids);
    std::cout << "witness: " << j["witness"] << "\n";
  } else if (o.quantity == "expectation") {
    if (o.state_path.empty())
      throw ParameterError("oracle expectation: --state is required");
    const StateFile sf = read_state(o.state_path);
    if (!sf.is_product || sf.product.size() != 1)
      throw ParameterError("oracle expectation: needs a single-mode state");
    const FockDensityMatrix& rho = sf.product[0];
    EstimatorConfig cfg{o.p, o.eta};
    const Complex e = expectation_g_exact(rho, o.k, o.l, cfg);
    j["expectation"] = {e.real(), e.imag()};
    j["bias_bound"] = bias_bound(o.k, o.l, cfg);
    std::cout << "E[g_kl] = " << e.real() << (e.imag() < 0 ? " - " : " + ")
              << std::abs(e.imag()) << "i\n";

    if (o.compare_mc > 0) {
      // Exact vs Monte-Carlo table, one row per (k, l).
      std::string csv = "k,l,exact_re,exact_im,mc_re,mc_im,se\n";
      const auto samples = sample_density_q(rho, o.compare_mc, o.seed);
      for (int kk = 0; kk <= o.kmax; ++kk) {
        for (int ll = 0; ll <= o.kmax; ++ll) {
          const Complex exact = expectation_g_exact(rho, kk, ll, cfg);
          Complex mean = 0.0;
          double sq = 0.0;
          for (const auto& z : samples) {
            const Complex g = g_kl(cfg, kk, ll, z);
            mean += g;
            sq += std::norm(g);
          }
          mean /= static_cast<double>(samples.size());
          const double var = sq / samples.size() - std::norm(mean);
          const double se = std::sqrt(std::max(var, 0.0) / samples.size());
          csv += std::to_string(kk) + "," + std::to_string(ll) + "," +
                 std::to_string(exact.real()) + "," +
                 std::to_string(exact.imag()) + "," +
                 std::to_string(mean.real()) + "," +
                 std::to_string(mean.imag()) + "," + std::to_string(se) + "\n";
        }
      }
      if (o.out.empty()) {
        std::cout << csv;
      } else {
        std::ofstream f(o.out);
        if (!f) throw ParameterError("cannot write file: " + o.out);
        f << csv;
      }
      return kExitOk;
    }
  } else {
    throw ParameterError("oracle: unknown --quantity " + o.quantity);
  }
  emit(j, o.out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "hetverify: heterodyne verification of continuous-variable quantum "
      "states"};
  app.require_subcommand(1);

  PlanOpts plan_o;
  auto* plan = app.add_subcommand("plan", "Sample-size planning");
  plan->add_option("--protocol", plan_o.protocol, "fe | we | bs")->required();
  plan->add_option("--core", plan_o.core, "core amplitudes c0,c1,...");
  plan->add_option("--target", plan_o.target_path, "target JSON file");
  plan->add_option("--modes", plan_o.modes, "modes (bs)");
  plan->add_option("--photons", plan_o.photons, "input photons (bs)");
  plan->add_option("--epsilon", plan_o.epsilon, "precision")->required();
  plan->add_option("--delta", plan_o.delta, "failure probability")->required();
  plan->add_option("--p", plan_o.p_list, "estimator order (per mode ok)");
  plan->add_option("--eta", plan_o.eta_list,
                   "damping (default: admissible cap; 0.3 for bs)");
  plan->add_option("--m-copies", plan_o.m_copies, "certified copies M");
  plan->add_option("--out", plan_o.out, "write JSON here");

  SimulateOpts sim_o;
  auto* sim = app.add_subcommand("simulate", "Monte-Carlo prover simulation");
  sim->add_option("--target", sim_o.target_path)->required();
  sim->add_option("--prover", sim_o.prover,
                  "ideal | loss:T | spoof[:a,..] | substitute:F | block:N:...");
  sim->add_option("--shots", sim_o.shots)->required();
  sim->add_option("--seed", sim_o.seed);
  sim->add_option("--out", sim_o.out, "sample CSV path")->required();

  EstimateOpts est_o;
  auto* est = app.add_subcommand("estimate", "Single-mode fidelity estimate");
  est->add_option("--samples", est_o.samples_path)->required();
  est->add_option("--core", est_o.core)->required();
  est->add_option("--p", est_o.p);
  est->add_option("--eta", est_o.eta)->required();
  est->add_option("--m-copies", est_o.m_copies);
  est->add_option("--mode", est_o.mode);
  est->add_option("--out", est_o.out);

  WitnessOpts wit_o;
  auto* wit = app.add_subcommand("witness", "Multimode fidelity witness");
  wit->add_option("--samples", wit_o.samples_path)->required();
  wit->add_option("--target", wit_o.target_path)->required();
  wit->add_option("--p", wit_o.p_list);
  wit->add_option("--eta", wit_o.eta_list)->required();
  wit->add_option("--m-copies", wit_o.m_copies);
  wit->add_option("--epsilon", wit_o.epsilon,
                  "report the i.i.d. failure probability at this precision");
  wit->add_option("--out", wit_o.out);

  VerifyBsOpts bs_o;
  auto* vbs = app.add_subcommand("verify-bs", "Accept/abort verification");
  vbs->add_option("--samples", bs_o.samples_path, "sample CSV");
  vbs->add_option("--prover", bs_o.prover, "stream from a simulated prover");
  vbs->add_option("--shots", bs_o.shots, "shots for --prover mode");
  vbs->add_option("--seed", bs_o.seed);
  vbs->add_option("--target", bs_o.target_path)->required();
  vbs->add_option("--lambda", bs_o.lambda)->required();
  vbs->add_option("--epsilon", bs_o.epsilon)->required();
  vbs->add_option("--p", bs_o.p);
  vbs->add_option("--eta", bs_o.eta);
  vbs->add_option("--m-copies", bs_o.m_copies);
  vbs->add_option("--out", bs_o.out);

  NoniidOpts non_o;
  auto* non = app.add_subcommand("noniid", "Non-i.i.d. post-processing");
  non->add_option("--samples", non_o.samples_path)->required();
  non->add_option("--target", non_o.target_path)->required();
  non->add_option("--nprime", non_o.n_estimate)->required();
  non->add_option("--kenergy", non_o.k_energy)->required();
  non->add_option("--qdiscard", non_o.q_discard)->required();
  non->add_option("--ethreshold", non_o.e_list)->required();
  non->add_option("--sallowance", non_o.s_list)->required();
  non->add_option("--seed", non_o.seed);
  non->add_option("--p", non_o.p_list);
  non->add_option("--eta", non_o.eta_list)->required();
  non->add_option("--m-copies", non_o.m_copies);
  non->add_option("--epsilon", non_o.epsilon,
                  "evaluate the four confidence terms at this precision");
  non->add_option("--out", non_o.out);

  OracleOpts ora_o;
  auto* ora = app.add_subcommand("oracle", "Exact brute-force quantities");
  ora->add_option("--target", ora_o.target_path)->required();
  ora->add_option("--state", ora_o.state_path, "state JSON (prover state)");
  ora->add_option("--quantity", ora_o.quantity,
                  "fidelity | witness | expectation");
  ora->add_option("--k", ora_o.k);
  ora->add_option("--l", ora_o.l);
  ora->add_option("--p", ora_o.p);
  ora->add_option("--eta", ora_o.eta);
  ora->add_option("--compare-mc", ora_o.compare_mc,
                  "emit an exact-vs-Monte-Carlo CSV using this many shots");
  ora->add_option("--seed", ora_o.seed);
  ora->add_option("--kmax", ora_o.kmax, "largest k,l in the comparison table");
  ora->add_option("--out", ora_o.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*plan) return run_plan(plan_o);
    if (*sim) return run_simulate(sim_o);
    if (*est) return run_estimate(est_o);
    if (*wit) return run_witness(wit_o);
    if (*vbs) return run_verify_bs(bs_o);
    if (*non) return run_noniid(non_o);
    if (*ora) return run_oracle(ora_o);
  } catch (const TruncationError& e) {
    std::cerr << "truncation error: " << e.what() << " (deficit "
              << e.deficit() << ")\n";
    return kExitNumeric;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}
