#include "hetverify/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hetverify {

namespace {

using nlohmann::json;

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2)
    throw ValidationError("json: complex values must be [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

json matrix_to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXcd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty())
    throw ValidationError("json: expected a non-empty matrix");
  const size_t rows = j.size();
  const size_t cols = j[0].size();
  Eigen::MatrixXcd m(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols)
      throw ValidationError("json: ragged matrix rows");
    for (size_t c = 0; c < cols; ++c) m(r, c) = complex_from_json(j[r][c]);
  }
  return m;
}

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ValidationError("json: parse error");
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot write file: " + path);
  out << text;
}

void require_format(const json& j, const std::string& expected) {
  if (!j.contains("format") || j["format"] != expected)
    throw ValidationError("json: missing or wrong format field, expected " +
                          expected);
}

char* append_double(char* p, double v) {
  auto res = std::to_chars(p, p + 32, v);
  return res.ptr;
}

}  // namespace

std::string target_to_json(const TargetSpec& target) {
  target.validate();
  json j;
  j["format"] = "hetverify-target-v1";
  j["modes"] = target.modes;
  json cores = json::array();
  for (const auto& c : target.core_states) {
    json coeffs = json::array();
    for (const auto& a : c.coefficients()) coeffs.push_back(complex_to_json(a));
    cores.push_back(std::move(coeffs));
  }
  j["core_states"] = std::move(cores);
  json u = json::array();  // row-major
  for (int r = 0; r < target.modes; ++r)
    for (int c = 0; c < target.modes; ++c)
      u.push_back(complex_to_json(target.unitary.matrix()(r, c)));
  j["unitary"] = std::move(u);
  json beta = json::array(), xi = json::array();
  for (int i = 0; i < target.modes; ++i) {
    beta.push_back(complex_to_json(target.beta(i)));
    xi.push_back(complex_to_json(target.xi(i)));
  }
  j["beta"] = std::move(beta);
  j["xi"] = std::move(xi);
  return j.dump(2);
}

TargetSpec target_from_json(const std::string& text) {
  const json j = parse(text);
  require_format(j, "hetverify-target-v1");
  TargetSpec t;
  t.modes = j.at("modes").get<int>();
  if (t.modes < 1) throw ValidationError("target: modes must be >= 1");
  for (const auto& core : j.at("core_states")) {
    std::vector<Complex> coeffs;
    for (const auto& a : core) coeffs.push_back(complex_from_json(a));
    t.core_states.emplace_back(std::move(coeffs));
  }
  const auto& u = j.at("unitary");
  if (static_cast<int>(u.size()) != t.modes * t.modes)
    throw ValidationError("target: unitary must have modes^2 entries");
  Eigen::MatrixXcd mat(t.modes, t.modes);
  for (int r = 0; r < t.modes; ++r)
    for (int c = 0; c < t.modes; ++c)
      mat(r, c) = complex_from_json(u[r * t.modes + c]);
  t.unitary = PassiveUnitary(std::move(mat));
  t.beta.resize(t.modes);
  t.xi.resize(t.modes);
  const auto& beta = j.at("beta");
  const auto& xi = j.at("xi");
  if (static_cast<int>(beta.size()) != t.modes ||
      static_cast<int>(xi.size()) != t.modes)
    throw ValidationError("target: beta/xi length mismatch");
  for (int i = 0; i < t.modes; ++i) {
    t.beta(i) = complex_from_json(beta[i]);
    t.xi(i) = complex_from_json(xi[i]);
  }
  t.validate();
  return t;
}

void write_target(const TargetSpec& target, const std::string& path) {
  write_file(path, target_to_json(target) + "\n");
}

TargetSpec read_target(const std::string& path) {
  return target_from_json(read_file(path));
}

std::string density_to_json(const FockDensityMatrix& rho) {
  json j;
  j["format"] = "hetverify-state-v1";
  j["dim"] = rho.dim();
  j["entries"] = matrix_to_json(rho.matrix());
  return j.dump(2);
}

FockDensityMatrix density_from_json(const std::string& text) {
  const json j = parse(text);
  require_format(j, "hetverify-state-v1");
  return FockDensityMatrix(matrix_from_json(j.at("entries")));
}

StateFile read_state(const std::string& path) {
  const json j = parse(read_file(path));
  require_format(j, "hetverify-state-v1");
  StateFile out;
  if (j.contains("product")) {
    for (const auto& factor : j["product"])
      out.product.emplace_back(matrix_from_json(factor.at("entries")));
    out.is_product = true;
  } else if (j.contains("dims")) {
    const auto dims = j["dims"].get<std::vector<int>>();
    if (dims.empty()) throw ValidationError("state: empty dims");
    for (size_t i = 1; i < dims.size(); ++i)
      if (dims[i] != dims[0])
        throw ValidationError("state: per-mode dims must be equal");
    out.is_product = false;
    out.full.modes = static_cast<int>(dims.size());
    out.full.dim = dims[0];
    out.full.rho = matrix_from_json(j.at("entries"));
    out.full.validate();
  } else {
    out.product.emplace_back(matrix_from_json(j.at("entries")));
    out.is_product = true;
  }
  return out;
}

void write_batch_csv(const SampleBatch& batch, const std::string& path) {
  batch.validate();
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw ParameterError("cannot write file: " + path);
  std::string buf;
  buf.reserve(1 << 20);
  buf += "shot,mode,re,im\n";
  char tmp[96];
  for (int64_t s = 0; s < batch.shots; ++s) {
    for (int m = 0; m < batch.modes; ++m) {
      char* p = tmp;
      p = std::to_chars(p, p + 24, s).ptr;
      *p++ = ',';
      p = std::to_chars(p, p + 12, m).ptr;
      *p++ = ',';
      const Complex v = batch.at(s, m);
      p = append_double(p, v.real());
      *p++ = ',';
      p = append_double(p, v.imag());
      *p++ = '\n';
      buf.append(tmp, p - tmp);
      if (buf.size() > (1 << 20) - 128) {
        std::fwrite(buf.data(), 1, buf.size(), f);
        buf.clear();
      }
    }
  }
  std::fwrite(buf.data(), 1, buf.size(), f);
  std::fclose(f);

  json meta;
  meta["format"] = "hetverify-samples-v1";
  meta["seed"] = batch.seed;
  meta["prover_tag"] = batch.prover_tag;
  meta["modes"] = batch.modes;
  meta["shots"] = batch.shots;
  write_file(path + ".json", meta.dump(2) + "\n");
}

SampleBatch read_batch_csv(const std::string& path) {
  SampleBatch batch;
  // Sidecar first: it fixes the shape.
  const json meta = parse(read_file(path + ".json"));
  require_format(meta, "hetverify-samples-v1");
  batch.modes = meta.at("modes").get<int>();
  batch.shots = meta.at("shots").get<int64_t>();
  batch.seed = meta.at("seed").get<uint64_t>();
  batch.prover_tag = meta.value("prover_tag", "");
  batch.data.assign(static_cast<size_t>(batch.shots) * batch.modes,
                    Complex(0.0));

  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("shot,mode", 0) != 0)
    throw ValidationError("sample csv: missing header");
  const auto parse_field = [&](const char*& p, const char* end,
                               auto& value) {
    auto res = std::from_chars(p, end, value);
    if (res.ec != std::errc()) throw ValidationError("sample csv: bad field");
    p = res.ptr;
  };
  size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const char* p = line.data();
    const char* end = p + line.size();
    int64_t shot;
    int mode;
    double re, im;
    parse_field(p, end, shot);
    if (p == end || *p++ != ',') throw ValidationError("sample csv: bad row");
    parse_field(p, end, mode);
    if (p == end || *p++ != ',') throw ValidationError("sample csv: bad row");
    parse_field(p, end, re);
    if (p == end || *p++ != ',') throw ValidationError("sample csv: bad row");
    parse_field(p, end, im);
    if (shot < 0 || shot >= batch.shots || mode < 0 || mode >= batch.modes)
      throw ValidationError("sample csv: index outside sidecar shape");
    batch.data[shot * batch.modes + mode] = Complex(re, im);
    ++rows;
  }
  if (rows != static_cast<size_t>(batch.shots) * batch.modes)
    throw ValidationError("sample csv: row count does not match sidecar");
  batch.validate();
  return batch;
}

std::string plan_to_json(const PlanResult& plan) {
  json j;
  j["shots_required"] = plan.shots_required;
  j["formula_tag"] = plan.formula_tag;
  json consts = json::array();
  for (const auto& c : plan.constants) {
    json one;
    one["a"] = c.a;
    one["b"] = c.b;
    one["k_big"] = c.k_big;
    one["eta_max"] = c.eta_max;
    one["g_cp"] = c.g_cp;
    consts.push_back(std::move(one));
  }
  j["constants"] = std::move(consts);
  return j.dump(2);
}

std::string report_to_json(const VerificationReport& report) {
  json j;
  j["format"] = "hetverify-report-v1";
  if (report.accept) j["decision"] = *report.accept ? "accept" : "abort";
  j["witness"] = report.witness;
  if (report.threshold) j["threshold"] = *report.threshold;
  j["per_mode_fidelity"] = report.per_mode_fidelity;
  if (report.tvd_bound) j["tvd_bound"] = *report.tvd_bound;
  j["failure_probabilities"] = report.failure_probabilities;
  if (report.plan_echo) j["plan"] = json::parse(plan_to_json(*report.plan_echo));
  return j.dump(2);
}

}  // namespace hetverify
