#pragma once

#include <string>

#include "hetverify/protocols.hpp"
#include "hetverify/sampler.hpp"
#include "hetverify/states.hpp"

namespace hetverify {

// File formats. All JSON documents carry a "format" version field; complex
// numbers are [re, im] pairs. Sample files are CSV with header
// `shot,mode,re,im`, LF line endings, one row per (shot, mode), values
// printed with shortest round-trip precision. The metadata sidecar lives next
// to the CSV as <path>.json.

// --- target: "hetverify-target-v1"
std::string target_to_json(const TargetSpec& target);
TargetSpec target_from_json(const std::string& text);
void write_target(const TargetSpec& target, const std::string& path);
TargetSpec read_target(const std::string& path);

// --- density matrices: "hetverify-state-v1" (single-mode, per-mode product,
// or a full hypercube matrix with "dims")
std::string density_to_json(const FockDensityMatrix& rho);
FockDensityMatrix density_from_json(const std::string& text);
struct StateFile {
  std::vector<FockDensityMatrix> product;  // per-mode factors when product
  bool is_product = true;
  MultimodeDensity full;                   // otherwise
};
StateFile read_state(const std::string& path);

// --- samples: CSV + "hetverify-samples-v1" sidecar
void write_batch_csv(const SampleBatch& batch, const std::string& path);
SampleBatch read_batch_csv(const std::string& path);

// --- reports: "hetverify-report-v1"
std::string report_to_json(const VerificationReport& report);
std::string plan_to_json(const PlanResult& plan);

}  // namespace hetverify
