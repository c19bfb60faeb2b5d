#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "nlslab/nonlinearity.hpp"

namespace nlslab {

enum class HypothesisStatus { Pass, Fail, HeuristicPass };

std::string to_string(HypothesisStatus status);

struct HypothesisEntry {
  std::string id;
  HypothesisStatus status = HypothesisStatus::Fail;
  // "exact", "structural" or "sampled"
  std::string method;
  std::string detail;
  nlohmann::json witnesses = nlohmann::json::object();
};

struct HypothesisReport {
  std::vector<HypothesisEntry> entries;
  bool mass_resonant = false;
  std::vector<double> sigma;

  const HypothesisEntry& at(const std::string& id) const;
  bool passed() const;
};

HypothesisReport validate_hypotheses(const SystemSpec& spec, std::uint64_t seed = 42);

nlohmann::json to_json(const HypothesisReport& report);

}  // namespace nlslab
