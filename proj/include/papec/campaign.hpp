#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "papec/report.hpp"

// Batch campaign runner: seeded random instances, named suites, machine
// readable reports.

namespace papec::campaign {

inline constexpr const char* kSchema = "pa-pec-lab/1";
inline constexpr const char* kVersion = "1.0.0";

struct CampaignConfig {
  std::string suite;
  int n = 2;
  int m = 1;
  int l = 1;
  int d_e = 2;
  int trials = 10;
  std::uint64_t seed = 1;
  double tol = 1e-6;
  std::string out;
  bool corrupt_pec = false;  // test hook: injects a broken recovery channel

  void validate() const;  // throws std::invalid_argument (usage error)
  nlohmann::json to_json() const;
  static CampaignConfig from_json(const nlohmann::json& j);
};

struct TrialRecord {
  int index = 0;
  nlohmann::json instance;  // descriptor; enough to replay the trial
  std::vector<report::Inequality> rows;
};

struct CampaignReport {
  CampaignConfig config;
  std::vector<TrialRecord> records;
  int pass = 0;
  int fail = 0;
  int inconclusive = 0;

  nlohmann::json to_json(bool with_timestamp = true) const;
};

// Deterministic for a fixed config (identical instances and results).
CampaignReport run_campaign(const CampaignConfig& cfg);

// 0: no failures; 1: at least one failed inequality.
int exit_code(const CampaignReport& rep);

const std::vector<std::string>& suite_names();

}  // namespace papec::campaign
