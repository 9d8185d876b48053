#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pseudochart/atlas.hpp"
#include "pseudochart/errors.hpp"

namespace pseudochart {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailure = 2,
  kExitBadInput = 3,
  kExitCenterMeetsVariety = 4,
  kExitInconclusiveBudget = 5,
};

int exit_code_for(ErrorCode code);

struct RunConfig {
  std::string subcommand;
  std::string construction;  // p1 | p1n | p2 | pn | bundle
  int n = 2;
  std::vector<int> degrees{0, 2};
  std::uint64_t seed = 1;
  int samples = 25;
  std::string backend = "auto";
  std::uint64_t p = 11;
  int k = 2;
  std::string input;
  std::string curve;
  std::string surface;
  std::string out;

  nlohmann::json to_json() const;
};

struct CommandResult {
  nlohmann::json document;
  int exit_code = kExitOk;
};

std::string version();

/// Accepts the CLI spelling "brute" next to the full backend names.
std::string canonical_backend(const std::string& name);

CommandResult cmd_construct(const RunConfig& cfg);
/// `doc` is a construct document or a bare chart/atlas JSON.
CommandResult cmd_verify(const nlohmann::json& doc, const RunConfig& cfg);
CommandResult verify_chart(const PseudoChart& c, const RunConfig& cfg);
CommandResult verify_atlas(const BundleAtlas& a, const RunConfig& cfg);
CommandResult cmd_obstruct(const RunConfig& cfg);
CommandResult cmd_erratum(const RunConfig& cfg);

/// Dispatches on cfg.subcommand and maps library errors to exit codes.
CommandResult run(const RunConfig& cfg);

}  // namespace pseudochart
