#pragma once
#include <cstdint>
#include <string>

#include "eulerforge/iterate.hpp"
#include "eulerforge/schedule.hpp"

namespace ef {

// Bad or inconsistent configuration; the message names the offending key.
struct ConfigError : ContractError {
  using ContractError::ContractError;
};

struct InitialData {
  AbcFlow abc;
  double t0 = 0.0;
  double ramp = 0.5;
};

// INI-style file: [grid] [initial] [stage] [levels] [schedule] [run]
struct RunConfig {
  StageConfig stage;
  InitialData initial;
  PlanInput schedule;
  int samples = 5;  // evaluation times across the energy window
  std::uint64_t seed = 12345;
  int threads = 1;
  std::string text;  // canonical rendering, hashed into the manifest

  void validate() const;
  std::string canonical() const;
  std::string hash() const;  // sha256 of canonical()
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);
std::string sha256_hex(const std::string& data);

}  // namespace ef
