#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

#include "limid/model.hpp"

namespace limid {

struct OracleLimits {
  std::uint64_t max_cells = std::uint64_t{1} << 22;  // full-configuration sums
  std::uint64_t max_work = std::uint64_t{1} << 26;   // strategies x chance cells
};

struct OracleCapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OracleResult {
  double best_eu = 0;
  Strategy best_strategy;
  std::uint64_t evaluations = 0;  // strategies enumerated
};

// Product of every CPT and policy entry at a full configuration (config is
// indexed by node id, value-node entries ignored).
double joint_mass(const Limid& model, const Strategy& strategy,
                  std::span<const int> config);

// Expected utility by direct summation of joint_mass * total_utility over
// every configuration of the non-value nodes. No graph algorithms involved.
double oracle_eu(const Limid& model, const Strategy& strategy,
                 const OracleLimits& limits = {});

// Global maximum over all pure strategies, enumerated lexicographically by
// (decision id, parent configuration, alternative); the first maximum is
// kept. Each strategy is scored by summing over chance configurations with
// decisions forced in topological order.
OracleResult oracle_global_max(const Limid& model, const OracleLimits& limits = {});

}  // namespace limid
