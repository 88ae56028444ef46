// The property suite behind `cubic-strata verify`: algebraic identities,
// equivariances, oracle agreements and the wall-crossing relations, all
// seeded and deterministic.
#pragma once

#include "types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cubicstrata {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::vector<CheckResult> run_verification(std::uint64_t seed,
                                          const Tolerances& tol = {});

std::string verification_json(const std::vector<CheckResult>& results);

// Shared by certificates and grid rows.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

// Tolerances helpers used by the CLI and the C API: name-addressed knobs.
bool set_tolerance(Tolerances& tol, const std::string& name, double value);
std::string tolerances_json(const Tolerances& tol);

}  // namespace cubicstrata
