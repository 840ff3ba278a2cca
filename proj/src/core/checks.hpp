#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "core/asymmetry.hpp"
#include "core/ranking.hpp"
#include "core/response.hpp"

namespace mf {

/// Seeded generators for the randomized property checks. Mean outcomes are
/// uniform on [-5, 5]; probabilities are renormalized positives.
PopulationModel random_model(std::mt19937_64& rng, int max_support = 6);
PopulationModel random_joint_model(std::mt19937_64& rng, int max_x = 4, int max_u = 4);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// The deterministic property suite: oracle agreement for all five reward
/// functions, the zero-regret and bounded-regret guarantees, the asymmetry
/// bounds with both estimator sources, tightness of the marginal-error bound,
/// ranking preservation under reweighting, and the composite-outcome range.
/// Identical seeds yield identical results.
std::vector<CheckResult> run_property_checks(std::uint64_t seed);

bool all_passed(const std::vector<CheckResult>& results);

std::string checks_to_json(const std::vector<CheckResult>& results, std::uint64_t seed);

}  // namespace mf
