#pragma once

#include <string>
#include <vector>

#include "core/response.hpp"

namespace mf {

/// One scored agent: its own covariate distribution and treated outcomes over
/// the common X support, the shared untreated outcomes, and its population
/// size. Ranking operates on X-only models with dense x ids (point i has
/// x id i).
struct AgentProfile {
  std::string id;
  PopulationModel model;
  std::int64_t n_k = 1;
  PolicyClass cls = PolicyClass::unconstrained();
};

AgentProfile make_agent(std::string id, PopulationModel model,
                        PolicyClass cls = PolicyClass::unconstrained());

/// Per-x weight g_k(x) = P0(x) / (n_k * Pk(x)): the normalized discrete
/// Radon-Nikodym derivative of the reference distribution with respect to the
/// agent's distribution.
std::vector<double> reweight_g(const std::vector<double>& reference, const AgentProfile& agent);

/// Expected reward of the agent's best response under its own model and class.
double agent_score(const AgentProfile& agent, const RewardSpec& spec);

enum class ViolationKind { Uniform, Relative };

struct RankingViolation {
  std::string better;  // the agent whose effects dominate
  std::string worse;
  ViolationKind kind = ViolationKind::Uniform;
};

struct RankingReport {
  std::vector<std::string> ids;
  std::vector<double> scores;            // aligned with ids
  std::vector<std::string> ordering;     // ids sorted by descending score, ties by id
  std::vector<RankingViolation> violations;
  bool relative_applicable = true;       // false when some tau is negative
  bool reweighted = false;
};

/// Scores every agent (unweighted TT, or WeightedTT with the reference
/// reweighting) and checks both rank-preservation properties on every ordered
/// pair whose premise holds. The relative audit is only applied when all
/// agents' treatment effects are nonnegative.
RankingReport audit_rankings(const std::vector<AgentProfile>& agents,
                             const std::vector<double>& reference, bool use_reweighting);

}  // namespace mf
