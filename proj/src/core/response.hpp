#pragma once

#include "core/population.hpp"
#include "core/rewards.hpp"

namespace mf {

/// Welfare of a policy relative to treating no one: sum of tau * pi * P over
/// the support.
double utility(const PopulationModel& model, const Policy& policy);

/// Welfare-maximizing rule within the class: treat iff tau > 0 (strict), with
/// the floor epsilon under lower positivity. ExplicitSet is not supported here;
/// enumerate it through brute force instead.
Policy optimal_policy(const PopulationModel& model, const PolicyClass& cls);

/// The agent's reward-maximizing policy. Unconstrained classes use the
/// analytic forms: argmax-set treatment for the averaged rewards (ATO, ATT),
/// sign rules for the total rewards (TO, TT, WeightedTT). ExplicitSet
/// delegates to brute force.
Policy best_response(const RewardSpec& spec, const PopulationModel& model,
                     const PolicyClass& cls);

/// Exhaustive oracle: enumerates every deterministic policy (every subset of
/// the support treated; untreated cells sit at the class floor) or the members
/// of an ExplicitSet, and returns a reward maximizer. Ties break toward fewer
/// treated cells, then the lexicographically smallest treated set.
Policy brute_force_best_response(const RewardSpec& spec, const PopulationModel& model,
                                 const PolicyClass& cls);

struct RegretReport {
  Policy best_response;
  double utility = 0.0;
  double optimal_utility = 0.0;
  double regret = 0.0;
  Policy optimal_policy;
};

/// Best response, its welfare, the class optimum and the gap between them.
RegretReport regret(const RewardSpec& spec, const PopulationModel& model, const PolicyClass& cls);

}  // namespace mf
