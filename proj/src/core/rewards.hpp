#pragma once

#include <optional>
#include <span>
#include <vector>

#include "core/population.hpp"

namespace mf {

enum class RewardKind { ATO, ATT, TO, TT, WeightedTT };

const char* reward_kind_name(RewardKind kind);
RewardKind reward_kind_from_name(const std::string& name);
bool reward_uses_estimator(RewardKind kind);

/// One of the five reward functions the principal may publish. The estimator
/// is required for ATT, TT and WeightedTT; the weight table (per x id,
/// strictly positive) only for WeightedTT.
struct RewardSpec {
  RewardKind kind = RewardKind::TT;
  std::optional<Mu0Estimator> mu0_hat;
  std::optional<std::vector<double>> weight_g;
};

RewardSpec reward_ato();
RewardSpec reward_to();
RewardSpec reward_att(Mu0Estimator mu0_hat);
RewardSpec reward_tt(Mu0Estimator mu0_hat);
RewardSpec reward_weighted_tt(Mu0Estimator mu0_hat, std::vector<double> weight_g);

/// Exact expectation of the reward under the policy. Averaged rewards (ATO,
/// ATT) use the ratio of expectations and return 0 when the treated mass is
/// zero. Under a joint X-by-U model the outcome terms use mu(x,u) while the
/// estimator and weight substitute their x-only tables.
double expected_reward(const RewardSpec& spec, const PopulationModel& model, const Policy& policy);

/// A realized observational row: covariate id, assigned treatment, outcome.
struct SampleRow {
  int x = 0;
  int treated = 0;
  double y = 0.0;
};

/// The literal finite-sample reward statistic over realized rows; used for
/// Monte Carlo validation of expected_reward.
double realized_reward(const RewardSpec& spec, std::span<const SampleRow> rows,
                       const Mu0Estimator& mu0_hat);

}  // namespace mf
