#include "core/rewards.hpp"

#include <cmath>
#include <string>

#include "core/numeric.hpp"

namespace mf {

const char* reward_kind_name(RewardKind kind) {
  switch (kind) {
    case RewardKind::ATO: return "ATO";
    case RewardKind::ATT: return "ATT";
    case RewardKind::TO: return "TO";
    case RewardKind::TT: return "TT";
    case RewardKind::WeightedTT: return "WeightedTT";
  }
  return "?";
}

RewardKind reward_kind_from_name(const std::string& name) {
  if (name == "ATO") return RewardKind::ATO;
  if (name == "ATT") return RewardKind::ATT;
  if (name == "TO") return RewardKind::TO;
  if (name == "TT") return RewardKind::TT;
  if (name == "WeightedTT") return RewardKind::WeightedTT;
  fail(ErrorCode::ParseError, "unknown reward kind '" + name + "'");
}

bool reward_uses_estimator(RewardKind kind) {
  return kind == RewardKind::ATT || kind == RewardKind::TT || kind == RewardKind::WeightedTT;
}

RewardSpec reward_ato() { return RewardSpec{RewardKind::ATO, std::nullopt, std::nullopt}; }

RewardSpec reward_to() { return RewardSpec{RewardKind::TO, std::nullopt, std::nullopt}; }

RewardSpec reward_att(Mu0Estimator mu0_hat) {
  return RewardSpec{RewardKind::ATT, std::move(mu0_hat), std::nullopt};
}

RewardSpec reward_tt(Mu0Estimator mu0_hat) {
  return RewardSpec{RewardKind::TT, std::move(mu0_hat), std::nullopt};
}

RewardSpec reward_weighted_tt(Mu0Estimator mu0_hat, std::vector<double> weight_g) {
  for (double g : weight_g) {
    if (!std::isfinite(g) || g <= 0.0) {
      fail(ErrorCode::MissingWeight, "WeightedTT requires a strictly positive weight per x");
    }
  }
  return RewardSpec{RewardKind::WeightedTT, std::move(mu0_hat), std::move(weight_g)};
}

namespace {

const Mu0Estimator& require_estimator(const RewardSpec& spec, int x_size) {
  if (!spec.mu0_hat) {
    fail(ErrorCode::MissingEstimator,
         std::string(reward_kind_name(spec.kind)) + " requires a mu0 estimator");
  }
  if (spec.mu0_hat->estimates.size() < static_cast<std::size_t>(x_size)) {
    fail(ErrorCode::EstimatorSupportGap, "estimator does not cover the X support");
  }
  return *spec.mu0_hat;
}

const std::vector<double>& require_weight(const RewardSpec& spec, int x_size) {
  if (!spec.weight_g) {
    fail(ErrorCode::MissingWeight, "WeightedTT requires a weight table");
  }
  if (spec.weight_g->size() < static_cast<std::size_t>(x_size)) {
    fail(ErrorCode::MissingWeight, "weight table does not cover the X support");
  }
  return *spec.weight_g;
}

}  // namespace

double expected_reward(const RewardSpec& spec, const PopulationModel& model,
                       const Policy& policy) {
  const std::size_t s = model.size();
  if (policy.treat_prob.size() != s) {
    fail(ErrorCode::LengthMismatch, "policy is not defined on the model support");
  }

  const Mu0Estimator* est = nullptr;
  const std::vector<double>* weight = nullptr;
  if (reward_uses_estimator(spec.kind)) {
    est = &require_estimator(spec, model.x_size());
  }
  if (spec.kind == RewardKind::WeightedTT) {
    weight = &require_weight(spec, model.x_size());
  }

  double treated_mass = 0.0;
  double value = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    const double mass = policy.treat_prob[i] * model.probs()[i];
    treated_mass += mass;
    const int x = model.support()[i].x;
    switch (spec.kind) {
      case RewardKind::ATO:
      case RewardKind::TO:
        value += model.mu1()[i] * mass;
        break;
      case RewardKind::ATT:
      case RewardKind::TT:
        value += (model.mu1()[i] - est->estimates[static_cast<std::size_t>(x)]) * mass;
        break;
      case RewardKind::WeightedTT:
        value += (model.mu1()[i] - est->estimates[static_cast<std::size_t>(x)]) *
                 (*weight)[static_cast<std::size_t>(x)] * mass;
        break;
    }
  }

  switch (spec.kind) {
    case RewardKind::ATO:
    case RewardKind::ATT:
      return treated_mass > 0.0 ? value / treated_mass : 0.0;
    case RewardKind::TO:
    case RewardKind::TT:
    case RewardKind::WeightedTT:
      return static_cast<double>(model.n()) * value;
  }
  return 0.0;
}

double realized_reward(const RewardSpec& spec, std::span<const SampleRow> rows,
                       const Mu0Estimator& mu0_hat) {
  if (rows.empty()) {
    fail(ErrorCode::EmptySample, "realized reward requires at least one row");
  }

  int max_x = 0;
  for (const auto& row : rows) {
    max_x = std::max(max_x, row.x);
  }
  const bool needs_estimator = reward_uses_estimator(spec.kind);
  if (needs_estimator && mu0_hat.estimates.size() < static_cast<std::size_t>(max_x + 1)) {
    fail(ErrorCode::EstimatorSupportGap, "estimator does not cover the sample's X values");
  }
  const std::vector<double>* weight = nullptr;
  if (spec.kind == RewardKind::WeightedTT) {
    weight = &require_weight(spec, max_x + 1);
  }

  double total = 0.0;
  std::int64_t treated = 0;
  for (const auto& row : rows) {
    if (row.treated == 0) continue;
    ++treated;
    const auto x = static_cast<std::size_t>(row.x);
    switch (spec.kind) {
      case RewardKind::ATO:
      case RewardKind::TO:
        total += row.y;
        break;
      case RewardKind::ATT:
      case RewardKind::TT:
        total += row.y - mu0_hat.estimates[x];
        break;
      case RewardKind::WeightedTT:
        total += (row.y - mu0_hat.estimates[x]) * (*weight)[x];
        break;
    }
  }

  switch (spec.kind) {
    case RewardKind::ATO:
    case RewardKind::ATT:
      return treated > 0 ? total / static_cast<double>(treated) : 0.0;
    case RewardKind::TO:
    case RewardKind::TT:
    case RewardKind::WeightedTT:
      return total;
  }
  return 0.0;
}

}  // namespace mf
