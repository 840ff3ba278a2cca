#include "core/response.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace mf {

namespace {

constexpr double kArgmaxTolerance = 1e-12;
constexpr std::size_t kBruteForceCap = 20;

/// Per-point value whose sign (and argmax, for the averaged rewards) drives
/// the agent's decision. For the estimator-based rewards this is
/// mu1(point) - mu0_hat(x), weighted by g for WeightedTT.
std::vector<double> cell_values(const RewardSpec& spec, const PopulationModel& model) {
  const std::size_t s = model.size();
  std::vector<double> values(s, 0.0);
  const Mu0Estimator* est = nullptr;
  if (reward_uses_estimator(spec.kind)) {
    if (!spec.mu0_hat) {
      fail(ErrorCode::MissingEstimator,
           std::string(reward_kind_name(spec.kind)) + " requires a mu0 estimator");
    }
    if (spec.mu0_hat->estimates.size() < static_cast<std::size_t>(model.x_size())) {
      fail(ErrorCode::EstimatorSupportGap, "estimator does not cover the X support");
    }
    est = &*spec.mu0_hat;
  }
  const std::vector<double>* weight = nullptr;
  if (spec.kind == RewardKind::WeightedTT) {
    if (!spec.weight_g || spec.weight_g->size() < static_cast<std::size_t>(model.x_size())) {
      fail(ErrorCode::MissingWeight, "WeightedTT requires a weight per x");
    }
    weight = &*spec.weight_g;
  }
  for (std::size_t i = 0; i < s; ++i) {
    const auto x = static_cast<std::size_t>(model.support()[i].x);
    switch (spec.kind) {
      case RewardKind::ATO:
      case RewardKind::TO:
        values[i] = model.mu1()[i];
        break;
      case RewardKind::ATT:
      case RewardKind::TT:
        values[i] = model.mu1()[i] - est->estimates[x];
        break;
      case RewardKind::WeightedTT:
        values[i] = (model.mu1()[i] - est->estimates[x]) * (*weight)[x];
        break;
    }
  }
  return values;
}

/// True when the treated set encoded by `a` precedes the one encoded by `b`:
/// fewer treated cells first, then the set containing the smaller index.
bool treated_set_precedes(std::uint32_t a, std::uint32_t b, std::size_t s) {
  const int ca = std::popcount(a);
  const int cb = std::popcount(b);
  if (ca != cb) return ca < cb;
  for (std::size_t i = 0; i < s; ++i) {
    const bool ba = (a >> i) & 1u;
    const bool bb = (b >> i) & 1u;
    if (ba != bb) return ba;
  }
  return false;
}

Policy policy_from_mask(std::uint32_t mask, std::size_t s, double floor, const PolicyClass& cls) {
  std::vector<double> pi(s, floor);
  for (std::size_t i = 0; i < s; ++i) {
    if ((mask >> i) & 1u) pi[i] = 1.0;
  }
  return make_policy(std::move(pi), cls);
}

}  // namespace

double utility(const PopulationModel& model, const Policy& policy) {
  if (policy.treat_prob.size() != model.size()) {
    fail(ErrorCode::LengthMismatch, "policy is not defined on the model support");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    total += model.tau(i) * policy.treat_prob[i] * model.probs()[i];
  }
  return total;
}

Policy optimal_policy(const PopulationModel& model, const PolicyClass& cls) {
  if (cls.kind() == PolicyClass::Kind::ExplicitSet) {
    fail(ErrorCode::UnsupportedClass, "optimal_policy handles Unconstrained and "
                                      "PositivityConstrained classes only");
  }
  const double floor = cls.kind() == PolicyClass::Kind::PositivityConstrained ? cls.epsilon() : 0.0;
  std::vector<double> pi(model.size(), floor);
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (model.tau(i) > 0.0) pi[i] = 1.0;
  }
  return make_policy(std::move(pi), cls);
}

Policy best_response(const RewardSpec& spec, const PopulationModel& model,
                     const PolicyClass& cls) {
  if (cls.kind() == PolicyClass::Kind::ExplicitSet) {
    return brute_force_best_response(spec, model, cls);
  }
  if (cls.kind() != PolicyClass::Kind::Unconstrained) {
    fail(ErrorCode::UnsupportedClass,
         "analytic best responses are defined for the unconstrained class");
  }

  const auto values = cell_values(spec, model);
  std::vector<double> pi(model.size(), 0.0);

  if (spec.kind == RewardKind::ATO || spec.kind == RewardKind::ATT) {
    // Averaged rewards: treat the entire argmax set of positive-mass cells,
    // provided the maximum is strictly positive.
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < model.size(); ++i) {
      if (model.probs()[i] > 0.0) best = std::max(best, values[i]);
    }
    if (best > 0.0) {
      for (std::size_t i = 0; i < model.size(); ++i) {
        if (model.probs()[i] > 0.0 && values[i] > 0.0 && values[i] >= best - kArgmaxTolerance) {
          pi[i] = 1.0;
        }
      }
    }
  } else {
    // Total rewards: treat every cell with a strictly positive value.
    for (std::size_t i = 0; i < model.size(); ++i) {
      if (values[i] > 0.0) pi[i] = 1.0;
    }
  }
  return make_policy(std::move(pi), cls);
}

Policy brute_force_best_response(const RewardSpec& spec, const PopulationModel& model,
                                 const PolicyClass& cls) {
  if (cls.kind() == PolicyClass::Kind::ExplicitSet) {
    const auto& members = cls.members();
    double best_value = -std::numeric_limits<double>::infinity();
    std::size_t best_index = 0;
    for (std::size_t i = 0; i < members.size(); ++i) {
      const double value = expected_reward(spec, model, members[i]);
      if (value > best_value) {
        best_value = value;
        best_index = i;
      }
    }
    return members[best_index];
  }

  const std::size_t s = model.size();
  if (s > kBruteForceCap) {
    fail(ErrorCode::SupportTooLarge, "brute force enumerates at most 2^20 policies");
  }
  const double floor = cls.kind() == PolicyClass::Kind::PositivityConstrained ? cls.epsilon() : 0.0;
  const std::uint32_t limit = 1u << s;

  double best_value = -std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    best_value = std::max(best_value,
                          expected_reward(spec, model, policy_from_mask(mask, s, floor, cls)));
  }

  bool found = false;
  std::uint32_t best_mask = 0;
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    const double value = expected_reward(spec, model, policy_from_mask(mask, s, floor, cls));
    if (value >= best_value - kArgmaxTolerance) {
      if (!found || treated_set_precedes(mask, best_mask, s)) {
        best_mask = mask;
        found = true;
      }
    }
  }
  return policy_from_mask(best_mask, s, floor, cls);
}

RegretReport regret(const RewardSpec& spec, const PopulationModel& model, const PolicyClass& cls) {
  Policy br = best_response(spec, model, cls);

  Policy opt;
  if (cls.kind() == PolicyClass::Kind::ExplicitSet) {
    const auto& members = cls.members();
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_index = 0;
    for (std::size_t i = 0; i < members.size(); ++i) {
      const double v = utility(model, members[i]);
      if (v > best) {
        best = v;
        best_index = i;
      }
    }
    opt = members[best_index];
  } else {
    opt = optimal_policy(model, cls);
  }

  RegretReport report;
  report.utility = utility(model, br);
  report.optimal_utility = utility(model, opt);
  report.regret = report.optimal_utility - report.utility;
  report.best_response = std::move(br);
  report.optimal_policy = std::move(opt);
  return report;
}

}  // namespace mf
