#include "core/population.hpp"

#include <algorithm>
#include <cmath>

#include "core/numeric.hpp"

namespace mf {

namespace {

constexpr double kSumTolerance = 1e-9;

std::uint64_t point_key(const CovariatePoint& point) {
  // u ids are offset by one so that "no u" cannot collide with u = 0.
  const auto u_part = static_cast<std::uint32_t>(point.u ? *point.u + 1 : 0);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(point.x)) << 32) | u_part;
}

}  // namespace

PolicyClass PolicyClass::unconstrained() { return PolicyClass(); }

PolicyClass PolicyClass::positivity_constrained(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    fail(ErrorCode::InvalidArgument, "positivity epsilon must lie in (0, 1)");
  }
  PolicyClass cls;
  cls.kind_ = Kind::PositivityConstrained;
  cls.epsilon_ = epsilon;
  return cls;
}

PolicyClass PolicyClass::explicit_set(std::vector<Policy> members) {
  if (members.empty()) {
    fail(ErrorCode::InvalidArgument, "explicit policy set must not be empty");
  }
  PolicyClass cls;
  cls.kind_ = Kind::ExplicitSet;
  cls.members_ = std::move(members);
  return cls;
}

Policy make_policy(std::vector<double> treat_prob, PolicyClass cls) {
  for (double p : treat_prob) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      fail(ErrorCode::InvalidArgument, "treatment probabilities must lie in [0, 1]");
    }
    if (cls.kind() == PolicyClass::Kind::PositivityConstrained && p < cls.epsilon()) {
      fail(ErrorCode::InvalidArgument,
           "positivity-constrained policy requires treat_prob >= epsilon");
    }
  }
  return Policy{std::move(treat_prob), std::move(cls)};
}

std::size_t PopulationModel::index_of(const CovariatePoint& point) const {
  auto it = index_.find(point_key(point));
  if (it == index_.end()) {
    fail(ErrorCode::UnknownPoint, "covariate point is not in the support");
  }
  return it->second;
}

PopulationModel make_population(std::vector<CovariatePoint> support, std::vector<double> probs,
                                std::vector<double> mu0, std::vector<double> mu1,
                                std::int64_t n) {
  const std::size_t s = support.size();
  if (probs.size() != s || mu0.size() != s || mu1.size() != s) {
    fail(ErrorCode::LengthMismatch, "support, probs, mu0 and mu1 must have equal length");
  }
  if (n <= 0) {
    fail(ErrorCode::NonPositiveN, "population size must be a positive integer");
  }
  if (!all_finite(mu0) || !all_finite(mu1)) {
    fail(ErrorCode::InvalidArgument, "mu values must be finite");
  }

  bool any_u = false;
  bool all_u = true;
  for (const auto& point : support) {
    if (point.x < 0 || (point.u && *point.u < 0)) {
      fail(ErrorCode::InvalidArgument, "support ids must be nonnegative");
    }
    if (point.u) {
      any_u = true;
    } else {
      all_u = false;
    }
  }
  if (any_u && !all_u) {
    fail(ErrorCode::InvalidArgument, "support mixes points with and without a U id");
  }

  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      fail(ErrorCode::NegativeProbability, "probabilities must be nonnegative");
    }
  }
  const double sum = kahan_sum(probs);
  if (std::abs(sum - 1.0) > kSumTolerance) {
    fail(ErrorCode::ProbabilitySumOutOfTolerance,
         "probabilities sum to " + std::to_string(sum) + ", expected 1");
  }
  for (double& p : probs) {
    p /= sum;
  }

  PopulationModel model;
  model.support_ = std::move(support);
  model.probs_ = std::move(probs);
  model.mu0_ = std::move(mu0);
  model.mu1_ = std::move(mu1);
  model.n_ = n;
  for (std::size_t i = 0; i < model.support_.size(); ++i) {
    const auto& point = model.support_[i];
    model.x_size_ = std::max(model.x_size_, point.x + 1);
    if (point.u) {
      model.u_size_ = std::max(model.u_size_, *point.u + 1);
    }
    model.index_.emplace(point_key(point), i);  // first occurrence wins
  }
  return model;
}

double tau(const PopulationModel& model, const CovariatePoint& point) {
  return model.tau(model.index_of(point));
}

std::vector<double> marginal_x_distribution(const PopulationModel& model) {
  if (!model.has_u()) {
    return model.probs();
  }
  std::vector<double> marginal(static_cast<std::size_t>(model.x_size()), 0.0);
  for (std::size_t i = 0; i < model.size(); ++i) {
    marginal[static_cast<std::size_t>(model.support()[i].x)] += model.probs()[i];
  }
  return marginal;
}

Mu0Estimator make_auxiliary_estimator(std::vector<double> estimates) {
  if (!all_finite(estimates)) {
    fail(ErrorCode::InvalidArgument, "estimator values must be finite");
  }
  return Mu0Estimator{std::move(estimates), Mu0Estimator::Source::AuxiliaryUnbiased, std::nullopt};
}

}  // namespace mf
