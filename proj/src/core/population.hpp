#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "core/errors.hpp"

namespace mf {

/// A point in the finite covariate support. `x` indexes the covariates both
/// parties observe; `u` indexes the agent-only covariates and is absent in the
/// full-information setting.
struct CovariatePoint {
  int x = 0;
  std::optional<int> u;

  friend bool operator==(const CovariatePoint&, const CovariatePoint&) = default;
};

struct Policy;

/// Descriptor of the feasible set of treatment rules.
class PolicyClass {
 public:
  enum class Kind { Unconstrained, PositivityConstrained, ExplicitSet };

  static PolicyClass unconstrained();
  /// Lower positivity only: every treatment probability must be >= epsilon.
  static PolicyClass positivity_constrained(double epsilon);
  static PolicyClass explicit_set(std::vector<Policy> members);

  Kind kind() const noexcept { return kind_; }
  double epsilon() const noexcept { return epsilon_; }
  const std::vector<Policy>& members() const noexcept { return members_; }

 private:
  PolicyClass() = default;

  Kind kind_ = Kind::Unconstrained;
  double epsilon_ = 0.0;
  std::vector<Policy> members_;
};

/// Treatment rule: probability of treatment per support point, together with
/// the class it was drawn from.
struct Policy {
  std::vector<double> treat_prob;
  PolicyClass cls = PolicyClass::unconstrained();
};

/// Validates probabilities against [0,1] and the class constraint.
Policy make_policy(std::vector<double> treat_prob, PolicyClass cls = PolicyClass::unconstrained());

/// Immutable finite-population model: covariate support with probabilities and
/// mean potential outcomes under no treatment (`mu0`) and treatment (`mu1`).
class PopulationModel {
 public:
  const std::vector<CovariatePoint>& support() const noexcept { return support_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  const std::vector<double>& mu0() const noexcept { return mu0_; }
  const std::vector<double>& mu1() const noexcept { return mu1_; }
  std::int64_t n() const noexcept { return n_; }

  std::size_t size() const noexcept { return support_.size(); }
  bool has_u() const noexcept { return u_size_ > 0; }
  /// Number of distinct x ids (max id + 1); u_size() is 0 without a U dimension.
  int x_size() const noexcept { return x_size_; }
  int u_size() const noexcept { return u_size_; }

  double tau(std::size_t index) const { return mu1_[index] - mu0_[index]; }

  /// Index of a support point; throws UnknownPoint if absent.
  std::size_t index_of(const CovariatePoint& point) const;

  friend PopulationModel make_population(std::vector<CovariatePoint> support,
                                         std::vector<double> probs, std::vector<double> mu0,
                                         std::vector<double> mu1, std::int64_t n);

 private:
  PopulationModel() = default;

  std::vector<CovariatePoint> support_;
  std::vector<double> probs_;
  std::vector<double> mu0_;
  std::vector<double> mu1_;
  std::int64_t n_ = 1;
  int x_size_ = 0;
  int u_size_ = 0;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

/// Validates and normalizes the inputs. Probability sums within 1e-9 of one
/// are renormalized; larger deviations are rejected.
PopulationModel make_population(std::vector<CovariatePoint> support, std::vector<double> probs,
                                std::vector<double> mu0, std::vector<double> mu1, std::int64_t n);

/// Conditional average treatment effect at a support point.
double tau(const PopulationModel& model, const CovariatePoint& point);

/// P(x) = sum_u P(x,u), indexed by x id. Passthrough for X-only models.
std::vector<double> marginal_x_distribution(const PopulationModel& model);

/// Estimate of the mean conditional untreated potential outcome, defined on
/// the X support only (never on U).
struct Mu0Estimator {
  enum class Source { AuxiliaryUnbiased, AgentUntreated };

  std::vector<double> estimates;  // indexed by x id
  Source source = Source::AuxiliaryUnbiased;
  std::optional<Policy> policy;  // generating policy when source is AgentUntreated
};

Mu0Estimator make_auxiliary_estimator(std::vector<double> estimates);

}  // namespace mf
