#pragma once

#include <string>
#include <vector>

#include "core/response.hpp"

namespace mf {

/// mu0(x) = sum_u mu0(x,u) P(u|x); tagged as the auxiliary-unbiased source.
Mu0Estimator marginalize_mu0(const PopulationModel& model);

/// Exact expected absolute gap E|mu0(X) - mu0(X,U)| (the tightest valid bound
/// under the marginal-error assumption).
double gamma_marg(const PopulationModel& model);

/// Exact E[Delta(X,U)] where Delta(x,u) is the largest spread of mu0(x,.) over
/// the U values present at x.
double gamma_max(const PopulationModel& model);

/// The confounded estimate formed from the agent's untreated units:
/// mu0_hat(x) = sum_u mu0(x,u)(1-pi(x,u))P(x,u) / sum_u (1-pi(x,u))P(x,u).
/// Requires positive untreated mass at every x.
Mu0Estimator confounded_mu0_hat(const PopulationModel& model, const Policy& policy);

struct AsymmetryReport {
  double gamma_marg = 0.0;
  double gamma_max = 0.0;
  double regret = 0.0;
  double bound_marg = 0.0;  // 2 * gamma_marg
  double bound_max = 0.0;   // 2 * gamma_max
  double slack_marg = 0.0;
  double slack_max = 0.0;
  Mu0Estimator::Source estimator_source = Mu0Estimator::Source::AuxiliaryUnbiased;
  bool converged = true;  // fixed-point status for the agent-untreated source
  int iterations = 0;
  Policy agent_policy;
  Policy optimal;
  double utility = 0.0;
  double optimal_utility = 0.0;
  std::vector<double> mu0_hat;  // the estimator table the agent faced
};

struct AsymmetryOptions {
  /// Interior floor/ceiling for the agent-untreated source: policies take
  /// values in {eps, 1-eps} so the untreated pool stays populated.
  double interior_eps = 1e-3;
  int max_iterations = 100;
};

/// Regret of the agent's best response to TT under the given estimator,
/// against the welfare-optimal rule of the same policy class, plus both gamma
/// statistics and bound slacks. With the agent-untreated source the estimator
/// and the policy depend on each other; the report carries the fixed-point
/// iteration outcome, seeded by the estimator's own generating policy when it
/// has one.
AsymmetryReport asym_regret(const PopulationModel& model, const Mu0Estimator& mu0_hat,
                            const AsymmetryOptions& options = {});

/// Canonical starting point for the agent-untreated fixed point: the
/// confounded estimate induced by the interior best response to the
/// marginalized mu0.
Mu0Estimator agent_untreated_seed(const PopulationModel& model, double interior_eps = 1e-3);

/// The worst-case family for the marginal-error bound: a single x, U uniform
/// on {0,1}, mu1 = (beta, 0) and mu0 = (alpha, -alpha). Requires
/// 0 < beta < alpha so the optimal rule flips against the agent's.
PopulationModel tightness_model(double alpha, double beta);

/// Empirical joint distribution over full feature vectors with synthetic mean
/// potential outcomes; the raw material for the accumulation curves.
struct FeatureFrame {
  std::vector<std::string> feature_names;
  std::vector<std::vector<std::string>> level_labels;  // per feature, per value id
  std::vector<std::vector<int>> values;                // per point, per feature
  std::vector<double> probs;
  std::vector<double> mu0;
  std::vector<double> mu1;
  std::int64_t n = 1;

  std::size_t size() const noexcept { return values.size(); }
  std::size_t feature_count() const noexcept { return feature_names.size(); }
};

/// Per-point empirical conditional mean of mu0 given the listed features:
/// points are grouped by their values on `features` and each point receives
/// its group mean. An empty feature list yields the grand mean.
std::vector<double> grouped_mu0(const FeatureFrame& frame, const std::vector<int>& features);

/// gamma_marg and TT regret when the principal conditions only on `features`
/// while the agent sees the full vector.
struct PartialInfoStats {
  double gamma_marg = 0.0;
  double regret = 0.0;
};
PartialInfoStats partial_info_stats(const FeatureFrame& frame, const std::vector<int>& features);

struct CurvePoint {
  int prefix_size = 0;
  std::string feature_added;  // empty for the zero-feature point
  double gamma_marg = 0.0;
  double regret = 0.0;
};

/// Stats for each prefix of `order`, from no features to the full vector.
std::vector<CurvePoint> feature_curve(const FeatureFrame& frame, const std::vector<int>& order);

struct SingleFeatureStat {
  int feature = 0;
  double gamma_marg = 0.0;
  double regret = 0.0;
};

std::vector<SingleFeatureStat> single_feature_stats(const FeatureFrame& frame);

/// Accumulation order for the curve: ascending single-feature gamma_marg, so
/// the most informative features come first. Ties keep schema order.
std::vector<int> gamma_feature_order(const FeatureFrame& frame);

}  // namespace mf
