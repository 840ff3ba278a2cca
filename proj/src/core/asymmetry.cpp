#include "core/asymmetry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace mf {

namespace {

std::vector<double> marginal_mu0_table(const PopulationModel& model) {
  const auto x_size = static_cast<std::size_t>(model.x_size());
  std::vector<double> mass(x_size, 0.0);
  std::vector<double> weighted(x_size, 0.0);
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto x = static_cast<std::size_t>(model.support()[i].x);
    mass[x] += model.probs()[i];
    weighted[x] += model.mu0()[i] * model.probs()[i];
  }
  std::vector<double> table(x_size, 0.0);
  for (std::size_t x = 0; x < x_size; ++x) {
    if (mass[x] <= 0.0) {
      fail(ErrorCode::ZeroMassCovariate,
           "x id " + std::to_string(x) + " carries no probability mass");
    }
    table[x] = weighted[x] / mass[x];
  }
  return table;
}

Policy interior_rule(const PopulationModel& model, const std::vector<double>& mu0_hat_table,
                     double eps) {
  std::vector<double> pi(model.size(), eps);
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto x = static_cast<std::size_t>(model.support()[i].x);
    if (model.mu1()[i] - mu0_hat_table[x] > 0.0) pi[i] = 1.0 - eps;
  }
  return make_policy(std::move(pi));
}

std::vector<char> treated_set(const PopulationModel& model, const Policy& pi) {
  std::vector<char> set(model.size(), 0);
  for (std::size_t i = 0; i < model.size(); ++i) {
    set[i] = pi.treat_prob[i] > 0.5 ? 1 : 0;
  }
  return set;
}

}  // namespace

Mu0Estimator marginalize_mu0(const PopulationModel& model) {
  return make_auxiliary_estimator(marginal_mu0_table(model));
}

double gamma_marg(const PopulationModel& model) {
  if (!model.has_u()) return 0.0;
  const auto table = marginal_mu0_table(model);
  double total = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto x = static_cast<std::size_t>(model.support()[i].x);
    total += std::abs(table[x] - model.mu0()[i]) * model.probs()[i];
  }
  return total;
}

double gamma_max(const PopulationModel& model) {
  if (!model.has_u()) return 0.0;
  const auto x_size = static_cast<std::size_t>(model.x_size());
  std::vector<double> lo(x_size, std::numeric_limits<double>::infinity());
  std::vector<double> hi(x_size, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto x = static_cast<std::size_t>(model.support()[i].x);
    lo[x] = std::min(lo[x], model.mu0()[i]);
    hi[x] = std::max(hi[x], model.mu0()[i]);
  }
  // Delta(x,u) = max_u' |mu0(x,u) - mu0(x,u')| = max(hi - mu0, mu0 - lo).
  double total = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto x = static_cast<std::size_t>(model.support()[i].x);
    const double delta = std::max(hi[x] - model.mu0()[i], model.mu0()[i] - lo[x]);
    total += delta * model.probs()[i];
  }
  return total;
}

Mu0Estimator confounded_mu0_hat(const PopulationModel& model, const Policy& policy) {
  if (policy.treat_prob.size() != model.size()) {
    fail(ErrorCode::LengthMismatch, "policy is not defined on the model support");
  }
  const auto x_size = static_cast<std::size_t>(model.x_size());
  std::vector<double> untreated_mass(x_size, 0.0);
  std::vector<double> weighted(x_size, 0.0);
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto x = static_cast<std::size_t>(model.support()[i].x);
    const double mass = (1.0 - policy.treat_prob[i]) * model.probs()[i];
    untreated_mass[x] += mass;
    weighted[x] += model.mu0()[i] * mass;
  }
  std::vector<double> table(x_size, 0.0);
  for (std::size_t x = 0; x < x_size; ++x) {
    if (untreated_mass[x] <= 0.0) {
      fail(ErrorCode::PositivityViolation,
           "no untreated mass at x id " + std::to_string(x));
    }
    table[x] = weighted[x] / untreated_mass[x];
  }
  Mu0Estimator est;
  est.estimates = std::move(table);
  est.source = Mu0Estimator::Source::AgentUntreated;
  est.policy = policy;
  return est;
}

AsymmetryReport asym_regret(const PopulationModel& model, const Mu0Estimator& mu0_hat,
                            const AsymmetryOptions& options) {
  if (mu0_hat.estimates.size() < static_cast<std::size_t>(model.x_size())) {
    fail(ErrorCode::EstimatorSupportGap, "estimator does not cover the X support");
  }

  AsymmetryReport report;
  report.gamma_marg = gamma_marg(model);
  report.gamma_max = gamma_max(model);
  report.bound_marg = 2.0 * report.gamma_marg;
  report.bound_max = 2.0 * report.gamma_max;
  report.estimator_source = mu0_hat.source;

  if (mu0_hat.source == Mu0Estimator::Source::AuxiliaryUnbiased) {
    // Deterministic best response over the unconstrained class.
    std::vector<double> pi(model.size(), 0.0);
    for (std::size_t i = 0; i < model.size(); ++i) {
      const auto x = static_cast<std::size_t>(model.support()[i].x);
      if (model.mu1()[i] - mu0_hat.estimates[x] > 0.0) pi[i] = 1.0;
    }
    report.agent_policy = make_policy(std::move(pi));
    report.optimal = optimal_policy(model, PolicyClass::unconstrained());
    report.mu0_hat = mu0_hat.estimates;
  } else {
    // The estimator depends on the agent's own policy: iterate from the seed
    // (the estimator's generating policy, else the marginal best response)
    // until the treated set stabilizes. Interior policies keep the untreated
    // pool populated at every x.
    const double eps = options.interior_eps;
    if (!(eps > 0.0 && eps < 0.5)) {
      fail(ErrorCode::InvalidArgument, "interior epsilon must lie in (0, 0.5)");
    }
    Policy pi = interior_rule(model, mu0_hat.estimates, eps);
    std::vector<double> table;
    bool converged = false;
    int iterations = 0;
    while (iterations < options.max_iterations) {
      ++iterations;
      table = confounded_mu0_hat(model, pi).estimates;
      Policy next = interior_rule(model, table, eps);
      if (treated_set(model, next) == treated_set(model, pi)) {
        pi = std::move(next);
        converged = true;
        break;
      }
      pi = std::move(next);
    }
    report.converged = converged;
    report.iterations = iterations;
    report.agent_policy = pi;
    report.mu0_hat = std::move(table);

    // The welfare optimum within the same interior class.
    std::vector<double> opt(model.size(), eps);
    for (std::size_t i = 0; i < model.size(); ++i) {
      if (model.tau(i) > 0.0) opt[i] = 1.0 - eps;
    }
    report.optimal = make_policy(std::move(opt));
  }

  report.utility = utility(model, report.agent_policy);
  report.optimal_utility = utility(model, report.optimal);
  report.regret = report.optimal_utility - report.utility;
  report.slack_marg = report.bound_marg - report.regret;
  report.slack_max = report.bound_max - report.regret;
  return report;
}

Mu0Estimator agent_untreated_seed(const PopulationModel& model, double interior_eps) {
  if (!(interior_eps > 0.0 && interior_eps < 0.5)) {
    fail(ErrorCode::InvalidArgument, "interior epsilon must lie in (0, 0.5)");
  }
  const Policy seed = interior_rule(model, marginal_mu0_table(model), interior_eps);
  return confounded_mu0_hat(model, seed);
}

PopulationModel tightness_model(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !(beta < alpha)) {
    fail(ErrorCode::ParameterOrderViolation, "requires 0 < beta < alpha");
  }
  std::vector<CovariatePoint> support = {{0, 0}, {0, 1}};
  return make_population(std::move(support), {0.5, 0.5}, {alpha, -alpha}, {beta, 0.0}, 1);
}

std::vector<double> grouped_mu0(const FeatureFrame& frame, const std::vector<int>& features) {
  if (frame.size() == 0) {
    fail(ErrorCode::EmptyDataset, "feature frame has no points");
  }
  for (int f : features) {
    if (f < 0 || static_cast<std::size_t>(f) >= frame.feature_count()) {
      fail(ErrorCode::InvalidArgument, "feature index out of range");
    }
  }

  std::map<std::vector<int>, std::pair<double, double>> groups;  // key -> (mass, weighted mu0)
  std::vector<std::vector<int>> keys(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) {
    std::vector<int> key;
    key.reserve(features.size());
    for (int f : features) key.push_back(frame.values[i][static_cast<std::size_t>(f)]);
    auto& acc = groups[key];
    acc.first += frame.probs[i];
    acc.second += frame.mu0[i] * frame.probs[i];
    keys[i] = std::move(key);
  }

  std::vector<double> result(frame.size(), 0.0);
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const auto& acc = groups[keys[i]];
    if (acc.first <= 0.0) {
      fail(ErrorCode::ZeroMassCovariate, "empty conditioning cell");
    }
    result[i] = acc.second / acc.first;
  }
  return result;
}

PartialInfoStats partial_info_stats(const FeatureFrame& frame, const std::vector<int>& features) {
  const auto mu0_hat = grouped_mu0(frame, features);
  PartialInfoStats stats;
  double v_agent = 0.0;
  double v_opt = 0.0;
  for (std::size_t i = 0; i < frame.size(); ++i) {
    stats.gamma_marg += std::abs(mu0_hat[i] - frame.mu0[i]) * frame.probs[i];
    const double tau = frame.mu1[i] - frame.mu0[i];
    if (frame.mu1[i] - mu0_hat[i] > 0.0) v_agent += tau * frame.probs[i];
    if (tau > 0.0) v_opt += tau * frame.probs[i];
  }
  stats.regret = v_opt - v_agent;
  return stats;
}

std::vector<CurvePoint> feature_curve(const FeatureFrame& frame, const std::vector<int>& order) {
  if (order.size() != frame.feature_count()) {
    fail(ErrorCode::InvalidArgument, "feature order must list every feature exactly once");
  }
  std::vector<char> seen(frame.feature_count(), 0);
  for (int f : order) {
    if (f < 0 || static_cast<std::size_t>(f) >= frame.feature_count() || seen[f]) {
      fail(ErrorCode::InvalidArgument, "feature order must be a permutation");
    }
    seen[f] = 1;
  }

  std::vector<CurvePoint> curve;
  std::vector<int> prefix;
  for (std::size_t m = 0; m <= order.size(); ++m) {
    if (m > 0) prefix.push_back(order[m - 1]);
    const auto stats = partial_info_stats(frame, prefix);
    CurvePoint point;
    point.prefix_size = static_cast<int>(m);
    point.feature_added = m > 0 ? frame.feature_names[static_cast<std::size_t>(order[m - 1])] : "";
    point.gamma_marg = stats.gamma_marg;
    point.regret = stats.regret;
    curve.push_back(std::move(point));
  }
  return curve;
}

std::vector<SingleFeatureStat> single_feature_stats(const FeatureFrame& frame) {
  std::vector<SingleFeatureStat> stats;
  for (std::size_t f = 0; f < frame.feature_count(); ++f) {
    const auto s = partial_info_stats(frame, {static_cast<int>(f)});
    stats.push_back({static_cast<int>(f), s.gamma_marg, s.regret});
  }
  return stats;
}

std::vector<int> gamma_feature_order(const FeatureFrame& frame) {
  const auto stats = single_feature_stats(frame);
  std::vector<int> order(frame.feature_count());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return stats[static_cast<std::size_t>(a)].gamma_marg <
           stats[static_cast<std::size_t>(b)].gamma_marg;
  });
  return order;
}

}  // namespace mf
