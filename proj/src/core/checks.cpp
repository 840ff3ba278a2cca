#include "core/checks.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <sstream>

#include "core/datasets.hpp"

namespace mf {

namespace {

constexpr int kModelRuns = 1000;
constexpr int kRankingRuns = 200;

std::vector<double> random_probs(std::mt19937_64& rng, std::size_t size) {
  std::uniform_real_distribution<double> mass(0.05, 1.0);
  std::vector<double> probs(size);
  double total = 0.0;
  for (double& p : probs) {
    p = mass(rng);
    total += p;
  }
  for (double& p : probs) p /= total;
  return probs;
}

std::vector<double> random_mu(std::mt19937_64& rng, std::size_t size) {
  std::uniform_real_distribution<double> mu(-5.0, 5.0);
  std::vector<double> values(size);
  for (double& v : values) v = mu(rng);
  return values;
}

CheckResult named(const std::string& name, bool passed, const std::string& detail) {
  return CheckResult{name, passed, detail};
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

}  // namespace

PopulationModel random_model(std::mt19937_64& rng, int max_support) {
  std::uniform_int_distribution<int> size_dist(1, max_support);
  std::uniform_int_distribution<std::int64_t> n_dist(1, 200);
  const auto s = static_cast<std::size_t>(size_dist(rng));
  std::vector<CovariatePoint> support(s);
  for (std::size_t i = 0; i < s; ++i) support[i] = CovariatePoint{static_cast<int>(i), std::nullopt};
  return make_population(std::move(support), random_probs(rng, s), random_mu(rng, s),
                         random_mu(rng, s), n_dist(rng));
}

PopulationModel random_joint_model(std::mt19937_64& rng, int max_x, int max_u) {
  std::uniform_int_distribution<int> x_dist(1, max_x);
  std::uniform_int_distribution<int> u_dist(1, max_u);
  std::uniform_int_distribution<std::int64_t> n_dist(1, 200);
  const int xs = x_dist(rng);
  const int us = u_dist(rng);
  const auto s = static_cast<std::size_t>(xs * us);
  std::vector<CovariatePoint> support;
  support.reserve(s);
  for (int x = 0; x < xs; ++x) {
    for (int u = 0; u < us; ++u) support.push_back(CovariatePoint{x, u});
  }
  return make_population(std::move(support), random_probs(rng, s), random_mu(rng, s),
                         random_mu(rng, s), n_dist(rng));
}

namespace {

std::vector<double> random_weights(std::mt19937_64& rng, std::size_t size) {
  std::uniform_real_distribution<double> w(0.1, 3.0);
  std::vector<double> weights(size);
  for (double& g : weights) g = w(rng);
  return weights;
}

RewardSpec spec_for(RewardKind kind, const PopulationModel& model, std::mt19937_64& rng) {
  switch (kind) {
    case RewardKind::ATO: return reward_ato();
    case RewardKind::TO: return reward_to();
    case RewardKind::ATT: return reward_att(make_auxiliary_estimator(model.mu0()));
    case RewardKind::TT: return reward_tt(make_auxiliary_estimator(model.mu0()));
    case RewardKind::WeightedTT:
      return reward_weighted_tt(make_auxiliary_estimator(model.mu0()),
                                random_weights(rng, static_cast<std::size_t>(model.x_size())));
  }
  fail(ErrorCode::InvalidArgument, "unreachable reward kind");
}

CheckResult check_oracle_agreement(std::mt19937_64& rng) {
  const RewardKind kinds[] = {RewardKind::ATO, RewardKind::ATT, RewardKind::TO, RewardKind::TT,
                              RewardKind::WeightedTT};
  double worst = 0.0;
  for (int run = 0; run < kModelRuns; ++run) {
    const PopulationModel model = random_model(rng);
    for (RewardKind kind : kinds) {
      const RewardSpec spec = spec_for(kind, model, rng);
      const Policy analytic = best_response(spec, model, PolicyClass::unconstrained());
      const Policy oracle = brute_force_best_response(spec, model, PolicyClass::unconstrained());
      const double gap = std::abs(expected_reward(spec, model, analytic) -
                                  expected_reward(spec, model, oracle));
      worst = std::max(worst, gap);
    }
  }
  return named("oracle_agreement", worst < 1e-9,
               "max |analytic - brute force| reward gap " + fmt(worst) + " over " +
                   std::to_string(kModelRuns) + " models x 5 rewards");
}

CheckResult check_tt_alignment(std::mt19937_64& rng) {
  double worst = 0.0;
  bool treated_sets_match = true;
  for (int run = 0; run < kModelRuns; ++run) {
    const PopulationModel model = random_model(rng);
    const RewardSpec tt = reward_tt(make_auxiliary_estimator(model.mu0()));
    const RewardSpec wtt =
        reward_weighted_tt(make_auxiliary_estimator(model.mu0()),
                           random_weights(rng, static_cast<std::size_t>(model.x_size())));
    const RegretReport r_tt = regret(tt, model, PolicyClass::unconstrained());
    const RegretReport r_wtt = regret(wtt, model, PolicyClass::unconstrained());
    worst = std::max({worst, std::abs(r_tt.regret), std::abs(r_wtt.regret)});
    if (r_tt.best_response.treat_prob != r_wtt.best_response.treat_prob) {
      treated_sets_match = false;
    }
  }
  return named("tt_weighted_tt_zero_regret", worst <= 1e-12 && treated_sets_match,
               "max |regret| " + fmt(worst) + "; positive reweighting preserves the response: " +
                   (treated_sets_match ? "yes" : "no"));
}

CheckResult check_att_ceiling(std::mt19937_64& rng) {
  bool ceiling_ok = true;
  for (int run = 0; run < kModelRuns; ++run) {
    const PopulationModel model = random_model(rng);
    const RewardSpec att = reward_att(make_auxiliary_estimator(model.mu0()));
    const RegretReport rr = regret(att, model, PolicyClass::unconstrained());
    if (rr.regret > rr.optimal_utility + 1e-12) ceiling_ok = false;
  }

  // Sicker-patient failure mode of the averaged treated outcome: mu1 = (0, 1),
  // mu0 = (alpha, 0), p = 1/2 gives regret exactly -alpha/2.
  bool fixture_ok = true;
  std::string fixture_detail;
  for (double alpha : {-1.0, -10.0, -100.0}) {
    const PopulationModel model =
        make_population({{0, std::nullopt}, {1, std::nullopt}}, {0.5, 0.5}, {alpha, 0.0},
                        {0.0, 1.0}, 100);
    const RegretReport rr = regret(reward_ato(), model, PolicyClass::unconstrained());
    const double expected = -alpha * 0.5;
    if (rr.regret != expected) {
      fixture_ok = false;
      fixture_detail += " alpha=" + fmt(alpha) + " got " + fmt(rr.regret);
    }
  }
  return named("att_ceiling_and_ato_divergence", ceiling_ok && fixture_ok,
               std::string("ATT regret within the ceiling: ") + (ceiling_ok ? "yes" : "no") +
                   "; ATO fixture regrets exact: " + (fixture_ok ? "yes" : "no") +
                   fixture_detail);
}

CheckResult check_asymmetry_bounds(std::mt19937_64& rng) {
  double worst_marg_slack = std::numeric_limits<double>::infinity();
  double worst_max_slack = std::numeric_limits<double>::infinity();
  bool bounds_ok = true;
  bool interval_ok = true;
  std::uniform_real_distribution<double> pi_dist(0.0, 0.95);

  for (int run = 0; run < kModelRuns; ++run) {
    const PopulationModel model = random_joint_model(rng);

    const AsymmetryReport aux = asym_regret(model, marginalize_mu0(model));
    if (aux.regret > aux.bound_marg + 1e-9) bounds_ok = false;
    worst_marg_slack = std::min(worst_marg_slack, aux.bound_marg - aux.regret);

    const AsymmetryReport agent = asym_regret(model, agent_untreated_seed(model));
    if (agent.regret > agent.bound_max + 1e-9) bounds_ok = false;
    worst_max_slack = std::min(worst_max_slack, agent.bound_max - agent.regret);

    // Interval containment for a random interior policy and per x.
    std::vector<double> pi(model.size());
    for (double& p : pi) p = pi_dist(rng);
    const Mu0Estimator conf = confounded_mu0_hat(model, make_policy(pi));
    std::vector<double> lo(static_cast<std::size_t>(model.x_size()),
                           std::numeric_limits<double>::infinity());
    std::vector<double> hi(static_cast<std::size_t>(model.x_size()),
                           -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < model.size(); ++i) {
      const auto x = static_cast<std::size_t>(model.support()[i].x);
      lo[x] = std::min(lo[x], model.mu0()[i]);
      hi[x] = std::max(hi[x], model.mu0()[i]);
    }
    for (int x = 0; x < model.x_size(); ++x) {
      const double v = conf.estimates[static_cast<std::size_t>(x)];
      if (v < lo[static_cast<std::size_t>(x)] - 1e-12 ||
          v > hi[static_cast<std::size_t>(x)] + 1e-12) {
        interval_ok = false;
      }
    }
  }
  return named("asymmetry_bounds", bounds_ok && interval_ok,
               "min slack to 2*gamma_marg " + fmt(worst_marg_slack) + ", to 2*gamma_max " +
                   fmt(worst_max_slack) + "; estimates stay in the per-x envelope: " +
                   (interval_ok ? "yes" : "no"));
}

CheckResult check_tightness() {
  bool exact_ok = true;
  bool near_ok = true;
  std::string detail;
  for (double alpha : {0.5, 1.0, 2.0, 4.0}) {
    for (double frac : {0.25, 0.5, 0.99}) {
      const double beta = frac * alpha;
      const PopulationModel model = tightness_model(alpha, beta);
      const AsymmetryReport report = asym_regret(model, marginalize_mu0(model));
      const double expected = alpha - beta / 2.0;
      if (std::abs(report.regret - expected) > 1e-12) {
        exact_ok = false;
        detail += " (" + fmt(alpha) + "," + fmt(beta) + ") -> " + fmt(report.regret);
      }
    }
    const double beta = 0.01 * alpha;
    const PopulationModel model = tightness_model(alpha, beta);
    const AsymmetryReport report = asym_regret(model, marginalize_mu0(model));
    if (report.regret + 1e-12 < report.gamma_marg - 0.005 * alpha) near_ok = false;
  }
  return named("tightness_construction", exact_ok && near_ok,
               std::string("regret equals alpha - beta/2 on the grid: ") +
                   (exact_ok ? "yes" : "no") + "; near-gamma regret at beta = alpha/100: " +
                   (near_ok ? "yes" : "no") + detail);
}

CheckResult check_ranking(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size_dist(2, 6);
  std::uniform_int_distribution<std::int64_t> n_dist(1, 50);
  std::uniform_real_distribution<double> tau_any(-5.0, 5.0);
  std::uniform_real_distribution<double> tau_pos(0.0, 5.0);
  std::uniform_real_distribution<double> lift(0.0, 3.0);

  bool preserved = true;
  bool prop4_violates = true;

  for (int run = 0; run < kRankingRuns; ++run) {
    const auto s = static_cast<std::size_t>(size_dist(rng));
    const bool nonneg = run % 2 == 0;  // relative-audit subset
    const std::vector<double> mu0 = random_mu(rng, s);
    std::vector<CovariatePoint> support(s);
    for (std::size_t i = 0; i < s; ++i) support[i] = CovariatePoint{static_cast<int>(i)};

    std::vector<double> tau_k(s);
    std::vector<double> tau_j(s);
    for (std::size_t i = 0; i < s; ++i) {
      tau_k[i] = nonneg ? tau_pos(rng) : tau_any(rng);
      tau_j[i] = tau_k[i] + lift(rng);
    }
    std::vector<double> mu1_j(s);
    std::vector<double> mu1_k(s);
    for (std::size_t i = 0; i < s; ++i) {
      mu1_j[i] = mu0[i] + tau_j[i];
      mu1_k[i] = mu0[i] + tau_k[i];
    }
    const auto agent_j = make_agent(
        "j", make_population(support, random_probs(rng, s), mu0, mu1_j, n_dist(rng)));
    const auto agent_k = make_agent(
        "k", make_population(support, random_probs(rng, s), mu0, mu1_k, n_dist(rng)));
    const auto reference = random_probs(rng, s);

    const RankingReport report = audit_rankings({agent_j, agent_k}, reference, true);
    if (report.scores[0] < report.scores[1] - 1e-12) preserved = false;
    if (!report.violations.empty()) preserved = false;

    // Equal effects, n_k = 2 n_j: the unweighted total reward must produce a
    // uniform violation against the smaller agent.
    std::vector<double> tau_eq(s);
    for (std::size_t i = 0; i < s; ++i) tau_eq[i] = tau_pos(rng) + 0.1;
    std::vector<double> mu1_eq(s);
    for (std::size_t i = 0; i < s; ++i) mu1_eq[i] = mu0[i] + tau_eq[i];
    const auto probs = random_probs(rng, s);
    const std::int64_t n_j = n_dist(rng);
    const auto small_agent =
        make_agent("small", make_population(support, probs, mu0, mu1_eq, n_j));
    const auto big_agent =
        make_agent("big", make_population(support, probs, mu0, mu1_eq, 2 * n_j));
    const RankingReport unweighted = audit_rankings({small_agent, big_agent}, probs, false);
    bool found = false;
    for (const auto& v : unweighted.violations) {
      if (v.kind == ViolationKind::Uniform && v.better == "small" && v.worse == "big") {
        found = true;
      }
    }
    if (!found) prop4_violates = false;
  }
  return named("ranking_preservation", preserved && prop4_violates,
               std::string("reweighted scores preserve dominance: ") +
                   (preserved ? "yes" : "no") + "; unweighted scores violate with n_k = 2 n_j: " +
                   (prop4_violates ? "yes" : "no"));
}

CheckResult check_composite_outcome() {
  bool ok = true;
  for (int mask = 0; mask < 64; ++mask) {
    OutcomePanel panel;
    panel.death = mask & 1;
    panel.recurrent_stroke = mask & 2;
    panel.pe_or_intracranial_bleed = mask & 4;
    panel.other_side_effects = mask & 8;
    panel.full_recovery_6m = mask & 16;
    panel.discharge_within_14d = mask & 32;
    const double score = composite_outcome(panel);
    const double expected = -2.0 * (panel.death ? 1 : 0) - 1.0 * (panel.recurrent_stroke ? 1 : 0) -
                            0.5 * (panel.pe_or_intracranial_bleed ? 1 : 0) -
                            0.5 * (panel.other_side_effects ? 1 : 0) +
                            2.0 * (panel.full_recovery_6m ? 1 : 0) +
                            1.0 * (panel.discharge_within_14d ? 1 : 0);
    if (score != expected || score < -4.0 || score > 3.0) ok = false;
  }
  return named("composite_outcome_range", ok,
               "all 64 indicator combinations stay in [-4, 3] and match the term weights");
}

}  // namespace

std::vector<CheckResult> run_property_checks(std::uint64_t seed) {
  std::vector<CheckResult> results;
  {
    std::mt19937_64 rng(seed);
    results.push_back(check_oracle_agreement(rng));
  }
  {
    std::mt19937_64 rng(seed);
    results.push_back(check_tt_alignment(rng));
  }
  {
    std::mt19937_64 rng(seed);
    results.push_back(check_att_ceiling(rng));
  }
  {
    std::mt19937_64 rng(seed + 1);
    results.push_back(check_asymmetry_bounds(rng));
  }
  results.push_back(check_tightness());
  {
    std::mt19937_64 rng(seed + 2);
    results.push_back(check_ranking(rng));
  }
  results.push_back(check_composite_outcome());
  return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult& r) { return r.passed; });
}

std::string checks_to_json(const std::vector<CheckResult>& results, std::uint64_t seed) {
  nlohmann::json doc;
  doc["seed"] = seed;
  doc["passed"] = all_passed(results);
  nlohmann::json items = nlohmann::json::array();
  for (const auto& r : results) {
    items.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
  }
  doc["checks"] = std::move(items);
  return doc.dump(2);
}

}  // namespace mf
