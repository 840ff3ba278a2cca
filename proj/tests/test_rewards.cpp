#include <doctest.h>

#include <random>

#include "testutil.hpp"

using namespace mf;

TEST_CASE("expected TT on the two-cell fixture") {
  const PopulationModel model = mftest::fixture_m1();
  const RewardSpec spec = reward_tt(mftest::exact_mu0(model));
  // n * E[tau * pi] = 100 * (2 * 0.5 + 1 * 0.5)
  CHECK(expected_reward(spec, model, mftest::uniform_policy(model, 1.0)) == 150.0);
}

TEST_CASE("expected ATO with a single treated cell is that cell's mu1") {
  const PopulationModel model = mftest::fixture_m1();
  CHECK(expected_reward(reward_ato(), model, make_policy({0.0, 1.0})) == 1.0);
}

TEST_CASE("treating no one yields zero for every reward") {
  const PopulationModel model = mftest::fixture_m1();
  const Policy none = mftest::uniform_policy(model, 0.0);
  const Mu0Estimator est = mftest::exact_mu0(model);
  CHECK(expected_reward(reward_ato(), model, none) == 0.0);
  CHECK(expected_reward(reward_att(est), model, none) == 0.0);
  CHECK(expected_reward(reward_to(), model, none) == 0.0);
  CHECK(expected_reward(reward_tt(est), model, none) == 0.0);
  CHECK(expected_reward(reward_weighted_tt(est, {1.0, 1.0}), model, none) == 0.0);
}

TEST_CASE("spec validation errors") {
  const PopulationModel model = mftest::fixture_m1();
  const Policy all = mftest::uniform_policy(model, 1.0);

  RewardSpec missing{RewardKind::TT, std::nullopt, std::nullopt};
  CHECK_THROWS_WITH_AS(expected_reward(missing, model, all),
                       doctest::Contains("MissingEstimator"), Error);

  RewardSpec gap{RewardKind::TT, make_auxiliary_estimator({0.0}), std::nullopt};
  CHECK_THROWS_WITH_AS(expected_reward(gap, model, all),
                       doctest::Contains("EstimatorSupportGap"), Error);

  RewardSpec no_weight{RewardKind::WeightedTT, mftest::exact_mu0(model), std::nullopt};
  CHECK_THROWS_WITH_AS(expected_reward(no_weight, model, all),
                       doctest::Contains("MissingWeight"), Error);

  CHECK_THROWS_AS(reward_weighted_tt(mftest::exact_mu0(model), {1.0, 0.0}), Error);
  CHECK_THROWS_AS(expected_reward(reward_tt(mftest::exact_mu0(model)), model,
                                  make_policy({1.0})),
                  Error);  // policy off the support
}

TEST_CASE("realized rewards follow the literal finite-sample formulas") {
  const Mu0Estimator est = make_auxiliary_estimator({1.0, 0.0});
  const std::vector<SampleRow> rows = {{0, 1, 3.0}, {1, 0, 9.0}};
  CHECK(realized_reward(RewardSpec{RewardKind::TT, est, std::nullopt}, rows, est) == 2.0);

  const std::vector<SampleRow> untreated = {{0, 0, 3.0}, {1, 0, 9.0}};
  CHECK(realized_reward(reward_ato(), untreated, est) == 0.0);

  const std::vector<SampleRow> att_rows = {{0, 1, 2.0}, {0, 1, 4.0}};
  CHECK(realized_reward(RewardSpec{RewardKind::ATT, est, std::nullopt}, att_rows, est) == 2.0);

  CHECK_THROWS_WITH_AS(realized_reward(reward_ato(), std::vector<SampleRow>{}, est),
                       doctest::Contains("EmptySample"), Error);
}

TEST_CASE("TT is exactly scale-equivariant") {
  std::mt19937_64 rng(7);
  for (int run = 0; run < 50; ++run) {
    const PopulationModel model = random_model(rng);
    std::uniform_real_distribution<double> pdist(0.0, 1.0);
    std::vector<double> pi(model.size());
    for (double& p : pi) p = pdist(rng);

    std::vector<double> mu0x2 = model.mu0();
    std::vector<double> mu1x2 = model.mu1();
    for (double& v : mu0x2) v *= 2.0;
    for (double& v : mu1x2) v *= 2.0;
    const PopulationModel doubled =
        make_population(model.support(), model.probs(), mu0x2, mu1x2, model.n());

    const double base = expected_reward(reward_tt(mftest::exact_mu0(model)), model,
                                        make_policy(pi));
    const double scaled = expected_reward(reward_tt(mftest::exact_mu0(doubled)), doubled,
                                          make_policy(pi));
    CHECK(scaled == 2.0 * base);
  }
}

TEST_CASE("WeightedTT with unit weights equals TT exactly") {
  std::mt19937_64 rng(8);
  for (int run = 0; run < 50; ++run) {
    const PopulationModel model = random_model(rng);
    std::uniform_real_distribution<double> pdist(0.0, 1.0);
    std::vector<double> pi(model.size());
    for (double& p : pi) p = pdist(rng);
    const Policy policy = make_policy(pi);
    const Mu0Estimator est = mftest::exact_mu0(model);
    const std::vector<double> ones(static_cast<std::size_t>(model.x_size()), 1.0);
    CHECK(expected_reward(reward_weighted_tt(est, ones), model, policy) ==
          expected_reward(reward_tt(est), model, policy));
  }
}

TEST_CASE("ATT equals TT over n times the treated mass") {
  std::mt19937_64 rng(9);
  for (int run = 0; run < 50; ++run) {
    const PopulationModel model = random_model(rng);
    std::uniform_real_distribution<double> pdist(0.1, 1.0);
    std::vector<double> pi(model.size());
    for (double& p : pi) p = pdist(rng);
    const Policy policy = make_policy(pi);
    double mass = 0.0;
    for (std::size_t i = 0; i < model.size(); ++i) mass += pi[i] * model.probs()[i];

    const Mu0Estimator est = mftest::exact_mu0(model);
    const double att = expected_reward(reward_att(est), model, policy);
    const double tt = expected_reward(reward_tt(est), model, policy);
    CHECK(att == doctest::Approx(tt / (static_cast<double>(model.n()) * mass)).epsilon(1e-12));
  }
}

namespace {

/// Count-level simulation of one realized population: multinomial cell counts,
/// then binomial treated counts per cell. Outcomes are degenerate at the cell
/// means, which leaves every reward's expectation unchanged (the statistics
/// are linear in Y given the counts) while keeping 1e5 replications cheap.
struct CellCounts {
  std::vector<std::int64_t> total;
  std::vector<std::int64_t> treated;
};

CellCounts simulate_counts(const PopulationModel& model, const Policy& policy, std::int64_t n,
                           std::mt19937_64& rng) {
  const std::size_t s = model.size();
  CellCounts counts{std::vector<std::int64_t>(s, 0), std::vector<std::int64_t>(s, 0)};
  std::int64_t remaining = n;
  double mass_left = 1.0;
  for (std::size_t i = 0; i < s; ++i) {
    if (remaining <= 0) break;
    const double p = mass_left > 0.0 ? std::min(1.0, model.probs()[i] / mass_left) : 0.0;
    std::binomial_distribution<std::int64_t> cell(remaining, p);
    const std::int64_t c = i + 1 == s ? remaining : cell(rng);
    counts.total[i] = c;
    remaining -= c;
    mass_left -= model.probs()[i];
    if (c > 0) {
      std::binomial_distribution<std::int64_t> treat(c, policy.treat_prob[i]);
      counts.treated[i] = treat(rng);
    }
  }
  return counts;
}

double statistic_from_counts(const RewardSpec& spec, const PopulationModel& model,
                             const CellCounts& counts, const Mu0Estimator& est,
                             const std::vector<double>& g) {
  double total = 0.0;
  std::int64_t treated = 0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto x = static_cast<std::size_t>(model.support()[i].x);
    const double t = static_cast<double>(counts.treated[i]);
    treated += counts.treated[i];
    switch (spec.kind) {
      case RewardKind::ATO:
      case RewardKind::TO:
        total += model.mu1()[i] * t;
        break;
      case RewardKind::ATT:
      case RewardKind::TT:
        total += (model.mu1()[i] - est.estimates[x]) * t;
        break;
      case RewardKind::WeightedTT:
        total += (model.mu1()[i] - est.estimates[x]) * g[x] * t;
        break;
    }
  }
  if (spec.kind == RewardKind::ATO || spec.kind == RewardKind::ATT) {
    return treated > 0 ? total / static_cast<double>(treated) : 0.0;
  }
  return total;
}

std::vector<SampleRow> expand_rows(const PopulationModel& model, const CellCounts& counts) {
  std::vector<SampleRow> rows;
  for (std::size_t i = 0; i < model.size(); ++i) {
    for (std::int64_t k = 0; k < counts.total[i]; ++k) {
      const bool treat = k < counts.treated[i];
      rows.push_back(SampleRow{model.support()[i].x, treat ? 1 : 0,
                               treat ? model.mu1()[i] : model.mu0()[i]});
    }
  }
  return rows;
}

}  // namespace

TEST_CASE("Monte Carlo means of realized rewards match expected_reward") {
  std::mt19937_64 rng(1234);
  const int replications = 100000;
  const std::int64_t n = 300;
  const int n_specs = 5;

  for (int m = 0; m < 3; ++m) {
    PopulationModel model = random_model(rng);
    model = make_population(model.support(), model.probs(), model.mu0(), model.mu1(), n);
    // Treated mass bounded away from zero so the averaged rewards' "no one
    // treated" branch is an e^-60 event rather than a bias source.
    std::uniform_real_distribution<double> pdist(0.2, 0.9);
    std::vector<double> pi(model.size());
    for (double& p : pi) p = pdist(rng);
    const Policy policy = make_policy(pi);
    const Mu0Estimator est = mftest::exact_mu0(model);
    const std::vector<double> g = [&] {
      std::vector<double> w(static_cast<std::size_t>(model.x_size()));
      std::uniform_real_distribution<double> wdist(0.2, 2.0);
      for (double& v : w) v = wdist(rng);
      return w;
    }();

    const RewardSpec specs[] = {reward_ato(), reward_att(est), reward_to(), reward_tt(est),
                                reward_weighted_tt(est, g)};

    // The count-level statistic must agree exactly with realized_reward on
    // the expanded row list before it stands in for it.
    for (int rep = 0; rep < 3; ++rep) {
      const CellCounts counts = simulate_counts(model, policy, 200, rng);
      const auto rows = expand_rows(model, counts);
      if (rows.empty()) continue;
      for (const auto& spec : specs) {
        CHECK(statistic_from_counts(spec, model, counts, est, g) ==
              doctest::Approx(realized_reward(spec, rows, est)).epsilon(1e-12));
      }
    }

    double sum[n_specs] = {0.0};
    double sum_sq[n_specs] = {0.0};
    for (int rep = 0; rep < replications; ++rep) {
      const CellCounts counts = simulate_counts(model, policy, n, rng);
      for (int k = 0; k < n_specs; ++k) {
        const double value = statistic_from_counts(specs[k], model, counts, est, g);
        sum[k] += value;
        sum_sq[k] += value * value;
      }
    }
    for (int k = 0; k < n_specs; ++k) {
      const double mean = sum[k] / replications;
      const double variance =
          std::max(0.0, sum_sq[k] / replications - mean * mean) / (replications - 1.0);
      const double se = std::sqrt(variance);
      const double expected = expected_reward(specs[k], model, policy);
      const double slack = 5.0 * se + 1e-9 * std::max(1.0, std::abs(expected));
      INFO("kind " << reward_kind_name(specs[k].kind) << " mean " << mean << " expected "
                   << expected << " se " << se);
      CHECK(std::abs(mean - expected) <= slack);
    }
  }
}
