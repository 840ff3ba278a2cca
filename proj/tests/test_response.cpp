#include <doctest.h>

#include <random>

#include "testutil.hpp"

using namespace mf;

TEST_CASE("optimal_policy treats exactly the positive-effect cells") {
  SUBCASE("both effects positive") {
    const Policy pi = optimal_policy(mftest::fixture_m1(), PolicyClass::unconstrained());
    CHECK(pi.treat_prob == std::vector<double>{1.0, 1.0});
  }
  SUBCASE("mixed signs") {
    const PopulationModel model =
        make_population({{0}, {1}}, {0.5, 0.5}, {0.0, 2.0}, {1.0, 0.0}, 1);  // tau = (1, -2)
    const Policy pi = optimal_policy(model, PolicyClass::unconstrained());
    CHECK(pi.treat_prob == std::vector<double>{1.0, 0.0});
  }
  SUBCASE("zero effects are untreated (strict inequality)") {
    const PopulationModel model = make_population({{0}, {1}}, {0.5, 0.5}, {1.0, 1.0},
                                                  {1.0, 1.0}, 1);
    const Policy pi = optimal_policy(model, PolicyClass::unconstrained());
    CHECK(pi.treat_prob == std::vector<double>{0.0, 0.0});
  }
  SUBCASE("lower positivity keeps the floor") {
    const PopulationModel model =
        make_population({{0}, {1}}, {0.5, 0.5}, {0.0, 2.0}, {1.0, 0.0}, 1);
    const Policy pi = optimal_policy(model, PolicyClass::positivity_constrained(0.25));
    CHECK(pi.treat_prob == std::vector<double>{1.0, 0.25});
  }
  SUBCASE("explicit sets are not analytic") {
    const PolicyClass cls = PolicyClass::explicit_set({make_policy({1.0, 1.0})});
    CHECK_THROWS_WITH_AS(optimal_policy(mftest::fixture_m1(), cls),
                         doctest::Contains("UnsupportedClass"), Error);
  }
}

TEST_CASE("analytic best responses on the two-cell fixture") {
  const PopulationModel model = mftest::fixture_m1();
  const Mu0Estimator est = mftest::exact_mu0(model);

  // mu1 = (0, 1): the averaged treated outcome chases the argmax of mu1.
  CHECK(best_response(reward_ato(), model, PolicyClass::unconstrained()).treat_prob ==
        std::vector<double>{0.0, 1.0});
  // tau = (2, 1): the averaged effect chases the argmax of tau.
  CHECK(best_response(reward_att(est), model, PolicyClass::unconstrained()).treat_prob ==
        std::vector<double>{1.0, 0.0});
  // Total effect treats every positive-effect cell.
  CHECK(best_response(reward_tt(est), model, PolicyClass::unconstrained()).treat_prob ==
        std::vector<double>{1.0, 1.0});
}

TEST_CASE("brute force agrees with the analytic responses on the fixture") {
  const PopulationModel model = mftest::fixture_m1();
  const Mu0Estimator est = mftest::exact_mu0(model);
  const PolicyClass cls = PolicyClass::unconstrained();

  const Policy tt = brute_force_best_response(reward_tt(est), model, cls);
  CHECK(expected_reward(reward_tt(est), model, tt) == 150.0);

  const Policy ato = brute_force_best_response(reward_ato(), model, cls);
  CHECK(expected_reward(reward_ato(), model, ato) == 1.0);

  const PopulationModel single = make_population({{0}}, {1.0}, {0.0}, {2.0}, 1);
  const Policy one = brute_force_best_response(reward_ato(), single, cls);
  CHECK(one.treat_prob == std::vector<double>{1.0});
}

TEST_CASE("utility") {
  const PopulationModel model = mftest::fixture_m1();
  CHECK(utility(model, mftest::uniform_policy(model, 1.0)) == 1.5);
  CHECK(utility(model, mftest::uniform_policy(model, 0.0)) == 0.0);
  CHECK(utility(model, make_policy({0.0, 1.0})) == 0.5);
}

TEST_CASE("regret on the fixture reproduces the closed forms") {
  const PopulationModel model = mftest::fixture_m1();
  const Mu0Estimator est = mftest::exact_mu0(model);
  const PolicyClass cls = PolicyClass::unconstrained();

  // alpha = -2, p = 1/2: the averaged-outcome regret is -alpha (1 - p) = 1.
  const RegretReport ato = regret(reward_ato(), model, cls);
  CHECK(ato.regret == 1.0);
  CHECK(ato.optimal_utility == 1.5);

  const RegretReport tt = regret(reward_tt(est), model, cls);
  CHECK(tt.regret == 0.0);

  const RegretReport att = regret(reward_att(est), model, cls);
  CHECK(att.regret == 0.5);
  CHECK(att.regret <= att.optimal_utility);
}

TEST_CASE("healthy-patient failure mode of the averaged treated outcome") {
  // mu1 = (0, 1), mu0 = (-1, 2): treating the high-mu1 cell harms it
  // (tau = (1, -1)), yet the averaged treated outcome still selects it.
  const PopulationModel model =
      make_population({{0}, {1}}, {0.5, 0.5}, {-1.0, 2.0}, {0.0, 1.0}, 1);
  const RegretReport report = regret(reward_ato(), model, PolicyClass::unconstrained());
  CHECK(report.best_response.treat_prob == std::vector<double>{0.0, 1.0});
  CHECK(report.regret == 1.0);  // (1-p) + p (beta - 1) at beta = 2, p = 1/2

  const Policy oracle = brute_force_best_response(reward_ato(), model,
                                                  PolicyClass::unconstrained());
  CHECK(expected_reward(reward_ato(), model, oracle) ==
        expected_reward(reward_ato(), model, report.best_response));
}

TEST_CASE("zero-mass cells cannot attract the averaged rewards") {
  const PopulationModel model =
      make_population({{0}, {1}, {2}}, {0.5, 0.5, 0.0}, {0.0, 0.0, 0.0}, {1.0, 2.0, 50.0}, 1);
  const Policy pi = best_response(reward_ato(), model, PolicyClass::unconstrained());
  CHECK(pi.treat_prob == std::vector<double>{0.0, 1.0, 0.0});
  const Policy oracle =
      brute_force_best_response(reward_ato(), model, PolicyClass::unconstrained());
  CHECK(expected_reward(reward_ato(), model, pi) ==
        expected_reward(reward_ato(), model, oracle));
}

TEST_CASE("oracle agreement over random models, all five rewards") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> wdist(0.1, 3.0);
  for (int run = 0; run < 100; ++run) {
    const PopulationModel model = random_model(rng);
    const Mu0Estimator est = mftest::exact_mu0(model);
    std::vector<double> g(static_cast<std::size_t>(model.x_size()));
    for (double& v : g) v = wdist(rng);
    const RewardSpec specs[] = {reward_ato(), reward_att(est), reward_to(), reward_tt(est),
                                reward_weighted_tt(est, g)};
    for (const auto& spec : specs) {
      const Policy analytic = best_response(spec, model, PolicyClass::unconstrained());
      const Policy oracle = brute_force_best_response(spec, model, PolicyClass::unconstrained());
      CHECK(std::abs(expected_reward(spec, model, analytic) -
                     expected_reward(spec, model, oracle)) < 1e-9);
    }
  }
}

TEST_CASE("oracle agreement with a biased estimator table") {
  std::mt19937_64 rng(2025);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  for (int run = 0; run < 50; ++run) {
    const PopulationModel model = random_model(rng);
    std::vector<double> biased = model.mu0();
    for (double& v : biased) v += noise(rng);
    const Mu0Estimator est = make_auxiliary_estimator(biased);
    for (const auto& spec : {reward_att(est), reward_tt(est)}) {
      const Policy analytic = best_response(spec, model, PolicyClass::unconstrained());
      const Policy oracle = brute_force_best_response(spec, model, PolicyClass::unconstrained());
      CHECK(std::abs(expected_reward(spec, model, analytic) -
                     expected_reward(spec, model, oracle)) < 1e-9);
    }
  }
}

TEST_CASE("explicit policy sets delegate to enumeration") {
  const PopulationModel model = mftest::fixture_m1();
  const Mu0Estimator est = mftest::exact_mu0(model);
  const std::vector<Policy> members = {make_policy({0.0, 0.0}), make_policy({0.3, 0.7}),
                                       make_policy({1.0, 0.0})};
  const PolicyClass cls = PolicyClass::explicit_set(members);

  const Policy br = best_response(reward_tt(est), model, cls);
  double best = -1e300;
  for (const auto& member : members) {
    best = std::max(best, expected_reward(reward_tt(est), model, member));
  }
  CHECK(expected_reward(reward_tt(est), model, br) == best);

  const RegretReport report = regret(reward_tt(est), model, cls);
  CHECK(report.optimal_utility == doctest::Approx(1.0));  // member (1, 0) has utility 1.0
  CHECK(report.regret >= -1e-12);
}

TEST_CASE("positivity-constrained enumeration sits on the epsilon floor") {
  const PopulationModel model = mftest::fixture_m1();
  const Mu0Estimator est = mftest::exact_mu0(model);
  const PolicyClass cls = PolicyClass::positivity_constrained(0.1);
  const Policy br = brute_force_best_response(reward_tt(est), model, cls);
  CHECK(br.treat_prob == std::vector<double>{1.0, 1.0});  // both effects positive

  // A model with one harmful cell: the floor stays at epsilon there.
  const PopulationModel harmful =
      make_population({{0}, {1}}, {0.5, 0.5}, {0.0, 2.0}, {1.0, 0.0}, 1);
  const Policy floor = brute_force_best_response(reward_tt(mftest::exact_mu0(harmful)),
                                                 harmful, cls);
  CHECK(floor.treat_prob == std::vector<double>{1.0, 0.1});
}

TEST_CASE("brute force refuses oversized supports") {
  std::vector<CovariatePoint> support(21);
  std::vector<double> probs(21, 1.0 / 21.0);
  std::vector<double> mu(21, 0.0);
  for (int i = 0; i < 21; ++i) support[static_cast<std::size_t>(i)] = CovariatePoint{i};
  const PopulationModel model = make_population(support, probs, mu, mu, 1);
  CHECK_THROWS_WITH_AS(
      brute_force_best_response(reward_ato(), model, PolicyClass::unconstrained()),
      doctest::Contains("SupportTooLarge"), Error);
}

TEST_CASE("brute-force ties resolve toward the smallest treated set") {
  // All effects zero: every policy earns reward 0; the empty set must win.
  const PopulationModel flat =
      make_population({{0}, {1}, {2}}, {0.25, 0.5, 0.25}, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, 1);
  const Policy pi = brute_force_best_response(reward_tt(mftest::exact_mu0(flat)), flat,
                                              PolicyClass::unconstrained());
  CHECK(pi.treat_prob == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("regret reports are internally consistent on random models") {
  std::mt19937_64 rng(77);
  for (int run = 0; run < 200; ++run) {
    const PopulationModel model = random_model(rng);
    const RegretReport report =
        regret(reward_tt(mftest::exact_mu0(model)), model, PolicyClass::unconstrained());
    CHECK(report.regret == report.optimal_utility - report.utility);
    CHECK(report.regret >= -1e-12);
  }
}
