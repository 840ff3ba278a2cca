#include <doctest.h>

#include <random>

#include "core/serialize.hpp"
#include "testutil.hpp"

using namespace mf;

namespace {

/// Single x, binary U with uniform mass: mu0 = (alpha, -alpha), mu1 = (beta, 0).
PopulationModel m3(double alpha, double beta) { return tightness_model(alpha, beta); }

}  // namespace

TEST_CASE("marginalize_mu0") {
  SUBCASE("the tightness fixture marginalizes to zero") {
    const Mu0Estimator est = marginalize_mu0(m3(2.0, 1.0));
    CHECK(est.estimates == std::vector<double>{0.0});
    CHECK(est.source == Mu0Estimator::Source::AuxiliaryUnbiased);
  }
  SUBCASE("u-degenerate models pass through exactly") {
    const PopulationModel joint =
        make_population({{0, 0}, {1, 0}}, {0.25, 0.75}, {3.5, -1.25}, {0, 0}, 1);
    CHECK(marginalize_mu0(joint).estimates == std::vector<double>{3.5, -1.25});
  }
  SUBCASE("conditional weighting") {
    const PopulationModel joint =
        make_population({{0, 0}, {0, 1}}, {0.25, 0.75}, {4.0, 0.0}, {0, 0}, 1);
    CHECK(marginalize_mu0(joint).estimates == std::vector<double>{1.0});
  }
}

TEST_CASE("gamma_marg") {
  CHECK(gamma_marg(m3(2.0, 1.0)) == 2.0);

  const PopulationModel degenerate =
      make_population({{0, 0}, {1, 0}}, {0.5, 0.5}, {1.0, -2.0}, {0, 0}, 1);
  CHECK(gamma_marg(degenerate) == 0.0);

  // mu0 constant in u at each x.
  const PopulationModel constant =
      make_population({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {0.3, 0.2, 0.4, 0.1},
                      {2.0, 2.0, -1.0, -1.0}, {0, 0, 0, 0}, 1);
  CHECK(gamma_marg(constant) == 0.0);
}

TEST_CASE("gamma_max") {
  CHECK(gamma_max(m3(2.0, 1.0)) == 4.0);

  const PopulationModel degenerate =
      make_population({{0, 0}, {1, 0}}, {0.5, 0.5}, {1.0, -2.0}, {0, 0}, 1);
  CHECK(gamma_max(degenerate) == 0.0);

  std::mt19937_64 rng(55);
  for (int run = 0; run < 200; ++run) {
    const PopulationModel joint = random_joint_model(rng);
    CHECK(gamma_max(joint) >= gamma_marg(joint) - 1e-12);
  }
}

TEST_CASE("confounded_mu0_hat") {
  const PopulationModel model = m3(2.0, 1.0);
  SUBCASE("treating one u cell leaves the other as the untreated pool") {
    const Mu0Estimator est = confounded_mu0_hat(model, make_policy({1.0, 0.0}));
    CHECK(est.estimates == std::vector<double>{-2.0});
    CHECK(est.source == Mu0Estimator::Source::AgentUntreated);
    REQUIRE(est.policy.has_value());
  }
  SUBCASE("treating no one recovers the marginal") {
    const Mu0Estimator est = confounded_mu0_hat(model, make_policy({0.0, 0.0}));
    CHECK(est.estimates == marginalize_mu0(model).estimates);
  }
  SUBCASE("uniform thinning recovers the conditional mean") {
    const Mu0Estimator est = confounded_mu0_hat(model, make_policy({0.5, 0.5}));
    CHECK(est.estimates == std::vector<double>{0.0});
  }
  SUBCASE("no untreated mass is an error") {
    CHECK_THROWS_WITH_AS(confounded_mu0_hat(model, make_policy({1.0, 1.0})),
                         doctest::Contains("PositivityViolation"), Error);
  }
}

TEST_CASE("interval containment of the confounded estimate") {
  std::mt19937_64 rng(56);
  std::uniform_real_distribution<double> pi_dist(0.0, 0.95);
  for (int run = 0; run < 200; ++run) {
    const PopulationModel joint = random_joint_model(rng);
    std::vector<double> pi(joint.size());
    for (double& p : pi) p = pi_dist(rng);
    const Mu0Estimator est = confounded_mu0_hat(joint, make_policy(pi));

    std::vector<double> lo(static_cast<std::size_t>(joint.x_size()), 1e300);
    std::vector<double> hi(static_cast<std::size_t>(joint.x_size()), -1e300);
    for (std::size_t i = 0; i < joint.size(); ++i) {
      const auto x = static_cast<std::size_t>(joint.support()[i].x);
      lo[x] = std::min(lo[x], joint.mu0()[i]);
      hi[x] = std::max(hi[x], joint.mu0()[i]);
    }
    for (int x = 0; x < joint.x_size(); ++x) {
      CHECK(est.estimates[static_cast<std::size_t>(x)] >=
            lo[static_cast<std::size_t>(x)] - 1e-12);
      CHECK(est.estimates[static_cast<std::size_t>(x)] <=
            hi[static_cast<std::size_t>(x)] + 1e-12);
    }
  }
}

TEST_CASE("asym_regret with the unbiased auxiliary source") {
  SUBCASE("tightness fixture at (2, 1)") {
    const PopulationModel model = m3(2.0, 1.0);
    const AsymmetryReport report = asym_regret(model, marginalize_mu0(model));
    CHECK(report.regret == 1.5);  // alpha - beta/2
    CHECK(report.gamma_marg == 2.0);
    CHECK(report.gamma_max == 4.0);
    CHECK(report.bound_marg == 4.0);
    CHECK(report.bound_max == 8.0);
    CHECK(report.slack_marg == 2.5);
    CHECK(report.converged);
    // The agent treats the beta cell, the optimum treats the other.
    CHECK(report.agent_policy.treat_prob == std::vector<double>{1.0, 0.0});
    CHECK(report.optimal.treat_prob == std::vector<double>{0.0, 1.0});
  }
  SUBCASE("u-degenerate models reduce to the aligned full-information case") {
    const PopulationModel joint =
        make_population({{0, 0}, {1, 0}}, {0.5, 0.5}, {1.0, -2.0}, {2.0, -1.0}, 1);
    const AsymmetryReport report = asym_regret(joint, marginalize_mu0(joint));
    CHECK(report.regret == 0.0);
    CHECK(report.gamma_marg == 0.0);
  }
  SUBCASE("vanishing beta pushes regret to gamma_marg") {
    const PopulationModel model = m3(1.0, 1e-9);
    const AsymmetryReport report = asym_regret(model, marginalize_mu0(model));
    CHECK(report.regret == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("tightness_model closed forms and validation") {
  CHECK_THROWS_WITH_AS(tightness_model(1.0, 1.5), doctest::Contains("ParameterOrderViolation"),
                       Error);
  CHECK_THROWS_AS(tightness_model(-1.0, 0.5), Error);
  CHECK_THROWS_AS(tightness_model(1.0, 0.0), Error);

  const AsymmetryReport near = asym_regret(m3(1.0, 0.999), marginalize_mu0(m3(1.0, 0.999)));
  CHECK(near.regret == doctest::Approx(0.5005).epsilon(1e-12));
}

TEST_CASE("agent-untreated source iterates to a reported fixed point") {
  const PopulationModel model = m3(2.0, 1.0);
  const AsymmetryReport report = asym_regret(model, agent_untreated_seed(model));
  CHECK(report.estimator_source == Mu0Estimator::Source::AgentUntreated);
  // This fixture oscillates between treating the beta cell and treating both;
  // the bound must hold for the final iterate regardless.
  CHECK(report.regret <= report.bound_max + 1e-9);
  CHECK(report.iterations >= 1);
  // Interior policies only.
  for (double p : report.agent_policy.treat_prob) {
    CHECK(p > 0.0);
    CHECK(p < 1.0);
  }
}

TEST_CASE("asymmetry bounds hold over random joint models") {
  std::mt19937_64 rng(57);
  for (int run = 0; run < 200; ++run) {
    const PopulationModel joint = random_joint_model(rng);
    const AsymmetryReport aux = asym_regret(joint, marginalize_mu0(joint));
    CHECK(aux.regret <= aux.bound_marg + 1e-9);
    const AsymmetryReport agent = asym_regret(joint, agent_untreated_seed(joint));
    CHECK(agent.regret <= agent.bound_max + 1e-9);
  }
}

namespace {

/// Two binary features; points are the four combinations with hand-picked
/// masses and outcome means.
FeatureFrame toy_frame() {
  FeatureFrame frame;
  frame.feature_names = {"a", "b"};
  frame.level_labels = {{"a0", "a1"}, {"b0", "b1"}};
  frame.values = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  frame.probs = {0.25, 0.25, 0.25, 0.25};
  frame.mu0 = {1.0, -1.0, 2.0, 0.0};
  frame.mu1 = {0.5, 0.5, 1.0, 1.0};
  frame.n = 8;
  return frame;
}

}  // namespace

TEST_CASE("grouped_mu0 over feature subsets") {
  const FeatureFrame frame = toy_frame();
  SUBCASE("empty subset is the grand mean") {
    const auto grouped = grouped_mu0(frame, {});
    for (double v : grouped) CHECK(v == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("conditioning on feature a") {
    const auto grouped = grouped_mu0(frame, {0});
    CHECK(grouped[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(grouped[1] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(grouped[2] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(grouped[3] == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("full conditioning reproduces mu0") {
    CHECK(grouped_mu0(frame, {0, 1}) == frame.mu0);
  }
}

TEST_CASE("feature_curve runs from the grand mean to zero asymmetry") {
  const FeatureFrame frame = toy_frame();
  const auto curve = feature_curve(frame, {0, 1});
  REQUIRE(curve.size() == 3);
  CHECK(curve[0].prefix_size == 0);
  CHECK(curve[0].feature_added.empty());
  // Grand mean 0.5: gamma = E|0.5 - mu0| = (0.5 + 1.5 + 1.5 + 0.5) / 4.
  CHECK(curve[0].gamma_marg == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(curve[2].prefix_size == 2);
  CHECK(curve[2].gamma_marg == 0.0);
  CHECK(curve[2].regret == 0.0);

  CHECK_THROWS_AS(feature_curve(frame, {0}), Error);
  CHECK_THROWS_AS(feature_curve(frame, {0, 0}), Error);
  CHECK_THROWS_AS(feature_curve(FeatureFrame{}, {}), Error);
}

TEST_CASE("gamma_feature_order ranks informative features first") {
  // Feature b fully determines mu0; feature a carries nothing.
  FeatureFrame frame;
  frame.feature_names = {"a", "b"};
  frame.level_labels = {{"a0", "a1"}, {"b0", "b1"}};
  frame.values = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  frame.probs = {0.25, 0.25, 0.25, 0.25};
  frame.mu0 = {3.0, -3.0, 3.0, -3.0};
  frame.mu1 = {0.0, 0.0, 0.0, 0.0};
  frame.n = 4;
  const auto order = gamma_feature_order(frame);
  CHECK(order == std::vector<int>{1, 0});

  const auto singles = single_feature_stats(frame);
  CHECK(singles[0].gamma_marg == doctest::Approx(3.0));
  CHECK(singles[1].gamma_marg == 0.0);
}

TEST_CASE("asymmetry report JSON carries the bound fields") {
  const PopulationModel model = m3(2.0, 1.0);
  const std::string text = to_json(asym_regret(model, marginalize_mu0(model)));
  CHECK(text.find("\"gamma_marg\": 2.0") != std::string::npos);
  CHECK(text.find("\"bound_marg\": 4.0") != std::string::npos);
  CHECK(text.find("\"estimator_source\": \"auxiliary-unbiased\"") != std::string::npos);
}
