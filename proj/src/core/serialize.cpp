#include "core/serialize.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace mf {

namespace {

using nlohmann::json;

json parse(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    fail(ErrorCode::ParseError, "invalid JSON document");
  }
  return doc;
}

json support_to_json(const PopulationModel& model) {
  json support = json::array();
  for (const auto& point : model.support()) {
    json p;
    p["x"] = point.x;
    if (point.u) p["u"] = *point.u;
    support.push_back(std::move(p));
  }
  return support;
}

std::vector<double> doubles_from(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_array()) {
    fail(ErrorCode::ParseError, std::string("missing array field '") + key + "'");
  }
  std::vector<double> values;
  values.reserve(doc[key].size());
  for (const auto& v : doc[key]) {
    if (!v.is_number()) {
      fail(ErrorCode::ParseError, std::string("field '") + key + "' must hold numbers");
    }
    values.push_back(v.get<double>());
  }
  return values;
}

PopulationModel model_from_doc(const json& doc) {
  if (!doc.contains("support") || !doc["support"].is_array()) {
    fail(ErrorCode::ParseError, "missing array field 'support'");
  }
  std::vector<CovariatePoint> support;
  support.reserve(doc["support"].size());
  for (const auto& p : doc["support"]) {
    CovariatePoint point;
    if (!p.contains("x") || !p["x"].is_number_integer()) {
      fail(ErrorCode::ParseError, "support points need an integer 'x'");
    }
    point.x = p["x"].get<int>();
    if (p.contains("u") && !p["u"].is_null()) {
      point.u = p["u"].get<int>();
    }
    support.push_back(point);
  }
  if (!doc.contains("n") || !doc["n"].is_number_integer()) {
    fail(ErrorCode::ParseError, "missing integer field 'n'");
  }
  return make_population(std::move(support), doubles_from(doc, "probs"),
                         doubles_from(doc, "mu0"), doubles_from(doc, "mu1"),
                         doc["n"].get<std::int64_t>());
}

json model_to_doc(const PopulationModel& model) {
  json doc;
  doc["support"] = support_to_json(model);
  doc["probs"] = model.probs();
  doc["mu0"] = model.mu0();
  doc["mu1"] = model.mu1();
  doc["n"] = model.n();
  if (model.has_u()) {
    std::vector<int> u_support(static_cast<std::size_t>(model.u_size()));
    for (std::size_t i = 0; i < u_support.size(); ++i) u_support[i] = static_cast<int>(i);
    doc["u_support"] = u_support;
  }
  return doc;
}

json policy_to_doc(const Policy& policy) {
  json doc;
  doc["treat_prob"] = policy.treat_prob;
  switch (policy.cls.kind()) {
    case PolicyClass::Kind::Unconstrained:
      doc["class"] = {{"kind", "unconstrained"}};
      break;
    case PolicyClass::Kind::PositivityConstrained:
      doc["class"] = {{"kind", "positivity"}, {"epsilon", policy.cls.epsilon()}};
      break;
    case PolicyClass::Kind::ExplicitSet:
      doc["class"] = {{"kind", "explicit"}, {"size", policy.cls.members().size()}};
      break;
  }
  return doc;
}

json estimator_to_doc(const Mu0Estimator& est) {
  json doc;
  doc["estimates"] = est.estimates;
  doc["source"] = est.source == Mu0Estimator::Source::AuxiliaryUnbiased ? "auxiliary-unbiased"
                                                                        : "agent-untreated";
  if (est.policy) doc["policy"] = policy_to_doc(*est.policy);
  return doc;
}

Mu0Estimator estimator_from_doc(const json& doc) {
  Mu0Estimator est;
  est.estimates = doubles_from(doc, "estimates");
  const std::string source = doc.value("source", "auxiliary-unbiased");
  if (source == "auxiliary-unbiased") {
    est.source = Mu0Estimator::Source::AuxiliaryUnbiased;
  } else if (source == "agent-untreated") {
    est.source = Mu0Estimator::Source::AgentUntreated;
  } else {
    fail(ErrorCode::ParseError, "unknown estimator source '" + source + "'");
  }
  if (doc.contains("policy") && doc["policy"].is_object()) {
    Policy policy;
    policy.treat_prob = doubles_from(doc["policy"], "treat_prob");
    est.policy = make_policy(std::move(policy.treat_prob));
  }
  return est;
}

}  // namespace

std::string to_json(const PopulationModel& model) { return model_to_doc(model).dump(2); }

PopulationModel model_from_json(const std::string& text) { return model_from_doc(parse(text)); }

std::string to_json(const EmpiricalPopulation& population) {
  json doc = model_to_doc(population.model);
  if (!population.frame.feature_names.empty()) {
    json features;
    features["names"] = population.frame.feature_names;
    features["levels"] = population.frame.level_labels;
    features["values"] = population.frame.values;
    doc["features"] = std::move(features);
  }
  return doc.dump(2);
}

EmpiricalPopulation empirical_from_json(const std::string& text) {
  const json doc = parse(text);
  EmpiricalPopulation population{model_from_doc(doc), {}};
  if (doc.contains("features") && doc["features"].is_object()) {
    const auto& features = doc["features"];
    FeatureFrame frame;
    frame.feature_names = features.at("names").get<std::vector<std::string>>();
    frame.level_labels = features.at("levels").get<std::vector<std::vector<std::string>>>();
    frame.values = features.at("values").get<std::vector<std::vector<int>>>();
    frame.probs = population.model.probs();
    frame.mu0 = population.model.mu0();
    frame.mu1 = population.model.mu1();
    frame.n = population.model.n();
    if (frame.values.size() != population.model.size()) {
      fail(ErrorCode::ParseError, "feature table does not match the support size");
    }
    for (const auto& row : frame.values) {
      if (row.size() != frame.feature_names.size()) {
        fail(ErrorCode::ParseError, "feature table rows must cover every feature");
      }
    }
    population.frame = std::move(frame);
  }
  return population;
}

std::string to_json(const RewardSpec& spec) {
  json doc;
  doc["kind"] = reward_kind_name(spec.kind);
  if (spec.mu0_hat) doc["mu0_hat"] = estimator_to_doc(*spec.mu0_hat);
  if (spec.weight_g) doc["g"] = *spec.weight_g;
  return doc.dump(2);
}

RewardSpec reward_spec_from_json(const std::string& text) {
  const json doc = parse(text);
  if (!doc.contains("kind") || !doc["kind"].is_string()) {
    fail(ErrorCode::ParseError, "reward spec needs a string 'kind'");
  }
  const RewardKind kind = reward_kind_from_name(doc["kind"].get<std::string>());
  std::optional<Mu0Estimator> est;
  if (doc.contains("mu0_hat") && doc["mu0_hat"].is_object()) {
    est = estimator_from_doc(doc["mu0_hat"]);
  }
  switch (kind) {
    case RewardKind::ATO:
      return reward_ato();
    case RewardKind::TO:
      return reward_to();
    case RewardKind::ATT:
      if (!est) fail(ErrorCode::MissingEstimator, "ATT requires mu0_hat");
      return reward_att(std::move(*est));
    case RewardKind::TT:
      if (!est) fail(ErrorCode::MissingEstimator, "TT requires mu0_hat");
      return reward_tt(std::move(*est));
    case RewardKind::WeightedTT: {
      if (!est) fail(ErrorCode::MissingEstimator, "WeightedTT requires mu0_hat");
      if (!doc.contains("g")) fail(ErrorCode::MissingWeight, "WeightedTT requires 'g'");
      return reward_weighted_tt(std::move(*est), doubles_from(doc, "g"));
    }
  }
  fail(ErrorCode::ParseError, "unreachable reward kind");
}

std::string to_json(const RegretReport& report) {
  json doc;
  doc["best_response"] = policy_to_doc(report.best_response);
  doc["utility"] = report.utility;
  doc["optimal_utility"] = report.optimal_utility;
  doc["regret"] = report.regret;
  doc["optimal_policy"] = policy_to_doc(report.optimal_policy);
  return doc.dump(2);
}

std::string to_json(const AsymmetryReport& report) {
  json doc;
  doc["gamma_marg"] = report.gamma_marg;
  doc["gamma_max"] = report.gamma_max;
  doc["regret"] = report.regret;
  doc["bound_marg"] = report.bound_marg;
  doc["bound_max"] = report.bound_max;
  doc["slack_marg"] = report.slack_marg;
  doc["slack_max"] = report.slack_max;
  doc["estimator_source"] = report.estimator_source == Mu0Estimator::Source::AuxiliaryUnbiased
                                ? "auxiliary-unbiased"
                                : "agent-untreated";
  doc["converged"] = report.converged;
  doc["iterations"] = report.iterations;
  doc["utility"] = report.utility;
  doc["optimal_utility"] = report.optimal_utility;
  doc["agent_policy"] = policy_to_doc(report.agent_policy);
  doc["optimal_policy"] = policy_to_doc(report.optimal);
  doc["mu0_hat"] = report.mu0_hat;
  return doc.dump(2);
}

std::string to_json(const RankingReport& report) {
  json doc;
  json scores = json::array();
  for (std::size_t i = 0; i < report.ids.size(); ++i) {
    scores.push_back({{"id", report.ids[i]}, {"score", report.scores[i]}});
  }
  doc["scores"] = std::move(scores);
  doc["ordering"] = report.ordering;
  json violations = json::array();
  for (const auto& v : report.violations) {
    violations.push_back({{"better", v.better},
                          {"worse", v.worse},
                          {"kind", v.kind == ViolationKind::Uniform ? "uniform" : "relative"}});
  }
  doc["violations"] = std::move(violations);
  doc["relative_applicable"] = report.relative_applicable;
  doc["reweighted"] = report.reweighted;
  return doc.dump(2);
}

std::string ranking_leaderboard_csv(const RankingReport& report) {
  std::ostringstream out;
  out << "id,score,rank,uniform_violation,relative_violation\n";
  for (std::size_t rank = 0; rank < report.ordering.size(); ++rank) {
    const auto& id = report.ordering[rank];
    double score = 0.0;
    for (std::size_t i = 0; i < report.ids.size(); ++i) {
      if (report.ids[i] == id) score = report.scores[i];
    }
    int uniform = 0;
    int relative = 0;
    for (const auto& v : report.violations) {
      if (v.better == id || v.worse == id) {
        (v.kind == ViolationKind::Uniform ? uniform : relative) = 1;
      }
    }
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.6g", score);
    out << id << ',' << buffer << ',' << rank + 1 << ',' << uniform << ',' << relative << '\n';
  }
  return out.str();
}

std::string to_json(const FitResult& fit) {
  json doc;
  doc["family"] = fit.family == ModelFamily::Logistic ? "logistic" : "linear";
  doc["beta0"] = fit.beta0;
  doc["beta1"] = std::vector<double>(fit.beta1.data(), fit.beta1.data() + fit.beta1.size());
  doc["beta2"] = fit.beta2;
  doc["beta3"] = std::vector<double>(fit.beta3.data(), fit.beta3.data() + fit.beta3.size());
  doc["converged"] = fit.converged;
  doc["ridge"] = fit.ridge;

  json columns = json::array();
  for (const auto& column : fit.encoding.columns()) {
    json c;
    c["feature"] = column.feature;
    if (column.numeric) {
      c["numeric"] = true;
    } else {
      c["level"] = column.level;
    }
    columns.push_back(std::move(c));
  }
  doc["encoding"] = {{"columns", std::move(columns)},
                     {"standardized", fit.encoding.standardized()}};

  json diagnostics;
  if (fit.diagnostics.auc) diagnostics["auc"] = *fit.diagnostics.auc;
  if (fit.diagnostics.accuracy) diagnostics["accuracy"] = *fit.diagnostics.accuracy;
  if (fit.diagnostics.rmse) diagnostics["rmse"] = *fit.diagnostics.rmse;
  if (fit.diagnostics.r2) diagnostics["r2"] = *fit.diagnostics.r2;
  doc["diagnostics"] = std::move(diagnostics);
  return doc.dump(2);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(ErrorCode::FileNotFound, "cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    fail(ErrorCode::FileNotFound, "cannot write '" + path + "'");
  }
  out << text;
}

}  // namespace mf
