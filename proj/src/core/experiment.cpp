#include "core/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <json.hpp>
#include <sstream>

namespace mf {

namespace {

using nlohmann::json;

double treat_rate(const PopulationModel& model, const Policy& policy) {
  double rate = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    rate += policy.treat_prob[i] * model.probs()[i];
  }
  return rate;
}

Table1Row full_info_row(const std::string& name, const RewardSpec& spec,
                        const PopulationModel& model) {
  const RegretReport rr = regret(spec, model, PolicyClass::unconstrained());
  return Table1Row{name, rr.utility, rr.regret, treat_rate(model, rr.best_response)};
}

/// Row where the principal's estimate conditions on a feature subset while
/// the agent still sees the full vector.
Table1Row partial_info_row(const std::string& name, const EmpiricalPopulation& population,
                           const std::vector<int>& features) {
  const auto& frame = population.frame;
  const auto mu0_hat = grouped_mu0(frame, features);
  std::vector<double> pi(frame.size(), 0.0);
  for (std::size_t i = 0; i < frame.size(); ++i) {
    if (frame.mu1[i] - mu0_hat[i] > 0.0) pi[i] = 1.0;
  }
  const Policy policy = make_policy(std::move(pi));
  const double v = utility(population.model, policy);
  const Policy opt = optimal_policy(population.model, PolicyClass::unconstrained());
  return Table1Row{name, v, utility(population.model, opt) - v,
                   treat_rate(population.model, policy)};
}

std::string fmt6(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6g", value);
  return buffer;
}

}  // namespace

Table1Report evaluate_table1(const EmpiricalPopulation& population,
                             const std::vector<std::string>& demographic_features,
                             const std::string& dataset_name) {
  const auto& model = population.model;
  Table1Report report;
  report.dataset = dataset_name;
  report.n = model.n();

  double benefit_mass = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (model.tau(i) > 0.0) benefit_mass += model.probs()[i];
  }
  report.benefit_count = std::llround(benefit_mass * static_cast<double>(model.n()));

  const Mu0Estimator exact = make_auxiliary_estimator(model.mu0());
  report.rows.push_back(full_info_row("w_ATO", reward_ato(), model));
  report.rows.push_back(full_info_row("w_ATT", reward_att(exact), model));
  report.rows.push_back(full_info_row("w_TO", reward_to(), model));
  report.rows.push_back(full_info_row("w_TT", reward_tt(exact), model));

  if (!population.frame.feature_names.empty()) {
    report.rows.push_back(partial_info_row("w_TT_no_info", population, {}));

    std::vector<int> demo;
    for (const auto& name : demographic_features) {
      const auto& names = population.frame.feature_names;
      const auto it = std::find(names.begin(), names.end(), name);
      if (it != names.end()) {
        demo.push_back(static_cast<int>(it - names.begin()));
      }
    }
    if (demo.size() == demographic_features.size() && !demo.empty()) {
      report.demographic_features = demographic_features;
      report.demographic_available = true;
      report.rows.push_back(partial_info_row("w_TT_demographic", population, demo));
    }
  }
  return report;
}

std::string to_json(const Table1Report& report) {
  json doc;
  doc["dataset"] = report.dataset;
  doc["n"] = report.n;
  doc["benefit_count"] = report.benefit_count;
  doc["demographic_features"] = report.demographic_features;
  json rows = json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"reward", row.reward},
                    {"utility", row.utility},
                    {"regret", row.regret},
                    {"treat_rate", row.treat_rate}});
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2);
}

std::string to_csv(const Table1Report& report) {
  std::ostringstream out;
  out << "reward,utility,regret,treat_rate\n";
  for (const auto& row : report.rows) {
    out << row.reward << ',' << fmt6(row.utility) << ',' << fmt6(row.regret) << ','
        << fmt6(row.treat_rate) << '\n';
  }
  return out.str();
}

CurveReport feature_curve_report(const EmpiricalPopulation& population) {
  const auto& frame = population.frame;
  if (frame.feature_names.empty()) {
    fail(ErrorCode::EmptyDataset, "the population carries no feature table");
  }
  CurveReport report;
  report.feature_names = frame.feature_names;
  report.singles = single_feature_stats(frame);
  report.cumulative = feature_curve(frame, gamma_feature_order(frame));
  return report;
}

std::string to_csv(const CurveReport& report) {
  std::ostringstream out;
  out << "curve,prefix_size,feature_name,gamma_marg,regret\n";
  for (const auto& s : report.singles) {
    out << "single,1," << report.feature_names[static_cast<std::size_t>(s.feature)] << ','
        << fmt6(s.gamma_marg) << ',' << fmt6(s.regret) << '\n';
  }
  for (const auto& point : report.cumulative) {
    out << "cumulative," << point.prefix_size << ',' << point.feature_added << ','
        << fmt6(point.gamma_marg) << ',' << fmt6(point.regret) << '\n';
  }
  return out.str();
}

std::string to_json(const CurveReport& report) {
  json doc;
  json singles = json::array();
  for (const auto& s : report.singles) {
    singles.push_back({{"feature", report.feature_names[static_cast<std::size_t>(s.feature)]},
                       {"gamma_marg", s.gamma_marg},
                       {"regret", s.regret}});
  }
  doc["singles"] = std::move(singles);
  json cumulative = json::array();
  for (const auto& point : report.cumulative) {
    cumulative.push_back({{"prefix_size", point.prefix_size},
                          {"feature_added", point.feature_added},
                          {"gamma_marg", point.gamma_marg},
                          {"regret", point.regret}});
  }
  doc["cumulative"] = std::move(cumulative);
  return doc.dump(2);
}

}  // namespace mf
