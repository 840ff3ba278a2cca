#pragma once

#include <string>
#include <vector>

#include "core/datasets.hpp"
#include "core/serialize.hpp"

namespace mf {

struct Table1Row {
  std::string reward;  // w_ATO, w_ATT, w_TO, w_TT, w_TT_no_info, w_TT_demographic
  double utility = 0.0;
  double regret = 0.0;
  double treat_rate = 0.0;
};

struct Table1Report {
  std::string dataset;
  std::int64_t n = 0;
  std::int64_t benefit_count = 0;  // units at support points with tau > 0
  std::vector<Table1Row> rows;
  std::vector<std::string> demographic_features;
  bool demographic_available = false;
};

/// Utility, regret and realized treatment rate for each reward function over
/// the empirical population, with the exact mu0 table standing in for the
/// principal's unbiased estimate. The two partial-information rows condition
/// the estimate on nothing (grand mean) and on the demographic features.
Table1Report evaluate_table1(const EmpiricalPopulation& population,
                             const std::vector<std::string>& demographic_features,
                             const std::string& dataset_name);

std::string to_json(const Table1Report& report);
std::string to_csv(const Table1Report& report);

struct CurveReport {
  std::vector<std::string> feature_names;     // aligned with singles
  std::vector<SingleFeatureStat> singles;     // per-feature stats, schema order
  std::vector<CurvePoint> cumulative;         // accumulation by ascending gamma
};

CurveReport feature_curve_report(const EmpiricalPopulation& population);

std::string to_csv(const CurveReport& report);
std::string to_json(const CurveReport& report);

}  // namespace mf
