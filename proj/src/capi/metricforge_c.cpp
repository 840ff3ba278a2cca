#include "metricforge.h"

#include <cstring>
#include <json.hpp>
#include <memory>
#include <string>

#include "core/checks.hpp"
#include "core/experiment.hpp"

namespace {

thread_local std::string g_last_error;
thread_local std::string g_last_error_code;

mf_status status_for(mf::ErrorCode code) {
  using mf::ErrorCode;
  switch (code) {
    case ErrorCode::FileNotFound:
      return MF_ERROR_IO;
    case ErrorCode::ParseError:
    case ErrorCode::MalformedRecord:
      return MF_ERROR_PARSE;
    case ErrorCode::UnsupportedClass:
    case ErrorCode::SupportTooLarge:
      return MF_ERROR_UNSUPPORTED;
    default:
      return MF_ERROR_INVALID;
  }
}

mf_status record_error(const std::exception& e) {
  g_last_error = e.what();
  if (const auto* err = dynamic_cast<const mf::Error*>(&e)) {
    g_last_error_code = mf::error_code_name(err->code());
    return status_for(err->code());
  }
  g_last_error_code = "Internal";
  return MF_ERROR_INTERNAL;
}

template <typename Fn>
mf_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    g_last_error_code.clear();
    return MF_OK;
  } catch (const std::exception& e) {
    return record_error(e);
  }
}

char* copy_string(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

mf_status invalid(const char* message) {
  g_last_error = message;
  g_last_error_code = "InvalidArgument";
  return MF_ERROR_INVALID;
}

std::vector<std::string> split_list(const char* csv) {
  std::vector<std::string> items;
  if (!csv) return items;
  std::string current;
  for (const char* p = csv;; ++p) {
    if (*p == ',' || *p == '\0') {
      if (!current.empty()) items.push_back(current);
      current.clear();
      if (*p == '\0') break;
    } else {
      current.push_back(*p);
    }
  }
  return items;
}

}  // namespace

struct mf_model {
  mf::EmpiricalPopulation rep;
};

struct mf_rows {
  std::string dataset;
  std::vector<mf::ClinicalRow> rows;
  mf::LoadReport report;
};

struct mf_fit {
  mf::FitResult rep;
};

extern "C" {

const char* mf_version(void) { return "0.1.0"; }

const char* mf_last_error(void) { return g_last_error.c_str(); }

const char* mf_last_error_code(void) { return g_last_error_code.c_str(); }

void mf_string_free(char* text) { std::free(text); }

void mf_model_free(mf_model* model) { delete model; }

void mf_rows_free(mf_rows* rows) { delete rows; }

void mf_fit_free(mf_fit* fit) { delete fit; }

mf_status mf_model_from_json(const char* json_text, mf_model** out) {
  if (!json_text || !out) return invalid("null argument");
  return guarded([&] { *out = new mf_model{mf::empirical_from_json(json_text)}; });
}

mf_status mf_model_to_json(const mf_model* model, char** out) {
  if (!model || !out) return invalid("null argument");
  return guarded([&] { *out = copy_string(mf::to_json(model->rep)); });
}

mf_status mf_model_read(const char* path, mf_model** out) {
  if (!path || !out) return invalid("null argument");
  return guarded(
      [&] { *out = new mf_model{mf::empirical_from_json(mf::read_text_file(path))}; });
}

mf_status mf_model_write(const mf_model* model, const char* path) {
  if (!model || !path) return invalid("null argument");
  return guarded([&] { mf::write_text_file(path, mf::to_json(model->rep)); });
}

mf_status mf_model_size(const mf_model* model, size_t* out) {
  if (!model || !out) return invalid("null argument");
  *out = model->rep.model.size();
  return MF_OK;
}

mf_status mf_tightness_model(double alpha, double beta, mf_model** out) {
  if (!out) return invalid("null argument");
  return guarded([&] { *out = new mf_model{{mf::tightness_model(alpha, beta), {}}}; });
}

mf_status mf_expected_reward(const mf_model* model, const char* spec_json,
                             const double* treat_prob, size_t len, double* out) {
  if (!model || !spec_json || !treat_prob || !out) return invalid("null argument");
  return guarded([&] {
    const mf::RewardSpec spec = mf::reward_spec_from_json(spec_json);
    const mf::Policy policy =
        mf::make_policy(std::vector<double>(treat_prob, treat_prob + len));
    *out = mf::expected_reward(spec, model->rep.model, policy);
  });
}

mf_status mf_regret_report(const mf_model* model, const char* spec_json, char** report_json) {
  if (!model || !spec_json || !report_json) return invalid("null argument");
  return guarded([&] {
    const mf::RewardSpec spec = mf::reward_spec_from_json(spec_json);
    const mf::RegretReport report =
        mf::regret(spec, model->rep.model, mf::PolicyClass::unconstrained());
    *report_json = copy_string(mf::to_json(report));
  });
}

mf_status mf_asym_report(const mf_model* model, const char* source, double interior_eps,
                         char** report_json) {
  if (!model || !source || !report_json) return invalid("null argument");
  return guarded([&] {
    const std::string kind = source;
    mf::Mu0Estimator estimator;
    mf::AsymmetryOptions options;
    if (interior_eps > 0.0) options.interior_eps = interior_eps;
    if (kind == "auxiliary" || kind == "auxiliary-unbiased") {
      estimator = mf::marginalize_mu0(model->rep.model);
    } else if (kind == "agent-untreated") {
      estimator = mf::agent_untreated_seed(model->rep.model, options.interior_eps);
    } else {
      mf::fail(mf::ErrorCode::InvalidArgument,
               "source must be 'auxiliary' or 'agent-untreated'");
    }
    const mf::AsymmetryReport report =
        mf::asym_regret(model->rep.model, estimator, options);
    *report_json = copy_string(mf::to_json(report));
  });
}

mf_status mf_curve(const mf_model* model, const char* format, char** out) {
  if (!model || !format || !out) return invalid("null argument");
  return guarded([&] {
    const mf::CurveReport report = mf::feature_curve_report(model->rep);
    const std::string fmt = format;
    if (fmt == "csv") {
      *out = copy_string(mf::to_csv(report));
    } else if (fmt == "json") {
      *out = copy_string(mf::to_json(report));
    } else {
      mf::fail(mf::ErrorCode::InvalidArgument, "format must be 'json' or 'csv'");
    }
  });
}

mf_status mf_evaluate(const mf_model* model, const char* demographics_csv, const char* format,
                      char** out) {
  if (!model || !format || !out) return invalid("null argument");
  return guarded([&] {
    const mf::Table1Report report =
        mf::evaluate_table1(model->rep, split_list(demographics_csv), "population");
    const std::string fmt = format;
    if (fmt == "csv") {
      *out = copy_string(mf::to_csv(report));
    } else if (fmt == "json") {
      *out = copy_string(mf::to_json(report));
    } else {
      mf::fail(mf::ErrorCode::InvalidArgument, "format must be 'json' or 'csv'");
    }
  });
}

mf_status mf_rank(const char* agents_json, int reweight_override, char** report_json,
                  char** leaderboard_csv) {
  if (!agents_json) return invalid("null argument");
  return guarded([&] {
    const nlohmann::json doc = nlohmann::json::parse(agents_json, nullptr, false);
    if (doc.is_discarded() || !doc.contains("agents") || !doc["agents"].is_array()) {
      mf::fail(mf::ErrorCode::ParseError, "expected {\"agents\": [...], \"reference\": [...]}");
    }
    std::vector<mf::AgentProfile> agents;
    for (const auto& a : doc["agents"]) {
      const auto probs = a.at("probs").get<std::vector<double>>();
      std::vector<mf::CovariatePoint> support(probs.size());
      for (std::size_t i = 0; i < probs.size(); ++i) {
        support[i] = mf::CovariatePoint{static_cast<int>(i), std::nullopt};
      }
      agents.push_back(mf::make_agent(
          a.at("id").get<std::string>(),
          mf::make_population(std::move(support), probs, a.at("mu0").get<std::vector<double>>(),
                              a.at("mu1").get<std::vector<double>>(),
                              a.at("n").get<std::int64_t>())));
    }
    const auto reference = doc.at("reference").get<std::vector<double>>();
    const bool reweight =
        reweight_override >= 0 ? reweight_override != 0 : doc.value("use_reweighting", true);
    const mf::RankingReport report = mf::audit_rankings(agents, reference, reweight);
    if (report_json) *report_json = copy_string(mf::to_json(report));
    if (leaderboard_csv) *leaderboard_csv = copy_string(mf::ranking_leaderboard_csv(report));
  });
}

mf_status mf_load_dataset(const char* name, const char* path, const char* impute,
                          mf_rows** out) {
  if (!name || !path || !out) return invalid("null argument");
  return guarded([&] {
    mf::LoadOptions options;
    const std::string strategy = impute ? impute : "median";
    if (strategy == "median") {
      options.impute = mf::LoadOptions::Impute::Median;
    } else if (strategy == "drop") {
      options.impute = mf::LoadOptions::Impute::Drop;
    } else {
      mf::fail(mf::ErrorCode::InvalidArgument, "impute must be 'median' or 'drop'");
    }
    const std::string dataset = name;
    auto handle = std::make_unique<mf_rows>();
    handle->dataset = dataset;
    if (dataset == "horse-colic") {
      handle->rows = mf::load_horse_colic(path, options, &handle->report);
    } else if (dataset == "ist") {
      handle->rows = mf::load_ist(path, options, &handle->report);
    } else {
      mf::fail(mf::ErrorCode::InvalidArgument, "dataset must be 'horse-colic' or 'ist'");
    }
    *out = handle.release();
  });
}

mf_status mf_rows_summary(const mf_rows* rows, char** summary_json) {
  if (!rows || !summary_json) return invalid("null argument");
  return guarded([&] {
    nlohmann::json doc;
    doc["dataset"] = rows->dataset;
    doc["raw_records"] = rows->report.raw_records;
    doc["kept"] = rows->report.kept;
    doc["dropped_outcome"] = rows->report.dropped_outcome;
    doc["dropped_treatment"] = rows->report.dropped_treatment;
    doc["dropped_missing"] = rows->report.dropped_missing;
    doc["imputed_numeric"] = rows->report.imputed_numeric;
    doc["missing_categorical"] = rows->report.missing_categorical;
    doc["treatment_rate"] = rows->report.treatment_rate;
    *summary_json = copy_string(doc.dump(2));
  });
}

mf_status mf_fit_rows(const mf_rows* rows, double ridge, int standardize_numeric, mf_fit** out) {
  if (!rows || !out) return invalid("null argument");
  return guarded([&] {
    const mf::FeatureSchema schema =
        rows->dataset == "horse-colic" ? mf::horse_colic_schema() : mf::ist_schema();
    const auto encoded = mf::one_hot_encode(rows->rows, schema, standardize_numeric != 0);
    std::vector<int> treatment(rows->rows.size());
    Eigen::VectorXd outcome(static_cast<Eigen::Index>(rows->rows.size()));
    for (std::size_t i = 0; i < rows->rows.size(); ++i) {
      treatment[i] = rows->rows[i].treatment;
      outcome(static_cast<Eigen::Index>(i)) = rows->rows[i].outcome;
    }
    mf::FitResult fit;
    if (rows->dataset == "horse-colic") {
      mf::LogisticOptions options;
      if (ridge >= 0.0) options.ridge = ridge;
      fit = mf::fit_logistic(encoded.design, treatment, outcome, encoded.encoding, options);
    } else {
      fit = mf::fit_linear(encoded.design, treatment, outcome, encoded.encoding);
    }
    *out = new mf_fit{std::move(fit)};
  });
}

mf_status mf_fit_to_json(const mf_fit* fit, char** out) {
  if (!fit || !out) return invalid("null argument");
  return guarded([&] { *out = copy_string(mf::to_json(fit->rep)); });
}

mf_status mf_build_population(const mf_rows* rows, const mf_fit* fit, mf_model** out) {
  if (!rows || !fit || !out) return invalid("null argument");
  return guarded(
      [&] { *out = new mf_model{mf::build_empirical_model(rows->rows, fit->rep)}; });
}

mf_status mf_check(uint64_t seed, char** summary_json, int* all_passed) {
  return guarded([&] {
    const auto results = mf::run_property_checks(seed);
    if (summary_json) *summary_json = copy_string(mf::checks_to_json(results, seed));
    if (all_passed) *all_passed = mf::all_passed(results) ? 1 : 0;
  });
}

}  // extern "C"
