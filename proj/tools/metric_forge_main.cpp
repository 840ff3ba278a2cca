// metric-forge: reward-function incentive analysis over treatment populations.
//
// Talks to the core exclusively through the C API. Exit codes: 0 success,
// 1 property failure, 2 input error.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "metricforge.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPropertyFailure = 1;
constexpr int kExitInputError = 2;

[[noreturn]] void die(const std::string& context) {
  std::cerr << "error (" << context << "): " << mf_last_error() << "\n";
  std::exit(kExitInputError);
}

struct StringGuard {
  char* text = nullptr;
  ~StringGuard() { mf_string_free(text); }
};

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write '" << out_path << "'\n";
    std::exit(kExitInputError);
  }
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open '" << path << "'\n";
    std::exit(kExitInputError);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool named_dataset(const std::string& dataset) {
  return dataset == "horse-colic" || dataset == "ist";
}

std::string default_demographics(const std::string& dataset) {
  if (dataset == "horse-colic") return "age";
  if (dataset == "ist") return "AGE,SEX";
  return "";
}

/// Loads rows, fits the dataset's outcome model, and builds the empirical
/// population. The caller owns the returned handles.
void build_from_dataset(const std::string& dataset, const std::string& data_path,
                        const std::string& impute, double ridge, bool standardize,
                        mf_rows** rows, mf_fit** fit, mf_model** model) {
  if (mf_load_dataset(dataset.c_str(), data_path.c_str(), impute.c_str(), rows) != MF_OK) {
    die("load " + dataset);
  }
  if (mf_fit_rows(*rows, ridge, standardize ? 1 : 0, fit) != MF_OK) die("fit " + dataset);
  if (mf_build_population(*rows, *fit, model) != MF_OK) die("build population");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"metric-forge: incentives, rankings and information asymmetry "
               "for treatment-policy reward functions"};
  app.require_subcommand(1);

  std::string dataset;
  std::string data_path;
  std::string impute = "median";
  double ridge = 1e-6;
  bool standardize = false;
  std::string out_path;
  std::string format = "json";
  std::string demographics;
  std::uint64_t seed = 1;

  auto add_dataset_flags = [&](CLI::App* cmd) {
    cmd->add_option("--dataset", dataset,
                    "Dataset name (horse-colic | ist) or a population JSON path");
    cmd->add_option("--data", data_path, "Raw dataset file for named datasets");
    cmd->add_option("--impute", impute, "Missing-value strategy: median | drop")
        ->check(CLI::IsMember({"median", "drop"}));
    cmd->add_option("--ridge", ridge, "Ridge strength for the logistic fit");
    cmd->add_flag("--standardize", standardize, "Standardize numeric features");
  };
  auto add_output_flags = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_path, "Output path (stdout when omitted)");
    cmd->add_option("--format", format, "Output format: json | csv")
        ->check(CLI::IsMember({"json", "csv"}));
  };

  auto* fit_cmd = app.add_subcommand("fit", "Fit the outcome model and report diagnostics");
  add_dataset_flags(fit_cmd);
  add_output_flags(fit_cmd);
  std::string model_out;
  fit_cmd->add_option("--model-out", model_out, "Also write the empirical population JSON");

  auto* evaluate_cmd =
      app.add_subcommand("evaluate", "Utility, regret and treat rate per reward function");
  add_dataset_flags(evaluate_cmd);
  add_output_flags(evaluate_cmd);
  evaluate_cmd->add_option("--demographics", demographics,
                           "Comma-separated features for the demographic row");

  auto* rank_cmd = app.add_subcommand("rank", "Score and audit a set of agents");
  std::string agents_path;
  bool no_reweight = false;
  rank_cmd->add_option("--agents", agents_path, "Agents JSON file")->required();
  rank_cmd->add_flag("--no-reweight", no_reweight, "Score with unweighted total treatment effect");
  add_output_flags(rank_cmd);

  auto* asym_cmd = app.add_subcommand("asym", "Information-asymmetry regret report");
  std::string model_path;
  std::string source = "auxiliary";
  double interior_eps = 1e-3;
  asym_cmd->add_option("--model", model_path, "Joint population JSON file")->required();
  asym_cmd->add_option("--source", source, "Estimator source: auxiliary | agent-untreated")
      ->check(CLI::IsMember({"auxiliary", "agent-untreated"}));
  asym_cmd->add_option("--eps", interior_eps, "Interior policy floor for agent-untreated");
  add_output_flags(asym_cmd);

  auto* curve_cmd = app.add_subcommand("curve", "Per-feature gamma table and accumulation curve");
  add_dataset_flags(curve_cmd);
  add_output_flags(curve_cmd);

  auto* check_cmd = app.add_subcommand("check", "Run the seeded property suite");
  check_cmd->add_option("--seed", seed, "Seed for the randomized properties");
  check_cmd->add_option("--out", out_path, "Output path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  if (fit_cmd->parsed()) {
    if (!named_dataset(dataset)) {
      std::cerr << "error: fit requires --dataset horse-colic|ist\n";
      return kExitInputError;
    }
    mf_rows* rows = nullptr;
    mf_fit* fit = nullptr;
    mf_model* model = nullptr;
    build_from_dataset(dataset, data_path, impute, ridge, standardize, &rows, &fit, &model);
    StringGuard fit_json;
    if (mf_fit_to_json(fit, &fit_json.text) != MF_OK) die("serialize fit");
    StringGuard summary;
    if (mf_rows_summary(rows, &summary.text) != MF_OK) die("summarize rows");
    std::cerr << summary.text << "\n";
    emit(fit_json.text, out_path);
    if (!model_out.empty() && mf_model_write(model, model_out.c_str()) != MF_OK) {
      die("write model");
    }
    mf_model_free(model);
    mf_fit_free(fit);
    mf_rows_free(rows);
    return kExitOk;
  }

  if (evaluate_cmd->parsed() || curve_cmd->parsed()) {
    mf_rows* rows = nullptr;
    mf_fit* fit = nullptr;
    mf_model* model = nullptr;
    if (named_dataset(dataset)) {
      build_from_dataset(dataset, data_path, impute, ridge, standardize, &rows, &fit, &model);
    } else if (!dataset.empty()) {
      if (mf_model_read(dataset.c_str(), &model) != MF_OK) die("read model");
    } else {
      std::cerr << "error: --dataset is required\n";
      return kExitInputError;
    }
    StringGuard report;
    if (evaluate_cmd->parsed()) {
      const std::string demo =
          evaluate_cmd->count("--demographics") ? demographics : default_demographics(dataset);
      if (mf_evaluate(model, demo.c_str(), format.c_str(), &report.text) != MF_OK) {
        die("evaluate");
      }
    } else {
      if (mf_curve(model, format.c_str(), &report.text) != MF_OK) die("curve");
    }
    emit(report.text, out_path);
    mf_model_free(model);
    mf_fit_free(fit);
    mf_rows_free(rows);
    return kExitOk;
  }

  if (rank_cmd->parsed()) {
    const std::string doc = read_file(agents_path);
    StringGuard report;
    StringGuard leaderboard;
    if (mf_rank(doc.c_str(), no_reweight ? 0 : -1, &report.text, &leaderboard.text) != MF_OK) {
      die("rank");
    }
    emit(format == "csv" ? leaderboard.text : report.text, out_path);
    return kExitOk;
  }

  if (asym_cmd->parsed()) {
    mf_model* model = nullptr;
    if (mf_model_read(model_path.c_str(), &model) != MF_OK) die("read model");
    StringGuard report;
    if (mf_asym_report(model, source.c_str(), interior_eps, &report.text) != MF_OK) {
      die("asym");
    }
    emit(report.text, out_path);
    mf_model_free(model);
    return kExitOk;
  }

  if (check_cmd->parsed()) {
    StringGuard summary;
    int passed = 0;
    if (mf_check(seed, &summary.text, &passed) != MF_OK) die("check");
    emit(summary.text, out_path);
    return passed ? kExitOk : kExitPropertyFailure;
  }

  return kExitInputError;
}
