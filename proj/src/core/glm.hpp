#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "core/errors.hpp"
#include "core/rows.hpp"

namespace mf {

enum class ModelFamily { Logistic, Linear };

/// Column metadata for an encoded design: the source feature and, for
/// categorical columns, the level it indicates.
struct EncodedColumn {
  std::string feature;
  bool numeric = false;
  std::string level;  // empty for numeric columns
};

/// Deterministic one-hot encoding. Categorical features expand to one column
/// per observed level (full encoding, no reference level dropped); numeric
/// features pass through, optionally standardized. Levels are ordered by first
/// appearance in the training rows.
class Encoding {
 public:
  const std::vector<EncodedColumn>& columns() const noexcept { return columns_; }
  const FeatureSchema& schema() const noexcept { return schema_; }
  std::size_t width() const noexcept { return columns_.size(); }
  bool standardized() const noexcept { return standardize_; }

  /// Level labels for a categorical feature, by value id.
  const std::vector<std::string>& levels(std::size_t feature_index) const {
    return levels_[feature_index];
  }
  /// Value id of a row's feature: level id, or index into the numeric
  /// dictionary built from the training rows.
  int value_id(std::size_t feature_index, const FeatureValue& value) const;

  /// Encodes one row against the training-time layout; unseen categorical
  /// levels are an error.
  Eigen::VectorXd encode_row(const ClinicalRow& row) const;

  friend struct EncodeResult;
  friend EncodeResult one_hot_encode(const std::vector<ClinicalRow>&, const FeatureSchema&, bool);

 private:
  FeatureSchema schema_;
  std::vector<EncodedColumn> columns_;
  std::vector<std::vector<std::string>> levels_;      // per feature: level labels
  std::vector<std::vector<double>> numeric_values_;   // per feature: distinct training values
  std::vector<int> column_start_;                     // first design column per feature
  bool standardize_ = false;
  std::vector<double> means_;  // per column, when standardizing
  std::vector<double> sds_;
};

struct EncodeResult {
  Eigen::MatrixXd design;
  Encoding encoding;
};

EncodeResult one_hot_encode(const std::vector<ClinicalRow>& rows, const FeatureSchema& schema,
                            bool standardize_numeric = false);

struct FitDiagnostics {
  std::optional<double> auc;       // logistic
  std::optional<double> accuracy;  // logistic, threshold 0.5
  std::optional<double> rmse;      // linear
  std::optional<double> r2;        // linear
};

/// Coefficients of the interaction model  y ~ b0 + b1.x + b2 t + b3.(x t),
/// with the encoding needed to rebuild mu_t tables without refitting.
struct FitResult {
  ModelFamily family = ModelFamily::Linear;
  double beta0 = 0.0;
  Eigen::VectorXd beta1;
  double beta2 = 0.0;
  Eigen::VectorXd beta3;
  Encoding encoding;
  FitDiagnostics diagnostics;
  bool converged = true;
  double ridge = 0.0;
};

struct LogisticOptions {
  double ridge = 1e-6;  // guards against separation; the intercept is never penalized
  double tolerance = 1e-8;
  int max_iterations = 100;
};

/// Ordinary least squares on [1 | X | T | X.T] via a rank-revealing
/// decomposition; minimum-norm solution under rank deficiency. In-sample rmse
/// and r2 (r2 is 0 for a zero-variance target).
FitResult fit_linear(const Eigen::MatrixXd& design, const std::vector<int>& treatment,
                     const Eigen::VectorXd& outcome, const Encoding& encoding);

/// Logistic maximum likelihood on outcomes in {-1,+1} via iteratively
/// reweighted least squares with a small ridge. In-sample AUC (ties counted
/// half) and accuracy at threshold 0.5.
FitResult fit_logistic(const Eigen::MatrixXd& design, const std::vector<int>& treatment,
                       const Eigen::VectorXd& outcome, const Encoding& encoding,
                       const LogisticOptions& options = {});

/// Mean potential outcome under treatment t at an encoded covariate vector.
/// Logistic fits return 2 P(Y=1|x,t) - 1, the mean of an outcome in {-1,+1}.
double predict_mu(const FitResult& fit, const Eigen::VectorXd& x_encoded, int t);

/// Area under the ROC curve by the rank statistic, ties counted one half.
double auc_score(const Eigen::VectorXd& scores, const std::vector<int>& labels);

}  // namespace mf
