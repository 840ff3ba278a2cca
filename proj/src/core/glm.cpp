#include "core/glm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mf {

namespace {

double numeric_value(const FeatureValue& value, const std::string& feature) {
  if (!is_numeric(value)) {
    fail(ErrorCode::InvalidArgument, "feature '" + feature + "' expected a numeric value");
  }
  return std::get<double>(value);
}

const std::string& label_value(const FeatureValue& value, const std::string& feature) {
  if (is_numeric(value)) {
    fail(ErrorCode::InvalidArgument, "feature '" + feature + "' expected a categorical label");
  }
  return std::get<std::string>(value);
}

const FeatureValue& row_value(const ClinicalRow& row, const std::string& feature) {
  auto it = row.features.find(feature);
  if (it == row.features.end()) {
    fail(ErrorCode::InvalidArgument, "row lacks feature '" + feature + "'");
  }
  return it->second;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// [1 | X | T | X.T]
Eigen::MatrixXd interaction_design(const Eigen::MatrixXd& design,
                                   const std::vector<int>& treatment) {
  const auto n = design.rows();
  const auto w = design.cols();
  if (static_cast<Eigen::Index>(treatment.size()) != n) {
    fail(ErrorCode::LengthMismatch, "treatment vector does not match the design rows");
  }
  Eigen::MatrixXd full(n, 2 * w + 2);
  full.col(0).setOnes();
  full.block(0, 1, n, w) = design;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = treatment[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
    full(i, 1 + w) = t;
    full.row(i).segment(2 + w, w) = design.row(i) * t;
  }
  return full;
}

FitResult unpack_beta(const Eigen::VectorXd& beta, Eigen::Index w) {
  FitResult fit;
  fit.beta0 = beta(0);
  fit.beta1 = beta.segment(1, w);
  fit.beta2 = beta(1 + w);
  fit.beta3 = beta.tail(w);
  return fit;
}

}  // namespace

int Encoding::value_id(std::size_t feature_index, const FeatureValue& value) const {
  const auto& field = schema_.fields[feature_index];
  if (field.numeric) {
    const double v = numeric_value(value, field.name);
    const auto& dict = numeric_values_[feature_index];
    auto it = std::find(dict.begin(), dict.end(), v);
    if (it == dict.end()) {
      fail(ErrorCode::UnknownLevelAtPredictTime,
           "numeric value not observed in training for '" + field.name + "'");
    }
    return static_cast<int>(it - dict.begin());
  }
  const auto& label = label_value(value, field.name);
  const auto& levels = levels_[feature_index];
  auto it = std::find(levels.begin(), levels.end(), label);
  if (it == levels.end()) {
    fail(ErrorCode::UnknownLevelAtPredictTime,
         "level '" + label + "' of '" + field.name + "' was not seen in training");
  }
  return static_cast<int>(it - levels.begin());
}

Eigen::VectorXd Encoding::encode_row(const ClinicalRow& row) const {
  Eigen::VectorXd encoded = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(width()));
  for (std::size_t f = 0; f < schema_.fields.size(); ++f) {
    const auto& field = schema_.fields[f];
    const auto& value = row_value(row, field.name);
    const int start = column_start_[f];
    if (field.numeric) {
      double v = numeric_value(value, field.name);
      if (standardize_) {
        v = (v - means_[static_cast<std::size_t>(start)]) / sds_[static_cast<std::size_t>(start)];
      }
      encoded(start) = v;
    } else {
      const auto& label = label_value(value, field.name);
      const auto& levels = levels_[f];
      auto it = std::find(levels.begin(), levels.end(), label);
      if (it == levels.end()) {
        fail(ErrorCode::UnknownLevelAtPredictTime,
             "level '" + label + "' of '" + field.name + "' was not seen in training");
      }
      encoded(start + (it - levels.begin())) = 1.0;
    }
  }
  return encoded;
}

EncodeResult one_hot_encode(const std::vector<ClinicalRow>& rows, const FeatureSchema& schema,
                            bool standardize_numeric) {
  if (rows.empty()) {
    fail(ErrorCode::EmptyDataset, "cannot encode an empty row set");
  }

  Encoding enc;
  enc.schema_ = schema;
  enc.standardize_ = standardize_numeric;
  enc.levels_.resize(schema.fields.size());
  enc.numeric_values_.resize(schema.fields.size());
  enc.column_start_.resize(schema.fields.size(), 0);

  // First pass: collect levels by first appearance and numeric dictionaries.
  for (std::size_t f = 0; f < schema.fields.size(); ++f) {
    const auto& field = schema.fields[f];
    for (const auto& row : rows) {
      const auto& value = row_value(row, field.name);
      if (field.numeric) {
        const double v = numeric_value(value, field.name);
        auto& dict = enc.numeric_values_[f];
        if (std::find(dict.begin(), dict.end(), v) == dict.end()) dict.push_back(v);
      } else {
        const auto& label = label_value(value, field.name);
        auto& levels = enc.levels_[f];
        if (std::find(levels.begin(), levels.end(), label) == levels.end()) {
          levels.push_back(label);
        }
      }
    }
  }

  for (std::size_t f = 0; f < schema.fields.size(); ++f) {
    const auto& field = schema.fields[f];
    enc.column_start_[f] = static_cast<int>(enc.columns_.size());
    if (field.numeric) {
      enc.columns_.push_back({field.name, true, ""});
    } else {
      for (const auto& level : enc.levels_[f]) {
        enc.columns_.push_back({field.name, false, level});
      }
    }
  }

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto w = static_cast<Eigen::Index>(enc.columns_.size());
  Eigen::MatrixXd design = Eigen::MatrixXd::Zero(n, w);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    for (std::size_t f = 0; f < schema.fields.size(); ++f) {
      const auto& field = schema.fields[f];
      const auto& value = row_value(row, field.name);
      const int start = enc.column_start_[f];
      if (field.numeric) {
        design(i, start) = numeric_value(value, field.name);
      } else {
        const auto& label = label_value(value, field.name);
        const auto& levels = enc.levels_[f];
        const auto it = std::find(levels.begin(), levels.end(), label);
        design(i, start + (it - levels.begin())) = 1.0;
      }
    }
  }

  enc.means_.assign(static_cast<std::size_t>(w), 0.0);
  enc.sds_.assign(static_cast<std::size_t>(w), 1.0);
  if (standardize_numeric) {
    for (std::size_t f = 0; f < schema.fields.size(); ++f) {
      if (!schema.fields[f].numeric) continue;
      const auto c = static_cast<Eigen::Index>(enc.column_start_[f]);
      const double mean = design.col(c).mean();
      double sd = std::sqrt((design.col(c).array() - mean).square().sum() /
                            static_cast<double>(n));
      if (sd <= 0.0) sd = 1.0;
      design.col(c) = (design.col(c).array() - mean) / sd;
      enc.means_[static_cast<std::size_t>(c)] = mean;
      enc.sds_[static_cast<std::size_t>(c)] = sd;
    }
  }

  return EncodeResult{std::move(design), std::move(enc)};
}

FitResult fit_linear(const Eigen::MatrixXd& design, const std::vector<int>& treatment,
                     const Eigen::VectorXd& outcome, const Encoding& encoding) {
  const auto n = design.rows();
  if (n == 0) {
    fail(ErrorCode::EmptyDataset, "cannot fit on zero rows");
  }
  if (outcome.size() != n) {
    fail(ErrorCode::LengthMismatch, "outcome vector does not match the design rows");
  }
  const Eigen::MatrixXd full = interaction_design(design, treatment);

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(full);
  const Eigen::VectorXd beta = cod.solve(outcome);

  FitResult fit = unpack_beta(beta, design.cols());
  fit.family = ModelFamily::Linear;
  fit.encoding = encoding;
  fit.converged = true;

  const Eigen::VectorXd residual = outcome - full * beta;
  const double ss_res = residual.squaredNorm();
  fit.diagnostics.rmse = std::sqrt(ss_res / static_cast<double>(n));
  const double mean = outcome.mean();
  const double ss_tot = (outcome.array() - mean).square().sum();
  fit.diagnostics.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
  return fit;
}

FitResult fit_logistic(const Eigen::MatrixXd& design, const std::vector<int>& treatment,
                       const Eigen::VectorXd& outcome, const Encoding& encoding,
                       const LogisticOptions& options) {
  const auto n = design.rows();
  if (n == 0) {
    fail(ErrorCode::EmptyDataset, "cannot fit on zero rows");
  }
  if (outcome.size() != n) {
    fail(ErrorCode::LengthMismatch, "outcome vector does not match the design rows");
  }

  Eigen::VectorXd y01(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (outcome(i) == 1.0) {
      y01(i) = 1.0;
    } else if (outcome(i) == -1.0) {
      y01(i) = 0.0;
    } else {
      fail(ErrorCode::NonBinaryOutcome, "logistic outcomes must be -1 or +1");
    }
  }
  const double positives = y01.sum();
  if (positives == 0.0 || positives == static_cast<double>(n)) {
    fail(ErrorCode::SingleClassTarget, "both outcome classes are required");
  }

  const Eigen::MatrixXd full = interaction_design(design, treatment);
  const auto m = full.cols();

  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(m, options.ridge);
  penalty(0) = 0.0;  // free intercept

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(m);
  bool converged = false;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const Eigen::VectorXd eta = full * beta;
    Eigen::VectorXd p(n);
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double pi = std::clamp(sigmoid(eta(i)), 1e-12, 1.0 - 1e-12);
      p(i) = pi;
      w(i) = pi * (1.0 - pi);
    }
    const Eigen::VectorXd grad = full.transpose() * (y01 - p) - penalty.asDiagonal() * beta;
    Eigen::MatrixXd hessian = full.transpose() * w.asDiagonal() * full;
    hessian += Eigen::MatrixXd(penalty.asDiagonal());
    const Eigen::VectorXd delta = hessian.ldlt().solve(grad);
    beta += delta;
    if (delta.cwiseAbs().maxCoeff() < options.tolerance) {
      converged = true;
      break;
    }
  }

  FitResult fit = unpack_beta(beta, design.cols());
  fit.family = ModelFamily::Logistic;
  fit.encoding = encoding;
  fit.converged = converged;
  fit.ridge = options.ridge;

  const Eigen::VectorXd eta = full * beta;
  Eigen::VectorXd scores(n);
  std::vector<int> labels(static_cast<std::size_t>(n));
  Eigen::Index correct = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    scores(i) = sigmoid(eta(i));
    labels[static_cast<std::size_t>(i)] = y01(i) > 0.5 ? 1 : 0;
    if ((scores(i) >= 0.5) == (y01(i) > 0.5)) ++correct;
  }
  fit.diagnostics.auc = auc_score(scores, labels);
  fit.diagnostics.accuracy = static_cast<double>(correct) / static_cast<double>(n);
  return fit;
}

double predict_mu(const FitResult& fit, const Eigen::VectorXd& x_encoded, int t) {
  if (x_encoded.size() != fit.beta1.size()) {
    fail(ErrorCode::WidthMismatch, "encoded vector does not match the training width");
  }
  double eta = fit.beta0 + fit.beta1.dot(x_encoded);
  if (t) {
    eta += fit.beta2 + fit.beta3.dot(x_encoded);
  }
  if (fit.family == ModelFamily::Logistic) {
    return 2.0 * sigmoid(eta) - 1.0;
  }
  return eta;
}

double auc_score(const Eigen::VectorXd& scores, const std::vector<int>& labels) {
  const auto n = static_cast<std::size_t>(scores.size());
  if (labels.size() != n) {
    fail(ErrorCode::LengthMismatch, "scores and labels differ in length");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores(static_cast<Eigen::Index>(a)) < scores(static_cast<Eigen::Index>(b));
  });

  // Rank-sum with average ranks over tied scores.
  double rank_sum_pos = 0.0;
  std::size_t n_pos = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores(static_cast<Eigen::Index>(order[j + 1])) ==
                            scores(static_cast<Eigen::Index>(order[i]))) {
      ++j;
    }
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] == 1) {
        rank_sum_pos += avg_rank;
        ++n_pos;
      }
    }
    i = j + 1;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    fail(ErrorCode::SingleClassTarget, "AUC requires both classes");
  }
  const double u = rank_sum_pos - static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

}  // namespace mf
