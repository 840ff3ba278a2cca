#include "core/datasets.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace mf {

namespace {

constexpr std::size_t kHorseColicFields = 28;
constexpr std::size_t kHorseColicRecords = 300;
constexpr std::size_t kIstArmTotal = 7264;
constexpr double kIstTreatmentRate = 0.33;
constexpr double kRateTolerance = 0.02;

const char* kMissingLevel = "missing";

struct RawColumn {
  std::string name;
  bool numeric = false;
  int field = 0;  // source field index
};

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

double parse_numeric_cell(const std::string& cell, std::size_t record) {
  if (cell.empty() || cell == "?") return std::numeric_limits<double>::quiet_NaN();
  char* end = nullptr;
  const double value = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size()) {
    fail(ErrorCode::MalformedRecord,
         "record " + std::to_string(record) + ": bad numeric cell '" + cell + "'");
  }
  return value;
}

/// Median of the finite entries; NaN when none exist.
double column_median(std::vector<double> values) {
  values.erase(std::remove_if(values.begin(), values.end(),
                              [](double v) { return !std::isfinite(v); }),
               values.end());
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

/// Shared assembly: raw feature cells -> ClinicalRows with imputation.
std::vector<ClinicalRow> assemble_rows(const std::vector<RawColumn>& columns,
                                       const std::vector<std::vector<std::string>>& feature_cells,
                                       const std::vector<int>& treatments,
                                       const std::vector<double>& outcomes,
                                       const LoadOptions& options, LoadReport& report) {
  const std::size_t n = feature_cells.size();

  // Column medians for numeric imputation.
  std::vector<double> medians(columns.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (!columns[c].numeric) continue;
    std::vector<double> parsed(n);
    for (std::size_t i = 0; i < n; ++i) {
      parsed[i] = parse_numeric_cell(feature_cells[i][c], i);
    }
    medians[c] = column_median(parsed);
  }

  std::vector<ClinicalRow> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    bool missing_any = false;
    ClinicalRow row;
    row.treatment = treatments[i];
    row.outcome = outcomes[i];
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const auto& cell = feature_cells[i][c];
      if (columns[c].numeric) {
        double value = parse_numeric_cell(cell, i);
        if (!std::isfinite(value)) {
          missing_any = true;
          value = medians[c];
          ++report.imputed_numeric;
        }
        if (!std::isfinite(value)) {
          fail(ErrorCode::MalformedRecord,
               "column '" + columns[c].name + "' has no observed numeric values");
        }
        row.features[columns[c].name] = value;
      } else {
        if (cell.empty() || cell == "?") {
          missing_any = true;
          ++report.missing_categorical;
          row.features[columns[c].name] = std::string(kMissingLevel);
        } else {
          row.features[columns[c].name] = cell;
        }
      }
    }
    if (missing_any && options.impute == LoadOptions::Impute::Drop) {
      ++report.dropped_missing;
      continue;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void finalize_report(const std::vector<ClinicalRow>& rows, LoadReport& report) {
  report.kept = rows.size();
  if (!rows.empty()) {
    double treated = 0.0;
    for (const auto& row : rows) treated += row.treatment ? 1.0 : 0.0;
    report.treatment_rate = treated / static_cast<double>(rows.size());
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  cells.push_back(cell);
  return cells;
}

}  // namespace

FeatureSchema horse_colic_schema() {
  FeatureSchema schema;
  schema.fields = {
      {"age", false},
      {"rectal_temperature", true},
      {"pulse", true},
      {"respiratory_rate", true},
      {"temp_of_extremities", false},
      {"peripheral_pulse", false},
      {"mucous_membranes", false},
      {"capillary_refill_time", false},
      {"pain", false},
      {"peristalsis", false},
      {"abdominal_distension", false},
      {"nasogastric_tube", false},
      {"nasogastric_reflux", false},
      {"nasogastric_reflux_ph", true},
      {"rectal_examination", false},
      {"abdomen", false},
      {"packed_cell_volume", true},
      {"total_protein", true},
      {"abdominocentesis_appearance", false},
      {"abdominocentesis_total_protein", true},
  };
  return schema;
}

std::vector<ClinicalRow> load_horse_colic(const std::string& path, const LoadOptions& options,
                                          LoadReport* out_report) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorCode::FileNotFound, "cannot open '" + path + "'");
  }
  std::vector<std::string> tokens;
  std::string token;
  while (in >> token) tokens.push_back(token);
  if (tokens.empty() || tokens.size() % kHorseColicFields != 0) {
    fail(ErrorCode::MalformedRecord,
         "expected records of " + std::to_string(kHorseColicFields) + " fields, got " +
             std::to_string(tokens.size()) + " tokens");
  }
  const std::size_t n_records = tokens.size() / kHorseColicFields;

  LoadReport report;
  report.raw_records = n_records;

  // Pre-surgery fields, in file order; field 2 (hospital id) and the
  // post-outcome fields are dropped.
  const std::vector<RawColumn> columns = {
      {"age", false, 1},
      {"rectal_temperature", true, 3},
      {"pulse", true, 4},
      {"respiratory_rate", true, 5},
      {"temp_of_extremities", false, 6},
      {"peripheral_pulse", false, 7},
      {"mucous_membranes", false, 8},
      {"capillary_refill_time", false, 9},
      {"pain", false, 10},
      {"peristalsis", false, 11},
      {"abdominal_distension", false, 12},
      {"nasogastric_tube", false, 13},
      {"nasogastric_reflux", false, 14},
      {"nasogastric_reflux_ph", true, 15},
      {"rectal_examination", false, 16},
      {"abdomen", false, 17},
      {"packed_cell_volume", true, 18},
      {"total_protein", true, 19},
      {"abdominocentesis_appearance", false, 20},
      {"abdominocentesis_total_protein", true, 21},
  };

  std::vector<std::vector<std::string>> feature_cells;
  std::vector<int> treatments;
  std::vector<double> outcomes;
  for (std::size_t r = 0; r < n_records; ++r) {
    const auto field = [&](int idx) -> const std::string& {
      return tokens[r * kHorseColicFields + static_cast<std::size_t>(idx)];
    };
    const std::string& surgery = field(0);
    const std::string& outcome = field(22);
    if (surgery == "?") {
      ++report.dropped_treatment;
      continue;
    }
    if (outcome == "3") {  // euthanized
      ++report.dropped_outcome;
      continue;
    }
    if (outcome != "1" && outcome != "2") {
      ++report.dropped_outcome;
      continue;
    }
    treatments.push_back(surgery == "1" ? 1 : 0);
    outcomes.push_back(outcome == "1" ? 1.0 : -1.0);
    std::vector<std::string> cells;
    cells.reserve(columns.size());
    for (const auto& column : columns) cells.push_back(field(column.field));
    feature_cells.push_back(std::move(cells));
  }

  auto rows = assemble_rows(columns, feature_cells, treatments, outcomes, options, report);
  finalize_report(rows, report);

  if (options.enforce_contract) {
    if (n_records != kHorseColicRecords) {
      fail(ErrorCode::InvalidArgument,
           "expected the 300-case file, found " + std::to_string(n_records) + " records");
    }
  }
  if (out_report) *out_report = report;
  return rows;
}

FeatureSchema ist_schema() {
  FeatureSchema schema;
  schema.fields = {
      {"HOSPNUM", false}, {"RDELAY", true},  {"RCONSC", false}, {"SEX", false},
      {"AGE", true},      {"RSLEEP", false}, {"RATRIAL", false}, {"RCT", false},
      {"RVISINF", false}, {"RHEP24", false}, {"RASP3", false},  {"RSBP", true},
      {"RDEF1", false},   {"RDEF2", false},  {"RDEF3", false},  {"RDEF4", false},
      {"RDEF5", false},   {"RDEF6", false},  {"RDEF7", false},  {"RDEF8", false},
      {"STYPE", false},
  };
  return schema;
}

double composite_outcome(const OutcomePanel& panel) {
  double score = 0.0;
  if (panel.death) score -= 2.0;
  if (panel.recurrent_stroke) score -= 1.0;
  if (panel.pe_or_intracranial_bleed) score -= 0.5;
  if (panel.other_side_effects) score -= 0.5;
  if (panel.full_recovery_6m) score += 2.0;
  if (panel.discharge_within_14d) score += 1.0;
  return score;
}

std::vector<ClinicalRow> load_ist(const std::string& path, const LoadOptions& options,
                                  LoadReport* out_report) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorCode::FileNotFound, "cannot open '" + path + "'");
  }
  std::string line;
  if (!std::getline(in, line)) {
    fail(ErrorCode::MalformedRecord, "empty file");
  }
  const auto header = split_csv_line(line);
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < header.size(); ++i) {
    index[upper(trim(header[i]))] = static_cast<int>(i);
  }
  const auto col = [&](const std::string& name) -> int {
    auto it = index.find(name);
    return it == index.end() ? -1 : it->second;
  };
  const auto require_col = [&](const std::string& name) -> int {
    const int c = col(name);
    if (c < 0) {
      fail(ErrorCode::MissingIndicator, "column '" + name + "' is missing from the file");
    }
    return c;
  };

  const int c_rxasp = require_col("RXASP");
  const int c_rxhep = require_col("RXHEP");

  const auto schema = ist_schema();
  std::vector<RawColumn> columns;
  for (const auto& field : schema.fields) {
    columns.push_back({field.name, field.numeric, require_col(field.name)});
  }

  // Composite outcome inputs. Death counts either the 14-day or the 6-month
  // form; the cerebral-bleed indicator prefers the derived H14 flag when the
  // file carries it.
  const int c_fdead = require_col("FDEAD");
  const int c_ddead = col("DDEAD");
  const int c_drsisc = require_col("DRSISC");
  const int c_drsh = require_col("DRSH");
  const int c_drsunk = col("DRSUNK");
  const int c_dpe = require_col("DPE");
  const int c_h14 = col("H14");
  const int c_dside = col("DSIDE");
  const int c_dmajnch = col("DMAJNCH");
  if (c_dside < 0 && c_dmajnch < 0) {
    fail(ErrorCode::MissingIndicator, "no side-effect column (DSIDE or DMAJNCH) in the file");
  }
  const int c_frecover = require_col("FRECOVER");
  const int c_dalive = require_col("DALIVE");

  const auto yes = [](const std::string& cell) {
    const std::string v = upper(trim(cell));
    return v == "Y" || v == "1";
  };

  LoadReport report;
  std::vector<std::vector<std::string>> feature_cells;
  std::vector<int> treatments;
  std::vector<double> outcomes;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++report.raw_records;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      fail(ErrorCode::MalformedRecord,
           "line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
               " cells, got " + std::to_string(cells.size()));
    }
    const auto cell = [&](int c) -> std::string {
      return c >= 0 ? trim(cells[static_cast<std::size_t>(c)]) : std::string();
    };

    const std::string rxasp = upper(cell(c_rxasp));
    const std::string rxhep = upper(cell(c_rxhep));
    int treatment = -1;
    if (rxasp == "Y" && rxhep == "H") {
      treatment = 1;
    } else if (rxasp == "Y" && rxhep == "N") {
      treatment = 0;
    } else {
      ++report.dropped_treatment;  // other heparin doses or no aspirin
      continue;
    }

    OutcomePanel panel;
    panel.death = yes(cell(c_fdead)) || yes(cell(c_ddead));
    panel.recurrent_stroke =
        yes(cell(c_drsisc)) || yes(cell(c_drsh)) || yes(cell(c_drsunk));
    panel.pe_or_intracranial_bleed =
        yes(cell(c_dpe)) || (c_h14 >= 0 ? yes(cell(c_h14)) : yes(cell(c_drsh)));
    panel.other_side_effects = yes(cell(c_dside)) || yes(cell(c_dmajnch));
    panel.full_recovery_6m = yes(cell(c_frecover));
    panel.discharge_within_14d = yes(cell(c_dalive));

    treatments.push_back(treatment);
    outcomes.push_back(composite_outcome(panel));
    std::vector<std::string> feats;
    feats.reserve(columns.size());
    for (const auto& column : columns) {
      std::string v = cell(column.field);
      if (!column.numeric) v = upper(v);
      feats.push_back(std::move(v));
    }
    feature_cells.push_back(std::move(feats));
  }

  auto rows = assemble_rows(columns, feature_cells, treatments, outcomes, options, report);
  finalize_report(rows, report);

  if (options.enforce_contract) {
    if (rows.size() != kIstArmTotal) {
      fail(ErrorCode::InvalidArgument,
           "arm filter kept " + std::to_string(rows.size()) + " patients, expected " +
               std::to_string(kIstArmTotal));
    }
    if (std::abs(report.treatment_rate - kIstTreatmentRate) > kRateTolerance) {
      fail(ErrorCode::InvalidArgument,
           "treatment rate " + std::to_string(report.treatment_rate) + " is off contract");
    }
  }
  if (out_report) *out_report = report;
  return rows;
}

EmpiricalPopulation build_empirical_model(const std::vector<ClinicalRow>& rows,
                                          const FitResult& fit) {
  if (rows.empty()) {
    fail(ErrorCode::EmptyDataset, "cannot build a population from zero rows");
  }
  const auto& encoding = fit.encoding;
  const auto& fields = encoding.schema().fields;

  FeatureFrame frame;
  frame.feature_names.reserve(fields.size());
  for (const auto& field : fields) frame.feature_names.push_back(field.name);
  frame.level_labels.resize(fields.size());
  for (std::size_t f = 0; f < fields.size(); ++f) {
    if (!fields[f].numeric) frame.level_labels[f] = encoding.levels(f);
  }

  std::map<std::vector<int>, std::size_t> seen;
  std::vector<std::size_t> counts;
  std::vector<Eigen::VectorXd> encoded_reps;
  for (const auto& row : rows) {
    std::vector<int> key(fields.size());
    for (std::size_t f = 0; f < fields.size(); ++f) {
      key[f] = encoding.value_id(f, row.features.at(fields[f].name));
    }
    auto it = seen.find(key);
    if (it == seen.end()) {
      seen.emplace(key, frame.values.size());
      frame.values.push_back(key);
      counts.push_back(1);
      encoded_reps.push_back(encoding.encode_row(row));
    } else {
      ++counts[it->second];
    }
  }

  // Numeric label tables: value id -> printed value.
  for (std::size_t f = 0; f < fields.size(); ++f) {
    if (!fields[f].numeric) continue;
    int max_id = -1;
    for (const auto& key : frame.values) max_id = std::max(max_id, key[f]);
    frame.level_labels[f].resize(static_cast<std::size_t>(max_id + 1));
  }
  for (const auto& row : rows) {
    for (std::size_t f = 0; f < fields.size(); ++f) {
      if (!fields[f].numeric) continue;
      const int id = encoding.value_id(f, row.features.at(fields[f].name));
      auto& label = frame.level_labels[f][static_cast<std::size_t>(id)];
      if (label.empty()) {
        char buffer[40];
        std::snprintf(buffer, sizeof(buffer), "%.17g",
                      std::get<double>(row.features.at(fields[f].name)));
        label = buffer;
      }
    }
  }

  const auto s = frame.values.size();
  const double n = static_cast<double>(rows.size());
  frame.probs.resize(s);
  frame.mu0.resize(s);
  frame.mu1.resize(s);
  frame.n = static_cast<std::int64_t>(rows.size());
  std::vector<CovariatePoint> support(s);
  for (std::size_t i = 0; i < s; ++i) {
    support[i] = CovariatePoint{static_cast<int>(i), std::nullopt};
    frame.probs[i] = static_cast<double>(counts[i]) / n;
    frame.mu0[i] = predict_mu(fit, encoded_reps[i], 0);
    frame.mu1[i] = predict_mu(fit, encoded_reps[i], 1);
  }

  EmpiricalPopulation pop{
      make_population(std::move(support), frame.probs, frame.mu0, frame.mu1,
                      static_cast<std::int64_t>(rows.size())),
      std::move(frame)};
  return pop;
}

}  // namespace mf
