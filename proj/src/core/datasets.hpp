#pragma once

#include <string>
#include <vector>

#include "core/asymmetry.hpp"
#include "core/glm.hpp"
#include "core/rows.hpp"

namespace mf {

struct LoadOptions {
  enum class Impute { Median, Drop };
  Impute impute = Impute::Median;
  /// Cross-checks row counts and treatment rates against the documented
  /// preprocessing contract; disable only for synthetic fixture files.
  bool enforce_contract = true;
};

struct LoadReport {
  std::size_t raw_records = 0;
  std::size_t kept = 0;
  std::size_t dropped_outcome = 0;    // euthanized or missing outcome
  std::size_t dropped_treatment = 0;  // missing or off-arm treatment
  std::size_t dropped_missing = 0;    // rows dropped under Impute::Drop
  std::size_t imputed_numeric = 0;    // numeric cells replaced by the column median
  std::size_t missing_categorical = 0;
  double treatment_rate = 0.0;
};

/// Pre-treatment feature layout for each dataset, in encoding order.
FeatureSchema horse_colic_schema();
FeatureSchema ist_schema();

/// UCI horse colic file: whitespace-separated, 28 fields per record, "?" for
/// missing. Keeps the 20 pre-surgery features, maps surgery to the treatment,
/// drops euthanized cases, and codes survival as +1 / death as -1.
std::vector<ClinicalRow> load_horse_colic(const std::string& path, const LoadOptions& options = {},
                                          LoadReport* report = nullptr);

/// International Stroke Trial CSV. Keeps the randomisation features other
/// than dates and times, retains the high-heparin-plus-aspirin arm (treated)
/// and the aspirin-alone arm (control), and scores the composite outcome.
std::vector<ClinicalRow> load_ist(const std::string& path, const LoadOptions& options = {},
                                  LoadReport* report = nullptr);

/// The six event indicators feeding the composite outcome score.
struct OutcomePanel {
  bool death = false;
  bool recurrent_stroke = false;
  bool pe_or_intracranial_bleed = false;
  bool other_side_effects = false;
  bool full_recovery_6m = false;
  bool discharge_within_14d = false;
};

/// -2 death - 1 recurrent stroke - 0.5 (PE or intracranial bleed)
/// - 0.5 other side effects + 2 full recovery + 1 early discharge; in [-4, 3].
double composite_outcome(const OutcomePanel& panel);

/// An empirical population: the model over distinct observed feature vectors
/// plus the per-point feature values needed for conditioning.
struct EmpiricalPopulation {
  PopulationModel model;
  FeatureFrame frame;
};

/// Merges duplicate feature vectors (weights summed), attaches synthetic mean
/// potential outcomes from the fit, and keeps the per-feature value ids.
EmpiricalPopulation build_empirical_model(const std::vector<ClinicalRow>& rows,
                                          const FitResult& fit);

}  // namespace mf
