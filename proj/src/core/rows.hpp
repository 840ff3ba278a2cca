#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace mf {

/// A feature value: numeric, or a categorical level label.
using FeatureValue = std::variant<double, std::string>;

inline bool is_numeric(const FeatureValue& value) {
  return std::holds_alternative<double>(value);
}

/// One observational unit: named features, binary treatment, real outcome.
struct ClinicalRow {
  std::map<std::string, FeatureValue> features;
  int treatment = 0;
  double outcome = 0.0;
};

/// Declares each feature's name and type, in encoding order.
struct FeatureSchema {
  struct Field {
    std::string name;
    bool numeric = false;
  };
  std::vector<Field> fields;
};

}  // namespace mf
