#pragma once

#include <doctest.h>

#include "core/asymmetry.hpp"
#include "core/checks.hpp"
#include "core/response.hpp"

namespace mftest {

/// Two-cell population from the averaged-reward divergence construction,
/// instantiated at alpha = -2, beta = 0, p = 1/2: mu1 = (0, 1),
/// mu0 = (-2, 0), tau = (2, 1).
inline mf::PopulationModel fixture_m1(std::int64_t n = 100) {
  return mf::make_population({{0, std::nullopt}, {1, std::nullopt}}, {0.5, 0.5}, {-2.0, 0.0},
                             {0.0, 1.0}, n);
}

inline mf::Mu0Estimator exact_mu0(const mf::PopulationModel& model) {
  return mf::make_auxiliary_estimator(model.mu0());
}

inline mf::Policy uniform_policy(const mf::PopulationModel& model, double p) {
  return mf::make_policy(std::vector<double>(model.size(), p));
}

}  // namespace mftest
