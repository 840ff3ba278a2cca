#pragma once

#include <string>

#include "core/asymmetry.hpp"
#include "core/datasets.hpp"
#include "core/glm.hpp"
#include "core/ranking.hpp"
#include "core/response.hpp"

namespace mf {

/// Population document: {"support": [...], "probs": [...], "mu0": [...],
/// "mu1": [...], "n": int, "u_support": [...] when a U dimension exists}.
/// Unknown keys are ignored on load.
std::string to_json(const PopulationModel& model);
PopulationModel model_from_json(const std::string& text);

/// Population document extended with a "features" object carrying the
/// empirical feature table. Loading a document without "features" yields an
/// empty frame.
std::string to_json(const EmpiricalPopulation& population);
EmpiricalPopulation empirical_from_json(const std::string& text);

std::string to_json(const RewardSpec& spec);
RewardSpec reward_spec_from_json(const std::string& text);

std::string to_json(const RegretReport& report);
std::string to_json(const AsymmetryReport& report);

std::string to_json(const RankingReport& report);
std::string ranking_leaderboard_csv(const RankingReport& report);

std::string to_json(const FitResult& fit);

/// Reads a whole file; FileNotFound on failure.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace mf
