#include "core/ranking.hpp"

#include <algorithm>
#include <cmath>

namespace mf {

namespace {

constexpr double kScoreTolerance = 1e-12;
constexpr double kSharedMu0Tolerance = 1e-12;

void require_ranking_model(const PopulationModel& model) {
  if (model.has_u()) {
    fail(ErrorCode::InvalidArgument, "ranking operates on X-only models");
  }
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (model.support()[i].x != static_cast<int>(i)) {
      fail(ErrorCode::InvalidArgument, "ranking expects dense x ids (point i has x id i)");
    }
  }
}

}  // namespace

AgentProfile make_agent(std::string id, PopulationModel model, PolicyClass cls) {
  require_ranking_model(model);
  const std::int64_t n_k = model.n();
  return AgentProfile{std::move(id), std::move(model), n_k, std::move(cls)};
}

std::vector<double> reweight_g(const std::vector<double>& reference, const AgentProfile& agent) {
  const auto& probs = agent.model.probs();
  if (reference.size() != probs.size()) {
    fail(ErrorCode::LengthMismatch, "reference distribution and agent support differ in size");
  }
  std::vector<double> g(probs.size(), 0.0);
  for (std::size_t x = 0; x < probs.size(); ++x) {
    if (reference[x] > 0.0 && probs[x] <= 0.0) {
      fail(ErrorCode::AbsoluteContinuityViolation,
           "reference has mass where the agent's distribution has none");
    }
    g[x] = probs[x] > 0.0 ? reference[x] / (static_cast<double>(agent.n_k) * probs[x]) : 0.0;
  }
  return g;
}

double agent_score(const AgentProfile& agent, const RewardSpec& spec) {
  const Policy br = best_response(spec, agent.model, agent.cls);
  return expected_reward(spec, agent.model, br);
}

RankingReport audit_rankings(const std::vector<AgentProfile>& agents,
                             const std::vector<double>& reference, bool use_reweighting) {
  if (agents.size() < 2) {
    fail(ErrorCode::InsufficientAgents, "ranking requires at least two agents");
  }
  const std::size_t s = agents.front().model.size();
  for (const auto& agent : agents) {
    require_ranking_model(agent.model);
    if (agent.model.size() != s) {
      fail(ErrorCode::LengthMismatch, "agents must share the common X support");
    }
    for (std::size_t x = 0; x < s; ++x) {
      if (std::abs(agent.model.mu0()[x] - agents.front().model.mu0()[x]) > kSharedMu0Tolerance) {
        fail(ErrorCode::InvalidArgument, "agents must share the untreated outcome table");
      }
    }
  }
  if (reference.size() != s) {
    fail(ErrorCode::LengthMismatch, "reference distribution must cover the X support");
  }

  RankingReport report;
  report.reweighted = use_reweighting;
  for (const auto& agent : agents) {
    Mu0Estimator est = make_auxiliary_estimator(agent.model.mu0());
    RewardSpec spec = use_reweighting
                          ? reward_weighted_tt(std::move(est), reweight_g(reference, agent))
                          : reward_tt(std::move(est));
    report.ids.push_back(agent.id);
    report.scores.push_back(agent_score(agent, spec));
  }

  std::vector<std::size_t> order(agents.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (report.scores[a] != report.scores[b]) return report.scores[a] > report.scores[b];
    return report.ids[a] < report.ids[b];
  });
  for (std::size_t i : order) report.ordering.push_back(report.ids[i]);

  for (const auto& agent : agents) {
    for (std::size_t x = 0; x < s; ++x) {
      if (agent.model.tau(x) < 0.0) report.relative_applicable = false;
    }
  }

  for (std::size_t j = 0; j < agents.size(); ++j) {
    for (std::size_t k = 0; k < agents.size(); ++k) {
      if (j == k) continue;
      const bool scored_below = report.scores[j] < report.scores[k] - kScoreTolerance;
      if (!scored_below) continue;

      bool dominates = true;
      for (std::size_t x = 0; x < s; ++x) {
        if (agents[j].model.tau(x) < agents[k].model.tau(x)) {
          dominates = false;
          break;
        }
      }
      if (dominates) {
        report.violations.push_back({agents[j].id, agents[k].id, ViolationKind::Uniform});
      }

      if (report.relative_applicable) {
        double ref_j = 0.0;
        double ref_k = 0.0;
        for (std::size_t x = 0; x < s; ++x) {
          ref_j += agents[j].model.tau(x) * reference[x];
          ref_k += agents[k].model.tau(x) * reference[x];
        }
        if (ref_j >= ref_k) {
          report.violations.push_back({agents[j].id, agents[k].id, ViolationKind::Relative});
        }
      }
    }
  }
  return report;
}

}  // namespace mf
