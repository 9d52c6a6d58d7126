#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "asearch/agents.hpp"
#include "asearch/scenario.hpp"

namespace asearch {

struct DecisionRecord {
    AgentId agent = 0;
    long long epoch = 0;
    double sim_time_s = 0.0;  // when the decision was taken
    double arrival_s = 0.0;   // when the action's observation completes
    AgentKind kind = AgentKind::UGV;
    CellIndex target = 0;
    Heading heading = Heading::N;
    int q = 0;  // cells sensed by the chosen action
    int observed_cells = 0;  // including en-route sensing
    double reward = 0.0;
    double travel_cost = 0.0;
    std::size_t num_candidates = 0;
    bool wrap_around = false;
    std::vector<CellIndex> newly_recovered;
    int recovered_total = 0;
};

struct AgentSummary {
    AgentId id = 0;
    std::string kind;
    std::string policy;
    bool alive = true;
    int decisions = 0;
    int em_calls = 0;
    Posterior posterior;  // evaluation posterior over the agent's final dataset
};

struct EpisodeLog {
    std::string scenario;
    std::string algorithm;
    std::uint64_t seed = 0;
    int team_size = 0;
    std::vector<CellIndex> ooi_cells;
    std::vector<DecisionRecord> records;
    std::string termination;  // all_recovered | budget | time_budget | all_failed
    double final_sim_time_s = 0.0;
    std::vector<double> thresholds;                     // [0] is the primary threshold
    std::vector<std::vector<CellIndex>> recovered;      // per threshold, final
    std::vector<AgentSummary> agents;
    std::vector<TraceEntry> message_trace;

    int num_oois() const { return static_cast<int>(ooi_cells.size()); }
    int total_decisions() const { return static_cast<int>(records.size()); }
    int found() const { return recovered.empty() ? 0 : static_cast<int>(recovered.front().size()); }
    bool success() const { return found() == num_oois(); }
};

// Runs one episode. Throws ScenarioError before simulating if the scenario
// is invalid.
EpisodeLog run_episode(const Scenario& scenario, std::uint64_t seed);

// Runs every (algorithm, seed) pair, algorithm-major. Episodes are independent
// and may run on `jobs` threads; the result order does not depend on it.
std::vector<EpisodeLog> run_sweep(const Scenario& scenario, std::span<const Algorithm> algorithms,
                                  std::span<const std::uint64_t> seeds, int jobs = 1);

nlohmann::ordered_json episode_to_json(const EpisodeLog& log);
std::string episode_to_string(const EpisodeLog& log);

}  // namespace asearch
