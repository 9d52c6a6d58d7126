#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "asearch/comms.hpp"
#include "asearch/grid_world.hpp"
#include "asearch/planner.hpp"
#include "asearch/posterior.hpp"
#include "asearch/sensing.hpp"

namespace asearch {

inline constexpr int kScenarioVersion = 1;

class ScenarioError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

struct TeamMember {
    AgentKind kind = AgentKind::UGV;
    Algorithm policy = Algorithm::GUTS;
    GridCoord launch;
    Heading heading = Heading::N;
};

struct Budget {
    int max_decisions_per_agent = 60;
    double max_sim_seconds = 0.0;  // 0 disables the time limit
};

struct Timing {
    double epoch_seconds = 15.0;
    double ugv_speed_mps = 2.0;
    double uav_speed_mps = 10.0;
};

struct Scenario {
    std::string name = "unnamed";
    std::vector<Point2> polygon;
    double cell_size_m = 30.0;
    std::vector<double> costmap;  // row-major; empty means uniform 1
    int ooi_count = 0;
    std::vector<GridCoord> ooi_cells;  // explicit placement overrides ooi_count
    std::vector<TeamMember> team;
    NoiseConfig noise;
    CommsConfig comms;
    RewardConfig reward;
    SblHyper hyper;
    Budget budget;
    Timing timing;
    double recovery_threshold = 0.7;
    std::vector<double> sensitivity_thresholds{0.7, 0.85, 0.95};
    std::vector<std::uint64_t> seeds{0};
    bool trace_messages = false;

    // Full semantic check (builds the region). Throws ScenarioError.
    void validate() const;
    SearchRegion build_region() const;
    int num_oois() const { return ooi_cells.empty() ? ooi_count : static_cast<int>(ooi_cells.size()); }
    // Same policy for every member, or nullopt-like "MIXED".
    std::string team_label() const;
    void set_algorithm(Algorithm a);
};

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::string& path);

// "0-19", "1,2,5", "0-4,10" -> seeds.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

// The built-in desk-scale scenario: 20x20 cells of 30 m, a few impassable
// blobs, 5 OOIs, two UGVs.
Scenario demo_scenario();

}  // namespace asearch
