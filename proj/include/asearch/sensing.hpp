#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "asearch/grid_world.hpp"
#include "asearch/rng.hpp"

namespace asearch {

enum class AgentKind : std::uint8_t { UGV, UAV };

const char* to_string(AgentKind k);
AgentKind agent_kind_from_string(const std::string& s);

// One sensing action: each visible cell is one one-hot row of X.
struct SensingAction {
    AgentKind agent_kind = AgentKind::UGV;
    CellIndex target = 0;
    Heading heading = Heading::N;  // meaningful for UGV only
    std::vector<CellIndex> visible_cells;
    std::vector<double> distances_m;

    std::size_t size() const { return visible_cells.size(); }
    bool empty() const { return visible_cells.empty(); }
};

struct Observation {
    std::vector<CellIndex> visible_cells;
    std::vector<double> y;          // readings in [0, 1]
    std::vector<double> noise_var;  // diagonal of the noise covariance

    std::size_t size() const { return visible_cells.size(); }
    friend bool operator==(const Observation&, const Observation&) = default;
};

struct NoiseConfig {
    double sigma2_min = 0.05;
    double kappa = 0.005;  // variance per metre
    double sigma2_cap = 0.5;
    double fp_prob = 0.0;
    double fp_confidence = 0.7;
    double fp_ellipsoid_vol_m3 = 20.0;
    // Simulated tracker output for true detections: vol(d) = base * (1 + d / scale).
    double pos_vol_base_m3 = 10.0;
    double pos_vol_scale_m = 30.0;
    double pos_conf_min = 0.6;
    double pos_conf_max = 0.95;
    double uav_height_m = 80.0;
    // Readings equal the truth exactly; reported variances are unchanged.
    bool noiseless = false;

    // Throws std::invalid_argument on violated invariants.
    void validate() const;
};

SensingAction ugv_fov(const SearchRegion& region, Pose pose);

// Bresenham rasterization of the segment between cell centres; cells outside
// the polygon are dropped.
SensingAction uav_fov(const SearchRegion& region, CellIndex from, CellIndex to,
                      double flight_height_m = 80.0);

// Depth-aware variance for readings of empty cells.
double negative_noise_variance(double distance_m, const NoiseConfig& cfg);

// min(0.5, vol / (confidence * 1000)); no floor applied here.
double positive_noise_variance(double ellipsoid_vol_m3, double confidence);

// Draws a noisy observation of `action` against the ground truth.
Observation synthesize_observation(const GroundTruth& truth, const SensingAction& action,
                                   const NoiseConfig& cfg, Rng& rng);

}  // namespace asearch
