#include "asearch/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace asearch {

const char* to_string(AgentKind k) { return k == AgentKind::UGV ? "UGV" : "UAV"; }

AgentKind agent_kind_from_string(const std::string& s) {
    if (s == "UGV") return AgentKind::UGV;
    if (s == "UAV") return AgentKind::UAV;
    throw std::invalid_argument("unknown agent kind '" + s + "'");
}

void NoiseConfig::validate() const {
    if (!(sigma2_min > 0.0 && sigma2_min <= sigma2_cap && sigma2_cap <= 0.5))
        throw std::invalid_argument("noise: require 0 < sigma2_min <= sigma2_cap <= 0.5");
    if (!(kappa >= 0.0)) throw std::invalid_argument("noise: kappa must be >= 0");
    if (!(fp_prob >= 0.0 && fp_prob < 1.0))
        throw std::invalid_argument("noise: fp_prob must lie in [0, 1)");
    if (!(fp_confidence > 0.0 && fp_confidence <= 1.0))
        throw std::invalid_argument("noise: fp_confidence must lie in (0, 1]");
    if (!(fp_ellipsoid_vol_m3 >= 0.0 && pos_vol_base_m3 >= 0.0 && pos_vol_scale_m > 0.0))
        throw std::invalid_argument("noise: ellipsoid volumes must be >= 0");
    if (!(pos_conf_min > 0.0 && pos_conf_min <= pos_conf_max && pos_conf_max <= 1.0))
        throw std::invalid_argument("noise: require 0 < pos_conf_min <= pos_conf_max <= 1");
    if (!(uav_height_m > 0.0)) throw std::invalid_argument("noise: uav_height_m must be > 0");
}

SensingAction ugv_fov(const SearchRegion& region, Pose pose) {
    SensingAction a;
    a.agent_kind = AgentKind::UGV;
    a.target = pose.cell;
    a.heading = pose.heading;
    const GridCoord origin = region.coord(pose.cell);
    for (int k = 1; k <= 2; ++k) {
        const GridCoord c = step(origin, pose.heading, k);
        if (!region.on_grid(c)) break;
        const CellIndex m = region.index(c);
        if (!region.in_region(m)) continue;
        a.visible_cells.push_back(m);
        a.distances_m.push_back(k * region.cell_size());
    }
    return a;
}

SensingAction uav_fov(const SearchRegion& region, CellIndex from, CellIndex to,
                      double flight_height_m) {
    SensingAction a;
    a.agent_kind = AgentKind::UAV;
    a.target = to;
    const GridCoord p0 = region.coord(from);
    const GridCoord p1 = region.coord(to);
    int r = p0.row, c = p0.col;
    const int dr = std::abs(p1.row - p0.row), dc = std::abs(p1.col - p0.col);
    const int sr = p0.row < p1.row ? 1 : -1, sc = p0.col < p1.col ? 1 : -1;
    int err = dc - dr;
    while (true) {
        const CellIndex m = region.index({r, c});
        if (region.in_region(m)) {
            a.visible_cells.push_back(m);
            a.distances_m.push_back(flight_height_m);
        }
        if (r == p1.row && c == p1.col) break;
        const int e2 = 2 * err;
        if (e2 > -dr) {
            err -= dr;
            c += sc;
        }
        if (e2 < dc) {
            err += dc;
            r += sr;
        }
    }
    return a;
}

double negative_noise_variance(double distance_m, const NoiseConfig& cfg) {
    if (distance_m < 0.0) throw std::invalid_argument("distance must be >= 0");
    return std::min(cfg.sigma2_cap, cfg.sigma2_min + cfg.kappa * distance_m);
}

double positive_noise_variance(double ellipsoid_vol_m3, double confidence) {
    if (!(confidence > 0.0 && confidence <= 1.0))
        throw std::invalid_argument("detection confidence must lie in (0, 1]");
    if (ellipsoid_vol_m3 < 0.0) throw std::invalid_argument("ellipsoid volume must be >= 0");
    return std::min(0.5, ellipsoid_vol_m3 / (confidence * 1000.0));
}

Observation synthesize_observation(const GroundTruth& truth, const SensingAction& action,
                                   const NoiseConfig& cfg, Rng& rng) {
    Observation obs;
    const std::size_t q = action.size();
    obs.visible_cells = action.visible_cells;
    obs.y.resize(q);
    obs.noise_var.resize(q);

    std::normal_distribution<double> std_normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto clip01 = [](double v) { return std::clamp(v, 0.0, 1.0); };

    for (std::size_t i = 0; i < q; ++i) {
        const CellIndex m = action.visible_cells[i];
        const double d = action.distances_m[i];
        // Fixed draw order per cell so streams stay aligned across configs.
        double z = std::abs(std_normal(rng));
        const double u_conf = unit(rng);
        double u_fp = unit(rng);
        const double z_fp = std::abs(std_normal(rng));
        if (cfg.noiseless) {
            z = 0.0;
            u_fp = 1.0;
        }

        if (truth.is_ooi(m)) {
            const double vol = cfg.pos_vol_base_m3 * (1.0 + d / cfg.pos_vol_scale_m);
            const double conf = cfg.pos_conf_min + (cfg.pos_conf_max - cfg.pos_conf_min) * u_conf;
            const double var = std::max(cfg.sigma2_min, positive_noise_variance(vol, conf));
            obs.noise_var[i] = var;
            obs.y[i] = clip01(1.0 - std::sqrt(var) * z);
        } else if (u_fp < cfg.fp_prob) {
            const double var = std::max(
                cfg.sigma2_min, positive_noise_variance(cfg.fp_ellipsoid_vol_m3, cfg.fp_confidence));
            obs.noise_var[i] = var;
            obs.y[i] = clip01(1.0 - std::sqrt(var) * z_fp);
        } else {
            const double var = negative_noise_variance(d, cfg);
            obs.noise_var[i] = var;
            obs.y[i] = clip01(std::sqrt(var) * z);
        }
    }
    return obs;
}

}  // namespace asearch
