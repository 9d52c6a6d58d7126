#include "asearch/scenario.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace asearch {

using nlohmann::json;

namespace {

// Rejects keys outside `allowed` so typos surface instead of silently
// falling back to defaults.
void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ScenarioError(where + ": expected an object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ScenarioError(where + ": unknown key '" + key + "'");
    }
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ScenarioError(where + "." + key + ": " + e.what());
    }
}

GridCoord read_coord(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
        throw ScenarioError(where + ": expected [row, col]");
    return {v[0].get<int>(), v[1].get<int>()};
}

json coord_json(GridCoord c) { return json::array({c.row, c.col}); }

}  // namespace

std::string Scenario::team_label() const {
    if (team.empty()) return "NONE";
    for (const auto& t : team)
        if (t.policy != team.front().policy) return "MIXED";
    return to_string(team.front().policy);
}

void Scenario::set_algorithm(Algorithm a) {
    for (auto& t : team) t.policy = a;
    if (a != Algorithm::COVERAGE) reward.algorithm = a;
}

SearchRegion Scenario::build_region() const {
    try {
        return SearchRegion::build(polygon, cell_size_m, costmap);
    } catch (const RegionError& e) {
        throw ScenarioError(std::string("region: ") + e.what());
    }
}

void Scenario::validate() const {
    const SearchRegion region = build_region();
    const auto wrap = [](const char* where, auto&& fn) {
        try {
            fn();
        } catch (const std::invalid_argument& e) {
            throw ScenarioError(std::string(where) + ": " + e.what());
        }
    };
    wrap("noise", [&] { noise.validate(); });
    wrap("comms", [&] { comms.validate(); });
    wrap("reward", [&] { reward.validate(); });
    wrap("hyper", [&] { hyper.validate(); });

    if (team.empty()) throw ScenarioError("team: at least one agent is required");
    for (std::size_t i = 0; i < team.size(); ++i) {
        const auto& t = team[i];
        const std::string where = "team[" + std::to_string(i) + "]";
        if (!region.on_grid(t.launch)) throw ScenarioError(where + ": launch cell is off the grid");
        const CellIndex m = region.index(t.launch);
        if (!region.in_region(m)) throw ScenarioError(where + ": launch cell is outside the polygon");
        if (t.kind == AgentKind::UGV && !region.passable(m))
            throw ScenarioError(where + ": UGV launch cell is impassable");
    }
    for (const auto& f : comms.failure_schedule)
        if (static_cast<std::size_t>(f.agent) >= team.size())
            throw ScenarioError("comms.failures: agent " + std::to_string(f.agent) + " does not exist");

    if (ooi_cells.empty()) {
        if (ooi_count < 0) throw ScenarioError("oois.count must be >= 0");
        if (static_cast<std::size_t>(ooi_count) > region.region_cells().size())
            throw ScenarioError("oois.count exceeds the number of in-region cells");
    } else {
        std::set<CellIndex> seen;
        for (const auto& c : ooi_cells) {
            if (!region.on_grid(c) || !region.in_region(region.index(c)))
                throw ScenarioError("oois.cells: cell outside the search region");
            if (!seen.insert(region.index(c)).second) throw ScenarioError("oois.cells: duplicate cell");
        }
    }
    if (budget.max_decisions_per_agent < 1) throw ScenarioError("budget.max_decisions_per_agent must be >= 1");
    if (budget.max_sim_seconds < 0.0) throw ScenarioError("budget.max_sim_seconds must be >= 0");
    if (!(timing.epoch_seconds > 0.0 && timing.ugv_speed_mps > 0.0 && timing.uav_speed_mps > 0.0))
        throw ScenarioError("timing: epoch length and speeds must be > 0");
    if (!(recovery_threshold > 0.0)) throw ScenarioError("recovery.threshold must be > 0");
    if (seeds.empty()) throw ScenarioError("seeds: at least one seed is required");
}

Scenario scenario_from_json(const json& j) {
    Scenario s;
    check_keys(j, "scenario",
               {"version", "name", "region", "oois", "team", "noise", "comms", "reward", "hyper",
                "budget", "timing", "recovery", "seeds", "trace_messages"});
    if (!j.contains("version")) throw ScenarioError("scenario: missing 'version'");
    if (j.at("version") != kScenarioVersion)
        throw ScenarioError("scenario: unsupported version " + j.at("version").dump());
    read(j, "name", s.name, "scenario");
    read(j, "trace_messages", s.trace_messages, "scenario");

    if (!j.contains("region")) throw ScenarioError("scenario: missing 'region'");
    const json& r = j.at("region");
    check_keys(r, "region", {"polygon", "cell_size_m", "costmap", "uniform_cost", "impassable"});
    if (!r.contains("polygon") || !r.at("polygon").is_array())
        throw ScenarioError("region.polygon: expected a list of [x, y] vertices");
    for (const auto& v : r.at("polygon")) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            throw ScenarioError("region.polygon: expected [x, y] pairs");
        s.polygon.push_back({v[0].get<double>(), v[1].get<double>()});
    }
    read(r, "cell_size_m", s.cell_size_m, "region");
    GridCoord shape{0, 0};
    try {
        shape = SearchRegion::grid_shape(s.polygon, s.cell_size_m);
    } catch (const RegionError& e) {
        throw ScenarioError(std::string("region: ") + e.what());
    }
    if (r.contains("costmap")) {
        const json& cm = r.at("costmap");
        if (!cm.is_array() || cm.size() != static_cast<std::size_t>(shape.row))
            throw ScenarioError("region.costmap: expected " + std::to_string(shape.row) + " rows of " +
                                std::to_string(shape.col) + " costs");
        for (const auto& row : cm) {
            if (!row.is_array() || row.size() != static_cast<std::size_t>(shape.col))
                throw ScenarioError("region.costmap: expected " + std::to_string(shape.row) + " rows of " +
                                    std::to_string(shape.col) + " costs");
            for (const auto& c : row) {
                if (!c.is_number()) throw ScenarioError("region.costmap: entries must be numbers");
                s.costmap.push_back(c.get<double>());
            }
        }
    } else if (r.contains("uniform_cost") || r.contains("impassable")) {
        double uniform = 1.0;
        read(r, "uniform_cost", uniform, "region");
        if (!(uniform >= 0.0)) throw ScenarioError("region.uniform_cost must be >= 0");
        s.costmap.assign(static_cast<std::size_t>(shape.row * shape.col), uniform);
        if (r.contains("impassable")) {
            for (const auto& v : r.at("impassable")) {
                const GridCoord c = read_coord(v, "region.impassable");
                if (c.row < 0 || c.row >= shape.row || c.col < 0 || c.col >= shape.col)
                    throw ScenarioError("region.impassable: cell off the grid");
                s.costmap[static_cast<std::size_t>(c.row * shape.col + c.col)] = SearchRegion::kImpassable;
            }
        }
    }

    if (j.contains("oois")) {
        const json& o = j.at("oois");
        check_keys(o, "oois", {"count", "cells"});
        read(o, "count", s.ooi_count, "oois");
        if (o.contains("cells"))
            for (const auto& v : o.at("cells")) s.ooi_cells.push_back(read_coord(v, "oois.cells"));
    }

    if (j.contains("team")) {
        if (!j.at("team").is_array()) throw ScenarioError("team: expected a list");
        for (std::size_t i = 0; i < j.at("team").size(); ++i) {
            const json& t = j.at("team")[i];
            const std::string where = "team[" + std::to_string(i) + "]";
            check_keys(t, where, {"kind", "policy", "launch", "heading"});
            TeamMember m;
            try {
                if (t.contains("kind")) m.kind = agent_kind_from_string(t.at("kind").get<std::string>());
                if (t.contains("policy")) m.policy = algorithm_from_string(t.at("policy").get<std::string>());
                if (t.contains("heading")) m.heading = heading_from_string(t.at("heading").get<std::string>());
            } catch (const std::exception& e) {
                throw ScenarioError(where + ": " + e.what());
            }
            if (!t.contains("launch")) throw ScenarioError(where + ": missing 'launch'");
            m.launch = read_coord(t.at("launch"), where + ".launch");
            s.team.push_back(m);
        }
    }

    if (j.contains("noise")) {
        const json& n = j.at("noise");
        check_keys(n, "noise",
                   {"sigma2_min", "kappa", "sigma2_cap", "fp_prob", "fp_confidence", "fp_ellipsoid_vol_m3",
                    "pos_vol_base_m3", "pos_vol_scale_m", "pos_conf_min", "pos_conf_max", "uav_height_m", "noiseless"});
        read(n, "sigma2_min", s.noise.sigma2_min, "noise");
        read(n, "kappa", s.noise.kappa, "noise");
        read(n, "sigma2_cap", s.noise.sigma2_cap, "noise");
        read(n, "fp_prob", s.noise.fp_prob, "noise");
        read(n, "fp_confidence", s.noise.fp_confidence, "noise");
        read(n, "fp_ellipsoid_vol_m3", s.noise.fp_ellipsoid_vol_m3, "noise");
        read(n, "pos_vol_base_m3", s.noise.pos_vol_base_m3, "noise");
        read(n, "pos_vol_scale_m", s.noise.pos_vol_scale_m, "noise");
        read(n, "pos_conf_min", s.noise.pos_conf_min, "noise");
        read(n, "pos_conf_max", s.noise.pos_conf_max, "noise");
        read(n, "uav_height_m", s.noise.uav_height_m, "noise");
        read(n, "noiseless", s.noise.noiseless, "noise");
    }

    if (j.contains("comms")) {
        const json& c = j.at("comms");
        check_keys(c, "comms", {"p_deliver_obs", "p_deliver_loc", "latency_epochs", "failures", "duplicate_delivery"});
        read(c, "p_deliver_obs", s.comms.p_deliver_obs, "comms");
        read(c, "p_deliver_loc", s.comms.p_deliver_loc, "comms");
        read(c, "latency_epochs", s.comms.latency_epochs, "comms");
        read(c, "duplicate_delivery", s.comms.duplicate_delivery, "comms");
        if (c.contains("failures")) {
            for (const auto& f : c.at("failures")) {
                check_keys(f, "comms.failures[]", {"agent", "epoch"});
                FailureEvent ev;
                read(f, "agent", ev.agent, "comms.failures[]");
                read(f, "epoch", ev.epoch, "comms.failures[]");
                s.comms.failure_schedule.push_back(ev);
            }
        }
    }

    if (j.contains("reward")) {
        const json& rw = j.at("reward");
        check_keys(rw, "reward", {"lambda", "tau_sample", "tau_estimate", "subsample_frac", "algorithm", "mc_samples"});
        read(rw, "lambda", s.reward.lambda, "reward");
        read(rw, "tau_sample", s.reward.tau_sample, "reward");
        read(rw, "tau_estimate", s.reward.tau_estimate, "reward");
        read(rw, "subsample_frac", s.reward.subsample_frac, "reward");
        read(rw, "mc_samples", s.reward.mc_samples, "reward");
        if (rw.contains("algorithm")) {
            try {
                s.reward.algorithm = algorithm_from_string(rw.at("algorithm").get<std::string>());
            } catch (const std::exception& e) {
                throw ScenarioError(std::string("reward.algorithm: ") + e.what());
            }
        }
    }

    if (j.contains("hyper")) {
        const json& h = j.at("hyper");
        check_keys(h, "hyper", {"a", "b", "em_tol", "em_max_iter"});
        read(h, "a", s.hyper.a, "hyper");
        read(h, "b", s.hyper.b, "hyper");
        read(h, "em_tol", s.hyper.em_tol, "hyper");
        read(h, "em_max_iter", s.hyper.em_max_iter, "hyper");
    }

    if (j.contains("budget")) {
        const json& b = j.at("budget");
        check_keys(b, "budget", {"max_decisions_per_agent", "max_sim_seconds"});
        read(b, "max_decisions_per_agent", s.budget.max_decisions_per_agent, "budget");
        read(b, "max_sim_seconds", s.budget.max_sim_seconds, "budget");
    }

    if (j.contains("timing")) {
        const json& t = j.at("timing");
        check_keys(t, "timing", {"epoch_seconds", "ugv_speed_mps", "uav_speed_mps"});
        read(t, "epoch_seconds", s.timing.epoch_seconds, "timing");
        read(t, "ugv_speed_mps", s.timing.ugv_speed_mps, "timing");
        read(t, "uav_speed_mps", s.timing.uav_speed_mps, "timing");
    }

    if (j.contains("recovery")) {
        const json& rc = j.at("recovery");
        check_keys(rc, "recovery", {"threshold", "sensitivity"});
        read(rc, "threshold", s.recovery_threshold, "recovery");
        read(rc, "sensitivity", s.sensitivity_thresholds, "recovery");
    }

    read(j, "seeds", s.seeds, "scenario");
    return s;
}

json scenario_to_json(const Scenario& s) {
    json j;
    j["version"] = kScenarioVersion;
    j["name"] = s.name;
    json poly = json::array();
    for (const auto& p : s.polygon) poly.push_back({p.x, p.y});
    j["region"]["polygon"] = poly;
    j["region"]["cell_size_m"] = s.cell_size_m;
    if (!s.costmap.empty()) {
        const GridCoord shape = SearchRegion::grid_shape(s.polygon, s.cell_size_m);
        json rows = json::array();
        for (int r = 0; r < shape.row; ++r) {
            json row = json::array();
            for (int c = 0; c < shape.col; ++c) row.push_back(s.costmap[static_cast<std::size_t>(r * shape.col + c)]);
            rows.push_back(row);
        }
        j["region"]["costmap"] = rows;
    }
    j["oois"]["count"] = s.ooi_count;
    if (!s.ooi_cells.empty()) {
        json cells = json::array();
        for (const auto& c : s.ooi_cells) cells.push_back(coord_json(c));
        j["oois"]["cells"] = cells;
    }
    j["team"] = json::array();
    for (const auto& t : s.team)
        j["team"].push_back({{"kind", to_string(t.kind)},
                             {"policy", to_string(t.policy)},
                             {"launch", coord_json(t.launch)},
                             {"heading", to_string(t.heading)}});
    const auto& n = s.noise;
    j["noise"] = {{"sigma2_min", n.sigma2_min},       {"kappa", n.kappa},
                  {"sigma2_cap", n.sigma2_cap},       {"fp_prob", n.fp_prob},
                  {"fp_confidence", n.fp_confidence}, {"fp_ellipsoid_vol_m3", n.fp_ellipsoid_vol_m3},
                  {"pos_vol_base_m3", n.pos_vol_base_m3}, {"pos_vol_scale_m", n.pos_vol_scale_m},
                  {"pos_conf_min", n.pos_conf_min},   {"pos_conf_max", n.pos_conf_max},
                  {"uav_height_m", n.uav_height_m},   {"noiseless", n.noiseless}};
    json failures = json::array();
    for (const auto& f : s.comms.failure_schedule) failures.push_back({{"agent", f.agent}, {"epoch", f.epoch}});
    j["comms"] = {{"p_deliver_obs", s.comms.p_deliver_obs},
                  {"p_deliver_loc", s.comms.p_deliver_loc},
                  {"latency_epochs", s.comms.latency_epochs},
                  {"duplicate_delivery", s.comms.duplicate_delivery},
                  {"failures", failures}};
    j["reward"] = {{"lambda", s.reward.lambda},
                   {"tau_sample", s.reward.tau_sample},
                   {"tau_estimate", s.reward.tau_estimate},
                   {"subsample_frac", s.reward.subsample_frac},
                   {"algorithm", to_string(s.reward.algorithm)},
                   {"mc_samples", s.reward.mc_samples}};
    j["hyper"] = {{"a", s.hyper.a}, {"b", s.hyper.b}, {"em_tol", s.hyper.em_tol}, {"em_max_iter", s.hyper.em_max_iter}};
    j["budget"] = {{"max_decisions_per_agent", s.budget.max_decisions_per_agent},
                   {"max_sim_seconds", s.budget.max_sim_seconds}};
    j["timing"] = {{"epoch_seconds", s.timing.epoch_seconds},
                   {"ugv_speed_mps", s.timing.ugv_speed_mps},
                   {"uav_speed_mps", s.timing.uav_speed_mps}};
    j["recovery"] = {{"threshold", s.recovery_threshold}, {"sensitivity", s.sensitivity_thresholds}};
    j["seeds"] = s.seeds;
    j["trace_messages"] = s.trace_messages;
    return j;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot read scenario file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScenarioError("scenario file '" + path + "' is not valid JSON: " + e.what());
    }
    return scenario_from_json(j);
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(text);
    std::string part;
    const auto parse_num = [&text](const std::string& s) {
        if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }))
            throw std::invalid_argument("bad seed list '" + text + "'");
        return std::stoull(s);
    };
    while (std::getline(ss, part, ',')) {
        const auto dash = part.find('-');
        if (dash == std::string::npos) {
            seeds.push_back(parse_num(part));
        } else {
            const auto lo = parse_num(part.substr(0, dash));
            const auto hi = parse_num(part.substr(dash + 1));
            if (hi < lo) throw std::invalid_argument("bad seed range '" + part + "'");
            for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
        }
    }
    if (seeds.empty()) throw std::invalid_argument("empty seed list");
    return seeds;
}

Scenario demo_scenario() {
    Scenario s;
    s.name = "demo";
    s.cell_size_m = 30.0;
    s.polygon = {{0.0, 0.0}, {600.0, 0.0}, {600.0, 600.0}, {0.0, 600.0}};
    s.costmap.assign(400, 1.0);
    const auto block = [&s](int r0, int c0, int h, int w) {
        for (int r = r0; r < r0 + h; ++r)
            for (int c = c0; c < c0 + w; ++c) s.costmap[static_cast<std::size_t>(r * 20 + c)] = SearchRegion::kImpassable;
    };
    block(4, 5, 2, 3);
    block(12, 13, 3, 2);
    block(15, 3, 2, 2);
    // Rough ground.
    for (int r = 8; r < 11; ++r)
        for (int c = 8; c < 16; ++c) s.costmap[static_cast<std::size_t>(r * 20 + c)] = 2.0;
    s.ooi_count = 5;
    s.team = {TeamMember{AgentKind::UGV, Algorithm::GUTS, {19, 0}, Heading::N},
              TeamMember{AgentKind::UGV, Algorithm::GUTS, {19, 19}, Heading::N}};
    s.budget.max_decisions_per_agent = 60;
    s.seeds.clear();
    for (std::uint64_t k = 0; k < 20; ++k) s.seeds.push_back(k);
    return s;
}

}  // namespace asearch
