#include "asearch/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace asearch {

const char* to_string(Algorithm a) {
    switch (a) {
        case Algorithm::GUTS: return "GUTS";
        case Algorithm::NATS: return "NATS";
        case Algorithm::COVERAGE: return "COVERAGE";
    }
    return "?";
}

Algorithm algorithm_from_string(const std::string& s) {
    if (s == "GUTS") return Algorithm::GUTS;
    if (s == "NATS") return Algorithm::NATS;
    if (s == "COVERAGE") return Algorithm::COVERAGE;
    throw std::invalid_argument("unknown algorithm '" + s + "'");
}

void RewardConfig::validate() const {
    if (!(lambda >= 0.0)) throw std::invalid_argument("reward: lambda must be >= 0");
    if (!(tau_sample > 0.0 && tau_estimate > 0.0))
        throw std::invalid_argument("reward: thresholds must be > 0");
    if (!(subsample_frac > 0.0 && subsample_frac <= 1.0))
        throw std::invalid_argument("reward: subsample_frac must lie in (0, 1]");
    if (mc_samples < 0) throw std::invalid_argument("reward: mc_samples must be >= 0");
}

std::size_t subsample_count(std::size_t total, double frac) {
    if (total == 0) return 0;
    const auto k = static_cast<std::size_t>(std::ceil(frac * static_cast<double>(total) - 1e-9));
    return std::clamp<std::size_t>(k, 1, total);
}

namespace {

Candidate make_candidate(SensingAction action, Pose pose, double cost, double length,
                         const NoiseConfig& noise) {
    Candidate c;
    c.plan_var.reserve(action.size());
    for (double d : action.distances_m) c.plan_var.push_back(negative_noise_variance(d, noise));
    c.action = std::move(action);
    c.pose = pose;
    c.travel_cost = cost;
    c.travel_length_m = length;
    return c;
}

struct ActionKey {
    CellIndex cell;
    Heading heading;
};

// Valid (cell, heading) pairs in ascending order, without building FOVs.
std::vector<ActionKey> enumerate_keys(const SearchRegion& region, AgentKind kind, Pose pose,
                                      const CostField* field) {
    std::vector<ActionKey> keys;
    if (kind == AgentKind::UGV) {
        for (CellIndex m : region.region_cells()) {
            if (!field->reachable(m)) continue;
            const GridCoord c = region.coord(m);
            for (Heading h : kAllHeadings) {
                bool any = false;
                for (int k = 1; k <= 2 && !any; ++k) {
                    const GridCoord v = step(c, h, k);
                    if (!region.on_grid(v)) break;
                    any = region.in_region(region.index(v));
                }
                if (any) keys.push_back({m, h});
            }
        }
    } else {
        if (!region.valid_index(pose.cell) || !region.in_region(pose.cell)) return keys;
        for (CellIndex m : region.region_cells()) keys.push_back({m, pose.heading});
    }
    return keys;
}

Candidate build_candidate(const SearchRegion& region, AgentKind kind, Pose pose, ActionKey key,
                          const CostField* field, const NoiseConfig& noise) {
    if (kind == AgentKind::UGV) {
        const Pose target{key.cell, key.heading};
        return make_candidate(ugv_fov(region, target), target, field->cost(key.cell),
                              field->steps(key.cell) * region.cell_size(), noise);
    }
    const double d = region.center_distance(pose.cell, key.cell);
    return make_candidate(uav_fov(region, pose.cell, key.cell, noise.uav_height_m),
                          Pose{key.cell, pose.heading}, d, d, noise);
}

std::vector<Candidate> enumerate_impl(const SearchRegion& region, AgentKind kind, Pose pose,
                                      double frac, const NoiseConfig& noise, Rng* rng) {
    std::optional<CostField> field;
    if (kind == AgentKind::UGV) field = CostField::compute(region, pose.cell);
    std::vector<ActionKey> keys = enumerate_keys(region, kind, pose, field ? &*field : nullptr);

    const std::size_t keep = subsample_count(keys.size(), frac);
    if (keep < keys.size()) {
        std::vector<std::size_t> idx(keys.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        for (std::size_t i = 0; i < keep; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
            std::swap(idx[i], idx[pick(*rng)]);
        }
        idx.resize(keep);
        std::sort(idx.begin(), idx.end());
        std::vector<ActionKey> kept;
        kept.reserve(keep);
        for (std::size_t i : idx) kept.push_back(keys[i]);
        keys = std::move(kept);
    }

    std::vector<Candidate> out;
    out.reserve(keys.size());
    for (const ActionKey& k : keys)
        out.push_back(build_candidate(region, kind, pose, k, field ? &*field : nullptr, noise));
    return out;
}

}  // namespace

std::vector<Candidate> enumerate_all_candidates(const SearchRegion& region, AgentKind kind,
                                                Pose pose, const NoiseConfig& noise) {
    return enumerate_impl(region, kind, pose, 1.0, noise, nullptr);
}

std::vector<Candidate> enumerate_candidates(const SearchRegion& region, AgentKind kind, Pose pose,
                                            const RewardConfig& cfg, const NoiseConfig& noise,
                                            Rng& rng) {
    return enumerate_impl(region, kind, pose, cfg.subsample_frac, noise, &rng);
}

namespace {

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

std::vector<double> noiseless_reading(const Candidate& c, std::span<const double> beta_tilde) {
    std::vector<double> y;
    y.reserve(c.action.size());
    for (CellIndex m : c.action.visible_cells) y.push_back(clip01(beta_tilde[static_cast<std::size_t>(m)]));
    return y;
}

// Top ceil(k/2) indices of v by (value desc, index asc), k = #{v > tau}.
std::vector<CellIndex> top_half(std::span<const double> v, double tau) {
    const auto k = std::count_if(v.begin(), v.end(), [tau](double x) { return x > tau; });
    if (k == 0) return {};
    const auto h = static_cast<std::size_t>((k + 1) / 2);
    std::vector<CellIndex> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(h), idx.end(),
                      [&](CellIndex a, CellIndex b) {
                          const double va = v[static_cast<std::size_t>(a)];
                          const double vb = v[static_cast<std::size_t>(b)];
                          return va > vb || (va == vb && a < b);
                      });
    idx.resize(h);
    return idx;
}

// Same set as top_half, unordered; linear time.
std::vector<CellIndex> top_half_set(std::span<const double> v, double tau) {
    std::vector<CellIndex> idx;
    for (std::size_t m = 0; m < v.size(); ++m)
        if (v[m] > tau) idx.push_back(static_cast<CellIndex>(m));
    if (idx.empty()) return idx;
    const std::size_t h = (idx.size() + 1) / 2;
    std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(h - 1), idx.end(),
                     [&](CellIndex a, CellIndex b) {
                         const double va = v[static_cast<std::size_t>(a)];
                         const double vb = v[static_cast<std::size_t>(b)];
                         return va > vb || (va == vb && a < b);
                     });
    idx.resize(h);
    return idx;
}

}  // namespace

std::vector<double> expected_next_estimate(const SufficientStats& stats,
                                           std::span<const double> gamma,
                                           const Candidate& candidate,
                                           std::span<const double> beta_tilde) {
    Observation hypo;
    hypo.visible_cells = candidate.action.visible_cells;
    hypo.y = noiseless_reading(candidate, beta_tilde);
    hypo.noise_var = candidate.plan_var;
    return e_step(ingest(stats, hypo), gamma).mu;
}

double nats_reward(std::span<const double> beta_tilde, const SufficientStats& stats,
                   std::span<const double> gamma, const Candidate& candidate) {
    const std::vector<double> next = expected_next_estimate(stats, gamma, candidate, beta_tilde);
    double err = 0.0;
    for (std::size_t m = 0; m < next.size(); ++m) {
        const double d = beta_tilde[m] - next[m];
        err += d * d;
    }
    return -err;
}

int guts_indicator(std::span<const double> beta_tilde, std::span<const double> mu_next,
                   const RewardConfig& cfg) {
    const auto a = top_half(beta_tilde, cfg.tau_sample);
    const auto b = top_half(mu_next, cfg.tau_estimate);
    if (a.empty() || b.empty()) return 1;
    for (CellIndex m : a)
        if (std::find(b.begin(), b.end(), m) != b.end()) return 0;
    return 1;
}

double guts_reward(std::span<const double> beta_tilde, const SufficientStats& stats,
                   std::span<const double> gamma, const Candidate& candidate,
                   const RewardConfig& cfg) {
    const std::vector<double> next = expected_next_estimate(stats, gamma, candidate, beta_tilde);
    double err = 0.0;
    for (std::size_t m = 0; m < next.size(); ++m) {
        const double d = beta_tilde[m] - next[m];
        err += d * d;
    }
    return -err - cfg.lambda * guts_indicator(beta_tilde, next, cfg);
}

RewardEvaluator::RewardEvaluator(const SufficientStats& stats, std::span<const double> gamma,
                                 std::span<const double> beta_tilde, const RewardConfig& cfg)
    : stats_(stats), gamma_(gamma), beta_(beta_tilde), cfg_(cfg) {
    mu_ = e_step(stats, gamma).mu;
    for (std::size_t m = 0; m < mu_.size(); ++m) {
        const double d = beta_[m] - mu_[m];
        base_err_ += d * d;
    }

    // The top half of any re-estimate lies above tau_estimate, and untouched
    // cells keep their value, so only cells above it need ordering.
    for (std::size_t m = 0; m < mu_.size(); ++m)
        if (mu_[m] > cfg_.tau_estimate) mu_order_.push_back(static_cast<CellIndex>(m));
    std::sort(mu_order_.begin(), mu_order_.end(), [this](CellIndex a, CellIndex b) {
        const double va = mu_[static_cast<std::size_t>(a)];
        const double vb = mu_[static_cast<std::size_t>(b)];
        return va > vb || (va == vb && a < b);
    });
    mu_above_ = static_cast<int>(mu_order_.size());
    sample_top_.assign(mu_.size(), 0);
    for (CellIndex m : top_half_set(beta_, cfg_.tau_sample)) {
        sample_top_[static_cast<std::size_t>(m)] = 1;
        sample_top_empty_ = false;
    }
}

void RewardEvaluator::next_values(const Candidate& c, std::span<const double> y,
                                  std::vector<Touched>& out) const {
    out.clear();
    const auto& cells = c.action.visible_cells;
    for (std::size_t q = 0; q < cells.size(); ++q) {
        const auto m = static_cast<std::size_t>(cells[q]);
        const double precision = 1.0 / c.plan_var[q];
        const double p = stats_.precision_diag[m] + precision;
        const double w = stats_.weighted_obs[m] + y[q] * precision;
        const double v = 1.0 / (1.0 / gamma_[m] + p);
        out.push_back({cells[q], v * w});
    }
}

double RewardEvaluator::delta_err(const std::vector<Touched>& t) const {
    double delta = 0.0;
    for (const auto& [cell, next] : t) {
        const auto m = static_cast<std::size_t>(cell);
        const double dn = beta_[m] - next;
        const double db = beta_[m] - mu_[m];
        delta += dn * dn - db * db;
    }
    return delta;
}

int RewardEvaluator::indicator_for(std::vector<Touched>& t) const {
    if (sample_top_empty_) return 1;
    int above = mu_above_;
    for (const auto& [cell, next] : t) {
        if (mu_[static_cast<std::size_t>(cell)] > cfg_.tau_estimate) --above;
        if (next > cfg_.tau_estimate) ++above;
    }
    if (above == 0) return 1;
    const int h = (above + 1) / 2;

    std::sort(t.begin(), t.end(), [](const Touched& a, const Touched& b) {
        return a.next > b.next || (a.next == b.next && a.cell < b.cell);
    });
    const auto touched = [&t](CellIndex m) {
        return std::any_of(t.begin(), t.end(), [m](const Touched& x) { return x.cell == m; });
    };
    // Merge the untouched base order with the re-estimated cells.
    std::size_t bi = 0, ti = 0;
    for (int taken = 0; taken < h; ++taken) {
        while (bi < mu_order_.size() && touched(mu_order_[bi])) ++bi;
        bool take_touched;
        if (ti >= t.size()) {
            take_touched = false;
        } else if (bi >= mu_order_.size()) {
            take_touched = true;
        } else {
            const CellIndex bm = mu_order_[bi];
            const double bv = mu_[static_cast<std::size_t>(bm)];
            take_touched = t[ti].next > bv || (t[ti].next == bv && t[ti].cell < bm);
        }
        CellIndex m;
        if (take_touched) {
            m = t[ti++].cell;
        } else {
            if (bi >= mu_order_.size()) break;
            m = mu_order_[bi++];
        }
        if (sample_top_[static_cast<std::size_t>(m)]) return 0;
    }
    return 1;
}

double RewardEvaluator::nats(const Candidate& c) const {
    std::vector<Touched> t;
    const std::vector<double> y = noiseless_reading(c, beta_);
    next_values(c, y, t);
    return -(base_err_ + delta_err(t));
}

int RewardEvaluator::indicator(const Candidate& c) const {
    std::vector<Touched> t;
    const std::vector<double> y = noiseless_reading(c, beta_);
    next_values(c, y, t);
    return indicator_for(t);
}

double RewardEvaluator::reward(const Candidate& c, Rng* rng) const {
    const bool guts = cfg_.algorithm == Algorithm::GUTS;
    std::vector<Touched> t;
    if (cfg_.mc_samples == 0 || rng == nullptr) {
        const std::vector<double> y = noiseless_reading(c, beta_);
        next_values(c, y, t);
        double r = -(base_err_ + delta_err(t));
        if (guts) r -= cfg_.lambda * indicator_for(t);
        return r;
    }
    std::normal_distribution<double> std_normal(0.0, 1.0);
    std::vector<double> y(c.action.size());
    double total = 0.0;
    for (int k = 0; k < cfg_.mc_samples; ++k) {
        for (std::size_t q = 0; q < y.size(); ++q) {
            const double b = beta_[static_cast<std::size_t>(c.action.visible_cells[q])];
            const double n = std::sqrt(c.plan_var[q]) * std::abs(std_normal(*rng));
            y[q] = clip01(b >= 0.5 ? b - n : b + n);
        }
        next_values(c, y, t);
        double r = -(base_err_ + delta_err(t));
        if (guts) r -= cfg_.lambda * indicator_for(t);
        total += r;
    }
    return total / cfg_.mc_samples;
}

bool tie_break_less(const Candidate& a, const Candidate& b) {
    if (a.travel_cost != b.travel_cost) return a.travel_cost < b.travel_cost;
    if (a.pose.cell != b.pose.cell) return a.pose.cell < b.pose.cell;
    return static_cast<int>(a.pose.heading) < static_cast<int>(b.pose.heading);
}

std::size_t best_scored(std::span<const Candidate> candidates) {
    if (candidates.empty()) throw std::invalid_argument("no candidates to select from");
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const auto& c = candidates[i];
        const auto& b = candidates[best];
        if (c.reward > b.reward || (c.reward == b.reward && tie_break_less(c, b))) best = i;
    }
    return best;
}

std::size_t select_action(std::vector<Candidate>& candidates, std::span<const double> beta_tilde,
                          const SufficientStats& stats, std::span<const double> gamma,
                          const RewardConfig& cfg, Rng* rng) {
    if (candidates.empty()) throw std::invalid_argument("no candidates to select from");
    const RewardEvaluator eval(stats, gamma, beta_tilde, cfg);
    for (auto& c : candidates) c.reward = eval.reward(c, rng);
    return best_scored(candidates);
}

}  // namespace asearch
