#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "asearch/grid_world.hpp"
#include "asearch/posterior.hpp"
#include "asearch/sensing.hpp"

namespace asearch {

enum class Algorithm : std::uint8_t { GUTS, NATS, COVERAGE };

const char* to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

struct RewardConfig {
    double lambda = 0.01;
    double tau_sample = 0.1;
    double tau_estimate = 0.1;
    double subsample_frac = 1.0;
    Algorithm algorithm = Algorithm::GUTS;
    // 0 evaluates the expectation at the noiseless reading clip(X beta~);
    // K > 0 averages over K simulated readings instead.
    int mc_samples = 0;

    void validate() const;
};

struct Candidate {
    SensingAction action;
    Pose pose;  // pose after executing the action
    double travel_cost = 0.0;
    double travel_length_m = 0.0;
    std::vector<double> plan_var;  // per visible cell, depth-aware variance
    double reward = 0.0;
};

// All reachable actions for an agent at `pose`, then a uniform subsample of
// ceil(frac * N) of them (at least one). Order is ascending by (cell, heading).
// An empty result means the agent has nowhere to go.
std::vector<Candidate> enumerate_candidates(const SearchRegion& region, AgentKind kind, Pose pose,
                                            const RewardConfig& cfg, const NoiseConfig& noise,
                                            Rng& rng);

// Full enumeration, no subsampling.
std::vector<Candidate> enumerate_all_candidates(const SearchRegion& region, AgentKind kind,
                                                Pose pose, const NoiseConfig& noise);

std::size_t subsample_count(std::size_t total, double frac);

// Reference (O(M)) reward building blocks.
std::vector<double> expected_next_estimate(const SufficientStats& stats,
                                           std::span<const double> gamma,
                                           const Candidate& candidate,
                                           std::span<const double> beta_tilde);

double nats_reward(std::span<const double> beta_tilde, const SufficientStats& stats,
                   std::span<const double> gamma, const Candidate& candidate);

// 0 when the top ceil(k~/2) cells of beta~ share an index with the top
// ceil(k^/2) cells of mu_next; 1 otherwise, including when either count is 0.
int guts_indicator(std::span<const double> beta_tilde, std::span<const double> mu_next,
                   const RewardConfig& cfg);

double guts_reward(std::span<const double> beta_tilde, const SufficientStats& stats,
                   std::span<const double> gamma, const Candidate& candidate,
                   const RewardConfig& cfg);

// Per-decision evaluator: precomputes the current estimate and the sample's
// top set once, then scores each candidate touching only its visible cells.
class RewardEvaluator {
   public:
    RewardEvaluator(const SufficientStats& stats, std::span<const double> gamma,
                    std::span<const double> beta_tilde, const RewardConfig& cfg);

    double nats(const Candidate& c) const;
    int indicator(const Candidate& c) const;
    // Reward for cfg.algorithm. Uses `rng` only when cfg.mc_samples > 0.
    double reward(const Candidate& c, Rng* rng = nullptr) const;

    const std::vector<double>& current_mu() const { return mu_; }

   private:
    struct Touched {
        CellIndex cell;
        double next;
    };
    void next_values(const Candidate& c, std::span<const double> y, std::vector<Touched>& out) const;
    double delta_err(const std::vector<Touched>& t) const;
    int indicator_for(std::vector<Touched>& t) const;

    const SufficientStats& stats_;
    std::span<const double> gamma_;
    std::span<const double> beta_;
    RewardConfig cfg_;
    std::vector<double> mu_;
    double base_err_ = 0.0;
    std::vector<CellIndex> mu_order_;  // cells above tau_estimate by (mu desc, index asc)
    int mu_above_ = 0;
    std::vector<std::uint8_t> sample_top_;
    bool sample_top_empty_ = true;
};

// true when a should be preferred over b at equal reward.
bool tie_break_less(const Candidate& a, const Candidate& b);

// Scores every candidate (writing Candidate::reward) and returns the index of
// the best one. Requires a nonempty list.
std::size_t select_action(std::vector<Candidate>& candidates, std::span<const double> beta_tilde,
                          const SufficientStats& stats, std::span<const double> gamma,
                          const RewardConfig& cfg, Rng* rng = nullptr);

// Argmax over already-scored candidates with the same tie-break.
std::size_t best_scored(std::span<const Candidate> candidates);

}  // namespace asearch
