#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "asearch/planner.hpp"
#include "oracles.hpp"

using namespace asearch;

namespace {

struct Instance {
    SearchRegion region = oracle::square(6);
    SufficientStats stats{36};
    std::vector<double> gamma;
    std::vector<double> beta;
};

Instance random_instance(std::uint64_t seed, int n = 6) {
    Instance in;
    in.region = oracle::square(n);
    in.stats = SufficientStats(n * n);
    Rng rng(seed);
    const GroundTruth truth = place_oois(in.region, 2, rng);
    for (int k = 0; k < 3 * n; ++k) {
        const CellIndex m = static_cast<CellIndex>(rng() % static_cast<std::uint64_t>(n * n));
        const auto a = ugv_fov(in.region, Pose{m, kAllHeadings[k % 4]});
        if (!a.empty()) in.stats.add(synthesize_observation(truth, a, NoiseConfig{}, rng));
    }
    const Posterior p = run_em(in.stats, SblHyper{});
    in.gamma = p.gamma;
    in.beta = sample_beta(p, rng);
    return in;
}

}  // namespace

TEST_CASE("algorithm names round trip") {
    for (Algorithm a : {Algorithm::GUTS, Algorithm::NATS, Algorithm::COVERAGE})
        CHECK(algorithm_from_string(to_string(a)) == a);
    CHECK_THROWS(algorithm_from_string("RANDOM"));
}

TEST_CASE("indicator definition") {
    RewardConfig cfg;
    // top sets {3, 7} and {7, 12}
    std::vector<double> b(16, 0.0), mu(16, 0.0);
    b[3] = 0.9, b[7] = 0.8, b[1] = 0.5, b[2] = 0.4;
    mu[7] = 0.9, mu[12] = 0.8, mu[5] = 0.3, mu[6] = 0.2;
    CHECK(guts_indicator(b, mu, cfg) == 0);
    mu[7] = 0.05;
    CHECK(guts_indicator(b, mu, cfg) == 1);
    CHECK(guts_indicator(b, std::vector<double>(16, 0.0), cfg) == 1);
    CHECK(guts_indicator(std::vector<double>(16, 0.0), mu, cfg) == 1);
    // Ties go to the lower index: k = 1, top set {2} not {9}.
    std::vector<double> t1(16, 0.0), t2(16, 0.0);
    t1[2] = t1[9] = 0.5;  // k = 2 -> h = 1 -> {2}
    t2[9] = 0.5;
    CHECK(guts_indicator(t1, t2, cfg) == 1);
    t2[2] = 0.5;
    CHECK(guts_indicator(t1, t2, cfg) == 0);
}

TEST_CASE("reward identities") {
    const Instance in = random_instance(4);
    RewardConfig cfg;
    const auto cands = enumerate_all_candidates(in.region, AgentKind::UGV, Pose{0, Heading::S}, NoiseConfig{});
    REQUIRE(!cands.empty());
    for (const auto& c : cands) {
        const double n = nats_reward(in.beta, in.stats, in.gamma, c);
        const double g = guts_reward(in.beta, in.stats, in.gamma, c, cfg);
        const auto next = expected_next_estimate(in.stats, in.gamma, c, in.beta);
        const int ind = guts_indicator(in.beta, next, cfg);
        CHECK(n <= 0.0);
        CHECK(g <= n);
        CHECK(g == doctest::Approx(n - cfg.lambda * ind));
        if (ind == 0) CHECK(g == n);
    }
}

TEST_CASE("fast evaluator agrees with the reference rewards") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const Instance in = random_instance(seed, 5 + static_cast<int>(seed % 4));
        for (Algorithm alg : {Algorithm::GUTS, Algorithm::NATS}) {
            RewardConfig cfg;
            cfg.algorithm = alg;
            // Looser thresholds exercise the indicator on both outcomes.
            cfg.tau_estimate = seed % 2 ? 0.1 : 0.4;
            const RewardEvaluator ev(in.stats, in.gamma, in.beta, cfg);
            for (AgentKind kind : {AgentKind::UGV, AgentKind::UAV}) {
                for (const auto& c : enumerate_all_candidates(in.region, kind, Pose{3, Heading::S}, NoiseConfig{})) {
                    const double ref = alg == Algorithm::GUTS ? guts_reward(in.beta, in.stats, in.gamma, c, cfg)
                                                              : nats_reward(in.beta, in.stats, in.gamma, c);
                    CHECK(ev.reward(c) == doctest::Approx(ref).epsilon(1e-12));
                    const auto next = expected_next_estimate(in.stats, in.gamma, c, in.beta);
                    CHECK(ev.indicator(c) == guts_indicator(in.beta, next, cfg));
                }
            }
        }
    }
}

TEST_CASE("select_action equals brute-force argmax") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const Instance in = random_instance(100 + seed, 5);
        RewardConfig cfg;
        cfg.algorithm = seed % 2 ? Algorithm::GUTS : Algorithm::NATS;
        auto cands = enumerate_all_candidates(in.region, AgentKind::UGV, Pose{12, Heading::N}, NoiseConfig{});
        const std::size_t want = oracle::brute_force_argmax(cands, in.beta, in.stats, in.gamma, cfg);
        CHECK(select_action(cands, in.beta, in.stats, in.gamma, cfg) == want);
    }
}

TEST_CASE("argmax is invariant to a constant shift") {
    const Instance in = random_instance(9);
    auto cands = enumerate_all_candidates(in.region, AgentKind::UGV, Pose{0, Heading::E}, NoiseConfig{});
    const std::size_t best = select_action(cands, in.beta, in.stats, in.gamma, RewardConfig{});
    for (auto& c : cands) c.reward += 123.25;
    CHECK(best_scored(cands) == best);
}

TEST_CASE("ties prefer low travel cost, then low cell index, then heading") {
    std::vector<Candidate> c(3);
    c[0].travel_cost = 60, c[0].pose = {1, Heading::N};
    c[1].travel_cost = 30, c[1].pose = {5, Heading::S};
    c[2].travel_cost = 30, c[2].pose = {5, Heading::E};
    CHECK(best_scored(c) == 2);
    const std::vector<Candidate> one{c[0]};
    CHECK(best_scored(one) == 0);
    CHECK_THROWS(best_scored(std::vector<Candidate>{}));
}

TEST_CASE("single sampled OOI draws the agent to look at it") {
    const SearchRegion r = oracle::square(5);
    const SufficientStats stats(25);
    const std::vector<double> gamma(25, SblHyper{}.prior_gamma());
    for (CellIndex target = 0; target < 25; ++target) {
        std::vector<double> beta(25, 0.0);
        beta[static_cast<std::size_t>(target)] = 1.0;
        auto cands = enumerate_all_candidates(r, AgentKind::UGV, Pose{12, Heading::N}, NoiseConfig{});
        const std::size_t best = select_action(cands, beta, stats, gamma, RewardConfig{});
        const auto& seen = cands[best].action.visible_cells;
        CHECK(std::find(seen.begin(), seen.end(), target) != seen.end());
    }
}

TEST_CASE("candidate enumeration") {
    std::vector<double> cm(25, 1.0);
    cm[7] = SearchRegion::kImpassable;
    const SearchRegion r = SearchRegion::build({{0, 0}, {150, 0}, {150, 150}, {0, 150}}, 30.0, cm);
    const auto ugv = enumerate_all_candidates(r, AgentKind::UGV, Pose{0, Heading::N}, NoiseConfig{});
    // 24 standable cells; each has exactly the headings with a nonempty view.
    std::set<CellIndex> cells;
    for (const auto& c : ugv) {
        CHECK(r.standable(c.pose.cell));
        CHECK(!c.action.empty());
        CHECK(c.plan_var.size() == c.action.size());
        cells.insert(c.pose.cell);
    }
    CHECK(cells.size() == 24);
    CHECK(std::is_sorted(ugv.begin(), ugv.end(), [](const Candidate& a, const Candidate& b) {
        return a.pose.cell < b.pose.cell ||
               (a.pose.cell == b.pose.cell && static_cast<int>(a.pose.heading) < static_cast<int>(b.pose.heading));
    }));
    const auto uav = enumerate_all_candidates(r, AgentKind::UAV, Pose{0, Heading::N}, NoiseConfig{});
    CHECK(uav.size() == 25);
    for (const auto& c : uav) CHECK(c.action.visible_cells.front() == 0);
}

TEST_CASE("trapped ground agent has no candidates") {
    std::vector<double> cm(9, SearchRegion::kImpassable);
    const SearchRegion r = SearchRegion::build({{0, 0}, {90, 0}, {90, 90}, {0, 90}}, 30.0, cm);
    CHECK(enumerate_all_candidates(r, AgentKind::UGV, Pose{4, Heading::N}, NoiseConfig{}).empty());
}

TEST_CASE("subsampling is deterministic and draws a subset") {
    const SearchRegion r = oracle::square(10);
    RewardConfig cfg;
    cfg.subsample_frac = 0.1;
    const auto full = enumerate_all_candidates(r, AgentKind::UGV, Pose{0, Heading::N}, NoiseConfig{});
    Rng a(5), b(5), c(6);
    const auto s1 = enumerate_candidates(r, AgentKind::UGV, Pose{0, Heading::N}, cfg, NoiseConfig{}, a);
    const auto s2 = enumerate_candidates(r, AgentKind::UGV, Pose{0, Heading::N}, cfg, NoiseConfig{}, b);
    const auto s3 = enumerate_candidates(r, AgentKind::UGV, Pose{0, Heading::N}, cfg, NoiseConfig{}, c);
    CHECK(s1.size() == subsample_count(full.size(), 0.1));
    REQUIRE(s1.size() == s2.size());
    bool same3 = s1.size() == s3.size();
    for (std::size_t i = 0; i < s1.size(); ++i) {
        CHECK(s1[i].pose == s2[i].pose);
        if (same3 && !(s1[i].pose == s3[i].pose)) same3 = false;
        CHECK(std::any_of(full.begin(), full.end(), [&](const Candidate& f) { return f.pose == s1[i].pose; }));
    }
    CHECK_FALSE(same3);
    CHECK(subsample_count(0, 0.5) == 0);
    CHECK(subsample_count(10, 0.01) == 1);
    CHECK(subsample_count(10, 0.25) == 3);
    CHECK(subsample_count(20, 0.05) == 1);
    CHECK(subsample_count(2000, 0.05) == 100);
}

TEST_CASE("Monte Carlo reward averages around the point estimate") {
    const Instance in = random_instance(17);
    RewardConfig point;
    RewardConfig mc = point;
    mc.mc_samples = 400;
    const RewardEvaluator e0(in.stats, in.gamma, in.beta, point);
    const RewardEvaluator e1(in.stats, in.gamma, in.beta, mc);
    Rng rng(1);
    const auto cands = enumerate_all_candidates(in.region, AgentKind::UGV, Pose{0, Heading::N}, NoiseConfig{});
    for (std::size_t i = 0; i < cands.size(); i += 7) {
        const double a = e0.reward(cands[i]);
        const double b = e1.reward(cands[i], &rng);
        CHECK(std::abs(a - b) < 0.5);
        CHECK(e1.reward(cands[i], nullptr) == a);
    }
}

TEST_CASE("reward config validation") {
    RewardConfig c;
    CHECK_NOTHROW(c.validate());
    c.subsample_frac = 0.0;
    CHECK_THROWS(c.validate());
    c = RewardConfig{};
    c.tau_sample = 0.0;
    CHECK_THROWS(c.validate());
    c = RewardConfig{};
    c.mc_samples = -1;
    CHECK_THROWS(c.validate());
}
