#include "asearch/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "asearch/planner.hpp"

namespace asearch {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

SearchRegion rect_region(int rows, int cols, double cs) {
    const double w = cols * cs;
    const double h = rows * cs;
    return SearchRegion::build({{0, 0}, {w, 0}, {w, h}, {0, h}}, cs);
}

// Random sensing history: UGV looks from random in-region poses.
std::vector<Observation> random_history(const SearchRegion& region, const GroundTruth& truth,
                                        int count, const NoiseConfig& noise, Rng& rng) {
    std::vector<Observation> data;
    const auto& cells = region.region_cells();
    std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
    std::uniform_int_distribution<int> dir(0, 3);
    while (static_cast<int>(data.size()) < count) {
        const Pose p{cells[pick(rng)], kAllHeadings[dir(rng)]};
        const SensingAction a = ugv_fov(region, p);
        if (a.empty()) continue;
        data.push_back(synthesize_observation(truth, a, noise, rng));
    }
    return data;
}

}  // namespace

EStepResult dense_e_step(int num_cells, std::span<const Observation> data, std::span<const double> gamma) {
    const Eigen::Index m = num_cells;
    Eigen::Index rows = 0;
    for (const auto& o : data) rows += static_cast<Eigen::Index>(o.size());

    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(rows, m);
    Eigen::VectorXd w(rows);
    Eigen::VectorXd y(rows);
    Eigen::Index r = 0;
    for (const auto& o : data) {
        for (std::size_t k = 0; k < o.size(); ++k, ++r) {
            x(r, o.visible_cells[k]) = 1.0;
            w(r) = 1.0 / o.noise_var[k];
            y(r) = o.y[k];
        }
    }
    Eigen::MatrixXd a = x.transpose() * w.asDiagonal() * x;
    for (Eigen::Index i = 0; i < m; ++i) a(i, i) += 1.0 / gamma[static_cast<std::size_t>(i)];
    const Eigen::MatrixXd cov = a.llt().solve(Eigen::MatrixXd::Identity(m, m));
    const Eigen::VectorXd mu = cov * (x.transpose() * w.cwiseProduct(y));

    EStepResult out;
    out.mu.assign(mu.data(), mu.data() + m);
    out.v_diag.resize(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) out.v_diag[static_cast<std::size_t>(i)] = cov(i, i);
    return out;
}

AccelerationBenchResult run_acceleration_bench(const AccelerationBenchConfig& cfg) {
    const SearchRegion region = rect_region(cfg.rows, cfg.cols, cfg.cell_size_m);
    Rng rng = make_stream(cfg.seed, {0xbe7c4});
    const GroundTruth truth = place_oois(region, cfg.ooi_count, rng);
    const NoiseConfig noise;
    const SblHyper hyper;
    const std::vector<Observation> data = random_history(region, truth, cfg.observations, noise, rng);

    SufficientStats stats(region.size());
    for (const auto& o : data) stats.add(o);

    RewardConfig reward;
    reward.algorithm = Algorithm::GUTS;
    const Pose start{region.index({cfg.rows - 1, 0}), Heading::N};

    AccelerationBenchResult res;
    res.num_cells = region.size();
    res.observations = cfg.observations;
    res.measurements = stats.n_measurements;
    res.fast_seconds = std::numeric_limits<double>::infinity();
    Posterior post;
    for (int rep = 0; rep < std::max(1, cfg.fast_reps); ++rep) {
        Rng decide = make_stream(cfg.seed, {0xfa57});
        const auto t0 = Clock::now();
        post = run_em(stats, hyper);
        const std::vector<double> beta = sample_beta(post, decide);
        std::vector<Candidate> cands = enumerate_candidates(region, AgentKind::UGV, start, reward, noise, decide);
        const std::size_t best = select_action(cands, beta, stats, post.gamma, reward, &decide);
        res.fast_seconds = std::min(res.fast_seconds, seconds_since(t0));
        res.candidates = cands.size();
        (void)best;
    }
    res.em_iterations = post.iterations;

    const auto t0 = Clock::now();
    const EStepResult dense = dense_e_step(region.size(), data, post.gamma);
    res.dense_estep_seconds = seconds_since(t0);

    const EStepResult fast = e_step(stats, post.gamma);
    for (std::size_t i = 0; i < fast.mu.size(); ++i) {
        res.estep_max_abs_diff = std::max(res.estep_max_abs_diff, std::abs(fast.mu[i] - dense.mu[i]));
        res.estep_max_abs_diff = std::max(res.estep_max_abs_diff, std::abs(fast.v_diag[i] - dense.v_diag[i]));
    }

    const double naive_esteps = static_cast<double>(res.em_iterations) + static_cast<double>(res.candidates);
    res.naive_extrapolated_seconds = res.dense_estep_seconds * std::max(1.0, naive_esteps);
    res.speedup_lower_bound = res.dense_estep_seconds / res.fast_seconds;
    res.speedup_extrapolated = res.naive_extrapolated_seconds / res.fast_seconds;
    return res;
}

SubsampleBenchResult run_subsample_bench(const SubsampleBenchConfig& cfg) {
    const SearchRegion region = rect_region(cfg.rows, cfg.cols, cfg.cell_size_m);
    Rng rng = make_stream(cfg.seed, {0x5ab5});
    const GroundTruth truth = place_oois(region, 5, rng);
    const NoiseConfig noise;
    const SblHyper hyper;
    SufficientStats stats(region.size());
    for (const auto& o : random_history(region, truth, cfg.observations, noise, rng)) stats.add(o);
    const Posterior post = run_em(stats, hyper);
    Rng sample_rng = make_stream(cfg.seed, {0x5a});
    const std::vector<double> beta = sample_beta(post, sample_rng);
    const Pose start{region.index({cfg.rows / 2, cfg.cols / 2}), Heading::N};

    const auto time_selection = [&](double frac, std::size_t& count) {
        RewardConfig reward;
        reward.subsample_frac = frac;
        double best = std::numeric_limits<double>::infinity();
        for (int rep = 0; rep < std::max(1, cfg.reps); ++rep) {
            Rng decide = make_stream(cfg.seed, {0xdec1});
            const auto t0 = Clock::now();
            std::vector<Candidate> cands = enumerate_candidates(region, AgentKind::UAV, start, reward, noise, decide);
            select_action(cands, beta, stats, post.gamma, reward, &decide);
            best = std::min(best, seconds_since(t0));
            count = cands.size();
        }
        return best;
    };

    SubsampleBenchResult res;
    res.full_seconds = time_selection(1.0, res.full_candidates);
    res.sub_seconds = time_selection(cfg.fraction, res.sub_candidates);
    res.speedup = res.full_seconds / res.sub_seconds;
    return res;
}

nlohmann::ordered_json bench_to_json(const AccelerationBenchResult& a, const SubsampleBenchResult& s) {
    nlohmann::ordered_json j;
    j["acceleration"] = {{"num_cells", a.num_cells},
                         {"observations", a.observations},
                         {"measurements", a.measurements},
                         {"em_iterations", a.em_iterations},
                         {"candidates", a.candidates},
                         {"fast_seconds", a.fast_seconds},
                         {"dense_estep_seconds", a.dense_estep_seconds},
                         {"estep_max_abs_diff", a.estep_max_abs_diff},
                         {"naive_extrapolated_seconds", a.naive_extrapolated_seconds},
                         {"speedup_lower_bound", a.speedup_lower_bound},
                         {"speedup_extrapolated", a.speedup_extrapolated}};
    j["subsample"] = {{"full_candidates", s.full_candidates},
                      {"sub_candidates", s.sub_candidates},
                      {"full_seconds", s.full_seconds},
                      {"sub_seconds", s.sub_seconds},
                      {"speedup", s.speedup}};
    return j;
}

}  // namespace asearch
