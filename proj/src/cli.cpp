#include "asearch/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "asearch/bench.hpp"
#include "asearch/episode.hpp"
#include "asearch/metrics.hpp"
#include "asearch/scenario.hpp"

namespace asearch {

namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonOptions {
    std::string scenario;  // empty means the built-in demo
    std::string seeds;
    std::string out = "out";
    double subsample = -1.0;
    int jobs = 1;
};

Scenario load_or_demo(const std::string& path) { return path.empty() ? demo_scenario() : load_scenario(path); }

Algorithm parse_algorithm(const std::string& s) {
    try {
        return algorithm_from_string(s);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

std::vector<std::uint64_t> seeds_for(const CommonOptions& o, const Scenario& s) {
    if (o.seeds.empty()) return s.seeds;
    try {
        return parse_seed_list(o.seeds);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

void apply_subsample(const CommonOptions& o, Scenario& s) {
    if (o.subsample < 0.0) return;
    s.reward.subsample_frac = o.subsample;
    try {
        s.reward.validate();
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << text;
}

int write_results(const std::vector<EpisodeLog>& logs, const Scenario& s, const fs::path& out, double wall) {
    fs::create_directories(out / "episodes");
    for (const auto& l : logs) {
        const std::string name = l.algorithm + "_seed" + std::to_string(l.seed) + ".json";
        write_text(out / "episodes" / name, episode_to_string(l) + "\n");
    }
    write_text(out / "results.csv", rows_to_csv(rows_from_logs(logs)));
    MetricsReport m = compute_metrics(logs, s);
    m.wall_runtime_s = wall;
    write_text(out / "metrics.json", metrics_to_json(m).dump(2) + "\n");

    for (const auto& a : m.algorithms) {
        char tc[32] = "n/a";
        if (a.t_over_c) std::snprintf(tc, sizeof tc, "%.2f", *a.t_over_c);
        std::printf("%-10s episodes=%d success_rate=%.3f mean_recall=%.3f T/C=%s\n", a.algorithm.c_str(),
                    a.episodes, a.success_rate, a.mean_final_recall, tc);
    }
    std::printf("wrote %zu episode logs, results.csv and metrics.json to %s (%.1f s)\n", logs.size(),
                out.string().c_str(), wall);
    return kExitOk;
}

int do_run(const CommonOptions& o, const std::string& algorithm) {
    Scenario s = load_or_demo(o.scenario);
    if (!algorithm.empty()) s.set_algorithm(parse_algorithm(algorithm));
    apply_subsample(o, s);
    s.validate();
    const auto seeds = seeds_for(o, s);
    const Algorithm algs[] = {s.team.front().policy};
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<EpisodeLog> logs;
    if (s.team_label() == "MIXED") {
        for (auto seed : seeds) logs.push_back(run_episode(s, seed));
    } else {
        logs = run_sweep(s, algs, seeds, o.jobs);
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return write_results(logs, s, o.out, wall);
}

int do_sweep(const CommonOptions& o, const std::vector<std::string>& names) {
    Scenario s = load_or_demo(o.scenario);
    apply_subsample(o, s);
    s.validate();
    std::vector<Algorithm> algs;
    for (const auto& n : names) algs.push_back(parse_algorithm(n));
    const auto seeds = seeds_for(o, s);
    const auto t0 = std::chrono::steady_clock::now();
    const auto logs = run_sweep(s, algs, seeds, o.jobs);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return write_results(logs, s, o.out, wall);
}

int do_validate(const std::string& path) {
    const Scenario s = load_scenario(path);
    s.validate();
    const SearchRegion r = s.build_region();
    std::printf("%s: ok (scenario '%s', %dx%d grid, %zu in-region cells, %zu agents, %d OOIs)\n", path.c_str(),
                s.name.c_str(), r.rows(), r.cols(), r.region_cells().size(), s.team.size(), s.num_oois());
    return kExitOk;
}

int do_bench(const AccelerationBenchConfig& acfg, const SubsampleBenchConfig& scfg, const std::string& out) {
    std::printf("acceleration: %dx%d cells, %d observations\n", acfg.rows, acfg.cols, acfg.observations);
    std::fflush(stdout);
    const auto a = run_acceleration_bench(acfg);
    std::printf("  fast first waypoint   %.4f s (%zu candidates, %d EM iterations)\n", a.fast_seconds,
                a.candidates, a.em_iterations);
    std::printf("  dense E-step          %.3f s (max |diff| vs diagonal %.2e)\n", a.dense_estep_seconds,
                a.estep_max_abs_diff);
    std::printf("  naive extrapolated    %.1f s\n", a.naive_extrapolated_seconds);
    std::printf("  speedup               %.1fx (one dense E-step), %.3gx (extrapolated)\n", a.speedup_lower_bound,
                a.speedup_extrapolated);
    std::fflush(stdout);
    const auto s = run_subsample_bench(scfg);
    std::printf("subsampling: %zu -> %zu candidates\n", s.full_candidates, s.sub_candidates);
    std::printf("  full %.5f s, subsampled %.5f s, speedup %.1fx\n", s.full_seconds, s.sub_seconds, s.speedup);
    if (!out.empty()) {
        const fs::path p(out);
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        write_text(p, bench_to_json(a, s).dump(2) + "\n");
    }
    return kExitOk;
}

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--scenario", o.scenario, "Scenario JSON file (default: built-in demo)")->check(CLI::ExistingFile);
    cmd->add_option("--seeds", o.seeds, "Seed list, e.g. 0-19 or 1,4,7 (default: from scenario)");
    cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
    cmd->add_option("--subsample", o.subsample, "Candidate subsample fraction in (0, 1]");
    cmd->add_option("--jobs", o.jobs, "Episodes to run in parallel")->check(CLI::PositiveNumber)->capture_default_str();
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Multi-agent active search simulator"};
    app.require_subcommand(1);

    CommonOptions run_opts;
    std::string run_algorithm;
    auto* run = app.add_subcommand("run", "Run episodes of one scenario");
    add_common(run, run_opts);
    run->add_option("--algorithm", run_algorithm, "Override every agent's policy: GUTS | NATS | COVERAGE");

    CommonOptions sweep_opts;
    std::vector<std::string> sweep_algs{"GUTS", "NATS", "COVERAGE"};
    auto* sweep = app.add_subcommand("sweep", "Run an algorithm x seed matrix");
    add_common(sweep, sweep_opts);
    sweep->add_option("--algorithms,--algorithm", sweep_algs, "Policies to compare")->delimiter(',')->capture_default_str();

    AccelerationBenchConfig acfg;
    SubsampleBenchConfig scfg;
    std::string bench_out;
    auto* bench = app.add_subcommand("bench", "Time the diagonal E-step pipeline against a dense one");
    bench->add_option("--rows", acfg.rows, "Grid rows")->capture_default_str();
    bench->add_option("--cols", acfg.cols, "Grid columns")->capture_default_str();
    bench->add_option("--observations", acfg.observations, "Accumulated sensing actions")->capture_default_str();
    bench->add_option("--subsample", scfg.fraction, "Fraction for the subsampling benchmark")->capture_default_str();
    bench->add_option("--seed", acfg.seed, "Seed")->capture_default_str();
    bench->add_option("--out", bench_out, "Write results as JSON to this file");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Check a scenario file");
    validate->add_option("--scenario", validate_path, "Scenario JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*run) return do_run(run_opts, run_algorithm);
        if (*sweep) return do_sweep(sweep_opts, sweep_algs);
        if (*bench) {
            scfg.seed = acfg.seed;
            return do_bench(acfg, scfg, bench_out);
        }
        if (*validate) return do_validate(validate_path);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const ScenarioError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace asearch
