#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "asearch/posterior.hpp"
#include "asearch/sensing.hpp"

namespace asearch {

// Textbook E-step: stack X and the noise diagonal, form
// A = Gamma^-1 + X^T S^-1 X densely, invert it, and read off mu and diag(A^-1).
EStepResult dense_e_step(int num_cells, std::span<const Observation> data, std::span<const double> gamma);

struct AccelerationBenchConfig {
    int rows = 100;
    int cols = 100;
    int observations = 500;  // sensing actions accumulated before the first waypoint
    double cell_size_m = 30.0;
    int ooi_count = 20;
    int fast_reps = 3;
    std::uint64_t seed = 0;
};

struct AccelerationBenchResult {
    int num_cells = 0;
    int observations = 0;
    long long measurements = 0;
    int em_iterations = 0;
    std::size_t candidates = 0;
    double fast_seconds = 0.0;         // run_em + sample + enumerate + select, best of reps
    double dense_estep_seconds = 0.0;  // one measured dense E-step
    double estep_max_abs_diff = 0.0;   // dense vs diagonal on the same data
    // The naive planner needs one dense E-step per EM iteration plus one per
    // candidate; this multiplies the measured single E-step accordingly.
    double naive_extrapolated_seconds = 0.0;
    // Conservative: a single dense E-step against the whole fast selection.
    double speedup_lower_bound = 0.0;
    double speedup_extrapolated = 0.0;
};

AccelerationBenchResult run_acceleration_bench(const AccelerationBenchConfig& cfg);

struct SubsampleBenchConfig {
    int rows = 40;
    int cols = 50;
    double cell_size_m = 30.0;
    double fraction = 0.05;
    int observations = 200;
    int reps = 20;
    std::uint64_t seed = 0;
};

struct SubsampleBenchResult {
    std::size_t full_candidates = 0;
    std::size_t sub_candidates = 0;
    double full_seconds = 0.0;  // enumerate + select, best of reps
    double sub_seconds = 0.0;
    double speedup = 0.0;
};

SubsampleBenchResult run_subsample_bench(const SubsampleBenchConfig& cfg);

nlohmann::ordered_json bench_to_json(const AccelerationBenchResult& a, const SubsampleBenchResult& s);

}  // namespace asearch
