#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "asearch/episode.hpp"
#include "asearch/scenario.hpp"

namespace asearch {

// One line of the flat results CSV. Every episode contributes a starting row
// at zero decisions, then one row per decision.
struct ResultRow {
    std::string algorithm;
    std::uint64_t seed = 0;
    double decisions_per_agent = 0.0;
    double recall = 0.0;  // NaN when the episode has no OOIs
    double simulated_time = 0.0;
};

inline constexpr const char* kCsvHeader = "algorithm,seed,decisions_per_agent,recall,simulated_time";

std::vector<ResultRow> rows_from_log(const EpisodeLog& log);
std::vector<ResultRow> rows_from_logs(const std::vector<EpisodeLog>& logs);

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows);
std::string rows_to_csv(const std::vector<ResultRow>& rows);
// Throws std::runtime_error on a malformed header or row.
std::vector<ResultRow> read_csv(std::istream& is);

struct EpisodeMetrics {
    std::string algorithm;
    std::uint64_t seed = 0;
    int decisions = 0;  // T
    int found = 0;      // C
    double final_recall = 0.0;
    bool success = false;
    std::vector<double> curve;  // recall after x decisions per agent, x = 0..budget
    std::optional<double> t_over_c;

    friend bool operator==(const EpisodeMetrics&, const EpisodeMetrics&);
};

struct AlgorithmSummary {
    std::string algorithm;
    int episodes = 0;
    double success_rate = 0.0;
    double mean_final_recall = 0.0;
    std::vector<double> mean_curve;
    int total_decisions = 0;
    int total_found = 0;
    std::optional<double> t_over_c;

    friend bool operator==(const AlgorithmSummary&, const AlgorithmSummary&);
};

struct SensitivityRow {
    std::string algorithm;
    double threshold = 0.0;
    double success_rate = 0.0;
    double mean_final_recall = 0.0;
};

struct MetricsReport {
    int team_size = 0;
    int num_oois = 0;
    int budget = 0;
    std::vector<EpisodeMetrics> episodes;
    std::vector<AlgorithmSummary> algorithms;  // in first-seen order
    // Filled only from full logs; not part of the CSV round trip.
    std::vector<SensitivityRow> sensitivity;
    double wall_runtime_s = 0.0;

    const AlgorithmSummary* find(const std::string& algorithm) const;
};

// Decisions per OOI found; nullopt when nothing was found.
std::optional<double> t_over_c(int decisions, int found);

// Everything that can be derived from the flat CSV alone.
MetricsReport metrics_from_rows(const std::vector<ResultRow>& rows, int team_size, int num_oois,
                                int budget);

// metrics_from_rows over the logs' rows, plus the threshold sensitivity table.
MetricsReport compute_metrics(const std::vector<EpisodeLog>& logs, const Scenario& scenario);

// Compares the CSV-derived parts (NaN equals NaN).
bool same_table_metrics(const MetricsReport& a, const MetricsReport& b);

nlohmann::ordered_json metrics_to_json(const MetricsReport& m);

}  // namespace asearch
