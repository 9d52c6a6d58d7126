#include "asearch/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace asearch {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool same_double(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

bool same_vec(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!same_double(a[i], b[i])) return false;
    return true;
}

bool same_opt(const std::optional<double>& a, const std::optional<double>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || same_double(*a, *b);
}

std::string fmt_double(double x) {
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_double(const std::string& s, std::size_t line) {
    if (s == "nan") return kNaN;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw std::runtime_error("csv line " + std::to_string(line) + ": bad number '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double recall_of(int recovered, int num_oois) {
    return num_oois == 0 ? kNaN : static_cast<double>(recovered) / num_oois;
}

}  // namespace

bool operator==(const EpisodeMetrics& a, const EpisodeMetrics& b) {
    return a.algorithm == b.algorithm && a.seed == b.seed && a.decisions == b.decisions &&
           a.found == b.found && same_double(a.final_recall, b.final_recall) && a.success == b.success &&
           same_vec(a.curve, b.curve) && same_opt(a.t_over_c, b.t_over_c);
}

bool operator==(const AlgorithmSummary& a, const AlgorithmSummary& b) {
    return a.algorithm == b.algorithm && a.episodes == b.episodes &&
           same_double(a.success_rate, b.success_rate) &&
           same_double(a.mean_final_recall, b.mean_final_recall) && same_vec(a.mean_curve, b.mean_curve) &&
           a.total_decisions == b.total_decisions && a.total_found == b.total_found &&
           same_opt(a.t_over_c, b.t_over_c);
}

const AlgorithmSummary* MetricsReport::find(const std::string& algorithm) const {
    for (const auto& a : algorithms)
        if (a.algorithm == algorithm) return &a;
    return nullptr;
}

std::vector<ResultRow> rows_from_log(const EpisodeLog& log) {
    std::vector<ResultRow> rows;
    const int n = log.num_oois();
    const double j = std::max(1, log.team_size);
    rows.push_back({log.algorithm, log.seed, 0.0, recall_of(0, n), 0.0});
    for (std::size_t i = 0; i < log.records.size(); ++i) {
        const auto& r = log.records[i];
        rows.push_back({log.algorithm, log.seed, static_cast<double>(i + 1) / j,
                        recall_of(r.recovered_total, n), r.sim_time_s});
    }
    return rows;
}

std::vector<ResultRow> rows_from_logs(const std::vector<EpisodeLog>& logs) {
    std::vector<ResultRow> rows;
    for (const auto& l : logs) {
        auto r = rows_from_log(l);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    return rows;
}

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
    os << kCsvHeader << '\n';
    for (const auto& r : rows) {
        if (r.algorithm.find_first_of(",\n\"") != std::string::npos)
            throw std::invalid_argument("algorithm label cannot contain commas, quotes or newlines");
        os << r.algorithm << ',' << r.seed << ',' << fmt_double(r.decisions_per_agent) << ','
           << fmt_double(r.recall) << ',' << fmt_double(r.simulated_time) << '\n';
    }
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream os;
    write_csv(os, rows);
    return os.str();
}

std::vector<ResultRow> read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("csv is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) throw std::runtime_error("csv header mismatch: '" + line + "'");
    std::vector<ResultRow> rows;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != 5)
            throw std::runtime_error("csv line " + std::to_string(lineno) + ": expected 5 fields");
        ResultRow r;
        r.algorithm = f[0];
        char* end = nullptr;
        r.seed = std::strtoull(f[1].c_str(), &end, 10);
        if (f[1].empty() || end != f[1].c_str() + f[1].size())
            throw std::runtime_error("csv line " + std::to_string(lineno) + ": bad seed '" + f[1] + "'");
        r.decisions_per_agent = parse_double(f[2], lineno);
        r.recall = parse_double(f[3], lineno);
        r.simulated_time = parse_double(f[4], lineno);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::optional<double> t_over_c(int decisions, int found) {
    if (found <= 0) return std::nullopt;
    return static_cast<double>(decisions) / found;
}

MetricsReport metrics_from_rows(const std::vector<ResultRow>& rows, int team_size, int num_oois,
                                int budget) {
    MetricsReport rep;
    rep.team_size = team_size;
    rep.num_oois = num_oois;
    rep.budget = budget;

    // Group contiguous rows into episodes keyed by (algorithm, seed).
    std::size_t i = 0;
    while (i < rows.size()) {
        std::size_t e = i;
        while (e < rows.size() && rows[e].algorithm == rows[i].algorithm && rows[e].seed == rows[i].seed) ++e;

        EpisodeMetrics em;
        em.algorithm = rows[i].algorithm;
        em.seed = rows[i].seed;
        em.decisions = static_cast<int>(e - i) - 1;
        const double last = rows[e - 1].recall;
        em.final_recall = last;
        em.found = num_oois == 0 ? 0 : static_cast<int>(std::lround(last * num_oois));
        em.success = em.found == num_oois;
        em.t_over_c = t_over_c(em.decisions, em.found);
        em.curve.resize(static_cast<std::size_t>(budget) + 1);
        std::size_t k = i;
        for (int x = 0; x <= budget; ++x) {
            while (k + 1 < e && rows[k + 1].decisions_per_agent <= x + 1e-9) ++k;
            em.curve[static_cast<std::size_t>(x)] = rows[k].recall;
        }
        rep.episodes.push_back(std::move(em));
        i = e;
    }

    std::map<std::string, std::size_t> slot;
    for (const auto& em : rep.episodes) {
        auto [it, inserted] = slot.emplace(em.algorithm, rep.algorithms.size());
        if (inserted) {
            AlgorithmSummary s;
            s.algorithm = em.algorithm;
            s.mean_curve.assign(static_cast<std::size_t>(budget) + 1, 0.0);
            rep.algorithms.push_back(std::move(s));
        }
        AlgorithmSummary& s = rep.algorithms[it->second];
        ++s.episodes;
        s.success_rate += em.success ? 1.0 : 0.0;
        s.mean_final_recall += em.final_recall;
        for (std::size_t x = 0; x < s.mean_curve.size(); ++x) s.mean_curve[x] += em.curve[x];
        s.total_decisions += em.decisions;
        s.total_found += em.found;
    }
    for (auto& s : rep.algorithms) {
        const double n = s.episodes;
        s.success_rate /= n;
        s.mean_final_recall /= n;
        for (double& c : s.mean_curve) c /= n;
        s.t_over_c = t_over_c(s.total_decisions, s.total_found);
    }
    return rep;
}

MetricsReport compute_metrics(const std::vector<EpisodeLog>& logs, const Scenario& scenario) {
    MetricsReport rep = metrics_from_rows(rows_from_logs(logs), static_cast<int>(scenario.team.size()),
                                          scenario.num_oois(), scenario.budget.max_decisions_per_agent);
    if (logs.empty()) return rep;

    std::vector<std::string> order;
    std::map<std::pair<std::string, std::size_t>, SensitivityRow> acc;
    std::map<std::string, int> counts;
    for (const auto& l : logs) {
        if (!counts.count(l.algorithm)) order.push_back(l.algorithm);
        ++counts[l.algorithm];
        for (std::size_t t = 0; t < l.thresholds.size(); ++t) {
            auto& row = acc[{l.algorithm, t}];
            row.algorithm = l.algorithm;
            row.threshold = l.thresholds[t];
            const int found = static_cast<int>(l.recovered[t].size());
            row.success_rate += found == l.num_oois() ? 1.0 : 0.0;
            row.mean_final_recall += recall_of(found, l.num_oois());
        }
    }
    // Index 0 is the primary threshold, already covered above.
    for (const auto& alg : order) {
        const double n = counts[alg];
        for (std::size_t t = 1; t < logs.front().thresholds.size(); ++t) {
            auto it = acc.find({alg, t});
            if (it == acc.end()) continue;
            SensitivityRow r = it->second;
            r.success_rate /= n;
            r.mean_final_recall /= n;
            rep.sensitivity.push_back(r);
        }
    }
    return rep;
}

bool same_table_metrics(const MetricsReport& a, const MetricsReport& b) {
    return a.team_size == b.team_size && a.num_oois == b.num_oois && a.budget == b.budget &&
           a.episodes == b.episodes && a.algorithms == b.algorithms;
}

nlohmann::ordered_json metrics_to_json(const MetricsReport& m) {
    using oj = nlohmann::ordered_json;
    const auto num = [](double x) { return std::isnan(x) ? oj(nullptr) : oj(x); };
    const auto opt = [](const std::optional<double>& x) { return x ? oj(*x) : oj(nullptr); };
    const auto vec = [&num](const std::vector<double>& v) {
        oj a = oj::array();
        for (double x : v) a.push_back(num(x));
        return a;
    };
    oj j;
    j["team_size"] = m.team_size;
    j["num_oois"] = m.num_oois;
    j["budget"] = m.budget;
    j["wall_runtime_s"] = m.wall_runtime_s;
    oj algs = oj::array();
    for (const auto& a : m.algorithms) {
        algs.push_back({{"algorithm", a.algorithm},
                        {"episodes", a.episodes},
                        {"success_rate", a.success_rate},
                        {"mean_final_recall", num(a.mean_final_recall)},
                        {"total_decisions", a.total_decisions},
                        {"total_found", a.total_found},
                        {"t_over_c", opt(a.t_over_c)},
                        {"mean_curve", vec(a.mean_curve)}});
    }
    j["algorithms"] = std::move(algs);
    oj sens = oj::array();
    for (const auto& s : m.sensitivity)
        sens.push_back({{"algorithm", s.algorithm},
                        {"threshold", s.threshold},
                        {"success_rate", s.success_rate},
                        {"mean_final_recall", num(s.mean_final_recall)}});
    j["sensitivity"] = std::move(sens);
    oj eps = oj::array();
    for (const auto& e : m.episodes)
        eps.push_back({{"algorithm", e.algorithm},
                       {"seed", e.seed},
                       {"decisions", e.decisions},
                       {"found", e.found},
                       {"final_recall", num(e.final_recall)},
                       {"success", e.success},
                       {"t_over_c", opt(e.t_over_c)},
                       {"curve", vec(e.curve)}});
    j["episodes"] = std::move(eps);
    return j;
}

}  // namespace asearch
