// Python bindings. Structured data crosses the boundary as JSON text; the
// pure-Python wrapper in asearch/__init__.py decodes it.

#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "asearch/episode.hpp"
#include "asearch/metrics.hpp"
#include "asearch/posterior.hpp"
#include "asearch/scenario.hpp"

namespace py = pybind11;
using namespace asearch;

namespace {

Scenario parse_scenario(const std::string& text) {
    Scenario s = scenario_from_json(nlohmann::json::parse(text));
    s.validate();
    return s;
}

SufficientStats make_stats(const std::vector<double>& precision_diag, const std::vector<double>& weighted_obs) {
    if (precision_diag.size() != weighted_obs.size())
        throw std::invalid_argument("precision_diag and weighted_obs differ in length");
    SufficientStats s(static_cast<int>(precision_diag.size()));
    s.precision_diag = precision_diag;
    s.weighted_obs = weighted_obs;
    return s;
}

std::vector<Algorithm> parse_algorithms(const std::vector<std::string>& names) {
    std::vector<Algorithm> out;
    for (const auto& n : names) out.push_back(algorithm_from_string(n));
    return out;
}

}  // namespace

PYBIND11_MODULE(_asearch, m) {
    m.doc() = "Multi-agent active search core";
    py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const nlohmann::json::exception& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    m.def("demo_scenario", [] { return scenario_to_json(demo_scenario()).dump(); },
          "Built-in demo scenario as JSON text.");
    m.def("validate_scenario", [](const std::string& text) { parse_scenario(text); },
          "Raise ScenarioError if the scenario JSON text is invalid.", py::arg("scenario"));

    m.def(
        "run_episode",
        [](const std::string& scenario, std::uint64_t seed) {
            const Scenario s = parse_scenario(scenario);
            py::gil_scoped_release release;
            return episode_to_string(run_episode(s, seed));
        },
        "Run one episode; returns the episode log as JSON text.", py::arg("scenario"), py::arg("seed"));

    m.def(
        "sweep",
        [](const std::string& scenario, const std::vector<std::string>& algorithms,
           const std::vector<std::uint64_t>& seeds, int jobs) {
            const Scenario s = parse_scenario(scenario);
            const auto algs = parse_algorithms(algorithms);
            std::string csv, metrics;
            {
                py::gil_scoped_release release;
                const auto logs = run_sweep(s, algs, seeds, jobs);
                csv = rows_to_csv(rows_from_logs(logs));
                metrics = metrics_to_json(compute_metrics(logs, s)).dump();
            }
            return std::make_tuple(csv, metrics);
        },
        "Run an algorithm x seed matrix; returns (results CSV text, metrics JSON text).", py::arg("scenario"),
        py::arg("algorithms"), py::arg("seeds"), py::arg("jobs") = 1);

    m.def(
        "metrics_from_csv",
        [](const std::string& csv, int team_size, int num_oois, int budget) {
            std::istringstream is(csv);
            return metrics_to_json(metrics_from_rows(read_csv(is), team_size, num_oois, budget)).dump();
        },
        "Summary metrics recomputed from results CSV text.", py::arg("csv"), py::arg("team_size"),
        py::arg("num_oois"), py::arg("budget"));

    m.def(
        "e_step",
        [](const std::vector<double>& precision_diag, const std::vector<double>& weighted_obs,
           const std::vector<double>& gamma) {
            if (gamma.size() != precision_diag.size()) throw std::invalid_argument("gamma has the wrong length");
            const EStepResult r = e_step(make_stats(precision_diag, weighted_obs), gamma);
            return std::make_tuple(r.mu, r.v_diag);
        },
        "Diagonal posterior (mu, v) from sufficient statistics and prior variances.", py::arg("precision_diag"),
        py::arg("weighted_obs"), py::arg("gamma"));

    m.def(
        "run_em",
        [](const std::vector<double>& precision_diag, const std::vector<double>& weighted_obs, double a, double b) {
            SblHyper h;
            h.a = a;
            h.b = b;
            h.validate();
            const Posterior p = run_em(make_stats(precision_diag, weighted_obs), h);
            py::dict d;
            d["mu"] = p.mu;
            d["v"] = p.v_diag;
            d["gamma"] = p.gamma;
            d["iterations"] = p.iterations;
            d["converged"] = p.converged;
            return d;
        },
        "EM over the per-cell prior variances.", py::arg("precision_diag"), py::arg("weighted_obs"),
        py::arg("a") = 0.1, py::arg("b") = 1.0);
}
