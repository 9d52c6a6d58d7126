#include "asearch/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace asearch {

void SblHyper::validate() const {
    if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("hyper: a and b must be > 0");
    if (!(em_tol > 0.0)) throw std::invalid_argument("hyper: em_tol must be > 0");
    if (em_max_iter < 1) throw std::invalid_argument("hyper: em_max_iter must be >= 1");
}

void SufficientStats::add(const Observation& obs) {
    if (obs.y.size() != obs.size() || obs.noise_var.size() != obs.size())
        throw std::invalid_argument("observation arrays have mismatched lengths");
    for (std::size_t q = 0; q < obs.size(); ++q) {
        const double var = obs.noise_var[q];
        if (!(var > 0.0)) throw std::invalid_argument("observation noise variance must be > 0");
        const CellIndex m = obs.visible_cells[q];
        if (m < 0 || m >= size()) throw std::invalid_argument("observed cell out of range");
    }
    for (std::size_t q = 0; q < obs.size(); ++q) {
        const auto m = static_cast<std::size_t>(obs.visible_cells[q]);
        const double precision = 1.0 / obs.noise_var[q];
        precision_diag[m] += precision;
        weighted_obs[m] += obs.y[q] * precision;
    }
    n_measurements += static_cast<long long>(obs.size());
}

SufficientStats ingest(SufficientStats stats, const Observation& obs) {
    stats.add(obs);
    return stats;
}

EStepResult e_step(const SufficientStats& stats, std::span<const double> gamma) {
    const std::size_t n = stats.precision_diag.size();
    if (gamma.size() != n) throw std::invalid_argument("gamma length mismatch");
    EStepResult r;
    r.mu.resize(n);
    r.v_diag.resize(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double v = 1.0 / (1.0 / gamma[m] + stats.precision_diag[m]);
        r.v_diag[m] = v;
        r.mu[m] = v * stats.weighted_obs[m];
    }
    return r;
}

std::vector<double> m_step(std::span<const double> mu, std::span<const double> v_diag,
                           const SblHyper& hyper) {
    if (mu.size() != v_diag.size()) throw std::invalid_argument("mu/v length mismatch");
    std::vector<double> gamma(mu.size());
    const double denom = 1.0 + 2.0 * hyper.a;
    for (std::size_t m = 0; m < mu.size(); ++m)
        gamma[m] = (v_diag[m] + mu[m] * mu[m] + 2.0 * hyper.b) / denom;
    return gamma;
}

Posterior run_em(const SufficientStats& stats, const SblHyper& hyper,
                 std::span<const double> warm_gamma) {
    const auto n = static_cast<std::size_t>(stats.size());
    Posterior post;
    if (!warm_gamma.empty()) {
        if (warm_gamma.size() != n) throw std::invalid_argument("warm gamma length mismatch");
        post.gamma.assign(warm_gamma.begin(), warm_gamma.end());
    } else {
        post.gamma.assign(n, hyper.prior_gamma());
    }

    EStepResult es = e_step(stats, post.gamma);
    for (int it = 1; it <= hyper.em_max_iter; ++it) {
        std::vector<double> next = m_step(es.mu, es.v_diag, hyper);
        double max_rel = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
            // Cells without measurements keep their prior variance.
            if (stats.precision_diag[m] == 0.0) next[m] = post.gamma[m];
            max_rel = std::max(max_rel, std::abs(next[m] - post.gamma[m]) / post.gamma[m]);
        }
        post.gamma = std::move(next);
        es = e_step(stats, post.gamma);
        post.iterations = it;
        if (max_rel < hyper.em_tol) {
            post.converged = true;
            break;
        }
    }
    post.mu = std::move(es.mu);
    post.v_diag = std::move(es.v_diag);
    return post;
}

std::vector<double> sample_beta(const Posterior& post, Rng& rng) {
    std::normal_distribution<double> std_normal(0.0, 1.0);
    std::vector<double> beta(post.mu.size());
    for (std::size_t m = 0; m < beta.size(); ++m)
        beta[m] = post.mu[m] + std::sqrt(post.v_diag[m]) * std_normal(rng);
    return beta;
}

std::string posterior_to_json(const Posterior& post) {
    nlohmann::json j;
    j["iterations"] = post.iterations;
    j["converged"] = post.converged;
    j["mu"] = post.mu;
    j["v"] = post.v_diag;
    j["gamma"] = post.gamma;
    return j.dump();
}

}  // namespace asearch
