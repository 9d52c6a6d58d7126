#pragma once

#include <span>
#include <string>
#include <vector>

#include "asearch/rng.hpp"
#include "asearch/sensing.hpp"

namespace asearch {

// Inverse-gamma hyperprior on each per-cell prior variance, plus EM controls.
struct SblHyper {
    double a = 0.1;
    double b = 1.0;
    double em_tol = 1e-4;
    int em_max_iter = 50;

    void validate() const;
    // Zero-data fixed point of the M-step, 2b / (1 + 2a).
    double prior_gamma() const { return 2.0 * b / (1.0 + 2.0 * a); }
};

// Additive aggregates of a dataset of one-hot sensing rows. The noise enters
// as a precision 1/sigma^2, so precision_diag = diag(X^T S^-1 X) and
// weighted_obs = X^T S^-1 y.
struct SufficientStats {
    std::vector<double> precision_diag;
    std::vector<double> weighted_obs;
    long long n_measurements = 0;

    SufficientStats() = default;
    explicit SufficientStats(int num_cells)
        : precision_diag(static_cast<std::size_t>(num_cells), 0.0),
          weighted_obs(static_cast<std::size_t>(num_cells), 0.0) {}

    int size() const { return static_cast<int>(precision_diag.size()); }

    // In-place accumulation; throws std::invalid_argument on a non-positive
    // variance or an out-of-range cell.
    void add(const Observation& obs);

    friend bool operator==(const SufficientStats&, const SufficientStats&) = default;
};

SufficientStats ingest(SufficientStats stats, const Observation& obs);

struct EStepResult {
    std::vector<double> mu;
    std::vector<double> v_diag;
};

// Diagonal posterior: v = 1 / (1/gamma + p), mu = v * w. Exact because every
// row of X is one-hot and the noise covariance is diagonal.
EStepResult e_step(const SufficientStats& stats, std::span<const double> gamma);

// gamma_m = (v_m + mu_m^2 + 2b) / (1 + 2a)
std::vector<double> m_step(std::span<const double> mu, std::span<const double> v_diag,
                           const SblHyper& hyper);

struct Posterior {
    std::vector<double> mu;
    std::vector<double> v_diag;
    std::vector<double> gamma;
    int iterations = 0;
    bool converged = false;

    int size() const { return static_cast<int>(mu.size()); }
};

// EM from gamma = prior_gamma(), or from `warm_gamma` when given. The returned
// (mu, v_diag) always correspond to the returned gamma.
Posterior run_em(const SufficientStats& stats, const SblHyper& hyper,
                 std::span<const double> warm_gamma = {});

std::vector<double> sample_beta(const Posterior& post, Rng& rng);

// Per-cell (mu, v, gamma) as JSON text.
std::string posterior_to_json(const Posterior& post);

}  // namespace asearch
