#pragma once

// Independent reference implementations used only by tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "asearch/grid_world.hpp"
#include "asearch/planner.hpp"
#include "asearch/posterior.hpp"
#include "asearch/sensing.hpp"

namespace oracle {

using namespace asearch;

struct Stack {
    Eigen::MatrixXd x;  // one-hot rows
    Eigen::VectorXd y;
    Eigen::VectorXd var;
};

inline Stack stack_rows(int m, const std::vector<Observation>& data) {
    Eigen::Index n = 0;
    for (const auto& o : data) n += static_cast<Eigen::Index>(o.size());
    Stack s{Eigen::MatrixXd::Zero(n, m), Eigen::VectorXd(n), Eigen::VectorXd(n)};
    Eigen::Index r = 0;
    for (const auto& o : data)
        for (std::size_t k = 0; k < o.size(); ++k, ++r) {
            s.x(r, o.visible_cells[k]) = 1.0;
            s.y(r) = o.y[k];
            s.var(r) = o.noise_var[k];
        }
    return s;
}

// mu = (Gamma^-1 + X^T S^-1 X)^-1 X^T S^-1 y, v = diag of the same inverse,
// via a general LU inverse.
inline EStepResult dense_posterior(int m, const std::vector<Observation>& data, const std::vector<double>& gamma) {
    const Stack s = stack_rows(m, data);
    const Eigen::VectorXd w = s.var.cwiseInverse();
    Eigen::MatrixXd a = s.x.transpose() * w.asDiagonal() * s.x;
    for (int i = 0; i < m; ++i) a(i, i) += 1.0 / gamma[static_cast<std::size_t>(i)];
    const Eigen::MatrixXd cov = a.inverse();
    const Eigen::VectorXd mu = cov * s.x.transpose() * w.cwiseProduct(s.y);
    EStepResult r;
    for (int i = 0; i < m; ++i) {
        r.mu.push_back(mu(i));
        r.v_diag.push_back(cov(i, i));
    }
    return r;
}

// diag(X^T S^-1 X) and X^T S^-1 y from the stacked matrices.
inline std::pair<std::vector<double>, std::vector<double>> dense_stats(int m, const std::vector<Observation>& data) {
    const Stack s = stack_rows(m, data);
    const Eigen::VectorXd w = s.var.cwiseInverse();
    const Eigen::MatrixXd p = s.x.transpose() * w.asDiagonal() * s.x;
    const Eigen::VectorXd b = s.x.transpose() * w.cwiseProduct(s.y);
    std::vector<double> pd, wo;
    for (int i = 0; i < m; ++i) {
        pd.push_back(p(i, i));
        wo.push_back(b(i));
    }
    return {pd, wo};
}

// Random one-hot dataset over m cells.
inline std::vector<Observation> random_data(int m, int actions, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> cell(0, m - 1);
    std::uniform_int_distribution<int> size(1, 4);
    std::uniform_real_distribution<double> y01(0.0, 1.0);
    std::uniform_real_distribution<double> var(0.01, 0.5);
    std::vector<Observation> out;
    for (int a = 0; a < actions; ++a) {
        Observation o;
        const int q = size(rng);
        for (int k = 0; k < q; ++k) {
            o.visible_cells.push_back(cell(rng));
            o.y.push_back(y01(rng));
            o.noise_var.push_back(var(rng));
        }
        out.push_back(std::move(o));
    }
    return out;
}

// Bellman-Ford style relaxation to a fixed point; no priority queue.
inline std::vector<double> relax_costs(const SearchRegion& r, CellIndex from) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> d(static_cast<std::size_t>(r.size()), inf);
    if (!r.standable(from)) return d;
    d[static_cast<std::size_t>(from)] = 0.0;
    for (bool changed = true; changed;) {
        changed = false;
        for (CellIndex m = 0; m < r.size(); ++m) {
            if (!r.standable(m) || d[static_cast<std::size_t>(m)] == inf) continue;
            for (Heading h : kAllHeadings) {
                const GridCoord c = step(r.coord(m), h);
                if (!r.on_grid(c)) continue;
                const CellIndex n = r.index(c);
                if (!r.standable(n)) continue;
                const double nd = d[static_cast<std::size_t>(m)] + r.traversal_cost(n) * r.cell_size();
                if (nd < d[static_cast<std::size_t>(n)] - 1e-12) {
                    d[static_cast<std::size_t>(n)] = nd;
                    changed = true;
                }
            }
        }
    }
    return d;
}

// Scores every candidate with the O(M) reference reward and returns the best
// index under the library's tie-break rule.
inline std::size_t brute_force_argmax(const std::vector<Candidate>& cands, const std::vector<double>& beta,
                                      const SufficientStats& stats, const std::vector<double>& gamma,
                                      const RewardConfig& cfg) {
    std::size_t best = 0;
    double best_r = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cands.size(); ++i) {
        const double r = cfg.algorithm == Algorithm::GUTS ? guts_reward(beta, stats, gamma, cands[i], cfg)
                                                          : nats_reward(beta, stats, gamma, cands[i]);
        if (r > best_r || (r == best_r && tie_break_less(cands[i], cands[best]))) {
            best = i;
            best_r = r;
        }
    }
    return best;
}

inline SearchRegion square(int n, double cs = 30.0) {
    const double w = n * cs;
    return SearchRegion::build({{0, 0}, {w, 0}, {w, w}, {0, w}}, cs);
}

}  // namespace oracle
