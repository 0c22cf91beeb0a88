#pragma once

// Shared helpers for the test binaries: seeded draws and the brute-force
// grid-search oracle for tiny box QPs. Everything here is independent of the
// library's solver path.

#include <random>

#include "utilisvm/trainer.hpp"

namespace testsupport {

using utilisvm::GramMatrix;
using utilisvm::TrainingProblem;
using utilisvm::Vec;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

inline std::size_t pick(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

/// Primal objective at a given alpha, straight from the definition.
inline double primal_at(const TrainingProblem& p, const GramMatrix& gram, const Vec& alpha) {
    const std::size_t m = p.size();
    double norm_sq = 0.0;
    double hinge = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double fi = 0.0;
        for (std::size_t j = 0; j < m; ++j)
            fi += alpha[j] * p.labels[j] * gram.at(j, i);
        norm_sq += alpha[i] * p.labels[i] * fi;
        hinge += (p.per_sample_cost[i] / p.trade_off) *
                 std::max(0.0, p.per_sample_margin[i] - p.labels[i] * fi);
    }
    return std::max(0.0, norm_sq) / (2.0 * p.trade_off) + hinge;
}

/// Minimum of a convex sequence v(0..g) by binary search on the forward
/// differences; identical to a full scan of the sequence.
template <typename ValueAt>
double convex_sequence_min(std::size_t g, const ValueAt& value) {
    std::size_t lo = 0, hi = g;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (value(mid + 1) < value(mid))
            lo = mid + 1;
        else
            hi = mid;
    }
    return value(lo);
}

/// Exhaustive grid search over the alpha box with per-coordinate step
/// C_i / steps_per_coord. Outer coordinates are scanned literally; the first
/// coordinate's scan is resolved by binary search on its value sequence,
/// which is convex, so the result equals the full scan's minimum.
inline double brute_force_primal(const TrainingProblem& p, std::size_t steps_per_coord) {
    const std::size_t m = p.size();
    if (m > 3) throw std::runtime_error("brute force oracle supports m <= 3 only");
    const GramMatrix gram = utilisvm::gram_matrix(p.kernel, p.points);
    const std::size_t g = steps_per_coord;
    const double gd = static_cast<double>(g);
    const double C = p.trade_off;

    // label-folded kernel Q_jk = y_j y_k K(x_j, x_k)
    double Q[3][3] = {};
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k)
            Q[j][k] = p.labels[j] * p.labels[k] * gram.at(j, k);
    const double step0 = p.per_sample_cost[0] / gd;
    const double w0 = p.per_sample_cost[0] / C;
    const double mu0 = p.per_sample_margin[0];

    if (m == 1) {
        return convex_sequence_min(g, [&](std::size_t t) {
            const double a0 = static_cast<double>(t) * step0;
            return std::max(0.0, a0 * a0 * Q[0][0]) / (2.0 * C) +
                   w0 * std::max(0.0, mu0 - a0 * Q[0][0]);
        });
    }

    const double w1 = p.per_sample_cost[1] / C;
    const double mu1 = p.per_sample_margin[1];
    const double w2 = m == 3 ? p.per_sample_cost[2] / C : 0.0;
    const double mu2 = m == 3 ? p.per_sample_margin[2] : 0.0;

    double best = std::numeric_limits<double>::infinity();
    const std::size_t outer2 = m == 3 ? g : 0;
    for (std::size_t t2 = 0; t2 <= outer2; ++t2) {
        const double a2 = m == 3 ? static_cast<double>(t2) * p.per_sample_cost[2] / gd : 0.0;
        for (std::size_t t1 = 0; t1 <= g; ++t1) {
            const double a1 = static_cast<double>(t1) * p.per_sample_cost[1] / gd;
            // fixed-part quantities for the alpha0 line
            const double norm_fixed =
                a1 * a1 * Q[1][1] + a2 * a2 * Q[2][2] + 2.0 * a1 * a2 * Q[1][2];
            const double cross = a1 * Q[0][1] + a2 * Q[0][2];
            const double yf1_fixed = a1 * Q[1][1] + a2 * Q[1][2];
            const double yf2_fixed = a1 * Q[2][1] + a2 * Q[2][2];
            const double line = convex_sequence_min(g, [&](std::size_t t) {
                const double a0 = static_cast<double>(t) * step0;
                const double norm_sq =
                    norm_fixed + 2.0 * a0 * cross + a0 * a0 * Q[0][0];
                double obj = std::max(0.0, norm_sq) / (2.0 * C);
                obj += w0 * std::max(0.0, mu0 - (cross + a0 * Q[0][0]));
                obj += w1 * std::max(0.0, mu1 - (yf1_fixed + a0 * Q[0][1]));
                if (m == 3) obj += w2 * std::max(0.0, mu2 - (yf2_fixed + a0 * Q[0][2]));
                return obj;
            });
            best = std::min(best, line);
        }
    }
    return best;
}

/// Literal full scan over every grid point, for cross-checking the
/// binary-search line minimization on coarse grids.
inline double brute_force_primal_full_scan(const TrainingProblem& p,
                                           std::size_t steps_per_coord) {
    const std::size_t m = p.size();
    if (m > 3) throw std::runtime_error("full scan supports m <= 3 only");
    const GramMatrix gram = utilisvm::gram_matrix(p.kernel, p.points);
    const std::size_t g = steps_per_coord;
    Vec alpha(m, 0.0);
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> idx(m, 0);
    while (true) {
        for (std::size_t k = 0; k < m; ++k)
            alpha[k] = static_cast<double>(idx[k]) * p.per_sample_cost[k] /
                       static_cast<double>(g);
        best = std::min(best, primal_at(p, gram, alpha));
        std::size_t k = 0;
        for (; k < m; ++k) {
            if (++idx[k] <= g) break;
            idx[k] = 0;
        }
        if (k == m) break;
    }
    return best;
}

}  // namespace testsupport
