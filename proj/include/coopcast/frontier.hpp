// Pareto-frontier tracing over weighted-sum sweeps.
//
// A region module supplies a "problem": the simplex blocks to search, how to
// turn a block assignment into a witness, and the best (r1, r2) a witness
// yields for a sweep direction. The sweep runs one maximization per lambda,
// pools all maximizers, and re-scores the pool at every lambda so each row
// carries the best witness found anywhere (first-found wins ties).

#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "coopcast/optimize.hpp"

namespace coopcast {

struct RatePair {
    double r1 = 0.0;
    double r2 = 0.0;
};

template <class Witness>
struct FrontierPoint {
    double lambda = 0.0;
    double r1 = 0.0;
    double r2 = 0.0;
    int witness = -1;  // index into RateFrontier::witnesses
};

template <class Witness>
struct RateFrontier {
    std::vector<FrontierPoint<Witness>> points;  // one per lambda, r1 ascending
    std::vector<Witness> witnesses;
    OptBudget budget;

    // supporting value max lambda*r1 + (1-lambda)*r2 over the traced rows
    double support(double lambda) const {
        double best = 0.0;
        for (const auto& pt : points)
            best = std::max(best, lambda * pt.r1 + (1.0 - lambda) * pt.r2);
        return best;
    }
    double max_r1() const {
        double m = 0.0;
        for (const auto& pt : points) m = std::max(m, pt.r1);
        return m;
    }
    double max_r2() const {
        double m = 0.0;
        for (const auto& pt : points) m = std::max(m, pt.r2);
        return m;
    }
    double max_sum() const {
        double m = 0.0;
        for (const auto& pt : points) m = std::max(m, pt.r1 + pt.r2);
        return m;
    }
};

// Best point of the polytope {0 <= R1 <= a, 0 <= R2 <= b, R1+R2 <= s} in the
// direction (lambda, 1-lambda). Returns {0,0} rates for an empty polytope
// (s < 0) so infeasible witnesses contribute nothing.
inline RatePair polytope_best(double lambda, double a, double b, double s) {
    if (s < 0.0) return {0.0, 0.0};
    const double a_eff = std::min(a, s);
    const double b_eff = std::min(b, s);
    const RatePair v1{a_eff, std::min(b, s - a_eff)};
    const RatePair v2{std::min(a, s - b_eff), b_eff};
    const double s1 = lambda * v1.r1 + (1.0 - lambda) * v1.r2;
    const double s2 = lambda * v2.r1 + (1.0 - lambda) * v2.r2;
    return s1 >= s2 ? v1 : v2;
}

// Problem concept:
//   std::vector<int> block_dims() const;
//   Witness make_witness(const Blocks&) const;       (Problem::witness_type)
//   RatePair rate_pair(const Witness&, double lambda) const;
// rate_pair must already encode feasibility (infeasible -> {0,0}).
template <class Problem>
auto sweep_frontier(const Problem& problem, const OptBudget& budget)
    -> RateFrontier<typename Problem::witness_type> {
    using Witness = typename Problem::witness_type;

    const int nl = std::max(2, budget.lambda_count);
    std::vector<double> lambdas(static_cast<std::size_t>(nl));
    for (int k = 0; k < nl; ++k)
        lambdas[static_cast<std::size_t>(k)] = static_cast<double>(k) / (nl - 1);

    const auto dims = problem.block_dims();
    std::vector<Blocks> found(static_cast<std::size_t>(nl));
    parallel_for(nl, [&](int k) {
        const double lam = lambdas[static_cast<std::size_t>(k)];
        auto objective = [&](const Blocks& blocks) {
            const Witness w = problem.make_witness(blocks);
            const RatePair rp = problem.rate_pair(w, lam);
            return lam * rp.r1 + (1.0 - lam) * rp.r2;
        };
        auto res = maximize_over_simplices(objective, dims, budget,
                                           mix_seed(budget.seed, 0x5eedul, static_cast<std::uint64_t>(k)));
        found[static_cast<std::size_t>(k)] = std::move(res.point);
    });

    // pool of candidate witnesses, in lambda order
    std::vector<Witness> pool;
    pool.reserve(found.size());
    for (const auto& blocks : found) pool.push_back(problem.make_witness(blocks));

    RateFrontier<Witness> out;
    out.budget = budget;
    out.points.resize(static_cast<std::size_t>(nl));
    std::vector<int> chosen(static_cast<std::size_t>(nl), 0);
    parallel_for(nl, [&](int k) {
        const double lam = lambdas[static_cast<std::size_t>(k)];
        double best = -1.0;
        int best_i = 0;
        RatePair best_rp{};
        for (std::size_t i = 0; i < pool.size(); ++i) {
            const RatePair rp = problem.rate_pair(pool[i], lam);
            const double v = lam * rp.r1 + (1.0 - lam) * rp.r2;
            if (v > best) {
                best = v;
                best_i = static_cast<int>(i);
                best_rp = rp;
            }
        }
        auto& pt = out.points[static_cast<std::size_t>(k)];
        pt.lambda = lam;
        pt.r1 = best_rp.r1;
        pt.r2 = best_rp.r2;
        chosen[static_cast<std::size_t>(k)] = best_i;
    });

    // deduplicate witnesses by pool index
    std::vector<int> remap(pool.size(), -1);
    for (int k = 0; k < nl; ++k) {
        const int i = chosen[static_cast<std::size_t>(k)];
        if (remap[static_cast<std::size_t>(i)] < 0) {
            remap[static_cast<std::size_t>(i)] = static_cast<int>(out.witnesses.size());
            out.witnesses.push_back(pool[static_cast<std::size_t>(i)]);
        }
        out.points[static_cast<std::size_t>(k)].witness = remap[static_cast<std::size_t>(i)];
    }
    return out;
}

}  // namespace coopcast
