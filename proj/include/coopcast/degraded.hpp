// Capacity region of the physically degraded broadcast channel with a
// forward conference link, its no-cooperation baseline, and the binary
// symmetric closed form.
//
// Rate convention: the traced plane is (R1, R0+R2); a common-message rate is
// folded into the second coordinate throughout.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "coopcast/frontier.hpp"
#include "coopcast/optimize.hpp"
#include "coopcast/prob.hpp"

namespace coopcast {

struct DegradedWitness {
    Pmf p_u;
    Kernel p_x_given_u;
};

struct DegradedRates {
    double r1 = 0.0;   // I(X;Y1|U)
    double r02 = 0.0;  // min(I(U;Y1), I(U;Y2)+C12), or I(U;Y2) for no cooperation
    double i_u_y1 = 0.0;
    double i_u_y2 = 0.0;
    double i_x_y1 = 0.0;
};

namespace detail {

inline void require_degraded(const BroadcastChannel& ch, double tol = 1e-9) {
    const auto check = is_physically_degraded(ch, tol);
    if (!check.degraded)
        throw validation_error("channel is not physically degraded (residual " +
                               std::to_string(check.residual) + ")");
}

inline void require_degraded_cardinality(int card_u, const BroadcastChannel& ch,
                                         bool include_y2) {
    int bound = std::min(ch.x_size, ch.y1_size);
    if (include_y2) bound = std::min(bound, ch.y2_size);
    if (card_u > bound)
        throw validation_error("auxiliary cardinality " + std::to_string(card_u) +
                               " exceeds bound " + std::to_string(bound));
}

// Tensor-pipeline evaluation of the degraded-region mutual informations.
inline DegradedRates degraded_rates_from_joint(const Pmf& p_u, const Kernel& p_x_given_u,
                                               const BroadcastChannel& ch, bool coop) {
    if (p_x_given_u.in != p_u.size() || p_x_given_u.out != ch.x_size)
        throw validation_error("witness shape does not match channel input");
    auto j = compose_chain({source_factor("u", p_u), kernel_factor("u", "x", p_x_given_u),
                            channel_factor("x", "y1", "y2", ch)});
    DegradedRates r;
    r.r1 = mutual_information(j, {"x"}, {"y1"}, {"u"});
    r.i_u_y1 = mutual_information(j, {"u"}, {"y1"});
    r.i_u_y2 = mutual_information(j, {"u"}, {"y2"});
    r.i_x_y1 = mutual_information(j, {"x"}, {"y1"});
    r.r02 = coop ? std::min(r.i_u_y1, r.i_u_y2 + ch.c12) : r.i_u_y2;
    return r;
}

// Allocation-light evaluator used inside the sweeps; agrees with the
// compose_chain path to 1e-12 (tested).
struct DegradedEvaluator {
    int nu, nx, n1, n2;
    double c12;
    bool coop;
    std::vector<double> w1, w2;  // p(y1|x), p(y2|x) row-major

    DegradedEvaluator(const BroadcastChannel& ch, int card_u, bool cooperative)
        : nu(card_u),
          nx(ch.x_size),
          n1(ch.y1_size),
          n2(ch.y2_size),
          c12(ch.c12),
          coop(cooperative),
          w1(ch.y1_kernel().p),
          w2(ch.y2_kernel().p) {}

    // blocks: rows of p(x|u) first (nu of them), then p(u)
    DegradedRates rates(const Blocks& blocks) const {
        const auto& pu = blocks[static_cast<std::size_t>(nu)];
        std::vector<double> p_ux(static_cast<std::size_t>(nu) * nx);
        std::vector<double> px(static_cast<std::size_t>(nx), 0.0);
        for (int u = 0; u < nu; ++u)
            for (int x = 0; x < nx; ++x) {
                const double v = pu[static_cast<std::size_t>(u)] *
                                 blocks[static_cast<std::size_t>(u)][static_cast<std::size_t>(x)];
                p_ux[static_cast<std::size_t>(u) * nx + x] = v;
                px[static_cast<std::size_t>(x)] += v;
            }

        std::vector<double> p_uy1(static_cast<std::size_t>(nu) * n1, 0.0);
        std::vector<double> p_uy2(static_cast<std::size_t>(nu) * n2, 0.0);
        std::vector<double> p_xy1(static_cast<std::size_t>(nx) * n1, 0.0);
        for (int u = 0; u < nu; ++u)
            for (int x = 0; x < nx; ++x) {
                const double v = p_ux[static_cast<std::size_t>(u) * nx + x];
                if (v == 0.0) continue;
                for (int a = 0; a < n1; ++a)
                    p_uy1[static_cast<std::size_t>(u) * n1 + a] +=
                        v * w1[static_cast<std::size_t>(x) * n1 + a];
                for (int b = 0; b < n2; ++b)
                    p_uy2[static_cast<std::size_t>(u) * n2 + b] +=
                        v * w2[static_cast<std::size_t>(x) * n2 + b];
            }
        for (int x = 0; x < nx; ++x)
            for (int a = 0; a < n1; ++a)
                p_xy1[static_cast<std::size_t>(x) * n1 + a] =
                    px[static_cast<std::size_t>(x)] * w1[static_cast<std::size_t>(x) * n1 + a];

        std::vector<double> py1(static_cast<std::size_t>(n1), 0.0), py2(static_cast<std::size_t>(n2), 0.0);
        for (int u = 0; u < nu; ++u) {
            for (int a = 0; a < n1; ++a) py1[static_cast<std::size_t>(a)] += p_uy1[static_cast<std::size_t>(u) * n1 + a];
            for (int b = 0; b < n2; ++b) py2[static_cast<std::size_t>(b)] += p_uy2[static_cast<std::size_t>(u) * n2 + b];
        }

        auto pair_mi = [](const std::vector<double>& pab, const std::vector<double>& pa,
                          const std::vector<double>& pb, int na, int nb) {
            double s = 0.0;
            for (int a = 0; a < na; ++a)
                for (int b = 0; b < nb; ++b) {
                    const double v = pab[static_cast<std::size_t>(a) * nb + b];
                    if (v <= 0.0) continue;
                    s += v * std::log2(v / (pa[static_cast<std::size_t>(a)] * pb[static_cast<std::size_t>(b)]));
                }
            return std::max(0.0, s);
        };

        DegradedRates r;
        r.i_u_y1 = pair_mi(p_uy1, pu, py1, nu, n1);
        r.i_u_y2 = pair_mi(p_uy2, pu, py2, nu, n2);
        r.i_x_y1 = pair_mi(p_xy1, px, py1, nx, n1);

        // I(X;Y1|U) by direct summation over p(u,x,y1)
        double s = 0.0;
        for (int u = 0; u < nu; ++u)
            for (int x = 0; x < nx; ++x) {
                const double v = p_ux[static_cast<std::size_t>(u) * nx + x];
                if (v == 0.0) continue;
                for (int a = 0; a < n1; ++a) {
                    const double puxy = v * w1[static_cast<std::size_t>(x) * n1 + a];
                    if (puxy <= 0.0) continue;
                    s += puxy * std::log2(puxy * pu[static_cast<std::size_t>(u)] /
                                          (v * p_uy1[static_cast<std::size_t>(u) * n1 + a]));
                }
            }
        r.r1 = std::max(0.0, s);
        r.r02 = coop ? std::min(r.i_u_y1, r.i_u_y2 + c12) : r.i_u_y2;
        return r;
    }
};

struct DegradedProblem {
    using witness_type = DegradedWitness;
    DegradedEvaluator eval;

    DegradedProblem(const BroadcastChannel& ch, int card_u, bool coop)
        : eval(ch, card_u, coop) {}

    std::vector<int> block_dims() const {
        std::vector<int> dims(static_cast<std::size_t>(eval.nu), eval.nx);
        dims.push_back(eval.nu);
        return dims;
    }
    DegradedWitness make_witness(const Blocks& blocks) const {
        std::vector<double> rows;
        rows.reserve(static_cast<std::size_t>(eval.nu) * eval.nx);
        for (int u = 0; u < eval.nu; ++u) {
            double s = 0.0;
            for (double v : blocks[static_cast<std::size_t>(u)]) s += v;
            for (double v : blocks[static_cast<std::size_t>(u)]) rows.push_back(v / s);
        }
        std::vector<double> pu = blocks[static_cast<std::size_t>(eval.nu)];
        double s = 0.0;
        for (double v : pu) s += v;
        for (double& v : pu) v /= s;
        return DegradedWitness{Pmf(std::move(pu)), Kernel(eval.nu, eval.nx, std::move(rows))};
    }
    RatePair rate_pair(const DegradedWitness& w, double) const {
        Blocks blocks;
        blocks.reserve(static_cast<std::size_t>(eval.nu) + 1);
        for (int u = 0; u < eval.nu; ++u) {
            auto row = w.p_x_given_u.row(u);
            blocks.emplace_back(row.begin(), row.end());
        }
        blocks.emplace_back(w.p_u.p);
        const DegradedRates r = eval.rates(blocks);
        return {r.r1, r.r02};
    }
};

}  // namespace detail

// Rates of Eqs. r1 = I(X;Y1|U), r02 = min(I(U;Y1), I(U;Y2)+C12) for one
// auxiliary witness on a physically degraded channel.
inline DegradedRates degraded_rate_point(const Pmf& p_u, const Kernel& p_x_given_u,
                                         const BroadcastChannel& ch) {
    detail::require_degraded(ch);
    detail::require_degraded_cardinality(p_u.size(), ch, /*include_y2=*/false);
    return detail::degraded_rates_from_joint(p_u, p_x_given_u, ch, /*coop=*/true);
}

// No-cooperation baseline point: r02 = I(U;Y2), cardinality bound includes Y2.
inline DegradedRates nocoop_degraded_rate_point(const Pmf& p_u, const Kernel& p_x_given_u,
                                                const BroadcastChannel& ch) {
    detail::require_degraded(ch);
    detail::require_degraded_cardinality(p_u.size(), ch, /*include_y2=*/true);
    return detail::degraded_rates_from_joint(p_u, p_x_given_u, ch, /*coop=*/false);
}

// Sum-rate of a witness written as I(X;Y1) + min{0, C12 - (I(U;Y1)-I(U;Y2))};
// algebraically equal to r1 + r02 of degraded_rate_point.
inline double degraded_sum_rate_gain(const Pmf& p_u, const Kernel& p_x_given_u,
                                     const BroadcastChannel& ch) {
    const auto r = degraded_rate_point(p_u, p_x_given_u, ch);
    return r.i_x_y1 + std::min(0.0, ch.c12 - (r.i_u_y1 - r.i_u_y2));
}

// Inner-bound frontier of (R1, R0+R2) for the degraded channel with a C12
// conference link, traced by weighted-sum sweeps.
inline RateFrontier<DegradedWitness> degraded_region(const BroadcastChannel& ch,
                                                     const OptBudget& budget = {}) {
    detail::require_degraded(ch);
    const int card_u = std::min(ch.x_size, ch.y1_size);
    return sweep_frontier(detail::DegradedProblem(ch, card_u, /*coop=*/true), budget);
}

inline RateFrontier<DegradedWitness> nocoop_degraded_region(const BroadcastChannel& ch,
                                                            const OptBudget& budget = {}) {
    detail::require_degraded(ch);
    const int card_u = std::min({ch.x_size, ch.y1_size, ch.y2_size});
    return sweep_frontier(detail::DegradedProblem(ch, card_u, /*coop=*/false), budget);
}

// Closed-form frontier of the binary symmetric cascade with a symmetric
// binary auxiliary: U uniform, X = U xor Bern(alpha). One frontier point per
// alpha; the lambda column of the result carries alpha.
inline RateFrontier<DegradedWitness> bsbc_region_closed_form(double p1, double p2, double c12,
                                                             std::span<const double> alphas) {
    if (p1 < 0.0 || p1 > 0.5 || p2 < 0.0 || p2 > 0.5)
        throw validation_error("bsbc_region_closed_form: p1, p2 must lie in [0, 1/2]");
    const double p12 = bsc_star(p1, p2);
    RateFrontier<DegradedWitness> out;
    for (double alpha : alphas) {
        if (alpha < 0.0 || alpha > 1.0)
            throw validation_error("bsbc_region_closed_form: alpha outside [0,1]");
        FrontierPoint<DegradedWitness> pt;
        pt.lambda = alpha;
        pt.r1 = binary_entropy(bsc_star(alpha, p1)) - binary_entropy(p1);
        pt.r2 = std::min(1.0 - binary_entropy(bsc_star(alpha, p1)),
                         1.0 - binary_entropy(bsc_star(alpha, p12)) + c12);
        pt.witness = static_cast<int>(out.witnesses.size());
        out.witnesses.push_back(DegradedWitness{Pmf::uniform(2), Kernel::bsc(alpha)});
        out.points.push_back(pt);
    }
    std::sort(out.points.begin(), out.points.end(),
              [](const auto& a, const auto& b) { return a.r1 < b.r1; });
    return out;
}

}  // namespace coopcast
