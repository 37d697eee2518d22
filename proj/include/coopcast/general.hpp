// Achievable region of the general broadcast channel with conferencing
// decoders (Marton coding plus estimate-and-forward conference descriptions),
// the plain Marton baseline, and the cut-set outer bound.

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "coopcast/frontier.hpp"
#include "coopcast/optimize.hpp"
#include "coopcast/prob.hpp"

namespace coopcast {

// Slack comparisons tolerate summation roundoff of exactly-degenerate
// witnesses (constant conference descriptions).
inline constexpr double kFeasTol = 1e-12;

struct MartonWitness {
    JointPmf p_uvx;           // vars ("u","v","x")
    Kernel uhat_given_y2;     // conference description at receiver 2
    Kernel vhat_given_y1;     // conference description at receiver 1
};

struct GeneralRatePoint {
    double r_u = 0.0;      // I(U;Y1,Uhat)
    double r_v = 0.0;      // I(V;Y2,Vhat)
    double i_uv = 0.0;     // I(U;V)
    bool feasible = false;
    double slack12 = 0.0;  // c12 - (I(Vhat;Y1) - I(Vhat;Y2))
    double slack21 = 0.0;  // c21 - (I(Uhat;Y2) - I(Uhat;Y1))
};

struct PxWitness {
    Pmf p_x;
};

namespace detail {

inline void validate_marton_witness(const MartonWitness& w, const BroadcastChannel& ch) {
    if (w.p_uvx.vars.size() != 3)
        throw validation_error("MartonWitness: p_uvx must have three variables (u,v,x)");
    if (w.p_uvx.sizes[2] != ch.x_size)
        throw validation_error("MartonWitness: X alphabet does not match channel");
    if (w.uhat_given_y2.in != ch.y2_size || w.vhat_given_y1.in != ch.y1_size)
        throw validation_error("MartonWitness: conference kernel input mismatch");
    if (w.uhat_given_y2.out > ch.y2_size + 1)
        throw validation_error("MartonWitness: |Uhat| exceeds |Y2|+1");
    if (w.vhat_given_y1.out > ch.y1_size + 1)
        throw validation_error("MartonWitness: |Vhat| exceeds |Y1|+1");
}

inline JointPmf marton_joint(const MartonWitness& w, const BroadcastChannel& ch) {
    return compose_chain({joint_source_factor({"u", "v", "x"}, w.p_uvx),
                          channel_factor("x", "y1", "y2", ch),
                          kernel_factor("y2", "uh", w.uhat_given_y2),
                          kernel_factor("y1", "vh", w.vhat_given_y1)});
}

inline double pair_mi_flat(const std::vector<double>& pab, const std::vector<double>& pa,
                           const std::vector<double>& pb, int na, int nb) {
    double s = 0.0;
    for (int a = 0; a < na; ++a)
        for (int b = 0; b < nb; ++b) {
            const double v = pab[static_cast<std::size_t>(a) * nb + b];
            if (v <= 0.0) continue;
            s += v * std::log2(v / (pa[static_cast<std::size_t>(a)] * pb[static_cast<std::size_t>(b)]));
        }
    return std::max(0.0, s);
}

// Factored evaluation of all Marton-with-cooperation functionals; matches the
// compose_chain path to 1e-12 (tested).
struct MartonEvaluator {
    const BroadcastChannel& ch;
    int cu, cv, nx, n1, n2, du, dv;

    MartonEvaluator(const BroadcastChannel& channel, int card_u, int card_v, int dim_uhat,
                    int dim_vhat)
        : ch(channel),
          cu(card_u),
          cv(card_v),
          nx(channel.x_size),
          n1(channel.y1_size),
          n2(channel.y2_size),
          du(dim_uhat),
          dv(dim_vhat) {}

    // p_uvx flat [u][v][x]; k1 flat [y2][uh]; k2 flat [y1][vh]
    GeneralRatePoint point(const std::vector<double>& p_uvx, const std::vector<double>& k1,
                           const std::vector<double>& k2) const {
        std::vector<double> p_ux(static_cast<std::size_t>(cu) * nx, 0.0);
        std::vector<double> p_vx(static_cast<std::size_t>(cv) * nx, 0.0);
        std::vector<double> p_uv(static_cast<std::size_t>(cu) * cv, 0.0);
        std::vector<double> px(static_cast<std::size_t>(nx), 0.0);
        std::vector<double> pu(static_cast<std::size_t>(cu), 0.0), pv(static_cast<std::size_t>(cv), 0.0);
        for (int u = 0; u < cu; ++u)
            for (int v = 0; v < cv; ++v)
                for (int x = 0; x < nx; ++x) {
                    const double m = p_uvx[(static_cast<std::size_t>(u) * cv + v) * nx + x];
                    p_ux[static_cast<std::size_t>(u) * nx + x] += m;
                    p_vx[static_cast<std::size_t>(v) * nx + x] += m;
                    p_uv[static_cast<std::size_t>(u) * cv + v] += m;
                    px[static_cast<std::size_t>(x)] += m;
                    pu[static_cast<std::size_t>(u)] += m;
                    pv[static_cast<std::size_t>(v)] += m;
                }

        std::vector<double> p_y1y2(static_cast<std::size_t>(n1) * n2, 0.0);
        for (int x = 0; x < nx; ++x) {
            const double m = px[static_cast<std::size_t>(x)];
            if (m == 0.0) continue;
            for (int a = 0; a < n1; ++a)
                for (int b = 0; b < n2; ++b)
                    p_y1y2[static_cast<std::size_t>(a) * n2 + b] += m * ch.at(x, a, b);
        }
        std::vector<double> py1(static_cast<std::size_t>(n1), 0.0), py2(static_cast<std::size_t>(n2), 0.0);
        for (int a = 0; a < n1; ++a)
            for (int b = 0; b < n2; ++b) {
                py1[static_cast<std::size_t>(a)] += p_y1y2[static_cast<std::size_t>(a) * n2 + b];
                py2[static_cast<std::size_t>(b)] += p_y1y2[static_cast<std::size_t>(a) * n2 + b];
            }

        // conference-description pair laws
        std::vector<double> p_uh(static_cast<std::size_t>(du), 0.0), p_vh(static_cast<std::size_t>(dv), 0.0);
        std::vector<double> p_uh_y1(static_cast<std::size_t>(du) * n1, 0.0);
        std::vector<double> p_uh_y2(static_cast<std::size_t>(du) * n2, 0.0);
        std::vector<double> p_vh_y1(static_cast<std::size_t>(dv) * n1, 0.0);
        std::vector<double> p_vh_y2(static_cast<std::size_t>(dv) * n2, 0.0);
        for (int b = 0; b < n2; ++b)
            for (int h = 0; h < du; ++h) {
                const double kv = k1[static_cast<std::size_t>(b) * du + h];
                if (kv == 0.0) continue;
                p_uh_y2[static_cast<std::size_t>(h) * n2 + b] += py2[static_cast<std::size_t>(b)] * kv;
                for (int a = 0; a < n1; ++a)
                    p_uh_y1[static_cast<std::size_t>(h) * n1 + a] +=
                        p_y1y2[static_cast<std::size_t>(a) * n2 + b] * kv;
            }
        for (int a = 0; a < n1; ++a)
            for (int h = 0; h < dv; ++h) {
                const double kv = k2[static_cast<std::size_t>(a) * dv + h];
                if (kv == 0.0) continue;
                p_vh_y1[static_cast<std::size_t>(h) * n1 + a] += py1[static_cast<std::size_t>(a)] * kv;
                for (int b = 0; b < n2; ++b)
                    p_vh_y2[static_cast<std::size_t>(h) * n2 + b] +=
                        p_y1y2[static_cast<std::size_t>(a) * n2 + b] * kv;
            }
        for (int h = 0; h < du; ++h)
            for (int b = 0; b < n2; ++b) p_uh[static_cast<std::size_t>(h)] += p_uh_y2[static_cast<std::size_t>(h) * n2 + b];
        for (int h = 0; h < dv; ++h)
            for (int a = 0; a < n1; ++a) p_vh[static_cast<std::size_t>(h)] += p_vh_y1[static_cast<std::size_t>(h) * n1 + a];

        GeneralRatePoint out;
        out.slack21 = ch.c21 - (pair_mi_flat(p_uh_y2, p_uh, py2, du, n2) -
                                pair_mi_flat(p_uh_y1, p_uh, py1, du, n1));
        out.slack12 = ch.c12 - (pair_mi_flat(p_vh_y1, p_vh, py1, dv, n1) -
                                pair_mi_flat(p_vh_y2, p_vh, py2, dv, n2));
        out.feasible = out.slack12 >= -kFeasTol && out.slack21 >= -kFeasTol;
        out.i_uv = pair_mi_flat(p_uv, pu, pv, cu, cv);

        // r_u = I(U; Y1,Uhat) over p(u,y1,uh)
        {
            std::vector<double> p_u_y1y2(static_cast<std::size_t>(cu) * n1 * n2, 0.0);
            for (int u = 0; u < cu; ++u)
                for (int x = 0; x < nx; ++x) {
                    const double m = p_ux[static_cast<std::size_t>(u) * nx + x];
                    if (m == 0.0) continue;
                    for (int a = 0; a < n1; ++a)
                        for (int b = 0; b < n2; ++b)
                            p_u_y1y2[(static_cast<std::size_t>(u) * n1 + a) * n2 + b] +=
                                m * ch.at(x, a, b);
                }
            std::vector<double> p_u_y1uh(static_cast<std::size_t>(cu) * n1 * du, 0.0);
            for (int u = 0; u < cu; ++u)
                for (int a = 0; a < n1; ++a)
                    for (int b = 0; b < n2; ++b) {
                        const double m = p_u_y1y2[(static_cast<std::size_t>(u) * n1 + a) * n2 + b];
                        if (m == 0.0) continue;
                        for (int h = 0; h < du; ++h)
                            p_u_y1uh[(static_cast<std::size_t>(u) * n1 + a) * du + h] +=
                                m * k1[static_cast<std::size_t>(b) * du + h];
                    }
            std::vector<double> q(static_cast<std::size_t>(n1) * du, 0.0);
            for (int u = 0; u < cu; ++u)
                for (int a = 0; a < n1; ++a)
                    for (int h = 0; h < du; ++h)
                        q[static_cast<std::size_t>(a) * du + h] +=
                            p_u_y1uh[(static_cast<std::size_t>(u) * n1 + a) * du + h];
            double s = 0.0;
            for (int u = 0; u < cu; ++u)
                for (int a = 0; a < n1; ++a)
                    for (int h = 0; h < du; ++h) {
                        const double v = p_u_y1uh[(static_cast<std::size_t>(u) * n1 + a) * du + h];
                        if (v <= 0.0) continue;
                        s += v * std::log2(v / (pu[static_cast<std::size_t>(u)] *
                                                q[static_cast<std::size_t>(a) * du + h]));
                    }
            out.r_u = std::max(0.0, s);
        }
        // r_v = I(V; Y2,Vhat) over p(v,y2,vh)
        {
            std::vector<double> p_v_y1y2(static_cast<std::size_t>(cv) * n1 * n2, 0.0);
            for (int v = 0; v < cv; ++v)
                for (int x = 0; x < nx; ++x) {
                    const double m = p_vx[static_cast<std::size_t>(v) * nx + x];
                    if (m == 0.0) continue;
                    for (int a = 0; a < n1; ++a)
                        for (int b = 0; b < n2; ++b)
                            p_v_y1y2[(static_cast<std::size_t>(v) * n1 + a) * n2 + b] +=
                                m * ch.at(x, a, b);
                }
            std::vector<double> p_v_y2vh(static_cast<std::size_t>(cv) * n2 * dv, 0.0);
            for (int v = 0; v < cv; ++v)
                for (int a = 0; a < n1; ++a)
                    for (int b = 0; b < n2; ++b) {
                        const double m = p_v_y1y2[(static_cast<std::size_t>(v) * n1 + a) * n2 + b];
                        if (m == 0.0) continue;
                        for (int h = 0; h < dv; ++h)
                            p_v_y2vh[(static_cast<std::size_t>(v) * n2 + b) * dv + h] +=
                                m * k2[static_cast<std::size_t>(a) * dv + h];
                    }
            std::vector<double> q(static_cast<std::size_t>(n2) * dv, 0.0);
            for (int v = 0; v < cv; ++v)
                for (int b = 0; b < n2; ++b)
                    for (int h = 0; h < dv; ++h)
                        q[static_cast<std::size_t>(b) * dv + h] +=
                            p_v_y2vh[(static_cast<std::size_t>(v) * n2 + b) * dv + h];
            double s = 0.0;
            for (int v = 0; v < cv; ++v)
                for (int b = 0; b < n2; ++b)
                    for (int h = 0; h < dv; ++h) {
                        const double val = p_v_y2vh[(static_cast<std::size_t>(v) * n2 + b) * dv + h];
                        if (val <= 0.0) continue;
                        s += val * std::log2(val / (pv[static_cast<std::size_t>(v)] *
                                                    q[static_cast<std::size_t>(b) * dv + h]));
                    }
            out.r_v = std::max(0.0, s);
        }
        return out;
    }
};

struct MartonProblem {
    using witness_type = MartonWitness;
    MartonEvaluator eval;
    int cu, cv;

    MartonProblem(const BroadcastChannel& ch, int card_u, int card_v, bool coop)
        : eval(ch, card_u, card_v, coop ? ch.y2_size + 1 : 1, coop ? ch.y1_size + 1 : 1),
          cu(card_u),
          cv(card_v) {}

    std::vector<int> block_dims() const {
        std::vector<int> dims;
        dims.push_back(cu * cv * eval.nx);
        for (int b = 0; b < eval.n2; ++b) dims.push_back(eval.du);
        for (int a = 0; a < eval.n1; ++a) dims.push_back(eval.dv);
        return dims;
    }
    MartonWitness make_witness(const Blocks& blocks) const {
        auto normalized = [](std::vector<double> v) {
            double s = 0.0;
            for (double x : v) s += x;
            for (double& x : v) x /= s;
            return v;
        };
        std::vector<double> k1, k2;
        for (int b = 0; b < eval.n2; ++b) {
            auto row = normalized(blocks[static_cast<std::size_t>(1 + b)]);
            k1.insert(k1.end(), row.begin(), row.end());
        }
        for (int a = 0; a < eval.n1; ++a) {
            auto row = normalized(blocks[static_cast<std::size_t>(1 + eval.n2 + a)]);
            k2.insert(k2.end(), row.begin(), row.end());
        }
        return MartonWitness{
            make_joint({"u", "v", "x"}, {cu, cv, eval.nx}, normalized(blocks[0])),
            Kernel(eval.n2, eval.du, std::move(k1)), Kernel(eval.n1, eval.dv, std::move(k2))};
    }
    RatePair rate_pair(const MartonWitness& w, double lambda) const {
        const GeneralRatePoint pt = eval.point(w.p_uvx.t, w.uhat_given_y2.p, w.vhat_given_y1.p);
        if (!pt.feasible) return {0.0, 0.0};
        return polytope_best(lambda, pt.r_u, pt.r_v, pt.r_u + pt.r_v - pt.i_uv);
    }
};

struct CutsetProblem {
    using witness_type = PxWitness;
    const BroadcastChannel& ch;
    std::vector<double> h_y1y2_x, h_y1_x, h_y2_x;  // per-input conditional entropies

    explicit CutsetProblem(const BroadcastChannel& channel) : ch(channel) {
        h_y1y2_x.resize(static_cast<std::size_t>(ch.x_size));
        h_y1_x.resize(static_cast<std::size_t>(ch.x_size));
        h_y2_x.resize(static_cast<std::size_t>(ch.x_size));
        const Kernel k1 = ch.y1_kernel(), k2 = ch.y2_kernel();
        for (int x = 0; x < ch.x_size; ++x) {
            double h12 = 0.0;
            for (double v : ch.slice(x)) h12 -= plog2p(v);
            h_y1y2_x[static_cast<std::size_t>(x)] = h12;
            double h1 = 0.0, h2v = 0.0;
            for (int a = 0; a < ch.y1_size; ++a) h1 -= plog2p(k1.at(x, a));
            for (int b = 0; b < ch.y2_size; ++b) h2v -= plog2p(k2.at(x, b));
            h_y1_x[static_cast<std::size_t>(x)] = h1;
            h_y2_x[static_cast<std::size_t>(x)] = h2v;
        }
    }

    std::vector<int> block_dims() const { return {ch.x_size}; }
    PxWitness make_witness(const Blocks& blocks) const {
        std::vector<double> px = blocks[0];
        double s = 0.0;
        for (double v : px) s += v;
        for (double& v : px) v /= s;
        return PxWitness{Pmf(std::move(px))};
    }
    RatePair rate_pair(const PxWitness& w, double lambda) const {
        const auto& px = w.p_x.p;
        const int nx = ch.x_size, n1 = ch.y1_size, n2 = ch.y2_size;
        std::vector<double> p12(static_cast<std::size_t>(n1) * n2, 0.0);
        double hc12 = 0.0, hc1 = 0.0, hc2 = 0.0;
        for (int x = 0; x < nx; ++x) {
            const double m = px[static_cast<std::size_t>(x)];
            if (m == 0.0) continue;
            hc12 += m * h_y1y2_x[static_cast<std::size_t>(x)];
            hc1 += m * h_y1_x[static_cast<std::size_t>(x)];
            hc2 += m * h_y2_x[static_cast<std::size_t>(x)];
            for (int a = 0; a < n1; ++a)
                for (int b = 0; b < n2; ++b)
                    p12[static_cast<std::size_t>(a) * n2 + b] += m * ch.at(x, a, b);
        }
        double h12 = 0.0, h1 = 0.0, h2v = 0.0;
        std::vector<double> py1(static_cast<std::size_t>(n1), 0.0), py2(static_cast<std::size_t>(n2), 0.0);
        for (int a = 0; a < n1; ++a)
            for (int b = 0; b < n2; ++b) {
                const double v = p12[static_cast<std::size_t>(a) * n2 + b];
                h12 -= plog2p(v);
                py1[static_cast<std::size_t>(a)] += v;
                py2[static_cast<std::size_t>(b)] += v;
            }
        for (double v : py1) h1 -= plog2p(v);
        for (double v : py2) h2v -= plog2p(v);
        const double i1 = std::max(0.0, h1 - hc1);
        const double i2 = std::max(0.0, h2v - hc2);
        const double i12 = std::max(0.0, h12 - hc12);
        return polytope_best(lambda, i1 + ch.c21, i2 + ch.c12, i12);
    }
};

}  // namespace detail

// Rate functionals of one cooperative-Marton witness: R(U) = I(U;Y1,Uhat),
// R(V) = I(V;Y2,Vhat), I(U;V), and the two conference-capacity slacks. The
// witness contributes {R1 <= r_u, R2 <= r_v, R1+R2 <= r_u+r_v-i_uv} only when
// feasible.
inline GeneralRatePoint marton_coop_point(const MartonWitness& w, const BroadcastChannel& ch) {
    detail::validate_marton_witness(w, ch);
    const auto j = detail::marton_joint(w, ch);
    GeneralRatePoint out;
    out.r_u = mutual_information(j, {"u"}, {"y1", "uh"});
    out.r_v = mutual_information(j, {"v"}, {"y2", "vh"});
    out.i_uv = mutual_information(j, {"u"}, {"v"});
    out.slack21 = ch.c21 - (mutual_information(j, {"uh"}, {"y2"}) -
                            mutual_information(j, {"uh"}, {"y1"}));
    out.slack12 = ch.c12 - (mutual_information(j, {"vh"}, {"y1"}) -
                            mutual_information(j, {"vh"}, {"y2"}));
    out.feasible = out.slack12 >= -kFeasTol && out.slack21 >= -kFeasTol;
    return out;
}

// Diagnostic upper bound on R(U) under a binding reverse conference link:
// I(U;Y1) + C21 - I(Uhat;Y2|U,Y1).
inline double partial_coop_r1_bound(const MartonWitness& w, const BroadcastChannel& ch) {
    detail::validate_marton_witness(w, ch);
    const auto j = detail::marton_joint(w, ch);
    return mutual_information(j, {"u"}, {"y1"}) + ch.c21 -
           mutual_information(j, {"uh"}, {"y2"}, {"u", "y1"});
}

// Inner-bound frontier over cooperative-Marton witnesses at the configured
// auxiliary cardinalities (the theory provides no bound for |U|, |V|; the
// result is an inner bound at this choice).
inline RateFrontier<MartonWitness> marton_coop_region(const BroadcastChannel& ch, int card_u,
                                                      int card_v, const OptBudget& budget = {}) {
    if (card_u < 1 || card_v < 1)
        throw validation_error("marton_coop_region: cardinalities must be >= 1");
    return sweep_frontier(detail::MartonProblem(ch, card_u, card_v, /*coop=*/true), budget);
}

// Marton baseline: conference descriptions forced constant.
inline RateFrontier<MartonWitness> marton_nocoop_region(const BroadcastChannel& ch, int card_u,
                                                        int card_v, const OptBudget& budget = {}) {
    if (card_u < 1 || card_v < 1)
        throw validation_error("marton_nocoop_region: cardinalities must be >= 1");
    return sweep_frontier(detail::MartonProblem(ch, card_u, card_v, /*coop=*/false), budget);
}

// Cut-set outer bound {R1 <= I(X;Y1)+C21, R2 <= I(X;Y2)+C12,
// R1+R2 <= I(X;Y1,Y2)}, maximized over p(x) per sweep direction.
inline RateFrontier<PxWitness> cutset_bound(const BroadcastChannel& ch,
                                            const OptBudget& budget = {}) {
    return sweep_frontier(detail::CutsetProblem(ch), budget);
}

// Point evaluators mirrored for audit of serialized frontiers.
inline RatePair cutset_rate_pair(const PxWitness& w, const BroadcastChannel& ch, double lambda) {
    return detail::CutsetProblem(ch).rate_pair(w, lambda);
}
inline RatePair marton_rate_pair(const MartonWitness& w, const BroadcastChannel& ch,
                                 double lambda) {
    const GeneralRatePoint pt = marton_coop_point(w, ch);
    if (!pt.feasible) return {0.0, 0.0};
    return polytope_best(lambda, pt.r_u, pt.r_v, pt.r_u + pt.r_v - pt.i_uv);
}

}  // namespace coopcast
