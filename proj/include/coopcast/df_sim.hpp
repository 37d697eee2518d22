// Monte Carlo simulator of the decode-and-forward block-Markov scheme for the
// physically degraded broadcast channel: superposition codebooks over an
// auxiliary cloud-center alphabet, uniform random binning of the second
// receiver's messages into ceil(2^{n*C12}) cells, and list-intersect-bin
// decoding at receiver 2.
//
// Error propagation is simulated faithfully: receiver 1 relays the bin index
// of its own estimate, and receiver 2 resolves its typicality list against
// whatever index actually arrived.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "coopcast/optimize.hpp"
#include "coopcast/prob.hpp"

namespace coopcast {

struct DfCode {
    int n = 0;
    double r1 = 0.0, r2 = 0.0, c12 = 0.0;
    int m1 = 1, m2 = 1, m_r = 1;  // 2^{nR1}, 2^{nR2}, bin count (ceiled)
    int u_size = 0, x_size = 0;
    Pmf p_u;
    Kernel p_x_given_u;
    std::vector<int> u_book;  // [(s*m2 + w2)*n + t]
    std::vector<int> x_book;  // [((s*m2 + w2)*m1 + w1)*n + t]
    std::vector<int> bins;    // w2 -> bin index in [0, m_r)
    double realized_r1 = 0.0, realized_r2 = 0.0;
    bool size_ceiled = false;  // some 2^{nR} was not an integer
    std::uint64_t seed = 0;

    int u_at(int s, int w2, int t) const {
        return u_book[(static_cast<std::size_t>(s) * m2 + w2) * n + t];
    }
    const int* x_word(int s, int w2, int w1) const {
        return &x_book[((static_cast<std::size_t>(s) * m2 + w2) * m1 + w1) *
                       static_cast<std::size_t>(n)];
    }
};

struct SimConfig {
    int blocks = 8;  // B; nB symbols carry B-1 message pairs
    int trials = 1000;
    std::uint64_t seed = 0;
    enum class Decoder { ml, typicality } decoder = Decoder::ml;
    double epsilon = 0.05;    // typicality slack
    bool strict_ties = false; // declare an error on non-unique candidate sets
};

struct DfSimReport {
    int n = 0;
    double nominal_r1 = 0.0, nominal_r2 = 0.0;
    double realized_r1 = 0.0, realized_r2 = 0.0;
    int m1 = 0, m2 = 0, m_r = 0;
    long long samples = 0;  // trials * (B-1) message pairs
    long long err1 = 0, err2 = 0, err_joint = 0;
    long long err2_solo = 0;      // receiver 2 decoding from y2 alone (paired baseline)
    long long list_sum = 0;       // typicality decoder only
    long long list_samples = 0;
    double i_u_y2 = 0.0;          // nominal I(U;Y2) of the code distributions
    double epsilon = 0.0;
    bool typicality = false;

    double pe1() const { return samples ? static_cast<double>(err1) / samples : 0.0; }
    double pe2() const { return samples ? static_cast<double>(err2) / samples : 0.0; }
    double pe() const { return samples ? static_cast<double>(err_joint) / samples : 0.0; }
    double pe2_solo() const { return samples ? static_cast<double>(err2_solo) / samples : 0.0; }
    double mean_list_size() const {
        return list_samples ? static_cast<double>(list_sum) / list_samples : 0.0;
    }
    // expected-list-size bound 1 + 2^{n(R2 - I(U;Y2) + 3 eps)}, before clipping
    double list_bound_raw() const {
        return 1.0 + std::exp2(n * (nominal_r2 - i_u_y2 + 3.0 * epsilon));
    }
    // the list cannot exceed the codebook
    double list_bound() const { return std::min(list_bound_raw(), static_cast<double>(m2)); }
};

// 95% Wilson interval for k successes out of n.
struct Wilson {
    double lo = 0.0, hi = 0.0;
};
inline Wilson wilson95(long long k, long long n) {
    if (n == 0) return {0.0, 0.0};
    const double z = 1.959963984540054;
    const double phat = static_cast<double>(k) / n;
    const double z2n = z * z / n;
    const double center = (phat + z2n / 2.0) / (1.0 + z2n);
    const double half =
        z * std::sqrt(phat * (1.0 - phat) / n + z2n / (4.0 * n)) / (1.0 + z2n);
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

// Inverse-CDF sampler of (y1,y2) given x; the per-input cumulative tables are
// shared across trials.
struct ChannelSampler {
    int n1 = 0, n2 = 0;
    std::vector<double> cdf;  // per x, cumulative over (y1,y2)

    explicit ChannelSampler(const BroadcastChannel& ch) : n1(ch.y1_size), n2(ch.y2_size) {
        cdf.resize(static_cast<std::size_t>(ch.x_size) * n1 * n2);
        for (int x = 0; x < ch.x_size; ++x) {
            double acc = 0.0;
            for (int a = 0; a < n1; ++a)
                for (int b = 0; b < n2; ++b) {
                    acc += ch.at(x, a, b);
                    cdf[(static_cast<std::size_t>(x) * n1 + a) * n2 + b] = acc;
                }
        }
    }

    std::pair<int, int> operator()(int x, Rng& rng) const {
        const double u = rng.uniform();
        const double* row = &cdf[static_cast<std::size_t>(x) * n1 * n2];
        const int cells = n1 * n2;
        int cell = 0;
        while (cell < cells - 1 && u >= row[cell]) ++cell;
        return {cell / n2, cell % n2};
    }
};

namespace detail {

inline int sample_pmf(Rng& rng, std::span<const double> pmf) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        acc += pmf[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(pmf.size()) - 1;
}

// ceil(2^{n r}) with an exactness snap so integral powers stay exact
inline int codebook_size(int n, double r, bool* ceiled) {
    const double v = std::exp2(static_cast<double>(n) * r);
    const double rounded = std::round(v);
    if (std::abs(v - rounded) <= 1e-9 * std::max(1.0, v)) {
        return static_cast<int>(rounded);
    }
    if (ceiled) *ceiled = true;
    return static_cast<int>(std::ceil(v));
}

inline double safe_log2(double p) { return p > 0.0 ? std::log2(p) : -1e300; }

}  // namespace detail

// Draw the superposition codebooks and the random binning. Codewords are
// i.i.d. from p(u) and p(x|u); bins are uniform over [0, m_r).
inline DfCode generate_code(const Pmf& p_u, const Kernel& p_x_given_u, int n, double r1,
                            double r2, double c12, std::uint64_t seed,
                            std::size_t codeword_cap = std::size_t{1} << 20) {
    if (n < 1) throw validation_error("generate_code: blocklength must be >= 1");
    if (r1 < 0.0 || r2 < 0.0 || c12 < 0.0)
        throw validation_error("generate_code: rates must be nonnegative");
    if (p_x_given_u.in != p_u.size())
        throw validation_error("generate_code: p(x|u) input does not match p(u)");

    DfCode code;
    code.n = n;
    code.r1 = r1;
    code.r2 = r2;
    code.c12 = c12;
    code.seed = seed;
    code.p_u = p_u;
    code.p_x_given_u = p_x_given_u;
    code.u_size = p_u.size();
    code.x_size = p_x_given_u.out;
    code.m1 = detail::codebook_size(n, r1, &code.size_ceiled);
    code.m2 = detail::codebook_size(n, r2, &code.size_ceiled);
    code.m_r = detail::codebook_size(n, c12, &code.size_ceiled);
    code.realized_r1 = std::log2(static_cast<double>(code.m1)) / n;
    code.realized_r2 = std::log2(static_cast<double>(code.m2)) / n;

    const std::size_t u_words = static_cast<std::size_t>(code.m_r) * code.m2;
    const std::size_t x_words = u_words * static_cast<std::size_t>(code.m1);
    if (u_words + x_words > codeword_cap)
        throw infeasible_error("generate_code: codebook of " + std::to_string(u_words + x_words) +
                               " codewords exceeds cap " + std::to_string(codeword_cap));

    Rng rng(mix_seed(seed, 0xD5C0DEull));
    code.u_book.resize(u_words * static_cast<std::size_t>(n));
    code.x_book.resize(x_words * static_cast<std::size_t>(n));
    for (int s = 0; s < code.m_r; ++s)
        for (int w2 = 0; w2 < code.m2; ++w2) {
            int* u = &code.u_book[(static_cast<std::size_t>(s) * code.m2 + w2) *
                                  static_cast<std::size_t>(n)];
            for (int t = 0; t < n; ++t) u[t] = detail::sample_pmf(rng, std::span(p_u.p));
            for (int w1 = 0; w1 < code.m1; ++w1) {
                int* x = &code.x_book[((static_cast<std::size_t>(s) * code.m2 + w2) * code.m1 + w1) *
                                      static_cast<std::size_t>(n)];
                for (int t = 0; t < n; ++t)
                    x[t] = detail::sample_pmf(rng, p_x_given_u.row(u[t]));
            }
        }
    code.bins.resize(static_cast<std::size_t>(code.m2));
    for (int w2 = 0; w2 < code.m2; ++w2) code.bins[static_cast<std::size_t>(w2)] = rng.uniform_int(code.m_r);
    return code;
}

namespace detail {

// Precomputed per-run tables shared by all trials.
struct DfTables {
    int n1 = 0, n2 = 0, nu = 0, nx = 0;
    std::vector<double> l1;            // log2 p(y1|x), [x][y1]
    std::vector<double> l2u;           // log2 p(y2|u), [u][y2]
    // typicality tables for the triple (U,X,Y1) and the pair (U,Y2)
    std::vector<double> lu, lx, lux, luy1, lxy1, luxy1, ly1;
    std::vector<double> luy2, ly2;
    double h_u = 0, h_x = 0, h_ux = 0, h_uy1 = 0, h_xy1 = 0, h_uxy1 = 0, h_y1 = 0;
    double h_uy2 = 0, h_y2 = 0, h_u2 = 0;
    double i_u_y2 = 0;

    DfTables(const DfCode& code, const BroadcastChannel& ch) {
        n1 = ch.y1_size;
        n2 = ch.y2_size;
        nu = code.u_size;
        nx = code.x_size;

        const Kernel k1 = ch.y1_kernel(), k2 = ch.y2_kernel();
        l1.resize(static_cast<std::size_t>(nx) * n1);
        for (int x = 0; x < nx; ++x)
            for (int a = 0; a < n1; ++a)
                l1[static_cast<std::size_t>(x) * n1 + a] = safe_log2(k1.at(x, a));

        // p(y2|u) = sum_x p(x|u) p(y2|x)
        std::vector<double> y2_given_u(static_cast<std::size_t>(nu) * n2, 0.0);
        for (int u = 0; u < nu; ++u)
            for (int x = 0; x < nx; ++x)
                for (int b = 0; b < n2; ++b)
                    y2_given_u[static_cast<std::size_t>(u) * n2 + b] +=
                        code.p_x_given_u.at(u, x) * k2.at(x, b);
        l2u.resize(y2_given_u.size());
        for (std::size_t i = 0; i < y2_given_u.size(); ++i) l2u[i] = safe_log2(y2_given_u[i]);

        // joint laws for typicality
        std::vector<double> p_ux(static_cast<std::size_t>(nu) * nx);
        for (int u = 0; u < nu; ++u)
            for (int x = 0; x < nx; ++x)
                p_ux[static_cast<std::size_t>(u) * nx + x] =
                    code.p_u[u] * code.p_x_given_u.at(u, x);
        std::vector<double> p_uxy1(static_cast<std::size_t>(nu) * nx * n1, 0.0);
        std::vector<double> p_uy1(static_cast<std::size_t>(nu) * n1, 0.0);
        std::vector<double> p_xy1(static_cast<std::size_t>(nx) * n1, 0.0);
        std::vector<double> p_y1(static_cast<std::size_t>(n1), 0.0);
        std::vector<double> p_x(static_cast<std::size_t>(nx), 0.0);
        for (int u = 0; u < nu; ++u)
            for (int x = 0; x < nx; ++x) {
                p_x[static_cast<std::size_t>(x)] += p_ux[static_cast<std::size_t>(u) * nx + x];
                for (int a = 0; a < n1; ++a) {
                    const double v = p_ux[static_cast<std::size_t>(u) * nx + x] * k1.at(x, a);
                    p_uxy1[(static_cast<std::size_t>(u) * nx + x) * n1 + a] = v;
                    p_uy1[static_cast<std::size_t>(u) * n1 + a] += v;
                    p_xy1[static_cast<std::size_t>(x) * n1 + a] += v;
                    p_y1[static_cast<std::size_t>(a)] += v;
                }
            }
        std::vector<double> p_uy2(static_cast<std::size_t>(nu) * n2, 0.0);
        std::vector<double> p_y2(static_cast<std::size_t>(n2), 0.0);
        for (int u = 0; u < nu; ++u)
            for (int b = 0; b < n2; ++b) {
                const double v = code.p_u[u] * y2_given_u[static_cast<std::size_t>(u) * n2 + b];
                p_uy2[static_cast<std::size_t>(u) * n2 + b] = v;
                p_y2[static_cast<std::size_t>(b)] += v;
            }

        auto log_table = [](const std::vector<double>& p) {
            std::vector<double> l(p.size());
            for (std::size_t i = 0; i < p.size(); ++i) l[i] = safe_log2(p[i]);
            return l;
        };
        auto entropy_of = [](const std::vector<double>& p) {
            double h = 0.0;
            for (double v : p) h -= plog2p(v);
            return h;
        };
        lu = log_table(code.p_u.p);
        lx = log_table(p_x);
        lux = log_table(p_ux);
        luy1 = log_table(p_uy1);
        lxy1 = log_table(p_xy1);
        luxy1 = log_table(p_uxy1);
        ly1 = log_table(p_y1);
        luy2 = log_table(p_uy2);
        ly2 = log_table(p_y2);
        h_u = entropy_of(code.p_u.p);
        h_x = entropy_of(p_x);
        h_ux = entropy_of(p_ux);
        h_uy1 = entropy_of(p_uy1);
        h_xy1 = entropy_of(p_xy1);
        h_uxy1 = entropy_of(p_uxy1);
        h_y1 = entropy_of(p_y1);
        h_uy2 = entropy_of(p_uy2);
        h_y2 = entropy_of(p_y2);
        h_u2 = h_u;

        i_u_y2 = h_u + h_y2 - h_uy2;
    }
};

}  // namespace detail

// Simulate `trials` independent transmissions of B blocks each over one fixed
// code. Message pairs are uniform; errors are counted over the B-1
// message-carrying blocks per trial.
inline DfSimReport run_df(const DfCode& code, const BroadcastChannel& ch, const SimConfig& cfg) {
    if (cfg.blocks < 2) throw validation_error("run_df: need at least 2 blocks");
    if (cfg.trials < 1) throw validation_error("run_df: need at least 1 trial");
    if (cfg.decoder == SimConfig::Decoder::typicality && !(cfg.epsilon > 0.0))
        throw validation_error("run_df: typicality decoder needs epsilon > 0");
    if (code.x_size != ch.x_size)
        throw validation_error("run_df: code input alphabet does not match channel");
    {
        const auto check = is_physically_degraded(ch, 1e-9);
        if (!check.degraded)
            throw validation_error("run_df: channel is not physically degraded (residual " +
                                   std::to_string(check.residual) + ")");
    }

    const detail::DfTables tab(code, ch);
    const ChannelSampler sampler(ch);
    const int n = code.n, B = cfg.blocks;
    const bool typ = cfg.decoder == SimConfig::Decoder::typicality;
    const double eps = cfg.epsilon;

    DfSimReport rep;
    rep.n = n;
    rep.nominal_r1 = code.r1;
    rep.nominal_r2 = code.r2;
    rep.realized_r1 = code.realized_r1;
    rep.realized_r2 = code.realized_r2;
    rep.m1 = code.m1;
    rep.m2 = code.m2;
    rep.m_r = code.m_r;
    rep.i_u_y2 = tab.i_u_y2;
    rep.epsilon = eps;
    rep.typicality = typ;
    rep.samples = static_cast<long long>(cfg.trials) * (B - 1);

    // per-trial tallies merged by index; all integer so the merge order is
    // irrelevant
    struct Tally {
        long long e1 = 0, e2 = 0, ej = 0, e2solo = 0, lsum = 0, lcnt = 0;
    };
    std::vector<Tally> tallies(static_cast<std::size_t>(cfg.trials));

    parallel_for(cfg.trials, [&](int trial) {
        Rng rng(mix_seed(cfg.seed, 0x7121A15ull, static_cast<std::uint64_t>(trial)));
        Tally& tl = tallies[static_cast<std::size_t>(trial)];

        std::vector<int> w1(static_cast<std::size_t>(B) + 1, 0), w2(static_cast<std::size_t>(B) + 1, 0);
        for (int i = 1; i <= B - 1; ++i) {
            w1[static_cast<std::size_t>(i)] = rng.uniform_int(code.m1);
            w2[static_cast<std::size_t>(i)] = rng.uniform_int(code.m2);
        }
        // w2[0] and block-B messages are fixed dummies known to all parties

        std::vector<int> y1(static_cast<std::size_t>(n)), y2prev(static_cast<std::size_t>(n)),
            y2cur(static_cast<std::size_t>(n));
        std::vector<int> est1_w1(static_cast<std::size_t>(B) + 1, 0),
            est1_w2(static_cast<std::size_t>(B) + 1, 0);
        std::vector<bool> fail1(static_cast<std::size_t>(B) + 1, false);
        // relayed[i] = bin index receiver 1 sends at block i = its believed
        // codebook index for block i
        std::vector<int> relayed(static_cast<std::size_t>(B) + 2, code.bins[0]);

        for (int i = 1; i <= B; ++i) {
            const int s_true = code.bins[static_cast<std::size_t>(w2[static_cast<std::size_t>(i - 1)])];
            const int* x = code.x_word(s_true, w2[static_cast<std::size_t>(i)], w1[static_cast<std::size_t>(i)]);
            for (int t = 0; t < n; ++t) {
                const auto [a, b] = sampler(x[t], rng);
                y1[static_cast<std::size_t>(t)] = a;
                y2cur[static_cast<std::size_t>(t)] = b;
            }

            // ---- receiver 1: joint decode of (w1,w2) at message blocks
            if (i <= B - 1) {
                const int s_blv = relayed[static_cast<std::size_t>(i)];
                int best_w1 = 0, best_w2 = 0;
                bool no_candidate = false, ambiguous = false;
                if (!typ) {
                    double best = -1e308;
                    for (int cw2 = 0; cw2 < code.m2; ++cw2)
                        for (int cw1 = 0; cw1 < code.m1; ++cw1) {
                            const int* cx = code.x_word(s_blv, cw2, cw1);
                            double sc = 0.0;
                            for (int t = 0; t < n; ++t)
                                sc += tab.l1[static_cast<std::size_t>(cx[t]) * tab.n1 +
                                             y1[static_cast<std::size_t>(t)]];
                            if (sc > best) {
                                best = sc;
                                best_w1 = cw1;
                                best_w2 = cw2;
                            }
                        }
                } else {
                    // weak joint typicality of (u, x, y1): every nonempty
                    // subset's sample entropy within eps of its entropy
                    double sy1 = 0.0;
                    for (int t = 0; t < n; ++t)
                        sy1 -= tab.ly1[static_cast<std::size_t>(y1[static_cast<std::size_t>(t)])];
                    const bool y1_ok = std::abs(sy1 / n - tab.h_y1) < eps;
                    int count = 0;
                    double best = -1e308;
                    double best_any = -1e308;
                    int best_any_w1 = 0, best_any_w2 = 0;
                    for (int cw2 = 0; cw2 < code.m2; ++cw2)
                        for (int cw1 = 0; cw1 < code.m1; ++cw1) {
                            const int* cx = code.x_word(s_blv, cw2, cw1);
                            double su = 0, sx = 0, sux = 0, suy = 0, sxy = 0, suxy = 0, sc = 0;
                            for (int t = 0; t < n; ++t) {
                                const int uu = code.u_at(s_blv, cw2, t);
                                const int xx = cx[t];
                                const int aa = y1[static_cast<std::size_t>(t)];
                                su -= tab.lu[static_cast<std::size_t>(uu)];
                                sx -= tab.lx[static_cast<std::size_t>(xx)];
                                sux -= tab.lux[static_cast<std::size_t>(uu) * tab.nx + xx];
                                suy -= tab.luy1[static_cast<std::size_t>(uu) * tab.n1 + aa];
                                sxy -= tab.lxy1[static_cast<std::size_t>(xx) * tab.n1 + aa];
                                suxy -= tab.luxy1[(static_cast<std::size_t>(uu) * tab.nx + xx) * tab.n1 + aa];
                                sc += tab.l1[static_cast<std::size_t>(xx) * tab.n1 + aa];
                            }
                            if (sc > best_any) {
                                best_any = sc;
                                best_any_w1 = cw1;
                                best_any_w2 = cw2;
                            }
                            const bool typical = y1_ok &&
                                                 std::abs(su / n - tab.h_u) < eps &&
                                                 std::abs(sx / n - tab.h_x) < eps &&
                                                 std::abs(sux / n - tab.h_ux) < eps &&
                                                 std::abs(suy / n - tab.h_uy1) < eps &&
                                                 std::abs(sxy / n - tab.h_xy1) < eps &&
                                                 std::abs(suxy / n - tab.h_uxy1) < eps;
                            if (!typical) continue;
                            ++count;
                            if (sc > best) {
                                best = sc;
                                best_w1 = cw1;
                                best_w2 = cw2;
                            }
                        }
                    if (count == 0) {
                        no_candidate = true;
                        best_w1 = best_any_w1;
                        best_w2 = best_any_w2;
                    }
                    ambiguous = count > 1;
                }
                est1_w1[static_cast<std::size_t>(i)] = best_w1;
                est1_w2[static_cast<std::size_t>(i)] = best_w2;
                fail1[static_cast<std::size_t>(i)] =
                    no_candidate || (cfg.strict_ties && ambiguous);
                relayed[static_cast<std::size_t>(i + 1)] =
                    code.bins[static_cast<std::size_t>(best_w2)];
            }

            // ---- receiver 2: resolve w2[i-1] from y2(i-1), the believed
            // codebook index relayed[i-1], and the fresh bin index relayed[i]
            if (i >= 2) {
                const int msg = i - 1;
                const int s_list = relayed[static_cast<std::size_t>(msg)];
                const int s_bin = relayed[static_cast<std::size_t>(i)];
                int best = -1;
                bool no_candidate = false, ambiguous = false;
                if (!typ) {
                    double best_sc = -1e308;
                    for (int cw2 = 0; cw2 < code.m2; ++cw2) {
                        if (code.bins[static_cast<std::size_t>(cw2)] != s_bin) continue;
                        double sc = 0.0;
                        for (int t = 0; t < n; ++t)
                            sc += tab.l2u[static_cast<std::size_t>(code.u_at(s_list, cw2, t)) * tab.n2 +
                                          y2prev[static_cast<std::size_t>(t)]];
                        if (sc > best_sc) {
                            best_sc = sc;
                            best = cw2;
                        }
                    }
                    if (best < 0) {
                        no_candidate = true;
                        best = 0;
                    }
                } else {
                    double sy2 = 0.0;
                    for (int t = 0; t < n; ++t)
                        sy2 -= tab.ly2[static_cast<std::size_t>(y2prev[static_cast<std::size_t>(t)])];
                    const bool y2_ok = std::abs(sy2 / n - tab.h_y2) < eps;
                    int in_list_and_bin = 0;
                    long long list_size = 0;
                    double best_sc = -1e308, best_bin_sc = -1e308;
                    int best_bin_member = 0;
                    for (int cw2 = 0; cw2 < code.m2; ++cw2) {
                        double su = 0, suy = 0, sc = 0;
                        for (int t = 0; t < n; ++t) {
                            const int uu = code.u_at(s_list, cw2, t);
                            const int bb = y2prev[static_cast<std::size_t>(t)];
                            su -= tab.lu[static_cast<std::size_t>(uu)];
                            suy -= tab.luy2[static_cast<std::size_t>(uu) * tab.n2 + bb];
                            sc += tab.l2u[static_cast<std::size_t>(uu) * tab.n2 + bb];
                        }
                        const bool in_list = y2_ok && std::abs(su / n - tab.h_u) < eps &&
                                             std::abs(suy / n - tab.h_uy2) < eps;
                        if (in_list) ++list_size;
                        const bool in_bin = code.bins[static_cast<std::size_t>(cw2)] == s_bin;
                        if (in_bin && sc > best_bin_sc) {
                            best_bin_sc = sc;
                            best_bin_member = cw2;
                        }
                        if (in_list && in_bin) {
                            ++in_list_and_bin;
                            if (sc > best_sc) {
                                best_sc = sc;
                                best = cw2;
                            }
                        }
                    }
                    tl.lsum += list_size;
                    tl.lcnt += 1;
                    if (in_list_and_bin == 0) {
                        no_candidate = true;
                        best = best_bin_member;
                    }
                    ambiguous = in_list_and_bin > 1;
                }
                const bool err2 = (best != w2[static_cast<std::size_t>(msg)]) || no_candidate ||
                                  (cfg.strict_ties && ambiguous);

                // paired baseline: ML over the whole codebook from y2 alone
                int solo = 0;
                double solo_sc = -1e308;
                for (int cw2 = 0; cw2 < code.m2; ++cw2) {
                    double sc = 0.0;
                    for (int t = 0; t < n; ++t)
                        sc += tab.l2u[static_cast<std::size_t>(code.u_at(s_list, cw2, t)) * tab.n2 +
                                      y2prev[static_cast<std::size_t>(t)]];
                    if (sc > solo_sc) {
                        solo_sc = sc;
                        solo = cw2;
                    }
                }

                const bool err1 = fail1[static_cast<std::size_t>(msg)] ||
                                  est1_w1[static_cast<std::size_t>(msg)] !=
                                      w1[static_cast<std::size_t>(msg)];
                tl.e1 += err1 ? 1 : 0;
                tl.e2 += err2 ? 1 : 0;
                tl.ej += (err1 || err2) ? 1 : 0;
                tl.e2solo += (solo != w2[static_cast<std::size_t>(msg)]) ? 1 : 0;
            }
            std::swap(y2prev, y2cur);
        }
    });

    for (const auto& tl : tallies) {
        rep.err1 += tl.e1;
        rep.err2 += tl.e2;
        rep.err_joint += tl.ej;
        rep.err2_solo += tl.e2solo;
        rep.list_sum += tl.lsum;
        rep.list_samples += tl.lcnt;
    }
    return rep;
}

struct ListDiagnostic {
    double mean_list_size = 0.0;
    double bound = 0.0;  // clipped at the codebook size
    double ratio = 0.0;
};

// Empirical mean list size at receiver 2 against the analytic
// expected-list-size bound; the bound is a typicality statement, so the
// typicality decoder is required.
inline ListDiagnostic list_size_diagnostic(const DfCode& code, const BroadcastChannel& ch,
                                           const SimConfig& cfg) {
    if (cfg.decoder != SimConfig::Decoder::typicality)
        throw validation_error("list_size_diagnostic: typicality decoder required");
    const auto rep = run_df(code, ch, cfg);
    ListDiagnostic d;
    d.mean_list_size = rep.mean_list_size();
    d.bound = rep.list_bound();
    d.ratio = d.bound > 0.0 ? d.mean_list_size / d.bound : 0.0;
    return d;
}

}  // namespace coopcast
