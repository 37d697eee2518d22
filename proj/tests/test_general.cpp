#include <catch2/catch_amalgamated.hpp>

#include "coopcast/general.hpp"
#include "test_support.hpp"

using namespace coopcast;
using namespace testsupport;
using Catch::Approx;

namespace {

JointPmf random_uvx(std::uint64_t seed, int cu, int cv, int nx) {
    TestRng rng(seed);
    return make_joint({"u", "v", "x"}, {cu, cv, nx},
                      random_mass(rng, static_cast<std::size_t>(cu) * cv * nx));
}

Kernel random_kernel(std::uint64_t seed, int in, int out) {
    TestRng rng(seed);
    std::vector<double> rows;
    for (int i = 0; i < in; ++i) {
        auto r = random_mass(rng, static_cast<std::size_t>(out));
        rows.insert(rows.end(), r.begin(), r.end());
    }
    return Kernel(in, out, rows);
}

// diag coupling: U = V = X with the given input law
JointPmf diag_uvx(const Pmf& px) {
    const int n = px.size();
    std::vector<double> t(static_cast<std::size_t>(n) * n * n, 0.0);
    for (int x = 0; x < n; ++x)
        t[(static_cast<std::size_t>(x) * n + x) * n + x] = px[x];
    return make_joint({"u", "v", "x"}, {n, n, n}, std::move(t));
}

}  // namespace

TEST_CASE("constant descriptions recover the Marton point", "[general]") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto ch = random_channel(seed, 2, 2, 2, 0.13, 0.21);
        MartonWitness w{random_uvx(seed * 3 + 1, 2, 2, 2), Kernel::constant(2, 1, 0),
                        Kernel::constant(2, 1, 0)};
        auto pt = marton_coop_point(w, ch);

        // oracle: Marton formulas on the same p(u,v,x)
        auto j = compose_chain({joint_source_factor({"u", "v", "x"}, w.p_uvx),
                                channel_factor("x", "y1", "y2", ch)});
        CHECK(pt.r_u == Approx(oracle_mi(j, {"u"}, {"y1"})).margin(1e-12));
        CHECK(pt.r_v == Approx(oracle_mi(j, {"v"}, {"y2"})).margin(1e-12));
        CHECK(pt.i_uv == Approx(oracle_mi(j, {"u"}, {"v"})).margin(1e-12));
        CHECK(pt.slack12 == Approx(0.13).margin(1e-12));
        CHECK(pt.slack21 == Approx(0.21).margin(1e-12));
        CHECK(pt.feasible);
    }
}

TEST_CASE("identity description: slack12 = c12 - H(Y1|Y2)", "[general]") {
    auto ch = make_bsbc_cascade(0.1, 0.1);
    MartonWitness w{random_uvx(9, 2, 2, 2), Kernel::constant(2, 1, 0), Kernel::identity(2)};

    auto j = compose_chain({joint_source_factor({"u", "v", "x"}, w.p_uvx),
                            channel_factor("x", "y1", "y2", ch)});
    const double h_y1_given_y2 =
        oracle_entropy(j, {"y1", "y2"}) - oracle_entropy(j, {"y2"});

    auto low = marton_coop_point(w, ch.with_links(h_y1_given_y2 - 0.01, 0.0));
    CHECK(low.slack12 == Approx(-0.01).margin(1e-9));
    CHECK_FALSE(low.feasible);

    auto high = marton_coop_point(w, ch.with_links(h_y1_given_y2 + 0.01, 0.0));
    CHECK(high.slack12 == Approx(0.01).margin(1e-9));
    CHECK(high.feasible);
    CHECK(high.r_v == Approx(oracle_mi(j, {"v"}, {"y2", "y1"})).margin(1e-12));
}

TEST_CASE("degenerate full-overlap witness", "[general]") {
    // U = V = X uniform on the cascade: individual caps fine, sum cap negative
    auto ch = make_bsbc_cascade(0.1, 0.1, 0.3, 0.3);
    MartonWitness w{diag_uvx(Pmf::uniform(2)), Kernel::constant(2, 1, 0),
                    Kernel::constant(2, 1, 0)};
    auto pt = marton_coop_point(w, ch);
    CHECK(pt.r_u == Approx(1 - h2(0.1)).margin(1e-9));
    CHECK(pt.r_v == Approx(1 - h2(0.18)).margin(1e-9));
    CHECK(pt.i_uv == Approx(1.0).margin(1e-12));
    const double sum_cap = pt.r_u + pt.r_v - pt.i_uv;
    CHECK(sum_cap == Approx((1 - h2(0.1)) + (1 - h2(0.18)) - 1.0).margin(1e-9));
    CHECK(sum_cap < 0.0);
    // an empty witness polytope contributes nothing to any sweep direction
    CHECK(polytope_best(0.3, pt.r_u, pt.r_v, sum_cap).r1 == 0.0);
}

TEST_CASE("rates invariant to link capacities, only feasibility moves", "[general]") {
    auto ch = random_channel(77, 2, 2, 2, 0.0, 0.0);
    MartonWitness w{random_uvx(78, 2, 2, 2), random_kernel(79, 2, 3), random_kernel(80, 2, 3)};
    auto a = marton_coop_point(w, ch);
    auto b = marton_coop_point(w, ch.with_links(0.4, 0.7));
    CHECK(a.r_u == b.r_u);
    CHECK(a.r_v == b.r_v);
    CHECK(a.i_uv == b.i_uv);
    CHECK(b.slack12 == Approx(a.slack12 + 0.4).margin(1e-12));
    CHECK(b.slack21 == Approx(a.slack21 + 0.7).margin(1e-12));
}

TEST_CASE("sum cap equals individual sum iff U and V independent", "[general]") {
    auto ch = random_channel(5, 2, 2, 2, 1.0, 1.0);
    // independent U,V: p(u,v,x) = p(u)p(v) with x = u xor v
    std::vector<double> t(8, 0.0);
    const double pu = 0.3, pv = 0.6;
    for (int u = 0; u < 2; ++u)
        for (int v = 0; v < 2; ++v) {
            const double m = (u ? pu : 1 - pu) * (v ? pv : 1 - pv);
            t[(static_cast<std::size_t>(u) * 2 + v) * 2 + (u ^ v)] = m;
        }
    MartonWitness w{make_joint({"u", "v", "x"}, {2, 2, 2}, std::move(t)),
                    Kernel::constant(2, 1, 0), Kernel::constant(2, 1, 0)};
    auto pt = marton_coop_point(w, ch);
    CHECK(pt.i_uv == Approx(0.0).margin(1e-12));

    auto corr = marton_coop_point(
        MartonWitness{diag_uvx(Pmf::uniform(2)), Kernel::constant(2, 1, 0),
                      Kernel::constant(2, 1, 0)},
        ch);
    CHECK(corr.i_uv > 1e-6);
}

TEST_CASE("partial cooperation bound", "[general]") {
    auto ch = make_bsbc_cascade(0.1, 0.1, 0.0, 0.8);
    // constant description: bound collapses to I(U;Y1) + c21
    {
        MartonWitness w{random_uvx(31, 2, 2, 2), Kernel::constant(2, 1, 0),
                        Kernel::constant(2, 1, 0)};
        auto j = compose_chain({joint_source_factor({"u", "v", "x"}, w.p_uvx),
                                channel_factor("x", "y1", "y2", ch)});
        CHECK(partial_coop_r1_bound(w, ch) ==
              Approx(oracle_mi(j, {"u"}, {"y1"}) + 0.8).margin(1e-12));
    }
    // identity description Uhat = Y2: bound = I(U;Y1) + c21 - H(Y2|U,Y1)
    {
        MartonWitness w{diag_uvx(Pmf::uniform(2)), Kernel::identity(2),
                        Kernel::constant(2, 1, 0)};
        auto j = detail::marton_joint(w, ch);
        const double h_y2_uy1 =
            oracle_entropy(j, {"u", "y1", "y2"}) - oracle_entropy(j, {"u", "y1"});
        const double bound = partial_coop_r1_bound(w, ch);
        CHECK(bound ==
              Approx(oracle_mi(j, {"u"}, {"y1"}) + 0.8 - h_y2_uy1).margin(1e-12));

        // when c21 covers I(Uhat;Y2)-I(Uhat;Y1), the bound dominates R(U)
        auto pt = marton_coop_point(w, ch);
        REQUIRE(pt.slack21 >= 0.0);
        CHECK(bound >= pt.r_u - 1e-9);
    }
}

TEST_CASE("sweep evaluator matches compose_chain path", "[general]") {
    for (std::uint64_t seed = 41; seed <= 46; ++seed) {
        auto ch = random_channel(seed, 2, 2, 2, 0.15, 0.25);
        MartonWitness w{random_uvx(seed + 100, 2, 2, 2), random_kernel(seed + 200, 2, 3),
                        random_kernel(seed + 300, 2, 3)};
        auto slow = marton_coop_point(w, ch);
        detail::MartonEvaluator fast(ch, 2, 2, 3, 3);
        auto quick = fast.point(w.p_uvx.t, w.uhat_given_y2.p, w.vhat_given_y1.p);
        CHECK(quick.r_u == Approx(slow.r_u).margin(1e-12));
        CHECK(quick.r_v == Approx(slow.r_v).margin(1e-12));
        CHECK(quick.i_uv == Approx(slow.i_uv).margin(1e-12));
        CHECK(quick.slack12 == Approx(slow.slack12).margin(1e-12));
        CHECK(quick.slack21 == Approx(slow.slack21).margin(1e-12));
        CHECK(quick.feasible == slow.feasible);
    }
}

TEST_CASE("cutset bound basics", "[general]") {
    OptBudget budget;
    budget.lambda_count = 9;
    budget.restarts = 4;

    // degraded cascade, no links: the R1 corner is the BSC capacity
    auto f = cutset_bound(make_bsbc_cascade(0.1, 0.2), budget);
    CHECK(f.max_r1() == Approx(1 - h2(0.1)).margin(1e-6));

    // noiseless: R1+R2 <= log2 |X|
    std::vector<double> w(8, 0.0);
    for (int x = 0; x < 2; ++x) w[(x * 2 + x) * 2 + x] = 1.0;
    BroadcastChannel noiseless(2, 2, 2, std::move(w), 0.0, 0.0);
    auto g = cutset_bound(noiseless, budget);
    CHECK(g.max_sum() == Approx(1.0).margin(1e-9));
}

TEST_CASE("regions nest: marton within coop within cutset", "[general]") {
    OptBudget budget;
    budget.lambda_count = 9;
    budget.restarts = 4;

    for (std::uint64_t seed : {101ull, 102ull, 103ull}) {
        auto ch = random_channel(seed, 2, 2, 2, 0.15, 0.2);
        auto base = marton_nocoop_region(ch, 2, 2, budget);
        auto coop = marton_coop_region(ch, 2, 2, budget);
        auto outer = cutset_bound(ch, budget);
        for (const auto& pt : base.points) {
            const double lam = pt.lambda;
            CHECK(coop.support(lam) >= base.support(lam) - 1e-6);
            CHECK(outer.support(lam) >= coop.support(lam) - 1e-9);
            CHECK(outer.support(lam) >= base.support(lam) - 1e-9);
        }
    }
}

TEST_CASE("nocoop sweep beats the resolution-9 grid oracle", "[general]") {
    OptBudget budget;
    budget.lambda_count = 5;
    budget.restarts = 4;

    for (std::uint64_t seed : {7ull, 8ull, 9ull}) {
        auto ch = random_channel(seed, 2, 2, 2, 0.0, 0.0);
        auto region = marton_nocoop_region(ch, 2, 2, budget);
        detail::MartonEvaluator eval(ch, 2, 2, 1, 1);
        const std::vector<double> k1 = {1.0, 1.0};  // constant-description kernels
        for (const auto& pt : region.points) {
            const double lam = pt.lambda;
            double oracle = 0.0;
            for_each_composition(8, 8, [&](const std::vector<double>& p_uvx) {
                auto q = eval.point(p_uvx, k1, k1);
                auto rp = polytope_best(lam, q.r_u, q.r_v, q.r_u + q.r_v - q.i_uv);
                oracle = std::max(oracle, lam * rp.r1 + (1 - lam) * rp.r2);
            });
            CHECK(region.support(lam) >= oracle - 1e-6);
        }
    }
}

TEST_CASE("symmetric channel gives a symmetric baseline frontier", "[general]") {
    OptBudget budget;
    budget.lambda_count = 9;
    budget.restarts = 6;
    auto f = marton_nocoop_region(make_bsbc_pair(0.1), 2, 2, budget);
    for (const auto& pt : f.points)
        CHECK(f.support(pt.lambda) == Approx(f.support(1.0 - pt.lambda)).margin(1e-6));
}

TEST_CASE("witness validation", "[general]") {
    auto ch = make_bsbc_cascade(0.1, 0.1);
    // |Uhat| > |Y2|+1
    CHECK_THROWS_AS(
        marton_coop_point(MartonWitness{random_uvx(1, 2, 2, 2), random_kernel(2, 2, 4),
                                        Kernel::constant(2, 1, 0)},
                          ch),
        validation_error);
    // wrong X alphabet
    CHECK_THROWS_AS(
        marton_coop_point(MartonWitness{random_uvx(1, 2, 2, 3), Kernel::constant(2, 1, 0),
                                        Kernel::constant(2, 1, 0)},
                          ch),
        validation_error);
    CHECK_THROWS_AS(marton_coop_region(ch, 0, 2, OptBudget{}), validation_error);
}
