#include <catch2/catch_amalgamated.hpp>

#include "coopcast/prob.hpp"
#include "test_support.hpp"

using namespace coopcast;
using namespace testsupport;
using Catch::Approx;

static JointPmf uniform_pair() {
    return make_joint({"A", "B"}, {2, 2}, {0.25, 0.25, 0.25, 0.25});
}

TEST_CASE("binary entropy", "[prob]") {
    CHECK(binary_entropy(0.5) == 1.0);
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(binary_entropy(0.18) == Approx(h2(0.18)).margin(1e-15));
    CHECK(binary_entropy(0.18) == Approx(0.6800770457282798).margin(1e-12));
    CHECK_THROWS_AS(binary_entropy(-0.1), validation_error);
    CHECK_THROWS_AS(binary_entropy(1.1), validation_error);
}

TEST_CASE("entropy basics", "[prob]") {
    auto j = uniform_pair();
    CHECK(entropy(j, {"A"}) == Approx(1.0).margin(1e-15));
    CHECK(entropy(j, {"A", "B"}) == Approx(2.0).margin(1e-15));

    auto point = make_joint({"Z"}, {3}, {0.0, 1.0, 0.0});
    CHECK(entropy(point, {"Z"}) == 0.0);

    auto bern = make_joint({"B"}, {2}, {0.9, 0.1});
    CHECK(entropy(bern, {"B"}) == Approx(h2(0.1)).margin(1e-15));
    CHECK(entropy(bern, {"B"}) == Approx(0.4689955935892812).margin(1e-12));

    CHECK_THROWS_AS(entropy(j, {"nope"}), validation_error);
}

TEST_CASE("mutual information basics", "[prob]") {
    auto indep = uniform_pair();
    CHECK(mutual_information(indep, {"A"}, {"B"}) == Approx(0.0).margin(1e-15));

    auto copy = make_joint({"A", "B"}, {2, 2}, {0.5, 0.0, 0.0, 0.5});
    CHECK(mutual_information(copy, {"A"}, {"B"}) == Approx(1.0).margin(1e-15));

    // BSC(0.1) with uniform input: I(X;Y) = 1 - h(0.1)
    auto bsc = compose_chain({source_factor("X", Pmf::uniform(2)),
                              kernel_factor("X", "Y", Kernel::bsc(0.1))});
    CHECK(mutual_information(bsc, {"X"}, {"Y"}) == Approx(1.0 - h2(0.1)).margin(1e-12));

    CHECK_THROWS_AS(mutual_information(copy, {"A"}, {"A"}), validation_error);
    CHECK_THROWS_AS(mutual_information(copy, {"A"}, {"nope"}), validation_error);
    CHECK_THROWS_AS(mutual_information(copy, {"A"}, {"B"}, {"B"}), validation_error);
}

TEST_CASE("pmf and kernel validation", "[prob]") {
    CHECK_THROWS_AS(Pmf({0.5, 0.6}), validation_error);
    CHECK_THROWS_AS(Pmf({-0.1, 1.1}), validation_error);
    CHECK_THROWS_AS(Pmf({0.5, 0.499999999}), validation_error);  // off by 1e-9 > tol
    CHECK_NOTHROW(Pmf({0.5, 0.5}));
    CHECK_THROWS_AS(Kernel(2, 2, {1.0, 0.0, 0.5, 0.6}), validation_error);
    CHECK_THROWS_AS(make_joint({"A"}, {2}, {0.6, 0.6}), validation_error);
    CHECK_THROWS_AS(make_joint({"A", "A"}, {2, 2}, {0.25, 0.25, 0.25, 0.25}),
                    validation_error);
}

TEST_CASE("compose_chain basics", "[prob]") {
    auto ch = make_bsbc_cascade(0.1, 0.1);
    auto j = compose_chain({source_factor("U", Pmf::uniform(2)),
                            kernel_factor("U", "X", Kernel::bsc(0.2)),
                            channel_factor("X", "Y1", "Y2", ch)});
    REQUIRE(j.vars == std::vector<std::string>({"U", "X", "Y1", "Y2"}));
    double mass = 0.0;
    for (double v : j.t) mass += v;
    CHECK(mass == Approx(1.0).margin(1e-14));

    // 0.2*0.1 = 0.26 cascade: I(U;Y1) = 1 - h(0.26)
    CHECK(mutual_information(j, {"U"}, {"Y1"}) ==
          Approx(1.0 - h2(star(0.2, 0.1))).margin(1e-12));
    // and U -> Y2 sees 0.2*(0.1*0.1) = 0.2*0.18 = 0.308
    CHECK(mutual_information(j, {"U"}, {"Y2"}) ==
          Approx(1.0 - h2(star(0.2, star(0.1, 0.1)))).margin(1e-12));

    // identity p(x|u) forces U = X surely
    auto jid = compose_chain({source_factor("U", Pmf::uniform(2)),
                              kernel_factor("U", "X", Kernel::identity(2)),
                              channel_factor("X", "Y1", "Y2", ch)});
    auto ux = marginalize(jid, {"U", "X"});
    CHECK(ux.t[0 * 2 + 1] == 0.0);
    CHECK(ux.t[1 * 2 + 0] == 0.0);
    CHECK(mutual_information(jid, {"U"}, {"X"}) == Approx(1.0).margin(1e-12));

    // dangling conditioning variable
    CHECK_THROWS_AS(compose_chain({source_factor("U", Pmf::uniform(2)),
                                   kernel_factor("W", "X", Kernel::bsc(0.2))}),
                    validation_error);
    // duplicate production
    CHECK_THROWS_AS(compose_chain({source_factor("U", Pmf::uniform(2)),
                                   kernel_factor("U", "U", Kernel::bsc(0.2))}),
                    validation_error);
}

TEST_CASE("compose then marginalize recovers factors", "[prob]") {
    for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
        TestRng rng(seed);
        Pmf pu(random_mass(rng, 3));
        std::vector<double> rows;
        for (int i = 0; i < 3; ++i) {
            auto r = random_mass(rng, 2);
            rows.insert(rows.end(), r.begin(), r.end());
        }
        Kernel kxu(3, 2, rows);
        auto ch = random_channel(seed * 77 + 1, 2, 2, 3, 0.0, 0.0);
        auto j = compose_chain({source_factor("U", pu), kernel_factor("U", "X", kxu),
                                channel_factor("X", "Y1", "Y2", ch)});

        auto mu = marginalize(j, {"U"});
        for (int u = 0; u < 3; ++u) CHECK(mu.t[u] == Approx(pu[u]).margin(1e-12));

        auto mux = marginalize(j, {"U", "X"});
        for (int u = 0; u < 3; ++u)
            for (int x = 0; x < 2; ++x)
                CHECK(mux.t[u * 2 + x] == Approx(pu[u] * kxu.at(u, x)).margin(1e-12));

        auto mxy = marginalize(j, {"X", "Y1", "Y2"});
        auto mx = marginalize(j, {"X"});
        for (int x = 0; x < 2; ++x)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 3; ++b)
                    CHECK(mxy.t[(x * 2 + a) * 3 + b] ==
                          Approx(mx.t[x] * ch.at(x, a, b)).margin(1e-12));
    }
}

TEST_CASE("marginalize basics", "[prob]") {
    auto j = random_joint(5, {2, 3, 2});
    auto same = marginalize(j, {"v0", "v1", "v2"});
    for (std::size_t i = 0; i < j.t.size(); ++i) CHECK(same.t[i] == j.t[i]);

    // product pmf: keeping one factor returns that factor
    auto prod = compose_chain({source_factor("A", Pmf({0.3, 0.7})),
                               source_factor("B", Pmf({0.25, 0.25, 0.5}))});
    auto ma = marginalize(prod, {"A"});
    CHECK(ma.t[0] == Approx(0.3).margin(1e-15));
    CHECK(ma.t[1] == Approx(0.7).margin(1e-15));

    // BSBC construction is symmetric: p(y1) is uniform
    auto ch = make_bsbc_cascade(0.1, 0.1);
    auto jj = compose_chain({source_factor("U", Pmf::uniform(2)),
                             kernel_factor("U", "X", Kernel::bsc(0.2)),
                             channel_factor("X", "Y1", "Y2", ch)});
    auto my1 = marginalize(jj, {"Y1"});
    CHECK(my1.t[0] == Approx(0.5).margin(1e-12));
    CHECK(my1.t[1] == Approx(0.5).margin(1e-12));

    CHECK_THROWS_AS(marginalize(j, {"bogus"}), validation_error);
}

TEST_CASE("entropy and MI match brute-force oracle", "[prob]") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        std::vector<int> sizes = {2 + static_cast<int>(seed % 3), 2, 2 + static_cast<int>(seed % 2)};
        auto j = random_joint(seed, sizes);
        CHECK(entropy(j, {"v0"}) == Approx(oracle_entropy(j, {"v0"})).margin(1e-12));
        CHECK(entropy(j, {"v0", "v2"}) ==
              Approx(oracle_entropy(j, {"v0", "v2"})).margin(1e-12));
        CHECK(mutual_information(j, {"v0"}, {"v1"}) ==
              Approx(oracle_mi(j, {"v0"}, {"v1"})).margin(1e-12));
        CHECK(mutual_information(j, {"v0"}, {"v1"}, {"v2"}) ==
              Approx(oracle_mi(j, {"v0"}, {"v1"}, {"v2"})).margin(1e-12));
    }
}

TEST_CASE("information inequalities on random joints", "[prob]") {
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        auto j = random_joint(seed, {2, 3, 2});
        double ha = entropy(j, {"v0"});
        double hb = entropy(j, {"v1"});
        double iab = mutual_information(j, {"v0"}, {"v1"});
        CHECK(iab >= 0.0);
        CHECK(iab <= std::min(ha, hb) + 1e-9);
        // chain rule: I(A;B,C) = I(A;B) + I(A;C|B)
        double lhs = mutual_information(j, {"v0"}, {"v1", "v2"});
        double rhs = mutual_information(j, {"v0"}, {"v1"}) +
                     mutual_information(j, {"v0"}, {"v2"}, {"v1"});
        CHECK(lhs == Approx(rhs).margin(1e-9));
    }
}

TEST_CASE("data processing on degraded chains", "[prob]") {
    for (std::uint64_t seed = 7; seed < 12; ++seed) {
        TestRng rng(seed);
        Pmf pu(random_mass(rng, 2));
        Kernel kxu(2, 2, [&] {
            std::vector<double> rows;
            for (int i = 0; i < 2; ++i) {
                auto r = random_mass(rng, 2);
                rows.insert(rows.end(), r.begin(), r.end());
            }
            return rows;
        }());
        auto ch = make_bsbc_cascade(0.05 + 0.3 * rng.uniform(), 0.05 + 0.3 * rng.uniform());
        auto j = compose_chain({source_factor("U", pu), kernel_factor("U", "X", kxu),
                                channel_factor("X", "Y1", "Y2", ch)});
        CHECK(mutual_information(j, {"U"}, {"Y2"}) <=
              mutual_information(j, {"U"}, {"Y1"}) + 1e-9);
    }
}

TEST_CASE("physical degradedness detection", "[prob]") {
    // constructed cascade: fitted kernel recovers BSC(p2)
    auto cascade = make_bsbc_cascade(0.1, 0.2);
    auto r1 = is_physically_degraded(cascade, 1e-9);
    REQUIRE(r1.degraded);
    CHECK(r1.y2_given_y1.at(0, 1) == Approx(0.2).margin(1e-12));
    CHECK(r1.y2_given_y1.at(1, 0) == Approx(0.2).margin(1e-12));

    // Y1 = X exactly, Y2 = BSC(p)(X) = BSC(p)(Y1)
    {
        Kernel k = Kernel::bsc(0.15);
        std::vector<double> w(8, 0.0);
        for (int x = 0; x < 2; ++x)
            for (int b = 0; b < 2; ++b) w[(x * 2 + x) * 2 + b] = k.at(x, b);
        BroadcastChannel ch(2, 2, 2, std::move(w), 0.0, 0.0);
        auto r2 = is_physically_degraded(ch, 1e-9);
        CHECK(r2.degraded);
        CHECK(r2.y2_given_y1.at(0, 1) == Approx(0.15).margin(1e-12));
    }

    // independent noises are not degraded
    auto pair = make_bsbc_pair(0.1);
    auto r3 = is_physically_degraded(pair, 1e-9);
    CHECK_FALSE(r3.degraded);
    CHECK(r3.residual > 0.1);
}

TEST_CASE("tensor cell cap enforced", "[prob]") {
    CHECK_THROWS_AS(make_joint({"a", "b", "c"}, {300, 300, 300},
                               std::vector<double>(27, 0.0)),
                    validation_error);
}
