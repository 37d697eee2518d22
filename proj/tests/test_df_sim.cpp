#include <catch2/catch_amalgamated.hpp>

#include "coopcast/df_sim.hpp"
#include "test_support.hpp"

using namespace coopcast;
using namespace testsupport;
using Catch::Approx;

namespace {

BroadcastChannel noiseless_pipe() {
    // Y1 = X, Y2 = Y1
    std::vector<double> w(8, 0.0);
    for (int x = 0; x < 2; ++x) w[(x * 2 + x) * 2 + x] = 1.0;
    return BroadcastChannel(2, 2, 2, std::move(w), 1.0, 0.0);
}

bool same_report(const DfSimReport& a, const DfSimReport& b) {
    return a.err1 == b.err1 && a.err2 == b.err2 && a.err_joint == b.err_joint &&
           a.err2_solo == b.err2_solo && a.list_sum == b.list_sum &&
           a.list_samples == b.list_samples && a.samples == b.samples;
}

}  // namespace

TEST_CASE("code generation sizes and determinism", "[dfsim]") {
    const Pmf pu = Pmf::uniform(2);
    const Kernel kxu = Kernel::bsc(0.2);

    auto tiny = generate_code(pu, kxu, 6, 0.0, 0.0, 0.0, 1);
    CHECK(tiny.m1 == 1);
    CHECK(tiny.m2 == 1);
    CHECK(tiny.m_r == 1);
    CHECK_FALSE(tiny.size_ceiled);

    auto c = generate_code(pu, kxu, 8, 0.25, 0.25, 0.25, 7);
    CHECK(c.m1 == 4);
    CHECK(c.m2 == 4);
    CHECK(c.m_r == 4);
    CHECK(c.realized_r1 == Approx(0.25).margin(1e-12));
    CHECK_FALSE(c.size_ceiled);

    auto ceiled = generate_code(pu, kxu, 5, 0.3, 0.3, 0.3, 7);
    CHECK(ceiled.size_ceiled);  // 2^{1.5} = 2.83 -> 3
    CHECK(ceiled.m1 == 3);
    CHECK(ceiled.realized_r1 == Approx(std::log2(3.0) / 5).margin(1e-12));

    auto again = generate_code(pu, kxu, 8, 0.25, 0.25, 0.25, 7);
    CHECK(c.u_book == again.u_book);
    CHECK(c.x_book == again.x_book);
    CHECK(c.bins == again.bins);

    auto other = generate_code(pu, kxu, 8, 0.25, 0.25, 0.25, 8);
    CHECK(c.u_book != other.u_book);

    // symbols come from the configured laws
    for (int v : c.u_book) CHECK((v == 0 || v == 1));

    CHECK_THROWS_AS(generate_code(pu, kxu, 24, 0.9, 0.9, 0.5, 1), infeasible_error);
}

TEST_CASE("noiseless single-message run is error free", "[dfsim]") {
    auto ch = noiseless_pipe();
    auto code = generate_code(Pmf::uniform(2), Kernel::identity(2), 4, 0.0, 0.0, ch.c12, 3);
    SimConfig cfg;
    cfg.blocks = 6;
    cfg.trials = 50;
    auto rep = run_df(code, ch, cfg);
    CHECK(rep.err1 == 0);
    CHECK(rep.err2 == 0);
    CHECK(rep.err_joint == 0);
    CHECK(rep.samples == 50 * 5);
}

TEST_CASE("simulator preconditions", "[dfsim]") {
    auto code = generate_code(Pmf::uniform(2), Kernel::identity(2), 4, 0.1, 0.1, 0.2, 3);
    SimConfig cfg;
    CHECK_THROWS_AS(run_df(code, make_bsbc_pair(0.1), cfg), validation_error);  // not degraded
    cfg.blocks = 1;
    CHECK_THROWS_AS(run_df(code, make_bsbc_cascade(0.1, 0.1, 0.2), cfg), validation_error);
    cfg.blocks = 4;
    cfg.decoder = SimConfig::Decoder::typicality;
    cfg.epsilon = 0.0;
    CHECK_THROWS_AS(run_df(code, make_bsbc_cascade(0.1, 0.1, 0.2), cfg), validation_error);
}

TEST_CASE("reports are deterministic and satisfy the error sandwich", "[dfsim]") {
    auto ch = make_bsbc_cascade(0.05, 0.1, 0.30);
    auto code = generate_code(Pmf::uniform(2), Kernel::bsc(0.2), 8, 0.20, 0.08, ch.c12, 5);
    for (auto decoder : {SimConfig::Decoder::ml, SimConfig::Decoder::typicality}) {
        SimConfig cfg;
        cfg.blocks = 5;
        cfg.trials = 300;
        cfg.seed = 11;
        cfg.decoder = decoder;
        auto a = run_df(code, ch, cfg);
        auto b = run_df(code, ch, cfg);
        CHECK(same_report(a, b));
        CHECK(a.err_joint >= std::max(a.err1, a.err2));
        CHECK(a.err_joint <= a.err1 + a.err2);
        CHECK(std::max(a.pe1(), a.pe2()) <= a.pe() + 1e-15);
        CHECK(a.pe() <= a.pe1() + a.pe2() + 1e-15);
    }
}

TEST_CASE("strict tie mode never reports fewer errors", "[dfsim]") {
    auto ch = make_bsbc_cascade(0.08, 0.1, 0.25);
    auto code = generate_code(Pmf::uniform(2), Kernel::bsc(0.25), 6, 0.3, 0.15, ch.c12, 9);
    SimConfig cfg;
    cfg.blocks = 5;
    cfg.trials = 400;
    cfg.decoder = SimConfig::Decoder::typicality;
    cfg.epsilon = 0.3;
    auto lenient = run_df(code, ch, cfg);
    cfg.strict_ties = true;
    auto strict = run_df(code, ch, cfg);
    CHECK(strict.err1 >= lenient.err1);
    CHECK(strict.err2 >= lenient.err2);
}

TEST_CASE("unique bins make conferencing at least as good as solo decoding", "[dfsim]") {
    // strong Y1, weak Y2, and a conference link wide enough that the random
    // binning is injective for this seed
    auto ch = make_bsbc_cascade(0.02, 0.2, 1.0);
    auto code = generate_code(Pmf::uniform(2), Kernel::identity(2), 12, 0.1, 0.25, ch.c12, 3);
    std::vector<int> seen(static_cast<std::size_t>(code.m_r), 0);
    bool injective = true;
    for (int b : code.bins) injective = injective && (seen[static_cast<std::size_t>(b)]++ == 0);
    REQUIRE(injective);

    SimConfig cfg;
    cfg.blocks = 6;
    cfg.trials = 400;
    cfg.seed = 2;
    auto rep = run_df(code, ch, cfg);
    CHECK(rep.err2 <= rep.err2_solo);
    CHECK(rep.err2_solo > 0);  // the weak channel alone does make mistakes here
}

TEST_CASE("channel sampler matches the transition law", "[dfsim]") {
    auto ch = make_bsbc_cascade(0.07, 0.23);
    ChannelSampler sampler(ch);
    const int samples = 100000;
    for (int x = 0; x < ch.x_size; ++x) {
        std::vector<long long> count(static_cast<std::size_t>(ch.y1_size) * ch.y2_size, 0);
        Rng rng(mix_seed(123, static_cast<std::uint64_t>(x)));
        for (int s = 0; s < samples; ++s) {
            const auto [a, b] = sampler(x, rng);
            ++count[static_cast<std::size_t>(a) * ch.y2_size + b];
        }
        for (int a = 0; a < ch.y1_size; ++a)
            for (int b = 0; b < ch.y2_size; ++b) {
                const double p = ch.at(x, a, b);
                const double sigma = std::sqrt(samples * p * (1 - p));
                CHECK(std::abs(count[static_cast<std::size_t>(a) * ch.y2_size + b] -
                               samples * p) <= 4.0 * sigma + 1.0);
            }
    }
}

TEST_CASE("list-size diagnostic", "[dfsim]") {
    auto ch = make_bsbc_cascade(0.05, 0.1, 0.30);
    SimConfig cfg;
    cfg.blocks = 5;
    cfg.trials = 200;
    cfg.decoder = SimConfig::Decoder::typicality;
    cfg.epsilon = 0.05;

    // r2 = 0: a single candidate is ever tested
    auto small = generate_code(Pmf::uniform(2), Kernel::bsc(0.2), 8, 0.2, 0.0, ch.c12, 4);
    auto d0 = list_size_diagnostic(small, ch, cfg);
    CHECK(d0.mean_list_size <= 1.0);

    // bound clips at the codebook size when r2 > I(U;Y2)
    auto big = generate_code(Pmf::uniform(2), Kernel::bsc(0.2), 8, 0.1, 0.6, ch.c12, 4);
    auto rep = run_df(big, ch, cfg);
    CHECK(rep.list_bound_raw() > rep.m2);
    CHECK(rep.list_bound() == Approx(static_cast<double>(rep.m2)));
    CHECK(rep.mean_list_size() <= rep.list_bound() + 1e-12);

    // the diagnostic is a typicality statement
    SimConfig ml_cfg = cfg;
    ml_cfg.decoder = SimConfig::Decoder::ml;
    CHECK_THROWS_AS(list_size_diagnostic(big, ch, ml_cfg), validation_error);
}

TEST_CASE("wilson interval brackets the estimate", "[dfsim]") {
    auto w = wilson95(30, 1000);
    CHECK(w.lo < 0.03);
    CHECK(w.hi > 0.03);
    CHECK(w.lo > 0.0);
    auto z = wilson95(0, 1000);
    CHECK(z.lo == 0.0);
    CHECK(z.hi > 0.0);
    auto f = wilson95(1000, 1000);
    CHECK(f.hi == 1.0);
}
