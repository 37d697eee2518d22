// Shared helpers for the test suites: a brute-force information-measure
// oracle kept independent of the library code paths, plus seeded generators
// for random joints and channels.

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "coopcast/prob.hpp"

namespace testsupport {

// splitmix64, self-contained so test randomness never depends on library rng
struct TestRng {
    std::uint64_t s;
    explicit TestRng(std::uint64_t seed) : s(seed) {}
    std::uint64_t next() {
        s += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

inline std::vector<double> random_mass(TestRng& rng, std::size_t n) {
    std::vector<double> v(n);
    double s = 0.0;
    for (auto& x : v) {
        x = -std::log(1.0 - rng.uniform());
        s += x;
    }
    for (auto& x : v) x /= s;
    // make the mass sum to 1 exactly enough for the 1e-12 gate
    double fix = 0.0;
    for (auto& x : v) fix += x;
    v.back() += 1.0 - fix;
    return v;
}

inline coopcast::JointPmf random_joint(std::uint64_t seed, std::vector<int> sizes) {
    TestRng rng(seed);
    std::size_t n = 1;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        n *= static_cast<std::size_t>(sizes[i]);
        names.push_back("v" + std::to_string(i));
    }
    return coopcast::make_joint(names, sizes, random_mass(rng, n));
}

inline coopcast::BroadcastChannel random_channel(std::uint64_t seed, int nx, int n1, int n2,
                                                 double c12, double c21) {
    TestRng rng(seed);
    std::vector<double> w;
    for (int x = 0; x < nx; ++x) {
        auto row = random_mass(rng, static_cast<std::size_t>(n1) * n2);
        w.insert(w.end(), row.begin(), row.end());
    }
    return coopcast::BroadcastChannel(nx, n1, n2, std::move(w), c12, c21,
                                      "rand" + std::to_string(seed));
}

// ---------------------------------------------------------------------
// brute-force oracle: plain nested summations over the full tensor

inline double oracle_entropy(const coopcast::JointPmf& j, const std::vector<std::string>& vars) {
    // map each full-tensor cell to a key over `vars`, accumulate, then sum -p log p
    std::vector<int> axes;
    for (const auto& v : vars) axes.push_back(j.var_index(v));
    std::size_t cells = 1;
    for (int a : axes) cells *= static_cast<std::size_t>(j.sizes[static_cast<std::size_t>(a)]);
    std::vector<double> marg(cells, 0.0);

    const std::size_t total = j.t.size();
    std::vector<int> digit(j.sizes.size(), 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t key = 0;
        for (int a : axes)
            key = key * static_cast<std::size_t>(j.sizes[static_cast<std::size_t>(a)]) +
                  static_cast<std::size_t>(digit[static_cast<std::size_t>(a)]);
        marg[key] += j.t[flat];
        for (int v = static_cast<int>(j.sizes.size()) - 1; v >= 0; --v) {
            if (++digit[static_cast<std::size_t>(v)] < j.sizes[static_cast<std::size_t>(v)]) break;
            digit[static_cast<std::size_t>(v)] = 0;
        }
    }
    double h = 0.0;
    for (double p : marg)
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

inline double oracle_mi(const coopcast::JointPmf& j, const std::vector<std::string>& a,
                        const std::vector<std::string>& b, const std::vector<std::string>& g = {}) {
    // I(A;B|G) = H(A,G) + H(B,G) - H(A,B,G) - H(G), each via oracle_entropy
    auto cat = [](std::vector<std::string> u, const std::vector<std::string>& v) {
        u.insert(u.end(), v.begin(), v.end());
        return u;
    };
    double h_ag = oracle_entropy(j, cat(a, g));
    double h_bg = oracle_entropy(j, cat(b, g));
    double h_abg = oracle_entropy(j, cat(cat(a, b), g));
    double h_g = g.empty() ? 0.0 : oracle_entropy(j, g);
    return h_ag + h_bg - h_abg - h_g;
}

inline double h2(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

inline double star(double a, double b) { return a * (1 - b) + b * (1 - a); }

}  // namespace testsupport
