// Shared maximization machinery for the rate-region modules.
//
// Every region is a sup over one or more probability simplices. The search
// recipe is fixed so results are reproducible: a coarse per-block grid scan
// seeds one start, Dirichlet(1) draws from a seeded stream provide the
// remaining restarts, and each restart runs multiplicative-update coordinate
// ascent until the objective stalls.

#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "coopcast/prob.hpp"

namespace coopcast {

struct OptBudget {
    int grid_res = 9;      // grid points per simplex dimension
    int restarts = 16;     // ascent restarts per sweep point
    int max_iters = 500;   // ascent iteration cap
    double tol = 1e-9;     // objective-change stopping tolerance
    int lambda_count = 65; // sweep directions on [0,1]
    std::uint64_t seed = 0;
};

// -------------------------------------------------------------------------
// deterministic rng (splitmix64)

struct Rng {
    std::uint64_t s;
    explicit Rng(std::uint64_t seed) : s(seed) {}
    std::uint64_t next() {
        s += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    // exponential(1), strictly positive
    double exponential() {
        double u;
        do {
            u = uniform();
        } while (u >= 1.0);
        return -std::log(1.0 - u);
    }
    int uniform_int(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
};

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
    Rng r(a ^ (b * 0xD1B54A32D192ED03ull) ^ (c * 0x8CB92BA72F3D8DD7ull));
    r.next();
    return r.next();
}

// Dirichlet(1) sample: normalized exponentials.
inline std::vector<double> dirichlet1(Rng& rng, int dim) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    double s = 0.0;
    for (auto& x : v) {
        x = rng.exponential();
        s += x;
    }
    for (auto& x : v) x /= s;
    return v;
}

// -------------------------------------------------------------------------
// parallel helper honoring COOPCAST_THREADS; merge-by-index keeps results
// independent of the thread count

inline int thread_cap() {
    if (const char* env = std::getenv("COOPCAST_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

template <class Fn>
void parallel_for(int n, Fn&& fn) {
    const int workers = std::min(thread_cap(), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (int i = w; i < n; i += workers) fn(i);
        });
    for (auto& t : pool) t.join();
}

// -------------------------------------------------------------------------
// simplex grids

// Visit all weight vectors k/total with k a length-`parts` composition of
// `total`, in lexicographically decreasing order of the composition.
template <class Fn>
void for_each_composition(int total, int parts, Fn&& fn) {
    std::vector<double> point(static_cast<std::size_t>(parts));
    if (total <= 0 || parts == 1) {
        for (auto& x : point) x = 1.0 / parts;
        fn(point);
        return;
    }
    std::vector<int> c(static_cast<std::size_t>(parts), 0);
    c[0] = total;
    for (;;) {
        for (int i = 0; i < parts; ++i)
            point[static_cast<std::size_t>(i)] =
                static_cast<double>(c[static_cast<std::size_t>(i)]) / total;
        fn(point);
        if (c[static_cast<std::size_t>(parts - 1)] == total) break;
        int j = parts - 2;
        while (j >= 0 && c[static_cast<std::size_t>(j)] == 0) --j;
        if (j < 0) break;
        const int tail = c[static_cast<std::size_t>(parts - 1)];
        c[static_cast<std::size_t>(parts - 1)] = 0;
        c[static_cast<std::size_t>(j)] -= 1;
        c[static_cast<std::size_t>(j + 1)] = tail + 1;
    }
}

inline std::size_t composition_count(int total, int parts) {
    // C(total + parts - 1, parts - 1), saturating
    long double acc = 1.0L;
    for (int i = 1; i <= parts - 1; ++i) acc = acc * (total + i) / i;
    if (acc > 1e18L) return static_cast<std::size_t>(1e18);
    return static_cast<std::size_t>(acc + 0.5L);
}

// Largest resolution whose grid on a (parts-1)-simplex stays under the cap.
inline int capped_grid_res(int requested, int parts, std::size_t cap = 200'000) {
    int r = requested;
    while (r > 2 && composition_count(r - 1, parts) > cap) --r;
    return r;
}

// -------------------------------------------------------------------------
// multiplicative-update coordinate ascent over a product of simplices

using Blocks = std::vector<std::vector<double>>;

template <class F>
struct MaximizeResult {
    double value = 0.0;
    Blocks point;
};

namespace detail {

// One ascent pass over all blocks; returns the improved objective value.
template <class F>
double ascend_pass(F& f, Blocks& blocks, double current) {
    constexpr double kProbeStep = 1e-6;
    static constexpr double kEtas[] = {4.0, 2.0, 1.0, 0.5, 0.25, 0.125, 0.03125, 0.0078125};
    std::vector<double> grad, trial;
    Blocks work = blocks;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        auto& p = blocks[b];
        const int m = static_cast<int>(p.size());
        if (m <= 1) continue;
        grad.assign(static_cast<std::size_t>(m), 0.0);
        // directional derivatives toward each vertex
        for (int i = 0; i < m; ++i) {
            auto& wp = work[b];
            for (int k = 0; k < m; ++k)
                wp[static_cast<std::size_t>(k)] =
                    (1.0 - kProbeStep) * p[static_cast<std::size_t>(k)] +
                    (k == i ? kProbeStep : 0.0);
            grad[static_cast<std::size_t>(i)] = (f(work) - current) / kProbeStep;
        }
        double gmax = grad[0];
        for (double g : grad) gmax = std::max(gmax, g);

        double best = current;
        std::vector<double> best_p;
        trial.assign(static_cast<std::size_t>(m), 0.0);
        for (double eta : kEtas) {
            double s = 0.0;
            for (int i = 0; i < m; ++i) {
                trial[static_cast<std::size_t>(i)] =
                    p[static_cast<std::size_t>(i)] *
                    std::exp2(eta * (grad[static_cast<std::size_t>(i)] - gmax));
                s += trial[static_cast<std::size_t>(i)];
            }
            if (!(s > 0.0)) continue;
            for (auto& x : trial) x /= s;
            work[b] = trial;
            const double v = f(work);
            if (v > best) {
                best = v;
                best_p = trial;
            }
        }
        if (!best_p.empty()) {
            p = best_p;
            current = best;
        }
        work[b] = p;
    }
    return current;
}

}  // namespace detail

// Maximize f over a product of simplices with the fixed budgeted recipe.
// `dims` lists the alphabet size of each block; blocks earlier in the list
// are grid-scanned first (with the rest at uniform), so put conditional rows
// ahead of their priors.
template <class F>
MaximizeResult<F> maximize_over_simplices(F&& f, const std::vector<int>& dims,
                                          const OptBudget& budget, std::uint64_t stream_seed) {
    Blocks uniform;
    uniform.reserve(dims.size());
    for (int d : dims)
        uniform.emplace_back(static_cast<std::size_t>(d), 1.0 / d);

    // grid seed: per-block exhaustive scan, other blocks held at current values
    Blocks grid_pt = uniform;
    double grid_val = f(grid_pt);
    for (std::size_t b = 0; b < dims.size(); ++b) {
        const int d = dims[b];
        if (d <= 1) continue;
        const int res = capped_grid_res(budget.grid_res, d);
        Blocks work = grid_pt;
        double best = grid_val;
        std::vector<double> best_p = grid_pt[b];
        for_each_composition(res - 1, d, [&](const std::vector<double>& pt) {
            work[b] = pt;
            const double v = f(work);
            if (v > best) {
                best = v;
                best_p = pt;
            }
        });
        grid_pt[b] = best_p;
        grid_val = best;
    }

    MaximizeResult<F> out;
    out.value = grid_val;
    out.point = grid_pt;

    Rng rng(stream_seed);
    for (int r = 0; r < budget.restarts; ++r) {
        Blocks start;
        if (r == 0) {
            start = grid_pt;
        } else {
            start.reserve(dims.size());
            for (int d : dims) start.push_back(dirichlet1(rng, d));
        }
        double cur = f(start);
        for (int it = 0; it < budget.max_iters; ++it) {
            const double next = detail::ascend_pass(f, start, cur);
            if (next - cur < budget.tol) {
                cur = next;
                break;
            }
            cur = next;
        }
        if (cur > out.value) {
            out.value = cur;
            out.point = start;
        }
    }
    return out;
}

}  // namespace coopcast
