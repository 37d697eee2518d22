// Exact finite-alphabet probability and information-measure kernels.
//
// Everything here works on dense tensors over small named alphabets and is
// deliberately exact: logs are base 2, 0*log(0) is handled by explicit
// branches, and inputs that are not valid distributions are rejected rather
// than silently renormalized.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace coopcast {

inline constexpr double kPmfTol = 1e-12;
inline constexpr std::size_t kMaxCells = 10'000'000;

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed numeric input (bad distribution, bad shape, unknown variable).
struct validation_error : error {
    using error::error;
};

// Unreadable or ill-formed external input (files, builtin URIs).
struct parse_error : error {
    using error::error;
};

// Structurally fine request that cannot be satisfied (memory caps, empty
// feasible sets).
struct infeasible_error : error {
    using error::error;
};

// -------------------------------------------------------------------------
// scalar helpers

inline double log2_strict(double p) { return std::log2(p); }

// p*log2(p) with the 0*log(0) = 0 convention.
inline double plog2p(double p) {
    if (p <= 0.0) return 0.0;
    return p * std::log2(p);
}

// Binary entropy h(p) in bits; h(0) = h(1) = 0.
inline double binary_entropy(double p) {
    if (p < 0.0 || p > 1.0) throw validation_error("binary_entropy: p outside [0,1]");
    return -plog2p(p) - plog2p(1.0 - p);
}

// Crossover of two cascaded binary symmetric channels: a*b = a(1-b)+b(1-a).
inline double bsc_star(double a, double b) { return a * (1.0 - b) + b * (1.0 - a); }

// -------------------------------------------------------------------------
// basic carriers

struct Alphabet {
    int size = 0;
};

inline void validate_pmf(std::span<const double> p, const std::string& what) {
    if (p.empty()) throw validation_error(what + ": empty distribution");
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] >= 0.0))
            throw validation_error(what + ": negative mass at index " + std::to_string(i));
        sum += p[i];
    }
    if (std::abs(sum - 1.0) > kPmfTol)
        throw validation_error(what + ": mass " + std::to_string(sum) + " != 1 (tol 1e-12)");
}

// Probability mass function over one finite alphabet.
struct Pmf {
    std::vector<double> p;

    Pmf() = default;
    explicit Pmf(std::vector<double> probs) : p(std::move(probs)) { validate_pmf(p, "Pmf"); }

    int size() const { return static_cast<int>(p.size()); }
    double operator[](int i) const { return p[static_cast<std::size_t>(i)]; }

    static Pmf uniform(int n) {
        return Pmf(std::vector<double>(static_cast<std::size_t>(n), 1.0 / n));
    }
    static Pmf point_mass(int n, int at) {
        std::vector<double> v(static_cast<std::size_t>(n), 0.0);
        v[static_cast<std::size_t>(at)] = 1.0;
        return Pmf(std::move(v));
    }
};

// Row-stochastic matrix p(out|in); one Pmf per conditioning symbol.
struct Kernel {
    int in = 0;
    int out = 0;
    std::vector<double> p;  // row-major [in][out]

    Kernel() = default;
    Kernel(int in_size, int out_size, std::vector<double> rows)
        : in(in_size), out(out_size), p(std::move(rows)) {
        if (in <= 0 || out <= 0 ||
            p.size() != static_cast<std::size_t>(in) * static_cast<std::size_t>(out))
            throw validation_error("Kernel: shape mismatch");
        for (int i = 0; i < in; ++i)
            validate_pmf(row(i), "Kernel row " + std::to_string(i));
    }

    double at(int i, int o) const {
        return p[static_cast<std::size_t>(i) * out + static_cast<std::size_t>(o)];
    }
    std::span<const double> row(int i) const {
        return {p.data() + static_cast<std::size_t>(i) * out, static_cast<std::size_t>(out)};
    }

    static Kernel identity(int n) {
        std::vector<double> rows(static_cast<std::size_t>(n) * n, 0.0);
        for (int i = 0; i < n; ++i) rows[static_cast<std::size_t>(i) * n + i] = 1.0;
        return Kernel(n, n, std::move(rows));
    }
    static Kernel bsc(double crossover) {
        if (crossover < 0.0 || crossover > 1.0)
            throw validation_error("Kernel::bsc: crossover outside [0,1]");
        return Kernel(2, 2, {1.0 - crossover, crossover, crossover, 1.0 - crossover});
    }
    // All rows concentrated on one output symbol.
    static Kernel constant(int in_size, int out_size, int at) {
        std::vector<double> rows(static_cast<std::size_t>(in_size) * out_size, 0.0);
        for (int i = 0; i < in_size; ++i)
            rows[static_cast<std::size_t>(i) * out_size + at] = 1.0;
        return Kernel(in_size, out_size, std::move(rows));
    }
};

// Two-output broadcast channel p(y1,y2|x) plus conference link capacities
// (bits per channel use).
struct BroadcastChannel {
    int x_size = 0;
    int y1_size = 0;
    int y2_size = 0;
    std::vector<double> w;  // [x][y1][y2]
    double c12 = 0.0;
    double c21 = 0.0;
    std::string name;

    BroadcastChannel() = default;
    BroadcastChannel(int nx, int ny1, int ny2, std::vector<double> transition, double c12_bits,
                     double c21_bits, std::string channel_name = {})
        : x_size(nx),
          y1_size(ny1),
          y2_size(ny2),
          w(std::move(transition)),
          c12(c12_bits),
          c21(c21_bits),
          name(std::move(channel_name)) {
        if (x_size <= 0 || y1_size <= 0 || y2_size <= 0)
            throw validation_error("BroadcastChannel: alphabet sizes must be positive");
        const std::size_t cells = static_cast<std::size_t>(x_size) * y1_size * y2_size;
        if (w.size() != cells) throw validation_error("BroadcastChannel: transition shape mismatch");
        for (int x = 0; x < x_size; ++x)
            validate_pmf(slice(x), "BroadcastChannel: p(y1,y2|x=" + std::to_string(x) + ")");
        if (c12 < 0.0 || c21 < 0.0)
            throw validation_error("BroadcastChannel: conference capacities must be >= 0");
    }

    double at(int x, int y1, int y2) const {
        return w[(static_cast<std::size_t>(x) * y1_size + y1) * y2_size + y2];
    }
    std::span<const double> slice(int x) const {
        const std::size_t n = static_cast<std::size_t>(y1_size) * y2_size;
        return {w.data() + static_cast<std::size_t>(x) * n, n};
    }

    // Marginal channel p(y1|x).
    Kernel y1_kernel() const {
        std::vector<double> rows(static_cast<std::size_t>(x_size) * y1_size, 0.0);
        for (int x = 0; x < x_size; ++x)
            for (int a = 0; a < y1_size; ++a)
                for (int b = 0; b < y2_size; ++b)
                    rows[static_cast<std::size_t>(x) * y1_size + a] += at(x, a, b);
        return Kernel(x_size, y1_size, std::move(rows));
    }
    // Marginal channel p(y2|x).
    Kernel y2_kernel() const {
        std::vector<double> rows(static_cast<std::size_t>(x_size) * y2_size, 0.0);
        for (int x = 0; x < x_size; ++x)
            for (int a = 0; a < y1_size; ++a)
                for (int b = 0; b < y2_size; ++b)
                    rows[static_cast<std::size_t>(x) * y2_size + b] += at(x, a, b);
        return Kernel(x_size, y2_size, std::move(rows));
    }

    BroadcastChannel with_links(double new_c12, double new_c21) const {
        BroadcastChannel c = *this;
        c.c12 = new_c12;
        c.c21 = new_c21;
        return c;
    }
};

// Cascade family: Y1 = BSC(p1)(X), Y2 = BSC(p2)(Y1). Physically degraded by
// construction.
inline BroadcastChannel make_bsbc_cascade(double p1, double p2, double c12 = 0.0,
                                          double c21 = 0.0) {
    Kernel k1 = Kernel::bsc(p1);
    Kernel k2 = Kernel::bsc(p2);
    std::vector<double> w(8, 0.0);
    for (int x = 0; x < 2; ++x)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) w[(x * 2 + a) * 2 + b] = k1.at(x, a) * k2.at(a, b);
    return BroadcastChannel(2, 2, 2, std::move(w), c12, c21, "bsbc");
}

// Two independent identical BSCs from the same input: Y1 = X + N1, Y2 = X + N2.
inline BroadcastChannel make_bsbc_pair(double p, double c12 = 0.0, double c21 = 0.0) {
    Kernel k = Kernel::bsc(p);
    std::vector<double> w(8, 0.0);
    for (int x = 0; x < 2; ++x)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) w[(x * 2 + a) * 2 + b] = k.at(x, a) * k.at(x, b);
    return BroadcastChannel(2, 2, 2, std::move(w), c12, c21, "bsbc2");
}

// -------------------------------------------------------------------------
// dense joint distributions over named variables

struct JointPmf {
    std::vector<std::string> vars;
    std::vector<int> sizes;
    std::vector<double> t;  // row-major, first variable slowest

    std::size_t cell_count() const { return t.size(); }

    int var_index(std::string_view name) const {
        for (std::size_t i = 0; i < vars.size(); ++i)
            if (vars[i] == name) return static_cast<int>(i);
        throw validation_error("JointPmf: unknown variable '" + std::string(name) + "'");
    }

    std::vector<std::size_t> strides() const {
        std::vector<std::size_t> s(sizes.size());
        std::size_t acc = 1;
        for (int i = static_cast<int>(sizes.size()) - 1; i >= 0; --i) {
            s[static_cast<std::size_t>(i)] = acc;
            acc *= static_cast<std::size_t>(sizes[static_cast<std::size_t>(i)]);
        }
        return s;
    }
};

inline JointPmf make_joint(std::vector<std::string> vars, std::vector<int> sizes,
                           std::vector<double> cells) {
    if (vars.size() != sizes.size()) throw validation_error("make_joint: vars/sizes mismatch");
    if (vars.empty()) throw validation_error("make_joint: no variables");
    std::size_t n = 1;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] <= 0) throw validation_error("make_joint: alphabet size must be positive");
        n *= static_cast<std::size_t>(sizes[i]);
        if (n > kMaxCells) throw validation_error("make_joint: tensor exceeds cell cap");
        for (std::size_t j = i + 1; j < vars.size(); ++j)
            if (vars[i] == vars[j])
                throw validation_error("make_joint: duplicate variable '" + vars[i] + "'");
    }
    if (cells.size() != n) throw validation_error("make_joint: tensor shape mismatch");
    validate_pmf(cells, "JointPmf");
    return JointPmf{std::move(vars), std::move(sizes), std::move(cells)};
}

namespace detail {

// Resolve a list of variable names to indices, rejecting duplicates.
inline std::vector<int> resolve_vars(const JointPmf& j, std::span<const std::string> names,
                                     const char* what) {
    if (names.empty()) throw validation_error(std::string(what) + ": empty variable set");
    std::vector<int> idx;
    idx.reserve(names.size());
    for (const auto& n : names) idx.push_back(j.var_index(n));
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a + 1; b < idx.size(); ++b)
            if (idx[a] == idx[b])
                throw validation_error(std::string(what) + ": repeated variable '" + names[a] + "'");
    return idx;
}

// Sum the tensor onto the given (ordered) subset of axes.
inline std::vector<double> project(const JointPmf& j, std::span<const int> axes) {
    std::size_t out_cells = 1;
    for (int a : axes) out_cells *= static_cast<std::size_t>(j.sizes[static_cast<std::size_t>(a)]);
    std::vector<double> out(out_cells, 0.0);

    const auto in_strides = j.strides();
    // contribution of each input axis digit to the output flat index
    std::vector<std::size_t> out_stride_of_axis(j.sizes.size(), 0);
    {
        std::size_t s = 1;
        for (int i = static_cast<int>(axes.size()) - 1; i >= 0; --i) {
            out_stride_of_axis[static_cast<std::size_t>(axes[static_cast<std::size_t>(i)])] = s;
            s *= static_cast<std::size_t>(j.sizes[static_cast<std::size_t>(axes[static_cast<std::size_t>(i)])]);
        }
    }

    const std::size_t nv = j.sizes.size();
    std::vector<int> digit(nv, 0);
    std::size_t out_idx = 0;
    for (std::size_t flat = 0; flat < j.t.size(); ++flat) {
        out[out_idx] += j.t[flat];
        // odometer increment, maintaining out_idx
        for (int v = static_cast<int>(nv) - 1; v >= 0; --v) {
            const std::size_t vu = static_cast<std::size_t>(v);
            if (++digit[vu] < j.sizes[vu]) {
                out_idx += out_stride_of_axis[vu];
                break;
            }
            digit[vu] = 0;
            out_idx -= out_stride_of_axis[vu] * static_cast<std::size_t>(j.sizes[vu] - 1);
        }
    }
    return out;
}

}  // namespace detail

// Sum out all variables not in `keep`; result variables follow the order of
// `keep`. Mass is preserved exactly (pure additions).
inline JointPmf marginalize(const JointPmf& j, std::span<const std::string> keep) {
    const auto axes = detail::resolve_vars(j, keep, "marginalize");
    std::vector<std::string> vars(keep.begin(), keep.end());
    std::vector<int> sizes;
    sizes.reserve(axes.size());
    for (int a : axes) sizes.push_back(j.sizes[static_cast<std::size_t>(a)]);
    JointPmf out{std::move(vars), std::move(sizes), detail::project(j, axes)};
    return out;
}

inline JointPmf marginalize(const JointPmf& j, std::initializer_list<std::string> keep) {
    std::vector<std::string> k(keep);
    return marginalize(j, std::span<const std::string>(k));
}

// H(vars) in bits.
inline double entropy(const JointPmf& j, std::span<const std::string> vars) {
    const auto axes = detail::resolve_vars(j, vars, "entropy");
    const auto m = detail::project(j, axes);
    double h = 0.0;
    for (double p : m) h -= plog2p(p);
    return h;
}

inline double entropy(const JointPmf& j, std::initializer_list<std::string> vars) {
    std::vector<std::string> v(vars);
    return entropy(j, std::span<const std::string>(v));
}

// I(A;B|Given) in bits; empty `given` yields unconditional mutual information.
// Computed by direct summation over the (A,B,Given) marginal with explicit
// zero branches, clamped at 0 against roundoff.
inline double mutual_information(const JointPmf& j, std::span<const std::string> a,
                                 std::span<const std::string> b,
                                 std::span<const std::string> given = {}) {
    const auto ia = detail::resolve_vars(j, a, "mutual_information");
    const auto ib = detail::resolve_vars(j, b, "mutual_information");
    std::vector<int> ig;
    if (!given.empty()) ig = detail::resolve_vars(j, given, "mutual_information");
    for (int x : ia)
        for (int y : ib)
            if (x == y) throw validation_error("mutual_information: a and b overlap");
    for (int g : ig) {
        for (int x : ia)
            if (x == g) throw validation_error("mutual_information: a and given overlap");
        for (int y : ib)
            if (y == g) throw validation_error("mutual_information: b and given overlap");
    }

    // marginal over (g..., a..., b...) with that axis order
    std::vector<int> axes = ig;
    axes.insert(axes.end(), ia.begin(), ia.end());
    axes.insert(axes.end(), ib.begin(), ib.end());
    const auto m = detail::project(j, axes);

    std::size_t na = 1, nb = 1, ng = 1;
    for (int x : ia) na *= static_cast<std::size_t>(j.sizes[static_cast<std::size_t>(x)]);
    for (int y : ib) nb *= static_cast<std::size_t>(j.sizes[static_cast<std::size_t>(y)]);
    for (int g : ig) ng *= static_cast<std::size_t>(j.sizes[static_cast<std::size_t>(g)]);

    std::vector<double> pg(ng, 0.0), pag(ng * na, 0.0), pbg(ng * nb, 0.0);
    for (std::size_t g = 0; g < ng; ++g)
        for (std::size_t x = 0; x < na; ++x)
            for (std::size_t y = 0; y < nb; ++y) {
                const double v = m[(g * na + x) * nb + y];
                pg[g] += v;
                pag[g * na + x] += v;
                pbg[g * nb + y] += v;
            }

    double s = 0.0;
    for (std::size_t g = 0; g < ng; ++g)
        for (std::size_t x = 0; x < na; ++x)
            for (std::size_t y = 0; y < nb; ++y) {
                const double v = m[(g * na + x) * nb + y];
                if (v <= 0.0) continue;
                s += v * std::log2(v * pg[g] / (pag[g * na + x] * pbg[g * nb + y]));
            }
    return std::max(0.0, s);
}

inline double mutual_information(const JointPmf& j, std::initializer_list<std::string> a,
                                 std::initializer_list<std::string> b,
                                 std::initializer_list<std::string> given = {}) {
    std::vector<std::string> va(a), vb(b), vg(given);
    return mutual_information(j, std::span<const std::string>(va), std::span<const std::string>(vb),
                              std::span<const std::string>(vg));
}

// -------------------------------------------------------------------------
// factored composition

// One factor of a chain-factored joint law: p(outs | given). The table is
// indexed row-major as [given...][outs...].
struct Factor {
    std::vector<std::string> given;
    std::vector<std::string> outs;
    std::vector<int> given_sizes;
    std::vector<int> out_sizes;
    std::vector<double> table;
};

inline Factor source_factor(std::string name, const Pmf& p) {
    return Factor{{}, {std::move(name)}, {}, {p.size()}, p.p};
}

inline Factor joint_source_factor(std::vector<std::string> names, const JointPmf& j) {
    if (names.size() != j.vars.size())
        throw validation_error("joint_source_factor: name count mismatch");
    return Factor{{}, std::move(names), {}, j.sizes, j.t};
}

inline Factor kernel_factor(std::string in, std::string out, const Kernel& k) {
    return Factor{{std::move(in)}, {std::move(out)}, {k.in}, {k.out}, k.p};
}

inline Factor channel_factor(std::string x, std::string y1, std::string y2,
                             const BroadcastChannel& ch) {
    return Factor{{std::move(x)},
                  {std::move(y1), std::move(y2)},
                  {ch.x_size},
                  {ch.y1_size, ch.y2_size},
                  ch.w};
}

// Multiply chain factors into a dense joint over all produced variables.
// Every conditioning variable must be produced by an earlier factor.
inline JointPmf compose_chain(std::span<const Factor> parts) {
    if (parts.empty()) throw validation_error("compose_chain: no factors");

    std::vector<std::string> vars;
    std::vector<int> sizes;
    for (const auto& f : parts) {
        if (f.outs.size() != f.out_sizes.size() || f.given.size() != f.given_sizes.size())
            throw validation_error("compose_chain: malformed factor");
        std::size_t expect = 1;
        for (int s : f.given_sizes) expect *= static_cast<std::size_t>(s);
        for (int s : f.out_sizes) expect *= static_cast<std::size_t>(s);
        if (f.table.size() != expect) throw validation_error("compose_chain: dimension mismatch");
        for (std::size_t gi = 0; gi < f.given.size(); ++gi) {
            bool found = false;
            for (std::size_t v = 0; v < vars.size(); ++v) {
                if (vars[v] == f.given[gi]) {
                    if (sizes[v] != f.given_sizes[gi])
                        throw validation_error("compose_chain: dimension mismatch on '" +
                                               f.given[gi] + "'");
                    found = true;
                    break;
                }
            }
            if (!found)
                throw validation_error("compose_chain: dangling conditioning variable '" +
                                       f.given[gi] + "'");
        }
        for (std::size_t oi = 0; oi < f.outs.size(); ++oi) {
            for (const auto& v : vars)
                if (v == f.outs[oi])
                    throw validation_error("compose_chain: variable '" + f.outs[oi] +
                                           "' produced twice");
            vars.push_back(f.outs[oi]);
            sizes.push_back(f.out_sizes[oi]);
        }
    }

    std::size_t cells = 1;
    for (int s : sizes) {
        cells *= static_cast<std::size_t>(s);
        if (cells > kMaxCells) throw validation_error("compose_chain: tensor exceeds cell cap");
    }

    // per-factor flat-index weights for each joint axis
    struct FactorIndexer {
        const Factor* f;
        std::vector<std::size_t> weight;  // per joint axis
    };
    std::vector<FactorIndexer> idx;
    idx.reserve(parts.size());
    auto axis_of = [&](const std::string& name) {
        for (std::size_t v = 0; v < vars.size(); ++v)
            if (vars[v] == name) return v;
        throw validation_error("compose_chain: internal axis lookup failure");
    };
    for (const auto& f : parts) {
        FactorIndexer fi;
        fi.f = &f;
        fi.weight.assign(vars.size(), 0);
        std::size_t s = 1;
        for (int i = static_cast<int>(f.outs.size()) - 1; i >= 0; --i) {
            fi.weight[axis_of(f.outs[static_cast<std::size_t>(i)])] = s;
            s *= static_cast<std::size_t>(f.out_sizes[static_cast<std::size_t>(i)]);
        }
        for (int i = static_cast<int>(f.given.size()) - 1; i >= 0; --i) {
            fi.weight[axis_of(f.given[static_cast<std::size_t>(i)])] = s;
            s *= static_cast<std::size_t>(f.given_sizes[static_cast<std::size_t>(i)]);
        }
        idx.push_back(std::move(fi));
    }

    std::vector<double> t(cells, 0.0);
    const std::size_t nv = vars.size();
    std::vector<int> digit(nv, 0);
    std::vector<std::size_t> fidx(idx.size(), 0);
    for (std::size_t flat = 0; flat < cells; ++flat) {
        double prod = 1.0;
        for (std::size_t k = 0; k < idx.size(); ++k) prod *= idx[k].f->table[fidx[k]];
        t[flat] = prod;
        for (int v = static_cast<int>(nv) - 1; v >= 0; --v) {
            const std::size_t vu = static_cast<std::size_t>(v);
            if (++digit[vu] < sizes[vu]) {
                for (std::size_t k = 0; k < idx.size(); ++k) fidx[k] += idx[k].weight[vu];
                break;
            }
            digit[vu] = 0;
            for (std::size_t k = 0; k < idx.size(); ++k)
                fidx[k] -= idx[k].weight[vu] * static_cast<std::size_t>(sizes[vu] - 1);
        }
    }

    JointPmf out{std::move(vars), std::move(sizes), std::move(t)};
    validate_pmf(out.t, "compose_chain result");
    return out;
}

inline JointPmf compose_chain(std::initializer_list<Factor> parts) {
    std::vector<Factor> v(parts);
    return compose_chain(std::span<const Factor>(v));
}

// -------------------------------------------------------------------------
// physical degradedness test

struct DegradednessCheck {
    bool degraded = false;
    Kernel y2_given_y1;  // fitted q(y2|y1), valid also when the check fails
    double residual = 0.0;
};

// Tests whether p(y1,y2|x) factors as p(y1|x) q(y2|y1). The candidate q is
// the p(x,y1)-weighted average of p(y2|y1,x) over a uniform input, and the
// residual is the worst deviation over inputs with p(y1|x) > tol.
inline DegradednessCheck is_physically_degraded(const BroadcastChannel& ch, double tol = 1e-9) {
    const int nx = ch.x_size, n1 = ch.y1_size, n2 = ch.y2_size;
    std::vector<double> mass_y1(static_cast<std::size_t>(n1), 0.0);
    std::vector<double> avg(static_cast<std::size_t>(n1) * n2, 0.0);
    for (int x = 0; x < nx; ++x)
        for (int a = 0; a < n1; ++a)
            for (int b = 0; b < n2; ++b) {
                avg[static_cast<std::size_t>(a) * n2 + b] += ch.at(x, a, b);
                mass_y1[static_cast<std::size_t>(a)] += ch.at(x, a, b);
            }
    std::vector<double> q(static_cast<std::size_t>(n1) * n2, 0.0);
    for (int a = 0; a < n1; ++a) {
        if (mass_y1[static_cast<std::size_t>(a)] > 0.0) {
            for (int b = 0; b < n2; ++b)
                q[static_cast<std::size_t>(a) * n2 + b] =
                    avg[static_cast<std::size_t>(a) * n2 + b] / mass_y1[static_cast<std::size_t>(a)];
        } else {
            for (int b = 0; b < n2; ++b) q[static_cast<std::size_t>(a) * n2 + b] = 1.0 / n2;
        }
    }

    double residual = 0.0;
    for (int x = 0; x < nx; ++x)
        for (int a = 0; a < n1; ++a) {
            double py1x = 0.0;
            for (int b = 0; b < n2; ++b) py1x += ch.at(x, a, b);
            if (py1x <= tol) continue;
            for (int b = 0; b < n2; ++b) {
                const double dev =
                    std::abs(ch.at(x, a, b) / py1x - q[static_cast<std::size_t>(a) * n2 + b]);
                residual = std::max(residual, dev);
            }
        }

    DegradednessCheck res;
    res.residual = residual;
    res.degraded = residual <= tol;
    // renormalize rows exactly before constructing the Kernel
    for (int a = 0; a < n1; ++a) {
        double s = 0.0;
        for (int b = 0; b < n2; ++b) s += q[static_cast<std::size_t>(a) * n2 + b];
        for (int b = 0; b < n2; ++b) q[static_cast<std::size_t>(a) * n2 + b] /= s;
    }
    res.y2_given_y1 = Kernel(n1, n2, std::move(q));
    return res;
}

}  // namespace coopcast
