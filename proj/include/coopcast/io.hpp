// Channel-spec ingestion, frontier/witness serialization, and the round-trip
// audit. JSON for specs and witnesses, CSV for curves; doubles serialize at
// 17 significant digits so files round-trip losslessly.

#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "coopcast/common_message.hpp"
#include "coopcast/degraded.hpp"
#include "coopcast/df_sim.hpp"
#include "coopcast/general.hpp"
#include "coopcast/prob.hpp"

namespace coopcast {

using json = nlohmann::ordered_json;

inline std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// -------------------------------------------------------------------------
// channel specs

inline json channel_to_json(const BroadcastChannel& ch) {
    json j;
    if (!ch.name.empty()) j["name"] = ch.name;
    j["x_size"] = ch.x_size;
    j["y1_size"] = ch.y1_size;
    j["y2_size"] = ch.y2_size;
    json trans = json::array();
    for (int x = 0; x < ch.x_size; ++x) {
        json plane = json::array();
        for (int a = 0; a < ch.y1_size; ++a) {
            json row = json::array();
            for (int b = 0; b < ch.y2_size; ++b) row.push_back(ch.at(x, a, b));
            plane.push_back(std::move(row));
        }
        trans.push_back(std::move(plane));
    }
    j["transition"] = std::move(trans);
    j["c12"] = ch.c12;
    j["c21"] = ch.c21;
    return j;
}

inline BroadcastChannel channel_from_json(const json& j) {
    if (!j.is_object()) throw parse_error("channel spec: expected a JSON object");
    for (const char* field : {"x_size", "y1_size", "y2_size", "transition", "c12", "c21"})
        if (!j.contains(field))
            throw parse_error(std::string("channel spec: missing field '") + field + "'");
    int nx, n1, n2;
    double c12, c21;
    try {
        nx = j.at("x_size").get<int>();
        n1 = j.at("y1_size").get<int>();
        n2 = j.at("y2_size").get<int>();
        c12 = j.at("c12").get<double>();
        c21 = j.at("c21").get<double>();
    } catch (const json::exception& e) {
        throw parse_error(std::string("channel spec: ") + e.what());
    }
    const auto& trans = j.at("transition");
    if (!trans.is_array() || static_cast<int>(trans.size()) != nx)
        throw parse_error("channel spec: transition must be an [x][y1][y2] array");
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(nx) * n1 * n2);
    for (int x = 0; x < nx; ++x) {
        const auto& plane = trans.at(static_cast<std::size_t>(x));
        if (!plane.is_array() || static_cast<int>(plane.size()) != n1)
            throw parse_error("channel spec: transition[" + std::to_string(x) + "] has wrong shape");
        for (int a = 0; a < n1; ++a) {
            const auto& row = plane.at(static_cast<std::size_t>(a));
            if (!row.is_array() || static_cast<int>(row.size()) != n2)
                throw parse_error("channel spec: transition[" + std::to_string(x) + "][" +
                                  std::to_string(a) + "] has wrong shape");
            for (int b = 0; b < n2; ++b) {
                if (!row.at(static_cast<std::size_t>(b)).is_number())
                    throw parse_error("channel spec: non-numeric transition entry");
                w.push_back(row.at(static_cast<std::size_t>(b)).get<double>());
            }
        }
    }
    std::string name = j.value("name", std::string{});
    return BroadcastChannel(nx, n1, n2, std::move(w), c12, c21, std::move(name));
}

namespace detail {

inline std::map<std::string, std::string> parse_query(const std::string& q) {
    std::map<std::string, std::string> out;
    std::size_t pos = 0;
    while (pos < q.size()) {
        const std::size_t amp = q.find('&', pos);
        const std::string kv = q.substr(pos, amp == std::string::npos ? std::string::npos : amp - pos);
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw parse_error("builtin channel: malformed query parameter '" + kv + "'");
        out[kv.substr(0, eq)] = kv.substr(eq + 1);
        if (amp == std::string::npos) break;
        pos = amp + 1;
    }
    return out;
}

inline double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw parse_error("");
        return v;
    } catch (...) {
        throw parse_error("builtin channel: bad numeric value for " + what);
    }
}

}  // namespace detail

// Load a channel from a JSON file or a builtin generator pseudo-path:
//   builtin:bsbc?p1=&p2=   cascade X -> BSC(p1) -> Y1 -> BSC(p2) -> Y2
//   builtin:bsbc2?p=       two independent identical BSCs from X
// Builtins start with c12 = c21 = 0; callers override via with_links.
inline BroadcastChannel load_channel(const std::string& spec) {
    if (spec.rfind("builtin:", 0) == 0) {
        const std::string rest = spec.substr(8);
        const std::size_t qm = rest.find('?');
        const std::string name = rest.substr(0, qm);
        auto params = detail::parse_query(qm == std::string::npos ? "" : rest.substr(qm + 1));
        if (name == "bsbc") {
            if (!params.count("p1") || !params.count("p2"))
                throw parse_error("builtin:bsbc needs p1= and p2=");
            const double p1 = detail::parse_double(params["p1"], "p1");
            const double p2 = detail::parse_double(params["p2"], "p2");
            params.erase("p1");
            params.erase("p2");
            if (!params.empty())
                throw parse_error("builtin:bsbc: unknown parameter '" + params.begin()->first + "'");
            if (p1 < 0 || p1 > 1 || p2 < 0 || p2 > 1)
                throw validation_error("builtin:bsbc: crossover outside [0,1]");
            return make_bsbc_cascade(p1, p2);
        }
        if (name == "bsbc2") {
            if (!params.count("p")) throw parse_error("builtin:bsbc2 needs p=");
            const double p = detail::parse_double(params["p"], "p");
            params.erase("p");
            if (!params.empty())
                throw parse_error("builtin:bsbc2: unknown parameter '" + params.begin()->first + "'");
            if (p < 0 || p > 1) throw validation_error("builtin:bsbc2: crossover outside [0,1]");
            return make_bsbc_pair(p);
        }
        throw parse_error("unknown builtin channel '" + name + "'");
    }
    std::ifstream in(spec);
    if (!in) throw parse_error("cannot open channel spec '" + spec + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw parse_error("channel spec '" + spec + "': " + e.what());
    }
    return channel_from_json(j);
}

// -------------------------------------------------------------------------
// witness payloads

inline json pmf_to_json(const Pmf& p) {
    json a = json::array();
    for (double v : p.p) a.push_back(v);
    return a;
}
inline Pmf pmf_from_json(const json& a) {
    if (!a.is_array() || a.empty()) throw parse_error("witness: expected a pmf array");
    std::vector<double> v;
    for (const auto& x : a) v.push_back(x.get<double>());
    return Pmf(std::move(v));
}
inline json kernel_to_json(const Kernel& k) {
    json rows = json::array();
    for (int i = 0; i < k.in; ++i) {
        json row = json::array();
        for (int o = 0; o < k.out; ++o) row.push_back(k.at(i, o));
        rows.push_back(std::move(row));
    }
    return rows;
}
inline Kernel kernel_from_json(const json& rows) {
    if (!rows.is_array() || rows.empty()) throw parse_error("witness: expected a kernel array");
    const int in = static_cast<int>(rows.size());
    const int out = static_cast<int>(rows.at(0).size());
    std::vector<double> p;
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != out) throw parse_error("witness: ragged kernel rows");
        for (const auto& x : row) p.push_back(x.get<double>());
    }
    return Kernel(in, out, std::move(p));
}

inline json witness_to_json(const DegradedWitness& w) {
    json j;
    j["p_u"] = pmf_to_json(w.p_u);
    j["p_x_given_u"] = kernel_to_json(w.p_x_given_u);
    return j;
}
inline json witness_to_json(const MartonWitness& w) {
    json j;
    json cube = json::array();
    const int cu = w.p_uvx.sizes[0], cv = w.p_uvx.sizes[1], nx = w.p_uvx.sizes[2];
    for (int u = 0; u < cu; ++u) {
        json plane = json::array();
        for (int v = 0; v < cv; ++v) {
            json row = json::array();
            for (int x = 0; x < nx; ++x)
                row.push_back(w.p_uvx.t[(static_cast<std::size_t>(u) * cv + v) * nx + x]);
            plane.push_back(std::move(row));
        }
        cube.push_back(std::move(plane));
    }
    j["p_uvx"] = std::move(cube);
    j["p_uhat_given_y2"] = kernel_to_json(w.uhat_given_y2);
    j["p_vhat_given_y1"] = kernel_to_json(w.vhat_given_y1);
    return j;
}
inline json witness_to_json(const PxWitness& w) {
    json j;
    j["p_x"] = pmf_to_json(w.p_x);
    return j;
}
inline json witness_to_json(const CommonWitness& w) {
    json j;
    j["p_x"] = pmf_to_json(w.p_x);
    j["p_uhat_given_y2"] = kernel_to_json(w.uhat_given_y2);
    j["p_vhat_given_y1"] = kernel_to_json(w.vhat_given_y1);
    return j;
}

inline DegradedWitness degraded_witness_from_json(const json& j) {
    return DegradedWitness{pmf_from_json(j.at("p_u")), kernel_from_json(j.at("p_x_given_u"))};
}
inline MartonWitness marton_witness_from_json(const json& j) {
    const auto& cube = j.at("p_uvx");
    const int cu = static_cast<int>(cube.size());
    const int cv = static_cast<int>(cube.at(0).size());
    const int nx = static_cast<int>(cube.at(0).at(0).size());
    std::vector<double> t;
    for (const auto& plane : cube)
        for (const auto& row : plane)
            for (const auto& x : row) t.push_back(x.get<double>());
    return MartonWitness{make_joint({"u", "v", "x"}, {cu, cv, nx}, std::move(t)),
                         kernel_from_json(j.at("p_uhat_given_y2")),
                         kernel_from_json(j.at("p_vhat_given_y1"))};
}
inline PxWitness px_witness_from_json(const json& j) {
    return PxWitness{pmf_from_json(j.at("p_x"))};
}

// -------------------------------------------------------------------------
// frontier CSV + witness file

inline std::string witness_id(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "w%03d", index);
    return buf;
}

template <class Witness>
std::string frontier_to_csv(const RateFrontier<Witness>& f) {
    std::string out = "lambda,r1,r2,witness_id\n";
    for (const auto& pt : f.points) {
        out += format_g17(pt.lambda);
        out += ',';
        out += format_g17(pt.r1);
        out += ',';
        out += format_g17(pt.r2);
        out += ',';
        out += witness_id(pt.witness);
        out += '\n';
    }
    return out;
}

template <class Witness>
json witness_file_json(const RateFrontier<Witness>& f, const std::string& region,
                       const BroadcastChannel& ch, const json& params = json::object()) {
    json j;
    j["format"] = "coopcast-witnesses-v1";
    j["region"] = region;
    j["channel"] = channel_to_json(ch);
    j["params"] = params;
    json w = json::object();
    for (std::size_t i = 0; i < f.witnesses.size(); ++i)
        w[witness_id(static_cast<int>(i))] = witness_to_json(f.witnesses[i]);
    j["witnesses"] = std::move(w);
    return j;
}

struct FrontierRow {
    double lambda = 0.0, r1 = 0.0, r2 = 0.0;
    std::string witness_id;
};

inline std::vector<FrontierRow> parse_frontier_csv(const std::string& text) {
    std::vector<FrontierRow> rows;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw parse_error("frontier csv: empty file");
    if (line != "lambda,r1,r2,witness_id")
        throw parse_error("frontier csv: unexpected header '" + line + "'");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        FrontierRow row;
        std::istringstream ls(line);
        std::string field;
        try {
            std::getline(ls, field, ',');
            row.lambda = std::stod(field);
            std::getline(ls, field, ',');
            row.r1 = std::stod(field);
            std::getline(ls, field, ',');
            row.r2 = std::stod(field);
        } catch (...) {
            throw parse_error("frontier csv: bad row '" + line + "'");
        }
        if (!std::getline(ls, row.witness_id, ','))
            throw parse_error("frontier csv: bad row '" + line + "'");
        rows.push_back(std::move(row));
    }
    return rows;
}

// -------------------------------------------------------------------------
// round-trip audit: re-evaluate each frontier row through the matching point
// evaluator and compare against the serialized rates

struct AuditResult {
    bool ok = true;
    int rows = 0;
    std::string message;
};

inline AuditResult audit_frontier(const std::string& csv_text, const json& witness_file,
                                  double tol = 1e-9) {
    const auto rows = parse_frontier_csv(csv_text);
    const std::string region = witness_file.at("region").get<std::string>();
    const BroadcastChannel ch = channel_from_json(witness_file.at("channel"));
    const auto& witnesses = witness_file.at("witnesses");

    AuditResult res;
    res.rows = static_cast<int>(rows.size());
    for (const auto& row : rows) {
        if (!witnesses.contains(row.witness_id)) {
            res.ok = false;
            res.message = "missing witness " + row.witness_id;
            return res;
        }
        const json& wj = witnesses.at(row.witness_id);
        RatePair rp;
        if (region == "degraded") {
            const auto w = degraded_witness_from_json(wj);
            const auto r = degraded_rate_point(w.p_u, w.p_x_given_u, ch);
            rp = {r.r1, r.r02};
        } else if (region == "degraded-nocoop") {
            const auto w = degraded_witness_from_json(wj);
            const auto r = nocoop_degraded_rate_point(w.p_u, w.p_x_given_u, ch);
            rp = {r.r1, r.r02};
        } else if (region == "marton-coop" || region == "marton") {
            const auto w = marton_witness_from_json(wj);
            rp = marton_rate_pair(w, ch, row.lambda);
        } else if (region == "cutset") {
            const auto w = px_witness_from_json(wj);
            rp = cutset_rate_pair(w, ch, row.lambda);
        } else {
            res.ok = false;
            res.message = "unknown region kind '" + region + "'";
            return res;
        }
        if (std::abs(rp.r1 - row.r1) > tol || std::abs(rp.r2 - row.r2) > tol) {
            res.ok = false;
            res.message = "row with lambda=" + format_g17(row.lambda) + " reproduces (" +
                          format_g17(rp.r1) + "," + format_g17(rp.r2) + ") vs stored (" +
                          format_g17(row.r1) + "," + format_g17(row.r2) + ")";
            return res;
        }
    }
    return res;
}

}  // namespace coopcast
