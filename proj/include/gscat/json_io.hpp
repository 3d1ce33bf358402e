#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <utility>

#include <json.hpp>

#include "gscat/graph.hpp"

namespace gscat {

// Graph file schema:
//   {"n": <int>, "m": <int>,
//    "entries": [{"i": <int>, "j": <int>, "re": <float>, "im": <float>}, ...],
//    "tolerances": {...}}                                        (optional)
// Indices are 0-based; i <= j preferred; omitted entries are zero. Entries
// given for i <= j are mirrored by conjugation (Hermitian completion);
// explicitly given mirror pairs must be conjugate.

inline ToleranceConfig tolerances_from_json(const nlohmann::json& jt) {
    ToleranceConfig tol;
    auto take = [&](const char* key, double& field) {
        if (jt.contains(key)) {
            if (!jt.at(key).is_number()) throw ParseError(std::string("tolerance '") + key + "' must be a number");
            field = jt.at(key).get<double>();
        }
    };
    take("eps_herm", tol.eps_herm);
    take("eps_rank", tol.eps_rank);
    take("eps_root_cluster", tol.eps_root_cluster);
    take("eps_snap", tol.eps_snap);
    take("eps_unitary", tol.eps_unitary);
    take("quad_target", tol.quad_target);
    tol.validate();
    return tol;
}

inline ScatteringGraph graph_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("graph file must be a JSON object");
    for (const char* key : {"n", "m"}) {
        if (!j.contains(key) || !j.at(key).is_number_integer()) {
            throw ParseError(std::string("missing or non-integer field '") + key + "'");
        }
    }
    const int n = j.at("n").get<int>();
    const int m = j.at("m").get<int>();
    if (n < 1) throw ValidationError("n must be >= 1");
    if (m < 0) throw ValidationError("m must be >= 0");
    const int sz = n + m;

    ToleranceConfig tol;
    if (j.contains("tolerances")) tol = tolerances_from_json(j.at("tolerances"));

    Matrix hhat = Matrix::Zero(sz, sz);
    std::map<std::pair<int, int>, Complex> seen;
    if (j.contains("entries")) {
        if (!j.at("entries").is_array()) throw ParseError("'entries' must be an array");
        for (const auto& e : j.at("entries")) {
            if (!e.is_object() || !e.contains("i") || !e.contains("j")) {
                throw ParseError("each entry needs integer fields 'i' and 'j'");
            }
            if (!e.at("i").is_number_integer() || !e.at("j").is_number_integer()) {
                throw ParseError("entry indices must be integers");
            }
            const int i = e.at("i").get<int>();
            const int jj = e.at("j").get<int>();
            if (i < 0 || i >= sz || jj < 0 || jj >= sz) {
                throw ValidationError("entry index out of range");
            }
            const double re = e.value("re", 0.0);
            const double im = e.value("im", 0.0);
            if (!std::isfinite(re) || !std::isfinite(im)) {
                throw ValidationError("entry values must be finite");
            }
            const Complex w(re, im);
            if (i == jj && im != 0.0) {
                throw ValidationError("diagonal entries must be real");
            }
            if (auto it = seen.find({i, jj}); it != seen.end() && it->second != w) {
                throw ValidationError("conflicting duplicate entry");
            }
            if (auto it = seen.find({jj, i}); it != seen.end() && it->second != std::conj(w)) {
                throw ValidationError("explicit mirror entries must be conjugate");
            }
            seen[{i, jj}] = w;
            hhat(i, jj) = w;
            if (i != jj && seen.find({jj, i}) == seen.end()) {
                hhat(jj, i) = std::conj(w);
            }
        }
    }
    return ScatteringGraph(n, m, std::move(hhat), tol);
}

inline ScatteringGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open graph file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("malformed JSON in " + path + ": " + e.what());
    }
    return graph_from_json(j);
}

// Emits the upper triangle (i <= j); doubles serialize with shortest
// round-trip representation, so save-then-load is bit-exact.
inline nlohmann::json graph_to_json(const ScatteringGraph& g) {
    nlohmann::json j;
    j["n"] = g.n();
    j["m"] = g.m();
    auto entries = nlohmann::json::array();
    for (int i = 0; i < g.size(); ++i) {
        for (int jj = i; jj < g.size(); ++jj) {
            const Complex w = g.hhat()(i, jj);
            if (w == Complex(0.0, 0.0)) continue;
            nlohmann::json e;
            e["i"] = i;
            e["j"] = jj;
            e["re"] = w.real();
            e["im"] = w.imag();
            entries.push_back(e);
        }
    }
    j["entries"] = entries;
    return j;
}

inline void save_graph(const ScatteringGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open file for writing: " + path);
    out << graph_to_json(g).dump(2) << "\n";
}

}  // namespace gscat
