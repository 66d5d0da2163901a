#pragma once

// Hamiltonian specification H = sum_a coeff_a P_a over Pauli strings P_a, its
// validation and loading, and the derived constants (locality k, overlap
// degree dd, critical inverse temperature beta_*) that gate every guarantee.
//
// Model file (UTF-8 JSON):
//
//     {"num_qubits": 4,
//      "terms": [{"pauli": "Z0 Z1", "coeff": -0.5}, ...],
//      "adjacency": [[0, 1], [1, 2], ...]}          // optional
//
// Duplicate Pauli strings are merged by summing coefficients. Strict loading
// rejects |coeff| > 1 and unknown keys; lenient loading records a warning.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "clustergibbs/errors.hpp"
#include "clustergibbs/pauli.hpp"

namespace clustergibbs {

struct Term {
    double coeff = 0.0;
    PauliString pauli;
};

struct HamiltonianSpec {
    int num_qubits = 0;
    std::vector<Term> terms;
    std::optional<std::vector<std::pair<int, int>>> adjacency;
};

struct LoadOptions {
    bool strict = true;
};

enum class DegreeMode { strict, empirical };

inline const char* to_string(DegreeMode m) { return m == DegreeMode::strict ? "strict" : "empirical"; }

// Validates and canonicalizes a Hamiltonian: merges duplicate strings, folds a
// -1 phase into the coefficient, rejects anti-Hermitian terms and qubits >= N.
inline HamiltonianSpec make_spec(int num_qubits, const std::vector<Term>& terms,
                                 std::optional<std::vector<std::pair<int, int>>> adjacency = std::nullopt,
                                 LoadOptions options = {}, std::vector<std::string>* warnings = nullptr) {
    if (num_qubits <= 0) throw ModelError("num_qubits must be positive");
    auto warn = [&](const std::string& w) {
        if (warnings) warnings->push_back(w);
    };

    std::vector<Term> merged;
    std::map<std::map<int, Letter>, std::size_t> index;
    for (const auto& t : terms) {
        if (!std::isfinite(t.coeff)) throw ModelError("non-finite coefficient");
        if (!t.pauli.is_hermitian())
            throw ModelError("term '" + format_pauli(t.pauli) + "' is not Hermitian");
        for (int q : t.pauli.support())
            if (q >= num_qubits)
                throw ModelError("term '" + format_pauli(t.pauli) + "' acts on qubit " + std::to_string(q) +
                                 " >= num_qubits");
        const double c = t.pauli.phase() == 2 ? -t.coeff : t.coeff;
        auto [it, inserted] = index.emplace(t.pauli.letters(), merged.size());
        if (inserted) merged.push_back({c, PauliString(t.pauli.letters())});
        else merged[it->second].coeff += c;
    }
    for (const auto& t : merged) {
        if (std::abs(t.coeff) > 1.0) {
            const std::string msg = "term '" + format_pauli(t.pauli) + "' has |coeff| = " +
                                    std::to_string(std::abs(t.coeff)) + " > 1";
            if (options.strict) throw ModelError(msg);
            warn(msg);
        }
    }

    if (adjacency) {
        for (const auto& [u, v] : *adjacency)
            if (u < 0 || v < 0 || u >= num_qubits || v >= num_qubits)
                throw ModelError("adjacency edge references a qubit outside [0, num_qubits)");
    }

    HamiltonianSpec spec{num_qubits, std::move(merged), std::move(adjacency)};

    if (spec.adjacency) {
        // Geometric locality is advisory: the expansion consumes only k and dd.
        std::vector<std::vector<int>> g(num_qubits);
        for (const auto& [u, v] : *spec.adjacency) {
            g[u].push_back(v);
            g[v].push_back(u);
        }
        std::size_t k = 1;
        for (const auto& t : spec.terms) k = std::max(k, t.pauli.weight());
        for (const auto& t : spec.terms) {
            auto sup = t.pauli.support();
            if (sup.size() < 2) continue;
            std::vector<int> dist(num_qubits, -1);
            std::queue<int> bfs;
            dist[sup.front()] = 0;
            bfs.push(sup.front());
            while (!bfs.empty()) {
                int u = bfs.front();
                bfs.pop();
                for (int v : g[u])
                    if (dist[v] < 0) {
                        dist[v] = dist[u] + 1;
                        bfs.push(v);
                    }
            }
            for (int q : sup) {
                if (dist[q] < 0 || static_cast<std::size_t>(dist[q]) > k) {
                    warn("term '" + format_pauli(t.pauli) + "' spans a large distance in the adjacency graph");
                    break;
                }
            }
        }
    }
    return spec;
}

inline HamiltonianSpec parse_model(const nlohmann::json& j, LoadOptions options = {},
                                   std::vector<std::string>* warnings = nullptr) {
    if (!j.is_object()) throw ModelError("model must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (key != "num_qubits" && key != "terms" && key != "adjacency") {
            if (options.strict) throw ModelError("unknown key '" + key + "'");
            if (warnings) warnings->push_back("ignoring unknown key '" + key + "'");
        }
    }
    if (!j.contains("num_qubits") || !j["num_qubits"].is_number_integer())
        throw ModelError("num_qubits must be an integer");
    if (!j.contains("terms") || !j["terms"].is_array()) throw ModelError("terms must be an array");

    std::vector<Term> terms;
    for (const auto& t : j["terms"]) {
        if (!t.is_object() || !t.contains("pauli") || !t.contains("coeff") || !t["pauli"].is_string() ||
            !t["coeff"].is_number())
            throw ModelError("each term needs a string 'pauli' and a numeric 'coeff'");
        for (const auto& [key, value] : t.items()) {
            (void)value;
            if (key != "pauli" && key != "coeff") {
                if (options.strict) throw ModelError("unknown term key '" + key + "'");
                if (warnings) warnings->push_back("ignoring unknown term key '" + key + "'");
            }
        }
        try {
            terms.push_back({t["coeff"].get<double>(), parse_pauli(t["pauli"].get<std::string>())});
        } catch (const ParseError& e) {
            throw ModelError(std::string("bad pauli string: ") + e.what());
        }
    }

    std::optional<std::vector<std::pair<int, int>>> adjacency;
    if (j.contains("adjacency")) {
        if (!j["adjacency"].is_array()) throw ModelError("adjacency must be an array of pairs");
        adjacency.emplace();
        for (const auto& e : j["adjacency"]) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
                throw ModelError("adjacency entries must be [int, int]");
            adjacency->emplace_back(e[0].get<int>(), e[1].get<int>());
        }
    }
    return make_spec(j["num_qubits"].get<int>(), terms, std::move(adjacency), options, warnings);
}

inline HamiltonianSpec load_model(const std::filesystem::path& path, LoadOptions options = {},
                                  std::vector<std::string>* warnings = nullptr) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open model file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ModelError("malformed model file " + path.string() + ": " + e.what());
    }
    return parse_model(j, options, warnings);
}

inline nlohmann::json to_json(const HamiltonianSpec& spec) {
    nlohmann::json j;
    j["num_qubits"] = spec.num_qubits;
    j["terms"] = nlohmann::json::array();
    for (const auto& t : spec.terms) j["terms"].push_back({{"pauli", format_pauli(t.pauli)}, {"coeff", t.coeff}});
    if (spec.adjacency) {
        j["adjacency"] = nlohmann::json::array();
        for (const auto& [u, v] : *spec.adjacency) j["adjacency"].push_back({u, v});
    }
    return j;
}

// Terms as vertices, edges between terms with intersecting supports.
class TermGraph {
public:
    explicit TermGraph(const HamiltonianSpec& spec)
        : supports_(spec.terms.size()), on_qubit_(spec.num_qubits), neighbors_(spec.terms.size()) {
        for (std::size_t a = 0; a < spec.terms.size(); ++a) {
            supports_[a] = spec.terms[a].pauli.support();
            for (int q : supports_[a]) on_qubit_[q].push_back(static_cast<int>(a));
        }
        for (std::size_t a = 0; a < spec.terms.size(); ++a) {
            std::set<int> nb;
            for (int q : supports_[a])
                for (int b : on_qubit_[q])
                    if (b != static_cast<int>(a)) nb.insert(b);
            neighbors_[a].assign(nb.begin(), nb.end());
        }
    }

    std::size_t num_terms() const noexcept { return supports_.size(); }
    int num_qubits() const noexcept { return static_cast<int>(on_qubit_.size()); }

    // Sorted term indices adjacent to term `a`.
    const std::vector<int>& neighbors(int a) const { return neighbors_.at(a); }

    // Sorted term indices acting on qubit `q`.
    const std::vector<int>& terms_on(int q) const { return on_qubit_.at(q); }

    const std::vector<int>& support(int a) const { return supports_.at(a); }

    bool adjacent(int a, int b) const {
        const auto& nb = neighbors_.at(a);
        return std::binary_search(nb.begin(), nb.end(), b);
    }

private:
    std::vector<std::vector<int>> supports_;
    std::vector<std::vector<int>> on_qubit_;
    std::vector<std::vector<int>> neighbors_;
};

inline TermGraph term_overlap_graph(const HamiltonianSpec& spec) { return TermGraph(spec); }

// Max over terms of the number of other terms with an overlapping support.
// Strict mode first adjoins every single-site Pauli X_q, Y_q, Z_q (with zero
// coefficient) so the count reflects a model that contains all of them.
inline int overlap_degree(const HamiltonianSpec& spec, DegreeMode mode = DegreeMode::strict) {
    std::vector<std::vector<int>> supports;
    std::set<std::map<int, Letter>> present;
    for (const auto& t : spec.terms) {
        supports.push_back(t.pauli.support());
        present.insert(t.pauli.letters());
    }
    if (mode == DegreeMode::strict) {
        for (int q = 0; q < spec.num_qubits; ++q)
            for (Letter l : {Letter::X, Letter::Y, Letter::Z}) {
                std::map<int, Letter> single{{q, l}};
                if (!present.count(single)) supports.push_back({q});
            }
    }
    std::vector<std::vector<int>> on_qubit(spec.num_qubits);
    for (std::size_t a = 0; a < supports.size(); ++a)
        for (int q : supports[a]) on_qubit[q].push_back(static_cast<int>(a));

    // Virtual terms only enter the max in strict mode, where they are terms too.
    int dd = 0;
    std::vector<int> seen(supports.size(), -1);
    for (std::size_t a = 0; a < supports.size(); ++a) {
        int count = 0;
        seen[a] = static_cast<int>(a);
        for (int q : supports[a])
            for (int b : on_qubit[q])
                if (seen[b] != static_cast<int>(a)) {
                    seen[b] = static_cast<int>(a);
                    ++count;
                }
        dd = std::max(dd, count);
    }
    return dd;
}

// beta_* = 1 / (2 e^2 dd (dd + 1)), with dd = 0 treated as dd = 1.
inline double beta_star(int dd) {
    const double d = std::max(dd, 1);
    return 1.0 / (2.0 * std::numbers::e * std::numbers::e * d * (d + 1.0));
}

struct DerivedConstants {
    int k = 0;
    int dd = 0;
    double beta_star = 0.0;
    // Per-order growth constant of the coefficient computation: log(dd 2^{2k+1}).
    double c_enum = 0.0;
    DegreeMode mode = DegreeMode::strict;
};

inline int locality(const HamiltonianSpec& spec) {
    std::size_t k = 0;
    for (const auto& t : spec.terms) k = std::max(k, t.pauli.weight());
    return static_cast<int>(k);
}

inline DerivedConstants derive_constants(const HamiltonianSpec& spec, DegreeMode mode = DegreeMode::strict) {
    DerivedConstants c;
    c.mode = mode;
    c.k = locality(spec);
    c.dd = overlap_degree(spec, mode);
    c.beta_star = beta_star(c.dd);
    c.c_enum = std::log(static_cast<double>(std::max(c.dd, 1))) + (2.0 * c.k + 1.0) * std::numbers::ln2;
    return c;
}

// Graph distance between qubits, where two qubits are adjacent when some term
// acts on both. Returns -1 when unreachable.
inline int interaction_distance(const HamiltonianSpec& spec, int from, int to) {
    if (from == to) return 0;
    TermGraph g(spec);
    std::vector<int> dist(spec.num_qubits, -1);
    std::queue<int> bfs;
    dist[from] = 0;
    bfs.push(from);
    while (!bfs.empty()) {
        int u = bfs.front();
        bfs.pop();
        for (int a : g.terms_on(u))
            for (int v : g.support(a))
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    if (v == to) return dist[v];
                    bfs.push(v);
                }
    }
    return -1;
}

} // namespace clustergibbs
