#pragma once

// Model families used by the verification suite, the benchmarks and the
// bundled model files.

#include <string>
#include <utility>
#include <vector>

#include "clustergibbs/model.hpp"
#include "clustergibbs/pauli.hpp"
#include "clustergibbs/rng.hpp"

namespace clustergibbs::generators {

using Edge = std::pair<int, int>;

inline std::vector<Edge> chain_edges(int n) {
    std::vector<Edge> e;
    for (int q = 0; q + 1 < n; ++q) e.emplace_back(q, q + 1);
    return e;
}

// Row-major rows x cols lattice, nearest neighbours.
inline std::vector<Edge> grid_edges(int rows, int cols) {
    std::vector<Edge> e;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const int q = r * cols + c;
            if (c + 1 < cols) e.emplace_back(q, q + 1);
            if (r + 1 < rows) e.emplace_back(q, q + cols);
        }
    return e;
}

// One random two-site Pauli per edge and one random field per site, all
// coefficients uniform in [-1, 1]. With real_only every term has an even
// number of Y letters, so H is a real matrix (the dense oracle is faster).
inline HamiltonianSpec random_model(int n, const std::vector<Edge>& edges, Random& rng, bool real_only = false) {
    static constexpr Letter letters[3] = {Letter::X, Letter::Y, Letter::Z};
    static constexpr Letter real_pairs[5][2] = {{Letter::X, Letter::X},
                                                {Letter::X, Letter::Z},
                                                {Letter::Z, Letter::X},
                                                {Letter::Z, Letter::Z},
                                                {Letter::Y, Letter::Y}};
    std::vector<Term> terms;
    for (const auto& [a, b] : edges) {
        Letter la, lb;
        if (real_only) {
            const auto& pick = real_pairs[rng.below(5)];
            la = pick[0];
            lb = pick[1];
        } else {
            la = letters[rng.below(3)];
            lb = letters[rng.below(3)];
        }
        terms.push_back({rng.between(-1.0, 1.0), PauliString({{a, la}, {b, lb}})});
    }
    for (int q = 0; q < n; ++q) {
        const Letter l = real_only ? (rng.chance(0.5) ? Letter::X : Letter::Z) : letters[rng.below(3)];
        terms.push_back({rng.between(-1.0, 1.0), PauliString::single(q, l)});
    }
    return make_spec(n, terms, edges);
}

inline HamiltonianSpec random_chain(int n, Random& rng, bool real_only = false) {
    return random_model(n, chain_edges(n), rng, real_only);
}

inline HamiltonianSpec random_grid(int rows, int cols, Random& rng, bool real_only = false) {
    return random_model(rows * cols, grid_edges(rows, cols), rng, real_only);
}

// Transverse-field Ising: -J sum Z_a Z_b - h sum X_q.
inline HamiltonianSpec transverse_ising(int n, const std::vector<Edge>& edges, double j, double h) {
    std::vector<Term> terms;
    for (const auto& [a, b] : edges) terms.push_back({-j, PauliString({{a, Letter::Z}, {b, Letter::Z}})});
    for (int q = 0; q < n; ++q) terms.push_back({-h, PauliString::single(q, Letter::X)});
    return make_spec(n, terms, edges);
}

} // namespace clustergibbs::generators
