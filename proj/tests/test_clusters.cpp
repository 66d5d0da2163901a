#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "clustergibbs/clusters.hpp"
#include "clustergibbs/generators.hpp"

using namespace clustergibbs;

namespace {

// Multisets of weight m by direct enumeration over all index tuples.
std::vector<Cluster> brute_force(int j, int m, const TermGraph& g) {
    std::set<Cluster> found;
    const int t = static_cast<int>(g.num_terms());
    std::vector<int> pick(static_cast<std::size_t>(m), 0);
    while (true) {
        const Cluster w = Cluster::from_indices(pick, g);
        if (w.touches(j) && is_connected(w, g)) found.insert(w);
        int pos = 0;
        while (pos < m && ++pick[pos] == t) pick[pos++] = 0;
        if (pos == m) break;
    }
    return {found.begin(), found.end()};
}

// Every subset of at most s terms, connected and containing a term on j.
std::set<TermSet> brute_force_sets(int j, int s, const TermGraph& g) {
    std::set<TermSet> out;
    const int t = static_cast<int>(g.num_terms());
    for (unsigned mask = 1; mask < (1u << t); ++mask) {
        if (std::popcount(mask) > s) continue;
        std::vector<int> idx;
        for (int a = 0; a < t; ++a)
            if (mask >> a & 1) idx.push_back(a);
        const Cluster w = Cluster::from_indices(idx, g);
        if (w.touches(j) && is_connected(w, g)) out.insert(idx);
    }
    return out;
}

// ZZZZ plaquettes on a rows x cols qubit lattice.
HamiltonianSpec plaquettes(int rows, int cols) {
    std::vector<Term> terms;
    for (int r = 0; r + 1 < rows; ++r)
        for (int c = 0; c + 1 < cols; ++c) {
            const int q = r * cols + c;
            terms.push_back({0.5, PauliString({{q, Letter::Z}, {q + 1, Letter::Z}, {q + cols, Letter::Z}, {q + cols + 1, Letter::Z}})});
        }
    return make_spec(rows * cols, terms);
}

} // namespace

TEST(Clusters, BasicProperties) {
    const auto spec = plaquettes(4, 4); // 9 plaquettes, indices row-major
    const TermGraph g(spec);
    // Plaquettes 0, 1, 2 along the top row, 4 in the middle, 7 and 8 at the bottom.
    const Cluster w({{0, 3}, {1, 2}, {2, 1}, {4, 2}, {7, 1}, {8, 1}}, g);
    EXPECT_EQ(w.weight(), 10);
    EXPECT_EQ(w.factorial(), 24.0);
    EXPECT_TRUE(is_connected(w, g));
    EXPECT_TRUE(w.touches(0));
    EXPECT_FALSE(w.touches(12));
    EXPECT_EQ(w.multiplicity(1), 2);
    EXPECT_EQ(w.multiplicity(3), 0);
    EXPECT_DOUBLE_EQ(w.coefficient_power(spec), std::pow(0.5, 10));

    const Cluster corners({{0, 1}, {8, 1}}, g);
    EXPECT_FALSE(is_connected(corners, g));
    EXPECT_TRUE(is_connected(corners.united(Cluster({{4, 1}}, g), g), g));
    EXPECT_THROW(Cluster({{9, 1}}, g), PreconditionError);
}

TEST(Clusters, Compositions) {
    int count = 0;
    detail::for_each_composition(6, 3, [&](const std::vector<int>& c) {
        EXPECT_EQ(c[0] + c[1] + c[2], 6);
        ++count;
    });
    EXPECT_EQ(count, 10); // C(5, 2)
}

TEST(Clusters, SetSearchMatchesBruteForce) {
    Random rng(21);
    for (int t = 0; t < 12; ++t) {
        const auto spec = t % 2 ? generators::random_grid(2, 3, rng) : generators::random_chain(5, rng);
        const TermGraph g(spec);
        if (g.num_terms() > 18) continue;
        for (int j = 0; j < spec.num_qubits; ++j) {
            const int anchor[] = {j};
            const auto sets = connected_term_sets(g, anchor, 4);
            const std::set<TermSet> unique(sets.begin(), sets.end());
            ASSERT_EQ(unique.size(), sets.size()) << "duplicate set";
            ASSERT_EQ(unique, brute_force_sets(j, 4, g));
        }
    }
}

TEST(Clusters, EnumerationMatchesBruteForce) {
    Random rng(22);
    std::vector<HamiltonianSpec> models{generators::random_chain(3, rng), generators::random_chain(4, rng),
                                        generators::transverse_ising(4, generators::grid_edges(2, 2), 1.0, 0.5)};
    for (const auto& spec : models) {
        const TermGraph g(spec);
        ASSERT_LE(g.num_terms(), 8u);
        for (int j = 0; j < spec.num_qubits; ++j)
            for (int m = 1; m <= 5; ++m) ASSERT_EQ(enumerate_connected(j, m, g), brute_force(j, m, g));
    }
}

TEST(Clusters, RegionAnchorsKeepComponentsOnTheRegion) {
    Random rng(23);
    const auto spec = generators::random_chain(8, rng);
    const TermGraph g(spec);
    const int region[] = {1, 5};
    for (const auto& s : connected_term_sets(g, region, 4)) {
        // Each connected component of s touches qubit 1 or 5.
        const Cluster w = Cluster::from_indices(s, g);
        for (int a : s) {
            std::vector<int> comp{a};
            bool changed = true;
            while (changed) {
                changed = false;
                for (int b : s)
                    if (std::find(comp.begin(), comp.end(), b) == comp.end())
                        for (int c : std::vector<int>(comp))
                            if (g.adjacent(b, c)) {
                                comp.push_back(b);
                                changed = true;
                                break;
                            }
            }
            const Cluster cw = Cluster::from_indices(comp, g);
            ASSERT_TRUE(cw.touches(1) || cw.touches(5));
        }
        (void)w;
    }
    const auto pair = enumerate_connected_pair(1, 3, 3, g);
    for (const auto& w : pair) EXPECT_TRUE(w.touches(1) && w.touches(3) && is_connected(w, g));
}

TEST(Clusters, CountWithinBound) {
    Random rng(24);
    const auto spec = generators::random_grid(3, 3, rng);
    const TermGraph g(spec);
    const int dd = overlap_degree(spec, DegreeMode::strict);
    for (int m = 1; m <= 5; ++m)
        EXPECT_LE(static_cast<double>(enumerate_connected(4, m, g).size()), std::pow(std::numbers::e * dd, m));
}

TEST(Clusters, CacheReturnsSameSets) {
    Random rng(25);
    const auto spec = generators::random_chain(6, rng);
    const TermGraph g(spec);
    ClusterCache cache;
    const auto a = cache.term_sets(g, {3, 1}, 3);
    const auto b = cache.term_sets(g, {1, 3}, 3);
    EXPECT_EQ(a.get(), b.get());
    EXPECT_EQ(cache.size(), 1u);
    const int region[] = {1, 3};
    EXPECT_EQ(*a, connected_term_sets(g, region, 3));
}
