#pragma once

// Clusters: multisets of Hamiltonian terms, and enumeration of the connected
// ones anchored at a qubit (or a region of qubits).
//
// Enumeration happens in two stages. First, connected *sets* of distinct terms
// are grown from the anchor with an extension/exclusion search over the term
// overlap graph, which visits each connected set exactly once. Second, a set
// of s terms yields one cluster per composition of the weight m into s
// positive multiplicities.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <span>
#include <utility>
#include <vector>

#include "clustergibbs/errors.hpp"
#include "clustergibbs/model.hpp"

namespace clustergibbs {

// Sorted distinct term indices.
using TermSet = std::vector<int>;

class Cluster {
public:
    Cluster() = default;

    Cluster(const std::map<int, int>& multiplicities, const TermGraph& graph) {
        for (const auto& [a, mu] : multiplicities) {
            if (mu < 0) throw PreconditionError("Cluster: negative multiplicity");
            if (mu == 0) continue;
            if (a < 0 || static_cast<std::size_t>(a) >= graph.num_terms())
                throw PreconditionError("Cluster: unknown term index " + std::to_string(a));
            mult_.emplace_back(a, mu);
            weight_ += mu;
        }
        std::vector<int> sup;
        for (const auto& [a, mu] : mult_) {
            (void)mu;
            const auto& s = graph.support(a);
            sup.insert(sup.end(), s.begin(), s.end());
        }
        std::sort(sup.begin(), sup.end());
        sup.erase(std::unique(sup.begin(), sup.end()), sup.end());
        support_ = std::move(sup);
    }

    // The multiset {indices[0], indices[1], ...}; repeats raise the multiplicity.
    static Cluster from_indices(std::span<const int> indices, const TermGraph& graph) {
        std::map<int, int> m;
        for (int a : indices) ++m[a];
        return Cluster(m, graph);
    }

    // (term, multiplicity) pairs in ascending term order.
    const std::vector<std::pair<int, int>>& multiplicities() const noexcept { return mult_; }

    int weight() const noexcept { return weight_; }

    // prod_a mu(a)!
    double factorial() const {
        double f = 1.0;
        for (const auto& [a, mu] : mult_) {
            (void)a;
            for (int i = 2; i <= mu; ++i) f *= i;
        }
        return f;
    }

    const std::vector<int>& support() const noexcept { return support_; }

    bool touches(int qubit) const { return std::binary_search(support_.begin(), support_.end(), qubit); }

    TermSet terms() const {
        TermSet t;
        t.reserve(mult_.size());
        for (const auto& [a, mu] : mult_) {
            (void)mu;
            t.push_back(a);
        }
        return t;
    }

    int multiplicity(int a) const {
        auto it = std::lower_bound(mult_.begin(), mult_.end(), std::pair<int, int>{a, 0});
        return (it != mult_.end() && it->first == a) ? it->second : 0;
    }

    // lambda^W = prod_a coeff_a^{mu(a)}
    double coefficient_power(const HamiltonianSpec& spec) const {
        double p = 1.0;
        for (const auto& [a, mu] : mult_) p *= std::pow(spec.terms[a].coeff, mu);
        return p;
    }

    // Multiset union: multiplicities add.
    Cluster united(const Cluster& other, const TermGraph& graph) const {
        std::map<int, int> m(mult_.begin(), mult_.end());
        for (const auto& [a, mu] : other.mult_) m[a] += mu;
        return Cluster(m, graph);
    }

    friend bool operator==(const Cluster& x, const Cluster& y) { return x.mult_ == y.mult_; }
    friend bool operator<(const Cluster& x, const Cluster& y) {
        if (x.weight_ != y.weight_) return x.weight_ < y.weight_;
        return x.mult_ < y.mult_;
    }

private:
    std::vector<std::pair<int, int>> mult_;
    int weight_ = 0;
    std::vector<int> support_;
};

// True iff the distinct terms of W induce a connected subgraph of the overlap graph.
inline bool is_connected(const Cluster& w, const TermGraph& graph) {
    const TermSet t = w.terms();
    if (t.size() <= 1) return true;
    std::vector<char> reached(t.size(), 0);
    std::vector<std::size_t> stack{0};
    reached[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t v = 0; v < t.size(); ++v)
            if (!reached[v] && graph.adjacent(t[u], t[v])) {
                reached[v] = 1;
                ++count;
                stack.push_back(v);
            }
    }
    return count == t.size();
}

namespace detail {

class ConnectedSetSearch {
public:
    ConnectedSetSearch(const TermGraph& graph, int max_size)
        : graph_(graph), max_size_(max_size), state_(graph.num_terms(), kFree) {}

    std::vector<TermSet> run(std::span<const int> seed_qubits) {
        std::vector<int> roots;
        for (int q : seed_qubits) {
            if (q < 0 || q >= graph_.num_qubits())
                throw PreconditionError("anchor qubit " + std::to_string(q) + " out of range");
            for (int a : graph_.terms_on(q)) roots.push_back(a);
        }
        std::sort(roots.begin(), roots.end());
        roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
        for (int a : roots) state_[a] = kCandidate;
        std::vector<int> current;
        recurse(current, roots);
        std::sort(out_.begin(), out_.end(), [](const TermSet& x, const TermSet& y) {
            return x.size() != y.size() ? x.size() < y.size() : x < y;
        });
        return std::move(out_);
    }

private:
    enum : char { kFree, kCandidate, kChosen, kExcluded };

    void recurse(std::vector<int>& current, const std::vector<int>& candidates) {
        if (!current.empty()) {
            TermSet s = current;
            std::sort(s.begin(), s.end());
            out_.push_back(std::move(s));
        }
        if (static_cast<int>(current.size()) == max_size_) return;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            const int v = candidates[i];
            std::vector<int> next(candidates.begin() + static_cast<std::ptrdiff_t>(i) + 1, candidates.end());
            const std::size_t inherited = next.size();
            for (int w : graph_.neighbors(v))
                if (state_[w] == kFree) {
                    state_[w] = kCandidate;
                    next.push_back(w);
                }
            state_[v] = kChosen;
            current.push_back(v);
            recurse(current, next);
            current.pop_back();
            for (std::size_t k = inherited; k < next.size(); ++k) state_[next[k]] = kFree;
            state_[v] = kExcluded;
        }
        for (int v : candidates) state_[v] = kCandidate;
    }

    const TermGraph& graph_;
    int max_size_;
    std::vector<char> state_;
    std::vector<TermSet> out_;
};

// All ways to write `total` as an ordered sum of `parts` positive integers,
// in lexicographic order.
inline void for_each_composition(int total, int parts, const auto& fn) {
    if (parts <= 0 || total < parts) return;
    std::vector<int> c(parts);
    auto rec = [&](auto& self, int pos, int remaining) -> void {
        if (pos == parts - 1) {
            c[pos] = remaining;
            fn(std::as_const(c));
            return;
        }
        for (int v = 1; v <= remaining - (parts - 1 - pos); ++v) {
            c[pos] = v;
            self(self, pos + 1, remaining - v);
        }
    };
    rec(rec, 0, total);
}

} // namespace detail

// Connected term sets of size <= max_size whose union with the anchor region is
// connected, i.e. every connected component touches some anchor qubit. For a
// single anchor qubit these are the connected sets containing a term on it.
inline std::vector<TermSet> connected_term_sets(const TermGraph& graph, std::span<const int> anchor, int max_size) {
    if (max_size < 1) return {};
    return detail::ConnectedSetSearch(graph, max_size).run(anchor);
}

inline std::vector<Cluster> clusters_from_sets(std::span<const TermSet> sets, int weight, const TermGraph& graph) {
    std::vector<Cluster> out;
    for (const auto& s : sets) {
        if (static_cast<int>(s.size()) > weight) continue;
        detail::for_each_composition(weight, static_cast<int>(s.size()), [&](const std::vector<int>& mu) {
            std::map<int, int> m;
            for (std::size_t i = 0; i < s.size(); ++i) m[s[i]] = mu[i];
            out.emplace_back(m, graph);
        });
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Clusters of weight m anchored on a region (see connected_term_sets).
inline std::vector<Cluster> enumerate_anchored(std::span<const int> anchor, int m, const TermGraph& graph) {
    if (m < 1) throw PreconditionError("cluster weight must be >= 1");
    const auto sets = connected_term_sets(graph, anchor, m);
    return clusters_from_sets(sets, m, graph);
}

// Connected clusters of weight m whose support contains qubit j.
inline std::vector<Cluster> enumerate_connected(int j, int m, const TermGraph& graph) {
    if (j < 0 || j >= graph.num_qubits()) throw PreconditionError("qubit out of range");
    const int anchor[] = {j};
    return enumerate_anchored(anchor, m, graph);
}

// Connected clusters of weight m whose support contains both i and j.
inline std::vector<Cluster> enumerate_connected_pair(int i, int j, int m, const TermGraph& graph) {
    if (i == j) throw PreconditionError("enumerate_connected_pair needs distinct qubits; use enumerate_connected");
    if (j < 0 || j >= graph.num_qubits()) throw PreconditionError("qubit out of range");
    auto all = enumerate_connected(i, m, graph);
    std::erase_if(all, [&](const Cluster& w) { return !w.touches(j); });
    return all;
}

// Memo of connected term sets keyed by (anchor, max size). Lookups take a
// shared lock; inserts are serialized.
class ClusterCache {
public:
    std::shared_ptr<const std::vector<TermSet>> term_sets(const TermGraph& graph, std::vector<int> anchor,
                                                           int max_size) const {
        std::sort(anchor.begin(), anchor.end());
        Key key{anchor, max_size};
        {
            std::shared_lock lock(mutex_);
            auto it = memo_.find(key);
            if (it != memo_.end()) return it->second;
        }
        auto sets = std::make_shared<const std::vector<TermSet>>(connected_term_sets(graph, anchor, max_size));
        std::unique_lock lock(mutex_);
        auto [it, inserted] = memo_.emplace(std::move(key), std::move(sets));
        (void)inserted;
        return it->second;
    }

    std::size_t size() const {
        std::shared_lock lock(mutex_);
        return memo_.size();
    }

private:
    using Key = std::pair<std::vector<int>, int>;
    mutable std::shared_mutex mutex_;
    mutable std::map<Key, std::shared_ptr<const std::vector<TermSet>>> memo_;
};

} // namespace clustergibbs
