#pragma once

// Bit-packed Pauli algebra restricted to the few qubits a cluster touches, and
// the exponential series of a term set in that frame.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "clustergibbs/errors.hpp"
#include "clustergibbs/pauli.hpp"
#include "clustergibbs/series.hpp"

namespace clustergibbs::detail {

// i^phase * prod_k sigma(x_k, z_k), with (1,0) = X, (1,1) = Y, (0,1) = Z.
struct LocalPauli {
    std::uint64_t x = 0;
    std::uint64_t z = 0;
    int phase = 0;
};

inline LocalPauli mul(const LocalPauli& a, const LocalPauli& b) {
    const std::uint64_t ya = a.x & a.z, xa = a.x & ~a.z, za = ~a.x & a.z;
    const std::uint64_t yb = b.x & b.z, xb = b.x & ~b.z, zb = ~b.x & b.z;
    // XY = iZ, YZ = iX, ZX = iY and their reverses with -i.
    const int plus = std::popcount(xa & yb) + std::popcount(ya & zb) + std::popcount(za & xb);
    const int minus = std::popcount(ya & xb) + std::popcount(za & yb) + std::popcount(xa & zb);
    return {a.x ^ b.x, a.z ^ b.z, (a.phase + b.phase + plus - minus) & 3};
}

inline bool anticommute(const LocalPauli& a, const LocalPauli& b) {
    return (std::popcount((a.x & b.z) ^ (a.z & b.x)) & 1) != 0;
}

class LocalFrame {
public:
    static constexpr std::size_t max_qubits = 64;

    LocalFrame(std::vector<int> qubits, const ProjectorProduct& e) : qubits_(std::move(qubits)) {
        if (qubits_.size() > max_qubits) throw PreconditionError("cluster support exceeds 64 qubits");
        for (std::size_t k = 0; k < qubits_.size(); ++k) {
            comp_[k] = {1.0, 0.0, 0.0, 0.0};
            if (const Vec3* v = e.find(qubits_[k])) {
                measured_ |= std::uint64_t{1} << k;
                comp_[k] = {1.0, (*v)[0], (*v)[2], (*v)[1]}; // indexed by x + 2z
            }
        }
    }

    std::size_t size() const noexcept { return qubits_.size(); }

    int local(int qubit) const {
        auto it = std::lower_bound(qubits_.begin(), qubits_.end(), qubit);
        if (it == qubits_.end() || *it != qubit) throw PreconditionError("qubit outside local frame");
        return static_cast<int>(it - qubits_.begin());
    }

    LocalPauli compile(const PauliString& p) const {
        LocalPauli out{0, 0, p.phase()};
        for (const auto& [q, l] : p.letters()) {
            const std::uint64_t bit = std::uint64_t{1} << local(q);
            if (l != Letter::Z) out.x |= bit;
            if (l != Letter::X) out.z |= bit;
        }
        return out;
    }

    // Real part of 2^{n-N} Tr[E P]. Sums of such traces over all orderings of
    // a product of Hermitian factors are real, so imaginary parts never matter.
    double trace(const LocalPauli& p) const {
        std::uint64_t sup = p.x | p.z;
        if (sup & ~measured_) return 0.0;
        if (p.phase & 1) return 0.0;
        double r = p.phase == 2 ? -1.0 : 1.0;
        while (sup) {
            const int k = std::countr_zero(sup);
            sup &= sup - 1;
            r *= comp_[k][((p.x >> k) & 1) | (((p.z >> k) & 1) << 1)];
        }
        return r;
    }

private:
    std::vector<int> qubits_;
    std::uint64_t measured_ = 0;
    std::array<std::array<double, 4>, max_qubits> comp_{};
};

// Jet component c of the insertion operator is sum_i w_i O_i.
template <class Jet>
using LocalInsertion = std::array<std::vector<std::pair<double, LocalPauli>>, Jet::size>;

// Traces of E (insertion part c) (ascending product of the terms in mask),
// for every mask over the term list.
template <class Jet>
std::vector<Jet> parity_traces(const LocalFrame& frame, std::span<const LocalPauli> terms,
                               const LocalInsertion<Jet>& insertion) {
    const std::size_t patterns = std::size_t{1} << terms.size();
    std::vector<LocalPauli> products(patterns);
    for (std::size_t mask = 1; mask < patterns; ++mask) {
        const int top = 63 - std::countl_zero(static_cast<std::uint64_t>(mask));
        products[mask] = mul(products[mask & ~(std::size_t{1} << top)], terms[static_cast<std::size_t>(top)]);
    }
    std::vector<Jet> out(patterns);
    for (std::size_t mask = 0; mask < patterns; ++mask)
        for (std::size_t c = 0; c < Jet::size; ++c) {
            double acc = 0.0;
            for (const auto& [w, op] : insertion[c]) acc += w * frame.trace(mul(op, products[mask]));
            out[mask][c] = acc;
        }
    return out;
}

// F(t) = 2^{n-N} Tr[E (1 + insertion) exp(-sum_a coeff_a t_a P_a)] on the box,
// given the parity traces of the terms.
//
// Every ordered product of the P_a equals +/- the product in ascending term
// order (Pauli strings commute or anticommute), and P_a^2 = I, so the sum over
// orderings of a monomial t^u is g(u) * Tr[E O prod_{a : u_a odd} P_a] where
// g(u) counts orderings weighted by the sign of their anticommuting
// inversions. g satisfies g(u + e_a) += g(u) * (-1)^{sum_{b > a, {a,b} = 0} u_b}.
template <class Jet>
BoxSeries<Jet> exponential_series(const ExponentBox& box, std::span<const LocalPauli> terms,
                                  std::span<const double> coeffs, const std::vector<Jet>& parity) {
    const std::size_t s = terms.size();
    if (box.variables() != s || coeffs.size() != s || parity.size() != (std::size_t{1} << s))
        throw PreconditionError("exponential_series: size mismatch");

    std::vector<std::uint32_t> anti(s, 0); // bit b set iff P_a, P_b anticommute
    for (std::size_t a = 0; a < s; ++a)
        for (std::size_t b = 0; b < s; ++b)
            if (anticommute(terms[a], terms[b])) anti[a] |= 1u << b;

    const int D = box.max_degree();
    std::vector<double> g(box.size(), 0.0);
    g[0] = 1.0;
    for (std::size_t u = 0; u < box.size(); ++u) {
        if (g[u] == 0.0 || box.degree(u) >= D) continue;
        for (std::size_t a = 0; a < s; ++a) {
            if (box.digit(u, a) >= box.caps()[a]) continue;
            int flips = 0;
            for (std::uint32_t later = anti[a] & ~((2u << a) - 1u); later; later &= later - 1)
                flips += box.digit(u, static_cast<std::size_t>(std::countr_zero(later)));
            g[u + box.stride(a)] += (flips & 1) ? -g[u] : g[u];
        }
    }

    std::vector<double> inv_factorial(static_cast<std::size_t>(D) + 1, 1.0);
    for (int p = 1; p <= D; ++p) inv_factorial[p] = inv_factorial[p - 1] / p;

    BoxSeries<Jet> f(box);
    for (std::size_t u = 0; u < box.size(); ++u) {
        if (!box.kept(u) || g[u] == 0.0) continue;
        std::size_t mask = 0;
        double lam = 1.0;
        for (std::size_t a = 0; a < s; ++a) {
            const int d = box.digit(u, a);
            if (d & 1) mask |= std::size_t{1} << a;
            for (int r = 0; r < d; ++r) lam *= coeffs[a];
        }
        const int p = box.degree(u);
        const double scale = ((p & 1) ? -1.0 : 1.0) * lam * g[u] * inv_factorial[p];
        f[u] = parity[mask] * scale;
    }
    return f;
}

} // namespace clustergibbs::detail
