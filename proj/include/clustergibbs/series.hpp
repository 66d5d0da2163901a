#pragma once

// Truncated multivariate power series over a box of exponents, with
// coefficients in a small commutative ring (double, or a jet in the insertion
// parameters). The logarithm and exponential are computed with the Euler
// operator identity theta(S) = S * theta(log S), theta = sum_a t_a d/dt_a,
// which needs a single pass over sub-boxes instead of a power series in S - 1.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "clustergibbs/errors.hpp"

namespace clustergibbs {

// a0 + a1*kappa with kappa^2 = 0.
struct KappaJet {
    static constexpr std::size_t size = 2;

    double c0 = 0.0;
    double c1 = 0.0;

    static KappaJet one() { return {1.0, 0.0}; }

    double& operator[](std::size_t i) { return i == 0 ? c0 : c1; }
    double operator[](std::size_t i) const { return i == 0 ? c0 : c1; }

    KappaJet& operator+=(const KappaJet& o) {
        c0 += o.c0;
        c1 += o.c1;
        return *this;
    }
    KappaJet& operator-=(const KappaJet& o) {
        c0 -= o.c0;
        c1 -= o.c1;
        return *this;
    }
    KappaJet& operator*=(double s) {
        c0 *= s;
        c1 *= s;
        return *this;
    }
    friend KappaJet operator+(KappaJet a, const KappaJet& b) { return a += b; }
    friend KappaJet operator-(KappaJet a, const KappaJet& b) { return a -= b; }
    friend KappaJet operator*(KappaJet a, double s) { return a *= s; }
    friend KappaJet operator*(double s, KappaJet a) { return a *= s; }
    friend KappaJet operator*(const KappaJet& a, const KappaJet& b) {
        return {a.c0 * b.c0, a.c0 * b.c1 + a.c1 * b.c0};
    }
    friend bool operator==(const KappaJet&, const KappaJet&) = default;

    // f(a) for a smooth scalar function with value and derivative at c0.
    KappaJet apply(double f, double df, double /*d2f*/) const { return {f, df * c1}; }
};

// Multilinear jet in two insertion parameters: a0 + ai*ki + aj*kj + aij*ki*kj
// with ki^2 = kj^2 = 0.
struct PairJet {
    static constexpr std::size_t size = 4;

    double c0 = 0.0;
    double ci = 0.0;
    double cj = 0.0;
    double cij = 0.0;

    static PairJet one() { return {1.0, 0.0, 0.0, 0.0}; }

    double& operator[](std::size_t i) {
        switch (i) {
        case 0: return c0;
        case 1: return ci;
        case 2: return cj;
        default: return cij;
        }
    }
    double operator[](std::size_t i) const { return const_cast<PairJet&>(*this)[i]; }

    PairJet& operator+=(const PairJet& o) {
        c0 += o.c0;
        ci += o.ci;
        cj += o.cj;
        cij += o.cij;
        return *this;
    }
    PairJet& operator-=(const PairJet& o) {
        c0 -= o.c0;
        ci -= o.ci;
        cj -= o.cj;
        cij -= o.cij;
        return *this;
    }
    PairJet& operator*=(double s) {
        c0 *= s;
        ci *= s;
        cj *= s;
        cij *= s;
        return *this;
    }
    friend PairJet operator+(PairJet a, const PairJet& b) { return a += b; }
    friend PairJet operator-(PairJet a, const PairJet& b) { return a -= b; }
    friend PairJet operator*(PairJet a, double s) { return a *= s; }
    friend PairJet operator*(double s, PairJet a) { return a *= s; }
    friend PairJet operator*(const PairJet& a, const PairJet& b) {
        return {a.c0 * b.c0, a.c0 * b.ci + a.ci * b.c0, a.c0 * b.cj + a.cj * b.c0,
                a.c0 * b.cij + a.ci * b.cj + a.cj * b.ci + a.cij * b.c0};
    }
    friend bool operator==(const PairJet&, const PairJet&) = default;

    PairJet apply(double f, double df, double d2f) const { return {f, df * ci, df * cj, df * cij + d2f * ci * cj}; }
};

// Scalar functions on the coefficient ring, lifted through the jet rules.
inline double ring_one(double) { return 1.0; }
inline KappaJet ring_one(const KappaJet&) { return KappaJet::one(); }
inline PairJet ring_one(const PairJet&) { return PairJet::one(); }

inline double ring_log(double x) { return std::log(x); }
inline double ring_exp(double x) { return std::exp(x); }
inline double ring_inverse(double x) { return 1.0 / x; }
inline double ring_scalar(double x) { return x; }

template <class Jet>
Jet ring_log(const Jet& a) {
    return a.apply(std::log(a.c0), 1.0 / a.c0, -1.0 / (a.c0 * a.c0));
}
template <class Jet>
Jet ring_exp(const Jet& a) {
    const double e = std::exp(a.c0);
    return a.apply(e, e, e);
}
template <class Jet>
Jet ring_inverse(const Jet& a) {
    const double inv = 1.0 / a.c0;
    return a.apply(inv, -inv * inv, 2.0 * inv * inv * inv);
}
template <class Jet>
double ring_scalar(const Jet& a) {
    return a.c0;
}

// Mixed-radix exponent box {u : 0 <= u_a <= cap_a} truncated at total degree
// <= max_degree. Index order is compatible with the componentwise order, so
// v <= u implies index(v) <= index(u).
class ExponentBox {
public:
    ExponentBox(std::vector<int> caps, int max_degree) : caps_(std::move(caps)), max_degree_(max_degree) {
        if (caps_.size() > 16) throw PreconditionError("ExponentBox: too many variables");
        std::size_t n = 1;
        stride_.resize(caps_.size());
        for (std::size_t a = 0; a < caps_.size(); ++a) {
            if (caps_[a] < 0) throw PreconditionError("ExponentBox: negative cap");
            stride_[a] = n;
            n *= static_cast<std::size_t>(caps_[a] + 1);
            if (n > (std::size_t{1} << 22)) throw PreconditionError("ExponentBox: box too large (truncation order too high for this term set)");
        }
        size_ = n;
        digits_.resize(size_ * caps_.size());
        degree_.resize(size_);
        for (std::size_t idx = 0; idx < size_; ++idx) {
            std::size_t rest = idx;
            int deg = 0;
            for (std::size_t a = 0; a < caps_.size(); ++a) {
                const int d = static_cast<int>(rest % static_cast<std::size_t>(caps_[a] + 1));
                rest /= static_cast<std::size_t>(caps_[a] + 1);
                digits_[idx * caps_.size() + a] = static_cast<std::uint8_t>(d);
                deg += d;
            }
            degree_[idx] = deg;
        }
    }

    std::size_t size() const noexcept { return size_; }
    std::size_t variables() const noexcept { return caps_.size(); }
    int max_degree() const noexcept { return max_degree_; }
    const std::vector<int>& caps() const noexcept { return caps_; }
    int degree(std::size_t idx) const { return degree_[idx]; }
    bool kept(std::size_t idx) const { return degree_[idx] <= max_degree_; }
    int digit(std::size_t idx, std::size_t a) const { return digits_[idx * caps_.size() + a]; }
    std::size_t stride(std::size_t a) const { return stride_[a]; }

    std::size_t index_of(std::span<const int> exps) const {
        if (exps.size() != caps_.size()) throw PreconditionError("ExponentBox: wrong number of exponents");
        std::size_t idx = 0;
        for (std::size_t a = 0; a < caps_.size(); ++a) {
            if (exps[a] < 0 || exps[a] > caps_[a]) throw PreconditionError("ExponentBox: exponent outside box");
            idx += static_cast<std::size_t>(exps[a]) * stride_[a];
        }
        return idx;
    }

    // Calls fn(v_index, (u - v)_index) for every v <= u componentwise.
    template <class Fn>
    void for_each_divisor(std::size_t u, Fn&& fn) const {
        const std::size_t n = caps_.size();
        std::array<int, 16> v{};
        std::size_t vi = 0;
        while (true) {
            fn(vi, u - vi);
            std::size_t a = 0;
            for (; a < n; ++a) {
                if (v[a] < digit(u, a)) {
                    ++v[a];
                    vi += stride_[a];
                    break;
                }
                vi -= static_cast<std::size_t>(v[a]) * stride_[a];
                v[a] = 0;
            }
            if (a == n) return;
        }
    }

private:
    std::vector<int> caps_;
    int max_degree_;
    std::vector<std::size_t> stride_;
    std::size_t size_ = 0;
    std::vector<std::uint8_t> digits_;
    std::vector<int> degree_;
};

template <class C>
class BoxSeries {
public:
    explicit BoxSeries(const ExponentBox& box) : box_(&box), coeffs_(box.size(), C{}) {}

    const ExponentBox& box() const noexcept { return *box_; }
    std::size_t size() const noexcept { return coeffs_.size(); }

    C& operator[](std::size_t idx) { return coeffs_[idx]; }
    const C& operator[](std::size_t idx) const { return coeffs_[idx]; }

    friend BoxSeries operator*(const BoxSeries& x, const BoxSeries& y) {
        BoxSeries out(*x.box_);
        const ExponentBox& b = *x.box_;
        for (std::size_t u = 0; u < b.size(); ++u) {
            if (!b.kept(u)) continue;
            C acc{};
            b.for_each_divisor(u, [&](std::size_t v, std::size_t w) { acc += x[v] * y[w]; });
            out[u] = acc;
        }
        return out;
    }

private:
    const ExponentBox* box_;
    std::vector<C> coeffs_;
};

// log S for S with an invertible constant term. Coefficients outside the
// degree truncation stay zero.
template <class C>
BoxSeries<C> log(const BoxSeries<C>& s) {
    const ExponentBox& b = s.box();
    const C s0 = s[0];
    if (ring_scalar(s0) <= 0.0) throw PreconditionError("series log: constant term must be positive");
    const C inv0 = ring_inverse(s0);
    BoxSeries<C> t(b); // S / S_0, constant term one
    for (std::size_t u = 0; u < b.size(); ++u)
        if (b.kept(u)) t[u] = s[u] * inv0;
    t[0] = ring_one(s0);

    BoxSeries<C> out(b);
    out[0] = ring_log(s0);
    for (std::size_t u = 1; u < b.size(); ++u) {
        if (!b.kept(u)) continue;
        // |u| L_u = |u| T_u - sum_{0 < v < u} |v| L_v T_{u-v}
        C acc{};
        b.for_each_divisor(u, [&](std::size_t v, std::size_t w) {
            if (v == 0 || v == u) return;
            acc += static_cast<double>(b.degree(v)) * (out[v] * t[w]);
        });
        out[u] = t[u] - acc * (1.0 / b.degree(u));
    }
    return out;
}

template <class C>
BoxSeries<C> exp(const BoxSeries<C>& l) {
    const ExponentBox& b = l.box();
    BoxSeries<C> out(b);
    out[0] = ring_exp(l[0]);
    for (std::size_t u = 1; u < b.size(); ++u) {
        if (!b.kept(u)) continue;
        // |u| E_u = sum_{0 < v <= u} |v| L_v E_{u-v}
        C acc{};
        b.for_each_divisor(u, [&](std::size_t v, std::size_t w) {
            if (v == 0) return;
            acc += static_cast<double>(b.degree(v)) * (l[v] * out[w]);
        });
        out[u] = acc * (1.0 / b.degree(u));
    }
    return out;
}

} // namespace clustergibbs
