#pragma once

// Pauli strings with exact phases, single-qubit projector products, and the
// normalized trace 2^{n-N} Tr[E P] that every cluster coefficient is built from.
//
// Text grammar for Pauli strings (ASCII):
//
//     pauli  := "" | [phase " "] factor (" " factor)*
//     factor := ("X" | "Y" | "Z" | "I") index
//     index  := decimal digits
//     phase  := "-" | "i" | "-i"            (optional, emitted only when nonzero)
//
// "Z0 Z1" is Z on qubits 0 and 1; the empty string is the identity. Letters
// are sorted by qubit index on output, so format_pauli is canonical.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "clustergibbs/errors.hpp"

namespace clustergibbs {

enum class Letter : std::uint8_t { X = 1, Y = 2, Z = 3 };

using Vec3 = std::array<double, 3>;

inline char letter_char(Letter l) { return "IXYZ"[static_cast<int>(l)]; }

// Component of `v` along the axis of letter `l` (X -> x, Y -> y, Z -> z).
inline double component(const Vec3& v, Letter l) { return v[static_cast<int>(l) - 1]; }

inline double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

class PauliString {
public:
    PauliString() = default;

    explicit PauliString(std::map<int, Letter> letters, int phase = 0)
        : letters_(std::move(letters)), phase_(((phase % 4) + 4) % 4) {
        for (const auto& [q, l] : letters_) {
            if (q < 0) throw PreconditionError("PauliString: negative qubit index");
            (void)l;
        }
    }

    static PauliString single(int qubit, Letter l) { return PauliString({{qubit, l}}); }

    const std::map<int, Letter>& letters() const noexcept { return letters_; }

    // Exponent q of the global phase i^q, in {0,1,2,3}.
    int phase() const noexcept { return phase_; }

    std::optional<Letter> at(int qubit) const {
        auto it = letters_.find(qubit);
        if (it == letters_.end()) return std::nullopt;
        return it->second;
    }

    std::vector<int> support() const {
        std::vector<int> s;
        s.reserve(letters_.size());
        for (const auto& [q, l] : letters_) s.push_back(q);
        return s;
    }

    std::size_t weight() const noexcept { return letters_.size(); }
    bool is_identity() const noexcept { return letters_.empty(); }

    // Hermitian Pauli strings carry a real phase (+1 or -1).
    bool is_hermitian() const noexcept { return phase_ % 2 == 0; }

    PauliString with_phase(int phase) const { return PauliString(letters_, phase); }

    friend bool operator==(const PauliString&, const PauliString&) = default;

private:
    std::map<int, Letter> letters_;
    int phase_ = 0;
};

namespace detail {

// Single-site product a*b = i^phase * result for non-identity letters.
inline std::pair<int, std::optional<Letter>> letter_product(Letter a, Letter b) {
    if (a == b) return {0, std::nullopt};
    const int ia = static_cast<int>(a), ib = static_cast<int>(b);
    const int phase = (ib == ia % 3 + 1) ? 1 : 3; // XY = iZ, YZ = iX, ZX = iY
    return {phase, static_cast<Letter>(6 - ia - ib)};
}

} // namespace detail

inline PauliString multiply(const PauliString& p, const PauliString& q) {
    std::map<int, Letter> out;
    int phase = p.phase() + q.phase();
    auto ip = p.letters().begin(), ep = p.letters().end();
    auto iq = q.letters().begin(), eq = q.letters().end();
    while (ip != ep || iq != eq) {
        if (iq == eq || (ip != ep && ip->first < iq->first)) {
            out.emplace_hint(out.end(), *ip++);
        } else if (ip == ep || iq->first < ip->first) {
            out.emplace_hint(out.end(), *iq++);
        } else {
            auto [ph, l] = detail::letter_product(ip->second, iq->second);
            phase += ph;
            if (l) out.emplace_hint(out.end(), ip->first, *l);
            ++ip;
            ++iq;
        }
    }
    return PauliString(std::move(out), phase);
}

inline PauliString operator*(const PauliString& p, const PauliString& q) { return multiply(p, q); }

inline bool commutes(const PauliString& p, const PauliString& q) {
    int anti = 0;
    for (const auto& [site, l] : p.letters()) {
        auto other = q.at(site);
        if (other && *other != l) ++anti;
    }
    return anti % 2 == 0;
}

// Outcome 0 of a measurement along `axis` projects onto +axis, outcome 1 onto -axis.
inline Vec3 outcome_axis(const Vec3& axis, int outcome) {
    if (outcome == 0) return axis;
    return {-axis[0], -axis[1], -axis[2]};
}

// Named measurement bases.
inline Vec3 basis_axis(char name) {
    switch (name) {
    case 'X': return {1.0, 0.0, 0.0};
    case 'Y': return {0.0, 1.0, 0.0};
    case 'Z': return {0.0, 0.0, 1.0};
    default: throw PreconditionError(std::string("unknown basis '") + name + "'");
    }
}

inline constexpr double axis_tolerance = 1e-12;

// Product of single-qubit projectors (I + v.sigma)/2 over distinct qubits.
class ProjectorProduct {
public:
    ProjectorProduct() = default;

    void add(int qubit, const Vec3& axis) {
        if (qubit < 0) throw PreconditionError("ProjectorProduct: negative qubit index");
        if (std::abs(norm(axis) - 1.0) > axis_tolerance)
            throw PreconditionError("ProjectorProduct: axis for qubit " + std::to_string(qubit) +
                                    " is not a unit vector");
        if (!entries_.emplace(qubit, axis).second)
            throw PreconditionError("ProjectorProduct: qubit " + std::to_string(qubit) +
                                    " already measured");
    }

    void remove(int qubit) { entries_.erase(qubit); }

    bool contains(int qubit) const { return entries_.count(qubit) != 0; }

    const Vec3* find(int qubit) const {
        auto it = entries_.find(qubit);
        return it == entries_.end() ? nullptr : &it->second;
    }

    const std::map<int, Vec3>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

private:
    std::map<int, Vec3> entries_;
};

// 2^{n-N} Tr[E P]: the phase i^q times, per qubit, the axis component along the
// letter (measured) or 1/0 for identity/non-identity (unmeasured).
inline std::complex<double> normalized_trace(const ProjectorProduct& e, const PauliString& p) {
    double r = 1.0;
    for (const auto& [q, l] : p.letters()) {
        const Vec3* v = e.find(q);
        if (!v) return {0.0, 0.0};
        r *= component(*v, l);
    }
    static constexpr std::array<std::complex<double>, 4> phases{
        std::complex<double>{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return phases[p.phase()] * r;
}

inline PauliString parse_pauli(std::string_view text) {
    std::map<int, Letter> letters;
    std::set<int> seen;
    int phase = 0;
    std::size_t pos = 0;
    bool first = true;
    auto skip_spaces = [&] {
        while (pos < text.size() && text[pos] == ' ') ++pos;
    };
    skip_spaces();
    while (pos < text.size()) {
        const std::size_t start = pos;
        if (first && (text[pos] == '-' || text[pos] == 'i')) {
            // leading phase token
            std::size_t end = text.find(' ', pos);
            std::string_view tok = text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
            if (tok == "-") phase = 2;
            else if (tok == "i") phase = 1;
            else if (tok == "-i") phase = 3;
            else throw ParseError("unknown phase token '" + std::string(tok) + "'", start);
            pos += tok.size();
            first = false;
            skip_spaces();
            continue;
        }
        first = false;
        const char c = text[pos];
        std::optional<Letter> letter;
        switch (c) {
        case 'X': letter = Letter::X; break;
        case 'Y': letter = Letter::Y; break;
        case 'Z': letter = Letter::Z; break;
        case 'I': break;
        default: throw ParseError(std::string("unknown letter '") + c + "'", start);
        }
        ++pos;
        if (pos < text.size() && text[pos] == '-') throw ParseError("negative qubit index", pos);
        if (pos >= text.size() || text[pos] < '0' || text[pos] > '9')
            throw ParseError("expected qubit index after letter", pos);
        long long index = 0;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
            index = index * 10 + (text[pos] - '0');
            if (index > 1'000'000'000) throw ParseError("qubit index too large", start + 1);
            ++pos;
        }
        if (pos < text.size() && text[pos] != ' ')
            throw ParseError(std::string("unexpected character '") + text[pos] + "'", pos);
        const int q = static_cast<int>(index);
        if (!seen.insert(q).second) throw ParseError("duplicate site " + std::to_string(q), start);
        if (letter) letters.emplace(q, *letter);
        skip_spaces();
    }
    return PauliString(std::move(letters), phase);
}

inline std::string format_pauli(const PauliString& p) {
    static constexpr std::array<const char*, 4> phase_tokens{"", "i", "-", "-i"};
    std::string out = phase_tokens[p.phase()];
    for (const auto& [q, l] : p.letters()) {
        if (!out.empty()) out += ' ';
        out += letter_char(l);
        out += std::to_string(q);
    }
    return out;
}

} // namespace clustergibbs
