#pragma once

// Dense reference computations with Eigen, for N <= 12. Basis state index s
// has qubit q in bit q; Z|0> = |0>.
//
// Conditioning on measured qubits contracts them out of the Gibbs operator one
// at a time: Tr_q[(P (x) I) rho] leaves a 2^{N-1}-dimensional operator, so a
// conditional marginal costs O(4^N) rather than a full matrix product.
// Memory: the Gibbs operator at N = 12 is 4096^2 complex doubles (256 MB)
// plus eigenvectors of the same size.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "clustergibbs/errors.hpp"
#include "clustergibbs/model.hpp"
#include "clustergibbs/pauli.hpp"
#include "clustergibbs/schedule.hpp"

namespace clustergibbs::oracle {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline constexpr int max_qubits = 12;

inline void check_size(int n) {
    if (n < 1 || n > max_qubits) throw PreconditionError("oracle supports 1..12 qubits, got " + std::to_string(n));
}

inline Matrix dense_pauli(const PauliString& p, int n) {
    check_size(n);
    const std::size_t dim = std::size_t{1} << n;
    std::uint64_t flip = 0;
    for (const auto& [q, l] : p.letters()) {
        if (q >= n) throw PreconditionError("Pauli string acts outside the register");
        if (l != Letter::Z) flip |= std::uint64_t{1} << q;
    }
    static constexpr cplx phases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t s = 0; s < dim; ++s) {
        int ph = p.phase();
        for (const auto& [q, l] : p.letters()) {
            const int bit = static_cast<int>((s >> q) & 1);
            if (l == Letter::Z && bit) ph += 2;
            if (l == Letter::Y) ph += bit ? 3 : 1; // Y|0> = i|1>, Y|1> = -i|0>
        }
        m(static_cast<Eigen::Index>(s ^ flip), static_cast<Eigen::Index>(s)) += phases[ph & 3];
    }
    return m;
}

inline Matrix dense_hamiltonian(const HamiltonianSpec& spec) {
    check_size(spec.num_qubits);
    const auto dim = Eigen::Index{1} << spec.num_qubits;
    Matrix h = Matrix::Zero(dim, dim);
    for (const auto& t : spec.terms) h += t.coeff * dense_pauli(t.pauli, spec.num_qubits);
    return h;
}

// (I + v.sigma) / 2
inline Eigen::Matrix2cd projector(const Vec3& v) {
    Eigen::Matrix2cd p;
    p << cplx(1 + v[2], 0), cplx(v[0], -v[1]), cplx(v[0], v[1]), cplx(1 - v[2], 0);
    return 0.5 * p;
}

inline Eigen::Matrix2cd sigma(int alpha) {
    Eigen::Matrix2cd s;
    switch (alpha) {
    case 0: s << 0, 1, 1, 0; break;
    case 1: s << 0, cplx(0, -1), cplx(0, 1), 0; break;
    default: s << 1, 0, 0, -1; break;
    }
    return s;
}

// A single-qubit operator acting on qubit q of an n-qubit register.
inline Matrix embed(const Eigen::Matrix2cd& op, int q, int n) {
    check_size(n);
    const auto dim = Eigen::Index{1} << n;
    const Eigen::Index bit = Eigen::Index{1} << q;
    Matrix m = Matrix::Zero(dim, dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
        const Eigen::Index base = s & ~bit;
        for (Eigen::Index a = 0; a < 2; ++a)
            m(base | (a ? bit : 0), s) = op(a, (s & bit) ? 1 : 0);
    }
    return m;
}

inline Matrix dense_projectors(const ProjectorProduct& e, int n) {
    Matrix m = Matrix::Identity(Eigen::Index{1} << n, Eigen::Index{1} << n);
    for (const auto& [q, v] : e.entries()) m = embed(projector(v), q, n) * m;
    return m;
}

// Unnormalized Gibbs operator exp(-beta H).
struct DenseState {
    int num_qubits = 0;
    Matrix rho;
};

inline DenseState dense_gibbs(const HamiltonianSpec& spec, double beta) {
    const Matrix h = dense_hamiltonian(spec);
    if (h.imag().cwiseAbs().maxCoeff() == 0.0) {
        // Real symmetric H (every term has an even number of Y): the real
        // solver is several times faster.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h.real());
        if (eig.info() != Eigen::Success) throw PreconditionError("dense_gibbs: eigendecomposition failed");
        const Eigen::VectorXd w = (-beta * eig.eigenvalues().array()).exp();
        const Eigen::MatrixXd& v = eig.eigenvectors();
        return {spec.num_qubits, (v * w.asDiagonal() * v.transpose()).cast<cplx>()};
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
    if (eig.info() != Eigen::Success) throw PreconditionError("dense_gibbs: eigendecomposition failed");
    const Eigen::VectorXd w = (-beta * eig.eigenvalues().array()).exp();
    const Matrix& v = eig.eigenvectors();
    return {spec.num_qubits, v * w.asDiagonal() * v.adjoint()};
}

// An operator on the qubits listed in `qubits`; qubits[k] lives in bit k.
struct Reduced {
    std::vector<int> qubits;
    Matrix rho;

    int position(int qubit) const {
        auto it = std::find(qubits.begin(), qubits.end(), qubit);
        if (it == qubits.end()) throw PreconditionError("qubit " + std::to_string(qubit) + " not in reduced state");
        return static_cast<int>(it - qubits.begin());
    }

    // Tr_q[(P (x) I) rho].
    Reduced contract(int qubit, const Eigen::Matrix2cd& p) const {
        const int k = position(qubit);
        const Eigen::Index dim = rho.rows() / 2;
        const Eigen::Index low = (Eigen::Index{1} << k) - 1;
        auto expand = [&](Eigen::Index s, Eigen::Index bit) { return ((s & ~low) << 1) | (bit << k) | (s & low); };
        Reduced out;
        out.qubits = qubits;
        out.qubits.erase(out.qubits.begin() + k);
        out.rho = Matrix::Zero(dim, dim);
        for (Eigen::Index t = 0; t < dim; ++t)
            for (Eigen::Index s = 0; s < dim; ++s) {
                cplx acc = 0;
                for (Eigen::Index a = 0; a < 2; ++a)
                    for (Eigen::Index b = 0; b < 2; ++b)
                        if (p(a, b) != cplx(0)) acc += p(a, b) * rho(expand(s, b), expand(t, a));
                out.rho(s, t) = acc;
            }
        return out;
    }

    Reduced trace_out(int qubit) const { return contract(qubit, Eigen::Matrix2cd::Identity()); }

    // Keep only `keep` (in that bit order), tracing out everything else.
    Reduced restrict_to(const std::vector<int>& keep) const {
        Reduced r = *this;
        for (int q : qubits)
            if (std::find(keep.begin(), keep.end(), q) == keep.end()) r = r.trace_out(q);
        if (r.qubits != keep) {
            // Reorder bits to match `keep`.
            Reduced o;
            o.qubits = keep;
            const Eigen::Index dim = r.rho.rows();
            std::vector<Eigen::Index> map(static_cast<std::size_t>(dim));
            for (Eigen::Index s = 0; s < dim; ++s) {
                Eigen::Index t = 0;
                for (std::size_t k = 0; k < keep.size(); ++k)
                    if ((s >> k) & 1) t |= Eigen::Index{1} << r.position(keep[k]);
                map[static_cast<std::size_t>(s)] = t;
            }
            o.rho = Matrix(dim, dim);
            for (Eigen::Index s = 0; s < dim; ++s)
                for (Eigen::Index t = 0; t < dim; ++t)
                    o.rho(s, t) = r.rho(map[static_cast<std::size_t>(s)], map[static_cast<std::size_t>(t)]);
            return o;
        }
        return r;
    }

    double trace() const { return rho.trace().real(); }
};

inline Reduced full(const DenseState& state) {
    Reduced r;
    for (int q = 0; q < state.num_qubits; ++q) r.qubits.push_back(q);
    r.rho = state.rho;
    return r;
}

// Tr_E[E rho]: the unmeasured qubits' operator after the measurements in E.
inline Reduced condition(const DenseState& state, const ProjectorProduct& e) {
    Reduced r = full(state);
    for (const auto& [q, v] : e.entries()) {
        if (q >= state.num_qubits) throw PreconditionError("measured qubit outside the register");
        r = r.contract(q, projector(v));
    }
    return r;
}

inline constexpr double degenerate_denominator = 1e-30;

inline double exact_marginal(const DenseState& state, const ProjectorProduct& e, int j, const Vec3& axis,
                             int outcome = 0) {
    if (e.contains(j)) throw PreconditionError("exact_marginal: qubit already measured");
    const Reduced r = condition(state, e).restrict_to({j});
    const double denom = r.trace();
    if (!(denom > degenerate_denominator)) throw PreconditionError("exact_marginal: degenerate conditional state");
    return (projector(outcome_axis(axis, outcome)) * r.rho).trace().real() / denom;
}

// Exact p(x) over all outcome strings of a schedule (x in measurement order).
inline std::map<std::string, double> exact_distribution(const DenseState& state, const Schedule& schedule) {
    std::map<std::string, double> out;
    const double z = state.rho.trace().real();
    std::vector<char> measured(static_cast<std::size_t>(state.num_qubits), 0);
    std::string prefix;
    auto visit = [&](auto& self, const Reduced& r) -> void {
        if (static_cast<int>(prefix.size()) == state.num_qubits) {
            out.emplace(prefix, r.trace() / z);
            return;
        }
        const Step s = schedule.next(prefix, measured);
        measured[s.qubit] = 1;
        for (int bit = 0; bit < 2; ++bit) {
            prefix.push_back(static_cast<char>('0' + bit));
            self(self, r.contract(s.qubit, projector(outcome_axis(s.axis, bit))));
            prefix.pop_back();
        }
        measured[s.qubit] = 0;
    };
    visit(visit, full(state));
    return out;
}

// sum_x |p(x) - q(x)| over the union of supports.
inline double exact_tv(const std::map<std::string, double>& p, const std::map<std::string, double>& q) {
    double d = 0.0;
    for (const auto& [x, px] : p) {
        auto it = q.find(x);
        d += std::abs(px - (it == q.end() ? 0.0 : it->second));
    }
    for (const auto& [x, qx] : q)
        if (!p.count(x)) d += std::abs(qx);
    return d;
}

// 3x3 connected correlation matrix C_ab = <s_a^i s_b^j> - <s_a^i><s_b^j> in
// the conditional state.
inline Eigen::Matrix3d correlation_matrix(const DenseState& state, const ProjectorProduct& e, int i, int j) {
    if (i == j) throw PreconditionError("correlation: i and j must differ");
    if (e.contains(i) || e.contains(j)) throw PreconditionError("correlation: both qubits must be unmeasured");
    const Reduced r = condition(state, e).restrict_to({i, j}); // i in bit 0, j in bit 1
    const double z = r.trace();
    if (!(z > degenerate_denominator)) throw PreconditionError("correlation: degenerate conditional state");
    const Matrix rho = r.rho / z;
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    Eigen::Matrix3d c;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            // kron(B, A) puts A on bit 0.
            Eigen::Matrix4cd ab, a1, b1;
            const auto sa = sigma(a), sb = sigma(b);
            for (int x = 0; x < 2; ++x)
                for (int y = 0; y < 2; ++y)
                    for (int u = 0; u < 2; ++u)
                        for (int v = 0; v < 2; ++v) {
                            ab(2 * x + u, 2 * y + v) = sb(x, y) * sa(u, v);
                            a1(2 * x + u, 2 * y + v) = id(x, y) * sa(u, v);
                            b1(2 * x + u, 2 * y + v) = sb(x, y) * id(u, v);
                        }
            const double eab = (ab * rho).trace().real();
            const double ea = (a1 * rho).trace().real();
            const double eb = (b1 * rho).trace().real();
            c(a, b) = eab - ea * eb;
        }
    return c;
}

inline double connected_correlator(const DenseState& state, const ProjectorProduct& e, int i, int j, const Vec3& ei,
                                   const Vec3& ej) {
    const Eigen::Matrix3d c = correlation_matrix(state, e, i, j);
    const Eigen::Vector3d u(ei[0], ei[1], ei[2]), v(ej[0], ej[1], ej[2]);
    return u.dot(c * v);
}

struct ExactCorrelation {
    double value = 0.0; // largest singular value
    Vec3 ei{};          // maximizing unit axes: ei.C.ej = value
    Vec3 ej{};
};

inline ExactCorrelation exact_correlation(const DenseState& state, const ProjectorProduct& e, int i, int j) {
    const Eigen::Matrix3d c = correlation_matrix(state, e, i, j);
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Vector3d u = svd.matrixU().col(0), v = svd.matrixV().col(0);
    return {svd.singularValues()(0), {u(0), u(1), u(2)}, {v(0), v(1), v(2)}};
}

} // namespace clustergibbs::oracle
