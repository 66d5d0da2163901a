#pragma once

// Truncated cluster expansion of conditional marginals, local expectation
// values and two-point correlations.
//
// Every quantity is the derivative of a log partition function
//
//     log Z(kappa) = log 2^{n-N} Tr[E (1 + kappa O) exp(-beta H)]
//
// at kappa = 0. Expanding exp(-beta sum_a lambda_a t_a H_a) in the formal
// variables t_a and taking the logarithm gives one coefficient per cluster W
// (a multiset of terms, exponent vector mu_W), and only connected clusters
// survive. gammas() evaluates, for every connected term set S reachable from
// the insertion, log F_S once on the box {u : |u| <= M} and reads off all
// coefficients whose exponent uses every term of S. The per-cluster route
// (cluster_contribution) computes the same numbers one cluster at a time.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "clustergibbs/clusters.hpp"
#include "clustergibbs/detail/local_frame.hpp"
#include "clustergibbs/errors.hpp"
#include "clustergibbs/model.hpp"
#include "clustergibbs/pauli.hpp"
#include "clustergibbs/series.hpp"

namespace clustergibbs {

// Real linear combination of Pauli strings.
using PauliSum = std::vector<std::pair<double, PauliString>>;

// What happens when beta >= beta_*: throw GuaranteeVoid, or carry on with an
// infinite tail bound.
enum class BetaPolicy { error, warn };

inline const char* to_string(BetaPolicy p) { return p == BetaPolicy::error ? "error" : "warn"; }

// sum_{m > M} m r^m with r = beta / beta_*.
inline double tail_bound(double beta, double beta_star, int order, BetaPolicy policy = BetaPolicy::error) {
    if (!(beta_star > 0.0)) throw PreconditionError("tail_bound: beta_* must be positive");
    if (beta < 0.0) throw PreconditionError("tail_bound: beta must be non-negative");
    if (order < 0) throw PreconditionError("tail_bound: order must be non-negative");
    if (beta >= beta_star) {
        if (policy == BetaPolicy::error)
            throw GuaranteeVoid("beta = " + std::to_string(beta) + " is not below beta_* = " + std::to_string(beta_star));
        return std::numeric_limits<double>::infinity();
    }
    const double r = beta / beta_star;
    const double a = order + 1.0;
    return std::pow(r, a) * (a * (1.0 - r) + r) / ((1.0 - r) * (1.0 - r));
}

// sum_{m >= start} m^2 r^m.
inline double squared_tail(double r, int start) {
    const double a = start;
    const double q = 1.0 - r;
    return std::pow(r, a) * (a * a / q + 2.0 * a * r / (q * q) + r * (1.0 + r) / (q * q * q));
}

// Smallest M >= 1 with tail_bound(beta, beta_*, M) <= N^{-alpha}.
inline int choose_order(double beta, double beta_star, int num_qubits, double alpha) {
    if (!(beta > 0.0) || beta >= beta_star) throw PreconditionError("choose_order: need 0 < beta < beta_*");
    if (!(alpha > 1.0)) throw PreconditionError("choose_order: alpha must exceed 1");
    if (num_qubits < 1) throw PreconditionError("choose_order: need N >= 1");
    const double target = std::pow(static_cast<double>(num_qubits), -alpha);
    for (int m = 1; m <= 512; ++m)
        if (tail_bound(beta, beta_star, m) <= target) return m;
    throw PreconditionError("choose_order: beta too close to beta_* (order would exceed 512)");
}

struct MarginalEstimate {
    double p_prime = 0.5;
    double raw = 0.5; // before clamping
    int order = 0;
    std::vector<double> gammas;
    double tail = 0.0;
    bool clamped = false;
    bool guarantee_void = false;
};

struct ExpectationEstimate {
    double value = 0.0;
    int order = 0;
    double constant = 0.0;             // part of A fixed by the measured qubits
    std::vector<double> coefficients;  // beta^m coefficients, m = 1..M
    double tail = 0.0;
    bool guarantee_void = false;
};

struct CorrelationEstimate {
    double value = 0.0;
    int order = 0;
    std::vector<double> coefficients;
    double tail = 0.0;
    int distance = -1;   // interaction distance between i and j, -1 if unreachable
    int min_weight = 0;  // lightest cluster weight able to touch both sites
    bool guarantee_void = false;
};

struct ExpansionOptions {
    DegreeMode mode = DegreeMode::strict;
    // Largest observable support accepted by observable_expectation.
    int max_observable_support = 6;
    // Self-test hook for the verification harness: flips the sign of every
    // gamma. Never set in normal use.
    bool inject_gamma_sign_fault = false;
};

class Expansion {
public:
    explicit Expansion(HamiltonianSpec spec, ExpansionOptions options = {})
        : spec_(std::move(spec)), graph_(spec_), constants_(derive_constants(spec_, options.mode)),
          options_(options) {}

    const HamiltonianSpec& spec() const noexcept { return spec_; }
    const TermGraph& graph() const noexcept { return graph_; }
    const DerivedConstants& constants() const noexcept { return constants_; }
    const ExpansionOptions& options() const noexcept { return options_; }
    const ClusterCache& cache() const noexcept { return cache_; }

    // 2^{n-N} Tr[E (1 + kappa O) H_{seq[0]} H_{seq[1]} ...], real parts.
    KappaJet sequence_trace(const ProjectorProduct& e, const PauliSum& insertion, std::span<const int> seq) const {
        PauliString prod;
        for (int a : seq) prod = prod * term(a).pauli;
        KappaJet out{normalized_trace(e, prod).real(), 0.0};
        for (const auto& [w, op] : insertion) out.c1 += w * normalized_trace(e, op * prod).real();
        return out;
    }

    // Coefficient of t^W in log F_W, where F_W sums the ordered products with
    // term counts capped by the multiplicities of W; c1 = lambda^W dGamma_W/dkappa.
    KappaJet cluster_contribution(const Cluster& w, const ProjectorProduct& e, const PauliSum& insertion) const {
        if (w.weight() == 0) return {};
        const TermSet terms = w.terms();
        std::vector<int> caps;
        std::vector<int> target;
        for (const auto& [a, mu] : w.multiplicities()) {
            (void)a;
            caps.push_back(mu);
            target.push_back(mu);
        }
        std::array<PauliSum, 2> parts{PauliSum{{1.0, PauliString{}}}, insertion};
        Local<KappaJet> local(*this, terms, e, parts);
        const ExponentBox box(caps, w.weight());
        const auto l = log(local.series(box, local.parities()));
        return l[box.index_of(target)];
    }

    // gamma_1..gamma_M for the marginal of qubit j along `axis` (outcome 0).
    std::vector<double> gammas(int j, const ProjectorProduct& e, int max_order, const Vec3& axis = {0, 0, 1}) const {
        check_qubit(j);
        if (e.contains(j)) throw PreconditionError("qubit " + std::to_string(j) + " is already measured");
        if (max_order < 1) return {};
        const auto sets = cache_.term_sets(graph_, {j}, max_order);
        std::array<PauliSum, 2> parts{PauliSum{{1.0, PauliString{}}}, axis_operator(j, axis)};
        const auto jets = order_coefficients<KappaJet>(*sets, e, parts, max_order, -1);
        std::vector<double> g(jets.size());
        for (std::size_t m = 0; m < jets.size(); ++m) g[m] = options_.inject_gamma_sign_fault ? -jets[m].c1 : jets[m].c1;
        return g;
    }

    double gamma(int j, const ProjectorProduct& e, int m, const Vec3& axis = {0, 0, 1}) const {
        if (m < 1) throw PreconditionError("gamma: order must be >= 1");
        return gammas(j, e, m, axis).back();
    }

    // p'(outcome | E) for measuring qubit j along `axis`.
    MarginalEstimate marginal(const ProjectorProduct& e, int j, const Vec3& axis, int outcome, double beta, int order,
                              BetaPolicy policy = BetaPolicy::error) const {
        if (!(beta > 0.0)) throw PreconditionError("marginal: beta must be positive");
        if (order < 1) throw PreconditionError("marginal: order must be >= 1");
        if (outcome != 0 && outcome != 1) throw PreconditionError("marginal: outcome must be 0 or 1");
        if (std::abs(norm(axis) - 1.0) > axis_tolerance) throw PreconditionError("marginal: axis is not a unit vector");
        MarginalEstimate est;
        est.order = order;
        est.tail = 0.5 * tail_bound(beta, constants_.beta_star, order, policy);
        est.guarantee_void = beta >= constants_.beta_star;
        est.gammas = gammas(j, e, order, outcome_axis(axis, outcome));
        double s = 0.0, bp = 1.0;
        for (double g : est.gammas) {
            bp *= beta;
            s += g * bp;
        }
        est.raw = 0.5 + 0.5 * s;
        est.p_prime = std::clamp(est.raw, 0.0, 1.0);
        est.clamped = est.p_prime != est.raw;
        return est;
    }

    // <A> in the state E exp(-beta H) E / Tr[E exp(-beta H)], i.e. after the
    // measurements in E. The tail is a conservative envelope: |supp A| times
    // sum_a |c_a| times the marginal tail series at the threshold of a
    // Hamiltonian in which A's support region counts as one more term.
    ExpectationEstimate observable_expectation(const PauliSum& a, double beta, int order,
                                               const ProjectorProduct& e = {},
                                               BetaPolicy policy = BetaPolicy::error) const {
        if (!(beta > 0.0)) throw PreconditionError("observable_expectation: beta must be positive");
        if (order < 1) throw PreconditionError("observable_expectation: order must be >= 1");
        ExpectationEstimate est;
        est.order = order;

        // Project A onto the measured qubits: E P E = (prod_q v_q.letter) E P_rest.
        PauliSum reduced;
        double norm_bound = 0.0;
        std::vector<int> region;
        for (const auto& [c, p] : a) {
            if (!p.is_hermitian()) throw PreconditionError("observable: term '" + format_pauli(p) + "' is not Hermitian");
            for (int q : p.support()) check_qubit(q);
            double w = p.phase() == 2 ? -c : c;
            norm_bound += std::abs(c);
            std::map<int, Letter> rest;
            for (const auto& [q, l] : p.letters()) {
                if (const Vec3* v = e.find(q)) w *= component(*v, l);
                else rest.emplace(q, l), region.push_back(q);
            }
            if (w == 0.0) continue;
            if (rest.empty()) est.constant += w;
            else reduced.emplace_back(w, PauliString(std::move(rest)));
        }
        std::sort(region.begin(), region.end());
        region.erase(std::unique(region.begin(), region.end()), region.end());
        if (static_cast<int>(region.size()) > options_.max_observable_support)
            throw PreconditionError("observable support " + std::to_string(region.size()) + " exceeds limit " +
                                    std::to_string(options_.max_observable_support));

        est.guarantee_void = beta >= constants_.beta_star;
        est.value = est.constant;
        if (region.empty()) {
            est.coefficients.assign(static_cast<std::size_t>(order), 0.0);
            return est;
        }
        int dd = constants_.dd;
        if (region.size() > 1) {
            std::vector<int> touching;
            for (int q : region) touching.insert(touching.end(), graph_.terms_on(q).begin(), graph_.terms_on(q).end());
            std::sort(touching.begin(), touching.end());
            touching.erase(std::unique(touching.begin(), touching.end()), touching.end());
            dd = std::max(dd, static_cast<int>(touching.size()));
        }
        est.tail = static_cast<double>(region.size()) * norm_bound *
                   tail_bound(beta, clustergibbs::beta_star(dd), order, policy);

        const auto sets = cache_.term_sets(graph_, region, order);
        std::array<PauliSum, 2> parts{PauliSum{{1.0, PauliString{}}}, reduced};
        const auto jets = order_coefficients<KappaJet>(*sets, e, parts, order, -1);
        double bp = 1.0;
        for (const auto& jet : jets) {
            bp *= beta;
            est.coefficients.push_back(jet.c1);
            est.value += jet.c1 * bp;
        }
        return est;
    }

    // Connected correlator <O_i O_j> - <O_i><O_j> with O_q = axis_q . sigma_q,
    // after the measurements in E.
    CorrelationEstimate correlation(const ProjectorProduct& e, int i, int j, const Vec3& ei, const Vec3& ej,
                                    double beta, int order, BetaPolicy policy = BetaPolicy::error) const {
        check_qubit(i);
        check_qubit(j);
        if (i == j) throw PreconditionError("correlation: i and j must differ");
        if (e.contains(i) || e.contains(j)) throw PreconditionError("correlation: both qubits must be unmeasured");
        if (norm(ei) > 1.0 + axis_tolerance || norm(ej) > 1.0 + axis_tolerance)
            throw PreconditionError("correlation: insertion operators must have norm <= 1");
        if (!(beta > 0.0)) throw PreconditionError("correlation: beta must be positive");
        if (order < 1) throw PreconditionError("correlation: order must be >= 1");

        CorrelationEstimate est;
        est.order = order;
        est.guarantee_void = beta >= constants_.beta_star;
        est.distance = interaction_distance(spec_, i, j);
        const int k = constants_.k;
        if (est.distance < 0 || k < 2) {
            est.min_weight = std::numeric_limits<int>::max();
            est.coefficients.assign(static_cast<std::size_t>(order), 0.0);
            tail_bound(beta, constants_.beta_star, order, policy); // policy check only
            return est;
        }
        est.min_weight = (est.distance + k - 2) / (k - 1);
        const double full = tail_bound(beta, constants_.beta_star, order, policy);
        est.tail = std::isinf(full) ? full
                                    : norm(ei) * norm(ej) *
                                          squared_tail(beta / constants_.beta_star, std::max(order + 1, est.min_weight));

        const auto sets = cache_.term_sets(graph_, {i}, order);
        const PauliSum oi = axis_operator(i, ei), oj = axis_operator(j, ej);
        PauliSum both;
        for (const auto& [wi, pi] : oi)
            for (const auto& [wj, pj] : oj) both.emplace_back(wi * wj, pi * pj);
        std::array<PauliSum, 4> parts{PauliSum{{1.0, PauliString{}}}, oi, oj, both};
        const auto jets = order_coefficients<PairJet>(*sets, e, parts, order, j);
        double bp = 1.0;
        for (const auto& jet : jets) {
            bp *= beta;
            est.coefficients.push_back(jet.cij);
            est.value += jet.cij * bp;
        }
        return est;
    }

private:
    const Term& term(int a) const {
        if (a < 0 || static_cast<std::size_t>(a) >= spec_.terms.size())
            throw PreconditionError("term index " + std::to_string(a) + " out of range");
        return spec_.terms[a];
    }

    void check_qubit(int q) const {
        if (q < 0 || q >= spec_.num_qubits) throw PreconditionError("qubit " + std::to_string(q) + " out of range");
    }

    static PauliSum axis_operator(int q, const Vec3& v) {
        PauliSum out;
        for (Letter l : {Letter::X, Letter::Y, Letter::Z})
            if (component(v, l) != 0.0) out.emplace_back(component(v, l), PauliString::single(q, l));
        return out;
    }

    // A term set compiled into its local frame.
    template <class Jet>
    struct Local {
        Local(const Expansion& ex, const TermSet& terms, const ProjectorProduct& e,
              const std::array<PauliSum, Jet::size>& parts)
            : frame(frame_qubits(ex, terms, parts), e) {
            for (int a : terms) {
                ops.push_back(frame.compile(ex.term(a).pauli));
                coeffs.push_back(ex.term(a).coeff);
            }
            for (std::size_t c = 0; c < Jet::size; ++c)
                for (const auto& [w, p] : parts[c]) insertion[c].emplace_back(w, frame.compile(p));
        }

        static std::vector<int> frame_qubits(const Expansion& ex, const TermSet& terms,
                                             const std::array<PauliSum, Jet::size>& parts) {
            std::vector<int> q;
            for (int a : terms) {
                const auto& s = ex.graph_.support(a);
                q.insert(q.end(), s.begin(), s.end());
            }
            for (const auto& part : parts)
                for (const auto& [w, p] : part) {
                    (void)w;
                    for (int x : p.support()) q.push_back(x);
                }
            std::sort(q.begin(), q.end());
            q.erase(std::unique(q.begin(), q.end()), q.end());
            return q;
        }

        std::vector<Jet> parities() const { return detail::parity_traces<Jet>(frame, ops, insertion); }

        BoxSeries<Jet> series(const ExponentBox& box, const std::vector<Jet>& parity) const {
            return detail::exponential_series<Jet>(box, ops, coeffs, parity);
        }

        detail::LocalFrame frame;
        std::vector<detail::LocalPauli> ops;
        std::vector<double> coeffs;
        detail::LocalInsertion<Jet> insertion;
    };

    // False when the insertion has zero trace against every product of the
    // terms; then the insertion components of log F vanish identically.
    static bool insertion_reaches(const std::vector<KappaJet>& parity) {
        return std::any_of(parity.begin(), parity.end(), [](const KappaJet& t) { return t.c1 != 0.0; });
    }
    static bool insertion_reaches(const std::vector<PairJet>& parity) {
        auto any = [&](double PairJet::*c) {
            return std::any_of(parity.begin(), parity.end(), [&](const PairJet& t) { return t.*c != 0.0; });
        };
        return any(&PairJet::cij) || (any(&PairJet::ci) && any(&PairJet::cj));
    }

    // Sum over term sets of the full-support coefficients of log F_S, by total
    // degree 1..M. With require >= 0 only sets whose support contains that
    // qubit contribute. Summation order is the canonical set order.
    template <class Jet>
    std::vector<Jet> order_coefficients(const std::vector<TermSet>& sets, const ProjectorProduct& e,
                                        const std::array<PauliSum, Jet::size>& parts, int max_order,
                                        int require) const {
        std::vector<Jet> out(static_cast<std::size_t>(max_order));
        std::vector<std::unique_ptr<ExponentBox>> boxes(static_cast<std::size_t>(max_order) + 1);
        for (const auto& s : sets) {
            const int size = static_cast<int>(s.size());
            if (size > max_order) continue;
            if (require >= 0) {
                bool hit = false;
                for (int a : s) {
                    const auto& sup = graph_.support(a);
                    if (std::binary_search(sup.begin(), sup.end(), require)) {
                        hit = true;
                        break;
                    }
                }
                if (!hit) continue;
            }
            auto& box = boxes[static_cast<std::size_t>(size)];
            if (!box)
                box = std::make_unique<ExponentBox>(std::vector<int>(s.size(), max_order - size + 1), max_order);
            const Local<Jet> local(*this, s, e, parts);
            const auto parity = local.parities();
            if (!insertion_reaches(parity)) continue;
            const auto l = log(local.series(*box, parity));
            for (std::size_t u = 1; u < box->size(); ++u) {
                if (!box->kept(u)) continue;
                bool full = true;
                for (std::size_t a = 0; a < s.size() && full; ++a) full = box->digit(u, a) > 0;
                if (full) out[static_cast<std::size_t>(box->degree(u) - 1)] += l[u];
            }
        }
        return out;
    }

    HamiltonianSpec spec_;
    TermGraph graph_;
    DerivedConstants constants_;
    ExpansionOptions options_;
    ClusterCache cache_;
};

} // namespace clustergibbs
