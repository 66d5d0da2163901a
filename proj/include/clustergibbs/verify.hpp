#pragma once

// The acceptance suite: ten checks of the expansion, sampler and enumeration
// against the dense oracle and closed forms, on generated desk-scale models.
// Shared by `clustergibbs verify` and the acceptance test binary.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "clustergibbs/clusters.hpp"
#include "clustergibbs/expansion.hpp"
#include "clustergibbs/generators.hpp"
#include "clustergibbs/model.hpp"
#include "clustergibbs/oracle.hpp"
#include "clustergibbs/rng.hpp"
#include "clustergibbs/sampler.hpp"
#include "clustergibbs/schedule.hpp"

namespace clustergibbs::verify {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double bound = 0.0;
    std::string detail;
    double seconds = 0.0;
};

inline nlohmann::json to_json(const CriterionResult& r) {
    return {{"criterion", r.id}, {"name", r.name},     {"passed", r.passed},  {"measured", r.measured},
            {"bound", r.bound},  {"detail", r.detail}, {"seconds", r.seconds}};
}

struct VerifyOptions {
    std::uint64_t seed = 0x5eed2024;
    std::set<int> only;                  // empty: all criteria
    bool inject_gamma_sign_fault = false; // see ExpansionOptions
};

// Pinned tolerances.
namespace tolerance {
inline constexpr double rounding = 1e-12;          // slack for floating-point noise in bound checks
inline constexpr double nullity = 1e-9;            // disconnected-cluster coefficients
inline constexpr double analytic = 1e-9;           // closed-form gamma series
inline constexpr double monotone_factor = 1.10;    // TV(M+1) <= 1.1 TV(M) ...
inline constexpr double monotone_floor = 1e-12;    // ... + floor (rounding level of the TV sums)
inline constexpr double runtime_exponent = 1.3;
inline constexpr double sweep_seconds = 600.0;
inline constexpr double smoke_seconds = 10.0;
} // namespace tolerance

struct NamedModel {
    std::string name;
    HamiltonianSpec spec;
};

// 17 random chains with N = 4..10 and three random 3x3 grids. Chains with
// N >= 9 use real terms so the dense oracle can use the real eigensolver.
inline std::vector<NamedModel> model_suite(std::uint64_t seed) {
    std::vector<NamedModel> out;
    for (int i = 0; i < 17; ++i) {
        const int n = 4 + i % 7;
        Random rng(seed, 1000 + static_cast<std::uint64_t>(i));
        out.push_back({"chain" + std::to_string(n) + "-" + std::to_string(i), generators::random_chain(n, rng, n >= 9)});
    }
    for (int i = 0; i < 3; ++i) {
        Random rng(seed, 2000 + static_cast<std::uint64_t>(i));
        out.push_back({"grid3x3-" + std::to_string(i), generators::random_grid(3, 3, rng)});
    }
    return out;
}

namespace detail {

inline Expansion make_expansion(const HamiltonianSpec& spec, const VerifyOptions& opt) {
    ExpansionOptions eo;
    eo.inject_gamma_sign_fault = opt.inject_gamma_sign_fault;
    return Expansion(spec, eo);
}

inline Vec3 random_axis(Random& rng) {
    switch (rng.below(4)) {
    case 0: return basis_axis('X');
    case 1: return basis_axis('Y');
    case 2: return basis_axis('Z');
    default: return rng.unit_vector();
    }
}

// A random measurement history and the next qubit to measure.
struct Prefix {
    ProjectorProduct e;
    int next = 0;
    Vec3 axis{};
};

inline Prefix random_prefix(int n, Random& rng) {
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) order[q] = q;
    rng.shuffle(order);
    const int measured = rng.below(n);
    Prefix p;
    for (int k = 0; k < measured; ++k) p.e.add(order[k], random_axis(rng));
    p.next = order[measured];
    p.axis = random_axis(rng);
    return p;
}

inline std::string fmt(double x) {
    std::ostringstream s;
    s.precision(4);
    s << x;
    return s.str();
}

class Timer {
public:
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// All multisets of weight m over the terms, kept when connected and touching j.
inline std::vector<Cluster> brute_force_clusters(int j, int m, const TermGraph& g) {
    std::vector<Cluster> out;
    const int t = static_cast<int>(g.num_terms());
    std::vector<int> pick;
    auto rec = [&](auto& self, int from) -> void {
        if (static_cast<int>(pick.size()) == m) {
            Cluster w = Cluster::from_indices(pick, g);
            if (w.touches(j) && is_connected(w, g)) out.push_back(std::move(w));
            return;
        }
        for (int a = from; a < t; ++a) {
            pick.push_back(a);
            self(self, a);
            pick.pop_back();
        }
    };
    rec(rec, 0);
    std::sort(out.begin(), out.end());
    return out;
}

// A random decision table: explicit rules for every branch shorter than
// `depth`, then a default rule with a random order and basis.
inline Schedule random_adaptive_schedule(int n, int depth, Random& rng) {
    std::map<std::string, Step> rules;
    std::vector<char> measured(static_cast<std::size_t>(n), 0);
    std::string prefix;
    auto rec = [&](auto& self) -> void {
        if (static_cast<int>(prefix.size()) >= std::min(depth, n)) return;
        std::vector<int> free;
        for (int q = 0; q < n; ++q)
            if (!measured[q]) free.push_back(q);
        const int q = free[static_cast<std::size_t>(rng.below(static_cast<int>(free.size())))];
        const int kind = rng.below(4);
        rules.emplace(prefix, kind < 3 ? named_step(q, "XYZ"[kind]) : vector_step(q, rng.unit_vector()));
        measured[q] = 1;
        for (char bit : {'0', '1'}) {
            prefix.push_back(bit);
            self(self);
            prefix.pop_back();
        }
        measured[q] = 0;
    };
    rec(rec);
    Schedule::DefaultRule d;
    const int kind = rng.below(3);
    d.axis = basis_axis("XYZ"[kind]);
    d.basis = std::string(1, "XYZ"[kind]);
    for (int q = 0; q < n; ++q) d.order.push_back(q);
    rng.shuffle(d.order);
    return Schedule::adaptive(std::move(rules), d);
}

} // namespace detail

// 1. Conditional marginals within half the tail bound of the exact value.
inline CriterionResult marginal_accuracy(const VerifyOptions& opt) {
    detail::Timer timer;
    CriterionResult r{1, "marginal accuracy", true, 0.0, 1.0, {}, 0.0};
    double worst_err = 0.0;
    int checks = 0;
    const auto suite = model_suite(opt.seed);
    for (std::size_t mi = 0; mi < suite.size(); ++mi) {
        const auto& model = suite[mi];
        const Expansion ex = detail::make_expansion(model.spec, opt);
        const double beta = ex.constants().beta_star / 2.0;
        const auto state = oracle::dense_gibbs(model.spec, beta);
        Random rng(opt.seed, 3000 + mi);
        for (int t = 0; t < 100; ++t) {
            const auto p = detail::random_prefix(model.spec.num_qubits, rng);
            const int outcome = rng.below(2);
            const double exact = oracle::exact_marginal(state, p.e, p.next, p.axis, outcome);
            for (int m = 2; m <= 6; ++m) {
                const auto est = ex.marginal(p.e, p.next, p.axis, outcome, beta, m);
                const double err = std::abs(est.p_prime - exact);
                const double ratio = err / est.tail;
                worst_err = std::max(worst_err, err);
                ++checks;
                if (ratio > r.measured) r.measured = ratio;
                if (err > est.tail + tolerance::rounding) {
                    if (r.passed)
                        r.detail += model.name + " prefix " + std::to_string(t) + " M=" + std::to_string(m) +
                                    ": |p'-p| = " + detail::fmt(err) + " > " + detail::fmt(est.tail) + "; ";
                    r.passed = false;
                }
            }
        }
    }
    r.seconds = timer.seconds();
    if (r.seconds > 300.0) {
        r.passed = false;
        r.detail += "runtime " + detail::fmt(r.seconds) + " s exceeds 300 s; ";
    }
    r.detail += std::to_string(checks) + " checks over " + std::to_string(suite.size()) +
                " models; measured = max |p'-p| / tail; max |p'-p| = " + detail::fmt(worst_err);
    return r;
}

namespace detail {

struct TvResult {
    double tv = 0.0;
    double eps = 0.0;
    int n = 0;
};

inline TvResult tv_against_oracle(const Expansion& ex, const oracle::DenseState& state, const Schedule& schedule,
                                  double beta, int order) {
    SampleOptions so{beta, order, BetaPolicy::error};
    const auto approx = explicit_distribution(ex, schedule, so);
    const auto exact = oracle::exact_distribution(state, schedule);
    const double eps = 0.5 * tail_bound(beta, ex.constants().beta_star, order);
    return {oracle::exact_tv(approx, exact), eps, ex.spec().num_qubits};
}

} // namespace detail

// 2. Total variation of the sampled distribution within 2 N eps, and
// non-increasing in the order.
inline CriterionResult tv_bound(const VerifyOptions& opt) {
    detail::Timer timer;
    CriterionResult r{2, "TV bound", true, 0.0, 1.0, {}, 0.0};
    std::string monotone;
    for (int n = 3; n <= 8; ++n) {
        Random rng(opt.seed, 4000 + static_cast<std::uint64_t>(n));
        const auto spec = generators::random_chain(n, rng);
        const Expansion ex = detail::make_expansion(spec, opt);
        const double beta = ex.constants().beta_star / 2.0;
        const auto state = oracle::dense_gibbs(spec, beta);
        const auto schedule = Schedule::z_basis(n);
        const auto at4 = detail::tv_against_oracle(ex, state, schedule, beta, 4);
        const double bound = 2.0 * n * at4.eps;
        r.measured = std::max(r.measured, at4.tv / bound);
        if (at4.tv > bound + tolerance::rounding) {
            r.passed = false;
            r.detail += "N=" + std::to_string(n) + ": TV " + detail::fmt(at4.tv) + " > " + detail::fmt(bound) + "; ";
        }
        double previous = std::numeric_limits<double>::infinity();
        std::string series;
        for (int m = 2; m <= 6; ++m) {
            const double tv = detail::tv_against_oracle(ex, state, schedule, beta, m).tv;
            series += (m > 2 ? "," : "") + detail::fmt(tv);
            if (tv > tolerance::monotone_factor * previous + tolerance::monotone_floor) {
                r.passed = false;
                r.detail += "N=" + std::to_string(n) + ": TV rose from " + detail::fmt(previous) + " to " +
                            detail::fmt(tv) + " at M=" + std::to_string(m) + "; ";
            }
            previous = tv;
        }
        monotone += "N=" + std::to_string(n) + " TV(M=2..6)=[" + series + "] ";
    }
    r.seconds = timer.seconds();
    r.detail += "measured = max TV / (2 N eps) at M=4; " + monotone;
    return r;
}

// 3. |gamma_m| <= m beta_*^{-m}.
inline CriterionResult coefficient_bound(const VerifyOptions& opt) {
    detail::Timer timer;
    CriterionResult r{3, "coefficient bound", true, 0.0, 1.0, {}, 0.0};
    int checks = 0;
    const auto suite = model_suite(opt.seed);
    for (std::size_t mi = 0; mi < suite.size(); ++mi) {
        const auto& model = suite[mi];
        const Expansion ex = detail::make_expansion(model.spec, opt);
        const double bs = ex.constants().beta_star;
        Random rng(opt.seed, 5000 + mi);
        for (int j = 0; j < model.spec.num_qubits; ++j) {
            ProjectorProduct conditioned;
            for (int q = 0; q < model.spec.num_qubits; ++q)
                if (q != j && rng.chance(0.5)) conditioned.add(q, detail::random_axis(rng));
            for (const ProjectorProduct& e : {ProjectorProduct{}, conditioned}) {
                const auto g = ex.gammas(j, e, 6, detail::random_axis(rng));
                for (int m = 1; m <= 6; ++m) {
                    const double bound = m * std::pow(bs, -m);
                    const double ratio = std::abs(g[m - 1]) / bound;
                    r.measured = std::max(r.measured, ratio);
                    ++checks;
                    if (ratio > 1.0) {
                        r.passed = false;
                        r.detail += model.name + " j=" + std::to_string(j) + " m=" + std::to_string(m) + "; ";
                    }
                }
            }
        }
    }
    r.seconds = timer.seconds();
    r.detail += std::to_string(checks) + " coefficients; measured = max |gamma_m| / (m beta_*^-m)";
    return r;
}

// 4. Disconnected clusters contribute nothing.
inline CriterionResult disconnected_nullity(const VerifyOptions& opt) {
    detail::Timer timer;
    CriterionResult r{4, "disconnected nullity", true, 0.0, tolerance::nullity, {}, 0.0};
    Random rng(opt.seed, 6000);
    int made = 0;
    int attempts = 0;
    while (made < 50) {
        if (++attempts > 10000) {
            r.passed = false;
            r.detail += "could not build 50 disconnected clusters; ";
            break;
        }
        const bool grid = rng.chance(0.5);
        const auto spec = grid ? generators::random_grid(3, 4, rng) : generators::random_chain(10, rng);
        const Expansion ex = detail::make_expansion(spec, opt);
        const auto& g = ex.graph();
        const int n = spec.num_qubits;
        const int j = rng.below(n);
        const int k = rng.below(n);
        const auto left = enumerate_connected(j, 1 + rng.below(3), g);
        const auto right = enumerate_connected(k, 1 + rng.below(3), g);
        const Cluster& v1 = left[static_cast<std::size_t>(rng.below(static_cast<int>(left.size())))];
        const Cluster& v2 = right[static_cast<std::size_t>(rng.below(static_cast<int>(right.size())))];
        const Cluster w = v1.united(v2, g);
        if (is_connected(w, g)) continue;
        ProjectorProduct e;
        for (int q = 0; q < n; ++q)
            if (q != j && rng.chance(0.4)) e.add(q, detail::random_axis(rng));
        const Vec3 axis = detail::random_axis(rng);
        PauliSum insertion;
        for (Letter l : {Letter::X, Letter::Y, Letter::Z}) insertion.emplace_back(component(axis, l), PauliString::single(j, l));
        const KappaJet c = ex.cluster_contribution(w, e, insertion);
        r.measured = std::max(r.measured, std::abs(c.c1));
        ++made;
    }
    if (r.measured > tolerance::nullity) r.passed = false;
    r.seconds = timer.seconds();
    r.detail += std::to_string(made) + " disconnected clusters; measured = max |c1|";
    return r;
}

// 5. Enumeration size within (e dd)^m, and equal to brute force on small models.
inline CriterionResult cluster_count(const VerifyOptions& opt) {
    detail::Timer timer;
    CriterionResult r{5, "cluster count bound", true, 0.0, 1.0, {}, 0.0};
    for (const auto& model : model_suite(opt.seed)) {
        const TermGraph g(model.spec);
        const int dd = overlap_degree(model.spec, DegreeMode::strict);
        for (int j = 0; j < model.spec.num_qubits; ++j)
            for (int m = 1; m <= 6; ++m) {
                const double count = static_cast<double>(enumerate_connected(j, m, g).size());
                const double bound = std::pow(std::numbers::e * dd, m);
                r.measured = std::max(r.measured, count / bound);
                if (count > bound) {
                    r.passed = false;
                    r.detail += model.name + " j=" + std::to_string(j) + " m=" + std::to_string(m) + "; ";
                }
            }
    }
    // Brute force on models with at most 8 terms.
    std::vector<NamedModel> small;
    for (int n = 2; n <= 4; ++n) {
        Random rng(opt.seed, 7000 + static_cast<std::uint64_t>(n));
        small.push_back({"chain" + std::to_string(n), generators::random_chain(n, rng)});
    }
    small.push_back({"tfim2x2", generators::transverse_ising(4, generators::grid_edges(2, 2), 0.7, 0.4)});
    int compared = 0;
    for (const auto& model : small) {
        const TermGraph g(model.spec);
        if (g.num_terms() > 8) continue;
        for (int j = 0; j < model.spec.num_qubits; ++j)
            for (int m = 1; m <= 6; ++m) {
                ++compared;
                if (enumerate_connected(j, m, g) != detail::brute_force_clusters(j, m, g)) {
                    r.passed = false;
                    r.detail += model.name + " j=" + std::to_string(j) + " m=" + std::to_string(m) +
                                " differs from brute force; ";
                }
            }
    }
    r.seconds = timer.seconds();
    r.detail += "measured = max count / (e dd)^m; " + std::to_string(compared) + " brute-force comparisons";
    return r;
}

// 6. Closed-form single-site series.
inline CriterionResult analytic_series(const VerifyOptions& opt) {
    detail::Timer timer;
    CriterionResult r{6, "analytic series", true, 0.0, tolerance::analytic, {}, 0.0};
    for (double lambda : {0.8, -0.35, 1.0}) {
        const Expansion ex = detail::make_expansion(make_spec(1, {{lambda, parse_pauli("Z0")}}), opt);
        const auto g = ex.gammas(0, {}, 5);
        const double l3 = lambda * lambda * lambda;
        const double expected[5] = {-lambda, 0.0, l3 / 3.0, 0.0, -2.0 * l3 * lambda * lambda / 15.0};
        for (int m = 0; m < 5; ++m) r.measured = std::max(r.measured, std::abs(g[m] - expected[m]));
    }
    if (r.measured > tolerance::analytic) {
        r.passed = false;
        r.detail += "gamma series off by " + detail::fmt(r.measured) + "; ";
    }
    double transverse = 0.0;
    for (double lambda : {0.8, -0.5}) {
        const Expansion ex = detail::make_expansion(make_spec(1, {{lambda, parse_pauli("X0")}}), opt);
        for (double beta : {ex.constants().beta_star / 2.0, 0.02})
            for (int m = 1; m <= 6; ++m)
                transverse = std::max(transverse,
                                      std::abs(ex.marginal({}, 0, basis_axis('Z'), 0, beta, m, BetaPolicy::warn).p_prime - 0.5));
    }
    if (transverse > std::numeric_limits<double>::epsilon()) {
        r.passed = false;
        r.detail += "transverse-field marginal deviates from 1/2 by " + detail::fmt(transverse) + "; ";
    }
    r.seconds = timer.seconds();
    r.detail += "measured = max |gamma_m - closed form|; transverse |p'-1/2| = " + detail::fmt(transverse);
    return r;
}

// 7. Random adaptive decision tables obey the same TV bound.
inline CriterionResult adaptive_protocols(const VerifyOptions& opt) {
    detail::Timer timer;
    CriterionResult r{7, "adaptive protocols", true, 0.0, 1.0, {}, 0.0};
    int tables = 0;
    for (int n = 3; n <= 8; ++n)
        for (int rep = 0; rep < 2; ++rep) {
            Random rng(opt.seed, 8000 + 10 * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(rep));
            // Odd N: a second chain; even N: a 2 x N/2 ladder.
            const auto spec = rep == 1 && n % 2 == 0 ? generators::random_grid(2, n / 2, rng)
                                                     : generators::random_chain(n, rng);
            const Expansion ex = detail::make_expansion(spec, opt);
            const double beta = ex.constants().beta_star / 2.0;
            const auto state = oracle::dense_gibbs(spec, beta);
            const auto schedule = detail::random_adaptive_schedule(n, 3, rng);
            const auto tv = detail::tv_against_oracle(ex, state, schedule, beta, 4);
            const double bound = 2.0 * n * tv.eps;
            r.measured = std::max(r.measured, tv.tv / bound);
            ++tables;
            if (tv.tv > bound + tolerance::rounding) {
                r.passed = false;
                r.detail += "N=" + std::to_string(n) + " table " + std::to_string(rep) + ": TV " + detail::fmt(tv.tv) +
                            " > " + detail::fmt(bound) + "; ";
            }
        }
    r.seconds = timer.seconds();
    r.detail += std::to_string(tables) + " random tables; measured = max TV / (2 N eps) at M=4";
    return r;
}

// 8. Conditional correlations decay with distance, and the two-insertion
// expansion matches the oracle within its tail.
inline CriterionResult correlation_decay(const VerifyOptions& opt) {
    detail::Timer timer;
    CriterionResult r{8, "correlation decay", true, 0.0, 1.0, {}, 0.0};
    constexpr int n = 10;
    constexpr int order = 4;
    int pairs = 0;
    double worst_decay = 0.0;
    for (int rep = 0; rep < 2; ++rep) {
        Random rng(opt.seed, 9000 + static_cast<std::uint64_t>(rep));
        const auto spec = generators::random_chain(n, rng, true);
        const Expansion ex = detail::make_expansion(spec, opt);
        const double beta = ex.constants().beta_star / 2.0;
        const auto state = oracle::dense_gibbs(spec, beta);
        std::vector<int> qubits(n);
        for (int q = 0; q < n; ++q) qubits[q] = q;
        rng.shuffle(qubits);
        ProjectorProduct e;
        for (int k = 0; k < 3; ++k) e.add(qubits[k], detail::random_axis(rng));
        for (int i = 0; i + 4 < n; ++i) {
            if (e.contains(i) || e.contains(i + 1) || e.contains(i + 4)) continue;
            const auto near = oracle::exact_correlation(state, e, i, i + 1);
            const auto far = oracle::exact_correlation(state, e, i, i + 4);
            ++pairs;
            worst_decay = std::max(worst_decay, far.value / near.value);
            if (far.value > near.value) {
                r.passed = false;
                r.detail += "Cor(" + std::to_string(i) + "," + std::to_string(i + 4) + ") exceeds Cor(" +
                            std::to_string(i) + "," + std::to_string(i + 1) + "); ";
            }
            for (const auto* c : {&near, &far}) {
                const int j = c == &near ? i + 1 : i + 4;
                const double exact = oracle::connected_correlator(state, e, i, j, c->ei, c->ej);
                const auto est = ex.correlation(e, i, j, c->ei, c->ej, beta, order);
                const double ratio = std::abs(est.value - exact) / est.tail;
                r.measured = std::max(r.measured, ratio);
                if (std::abs(est.value - exact) > est.tail + tolerance::rounding) {
                    r.passed = false;
                    r.detail += "expansion Cor(" + std::to_string(i) + "," + std::to_string(j) + ") off by " +
                                detail::fmt(std::abs(est.value - exact)) + " > tail " + detail::fmt(est.tail) + "; ";
                }
            }
        }
    }
    r.seconds = timer.seconds();
    r.detail += std::to_string(pairs) + " site pairs; measured = max |expansion - oracle| / tail; max Cor(i,i+4)/Cor(i,i+1) = " +
                detail::fmt(worst_decay);
    return r;
}

struct BenchRow {
    int n = 0;
    double seconds = 0.0; // mean seconds per sample
};

// Least-squares slope of log(seconds) against log(N).
inline double fitted_exponent(const std::vector<BenchRow>& rows) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double k = static_cast<double>(rows.size());
    for (const auto& row : rows) {
        const double x = std::log(static_cast<double>(row.n)), y = std::log(row.seconds);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

// Mean time of `samples` calls to sample_one on a random chain of each length,
// starting from a fresh expansion (so enumeration is included).
inline std::vector<BenchRow> scaling_benchmark(const std::vector<int>& sizes, int order, int samples,
                                               std::uint64_t seed) {
    std::vector<BenchRow> rows;
    for (int n : sizes) {
        Random rng(seed, 10000 + static_cast<std::uint64_t>(n));
        const auto spec = generators::random_chain(n, rng);
        detail::Timer timer;
        const Expansion ex(spec);
        const SampleOptions so{ex.constants().beta_star / 2.0, order, BetaPolicy::error};
        const auto schedule = Schedule::z_basis(n);
        for (int s = 0; s < samples; ++s) sample_one(ex, schedule, so, seed, static_cast<std::uint64_t>(s));
        rows.push_back({n, timer.seconds() / samples});
    }
    return rows;
}

// 9. Sampling time grows polynomially (fitted exponent <= 1.3) in N.
inline CriterionResult polynomial_runtime(const VerifyOptions& opt) {
    detail::Timer timer;
    CriterionResult r{9, "polynomial runtime", true, 0.0, tolerance::runtime_exponent, {}, 0.0};
    const auto rows = scaling_benchmark({25, 50, 100, 200}, 3, 10, opt.seed);
    r.measured = fitted_exponent(rows);
    r.passed = r.measured <= tolerance::runtime_exponent;
    r.seconds = timer.seconds();
    if (rows.front().seconds > tolerance::smoke_seconds) {
        r.passed = false;
        r.detail += "N=25 sample took " + detail::fmt(rows.front().seconds) + " s; ";
    }
    if (r.seconds > tolerance::sweep_seconds) {
        r.passed = false;
        r.detail += "sweep took " + detail::fmt(r.seconds) + " s; ";
    }
    r.detail += "measured = fitted exponent; seconds per sample:";
    for (const auto& row : rows) r.detail += " N=" + std::to_string(row.n) + ":" + detail::fmt(row.seconds);
    return r;
}

// 10. Identical configuration and seed give byte-identical output, whatever
// the thread count.
inline CriterionResult determinism(const VerifyOptions& opt) {
    detail::Timer timer;
    CriterionResult r{10, "determinism", true, 0.0, 0.0, {}, 0.0};
    Random rng(opt.seed, 11000);
    const auto spec = generators::random_grid(3, 3, rng);
    const Expansion first = detail::make_expansion(spec, opt);
    const Expansion second = detail::make_expansion(spec, opt);
    const SampleOptions so{first.constants().beta_star / 2.0, 4, BetaPolicy::error};
    const auto schedule = detail::random_adaptive_schedule(spec.num_qubits, 3, rng);
    auto dump = [](const std::vector<SampleRecord>& records) {
        std::string s;
        for (const auto& rec : records) s += to_json(rec).dump() + "\n";
        return s;
    };
    const std::string a = dump(sample_many(first, schedule, so, opt.seed, 40, 0, 1));
    const std::string b = dump(sample_many(second, schedule, so, opt.seed, 40, 0, 3));
    const std::string c = dump(sample_many(first, schedule, so, opt.seed, 40, 0, 1));
    r.measured = (a != b) + (a != c);
    r.passed = r.measured == 0.0;
    r.seconds = timer.seconds();
    r.detail = "measured = number of mismatching reruns (1 vs 3 threads, warm vs cold cache)";
    return r;
}

inline std::vector<CriterionResult> run(const VerifyOptions& opt,
                                        const std::function<void(const CriterionResult&)>& on_result = {}) {
    using Fn = CriterionResult (*)(const VerifyOptions&);
    static constexpr Fn all[] = {marginal_accuracy,    tv_bound,           coefficient_bound, disconnected_nullity,
                                 cluster_count,        analytic_series,    adaptive_protocols, correlation_decay,
                                 polynomial_runtime,   determinism};
    std::vector<CriterionResult> out;
    for (int id = 1; id <= 10; ++id) {
        if (!opt.only.empty() && !opt.only.count(id)) continue;
        CriterionResult res;
        try {
            res = all[id - 1](opt);
        } catch (const std::exception& ex) {
            res.id = id;
            res.name = "criterion " + std::to_string(id);
            res.passed = false;
            res.detail = std::string("exception: ") + ex.what();
        }
        if (on_result) on_result(res);
        out.push_back(std::move(res));
    }
    return out;
}

} // namespace clustergibbs::verify
