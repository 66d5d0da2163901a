#pragma once

// Autoregressive sampling: measure qubits one at a time, each outcome drawn
// from the truncated-series conditional marginal given all earlier outcomes.
//
// A record's bit string lists outcomes in measurement order, so for adaptive
// schedules bits[n] belongs to steps[n].qubit, not to qubit n.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "clustergibbs/errors.hpp"
#include "clustergibbs/expansion.hpp"
#include "clustergibbs/rng.hpp"
#include "clustergibbs/schedule.hpp"

namespace clustergibbs {

struct StepRecord {
    int qubit = 0;
    std::string basis;
    Vec3 axis{};
    double p0 = 0.5; // p'(outcome 0 | earlier outcomes), after clamping
    double tail = 0.0;
    bool clamped = false;
};

struct SampleRecord {
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
    int order = 0;
    std::string bits;
    std::vector<StepRecord> steps;

    // Outcome recorded for `qubit`, or -1 if it was never measured.
    int outcome_of(int qubit) const {
        for (std::size_t n = 0; n < steps.size(); ++n)
            if (steps[n].qubit == qubit) return bits[n] - '0';
        return -1;
    }

    double max_tail() const {
        double t = 0.0;
        for (const auto& s : steps) t = std::max(t, s.tail);
        return t;
    }
};

inline constexpr const char* sample_schema = "clustergibbs.sample/1";

inline nlohmann::json to_json(const SampleRecord& r) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : r.steps)
        steps.push_back({{"qubit", s.qubit}, {"basis", s.basis}, {"p0", s.p0}, {"tail", s.tail}, {"clamped", s.clamped}});
    return {{"schema", sample_schema}, {"index", r.index}, {"seed", r.seed}, {"order", r.order},
            {"bits", r.bits},          {"steps", steps}};
}

inline ProjectorProduct projector_for(const SampleRecord& r) {
    ProjectorProduct e;
    for (std::size_t n = 0; n < r.steps.size(); ++n) e.add(r.steps[n].qubit, outcome_axis(r.steps[n].axis, r.bits[n] - '0'));
    return e;
}

struct SampleOptions {
    double beta = 0.0;
    int order = 1;
    BetaPolicy policy = BetaPolicy::warn;
};

inline void check_sample_options(const SampleOptions& o) {
    if (!(o.beta > 0.0)) throw PreconditionError("beta must be positive");
    if (o.order < 1) throw PreconditionError("order must be >= 1");
}

inline SampleRecord sample_one(const Expansion& ex, const Schedule& schedule, const SampleOptions& opt,
                               std::uint64_t seed, std::uint64_t index) {
    check_sample_options(opt);
    const int n = ex.spec().num_qubits;
    const SampleStream stream(seed, index);
    SampleRecord rec{seed, index, opt.order, {}, {}};
    ProjectorProduct e;
    std::vector<char> measured(static_cast<std::size_t>(n), 0);
    for (int step = 0; step < n; ++step) {
        const Step s = schedule.next(rec.bits, measured);
        const auto est = ex.marginal(e, s.qubit, s.axis, 0, opt.beta, opt.order, opt.policy);
        const int bit = stream.uniform(static_cast<std::uint64_t>(step)) < est.p_prime ? 0 : 1;
        rec.steps.push_back({s.qubit, s.basis, s.axis, est.p_prime, est.tail, est.clamped});
        rec.bits.push_back(static_cast<char>('0' + bit));
        e.add(s.qubit, outcome_axis(s.axis, bit));
        measured[s.qubit] = 1;
    }
    return rec;
}

// Samples first_index .. first_index + count - 1. Output order is by index
// whatever the thread count.
inline std::vector<SampleRecord> sample_many(const Expansion& ex, const Schedule& schedule, const SampleOptions& opt,
                                             std::uint64_t seed, std::uint64_t count, std::uint64_t first_index = 0,
                                             int jobs = 1) {
    check_sample_options(opt);
    std::vector<SampleRecord> out(count);
    if (count == 0) return out;
    const int workers = static_cast<int>(std::min<std::uint64_t>(std::max(jobs, 1), count));
    if (workers == 1) {
        for (std::uint64_t i = 0; i < count; ++i) out[i] = sample_one(ex, schedule, opt, seed, first_index + i);
        return out;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::uint64_t i = next++; i < count; i = next++) {
                try {
                    out[i] = sample_one(ex, schedule, opt, seed, first_index + i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next = count;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

inline constexpr int explicit_distribution_max_qubits = 16;

// p'(x) for every outcome string x, the product of the same clamped
// conditionals sample_one draws from, multiplied in measurement order.
inline std::map<std::string, double> explicit_distribution(const Expansion& ex, const Schedule& schedule,
                                                           const SampleOptions& opt) {
    check_sample_options(opt);
    const int n = ex.spec().num_qubits;
    if (n > explicit_distribution_max_qubits)
        throw PreconditionError("explicit_distribution supports at most " +
                                std::to_string(explicit_distribution_max_qubits) + " qubits");
    std::map<std::string, double> out;
    std::string prefix;
    ProjectorProduct e;
    std::vector<char> measured(static_cast<std::size_t>(n), 0);
    auto visit = [&](auto& self, double prob) -> void {
        if (static_cast<int>(prefix.size()) == n) {
            out.emplace(prefix, prob);
            return;
        }
        const Step s = schedule.next(prefix, measured);
        const double p0 = ex.marginal(e, s.qubit, s.axis, 0, opt.beta, opt.order, opt.policy).p_prime;
        measured[s.qubit] = 1;
        for (int bit = 0; bit < 2; ++bit) {
            prefix.push_back(static_cast<char>('0' + bit));
            e.add(s.qubit, outcome_axis(s.axis, bit));
            self(self, prob * (bit ? 1.0 - p0 : p0));
            e.remove(s.qubit);
            prefix.pop_back();
        }
        measured[s.qubit] = 0;
    };
    visit(visit, 1.0);
    return out;
}

struct EmpiricalEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t samples = 0;
};

// Sample mean of <x|A|x>. Every qubit in the support of A must have been
// measured along (plus or minus) the axis of A's letter there; otherwise the
// per-sample value only sees the dephased part of A and the caller should use
// Expansion::observable_expectation instead.
inline EmpiricalEstimate estimate_expectation(const std::vector<SampleRecord>& samples, const PauliSum& a) {
    if (samples.empty()) throw PreconditionError("estimate_expectation: no samples");
    for (const auto& [c, p] : a)
        if (!p.is_hermitian()) throw PreconditionError("observable term '" + format_pauli(p) + "' is not Hermitian");
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& r : samples) {
        double value = 0.0;
        for (const auto& [c, p] : a) {
            double v = p.phase() == 2 ? -c : c;
            for (const auto& [q, l] : p.letters()) {
                std::size_t n = 0;
                while (n < r.steps.size() && r.steps[n].qubit != q) ++n;
                if (n == r.steps.size())
                    throw BasisIncompatible("qubit " + std::to_string(q) +
                                            " was not measured; use observable_expectation instead");
                const double along = component(r.steps[n].axis, l);
                if (std::abs(std::abs(along) - 1.0) > 1e-9)
                    throw BasisIncompatible(std::string("observable letter ") + letter_char(l) + " on qubit " +
                                            std::to_string(q) + " is not diagonal in the measured basis " +
                                            r.steps[n].basis + "; use observable_expectation instead");
                const double eigen = r.bits[n] == '0' ? 1.0 : -1.0;
                v *= along * eigen;
            }
            value += v;
        }
        sum += value;
        sum_sq += value * value;
    }
    const double count = static_cast<double>(samples.size());
    EmpiricalEstimate est;
    est.samples = samples.size();
    est.mean = sum / count;
    if (samples.size() > 1) {
        const double var = std::max(0.0, (sum_sq - count * est.mean * est.mean) / (count - 1.0));
        est.standard_error = std::sqrt(var / count);
    }
    return est;
}

} // namespace clustergibbs
