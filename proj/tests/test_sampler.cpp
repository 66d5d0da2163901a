#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <map>

#include "clustergibbs/generators.hpp"
#include "clustergibbs/oracle.hpp"
#include "clustergibbs/sampler.hpp"

using namespace clustergibbs;

namespace {

// Upper-tail p-value of Pearson's statistic for counts against probabilities.
double chi_square_p_value(const std::map<std::string, int>& counts, const std::map<std::string, double>& probs, int n) {
    double stat = 0.0;
    int cells = 0;
    for (const auto& [x, p] : probs) {
        if (p * n < 1e-9) continue;
        auto it = counts.find(x);
        const double observed = it == counts.end() ? 0.0 : it->second;
        stat += (observed - p * n) * (observed - p * n) / (p * n);
        ++cells;
    }
    boost::math::chi_squared dist(cells - 1);
    return boost::math::cdf(boost::math::complement(dist, stat));
}

std::map<std::string, int> histogram(const std::vector<SampleRecord>& records) {
    std::map<std::string, int> h;
    for (const auto& r : records) ++h[r.bits];
    return h;
}

} // namespace

TEST(Sampler, ZeroHamiltonianIsUniform) {
    const Expansion ex(make_spec(3, {}));
    const SampleOptions opt{0.01, 2, BetaPolicy::error};
    const auto records = sample_many(ex, Schedule::z_basis(3), opt, 99, 4000);
    for (const auto& r : records)
        for (const auto& s : r.steps) ASSERT_EQ(s.p0, 0.5);
    std::map<std::string, double> uniform;
    for (int x = 0; x < 8; ++x) {
        std::string bits;
        for (int q = 0; q < 3; ++q) bits += static_cast<char>('0' + (x >> q & 1));
        uniform[bits] = 0.125;
    }
    EXPECT_GT(chi_square_p_value(histogram(records), uniform, 4000), 1e-3);
}

TEST(Sampler, BitIsZeroExactlyWhenUniformBelowP0) {
    Random rng(61);
    const auto spec = generators::random_chain(5, rng);
    const Expansion ex(spec);
    const SampleOptions opt{0.5 * ex.constants().beta_star, 3, BetaPolicy::error};
    for (std::uint64_t i = 0; i < 20; ++i) {
        const auto r = sample_one(ex, Schedule::z_basis(5), opt, 7, i);
        const SampleStream stream(7, i);
        for (std::size_t n = 0; n < r.steps.size(); ++n)
            ASSERT_EQ(r.bits[n] == '0', stream.uniform(n) < r.steps[n].p0);
    }
}

TEST(Sampler, MatchesExplicitDistribution) {
    Random rng(62);
    // Strong couplings at a beta above beta_* so the distribution is far from
    // uniform and a chi-square test has power.
    const auto spec = generators::random_chain(4, rng);
    const Expansion ex(spec);
    const SampleOptions opt{0.6, 6, BetaPolicy::warn};
    const auto schedule = Schedule::z_basis(4);
    const auto probs = explicit_distribution(ex, schedule, opt);
    double total = 0.0;
    for (const auto& [x, p] : probs) total += p;
    EXPECT_NEAR(total, 1.0, 1e-12);
    constexpr int n = 20000;
    const auto records = sample_many(ex, schedule, opt, 5, n);
    EXPECT_GT(chi_square_p_value(histogram(records), probs, n), 1e-3);
    // Each record's probability is the product of its step marginals.
    for (int i = 0; i < 20; ++i) {
        const auto& r = records[static_cast<std::size_t>(i)];
        double p = 1.0;
        for (std::size_t k = 0; k < r.steps.size(); ++k) p *= r.bits[k] == '0' ? r.steps[k].p0 : 1.0 - r.steps[k].p0;
        EXPECT_NEAR(p, probs.at(r.bits), 1e-15);
    }
}

TEST(Sampler, ExplicitDistributionWithinTvBound) {
    Random rng(63);
    const auto spec = generators::random_grid(2, 3, rng);
    const Expansion ex(spec);
    const double beta = 0.5 * ex.constants().beta_star;
    const SampleOptions opt{beta, 2, BetaPolicy::error};
    const auto schedule = parse_schedule(nlohmann::json::parse(
        R"({"adaptive": {"rules": {"": {"qubit": 4, "basis": "X"}, "1": {"qubit": 0, "basis": "Y"}}, "default": {"basis": "Z"}}})"));
    const auto approx = explicit_distribution(ex, schedule, opt);
    const auto exact = oracle::exact_distribution(oracle::dense_gibbs(spec, beta), schedule);
    const double eps = 0.5 * tail_bound(beta, ex.constants().beta_star, 2);
    EXPECT_LE(oracle::exact_tv(approx, exact), 2.0 * spec.num_qubits * eps);
}

TEST(Sampler, AdaptiveDefaultEqualsStaticOrder) {
    Random rng(64);
    const auto spec = generators::random_chain(5, rng);
    const Expansion ex(spec);
    const SampleOptions opt{0.5 * ex.constants().beta_star, 3, BetaPolicy::error};
    const std::vector<int> order{3, 1, 4, 0, 2};
    std::vector<Step> steps;
    for (int q : order) steps.push_back(named_step(q, 'X'));
    Schedule::DefaultRule d;
    d.axis = basis_axis('X');
    d.basis = "X";
    d.order = order;
    const auto a = sample_many(ex, Schedule::static_order(steps), opt, 3, 30);
    const auto b = sample_many(ex, Schedule::adaptive({}, d), opt, 3, 30);
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(to_json(a[i]), to_json(b[i]));
}

TEST(Sampler, ThreadCountDoesNotChangeOutput) {
    Random rng(65);
    const auto spec = generators::random_chain(6, rng);
    const Expansion ex(spec);
    const SampleOptions opt{0.5 * ex.constants().beta_star, 3, BetaPolicy::error};
    const auto a = sample_many(ex, Schedule::z_basis(6), opt, 11, 50, 100, 1);
    const auto b = sample_many(ex, Schedule::z_basis(6), opt, 11, 50, 100, 4);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ASSERT_EQ(a[i].index, 100 + i);
        ASSERT_EQ(to_json(a[i]).dump(), to_json(b[i]).dump());
    }
    // A record depends only on (seed, index).
    EXPECT_EQ(to_json(sample_one(ex, Schedule::z_basis(6), opt, 11, 117)), to_json(a[17]));
}

TEST(Sampler, EstimateExpectation) {
    Random rng(66);
    const auto spec = generators::random_chain(4, rng);
    const Expansion ex(spec);
    const SampleOptions opt{0.6, 6, BetaPolicy::warn};
    const auto records = sample_many(ex, Schedule::z_basis(4), opt, 8, 20000);
    const PauliSum zz{{0.7, parse_pauli("Z1 Z2")}, {-0.3, parse_pauli("Z0")}};
    const auto est = estimate_expectation(records, zz);
    // The explicit distribution gives the exact mean of the sampled law.
    double mean = 0.0;
    for (const auto& [x, p] : explicit_distribution(ex, Schedule::z_basis(4), opt)) {
        const double z0 = x[0] == '0' ? 1 : -1, z1 = x[1] == '0' ? 1 : -1, z2 = x[2] == '0' ? 1 : -1;
        mean += p * (0.7 * z1 * z2 - 0.3 * z0);
    }
    EXPECT_NEAR(est.mean, mean, 5.0 * est.standard_error);
    EXPECT_THROW(estimate_expectation(records, {{1.0, parse_pauli("X1")}}), BasisIncompatible);
    EXPECT_THROW(estimate_expectation({}, zz), PreconditionError);
}

TEST(Sampler, RecordJson) {
    const Expansion ex(make_spec(2, {{0.5, parse_pauli("Z0 Z1")}}));
    const SampleOptions opt{1e-3, 2, BetaPolicy::error};
    const auto r = sample_one(ex, Schedule::z_basis(2), opt, 1, 0);
    const auto j = to_json(r);
    EXPECT_EQ(j["schema"], sample_schema);
    EXPECT_EQ(j["bits"].get<std::string>().size(), 2u);
    EXPECT_EQ(j["steps"].size(), 2u);
    EXPECT_EQ(r.outcome_of(1), r.bits[1] - '0');
    EXPECT_EQ(projector_for(r).size(), 2u);
}

TEST(Sampler, GuaranteeVoidUnderErrorPolicy) {
    const Expansion ex(make_spec(2, {{0.5, parse_pauli("Z0 Z1")}}));
    EXPECT_THROW(sample_one(ex, Schedule::z_basis(2), {1.0, 2, BetaPolicy::error}, 1, 0), GuaranteeVoid);
    const auto r = sample_one(ex, Schedule::z_basis(2), {1.0, 2, BetaPolicy::warn}, 1, 0);
    EXPECT_TRUE(std::isinf(r.max_tail()));
}
