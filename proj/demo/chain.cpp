// Samples a transverse-field Ising chain at four times the convergence
// temperature, then looks at the conditional marginals and correlations the
// samples were drawn from.

#include <cstdio>

#include "clustergibbs/expansion.hpp"
#include "clustergibbs/generators.hpp"
#include "clustergibbs/sampler.hpp"

using namespace clustergibbs;

int main() {
    constexpr int n = 40;
    const Expansion ex(generators::transverse_ising(n, generators::chain_edges(n), 1.0, 0.6));
    const double bs = ex.constants().beta_star;
    const double beta = 0.25 * bs;
    const int order = choose_order(beta, bs, n, 2.0);
    std::printf("N=%d  dd=%d  beta_*=%.4g  beta=%.4g  order=%d (tail <= N^-2)\n", n, ex.constants().dd, bs, beta,
                order);

    const SampleOptions opt{beta, order, BetaPolicy::error};
    const auto samples = sample_many(ex, Schedule::z_basis(n), opt, 7, 100);
    for (int s = 0; s < 5; ++s) std::printf("  %s\n", samples[s].bits.c_str());

    // <Z0 Z1> from the samples against the series value.
    const PauliSum zz{{1.0, parse_pauli("Z0 Z1")}};
    const auto emp = estimate_expectation(samples, zz);
    const auto series = ex.observable_expectation(zz, beta, order);
    std::printf("<Z0 Z1>: samples %.5f +- %.5f, series %.6f (tail %.2g)\n", emp.mean, emp.standard_error, series.value,
                series.tail);

    // Marginal of qubit 20 after fixing its left neighbour.
    ProjectorProduct e;
    for (int outcome = 0; outcome < 2; ++outcome) {
        e.add(19, outcome_axis(basis_axis('Z'), outcome));
        const auto m = ex.marginal(e, 20, basis_axis('Z'), 0, beta, order);
        std::printf("p(z20 = 0 | z19 = %d) = %.8f  (tail %.2g)\n", outcome, m.p_prime, m.tail);
        e.remove(19);
    }

    // Connected ZZ correlation falls off with distance.
    for (int d = 1; d <= 5; ++d) {
        const auto c = ex.correlation({}, 10, 10 + d, basis_axis('Z'), basis_axis('Z'), beta, order);
        std::printf("Cor_ZZ(10, %d) = %+.3e  (tail %.2g)\n", 10 + d, c.value, c.tail);
    }
}
