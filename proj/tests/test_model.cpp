#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "clustergibbs/generators.hpp"
#include "clustergibbs/model.hpp"

using namespace clustergibbs;

namespace {

HamiltonianSpec zz_chain3() { return make_spec(3, {{0.5, parse_pauli("Z0 Z1")}, {0.5, parse_pauli("Z1 Z2")}}); }

} // namespace

TEST(Model, ParsesMinimalFile) {
    const auto spec = parse_model(nlohmann::json::parse(R"({"num_qubits": 2, "terms": [{"pauli": "Z0 Z1", "coeff": -0.5}]})"));
    ASSERT_EQ(spec.terms.size(), 1u);
    EXPECT_EQ(spec.terms[0].coeff, -0.5);
    EXPECT_EQ(locality(spec), 2);
}

TEST(Model, MergesDuplicatesAndFoldsSign) {
    const auto spec = make_spec(2, {{0.3, parse_pauli("Z0 Z1")}, {0.3, parse_pauli("Z0 Z1")}, {0.2, parse_pauli("- X0")}});
    ASSERT_EQ(spec.terms.size(), 2u);
    EXPECT_DOUBLE_EQ(spec.terms[0].coeff, 0.6);
    EXPECT_DOUBLE_EQ(spec.terms[1].coeff, -0.2);
    EXPECT_EQ(spec.terms[1].pauli.phase(), 0);
}

TEST(Model, Validation) {
    EXPECT_THROW(make_spec(2, {{1.5, parse_pauli("Z0")}}), ModelError);
    std::vector<std::string> warnings;
    EXPECT_NO_THROW(make_spec(2, {{1.5, parse_pauli("Z0")}}, std::nullopt, {false}, &warnings));
    EXPECT_EQ(warnings.size(), 1u);
    EXPECT_THROW(make_spec(2, {{0.5, parse_pauli("Z2")}}), ModelError);
    EXPECT_THROW(make_spec(2, {{0.5, parse_pauli("i Z0")}}), ModelError);
    EXPECT_THROW(make_spec(0, {}), ModelError);
    EXPECT_THROW(parse_model(nlohmann::json::parse(R"({"num_qubits": 1, "terms": [], "extra": 1})")), ModelError);
    EXPECT_NO_THROW(parse_model(nlohmann::json::parse(R"({"num_qubits": 1, "terms": [], "extra": 1})"), {false}));
    EXPECT_THROW(parse_model(nlohmann::json::parse(R"({"num_qubits": 1, "terms": [{"pauli": "Q0", "coeff": 1}]})")),
                 ModelError);
}

TEST(Model, AdjacencyLocalityIsAdvisory) {
    std::vector<std::string> warnings;
    const std::vector<std::pair<int, int>> chain{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}};
    make_spec(6, {{0.5, parse_pauli("Z0 Z5")}}, chain, {}, &warnings);
    EXPECT_EQ(warnings.size(), 1u);
}

TEST(Model, JsonRoundTrip) {
    Random rng(3);
    const auto spec = generators::random_grid(2, 3, rng);
    const auto again = parse_model(to_json(spec));
    ASSERT_EQ(again.terms.size(), spec.terms.size());
    for (std::size_t a = 0; a < spec.terms.size(); ++a) {
        EXPECT_EQ(again.terms[a].coeff, spec.terms[a].coeff);
        EXPECT_EQ(again.terms[a].pauli, spec.terms[a].pauli);
    }
    EXPECT_EQ(again.adjacency, spec.adjacency);
}

TEST(Model, OverlapDegree) {
    EXPECT_EQ(overlap_degree(zz_chain3(), DegreeMode::empirical), 1);
    // Z0Z1 meets Z1Z2 and the six single-site Paulis on qubits 0 and 1.
    EXPECT_EQ(overlap_degree(zz_chain3(), DegreeMode::strict), 7);
    EXPECT_EQ(overlap_degree(make_spec(1, {{0.5, parse_pauli("Z0")}}), DegreeMode::empirical), 0);
    // A present single-site term is not double counted as virtual.
    EXPECT_EQ(overlap_degree(make_spec(1, {{0.5, parse_pauli("Z0")}}), DegreeMode::strict), 2);
}

TEST(Model, OverlapDegreeInvariants) {
    Random rng(5);
    for (int t = 0; t < 20; ++t) {
        auto spec = generators::random_chain(3 + t % 5, rng);
        const int strict = overlap_degree(spec, DegreeMode::strict);
        const int empirical = overlap_degree(spec, DegreeMode::empirical);
        EXPECT_GE(strict, empirical);
        std::reverse(spec.terms.begin(), spec.terms.end());
        EXPECT_EQ(overlap_degree(spec, DegreeMode::strict), strict);
        EXPECT_EQ(overlap_degree(spec, DegreeMode::empirical), empirical);
    }
}

TEST(Model, BetaStar) {
    EXPECT_NEAR(beta_star(1), 0.033834, 5e-7);
    EXPECT_NEAR(beta_star(2), 0.011278, 5e-7);
    EXPECT_EQ(beta_star(0), beta_star(1));
    for (int d = 1; d < 40; ++d) EXPECT_GT(beta_star(d), beta_star(d + 1));
    const auto c = derive_constants(zz_chain3(), DegreeMode::empirical);
    EXPECT_EQ(c.k, 2);
    EXPECT_EQ(c.dd, 1);
    EXPECT_EQ(c.beta_star, beta_star(1));
}

TEST(Model, TermGraph) {
    const TermGraph chain(make_spec(4, {{0.5, parse_pauli("Z0 Z1")}, {0.5, parse_pauli("Z1 Z2")}, {0.5, parse_pauli("Z2 Z3")}}));
    EXPECT_TRUE(chain.adjacent(0, 1));
    EXPECT_TRUE(chain.adjacent(1, 2));
    EXPECT_FALSE(chain.adjacent(0, 2));
    EXPECT_EQ(chain.neighbors(1), (std::vector<int>{0, 2}));

    const TermGraph apart(make_spec(6, {{0.5, parse_pauli("Z0")}, {0.5, parse_pauli("Z5")}}));
    EXPECT_FALSE(apart.adjacent(0, 1));

    const TermGraph touching(make_spec(3, {{0.5, parse_pauli("X1")}, {0.5, parse_pauli("Z1 Z2")}}));
    EXPECT_TRUE(touching.adjacent(0, 1));
}

TEST(Model, InteractionDistance) {
    const auto spec = make_spec(6, {{0.5, parse_pauli("Z0 Z1")}, {0.5, parse_pauli("X1 X2 X3")}, {0.5, parse_pauli("Z5")}});
    EXPECT_EQ(interaction_distance(spec, 0, 0), 0);
    EXPECT_EQ(interaction_distance(spec, 0, 1), 1);
    EXPECT_EQ(interaction_distance(spec, 0, 3), 2);
    EXPECT_EQ(interaction_distance(spec, 0, 5), -1);
}
