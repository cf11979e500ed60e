#include "oracles.hpp"
#include "qhd/blowup.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace qhd;

namespace {

std::multiset<int> weight_set(const WeightedGraph& g) {
    std::multiset<int> s;
    for (const auto& [v, w] : g.weights()) s.insert(w);
    return s;
}

mpz_class abs_det(const WeightedGraph& g) { return abs(determinant(intersection_matrix(g))); }

/// Random tree with exactly one (-1)-vertex at a random position.
WeightedGraph random_marked_tree(std::mt19937& rng, int n) {
    WeightedGraph g;
    std::uniform_int_distribution<int> w(-5, -2);
    int marked = std::uniform_int_distribution<int>(0, n - 1)(rng);
    for (int v = 0; v < n; ++v) {
        g.add_vertex(v, v == marked ? -1 : w(rng));
        if (v) g.add_edge(std::uniform_int_distribution<int>(0, v - 1)(rng), v);
    }
    return g;
}

} // namespace

TEST(Seed, WeightMultisets) {
    EXPECT_EQ(weight_set(seed_graph(SeedType::A)), (std::multiset<int>{-1, -3, -3, -3}));
    EXPECT_EQ(weight_set(seed_graph(SeedType::B)), (std::multiset<int>{-1, -4, -4, -2}));
    EXPECT_EQ(weight_set(seed_graph(SeedType::C)), (std::multiset<int>{-1, -6, -3, -2}));
    for (SeedType t : all_seed_types()) EXPECT_EQ(seed_graph(t).valency(0), 3);
}

TEST(BlowUp, B1OnSeedA) {
    auto g = apply_b1(seed_graph(SeedType::A));
    EXPECT_EQ(g.weight(0), -2);
    EXPECT_EQ(g.valency(0), 4);
    EXPECT_EQ(g.weight(4), -1);
    EXPECT_EQ(g.neighbors(4), std::vector<VertexId>{0});
}

TEST(BlowUp, B1OnLinearChain) {
    WeightedGraph g;
    g.add_vertex(0, -3);
    g.add_vertex(1, -1);
    g.add_edge(0, 1);
    auto b = apply_b1(g);
    EXPECT_EQ(b.weight(1), -2);
    EXPECT_EQ(b.weight(2), -1);
    EXPECT_TRUE(b.has_edge(0, 1));
    EXPECT_TRUE(b.has_edge(1, 2));
}

TEST(BlowUp, B2OnSeedAEdge) {
    auto g = apply_b2(seed_graph(SeedType::A), 0, 1);
    EXPECT_EQ(g.weight(0), -2);
    EXPECT_EQ(g.weight(1), -4);
    EXPECT_EQ(g.weight(4), -1);
    EXPECT_TRUE(g.has_edge(0, 4));
    EXPECT_TRUE(g.has_edge(4, 1));
    EXPECT_FALSE(g.has_edge(0, 1));
    EXPECT_EQ(weight_set(g), (std::multiset<int>{-2, -4, -3, -3, -1}));
}

TEST(BlowUp, B2OnSeedCMinusTwoArm) {
    auto g = apply_b2(seed_graph(SeedType::C), 3, 0);
    EXPECT_EQ(g.weight(0), -2);
    EXPECT_EQ(g.weight(4), -1);
    EXPECT_EQ(g.weight(3), -3);
    EXPECT_TRUE(g.has_edge(0, 4));
    EXPECT_TRUE(g.has_edge(4, 3));
}

TEST(BlowUp, B2RejectsBadEdges) {
    auto g = seed_graph(SeedType::A);
    EXPECT_THROW(apply_b2(g, 1, 2), GraphError);
    auto h = apply_b1(g);
    EXPECT_THROW(apply_b2(h, 0, 1), GraphError);
}

TEST(Modification, Seeds) {
    EXPECT_EQ(weight_set(apply_m(seed_graph(SeedType::A), SeedType::A)), (std::multiset<int>{-4, -3, -3, -3}));
    EXPECT_EQ(weight_set(apply_m(seed_graph(SeedType::B), SeedType::B)), (std::multiset<int>{-3, -4, -4, -2}));
    EXPECT_EQ(weight_set(apply_m(seed_graph(SeedType::C), SeedType::C)), (std::multiset<int>{-2, -6, -3, -2}));
}

TEST(BlowDown, InvertsB1AndB2) {
    auto g = seed_graph(SeedType::A);
    auto b1 = apply_b1(g);
    EXPECT_TRUE(isomorphic(blow_down(b1, 4), g));
    auto b2 = apply_b2(g, 0, 2);
    EXPECT_TRUE(isomorphic(blow_down(b2, 4), g));
    EXPECT_THROW(blow_down(g, 0), GraphError);
    EXPECT_THROW(blow_down(g, 1), GraphError);
}

TEST(Augment, SeedsGiveAppendedChains) {
    auto a = augment(seed_graph(SeedType::A), SeedType::A);
    EXPECT_EQ(a.weight(0), -4);
    EXPECT_EQ(a.weight(6), -1);
    EXPECT_EQ(a.weight(5), -2);
    EXPECT_EQ(a.weight(4), -2);
    EXPECT_TRUE(a.has_edge(0, 6));
    EXPECT_TRUE(a.has_edge(6, 5));
    EXPECT_TRUE(a.has_edge(5, 4));

    auto b = augment(seed_graph(SeedType::B), SeedType::B);
    EXPECT_EQ(b.weight(0), -3);
    EXPECT_EQ(b.size(), 6u);

    auto c = augment(seed_graph(SeedType::C), SeedType::C);
    EXPECT_EQ(c.weight(0), -2);
    EXPECT_EQ(c.weight(4), -1);
    EXPECT_EQ(c.size(), 5u);

    for (SeedType t : all_seed_types()) {
        auto bar = apply_m(seed_graph(t), t);
        EXPECT_EQ(minimalize(augment(seed_graph(t), t), t), bar);
    }
}

TEST(Replay, SpecExamples) {
    EXPECT_EQ(replay({SeedType::A, {}, true}), apply_m(seed_graph(SeedType::A), SeedType::A));
    auto g = replay({SeedType::A, {BlowUpOp::b2(0, 1)}, false});
    EXPECT_EQ(weight_set(g), (std::multiset<int>{-3, -2, -1, -4, -3}));

    auto c = replay({SeedType::C, {BlowUpOp::b1()}, true});
    EXPECT_EQ(c.weight(0), -2);
    EXPECT_EQ(c.valency(0), 4);
    auto r = validate(c);
    ASSERT_FALSE(r.ok());
    EXPECT_EQ(r.violations.front(), "valency-4 vertex without cross ratio");
}

TEST(Replay, ReportsFailingOpIndex) {
    ConstructionHistory h{SeedType::A, {BlowUpOp::b1(), BlowUpOp::b2(1, 2)}, true};
    try {
        replay(h);
        FAIL();
    } catch (const ReplayError& e) {
        EXPECT_EQ(e.index(), 1u);
    }
}

TEST(Enumerate, OneOpCounts) {
    // At most one op: the seed itself plus the one-op results.
    EXPECT_EQ(enumerate_histories(SeedType::A, 1).size(), 5u);
    EXPECT_EQ(enumerate(SeedType::A, 1).size(), 3u);
    EXPECT_EQ(enumerate(SeedType::C, 1).size(), 5u);

    std::set<std::string> exactly_one_a, exactly_one_c;
    for (const auto& e : enumerate_histories(SeedType::A, 1))
        if (e.history.ops.size() == 1) exactly_one_a.insert(canonical_form(e.minimal));
    for (const auto& e : enumerate_histories(SeedType::C, 1))
        if (e.history.ops.size() == 1) exactly_one_c.insert(canonical_form(e.minimal));
    EXPECT_EQ(exactly_one_a.size(), 2u);
    EXPECT_EQ(exactly_one_c.size(), 4u);
}

TEST(Enumerate, CentroidCanonAgreesWithAllRootsOracle) {
    for (SeedType t : all_seed_types()) {
        std::map<std::string, std::string> fwd, back;
        for (const auto& e : enumerate_histories(t, 4)) {
            auto c = canonical_form(e.minimal);
            auto o = oracle::all_roots_canon(e.minimal);
            auto [it, fresh] = fwd.emplace(c, o);
            ASSERT_EQ(it->second, o);
            auto [jt, fresh2] = back.emplace(o, c);
            ASSERT_EQ(jt->second, c);
        }
    }
}

TEST(Enumerate, CanonIgnoresRelabeling) {
    WeightedGraph a, b;
    for (int v = 0; v < 4; ++v) {
        a.add_vertex(v, -2 - v);
        b.add_vertex(10 - v, -2 - v);
    }
    a.add_edge(0, 1);
    a.add_edge(1, 2);
    a.add_edge(1, 3);
    b.add_edge(10, 9);
    b.add_edge(9, 8);
    b.add_edge(9, 7);
    EXPECT_TRUE(isomorphic(a, b));
    b.set_weight(7, -9);
    EXPECT_FALSE(isomorphic(a, b));
}

TEST(Enumerate, WitnessIsLeastHistory) {
    for (const auto& cls : enumerate(SeedType::B, 3)) {
        for (const auto& h : cls.histories) EXPECT_LE(cls.witness.str(), h.str());
        EXPECT_EQ(canonical_form(with_default_cross_ratio(replay(cls.witness), -1)), cls.canonical);
    }
}

TEST(Enumerate, DeterministicOrder) {
    auto a = enumerate(SeedType::C, 3);
    auto b = enumerate(SeedType::C, 3);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].canonical, b[i].canonical);
}

TEST(Property, PreModificationGraphsAreDegenerate) {
    for (SeedType t : all_seed_types())
        for (const auto& e : enumerate_histories(t, 4)) {
            ConstructionHistory h = e.history;
            h.modified = false;
            for (const auto& g : replay_steps(h)) {
                ASSERT_EQ(determinant(intersection_matrix(g)), 0) << h.str();
                ASSERT_EQ(minus_one_vertices(g).size(), 1u);
            }
        }
}

TEST(Property, BlowUpPreservesAbsDetAndBlowDownInverts) {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 400; ++trial) {
        auto g = random_marked_tree(rng, 2 + trial % 7);
        VertexId v = unique_minus_one(g);
        auto b1 = apply_b1(g);
        ASSERT_EQ(abs_det(b1), abs_det(g));
        ASSERT_TRUE(isomorphic(blow_down(b1, unique_minus_one(b1)), g));
        for (VertexId u : g.neighbors(v)) {
            auto b2 = apply_b2(g, v, u);
            ASSERT_EQ(abs_det(b2), abs_det(g));
            ASSERT_TRUE(isomorphic(blow_down(b2, unique_minus_one(b2)), g));
        }
    }
}

TEST(Property, AugmentThenMinimalizeIsModification) {
    for (SeedType t : all_seed_types())
        for (const auto& e : enumerate_histories(t, 3)) {
            ConstructionHistory h = e.history;
            h.modified = false;
            auto g = replay(h);
            ASSERT_TRUE(isomorphic(minimalize(augment(g, t), t), apply_m(g, t))) << h.str();
        }
}
