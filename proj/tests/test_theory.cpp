#include <gtest/gtest.h>

#include <random>

#include "shearlab/theory.hpp"

using namespace shearlab;

namespace {

bool has_clique(const std::set<Tuple>& edges, int size, int ar, int npts)
{
    bool found = false;
    detail::for_each_subset(npts, size, [&](const std::vector<int>& S) {
        if (found) return;
        bool all = true;
        detail::for_each_subset(size, ar, [&](const std::vector<int>& sub) {
            Tuple e;
            for (int i : sub) e.push_back(S[i]);
            all = all && edges.count(e);
        });
        found = all;
    });
    return found;
}

// Try every edge set on the new tuples {x} u T and check literals plus the clique axiom.
bool test_oracle(const ParamModel& m, const std::vector<FormulaInstance>& fam)
{
    int M = m.size(), x = M, ar = m.theory.edge_arity();
    std::vector<Tuple> news;
    detail::for_each_subset(M, ar - 1, [&](const std::vector<int>& T) { news.push_back(T); });
    std::vector<std::pair<Tuple, bool>> lits;
    for (const auto& f : fam) {
        for (const auto& a : f.tpl.pos) lits.push_back({bind(a, f.binding), true});
        for (const auto& a : f.tpl.neg) lits.push_back({bind(a, f.binding), false});
    }
    for (uint64_t mask = 0; mask < (uint64_t(1) << news.size()); ++mask) {
        std::set<Tuple> on;
        for (size_t i = 0; i < news.size(); ++i)
            if (mask >> i & 1) on.insert(news[i]);
        bool ok = true;
        for (const auto& [t, sign] : lits) {
            bool holds = !has_repeat(t) && on.count(t);
            if (holds != sign) ok = false;
        }
        if (!ok) continue;
        if (m.theory.clique_size() > 0) {
            std::set<Tuple> edges = m.diagram();
            for (auto t : on) {
                t.push_back(x);
                edges.insert(t);
            }
            if (has_clique(edges, m.theory.clique_size(), ar, M + 1)) continue;
        }
        return true;
    }
    return false;
}

FormulaInstance random_over(const ParamModel& m, std::mt19937_64& rng)
{
    int ar = m.theory.edge_arity();
    FormulaInstance f;
    f.tpl.slots = ar - 1 + static_cast<int>(rng() % 2);
    for (int i = 0; i < f.tpl.slots; ++i) f.binding.push_back(static_cast<int>(rng() % m.size()));
    int lits = 1 + static_cast<int>(rng() % 2);
    for (int l = 0; l < lits; ++l) {
        Tuple t;
        for (int i = 0; i < ar - 1; ++i) t.push_back(static_cast<int>(rng() % f.tpl.slots));
        (rng() % 4 ? f.tpl.pos : f.tpl.neg).push_back(t);
    }
    return f;
}

std::vector<TheorySpec> theories()
{
    return {TheorySpec::random_graph(), TheorySpec::hypergraph(3, 2), TheorySpec::hypergraph(4, 3),
            TheorySpec::clique_free_graph(2), TheorySpec::clique_free_graph(3)};
}

std::vector<FormulaInstance> pick(const std::vector<FormulaInstance>& fam, const std::vector<int>& idx)
{
    std::vector<FormulaInstance> out;
    for (int i : idx) out.push_back(fam[i]);
    return out;
}

} // namespace

TEST(TheorySpec, Validation)
{
    EXPECT_THROW(TheorySpec::hypergraph(2, 2), InputError);
    EXPECT_THROW(TheorySpec::hypergraph(3, 1), InputError);
    EXPECT_EQ(TheorySpec::hypergraph(3, 2).edge_arity(), 3);
    EXPECT_EQ(TheorySpec::hypergraph(3, 2).clique_size(), 4);
    EXPECT_EQ(TheorySpec::random_graph().label(), "T_rg");
    auto t = TheorySpec::hypergraph(4, 3);
    EXPECT_EQ(TheorySpec::from_json(t.to_json()), t);
}

TEST(ParamModel, EdgesAndJson)
{
    ParamModel m(TheorySpec::hypergraph(3, 2));
    for (int i = 0; i < 4; ++i) m.add_element("a" + std::to_string(i));
    EXPECT_THROW(m.add_edge({0, 1}), InputError);
    EXPECT_THROW(m.add_edge({0, 0, 1}), InputError);
    m.add_edge({2, 0, 1});
    EXPECT_TRUE(m.has_edge_sorted({0, 1, 2}));
    EXPECT_FALSE(m.clique());
    m.add_edge({0, 1, 3});
    m.add_edge({0, 2, 3});
    m.add_edge({1, 2, 3});
    EXPECT_EQ(m.clique(), (Tuple{0, 1, 2, 3}));
    auto back = ParamModel::from_json(m.to_json());
    EXPECT_EQ(back.diagram(), m.diagram());
    EXPECT_EQ(back.name(3), "a3");
}

TEST(Instance, Errors)
{
    ParamModel m(TheorySpec::random_graph());
    m.add_element("a");
    FormulaInstance f{{2, {{0}}, {}, {}}, {0}};
    EXPECT_THROW(instance_consistent(m, f), InputError);
    f.binding = {0, 3};
    EXPECT_THROW(instance_consistent(m, f), InputError);
    f.binding = {0, 0};
    f.tpl.pos = {{0, 1}};
    EXPECT_THROW(instance_consistent(m, f), InputError);
}

TEST(Instance, RepeatedPositiveAtomIsInconsistent)
{
    ParamModel m(TheorySpec::hypergraph(3, 2));
    m.add_element("a");
    m.add_element("b");
    EXPECT_FALSE(instance_consistent(m, {{2, {{0, 1}}, {}, {}}, {0, 0}}));
    EXPECT_TRUE(instance_consistent(m, {{2, {}, {{0, 1}}, {}}, {0, 0}}));
    EXPECT_TRUE(instance_consistent(m, {{2, {{0, 1}}, {}, {}}, {0, 1}}));
}

TEST(Instance, TriangleCompletion)
{
    ParamModel m(TheorySpec::clique_free_graph(2));
    int a = m.add_element("a"), b = m.add_element("b");
    FormulaInstance f{{2, {{0}, {1}}, {}, {}}, {a, b}};
    EXPECT_TRUE(instance_consistent(m, f));
    m.add_edge({a, b});
    EXPECT_FALSE(instance_consistent(m, f));
}

TEST(Oracle, MatchesExhaustiveExtension)
{
    std::mt19937_64 rng(17);
    for (const auto& th : theories()) {
        int agree = 0, incons = 0;
        for (int it = 0; it < 600; ++it) {
            auto [m, f] = random_instance(th, th.edge_arity() == 4 ? 5 : 6, rng);
            bool fast = instance_consistent(m, f);
            ASSERT_EQ(fast, test_oracle(m, {f})) << th.label() << " " << m.to_json().dump();
            EXPECT_EQ(fast, brute_force_consistency_oracle(m, f));
            agree++;
            incons += !fast;
        }
        EXPECT_EQ(agree, 600);
        EXPECT_GT(incons, 10) << th.label();
    }
}

TEST(Oracle, RefusesLargeModels)
{
    ParamModel m(TheorySpec::random_graph());
    for (int i = 0; i <= oracle_size_limit(); ++i) m.add_element("a" + std::to_string(i));
    EXPECT_THROW(brute_force_consistency_oracle(m, FormulaInstance{{1, {{0}}, {}, {}}, {0}}), BudgetError);
}

TEST(Family, UnionMatchesOracleAndPlain)
{
    std::mt19937_64 rng(23);
    for (const auto& th : theories()) {
        for (int it = 0; it < 150; ++it) {
            auto m = random_instance(th, 5, rng).first;
            std::vector<FormulaInstance> fam;
            int len = 1 + static_cast<int>(rng() % 5);
            for (int i = 0; i < len; ++i) fam.push_back(random_over(m, rng));
            auto v = family_consistent(m, fam, 8);
            EXPECT_EQ(v.consistent, test_oracle(m, fam));
            EXPECT_EQ(v.consistent, family_consistent_plain(m, fam));
        }
    }
}

TEST(Family, CoresAreMinimumAndInconsistent)
{
    std::mt19937_64 rng(29);
    int cores = 0;
    for (const auto& th : theories()) {
        for (int it = 0; it < 200; ++it) {
            auto m = random_instance(th, 5, rng).first;
            std::vector<FormulaInstance> fam;
            int len = 2 + static_cast<int>(rng() % 5);
            for (int i = 0; i < len; ++i) fam.push_back(random_over(m, rng));
            auto v = family_consistent(m, fam, 8);
            if (v.consistent) continue;
            ASSERT_FALSE(v.core_bound_exceeded);
            ++cores;
            EXPECT_FALSE(test_oracle(m, pick(fam, v.core)));
            EXPECT_TRUE(std::is_sorted(v.core.begin(), v.core.end()));
            // no strictly smaller inconsistent subfamily
            for (int sz = 1; sz < static_cast<int>(v.core.size()); ++sz)
                detail::for_each_subset(len, sz, [&](const std::vector<int>& idx) {
                    EXPECT_TRUE(test_oracle(m, pick(fam, idx)));
                });
        }
    }
    EXPECT_GT(cores, 100);
}

TEST(Family, CoreBoundReported)
{
    auto [m, fam] = tp_sequence_triangle_free(3, 3);
    auto v = family_consistent(m, fam, 2);
    EXPECT_FALSE(v.consistent);
    EXPECT_TRUE(v.core_bound_exceeded);
    EXPECT_TRUE(v.core.empty());
    auto w = family_consistent(m, fam, 3);
    EXPECT_EQ(w.core, (std::vector<int>{0, 1, 2}));
}

TEST(TpSequence, TriangleFreePairwiseInconsistent)
{
    auto [m, fam] = tp_sequence_triangle_free(2, 5);
    EXPECT_FALSE(m.clique());
    for (int i = 0; i < 5; ++i) EXPECT_TRUE(instance_consistent(m, fam[i]));
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) {
            auto v = family_consistent(m, pick(fam, {i, j}), 4);
            EXPECT_FALSE(v.consistent);
            EXPECT_EQ(v.core, (std::vector<int>{0, 1}));
        }
}

TEST(TpSequence, K4FreeNeedsThreeInstances)
{
    // frozen: with n = 3 every pair stays consistent, every triple is not
    auto [m, fam] = tp_sequence_triangle_free(3, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) EXPECT_TRUE(family_consistent_plain(m, pick(fam, {i, j})));
    detail::for_each_subset(4, 3, [&](const std::vector<int>& idx) {
        EXPECT_FALSE(family_consistent_plain(m, pick(fam, idx)));
    });
}
