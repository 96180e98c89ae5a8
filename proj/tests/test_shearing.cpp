#include <gtest/gtest.h>

#include "shearlab/shearing.hpp"

using namespace shearlab;

namespace {

json names(const IndexStructure& J, const std::vector<Tuple>& ts)
{
    json out = json::array();
    for (const auto& t : ts) out.push_back(tuple_names(J, t));
    return out;
}

std::shared_ptr<const IndexStructure> saturated(const std::string& ctx)
{
    auto c = builtin_context(ctx);
    return std::make_shared<const IndexStructure>(saturate(c.base, c.cls, {2, 1, 1}));
}

EqualityPattern projection_pattern(std::shared_ptr<const IndexStructure> J, const TheorySpec& th,
                                   std::vector<int> coords)
{
    auto mr = build_mirror(*J, th);
    return extract_equality_pattern(mirror_family(J, mr, {}, qf_type({0, 1}, {}, *J), coords));
}

} // namespace

TEST(T32, ShearsWithFrozenCore)
{
    auto w = build_t32_witness();
    auto v = verify_shearing(w);
    ASSERT_TRUE(v.shears) << v.clause << " " << v.detail;
    EXPECT_EQ(v.orbit_size, 7);
    EXPECT_EQ(names(*w.J, v.core),
              json::parse(R"([["t0","v0_1","v0_2"],["v0_0","t1","v0_2"],["v0_0","v0_1","t2"]])"));
    EXPECT_TRUE(core_reverifies(w.model, core_instances(w, v)));
    EXPECT_EQ(w.J->size(), 6);
    EXPECT_EQ(w.J->edges().size(), 1u);
}

TEST(T32, DropEdgeBreaksClauseFive)
{
    auto v = verify_shearing(mutate_drop_edge(build_t32_witness()));
    EXPECT_FALSE(v.shears);
    EXPECT_EQ(v.clause, "clause5");
}

TEST(T32, ClauseOneChecks)
{
    auto w = build_t32_witness();
    auto bad = w;
    bad.I0 = {5};
    EXPECT_EQ(verify_shearing(bad).clause, "clause1");
    bad = w;
    bad.I1 = {0, 1, 3};
    EXPECT_EQ(verify_shearing(bad).clause, "clause1");
    bad = w;
    bad.t = {0, 1};
    EXPECT_EQ(verify_shearing(bad).clause, "clause1");
}

TEST(T32, IndiscernibilityBreaksClauseThree)
{
    auto w = build_t32_witness();
    // an edge among the t-copies that the orbit does not respect
    w.model.add_edge({w.param_of[0], w.param_of[1], w.param_of[2]});
    auto v = verify_shearing(w);
    EXPECT_FALSE(v.shears);
    EXPECT_EQ(v.clause, "clause3");
}

TEST(T32, DropEdgesRejectsNonEdge)
{
    EXPECT_THROW(drop_edges(build_t32_witness(), {{0, 1, 2}}), InputError);
}

TEST(Tnk, CertificatesVerify)
{
    struct Row {
        int n, k, levels, core, orbit;
    };
    for (auto r : {Row{3, 2, 3, 3, 7}, Row{4, 2, 2, 6, 11}, Row{4, 3, 2, 4, 15}, Row{5, 3, 1, 10, 26}}) {
        auto c = build_tnk_certificate(r.n, r.k, r.levels);
        auto v = verify_certificate(c);
        ASSERT_TRUE(v.ok) << r.n << r.k << r.levels << " " << v.reason;
        ASSERT_EQ(static_cast<int>(v.levels.size()), r.levels);
        for (int l = 0; l < r.levels; ++l) {
            EXPECT_EQ(static_cast<int>(v.levels[l].core.size()), r.core);
            EXPECT_EQ(v.levels[l].orbit_size, r.orbit);
            auto si = c.instance(l + 1);
            EXPECT_TRUE(core_reverifies(si.model, core_instances(si, v.levels[l])));
        }
    }
}

TEST(Tnk, BadParameters)
{
    EXPECT_THROW(build_tnk_certificate(2, 2, 1), InputError);
    EXPECT_THROW(build_tnk_certificate(3, 1, 1), InputError);
    EXPECT_THROW(build_tnk_certificate(3, 2, 0), InputError);
}

TEST(Tnk, StructuralFailures)
{
    auto c = build_tnk_certificate(3, 2, 2);
    auto bad = c;
    std::swap(bad.levels[0], bad.levels[1]);
    auto v = verify_certificate(bad);
    EXPECT_FALSE(v.ok);
    EXPECT_EQ(v.failing_level, 2);
    bad = c;
    bad.levels.clear();
    EXPECT_EQ(verify_certificate(bad).failing_level, 0);
    bad = c;
    bad.levels[0].B.clear();
    EXPECT_EQ(verify_certificate(bad).reason, "B is empty");
}

TEST(Transport, MonotoneTransportsShear)
{
    auto c = build_tnk_certificate(3, 2, 2);
    auto si = c.instance(2);
    auto ts = monotone_transports(si);
    // 3 points in I0 can shrink; no base point lies outside I1
    EXPECT_EQ(ts.size(), 8u);
    for (const auto& t : ts) {
        auto v = verify_shearing(t);
        EXPECT_TRUE(v.shears) << t.I0.size() << " " << v.clause;
    }
    EXPECT_EQ(monotone_transports(build_t32_witness()).size(), 1u);
}

TEST(Transport, BudgetRefused)
{
    auto si = build_tnk_certificate(3, 2, 3).instance(3);
    EXPECT_THROW(monotone_transports(si, 16), BudgetError);
}

TEST(Dividing, TriangleFreeSequence)
{
    auto [m, fam] = tp_sequence_triangle_free(2, 5);
    auto sf = sequence_family(fam);
    auto v = verify_dividing_as_shearing(sf.context, m, sf.family, sf.phi, 2);
    EXPECT_TRUE(v.ok());
    EXPECT_EQ(names(*sf.J, v.shear.core), json::parse(R"([["t0"],["t1"]])"));
}

TEST(Dividing, K4FreeSequenceIsOnlyThreeInconsistent)
{
    auto [m, fam] = tp_sequence_triangle_free(3, 4);
    auto sf = sequence_family(fam);
    auto v2 = verify_dividing_as_shearing(sf.context, m, sf.family, sf.phi, 2);
    EXPECT_FALSE(v2.k_inconsistent);
    EXPECT_EQ(v2.consistent_subset.size(), 2u);
    EXPECT_TRUE(v2.shear.shears);
    EXPECT_TRUE(verify_dividing_as_shearing(sf.context, m, sf.family, sf.phi, 3).ok());
}

TEST(Dividing, InputErrors)
{
    auto [m, fam] = tp_sequence_triangle_free(2, 3);
    EXPECT_THROW(sequence_family({}), InputError);
    auto sf = sequence_family(fam);
    EXPECT_THROW(verify_dividing_as_shearing(cnk_context(3, 2), m, sf.family, sf.phi, 2), InputError);
    EXPECT_THROW(verify_dividing_as_shearing(sf.context, m, sf.family, sf.phi, 0), InputError);
}

TEST(TrivialDividing, FrozenSearches)
{
    auto a = search_trivial_dividing(TheorySpec::hypergraph(3, 2), {4, 5});
    EXPECT_FALSE(a.found);
    EXPECT_EQ(a.candidates, 7642);
    auto b = search_trivial_dividing(TheorySpec::hypergraph(4, 3), {4, 5});
    EXPECT_FALSE(b.found);
    EXPECT_EQ(b.candidates, 9372);
    // the non-simple control finds the complement-of-matching sequence
    auto c = search_trivial_dividing(TheorySpec::clique_free_graph(3), {4, 5});
    ASSERT_TRUE(c.found);
    EXPECT_EQ(c.counterexample["m"], 3);
    EXPECT_EQ(c.counterexample["formula"]["pos"], json::parse("[[0],[1],[2]]"));
}

TEST(TrivialDividing, Refusals)
{
    EXPECT_THROW(search_trivial_dividing(TheorySpec::random_graph(), {4, 5}), InputError);
    EXPECT_THROW(search_trivial_dividing(TheorySpec::hypergraph(3, 2), {9, 5}), BudgetError);
}

TEST(TrgCollision, LinearProjectionCollides)
{
    auto J = saturated("linear");
    auto pat = projection_pattern(J, TheorySpec::random_graph(), {0, 1});
    auto cert = trg_collision_analysis(pat, *J, {}, qf_type({0, 1}, {}, *J), {0}, {1});
    ASSERT_FALSE(cert.consistent);
    EXPECT_EQ(cert.i, 0);
    EXPECT_EQ(cert.j, 1);
    // a common element at different positions blocks a same-tuple derivation
    EXPECT_FALSE(cert.same_tuple.has_value());
    EXPECT_EQ(cert.trace.back()["note"], "common element at different positions");
}

TEST(TrgCollision, RepeatedCoordinateIsSameTuple)
{
    auto J = saturated("cnk:3:2");
    auto pat = projection_pattern(J, TheorySpec::hypergraph(3, 2), {0, 0});
    auto cert = trg_collision_analysis(pat, *J, {}, qf_type({0, 1}, {}, *J), {0}, {1});
    ASSERT_FALSE(cert.consistent);
    EXPECT_EQ(cert.v, cert.w);
    ASSERT_TRUE(cert.same_tuple.has_value());
    EXPECT_EQ(*cert.same_tuple, cert.v);
}

TEST(TrgCollision, ColoredProjectionIsConsistent)
{
    auto J = saturated("cnk:3:2");
    for (auto coords : {std::vector<int>{0, 1}, std::vector<int>{1, 0}}) {
        auto pat = projection_pattern(J, TheorySpec::hypergraph(3, 2), coords);
        auto cert = trg_collision_analysis(pat, *J, {}, qf_type({0, 1}, {}, *J), {0}, {1});
        EXPECT_TRUE(cert.consistent);
        EXPECT_TRUE(cert.trace.empty());
    }
}

TEST(TrgCollision, SignConflictRejected)
{
    auto J = saturated("cnk:3:2");
    auto pat = projection_pattern(J, TheorySpec::hypergraph(3, 2), {0, 1});
    EXPECT_THROW(trg_collision_analysis(pat, *J, {}, qf_type({0, 1}, {}, *J), {0}, {0}), InputError);
}
