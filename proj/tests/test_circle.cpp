#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "shearlab/circle.hpp"

using namespace shearlab;

namespace {

std::shared_ptr<const IndexStructure> saturated(const ContextSpec& c, SaturationParams p = {3, 2, 2})
{
    return std::make_shared<const IndexStructure>(saturate(c.base, c.cls, p));
}

// Pair types of the orbit of (t0,t1) whose realizations satisfy `rel`, by direct enumeration.
std::vector<PairQfType> types_where(const IndexStructure& J, const std::function<bool(const Tuple&, const Tuple&)>& rel)
{
    auto Y = realizations(J, qf_type({0, 1}, {}, J), {});
    std::map<std::string, std::pair<PairQfType, std::set<bool>>> seen;
    for (const auto& x : Y)
        for (const auto& y : Y) {
            auto p = pair_qf_type(x, y, {}, J);
            auto& e = seen.emplace(p.type.key(), std::make_pair(p, std::set<bool>{})).first->second;
            e.second.insert(rel(x, y));
        }
    std::vector<PairQfType> out;
    for (auto& [k, e] : seen) {
        EXPECT_EQ(e.second.size(), 1u) << "relation is not a union of pair types";
        if (*e.second.begin()) out.push_back(e.first);
    }
    CircleWitness::normalize(out);
    return out;
}

CircleWitness hand_linear_witness()
{
    auto c = linear_context(3);
    CircleWitness w;
    w.context = c;
    w.J = saturated(c);
    w.depth = "saturation(3,2,2)";
    w.I1 = {0, 1};
    w.t = {0, 1};
    w.r = qf_type(w.t, {}, *w.J);
    w.E1 = types_where(*w.J, [](const Tuple& x, const Tuple& y) { return x[0] == y[0]; });
    w.E2 = types_where(*w.J, [](const Tuple& x, const Tuple& y) { return x[1] == y[1]; });
    w.F = types_where(*w.J, [](const Tuple& x, const Tuple& y) { return x[0] == y[1]; });
    return w;
}

std::set<std::string> concrete_keys(const IndexStructure& J, const Tuple& t)
{
    auto Y = realizations(J, qf_type(t, {}, J), {});
    std::set<std::string> out;
    for (const auto& x : Y)
        for (const auto& y : Y) out.insert(pair_qf_type(x, y, {}, J).type.key());
    return out;
}

} // namespace

TEST(CheckCircle, HandBuiltLinearWitnessPasses)
{
    auto w = hand_linear_witness();
    auto v = check_circle_witness(w);
    ASSERT_TRUE(v.ok) << v.clause << " " << v.detail;
    EXPECT_EQ(v.orbit_size, 595);
    EXPECT_TRUE(v.partial);
    EXPECT_TRUE(linear_shape(w));
}

TEST(CheckCircle, EmptyFFailsClauseTwo)
{
    auto w = hand_linear_witness();
    w.F.clear();
    auto v = check_circle_witness(w);
    EXPECT_FALSE(v.ok);
    EXPECT_EQ(v.clause, "ii");
}

TEST(CheckCircle, DiagonalInFFailsClauseThree)
{
    auto w = hand_linear_witness();
    w.F.push_back(pair_qf_type({0, 1}, {0, 1}, {}, *w.J));
    CircleWitness::normalize(w.F);
    auto v = check_circle_witness(w);
    EXPECT_FALSE(v.ok);
    // the diagonal joins F's classes, so either clause may catch it first
    EXPECT_TRUE(v.clause == "ii" || v.clause == "iii") << v.clause;
}

TEST(CheckCircle, EquivalenceClause)
{
    auto w = hand_linear_witness();
    auto refl = w;
    refl.E1.clear();
    EXPECT_EQ(check_circle_witness(refl).clause, "i");
    auto sym = w;
    const auto& J = *w.J;
    sym.E1 = types_where(J, [&](const Tuple& x, const Tuple& y) { return !J.less(y[0], x[0]); });
    auto v = check_circle_witness(sym);
    EXPECT_EQ(v.clause, "i");
    EXPECT_EQ(v.detail, "E1 not symmetric");
}

TEST(CheckCircle, FunctionClause)
{
    auto w = hand_linear_witness();
    // first coordinate of one equals either coordinate of the other
    w.F = types_where(*w.J, [](const Tuple& x, const Tuple& y) { return x[0] == y[1] || x[0] == y[0]; });
    auto v = check_circle_witness(w);
    EXPECT_FALSE(v.ok);
    EXPECT_EQ(v.clause, "ii");
}

TEST(PairTable, CountsMatchEnumeration)
{
    struct Row {
        ContextSpec c;
        SaturationParams p;
        size_t types;
    };
    for (const auto& row : {Row{linear_context(3), {3, 2, 2}, 13}, Row{cnk_context(3, 2), {2, 1, 2}, 57},
                            Row{cnk_context(3, 2), {3, 2, 1}, 59}}) {
        auto J = saturated(row.c, row.p);
        auto T = build_pair_table(std::make_shared<const OrbitSpace>(J), qf_type({0, 1}, {}, *J), {});
        EXPECT_EQ(T.types.size(), row.types) << row.c.label;
        std::set<std::string> got;
        for (const auto& q : T.types) got.insert(q.key());
        EXPECT_EQ(got, concrete_keys(*J, {0, 1})) << row.c.label;
        ASSERT_GE(T.diag, 0);
        for (size_t t = 0; t < T.types.size(); ++t) EXPECT_EQ(T.inv[T.inv[t]], static_cast<int>(t));
    }
}

TEST(PairTable, FrozenCountsAtDefaultDepth)
{
    const std::pair<const char*, size_t> rows[] = {{"kmu-separated", 11}, {"cnk:3:2", 61}, {"cnk:4:3", 11}};
    for (auto [nm, n] : rows) {
        auto c = builtin_context(nm);
        auto J = saturated(c);
        auto T = build_pair_table(std::make_shared<const OrbitSpace>(J), qf_type({0, 1}, {}, *J), {});
        EXPECT_EQ(T.types.size(), n) << nm;
    }
}

TEST(Search, Catalog)
{
    auto lin = search_circle(linear_context(3), {}, 3, {3, 2, 2});
    ASSERT_TRUE(lin.witness.has_value());
    auto& w = *lin.witness;
    EXPECT_TRUE(check_circle_witness(w).ok);
    EXPECT_TRUE(linear_shape(w) || linear_shape(mirror_witness(w)));
    EXPECT_TRUE(linear_shape(mirror_witness(w)));
    for (auto nm : {"kmu-separated", "cnk:3:2", "cnk:4:2", "cnk:4:3"}) {
        auto r = search_circle(builtin_context(nm), {}, 3, {3, 2, 2});
        EXPECT_FALSE(r.witness.has_value()) << nm;
        EXPECT_FALSE(r.candidates.empty());
    }
}

TEST(Search, MirrorIsInvolution)
{
    auto w = *search_circle(linear_context(3), {}, 2, {3, 2, 2}).witness;
    auto back = mirror_witness(mirror_witness(w));
    EXPECT_EQ(type_keys(back.E1), type_keys(w.E1));
    EXPECT_EQ(type_keys(back.F), type_keys(w.F));
    EXPECT_TRUE(check_circle_witness(mirror_witness(w)).ok);
}

TEST(Search, EngineAgreesWithAlignedRule)
{
    struct Row {
        ContextSpec c;
        int max_I1;
    };
    for (const auto& row : {Row{linear_context(3), 3}, Row{cnk_context(3, 2), 2}, Row{cnk_context(4, 3), 2},
                            Row{kmu_separated_context(4), 3}}) {
        auto J = saturated(row.c);
        auto with = search_circle_in(row.c, J, {}, row.max_I1, "d", true);
        auto without = search_circle_in(row.c, J, {}, row.max_I1, "d", false);
        EXPECT_EQ(with.witness.has_value(), without.witness.has_value()) << row.c.label;
    }
}

TEST(Search, ShallowDepthNeedsTheRule)
{
    // frozen: a single round leaves the fixpoint alone with a spurious survivor
    auto c = cnk_context(3, 2);
    auto J = saturated(c, {2, 1, 2});
    EXPECT_TRUE(search_circle_in(c, J, {}, 2, "d", false).witness.has_value());
    EXPECT_FALSE(search_circle_in(c, J, {}, 2, "d", true).witness.has_value());
}

TEST(Search, BadBounds)
{
    EXPECT_THROW(search_circle(linear_context(3), {}, 0, {3, 2, 2}), InputError);
}

TEST(Sweep, Subsets)
{
    auto J = saturated(cnk_context(3, 2), {2, 1, 1});
    auto sw = i0_sweep(*J, 1);
    ASSERT_EQ(sw.size(), 4u);
    EXPECT_TRUE(sw[0].empty());
    EXPECT_EQ(i0_sweep(*J, 2).size(), 7u);
    auto c1 = candidate_I1(*J, {1}, 2);
    for (const auto& I1 : c1) EXPECT_NE(std::find(I1.begin(), I1.end(), 1), I1.end());
}

TEST(Trg, SearchAndLimits)
{
    auto c = cnk_context(3, 2);
    EXPECT_THROW(trg_superstable_search(c, {3, 2, 2}, 0, 2, 1), InputError);
    EXPECT_THROW(trg_superstable_search(c, {3, 2, 2}, 0, 0, 4), InputError);
    EXPECT_THROW(trg_superstable_search(c, {3, 2, 2}, 0, 2, 9), BudgetError);
    EXPECT_THROW(trg_superstable_search(c, {3, 2, 2}, 3, 2, 4), BudgetError);
    auto r = trg_superstable_search(c, {3, 2, 2}, 0, 2, 4);
    EXPECT_TRUE(r.none_found);
    long long seeds = 0;
    for (const auto& st : r.sweeps[0].candidates) seeds += st.seeds;
    EXPECT_EQ(r.seeds, seeds * 12);
}

TEST(Trg, PatternTrialsAgree)
{
    std::mt19937_64 rng(7);
    int trials = 0, consistent = 0;
    for (int i = 0; trials < 150 && i < 3000; ++i) {
        auto tr = random_pattern_trial(i % 2 ? 3 : 4, 2, rng);
        if (!tr) continue;
        ++trials;
        EXPECT_TRUE(tr->agree()) << tr->to_json().dump();
        consistent += tr->cert.consistent;
    }
    EXPECT_EQ(trials, 150);
    EXPECT_GT(consistent, 50);
    EXPECT_LT(consistent, 150);
}

TEST(RoundTrip, WitnessToShearingAndBack)
{
    auto w = hand_linear_witness();
    auto inst = circle_to_shearing(w);
    auto v = verify_shearing(inst);
    ASSERT_TRUE(v.shears) << v.clause << " " << v.detail;
    auto col = canonical_collision(inst);
    ASSERT_TRUE(col.has_value());
    auto w2 = extract_circle(inst, *col);
    EXPECT_TRUE(check_circle_witness(w2).ok);
    EXPECT_EQ(type_keys(w2.E1), type_keys(w.E1));
    EXPECT_EQ(type_keys(w2.E2), type_keys(w.E2));
    EXPECT_EQ(type_keys(w2.F), type_keys(w.F));
}

TEST(RoundTrip, FailingWitnessRejected)
{
    auto w = hand_linear_witness();
    w.F.clear();
    EXPECT_THROW(circle_to_shearing(w), InputError);
}

TEST(Extract, Errors)
{
    auto w = hand_linear_witness();
    auto inst = circle_to_shearing(w);
    auto col = *canonical_collision(inst);
    EXPECT_THROW(extract_circle(build_t32_witness(), col), InputError);
    auto swapped = col;
    std::swap(swapped.i, swapped.j);
    EXPECT_THROW(extract_circle(inst, swapped), InputError);
    auto outside = col;
    outside.v = {0, 0};
    EXPECT_THROW(extract_circle(inst, outside), InputError);
    auto unrelated = col;
    unrelated.w = unrelated.v;
    EXPECT_THROW(extract_circle(inst, unrelated), InputError);
}
