#include <gtest/gtest.h>

#include <cstdlib>

#include "shearlab/workbench.hpp"

using namespace shearlab;

namespace {

JobSpec job(const std::string& cmd)
{
    JobSpec j;
    j.command = cmd;
    return j;
}

std::string sample(const std::string& name)
{
    return std::string(SHEARLAB_SOURCE_DIR) + "/samples/" + name;
}

} // namespace

TEST(RunJob, VerifyT32)
{
    auto r = run_job(job("verify-t32"));
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_EQ(r.verdict["core"].size(), 3u);
    EXPECT_TRUE(r.verdict["core_reverifies"].get<bool>());
    auto m = job("verify-t32");
    m.mutate = "drop-edge";
    auto f = run_job(m);
    EXPECT_EQ(f.exit_code, 1);
    m.mutate = "nonsense";
    EXPECT_THROW(run_job(m), InputError);
}

TEST(RunJob, VerifyTnk)
{
    auto j = job("verify-tnk");
    j.n = 4;
    j.k = 3;
    j.levels = 2;
    auto r = run_job(j);
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_TRUE(r.verdict["cores_reverify"].get<bool>());
    j.n = 2;
    j.k = 2;
    EXPECT_THROW(run_job(j), InputError);
    j.n = 3;
    j.levels = 9;
    EXPECT_THROW(run_job(j), BudgetError);
}

TEST(RunJob, UnknownCommand)
{
    EXPECT_THROW(run_job(job("frobnicate")), InputError);
}

TEST(Limits, OverAndUnder)
{
    auto j = job("check-circle");
    j.max_I1 = 5;
    EXPECT_THROW(j.check_limits(), BudgetError);
    j.max_I1 = 0;
    EXPECT_THROW(j.check_limits(), InputError);
    j.max_I1 = 2;
    j.core_bound = 17;
    EXPECT_THROW(j.check_limits(), BudgetError);
    HardLimits h;
    h.core_bound = 20;
    EXPECT_NO_THROW(j.check_limits(h));
}

TEST(Limits, EnvironmentOverride)
{
    setenv("SHEARLAB_MAX_I1", "6", 1);
    HardLimits h;
    unsetenv("SHEARLAB_MAX_I1");
    EXPECT_EQ(h.max_I1, 6);
    EXPECT_EQ(HardLimits{}.max_I1, 4);
}

TEST(Report, DeterministicApartFromTiming)
{
    auto j = job("verify-tnk");
    j.n = 3;
    j.k = 2;
    j.levels = 2;
    auto a = make_report(j, run_job(j), 1.0);
    auto b = make_report(j, run_job(j), 99.0);
    a.erase("timing");
    b.erase("timing");
    EXPECT_EQ(a.dump(), b.dump());
    EXPECT_EQ(a["input_digest"].get<std::string>().size(), 8u + 16u);
    auto e = error_report(j, 2, "input", "x");
    EXPECT_EQ(e["input_digest"], a["input_digest"]);
    EXPECT_FALSE(e.contains("timing"));
}

TEST(Report, DigestKnownValues)
{
    EXPECT_EQ(hex64(fnv1a64("")), "cbf29ce484222325");
    EXPECT_EQ(hex64(fnv1a64("a")), "af63dc4c8601ec8c");
}

TEST(Context, LoadsFileWithDigest)
{
    std::string d;
    auto c = load_context(sample("linear3.json"), &d);
    EXPECT_EQ(d.size(), 16u);
    EXPECT_EQ(c.base.size(), 3);
    EXPECT_THROW(load_context(sample("missing.json")), InputError);
    EXPECT_THROW(load_context("no-such-builtin"), InputError);

    auto j = job("check-circle");
    j.context = sample("linear3.json");
    auto r = run_job(j);
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_EQ(r.verdict["context_digest"], "fnv1a64:" + d);
    EXPECT_FALSE(r.verdict["sweep"][0]["witness"].is_null());
}

TEST(PropertySuite, QuickPassesAndMutantsFail)
{
    auto j = job("property-suite");
    j.quick = true;
    j.instances = 100;
    auto r = run_job(j);
    EXPECT_EQ(r.exit_code, 0) << r.verdict.dump();
    EXPECT_TRUE(r.verdict["all_pass"].get<bool>());

    for (auto [mut, prop] : {std::pair{"drop-edge", "t32-shears-core-3"}, std::pair{"fixed-point", "circle-round-trip"}}) {
        j.mutate = mut;
        auto f = run_job(j);
        EXPECT_EQ(f.exit_code, 1) << mut;
        for (const auto& p : f.verdict["properties"])
            if (p["name"] == prop) EXPECT_FALSE(p["pass"].get<bool>()) << mut;
    }
}

TEST(RoundTrip, LinearWitnesses)
{
    auto ws = linear_witnesses(6);
    ASSERT_EQ(ws.size(), 6u);
    for (const auto& w : ws) {
        auto rt = circle_round_trip(w);
        EXPECT_TRUE(rt.ok) << rt.why;
    }
}
