// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

#include "shearlab/workbench.hpp"

using namespace shearlab;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string note;
};

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

JobSpec job(const std::string& cmd)
{
    JobSpec j;
    j.command = cmd;
    return j;
}

void fail(Outcome& o, const std::string& why)
{
    o.pass = false;
    if (!o.note.empty()) o.note += "; ";
    o.note += why;
}

Outcome c1_t32()
{
    Outcome o;
    auto t0 = Clock::now();
    auto r = run_job(job("verify-t32"));
    double s = seconds_since(t0);
    auto expect = json::parse(R"([["t0","v0_1","v0_2"],["v0_0","t1","v0_2"],["v0_0","v0_1","t2"]])");
    if (r.exit_code != 0 || r.verdict["verdict"] != "Shears") fail(o, "no Shears verdict");
    if (r.verdict["core"] != expect) fail(o, "core " + r.verdict["core"].dump());
    if (!r.verdict.value("core_reverifies", false)) fail(o, "core not minimal");
    if (s >= 1.0) fail(o, "took " + std::to_string(s) + " s");
    if (o.pass) o.note = "core of 3 substituted tuples";
    return o;
}

const int kTnk[][3] = {{3, 2, 3}, {4, 2, 2}, {4, 3, 2}, {5, 3, 1}};

Outcome c2_tnk()
{
    Outcome o;
    std::ostringstream times;
    for (auto [n, k, lv] : kTnk) {
        auto j = job("verify-tnk");
        j.n = n;
        j.k = k;
        j.levels = lv;
        auto t0 = Clock::now();
        auto r = run_job(j);
        double s = seconds_since(t0);
        std::string tag = "(" + std::to_string(n) + "," + std::to_string(k) + "," + std::to_string(lv) + ")";
        times << tag << " " << s << "s ";
        if (r.exit_code != 0) fail(o, tag + " fails");
        if (!r.verdict.value("cores_reverify", false)) fail(o, tag + " core not minimal");
        if (s >= 30.0) fail(o, tag + " over 30 s");
    }
    if (o.pass) o.note = times.str();
    return o;
}

Outcome c3_catalog()
{
    Outcome o;
    auto t0 = Clock::now();
    auto lin = search_circle(linear_context(3), {}, 2, {3, 2, 2});
    double s = seconds_since(t0);
    if (!lin.witness) {
        fail(o, "no LINEAR witness");
    } else {
        if (!check_circle_witness(*lin.witness).ok) fail(o, "LINEAR witness does not check");
        if (!linear_shape(*lin.witness) && !linear_shape(mirror_witness(*lin.witness)))
            fail(o, "LINEAR witness has the wrong relations");
    }
    if (s >= 60.0) fail(o, "linear over 60 s");
    std::ostringstream times;
    times << "linear " << s << "s ";
    for (auto nm : {"kmu-separated", "cnk:3:2", "cnk:4:2"}) {
        auto t1 = Clock::now();
        auto r = search_circle(builtin_context(nm), {}, 3, {3, 2, 2});
        double d = seconds_since(t1);
        times << nm << " " << d << "s ";
        if (r.witness) fail(o, std::string(nm) + " has a witness");
        if (d >= 60.0) fail(o, std::string(nm) + " over 60 s");
    }
    if (o.pass) o.note = times.str();
    return o;
}

Outcome c4_trg()
{
    Outcome o;
    std::ostringstream msg;
    for (auto [n, k] : {std::pair{3, 2}, std::pair{4, 2}}) {
        auto j = job("trg-superstable");
        j.n = n;
        j.k = k;
        j.max_I1 = 3;
        j.i0_bound = 1;
        j.max_slots = 4;
        j.patterns = 150;
        auto r = run_job(j);
        const auto& p = r.verdict["patterns"];
        int consistent = p["consistent"], disagree = p["disagreements"], analysed = p["analysed"];
        std::string tag = "(" + std::to_string(n) + "," + std::to_string(k) + ")";
        msg << tag << " " << analysed << " patterns, " << consistent << " consistent ";
        if (r.verdict["verdict"] != "NoneFound") fail(o, tag + " found a shearing instance");
        if (disagree != 0) fail(o, tag + " " + std::to_string(disagree) + " disagreements");
        if (consistent < 100) fail(o, tag + " only " + std::to_string(consistent) + " consistency certificates");
    }
    if (o.pass) o.note = msg.str();
    return o;
}

Outcome c5_oracle()
{
    Outcome o;
    std::mt19937_64 rng(5);
    for (auto th : {TheorySpec::random_graph(), TheorySpec::hypergraph(3, 2), TheorySpec::hypergraph(4, 3)}) {
        int bad = 0;
        for (int i = 0; i < 1000; ++i) {
            auto [m, f] = random_instance(th, 6, rng);
            bad += instance_consistent(m, f) != brute_force_consistency_oracle(m, f);
        }
        if (bad) fail(o, th.label() + " " + std::to_string(bad) + " disagreements");
    }
    if (o.pass) o.note = "3 x 1000 instances";
    return o;
}

Outcome c6_tp_sequences()
{
    Outcome o;
    auto t0 = Clock::now();
    for (auto [n, len] : {std::pair{2, 5}, std::pair{3, 4}}) {
        std::string tag = "(" + std::to_string(n) + "," + std::to_string(len) + ")";
        auto [m, fam] = tp_sequence_triangle_free(n, len);
        for (const auto& f : fam)
            if (!instance_consistent(m, f)) fail(o, tag + " has an inconsistent instance");
        int consistent_pairs = 0;
        for (int i = 0; i < len; ++i)
            for (int j = i + 1; j < len; ++j) consistent_pairs += family_consistent_plain(m, {fam[i], fam[j]});
        if (consistent_pairs) fail(o, tag + " " + std::to_string(consistent_pairs) + " consistent pairs");
        auto sf = sequence_family(fam);
        if (!verify_dividing_as_shearing(sf.context, m, sf.family, sf.phi, 2).ok())
            fail(o, tag + " not 2-dividing as shearing");
    }
    double s = seconds_since(t0);
    if (s >= 1.0) fail(o, "took " + std::to_string(s) + " s");
    return o;
}

Outcome c7_round_trip()
{
    Outcome o;
    auto ws = linear_witnesses(20);
    if (ws.size() < 20) fail(o, "only " + std::to_string(ws.size()) + " witnesses");
    int ok = 0;
    for (const auto& w : ws) {
        auto rt = circle_round_trip(w);
        if (rt.ok) ++ok;
        else fail(o, rt.why);
    }
    if (o.pass) o.note = std::to_string(ok) + "/" + std::to_string(ws.size()) + " round trips";
    return o;
}

Outcome c8_transports()
{
    Outcome o;
    std::vector<ShearingInstance> base{build_t32_witness()};
    for (auto [n, k, lv] : kTnk) {
        auto c = build_tnk_certificate(n, k, lv);
        for (int l = 1; l <= lv; ++l) base.push_back(c.instance(l));
    }
    long long checked = 0;
    for (const auto& inst : base) {
        if (!verify_shearing(inst).shears) continue;
        for (const auto& tr : monotone_transports(inst)) {
            ++checked;
            auto v = verify_shearing(tr);
            if (!v.shears) fail(o, "transport fails " + v.clause);
        }
    }
    if (o.pass) o.note = std::to_string(checked) + " transports over " + std::to_string(base.size()) + " instances";
    return o;
}

Outcome c9_trivial_dividing()
{
    Outcome o;
    auto t0 = Clock::now();
    auto a = search_trivial_dividing(TheorySpec::hypergraph(3, 2), {4, 5});
    auto b = search_trivial_dividing(TheorySpec::clique_free_graph(3), {4, 5});
    double s = seconds_since(t0);
    if (a.found) fail(o, "T_{3,2} has a trivially dividing formula");
    if (!b.found) fail(o, "(3,1) control has no counterexample");
    if (s >= 120.0) fail(o, "took " + std::to_string(s) + " s");
    if (o.pass) o.note = std::to_string(a.candidates) + " candidates, " + std::to_string(s) + " s";
    return o;
}

Outcome c10_determinism()
{
    Outcome o;
    std::vector<JobSpec> jobs;
    jobs.push_back(job("verify-t32"));
    auto t = job("verify-t32");
    t.mutate = "drop-edge";
    jobs.push_back(t);
    auto tnk = job("verify-tnk");
    tnk.levels = 2;
    jobs.push_back(tnk);
    auto circ = job("check-circle");
    circ.i0_bound = 1;
    jobs.push_back(circ);
    auto trg = job("trg-superstable");
    trg.patterns = 20;
    trg.seed = 9;
    jobs.push_back(trg);
    auto suite = job("property-suite");
    suite.quick = true;
    suite.instances = 100;
    jobs.push_back(suite);
    for (const auto& j : jobs) {
        auto a = make_report(j, run_job(j), 0), b = make_report(j, run_job(j), 1);
        a.erase("timing");
        b.erase("timing");
        if (a.dump() != b.dump()) fail(o, j.command + " differs between runs");
    }
    if (o.pass) o.note = std::to_string(jobs.size()) + " jobs";
    return o;
}

} // namespace

int main()
{
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"t32 shearing witness", c1_t32},
        {"T_{n,k} certificates", c2_tnk},
        {"circle catalog", c3_catalog},
        {"T_rg bounded search and collision analysis", c4_trg},
        {"oracle equivalence", c5_oracle},
        {"triangle-free tp sequences", c6_tp_sequences},
        {"circle round trip", c7_round_trip},
        {"monotone transports", c8_transports},
        {"trivial dividing", c9_trivial_dividing},
        {"determinism", c10_determinism},
    };
    int failed = 0, i = 0;
    for (const auto& [name, fn] : criteria) {
        ++i;
        auto t0 = Clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.note = std::string("threw: ") + e.what();
        }
        double s = seconds_since(t0);
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i << ": " << name << " [" << s << " s]";
        if (!o.note.empty()) std::cout << " " << o.note;
        std::cout << std::endl;
    }
    return failed ? 1 : 0;
}
