#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "circle.hpp"

namespace shearlab {

inline constexpr const char* kToolVersion = "0.1.0";

/// Hard limits, overridable through the environment.
struct HardLimits {
    long long core_bound = env_limit("SHEARLAB_MAX_CORE_BOUND", 16);
    long long max_I1 = env_limit("SHEARLAB_MAX_I1", 4);
    long long i0_bound = env_limit("SHEARLAB_MAX_I0", 2);
    long long levels = env_limit("SHEARLAB_MAX_LEVELS", 4);
    long long patterns = env_limit("SHEARLAB_MAX_PATTERNS", 5000);
    long long suite_instances = env_limit("SHEARLAB_MAX_SUITE_INSTANCES", 20000);
};

struct JobSpec {
    std::string command;
    std::string context = "linear";
    int n = 3, k = 2, levels = 1;
    int core_bound = 12;
    int i0_bound = 0;
    int max_I1 = 2;
    int max_slots = 4;
    int patterns = 100;
    int instances = 1000;
    SaturationParams saturation;
    uint64_t seed = 1;
    std::string mutate;
    bool quick = false;

    json to_json() const
    {
        json j{{"command", command}};
        if (command == "verify-t32") {
            j["core_bound"] = core_bound;
            if (!mutate.empty()) j["mutate"] = mutate;
        } else if (command == "verify-tnk") {
            j.update(json{{"n", n}, {"k", k}, {"levels", levels}, {"core_bound", core_bound}});
        } else if (command == "check-circle") {
            j.update(json{{"context", context},
                          {"i0_bound", i0_bound},
                          {"max_I1", max_I1},
                          {"saturation", saturation.to_json()}});
        } else if (command == "trg-superstable") {
            j.update(json{{"n", n},
                          {"k", k},
                          {"i0_bound", i0_bound},
                          {"max_I1", max_I1},
                          {"max_slots", max_slots},
                          {"patterns", patterns},
                          {"saturation", saturation.to_json()},
                          {"seed", seed}});
        } else if (command == "property-suite") {
            j.update(json{{"seed", seed}, {"instances", instances}, {"quick", quick}});
            if (!mutate.empty()) j["mutate"] = mutate;
        }
        return j;
    }

    void check_limits(const HardLimits& h = {}) const
    {
        auto over = [](const char* what, long long v, long long lim) {
            if (v > lim)
                throw BudgetError(std::string(what) + " = " + std::to_string(v) + " exceeds the hard limit " +
                                  std::to_string(lim));
        };
        over("core_bound", core_bound, h.core_bound);
        over("max_I1", max_I1, h.max_I1);
        over("i0_bound", i0_bound, h.i0_bound);
        over("levels", levels, h.levels);
        over("patterns", patterns, h.patterns);
        over("instances", instances, h.suite_instances);
        if (core_bound < 1 || max_I1 < 1 || i0_bound < 0 || patterns < 0 || instances < 0)
            throw InputError("bounds must be positive");
    }
};

struct CommandResult {
    int exit_code = 0;  // 0 verified / NoneFound, 1 verification failure
    json verdict;
    std::vector<std::string> text;
};

inline uint64_t fnv1a64(const std::string& s)
{
    uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string hex64(uint64_t v)
{
    std::ostringstream o;
    o << std::hex;
    o.width(16);
    o.fill('0');
    o << v;
    return o.str();
}

/// Builtin name, or a path to a structure JSON file.
inline ContextSpec load_context(const std::string& spec, std::string* digest = nullptr)
{
    if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json") {
        std::ifstream in(spec);
        if (!in) throw InputError("cannot read context file " + spec);
        std::stringstream buf;
        buf << in.rdbuf();
        json j;
        try {
            j = json::parse(buf.str());
        } catch (const json::exception& e) {
            throw InputError("context file is not JSON: " + std::string(e.what()));
        }
        if (digest) *digest = hex64(fnv1a64(buf.str()));
        auto [base, cls] = structure_from_json(j);
        auto rep = validate_structure(base, cls);
        if (!rep.ok()) throw InputError("context file fails its class: " + rep.violations.front());
        return {cls, base, j.value("label", spec)};
    }
    return builtin_context(spec);
}

inline json instance_summary(const ShearingInstance& inst)
{
    const auto& J = *inst.J;
    return json{{"context", inst.context.label},
                {"depth", inst.depth},
                {"J_size", J.size()},
                {"I0", tuple_names(J, inst.I0)},
                {"I1", tuple_names(J, inst.I1)},
                {"s", tuple_names(J, inst.s0)},
                {"t", tuple_names(J, inst.t)},
                {"formula", inst.formula.to_json()},
                {"model", inst.model.to_json()},
                {"A", inst.A}};
}

inline CommandResult cmd_verify_t32(const JobSpec& job)
{
    CommandResult out;
    auto inst = build_t32_witness();
    if (job.mutate == "drop-edge") inst = mutate_drop_edge(inst);
    else if (!job.mutate.empty()) throw InputError("verify-t32: unknown mutation " + job.mutate);
    auto v = verify_shearing(inst, job.core_bound);
    out.verdict = v.to_json(*inst.J);
    out.verdict["instance"] = instance_summary(inst);
    if (v.shears) out.verdict["core_reverifies"] = core_reverifies(inst.model, core_instances(inst, v));
    out.exit_code = v.shears ? 0 : 1;
    out.text.push_back("t32 witness: " + std::string(v.shears ? "Shears" : "Fails"));
    if (v.shears) {
        out.text.push_back("  core size " + std::to_string(v.core.size()) + " over an orbit of " +
                           std::to_string(v.orbit_size));
        for (const auto& t : v.core) out.text.push_back("    " + tuple_names(*inst.J, t).dump());
    } else {
        out.text.push_back("  " + v.clause + ": " + v.detail);
    }
    return out;
}

inline CommandResult cmd_verify_tnk(const JobSpec& job)
{
    CommandResult out;
    auto c = build_tnk_certificate(job.n, job.k, job.levels);
    auto v = verify_certificate(c, job.core_bound);
    out.verdict = v.to_json(*c.J);
    out.verdict["certificate"] = c.to_json();
    bool minimal = v.ok;
    for (int l = 1; v.ok && l <= static_cast<int>(c.levels.size()); ++l) {
        auto inst = c.instance(l);
        minimal = minimal && core_reverifies(inst.model, core_instances(inst, v.levels[l - 1]));
    }
    out.verdict["cores_reverify"] = minimal;
    out.exit_code = v.ok && minimal ? 0 : 1;
    std::string tag = "T_{" + std::to_string(job.n) + "," + std::to_string(job.k) + "}";
    out.text.push_back(tag + " certificate, " + std::to_string(job.levels) + " level(s): " +
                       (v.ok ? "Passes" : "Fails"));
    for (size_t l = 0; l < v.levels.size(); ++l)
        out.text.push_back("  level " + std::to_string(l + 1) + ": " + (v.levels[l].shears ? "Shears" : "Fails") +
                           ", core " + std::to_string(v.levels[l].core.size()) + ", orbit " +
                           std::to_string(v.levels[l].orbit_size));
    if (!v.ok) out.text.push_back("  " + v.reason);
    return out;
}

inline CommandResult cmd_check_circle(const JobSpec& job)
{
    CommandResult out;
    std::string file_digest;
    auto c = load_context(job.context, &file_digest);
    auto Jp = std::make_shared<const IndexStructure>(saturate(c.base, c.cls, job.saturation));
    std::string depth = saturation_label(job.saturation);
    json rows = json::array();
    bool all_ok = true;
    out.text.push_back("context " + c.label + ", |J| = " + std::to_string(Jp->size()) + ", " + depth);
    for (const auto& I0 : i0_sweep(*Jp, job.i0_bound)) {
        if (static_cast<int>(I0.size()) > job.max_I1) continue;
        auto res = search_circle_in(c, Jp, I0, job.max_I1, depth);
        json row = res.to_json();
        std::string line = "  I0 = " + tuple_names(*Jp, I0).dump() + ": ";
        if (res.witness) {
            auto cv = check_circle_witness(*res.witness);
            row["check"] = cv.to_json(*Jp);
            all_ok = all_ok && cv.ok;
            line += "witness at t = " + tuple_names(*Jp, res.witness->t).dump() + " (" +
                    (cv.ok ? "checks" : "FAILS clause " + cv.clause) + ")";
        } else {
            long long seeds = 0;
            for (const auto& st : res.candidates) seeds += st.seeds;
            line += "None within |I1| <= " + std::to_string(job.max_I1) + " (" + std::to_string(seeds) + " seeds)";
        }
        out.text.push_back(line);
        rows.push_back(row);
    }
    out.verdict = json{{"context", c.label}, {"J_size", Jp->size()}, {"depth", depth}, {"sweep", rows}};
    if (!file_digest.empty()) out.verdict["context_digest"] = "fnv1a64:" + file_digest;
    out.exit_code = all_ok ? 0 : 1;
    return out;
}

inline CommandResult cmd_trg_superstable(const JobSpec& job)
{
    if (!(job.n > job.k && job.k >= 2)) throw InputError("trg-superstable: need n > k >= 2");
    CommandResult out;
    auto c = cnk_context(job.n, job.k, 3);
    auto res = trg_superstable_search(c, job.saturation, job.i0_bound, job.max_I1, job.max_slots);
    out.verdict = res.to_json();
    std::mt19937_64 rng(job.seed);
    json certs = json::array();
    int produced = 0, consistent = 0, disagree = 0, attempts = 0;
    while (produced < job.patterns) {
        if (++attempts > 20 * job.patterns + 100) break;
        auto tr = random_pattern_trial(job.n, job.k, rng);
        if (!tr) continue;
        ++produced;
        consistent += tr->cert.consistent;
        disagree += !tr->agree();
        certs.push_back(tr->to_json());
    }
    out.verdict["patterns"] =
        json{{"requested", job.patterns}, {"analysed", produced}, {"consistent", consistent}, {"disagreements", disagree},
             {"trials", certs}};
    bool ok = res.none_found && disagree == 0 && produced == job.patterns;
    out.exit_code = ok ? 0 : 1;
    out.text.push_back("T_rg over c_{" + std::to_string(job.n) + "," + std::to_string(job.k) + "}: " +
                       (res.none_found ? "NoneFound" : "Found") + " (" + std::to_string(res.seeds) +
                       " seeds, slots <= " + std::to_string(job.max_slots) + ", |I1| <= " +
                       std::to_string(job.max_I1) + ")");
    out.text.push_back("  collision analysis: " + std::to_string(produced) + " patterns, " +
                       std::to_string(consistent) + " consistency certificates, " + std::to_string(disagree) +
                       " disagreements");
    return out;
}

// ------------------------------------------------------------ property suite

struct PropertyResult {
    std::string name;
    bool pass = true;
    long long checked = 0;
    json counterexample;
    json to_json() const
    {
        json j{{"name", name}, {"pass", pass}, {"checked", checked}};
        if (!pass) j["counterexample"] = counterexample;
        return j;
    }
};

/// LINEAR witnesses over I0 sweeps, first `want` in sweep order.
inline std::vector<CircleWitness> linear_witnesses(int want, const SaturationParams& p = {})
{
    std::vector<CircleWitness> out;
    for (int size = 3; size <= 6 && static_cast<int>(out.size()) < want; ++size) {
        auto c = linear_context(size);
        auto Jp = std::make_shared<const IndexStructure>(saturate(c.base, c.cls, p));
        for (const auto& I0 : i0_sweep(*Jp, 2)) {
            if (static_cast<int>(out.size()) >= want) break;
            auto res = search_circle_in(c, Jp, I0, static_cast<int>(I0.size()) + 2, saturation_label(p));
            if (res.witness) out.push_back(*res.witness);
        }
    }
    return out;
}

struct RoundTrip {
    bool ok = false;
    std::string why;
};

inline RoundTrip circle_round_trip(const CircleWitness& w)
{
    RoundTrip rt;
    auto v = check_circle_witness(w);
    if (!v.ok) {
        rt.why = "input fails clause " + v.clause;
        return rt;
    }
    auto inst = circle_to_shearing(w);
    auto sv = verify_shearing(inst);
    if (!sv.shears) {
        rt.why = "induced instance fails " + sv.clause;
        return rt;
    }
    auto col = canonical_collision(inst);
    if (!col) {
        rt.why = "no collision in the induced family";
        return rt;
    }
    auto w2 = extract_circle(inst, *col);
    if (!check_circle_witness(w2).ok) {
        rt.why = "extracted witness fails";
        return rt;
    }
    if (type_keys(w.E1) != type_keys(w2.E1) || type_keys(w.E2) != type_keys(w2.E2) ||
        type_keys(w.F) != type_keys(w2.F)) {
        rt.why = "pair-type sets differ";
        return rt;
    }
    rt.ok = true;
    return rt;
}

inline CommandResult cmd_property_suite(const JobSpec& job)
{
    CommandResult out;
    std::mt19937_64 rng(job.seed);
    std::vector<PropertyResult> rs;
    int N = job.quick ? std::min(job.instances, 200) : job.instances;

    for (auto th : {TheorySpec::random_graph(), TheorySpec::hypergraph(3, 2), TheorySpec::hypergraph(4, 3)}) {
        PropertyResult r{"oracle-equivalence " + th.label()};
        for (int i = 0; i < N && r.pass; ++i) {
            auto [m, f] = random_instance(th, 6, rng);
            ++r.checked;
            if (instance_consistent(m, f) != brute_force_consistency_oracle(m, f)) {
                r.pass = false;
                r.counterexample = json{{"model", m.to_json()}, {"formula", f.tpl.to_json()}, {"binding", f.binding}};
            }
        }
        rs.push_back(r);
    }
    {
        PropertyResult r{"family-consistency-oracle"};
        for (int i = 0; i < N / 4 && r.pass; ++i) {
            auto th = i % 2 ? TheorySpec::hypergraph(3, 2) : TheorySpec::random_graph();
            auto [m, f] = random_instance(th, 5, rng);
            FormulaInstance g = f;
            std::rotate(g.binding.begin(), g.binding.begin() + 1, g.binding.end());
            std::vector<FormulaInstance> fam{f, g};
            ++r.checked;
            if (family_consistent(m, fam, 4).consistent != brute_force_consistency_oracle(m, fam)) {
                r.pass = false;
                r.counterexample = json{{"model", m.to_json()}, {"formula", f.tpl.to_json()}};
            }
        }
        rs.push_back(r);
    }
    {
        PropertyResult r{"t32-shears-core-3"};
        auto inst = build_t32_witness();
        if (job.mutate == "drop-edge") inst = mutate_drop_edge(inst);
        auto v = verify_shearing(inst);
        r.checked = 1;
        r.pass = v.shears && v.core.size() == 3 && core_reverifies(inst.model, core_instances(inst, v));
        if (!r.pass) r.counterexample = v.to_json(*inst.J);
        rs.push_back(r);

        PropertyResult mono{"t32-monotone-transports"};
        if (v.shears)
            for (const auto& tr : monotone_transports(inst)) {
                ++mono.checked;
                auto tv = verify_shearing(tr);
                if (!tv.shears) {
                    mono.pass = false;
                    mono.counterexample = json{{"I0", tuple_names(*tr.J, tr.I0)}, {"I1", tuple_names(*tr.J, tr.I1)}};
                    break;
                }
            }
        rs.push_back(mono);

        PropertyResult mut{"t32-drop-edge-fails"};
        mut.checked = 1;
        mut.pass = !verify_shearing(mutate_drop_edge(build_t32_witness())).shears;
        rs.push_back(mut);
    }
    {
        PropertyResult r{"circle-round-trip"};
        for (auto w : linear_witnesses(job.quick ? 4 : 20)) {
            if (job.mutate == "fixed-point") {
                auto cp = detail::concrete_pairs(*w.J, w.r, w.s);
                w.F.push_back(cp.types[cp.at(0, 0)]);
                CircleWitness::normalize(w.F);
            }
            ++r.checked;
            auto rt = circle_round_trip(w);
            if (!rt.ok) {
                r.pass = false;
                r.counterexample = json{{"witness", w.to_json()}, {"reason", rt.why}};
                break;
            }
        }
        rs.push_back(r);
    }
    {
        PropertyResult r{"trg-collision-analysis-agreement"};
        int want = job.quick ? 50 : 200;
        for (int i = 0; r.checked < want && i < 40 * want; ++i) {
            auto tr = random_pattern_trial(i % 2 ? 3 : 4, 2, rng);
            if (!tr) continue;
            ++r.checked;
            if (!tr->agree()) {
                r.pass = false;
                r.counterexample = tr->to_json();
                break;
            }
        }
        rs.push_back(r);
    }
    {
        PropertyResult r{"trivial-dividing"};
        auto a = search_trivial_dividing(TheorySpec::hypergraph(3, 2), {});
        auto b = search_trivial_dividing(TheorySpec::clique_free_graph(3), {});
        r.checked = 2;
        r.pass = !a.found && b.found;
        if (!r.pass) r.counterexample = json{{"T_{3,2}", a.to_json()}, {"(3,1)", b.to_json()}};
        rs.push_back(r);
    }
    {
        PropertyResult r{"determinism"};
        JobSpec t;
        t.command = "verify-t32";
        auto x = cmd_verify_t32(t).verdict.dump(), y = cmd_verify_t32(t).verdict.dump();
        r.checked = 1;
        r.pass = x == y;
        rs.push_back(r);
    }
    json arr = json::array();
    bool all = true;
    for (const auto& r : rs) {
        arr.push_back(r.to_json());
        all = all && r.pass;
        out.text.push_back(std::string(r.pass ? "PASS " : "FAIL ") + r.name + " (" + std::to_string(r.checked) +
                           " checked)");
    }
    out.verdict = json{{"properties", arr}, {"all_pass", all}};
    out.exit_code = all ? 0 : 1;
    return out;
}

inline CommandResult run_job(const JobSpec& job)
{
    job.check_limits();
    if (job.command == "verify-t32") return cmd_verify_t32(job);
    if (job.command == "verify-tnk") return cmd_verify_tnk(job);
    if (job.command == "check-circle") return cmd_check_circle(job);
    if (job.command == "trg-superstable") return cmd_trg_superstable(job);
    if (job.command == "property-suite") return cmd_property_suite(job);
    throw InputError("unknown command " + job.command);
}

/// Full report; everything but "timing" is reproducible from the job.
inline json make_report(const JobSpec& job, const CommandResult& r, double ms)
{
    json jj = job.to_json();
    return json{{"tool", "shearlab"},
                {"version", kToolVersion},
                {"job", jj},
                {"input_digest", "fnv1a64:" + hex64(fnv1a64(jj.dump()))},
                {"verdict", r.verdict},
                {"exit_code", r.exit_code},
                {"timing", json{{"wall_ms", ms}}}};
}

inline json error_report(const JobSpec& job, int code, const std::string& kind, const std::string& msg)
{
    json jj = job.to_json();
    return json{{"tool", "shearlab"},
                {"version", kToolVersion},
                {"job", jj},
                {"input_digest", "fnv1a64:" + hex64(fnv1a64(jj.dump()))},
                {"error", json{{"kind", kind}, {"message", msg}}},
                {"exit_code", code}};
}

} // namespace shearlab
