#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "families.hpp"
#include "saturation.hpp"

namespace shearlab {

/// One shearing claim: phi along the family over the orbit of t over s0
/// is contradictory while each member is consistent and the family is
/// indiscernible over A.
struct ShearingInstance {
    ContextSpec context;
    std::shared_ptr<const IndexStructure> J;
    std::string depth;  // how J was obtained
    std::vector<int> I0, I1;
    Tuple s0, t;
    ParamModel model;
    ParamFamily family;
    FormulaTemplate formula;
    std::vector<int> A;
    // For transports: J elements whose parameters make up the image, and the
    // J id -> parameter map (-1 where no parameter).
    std::vector<int> support;
    std::vector<int> param_of;
};

struct ShearingVerdict {
    bool shears = false;
    std::string clause;  // first violated clause, "" when it shears
    std::string detail;
    std::vector<Tuple> core;
    bool core_bound_exceeded = false;
    int orbit_size = 0;
    std::string depth;

    json to_json(const IndexStructure& J) const
    {
        json c = json::array();
        for (const auto& t : core) c.push_back(tuple_names(J, t));
        json j{{"verdict", shears ? "Shears" : "Fails"}, {"orbit_size", orbit_size}, {"depth", depth}};
        if (shears) {
            j["core"] = c;
            j["core_size"] = core.size();
            if (core_bound_exceeded) j["core_bound_exceeded"] = true;
        } else {
            j["clause"] = clause;
            j["witness"] = detail;
        }
        return j;
    }
};

inline std::vector<FormulaInstance> orbit_instances(const ParamFamily& f, const FormulaTemplate& phi)
{
    std::vector<FormulaInstance> out;
    for (const auto& im : f.images) out.push_back({phi, im});
    return out;
}

/// Members consistent, whole set inconsistent, every proper subset consistent.
inline bool core_reverifies(const ParamModel& m, const std::vector<FormulaInstance>& core)
{
    if (core.empty()) return false;
    for (const auto& f : core)
        if (!instance_consistent(m, f)) return false;
    if (family_consistent_plain(m, core)) return false;
    for (size_t drop = 0; drop < core.size(); ++drop) {
        std::vector<FormulaInstance> sub;
        for (size_t i = 0; i < core.size(); ++i)
            if (i != drop) sub.push_back(core[i]);
        if (!family_consistent_plain(m, sub)) return false;
    }
    return true;
}

inline bool is_enumeration_of(const Tuple& t, const std::vector<int>& I)
{
    std::set<int> a(t.begin(), t.end()), b(I.begin(), I.end());
    return a.size() == t.size() && a == b;
}

inline ShearingVerdict verify_shearing(const ShearingInstance& inst, int core_bound = 12)
{
    ShearingVerdict v;
    v.depth = inst.depth;
    const auto& J = *inst.J;
    auto fail = [&](const char* clause, std::string why) {
        v.shears = false;
        v.clause = clause;
        v.detail = std::move(why);
        return v;
    };
    if (!inst.family.J) throw InputError("shearing instance without a family");
    if (inst.family.size() > 0 && inst.formula.slots != inst.family.image_length())
        throw InputError("formula slots differ from the family image length");

    // clause 1: finite I0 within I1 within the base, enumerated by s0 and t
    std::set<int> i0(inst.I0.begin(), inst.I0.end()), i1(inst.I1.begin(), inst.I1.end());
    for (int x : i1)
        if (x < 0 || x >= J.size() || J.depth(x) != 0) return fail("clause1", "I1 leaves the context base");
    for (int x : i0)
        if (!i1.count(x)) return fail("clause1", "I0 is not contained in I1");
    if (!is_enumeration_of(inst.s0, inst.I0)) return fail("clause1", "s0 does not enumerate I0");
    if (!is_enumeration_of(inst.t, inst.I1)) return fail("clause1", "t does not enumerate I1");
    if (inst.family.s != inst.s0 || !(inst.family.r == qf_type(inst.t, inst.s0, J)))
        throw InputError("family is not over the orbit of t over s0");
    v.orbit_size = inst.family.size();
    if (inst.family.size() == 0)
        throw DepthError("orbit of t over s0 is empty in J; saturate deeper");

    // clause 2 holds by construction: all parameters live in one model.

    // clause 3: indiscernible over A
    ParamFamily fa = inst.family;
    fa.base_params = inst.A;
    auto ind = check_indiscernible(fa, inst.model, 2);
    if (!ind.ok) {
        std::string w = ind.detail + ":";
        for (const auto& t : ind.first) w += " " + tuple_names(J, t).dump();
        w += " vs";
        for (const auto& t : ind.second) w += " " + tuple_names(J, t).dump();
        return fail("clause3", w);
    }

    // clause 4: the instance at t is consistent
    int ti = inst.family.index_of(inst.t);
    if (ti < 0) return fail("clause4", "t is outside the family's orbit");
    if (!instance_consistent(inst.model, {inst.formula, inst.family.images[ti]}))
        return fail("clause4", "formula inconsistent at t");

    // clause 5: the orbit family is contradictory
    auto fam = orbit_instances(inst.family, inst.formula);
    auto fv = family_consistent(inst.model, fam, core_bound);
    if (fv.consistent)
        return fail("clause5", "orbit family consistent in J (" + std::to_string(fam.size()) + " instances, depth " +
                                   inst.depth + ")");
    v.shears = true;
    v.core_bound_exceeded = fv.core_bound_exceeded;
    for (int i : fv.core) v.core.push_back(inst.family.orbit[i]);
    return v;
}

inline std::vector<FormulaInstance> core_instances(const ShearingInstance& inst, const ShearingVerdict& v)
{
    std::vector<FormulaInstance> out;
    for (const auto& t : v.core) out.push_back({inst.formula, inst.family.image(t)});
    return out;
}

// ------------------------------------------------------------ transports

namespace detail {

inline Tuple by_rank(const IndexStructure& J, std::vector<int> xs)
{
    std::sort(xs.begin(), xs.end(), [&](int a, int b) { return J.less(a, b); });
    return xs;
}

inline ParamFamily support_family(std::shared_ptr<const IndexStructure> J, const std::vector<int>& param_of,
                                  const Tuple& s, const Tuple& t, const std::vector<int>& support,
                                  const std::vector<int>& A)
{
    std::vector<int> coords;
    for (int x : support) {
        auto it = std::find(t.begin(), t.end(), x);
        if (it == t.end()) throw InputError("support element outside I1");
        coords.push_back(static_cast<int>(it - t.begin()));
    }
    Mirror mr{ParamModel{}, param_of};
    QfType r = qf_type(t, s, *J);
    auto f = mirror_family(J, mr, s, r, coords, A);
    for (const auto& im : f.images)
        for (int p : im)
            if (p < 0) throw InputError("orbit reaches an element without a parameter");
    return f;
}

} // namespace detail

/// The same formula and support moved to (I0', I1').
inline ShearingInstance transport(const ShearingInstance& inst, const std::vector<int>& I0p,
                                  const std::vector<int>& I1p)
{
    if (inst.support.empty() || inst.param_of.empty()) throw InputError("instance carries no transport data");
    ShearingInstance out = inst;
    out.I0 = I0p;
    out.I1 = I1p;
    out.s0 = detail::by_rank(*inst.J, I0p);
    out.t = detail::by_rank(*inst.J, I1p);
    out.family = detail::support_family(inst.J, inst.param_of, out.s0, out.t, inst.support, inst.A);
    return out;
}

/// Every shrink-I0 / grow-I1 transport inside the base elements of J.
inline std::vector<ShearingInstance> monotone_transports(const ShearingInstance& inst, int limit = 4096)
{
    const auto& J = *inst.J;
    std::set<int> i1(inst.I1.begin(), inst.I1.end());
    std::vector<int> extra;
    for (int x = 0; x < J.size(); ++x)
        if (J.depth(x) == 0 && !i1.count(x)) extra.push_back(x);
    size_t n0 = inst.I0.size(), ne = extra.size();
    if (n0 + ne > 20 || (1ull << (n0 + ne)) > static_cast<unsigned long long>(limit))
        throw BudgetError("too many transports: 2^" + std::to_string(n0 + ne));
    std::vector<ShearingInstance> out;
    for (uint64_t a = 0; a < (1ull << n0); ++a)
        for (uint64_t b = 0; b < (1ull << ne); ++b) {
            std::vector<int> I0p, I1p = inst.I1;
            for (size_t i = 0; i < n0; ++i)
                if (a >> i & 1) I0p.push_back(inst.I0[i]);
            for (size_t i = 0; i < ne; ++i)
                if (b >> i & 1) I1p.push_back(extra[i]);
            out.push_back(transport(inst, I0p, I1p));
        }
    return out;
}

/// Remove edges from J (and their mirrors from the model) and rebuild.
inline ShearingInstance drop_edges(const ShearingInstance& inst, const std::vector<Tuple>& edges)
{
    auto J2 = std::make_shared<IndexStructure>(*inst.J);
    std::set<Tuple> gone;
    for (auto e : edges) {
        std::sort(e.begin(), e.end());
        if (!J2->has_edge_sorted(e)) throw InputError("drop_edges: not an edge of J");
        J2->remove_edge(e);
        Tuple pe;
        for (int x : e) pe.push_back(inst.param_of.at(x));
        std::sort(pe.begin(), pe.end());
        gone.insert(pe);
    }
    ParamModel m(inst.model.theory);
    for (int x = 0; x < inst.model.size(); ++x) m.add_element(inst.model.name(x));
    for (const auto& e : inst.model.diagram())
        if (!gone.count(e)) m.add_edge(e);
    ShearingInstance out = inst;
    out.J = J2;
    out.model = std::move(m);
    out.family = detail::support_family(out.J, out.param_of, out.s0, out.t, out.support, out.A);
    return out;
}

// ------------------------------------------------------------ certificates

struct CertificateLevel {
    std::vector<int> I;
    Tuple s;
    std::vector<int> B;
    FormulaTemplate phi;
    ParamFamily family;    // orbit of s over the previous level's s
    std::vector<int> support;
};

struct UnsuperstabilityCertificate {
    ContextSpec context;
    std::shared_ptr<const IndexStructure> J;
    std::string depth;
    ParamModel model;
    std::vector<int> param_of;
    std::vector<CertificateLevel> levels;

    /// Level n (1-based) as a shearing instance over the previous level.
    ShearingInstance instance(int n) const
    {
        if (n < 1 || n > static_cast<int>(levels.size())) throw InputError("no such level");
        const auto& L = levels[n - 1];
        ShearingInstance si;
        si.context = context;
        si.J = J;
        si.depth = depth;
        if (n > 1) {
            si.I0 = levels[n - 2].I;
            si.s0 = levels[n - 2].s;
            si.A = levels[n - 2].B;
        }
        si.I1 = L.I;
        si.t = L.s;
        si.model = model;
        si.family = L.family;
        si.family.base_params = si.A;
        si.formula = L.phi;
        si.support = L.support;
        si.param_of = param_of;
        return si;
    }

    json to_json() const
    {
        json lv = json::array();
        auto names = [&](const std::vector<int>& xs) { return tuple_names(*J, xs); };
        for (const auto& L : levels) {
            json b = json::array();
            for (int x : L.B) b.push_back(model.name(x));
            lv.push_back(json{{"I", names(L.I)},
                              {"s", names(L.s)},
                              {"B", b},
                              {"phi", L.phi.to_json()},
                              {"support", names(L.support)},
                              {"family", L.family.to_json(model)}});
        }
        json po = json::object();
        for (int x = 0; x < J->size(); ++x)
            if (param_of[x] >= 0) po[J->name(x)] = model.name(param_of[x]);
        return json{{"context", json{{"label", context.label}, {"base", structure_to_json(context.base, context.cls)}}},
                    {"J", structure_to_json(*J, context.cls)},
                    {"depth", depth},
                    {"model", model.to_json()},
                    {"param_of", po},
                    {"levels", lv}};
    }

    static UnsuperstabilityCertificate from_json(const json& j)
    {
        UnsuperstabilityCertificate c;
        auto [base, cls] = structure_from_json(j.at("context").at("base"));
        c.context = ContextSpec{cls, base, j.at("context").at("label").get<std::string>()};
        auto [Jst, cls2] = structure_from_json(j.at("J"));
        if (!(cls2 == cls)) throw InputError("certificate: J and context classes differ");
        auto Jp = std::make_shared<IndexStructure>(std::move(Jst));
        c.J = Jp;
        c.depth = j.value("depth", "");
        c.model = ParamModel::from_json(j.at("model"));
        std::map<std::string, int> jid, pid;
        for (int x = 0; x < Jp->size(); ++x) jid[Jp->name(x)] = x;
        for (int x = 0; x < c.model.size(); ++x) pid[c.model.name(x)] = x;
        auto jget = [&](const std::string& nm) {
            auto it = jid.find(nm);
            if (it == jid.end()) throw InputError("certificate: unknown index element " + nm);
            return it->second;
        };
        auto pget = [&](const std::string& nm) {
            auto it = pid.find(nm);
            if (it == pid.end()) throw InputError("certificate: unknown parameter " + nm);
            return it->second;
        };
        auto jlist = [&](const json& a) {
            std::vector<int> out;
            for (const auto& x : a) out.push_back(jget(x.get<std::string>()));
            return out;
        };
        c.param_of.assign(Jp->size(), -1);
        for (const auto& [k, v] : j.at("param_of").items()) c.param_of[jget(k)] = pget(v.get<std::string>());
        for (const auto& lj : j.at("levels")) {
            CertificateLevel L;
            L.I = jlist(lj.at("I"));
            L.s = jlist(lj.at("s"));
            for (const auto& x : lj.at("B")) L.B.push_back(pget(x.get<std::string>()));
            L.phi = FormulaTemplate::from_json(lj.at("phi"));
            L.support = jlist(lj.at("support"));
            const auto& fj = lj.at("family");
            ParamFamily f;
            f.J = c.J;
            f.s = jlist(fj.at("s"));
            f.r = QfType::from_json(fj.at("r"));
            std::vector<std::pair<Tuple, Tuple>> rows;
            for (const auto& [k, im] : fj.at("assignment").items()) {
                Tuple t;
                for (const auto& nm : split(k, ',')) t.push_back(jget(nm));
                Tuple p;
                for (const auto& x : im) p.push_back(pget(x.get<std::string>()));
                rows.push_back({t, p});
            }
            std::sort(rows.begin(), rows.end());
            for (auto& [t, p] : rows) {
                f.orbit.push_back(t);
                f.images.push_back(p);
            }
            for (const auto& x : fj.at("base_params")) f.base_params.push_back(pget(x.get<std::string>()));
            for (int x : L.support) {
                auto it = std::find(L.s.begin(), L.s.end(), x);
                if (it == L.s.end()) throw InputError("certificate: support outside I");
                f.coords.push_back(static_cast<int>(it - L.s.begin()));
            }
            L.family = std::move(f);
            c.levels.push_back(std::move(L));
        }
        return c;
    }
};

struct CertificateVerdict {
    bool ok = true;
    int failing_level = -1;  // 1-based; 0 for structural failures
    std::string reason;
    std::vector<ShearingVerdict> levels;

    json to_json(const IndexStructure& J) const
    {
        json lv = json::array();
        for (const auto& v : levels) lv.push_back(v.to_json(J));
        json j{{"verdict", ok ? "Passes" : "Fails"}, {"levels", lv}};
        if (!ok) {
            j["failing_level"] = failing_level;
            j["reason"] = reason;
        }
        return j;
    }
};

inline CertificateVerdict verify_certificate(const UnsuperstabilityCertificate& c, int core_bound = 12)
{
    CertificateVerdict v;
    auto fail = [&](int level, std::string why) {
        v.ok = false;
        v.failing_level = level;
        v.reason = std::move(why);
        return v;
    };
    if (c.levels.empty()) return fail(0, "certificate has no levels");
    for (size_t n = 0; n < c.levels.size(); ++n) {
        const auto& L = c.levels[n];
        int lvl = static_cast<int>(n) + 1;
        if (!is_enumeration_of(L.s, L.I)) return fail(lvl, "s does not enumerate I");
        if (L.B.empty()) return fail(lvl, "B is empty");
        if (n > 0) {
            const auto& P = c.levels[n - 1];
            std::set<int> I(L.I.begin(), L.I.end()), B(L.B.begin(), L.B.end());
            for (int x : P.I)
                if (!I.count(x)) return fail(lvl, "I not increasing");
            if (P.s.size() > L.s.size() || !std::equal(P.s.begin(), P.s.end(), L.s.begin()))
                return fail(lvl, "enumeration does not extend the previous one");
            for (int x : P.B)
                if (!B.count(x)) return fail(lvl, "B not increasing");
        }
    }
    std::vector<FormulaInstance> joint;
    for (size_t n = 0; n < c.levels.size(); ++n) {
        int lvl = static_cast<int>(n) + 1;
        auto si = c.instance(lvl);
        auto sv = verify_shearing(si, core_bound);
        v.levels.push_back(sv);
        if (!sv.shears) return fail(lvl, "level does not shear: " + sv.clause);
        joint.push_back({si.formula, si.family.image(si.t)});
        if (!family_consistent_plain(c.model, joint)) return fail(lvl, "type not jointly consistent");
    }
    return v;
}

/// Iterates the one-level step: fresh t_0<...<t_{n-1} with singleton colors,
/// v_i placed right above t_i with all (k+1)-subsets of v an edge, one
/// parameter copy of the level's points, phi = AND_{u in [n]^k} R(x, y_u).
inline UnsuperstabilityCertificate build_tnk_certificate(int n, int k, int levels)
{
    if (!(n > k && k >= 2)) throw InputError("build_tnk_certificate: need n > k >= 2");
    if (levels < 1) throw InputError("build_tnk_certificate: need levels >= 1");
    if (static_cast<long long>(n) * levels * 2 > growth_limit())
        throw BudgetError("build_tnk_certificate: needs " + std::to_string(2 * n * levels) + " index elements");
    UnsuperstabilityCertificate c;
    c.context = cnk_context(n, k, n * levels);
    IndexStructure J = c.context.base;
    c.depth = "on-demand:" + std::to_string(levels);
    std::vector<std::vector<int>> vs(levels);
    for (int m = 0; m < levels; ++m) {
        for (int i = 0; i < n; ++i) {
            int ti = m * n + i;
            PointConstraints pc;
            pc.lo = ti;
            pc.hi = ti + 1 < n * levels ? ti + 1 : -1;
            pc.color = J.color(ti);
            if (i >= k) {
                detail::for_each_subset(i, k, [&](const std::vector<int>& idx) {
                    Tuple t;
                    for (int q : idx) t.push_back(vs[m][q]);
                    pc.pos.push_back(t);
                });
            }
            pc.name = "v" + std::to_string(m) + "_" + std::to_string(i);
            pc.depth = 1;
            auto x = realize_point(J, pc);
            if (!x) throw DepthError("build_tnk_certificate: v-point not realizable at level " + std::to_string(m + 1));
            vs[m].push_back(*x);
        }
    }
    auto Jp = std::make_shared<const IndexStructure>(J);
    c.J = Jp;
    c.model = ParamModel(TheorySpec::hypergraph(n, k));
    c.param_of.assign(J.size(), -1);
    FormulaTemplate phi;
    phi.slots = n;
    detail::for_each_subset(n, k, [&](const std::vector<int>& idx) { phi.pos.push_back(Tuple(idx.begin(), idx.end())); });
    std::vector<int> B;
    for (int m = 0; m < levels; ++m) {
        std::vector<int> lvl;
        for (int i = 0; i < n; ++i) lvl.push_back(m * n + i);
        for (int x : vs[m]) lvl.push_back(x);
        for (int x : lvl) c.param_of[x] = c.model.add_element("a_" + J.name(x));
        for (const auto& e : J.edges()) {
            bool mine = std::all_of(e.begin(), e.end(), [&](int x) {
                return std::find(vs[m].begin(), vs[m].end(), x) != vs[m].end();
            });
            if (!mine) continue;
            Tuple pe;
            for (int x : e) pe.push_back(c.param_of[x]);
            c.model.add_edge(pe);
        }
        CertificateLevel L;
        for (int x = 0; x < (m + 1) * n; ++x) L.I.push_back(x);
        L.s = L.I;
        Tuple prev(L.s.begin(), L.s.begin() + m * n);
        for (int i = 0; i < n; ++i) L.support.push_back(m * n + i);
        std::vector<int> A = B;
        L.family = detail::support_family(Jp, c.param_of, prev, L.s, L.support, A);
        for (int x : lvl) B.push_back(c.param_of[x]);
        L.B = B;
        L.phi = phi;
        c.levels.push_back(std::move(L));
    }
    return c;
}

/// The single-level T_{3,2} instance.
inline ShearingInstance build_t32_witness()
{
    return build_tnk_certificate(3, 2, 1).instance(1);
}

/// The instance with the J-edge on the v-points removed.
inline ShearingInstance mutate_drop_edge(const ShearingInstance& inst)
{
    std::vector<Tuple> es;
    for (const auto& e : inst.J->edges()) es.push_back(e);
    if (es.empty()) throw InputError("mutate_drop_edge: J has no edge");
    return drop_edges(inst, {es.front()});
}

// ------------------------------------------------------------ dividing

struct SequenceFamily {
    ContextSpec context;
    std::shared_ptr<const IndexStructure> J;
    ParamFamily family;
    FormulaTemplate phi;
};

/// Index a list of instances of one template by a finite linear order.
inline SequenceFamily sequence_family(const std::vector<FormulaInstance>& inst)
{
    if (inst.empty()) throw InputError("sequence_family: empty sequence");
    SequenceFamily sf;
    sf.context = linear_context(static_cast<int>(inst.size()));
    sf.J = std::make_shared<const IndexStructure>(sf.context.base);
    sf.phi = inst.front().tpl;
    for (const auto& f : inst)
        if (!(f.tpl == sf.phi)) throw InputError("sequence_family: mixed templates");
    sf.family = make_family(sf.J, {}, qf_type({0}, {}, *sf.J));
    for (const auto& t : sf.family.orbit) sf.family.images.push_back(inst[t[0]].binding);
    return sf;
}

struct DividingVerdict {
    bool individually_consistent = true;
    bool k_inconsistent = true;
    std::vector<Tuple> consistent_subset;  // witness against k-inconsistency
    ShearingVerdict shear;
    bool ok() const { return individually_consistent && k_inconsistent && shear.shears; }

    json to_json(const IndexStructure& J) const
    {
        json w = json::array();
        for (const auto& t : consistent_subset) w.push_back(tuple_names(J, t));
        return json{{"verdict", ok() ? "Shears" : "Fails"},
                    {"individually_consistent", individually_consistent},
                    {"k_inconsistent", k_inconsistent},
                    {"consistent_subset", w},
                    {"shearing", shear.to_json(J)}};
    }
};

inline DividingVerdict verify_dividing_as_shearing(const ContextSpec& ctx, const ParamModel& m,
                                                   const ParamFamily& seq, const FormulaTemplate& phi, int k,
                                                   int core_bound = 8)
{
    if (ctx.cls.kind != ClassKind::Linear) throw InputError("dividing needs a LINEAR context");
    if (seq.r.arity != 1) throw InputError("dividing needs a family over 1-element tuples");
    if (k < 1) throw InputError("dividing: k >= 1");
    DividingVerdict v;
    auto fam = orbit_instances(seq, phi);
    for (const auto& f : fam)
        if (!instance_consistent(m, f)) v.individually_consistent = false;
    int n = static_cast<int>(fam.size());
    if (k > n) {
        v.k_inconsistent = false;
    } else {
        detail::for_each_subset(n, k, [&](const std::vector<int>& idx) {
            if (!v.k_inconsistent) return;
            std::vector<FormulaInstance> sub;
            for (int i : idx) sub.push_back(fam[i]);
            if (family_consistent_plain(m, sub)) {
                v.k_inconsistent = false;
                for (int i : idx) v.consistent_subset.push_back(seq.orbit[i]);
            }
        });
    }
    ShearingInstance si;
    si.context = ctx;
    si.J = seq.J;
    si.depth = "sequence";
    si.I0 = seq.s;
    si.s0 = seq.s;
    // t: the first orbit point outside I0
    int t = -1;
    for (const auto& o : seq.orbit)
        if (std::find(seq.s.begin(), seq.s.end(), o[0]) == seq.s.end()) {
            t = o[0];
            break;
        }
    if (t < 0) throw DepthError("dividing: orbit has no point outside I0");
    si.I1 = si.I0;
    si.I1.push_back(t);
    si.t = detail::by_rank(*seq.J, si.I1);
    si.model = m;
    si.formula = phi;
    si.A = seq.base_params;
    if (si.I0.empty()) {
        si.family = seq;
    } else {
        si.family = make_family(seq.J, si.s0, qf_type(si.t, si.s0, *seq.J));
        int pos = static_cast<int>(std::find(si.t.begin(), si.t.end(), t) - si.t.begin());
        for (const auto& o : si.family.orbit) si.family.images.push_back(seq.image({o[pos]}));
    }
    si.family.base_params = si.A;
    v.shear = verify_shearing(si, core_bound);
    return v;
}

// ------------------------------------------------------------ random-graph collisions

struct ConsistencyCertificate {
    bool consistent = true;
    // inconsistency: b_{v,i} = b_{w,j} with i positive, j negative
    Tuple v, w;
    int i = -1, j = -1;
    std::optional<Tuple> same_tuple;  // derived z with b_{z,i} = b_{z,j}
    std::vector<json> trace;

    json to_json(const IndexStructure& J) const
    {
        json t = json::array();
        for (const auto& s : trace) t.push_back(s);
        json out{{"verdict", consistent ? "Consistent" : "Inconsistent"}, {"trace", t}};
        if (!consistent) {
            out["collision"] = json{{"v", tuple_names(J, v)}, {"w", tuple_names(J, w)}, {"i", i}, {"j", j}};
            if (same_tuple) out["same_tuple"] = tuple_names(J, *same_tuple);
        }
        return out;
    }
};

namespace detail {

struct Derivation {
    bool ok = false;
    Tuple z;
    std::vector<json> steps;
    std::string note;
};

/// Demands for a copy of `orig` over `ctx`: the k-sets of ctx keep their
/// incidence with orig.
inline void copy_incidences(const IndexStructure& J, int orig, const std::vector<int>& ctx, PointConstraints& pc)
{
    int ar = J.sig.edge_arity.value_or(0);
    if (ar == 0) return;
    std::vector<int> c(ctx.begin(), ctx.end());
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    for_each_subset(static_cast<int>(c.size()), ar - 1, [&](const std::vector<int>& idx) {
        Tuple T, E;
        for (int q : idx) T.push_back(c[q]);
        E = T;
        E.push_back(orig);
        std::sort(E.begin(), E.end());
        (J.has_edge_sorted(E) ? pc.pos : pc.neg).push_back(T);
    });
}

inline std::vector<int> union_of(const Tuple& a, const Tuple& b, const Tuple& s)
{
    std::vector<int> u(a.begin(), a.end());
    u.insert(u.end(), b.begin(), b.end());
    u.insert(u.end(), s.begin(), s.end());
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    return u;
}

/// Normalize (v, w) so that inside every interval cut out by the common
/// elements and s, v lies below w; then interpolate z with
/// tp(v^z) = tp(v^w) = tp(z^w). Works on J in place.
inline Derivation derive_same_tuple(IndexStructure& J, const Tuple& s, Tuple v, Tuple w)
{
    Derivation d;
    int a = static_cast<int>(v.size());
    std::set<int> common;
    for (int p = 0; p < a; ++p)
        if (std::find(w.begin(), w.end(), v[p]) != w.end()) {
            if (w[p] != v[p]) {
                d.note = "common element at different positions";
                return d;
            }
            common.insert(v[p]);
        }
    std::vector<int> divs(common.begin(), common.end());
    divs.insert(divs.end(), s.begin(), s.end());
    divs = by_rank(J, divs);
    auto interval = [&](int x) {
        int c = 0;
        while (c < static_cast<int>(divs.size()) && J.less(divs[c], x)) ++c;
        return c;
    };
    auto crossings = [&] {
        int c = 0;
        for (int p = 0; p < a; ++p)
            for (int q = 0; q < a; ++q)
                if (!common.count(v[p]) && !common.count(w[q]) && interval(v[p]) == interval(w[q]) &&
                    J.less(w[q], v[p]))
                    ++c;
        return c;
    };
    for (int guard = 0; crossings() > 0; ++guard) {
        if (guard > a * a + 1) throw DepthError("crossing elimination did not terminate");
        // leftmost adjacent pair w_q < v_p among the non-common elements
        std::vector<std::tuple<int, int, char>> el;  // element, position, side
        for (int p = 0; p < a; ++p)
            if (!common.count(v[p])) el.emplace_back(v[p], p, 'v');
        for (int q = 0; q < a; ++q)
            if (!common.count(w[q])) el.emplace_back(w[q], q, 'w');
        std::sort(el.begin(), el.end(), [&](const auto& x, const auto& y) { return J.less(std::get<0>(x), std::get<0>(y)); });
        int p = -1, q = -1;
        for (size_t e = 0; e + 1 < el.size(); ++e)
            if (std::get<2>(el[e]) == 'w' && std::get<2>(el[e + 1]) == 'v' &&
                interval(std::get<0>(el[e])) == interval(std::get<0>(el[e + 1]))) {
                q = std::get<1>(el[e]);
                p = std::get<1>(el[e + 1]);
                break;
            }
        if (p < 0) throw DepthError("crossing elimination: no adjacent crossing");
        QfType tau = pair_type_in(J, v, w, s);
        PointConstraints pv;
        pv.lo = w[q];
        pv.hi = v[p];
        pv.color = J.color(v[p]);
        std::vector<int> ctx = union_of(v, w, s);
        ctx.erase(std::find(ctx.begin(), ctx.end(), v[p]));
        copy_incidences(J, v[p], ctx, pv);
        auto vp = realize_point(J, pv);
        if (!vp) throw DepthError("crossing elimination: substitute for v not realizable");
        PointConstraints pw;
        pw.lo = *vp;
        pw.hi = v[p];
        pw.color = J.color(w[q]);
        ctx = union_of(v, w, s);
        ctx.erase(std::find(ctx.begin(), ctx.end(), w[q]));
        copy_incidences(J, w[q], ctx, pw);
        auto wq = realize_point(J, pw);
        if (!wq) throw DepthError("crossing elimination: substitute for w not realizable");
        Tuple v2 = v, w2 = w;
        v2[p] = *vp;
        w2[q] = *wq;
        if (!(pair_type_in(J, v2, w, s) == tau) || !(pair_type_in(J, v, w2, s) == tau))
            throw DepthError("crossing elimination: substitutes change the pair type");
        d.steps.push_back(json{{"step", "substitute"}, {"v_pos", p}, {"w_pos", q},
                               {"v_new", J.name(*vp)}, {"w_new", J.name(*wq)}});
        v = v2;
        w = w2;
    }
    QfType tau = pair_type_in(J, v, w, s);
    // interpolate: per interval, copies of w's elements between v's and w's
    Tuple z = w;
    std::map<int, int> as_w, as_v;  // z element -> w / v element it stands for
    std::vector<int> order_w;
    for (int q = 0; q < a; ++q)
        if (!common.count(w[q])) order_w.push_back(q);
    std::sort(order_w.begin(), order_w.end(), [&](int x, int y) { return J.less(w[x], w[y]); });
    std::map<int, int> last_in;  // interval -> last placed copy
    for (int q : order_w) {
        int iv = interval(w[q]);
        int lo = -1;
        if (last_in.count(iv)) {
            lo = last_in[iv];
        } else {
            if (iv > 0) lo = divs[iv - 1];
            for (int p = 0; p < a; ++p)
                if (!common.count(v[p]) && interval(v[p]) == iv && (lo < 0 || J.less(lo, v[p]))) lo = v[p];
        }
        int hi = -1;
        for (int q2 = 0; q2 < a; ++q2)
            if (!common.count(w[q2]) && interval(w[q2]) == iv && (hi < 0 || J.less(w[q2], hi))) hi = w[q2];
        PointConstraints pc;
        pc.lo = lo;
        pc.hi = hi;
        pc.color = J.color(w[q]);
        int ar2 = J.sig.edge_arity.value_or(0);
        if (ar2 > 0) {
            std::vector<int> pool = union_of(v, w, s);
            for (auto [zz, ww] : as_w) pool.push_back(zz);
            std::sort(pool.begin(), pool.end());
            std::set<int> vside(v.begin(), v.end()), wside(w.begin(), w.end());
            vside.insert(s.begin(), s.end());
            wside.insert(s.begin(), s.end());
            bool clash = false;
            for_each_subset(static_cast<int>(pool.size()), ar2 - 1, [&](const std::vector<int>& idx) {
                Tuple T;
                for (int i2 : idx) T.push_back(pool[i2]);
                bool in1 = true, in2 = true;
                Tuple T1{w[q]}, T2{v[q]};
                for (int x : T) {
                    bool isz = as_w.count(x) > 0;
                    if (isz) {
                        T1.push_back(as_w[x]);
                        T2.push_back(as_v[x]);
                        continue;
                    }
                    if (!vside.count(x)) in1 = false;
                    if (!wside.count(x)) in2 = false;
                    T1.push_back(x);
                    T2.push_back(x);
                }
                std::sort(T1.begin(), T1.end());
                std::sort(T2.begin(), T2.end());
                std::optional<bool> want;
                if (in1) want = !has_repeat(T1) && J.has_edge_sorted(T1);
                if (in2) {
                    bool e2 = !has_repeat(T2) && J.has_edge_sorted(T2);
                    if (want && *want != e2) clash = true;
                    want = e2;
                }
                (want.value_or(false) ? pc.pos : pc.neg).push_back(T);
            });
            if (clash) {
                d.note = "interpolant demands clash";
                return d;
            }
        }
        auto x = realize_point(J, pc);
        if (!x) throw DepthError("interpolation: copy not realizable");
        z[q] = *x;
        as_w[*x] = w[q];
        as_v[*x] = v[q];
        last_in[iv] = *x;
        d.steps.push_back(json{{"step", "interpolate"}, {"pos", q}, {"z", J.name(*x)}});
    }
    if (!(pair_type_in(J, v, z, s) == tau) || !(pair_type_in(J, z, w, s) == tau)) {
        d.note = "interpolant does not realize the pair type";
        return d;
    }
    d.ok = true;
    d.z = z;
    return d;
}

} // namespace detail

/// Closes the pattern's equalities over the orbit in J and looks for a
/// positive coordinate equal to a negative one. Pairs carrying off-diagonal
/// equalities are pushed through normalization and interpolation; the trace
/// records the same-tuple equality each one forces.
inline ConsistencyCertificate trg_collision_analysis(const EqualityPattern& pat, const IndexStructure& J,
                                                     const Tuple& s, const QfType& r,
                                                     const std::vector<int>& Apos, const std::vector<int>& Bneg)
{
    ConsistencyCertificate cert;
    auto orbit = realizations(J, r, s);
    if (orbit.empty()) throw DepthError("trg_collision_analysis: orbit empty in J; saturate deeper");
    int L = 0;
    for (int x : Apos) L = std::max(L, x + 1);
    for (int x : Bneg) L = std::max(L, x + 1);
    for (const auto& [k, e] : pat.entries)
        for (auto [i, j] : e.eq) L = std::max({L, i + 1, j + 1});
    std::set<int> A(Apos.begin(), Apos.end()), B(Bneg.begin(), Bneg.end());
    for (int x : A)
        if (B.count(x)) throw InputError("trg_collision_analysis: a coordinate is both positive and negative");
    int n = static_cast<int>(orbit.size());
    std::vector<int> parent(n * L);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::map<std::string, std::pair<int, int>> off_diag;  // pair type key -> first realizing pair
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            QfType q = pair_type_in(J, orbit[a], orbit[b], s);
            const auto* eq = pat.find(q);
            if (!eq) continue;
            for (auto [i, j] : *eq) {
                int x = find(a * L + i), y = find(b * L + j);
                if (x != y) parent[std::max(x, y)] = std::min(x, y);
                if (a != b && i != j) off_diag.emplace(q.key(), std::make_pair(a, b));
            }
        }
    // collision: a positive and a negative coordinate in one class
    std::map<int, std::pair<int, int>> pos_rep;
    for (int a = 0; a < n && cert.consistent; ++a)
        for (int i : A) pos_rep.emplace(find(a * L + i), std::make_pair(a, i));
    for (int b = 0; b < n && cert.consistent; ++b)
        for (int j : B) {
            auto it = pos_rep.find(find(b * L + j));
            if (it == pos_rep.end()) continue;
            cert.consistent = false;
            cert.v = orbit[it->second.first];
            cert.i = it->second.second;
            cert.w = orbit[b];
            cert.j = j;
            break;
        }
    IndexStructure work = J;
    if (!cert.consistent) {
        if (cert.v == cert.w) {
            cert.same_tuple = cert.v;
        } else {
            auto d = detail::derive_same_tuple(work, s, cert.v, cert.w);
            for (auto& st : d.steps) cert.trace.push_back(st);
            if (d.ok) cert.same_tuple = d.z;
            else cert.trace.push_back(json{{"step", "stop"}, {"note", d.note}});
        }
        return cert;
    }
    for (const auto& [k, ab] : off_diag) {
        const Tuple& v = orbit[ab.first];
        const Tuple& w = orbit[ab.second];
        auto d = detail::derive_same_tuple(work, s, v, w);
        json eqs = json::array();
        for (auto [i, j] : *pat.find(pair_type_in(J, v, w, s)))
            if (i != j) eqs.push_back({i, j});
        json row{{"v", tuple_names(J, v)}, {"w", tuple_names(J, w)}, {"equal", eqs}, {"steps", d.steps}};
        if (d.ok) row["z"] = tuple_names(work, d.z);
        else row["note"] = d.note;
        cert.trace.push_back(row);
    }
    return cert;
}

// ------------------------------------------------------------ trivial dividing

struct TrivialDividingBounds {
    int slots = 4;
    int length = 5;
};

struct TrivialDividingVerdict {
    bool found = false;
    TrivialDividingBounds bounds;
    long long candidates = 0;
    json counterexample;

    json to_json() const
    {
        json j{{"verdict", found ? "CounterexampleFound" : "NoneFound"},
               {"bounds", json{{"slots", bounds.slots}, {"length", bounds.length}}},
               {"candidates", candidates}};
        if (found) j["counterexample"] = counterexample;
        return j;
    }
};

inline long long binom(int n, int k)
{
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

inline long long trivial_dividing_cost(const TheorySpec& th, const TrivialDividingBounds& b)
{
    long long total = 0;
    int k = th.edge_arity() - 1, n = th.n;
    for (int L = 1; L <= b.slots; ++L) {
        long long ks = binom(L, k);
        if (ks == 0) continue;
        long long tpl = ks >= 62 ? (1LL << 62) : (1LL << ks) - 1;
        long long shapes = binom(L * std::min(n, b.length), n);
        if (shapes > 0 && tpl > (1LL << 62) / shapes) return 1LL << 62;
        total += tpl * shapes;
    }
    return total;
}

/// Bounded search for a positive template and an order-indiscernible
/// sequence (length `length`) making the instances m-inconsistent while each
/// is consistent. The contradiction is a clique S of n parameters; the
/// sequence diagram is the closure of S's edges under index renaming.
inline TrivialDividingVerdict search_trivial_dividing(const TheorySpec& th, const TrivialDividingBounds& b)
{
    if (th.kind != TheorySpec::Kind::Hypergraph) throw InputError("search_trivial_dividing: needs a hypergraph theory");
    if (b.slots < 0 || b.length < 1) throw InputError("search_trivial_dividing: bad bounds");
    const long long hard = 20'000'000;
    long long cost = trivial_dividing_cost(th, b);
    if (b.slots > 8 || b.length > 8 || cost > hard)
        throw BudgetError("search_trivial_dividing: estimated " + std::to_string(cost) + " candidates exceeds " +
                          std::to_string(hard));
    TrivialDividingVerdict v;
    v.bounds = b;
    int n = th.n, k = th.edge_arity() - 1, ar = k + 1, len = b.length;
    int width_cap = std::min(n, len);
    for (int L = 1; L <= b.slots; ++L) {
        std::vector<Tuple> ks;
        detail::for_each_subset(L, k, [&](const std::vector<int>& idx) { ks.push_back(Tuple(idx.begin(), idx.end())); });
        if (ks.empty()) continue;
        // entries (index rank, slot), sorted
        std::vector<std::pair<int, int>> entries;
        for (int r = 0; r < width_cap; ++r)
            for (int sl = 0; sl < L; ++sl) entries.push_back({r, sl});
        std::vector<std::vector<std::pair<int, int>>> shapes;
        detail::for_each_subset(static_cast<int>(entries.size()), n, [&](const std::vector<int>& idx) {
            std::vector<std::pair<int, int>> S;
            std::set<int> ranks;
            for (int i : idx) {
                S.push_back(entries[i]);
                ranks.insert(entries[i].first);
            }
            // ranks must be an initial segment
            if (*ranks.rbegin() != static_cast<int>(ranks.size()) - 1) return;
            shapes.push_back(S);
        });
        auto width = [](const std::vector<std::pair<int, int>>& S) {
            std::set<int> r;
            for (auto& e : S) r.insert(e.first);
            return static_cast<int>(r.size());
        };
        std::stable_sort(shapes.begin(), shapes.end(), [&](const auto& x, const auto& y) { return width(x) > width(y); });
        for (uint64_t D = 1; D < (1ull << ks.size()); ++D) {
            std::set<Tuple> dset;
            for (size_t i = 0; i < ks.size(); ++i)
                if (D >> i & 1) dset.insert(ks[i]);
            for (const auto& S : shapes) {
                ++v.candidates;
                // every k-subset of S inside one index and demanded
                bool ok = true;
                detail::for_each_subset(n, k, [&](const std::vector<int>& idx) {
                    if (!ok) return;
                    Tuple sl;
                    int r0 = S[idx[0]].first;
                    for (int i : idx) {
                        if (S[i].first != r0) ok = false;
                        sl.push_back(S[i].second);
                    }
                    std::sort(sl.begin(), sl.end());
                    if (ok && !dset.count(sl)) ok = false;
                });
                if (!ok) continue;
                int m = width(S);
                if (m > len) continue;
                for (int symmetric = 1; symmetric >= 0; --symmetric) {
                    ParamModel pm(th);
                    std::vector<std::vector<int>> a(len, std::vector<int>(L));
                    for (int i = 0; i < len; ++i)
                        for (int sl = 0; sl < L; ++sl)
                            a[i][sl] = pm.add_element("a" + std::to_string(sl) + "_" + std::to_string(i));
                    // closure of each (k+1)-subset of S under index maps
                    detail::for_each_subset(n, ar, [&](const std::vector<int>& idx) {
                        std::vector<int> rk;
                        for (int i : idx) rk.push_back(S[i].first);
                        std::vector<int> used = rk;
                        std::sort(used.begin(), used.end());
                        used.erase(std::unique(used.begin(), used.end()), used.end());
                        int u = static_cast<int>(used.size());
                        std::vector<int> img(u);
                        auto rec = [&](auto&& self, int p) -> void {
                            if (p == u) {
                                Tuple e;
                                for (size_t q = 0; q < idx.size(); ++q) {
                                    int which = static_cast<int>(std::find(used.begin(), used.end(), rk[q]) - used.begin());
                                    e.push_back(a[img[which]][S[idx[q]].second]);
                                }
                                pm.add_edge(e);
                                return;
                            }
                            for (int c = 0; c < len; ++c) {
                                bool bad = false;
                                for (int q = 0; q < p; ++q)
                                    if (img[q] == c || (!symmetric && img[q] > c)) bad = true;
                                if (bad) continue;
                                img[p] = c;
                                self(self, p + 1);
                            }
                        };
                        rec(rec, 0);
                    });
                    if (pm.clique()) continue;
                    FormulaTemplate phi;
                    phi.slots = L;
                    phi.pos.assign(dset.begin(), dset.end());
                    std::vector<FormulaInstance> fam;
                    for (int i = 0; i < len; ++i) fam.push_back({phi, a[i]});
                    bool indiv = std::all_of(fam.begin(), fam.end(), [&](const auto& f) { return instance_consistent(pm, f); });
                    if (!indiv) continue;
                    bool all_incons = true;
                    detail::for_each_subset(len, m, [&](const std::vector<int>& idx) {
                        if (!all_incons) return;
                        std::vector<FormulaInstance> sub;
                        for (int i : idx) sub.push_back(fam[i]);
                        if (family_consistent_plain(pm, sub)) all_incons = false;
                    });
                    if (!all_incons) continue;
                    json shape = json::array();
                    for (auto& [r, sl] : S) shape.push_back(json{{"index", r}, {"slot", sl}});
                    v.found = true;
                    v.counterexample = json{{"theory", th.to_json()},
                                            {"formula", phi.to_json()},
                                            {"shape", shape},
                                            {"symmetric", static_cast<bool>(symmetric)},
                                            {"m", m},
                                            {"model", pm.to_json()}};
                    return v;
                }
            }
        }
    }
    return v;
}

} // namespace shearlab
