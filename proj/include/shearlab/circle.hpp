#pragma once

#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "orbit_calculus.hpp"
#include "saturation.hpp"
#include "shearing.hpp"

namespace shearlab {

struct CircleWitness {
    ContextSpec context;
    std::shared_ptr<const IndexStructure> J;
    std::string depth;
    std::vector<int> I0, I1;
    Tuple s, t;
    QfType r;
    std::vector<PairQfType> E1, E2, F;  // sorted by serialization

    static void normalize(std::vector<PairQfType>& v)
    {
        std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.serialize() < b.serialize(); });
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }

    json to_json() const
    {
        auto arr = [](const std::vector<PairQfType>& v) {
            json a = json::array();
            for (const auto& p : v) a.push_back(p.to_json());
            return a;
        };
        return json{{"context", context.label},
                    {"depth", depth},
                    {"I0", tuple_names(*J, I0)},
                    {"I1", tuple_names(*J, I1)},
                    {"s", tuple_names(*J, s)},
                    {"t", tuple_names(*J, t)},
                    {"r", r.to_json()},
                    {"E1", arr(E1)},
                    {"E2", arr(E2)},
                    {"F", arr(F)}};
    }
};

inline std::set<std::string> type_keys(const std::vector<PairQfType>& v)
{
    std::set<std::string> out;
    for (const auto& p : v) out.insert(p.type.key());
    return out;
}

struct CircleVerdict {
    bool ok = true;
    std::string clause;  // "i", "ii", "iii"
    std::string detail;
    Tuple a, b;
    bool partial = false;  // some E1-class is not F-matched
    Tuple unmatched;
    int orbit_size = 0;
    int e1_classes = 0, e2_classes = 0, matched = 0;

    json to_json(const IndexStructure& J) const
    {
        json j{{"verdict", ok ? "Passes" : "Fails"},
               {"orbit_size", orbit_size},
               {"E1_classes", e1_classes},
               {"E2_classes", e2_classes},
               {"matched_classes", matched},
               {"partial", partial}};
        if (partial) j["unmatched_class"] = tuple_names(J, unmatched);
        if (!ok) {
            j["clause"] = clause;
            j["detail"] = detail;
            j["pair"] = json::array({tuple_names(J, a), tuple_names(J, b)});
        }
        return j;
    }
};

namespace detail {

/// Pair-type ids of all ordered pairs of Y (row-major), keys interned.
struct ConcretePairs {
    std::vector<Tuple> Y;
    std::vector<int> ty;
    std::vector<std::string> keys;
    std::vector<PairQfType> types;
    int n = 0;
    int at(int a, int b) const { return ty[a * n + b]; }
};

inline ConcretePairs concrete_pairs(const IndexStructure& J, const QfType& r, const Tuple& s, int limit = 4000)
{
    ConcretePairs cp;
    cp.Y = realizations(J, r, s);
    cp.n = static_cast<int>(cp.Y.size());
    if (cp.n == 0) throw DepthError("orbit empty in J; saturate deeper");
    if (cp.n > limit) throw BudgetError("orbit has " + std::to_string(cp.n) + " tuples; concrete check limit " +
                                       std::to_string(limit));
    std::unordered_map<std::string, int> id;
    cp.ty.resize(static_cast<size_t>(cp.n) * cp.n);
    for (int a = 0; a < cp.n; ++a)
        for (int b = 0; b < cp.n; ++b) {
            QfType q = pair_type_in(J, cp.Y[a], cp.Y[b], s);
            auto k = q.key();
            auto it = id.find(k);
            if (it == id.end()) {
                it = id.emplace(k, static_cast<int>(cp.keys.size())).first;
                cp.keys.push_back(k);
                cp.types.push_back({q, r.arity});
            }
            cp.ty[a * cp.n + b] = it->second;
        }
    return cp;
}

inline std::vector<int> classes_of(const ConcretePairs& cp, const std::vector<char>& in)
{
    std::vector<int> parent(cp.n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int a = 0; a < cp.n; ++a)
        for (int b = 0; b < cp.n; ++b)
            if (in[cp.at(a, b)]) {
                int x = find(a), y = find(b);
                if (x != y) parent[std::max(x, y)] = std::min(x, y);
            }
    std::vector<int> cls(cp.n);
    for (int a = 0; a < cp.n; ++a) cls[a] = find(a);
    return cls;
}

} // namespace detail

inline CircleVerdict check_circle_witness(const CircleWitness& w)
{
    CircleVerdict v;
    const auto& J = *w.J;
    auto cp = detail::concrete_pairs(J, w.r, w.s);
    v.orbit_size = cp.n;
    int nt = static_cast<int>(cp.keys.size());
    auto member = [&](const std::vector<PairQfType>& rel) {
        auto ks = type_keys(rel);
        std::vector<char> in(nt, 0);
        for (int t = 0; t < nt; ++t) in[t] = ks.count(cp.keys[t]) > 0;
        return in;
    };
    auto e1 = member(w.E1), e2 = member(w.E2), f = member(w.F);
    auto fail = [&](const char* clause, std::string why, int a, int b) {
        v.ok = false;
        v.clause = clause;
        v.detail = std::move(why);
        v.a = cp.Y[a];
        v.b = cp.Y[b];
        return v;
    };
    // (i) equivalence relations
    for (int k = 0; k < 2; ++k) {
        const auto& in = k == 0 ? e1 : e2;
        std::string nm = k == 0 ? "E1" : "E2";
        for (int a = 0; a < cp.n; ++a)
            if (!in[cp.at(a, a)]) return fail("i", nm + " not reflexive", a, a);
        for (int a = 0; a < cp.n; ++a)
            for (int b = 0; b < cp.n; ++b)
                if (in[cp.at(a, b)] && !in[cp.at(b, a)]) return fail("i", nm + " not symmetric", a, b);
        auto cls = detail::classes_of(cp, in);
        for (int a = 0; a < cp.n; ++a)
            for (int b = 0; b < cp.n; ++b)
                if (cls[a] == cls[b] && !in[cp.at(a, b)]) return fail("i", nm + " not transitive", a, b);
    }
    auto c1 = detail::classes_of(cp, e1), c2 = detail::classes_of(cp, e2);
    // (ii) F: a nonempty injective partial function on classes
    std::set<std::pair<int, int>> cf;
    for (int a = 0; a < cp.n; ++a)
        for (int b = 0; b < cp.n; ++b)
            if (f[cp.at(a, b)]) cf.insert({c1[a], c2[b]});
    if (cf.empty()) {
        v.ok = false;
        v.clause = "ii";
        v.detail = "F is empty on the orbit";
        return v;
    }
    for (int a = 0; a < cp.n; ++a)
        for (int b = 0; b < cp.n; ++b)
            if (!f[cp.at(a, b)] && cf.count({c1[a], c2[b]})) return fail("ii", "F not invariant under E1 x E2", a, b);
    std::map<int, int> fwd, bwd;
    for (auto [x, y] : cf) {
        if (fwd.count(x) && fwd[x] != y) return fail("ii", "F not a function on E1-classes", x, y);
        if (bwd.count(y) && bwd[y] != x) return fail("ii", "F not one to one", x, y);
        fwd[x] = y;
        bwd[y] = x;
    }
    // (iii) no fixed points
    for (int a = 0; a < cp.n; ++a)
        if (f[cp.at(a, a)]) return fail("iii", "F has a fixed point", a, a);
    std::set<int> k1(c1.begin(), c1.end()), k2(c2.begin(), c2.end());
    v.e1_classes = static_cast<int>(k1.size());
    v.e2_classes = static_cast<int>(k2.size());
    v.matched = static_cast<int>(fwd.size());
    for (int c : k1)
        if (!fwd.count(c)) {
            v.partial = true;
            v.unmatched = cp.Y[c];
            break;
        }
    return v;
}

inline std::string saturation_label(const SaturationParams& p)
{
    return "saturation(" + std::to_string(p.window) + "," + std::to_string(p.multiplicity) + "," +
           std::to_string(p.rounds) + ")";
}

/// Candidate I1 for a given I0 inside the base, by size then rank positions.
inline std::vector<std::vector<int>> candidate_I1(const IndexStructure& J, const std::vector<int>& I0, int max_I1)
{
    std::vector<int> base;
    for (int x : J.order())
        if (J.depth(x) == 0) base.push_back(x);
    std::set<int> i0(I0.begin(), I0.end());
    for (int x : I0)
        if (std::find(base.begin(), base.end(), x) == base.end()) throw InputError("I0 outside the context base");
    std::vector<int> rest;
    for (int x : base)
        if (!i0.count(x)) rest.push_back(x);
    std::vector<std::vector<int>> out;
    for (int size = std::max<int>(1, static_cast<int>(I0.size())); size <= max_I1; ++size) {
        int add = size - static_cast<int>(I0.size());
        if (add < 0 || add > static_cast<int>(rest.size())) continue;
        detail::for_each_subset(static_cast<int>(rest.size()), add, [&](const std::vector<int>& idx) {
            std::vector<int> I1 = I0;
            for (int i : idx) I1.push_back(rest[i]);
            out.push_back(detail::by_rank(J, I1));
        });
    }
    return out;
}

/// Common elements of v and w sit at the same positions. In a class without
/// algebraicity such a pair type cannot lie in F: uncrossing and then
/// interpolating a copy z between v and w gives F(z, z).
inline bool aligned_commons(const QfType& tau, int a)
{
    for (int p = 0; p < a; ++p)
        for (int q = 0; q < a; ++q)
            if (p != q && tau.order[p] == tau.order[a + q]) return false;
    return true;
}

struct CandidateStats {
    Tuple t;
    int y_configs = 0;
    int pair_types = 0;
    int seeds = 0;
    int refuted_aligned = 0;
    int refuted_fast = 0;
    int refuted_fixpoint = 0;
    json to_json(const IndexStructure& J) const
    {
        return json{{"t", tuple_names(J, t)},
                    {"y_configs", y_configs},
                    {"pair_types", pair_types},
                    {"seeds", seeds},
                    {"refuted_aligned", refuted_aligned},
                    {"refuted_fast", refuted_fast},
                    {"refuted_fixpoint", refuted_fixpoint}};
    }
};

struct CircleSearchResult {
    std::optional<CircleWitness> witness;
    std::string depth;
    int max_I1 = 0;
    std::vector<int> I0;
    std::vector<CandidateStats> candidates;
    long long compositions = 0;
    std::shared_ptr<const IndexStructure> J;

    json to_json() const
    {
        json c = json::array();
        for (const auto& s : candidates) c.push_back(s.to_json(*J));
        json j{{"verdict", witness ? "Witness" : "None"},
               {"bounds", json{{"I0", tuple_names(*J, I0)}, {"max_I1", max_I1}, {"depth", depth}, {"J_size", J->size()}}},
               {"candidates", c},
               {"compositions", compositions}};
        if (witness) j["witness"] = witness->to_json();
        return j;
    }
};

namespace detail {

/// Runs the fixpoint over every seed of every candidate; stops at the
/// first surviving seed when `stop_at_first`.
template <class OnWitness>
void circle_sweep(const ContextSpec& c, std::shared_ptr<const IndexStructure> Jp, const std::vector<int>& I0,
                  int max_I1, CircleSearchResult& res, OnWitness on_witness, bool interpolate_rule = true)
{
    auto sp = std::make_shared<const OrbitSpace>(Jp);
    const auto& J = *Jp;
    for (const auto& I1 : candidate_I1(J, I0, max_I1)) {
        Tuple s = by_rank(J, I0), t = by_rank(J, I1);
        QfType r = qf_type(t, s, J);
        PairTable T = build_pair_table(sp, r, s);
        CandidateStats st;
        st.t = t;
        st.y_configs = static_cast<int>(T.ycfg.size());
        st.pair_types = static_cast<int>(T.types.size());
        if (T.types.empty()) throw DepthError("orbit of " + tuple_names(J, t).dump() + " empty in J; saturate deeper");
        std::vector<int> seeds;
        for (int x = 0; x < static_cast<int>(T.types.size()); ++x)
            if (x != T.diag) seeds.push_back(x);
        std::vector<std::string> ser(T.types.size());
        for (int x : seeds) ser[x] = T.types[x].serialize();
        std::sort(seeds.begin(), seeds.end(), [&](int a, int b) { return ser[a] < ser[b]; });
        st.seeds = static_cast<int>(seeds.size());
        CircleSolver solver(T);
        bool found = false;
        bool interpolate = interpolate_rule && !J.sig.has_meet;
        for (int tau : seeds) {
            if (interpolate && aligned_commons(T.types[tau], r.arity)) {
                ++st.refuted_aligned;
                continue;
            }
            if (solver.refuted(tau)) {
                ++st.refuted_fast;
                continue;
            }
            if (solver.fast_refute(tau)) {
                ++st.refuted_fast;
                continue;
            }
            auto fp = solver.solve(tau);
            if (fp.refuted) {
                ++st.refuted_fixpoint;
                continue;
            }
            CircleWitness w;
            w.context = c;
            w.J = Jp;
            w.I0 = I0;
            w.I1 = I1;
            w.s = s;
            w.t = t;
            w.r = r;
            for (int x : fp.E1) w.E1.push_back({T.types[x], r.arity});
            for (int x : fp.E2) w.E2.push_back({T.types[x], r.arity});
            for (int x : fp.F) w.F.push_back({T.types[x], r.arity});
            CircleWitness::normalize(w.E1);
            CircleWitness::normalize(w.E2);
            CircleWitness::normalize(w.F);
            found = on_witness(w);
            if (found) break;
        }
        res.compositions += solver.composer().computed();
        res.candidates.push_back(st);
        if (found) return;
    }
}

} // namespace detail

inline CircleSearchResult search_circle_in(const ContextSpec& c, std::shared_ptr<const IndexStructure> Jp,
                                           const std::vector<int>& I0, int max_I1, const std::string& depth,
                                           bool interpolate_rule = true)
{
    if (max_I1 < 1) throw InputError("max_I1 must be positive");
    CircleSearchResult res;
    res.J = Jp;
    res.I0 = I0;
    res.max_I1 = max_I1;
    res.depth = depth;
    detail::circle_sweep(c, Jp, I0, max_I1, res, [&](CircleWitness& w) {
        w.depth = depth;
        res.witness = w;
        return true;
    }, interpolate_rule);
    return res;
}

inline CircleSearchResult search_circle(const ContextSpec& c, const std::vector<int>& I0, int max_I1,
                                        const SaturationParams& p)
{
    auto Jp = std::make_shared<const IndexStructure>(saturate(c.base, c.cls, p));
    return search_circle_in(c, Jp, I0, max_I1, saturation_label(p));
}

// ------------------------------------------------------------ random graph

/// Subsets of the base of size <= bound, by size then rank positions.
inline std::vector<std::vector<int>> i0_sweep(const IndexStructure& J, int bound)
{
    std::vector<int> base;
    for (int x : J.order())
        if (J.depth(x) == 0) base.push_back(x);
    std::vector<std::vector<int>> out;
    for (int k = 0; k <= std::min<int>(bound, static_cast<int>(base.size())); ++k)
        detail::for_each_subset(static_cast<int>(base.size()), k, [&](const std::vector<int>& idx) {
            std::vector<int> I0;
            for (int i : idx) I0.push_back(base[i]);
            out.push_back(I0);
        });
    return out;
}

struct TrgSearchResult {
    bool none_found = true;
    int max_slots = 0;
    std::vector<CircleSearchResult> sweeps;  // one per I0
    long long seeds = 0;                     // pair types x ordered slot pairs
    json to_json() const
    {
        json sw = json::array();
        for (const auto& r : sweeps) sw.push_back(r.to_json());
        return json{{"verdict", none_found ? "NoneFound" : "Found"},
                    {"bounds", json{{"max_slots", max_slots},
                                    {"max_I1", sweeps.empty() ? 0 : sweeps[0].max_I1},
                                    {"depth", sweeps.empty() ? "" : sweeps[0].depth}}},
                    {"seeds", seeds},
                    {"sweeps", sw}};
    }
};

/// Bounded search for a T_rg shearing instance over the context: a coherent
/// equality pattern with a pair type in P_ij (i positive, j negative) and
/// no same-tuple collision. The least pattern containing such a seed has
/// P_ii, P_jj, P_ij equal to the fixpoint E1, E2, F, so the seeds are
/// refuted exactly when the circle fixpoints are.
inline TrgSearchResult trg_superstable_search(const ContextSpec& c, const SaturationParams& p, int i0_bound,
                                              int max_I1, int max_slots)
{
    if (max_slots < 2) throw InputError("trg search: need at least two formula slots");
    if (max_I1 < 1) throw InputError("trg search: max_I1 must be positive");
    if (max_slots > 8 || max_I1 > 4 || i0_bound > 2)
        throw BudgetError("trg search: bounds beyond the hard limit (slots 8, |I1| 4, |I0| 2)");
    auto Jp = std::make_shared<const IndexStructure>(saturate(c.base, c.cls, p));
    TrgSearchResult res;
    res.max_slots = max_slots;
    for (const auto& I0 : i0_sweep(*Jp, i0_bound)) {
        if (static_cast<int>(I0.size()) > max_I1) continue;
        auto sw = search_circle_in(c, Jp, I0, max_I1, saturation_label(p));
        for (const auto& st : sw.candidates)
            res.seeds += static_cast<long long>(st.seeds) * max_slots * (max_slots - 1);
        if (sw.witness) res.none_found = false;
        res.sweeps.push_back(std::move(sw));
        if (!res.none_found) break;
    }
    return res;
}

/// One randomized coherent equality pattern on a small c_{n,k} structure,
/// analysed by trg_collision_analysis and by direct consistency.
struct PatternTrial {
    std::shared_ptr<const IndexStructure> J;
    Tuple s;
    QfType r;
    int L = 0;
    std::vector<int> A, B;
    EqualityPattern pattern;
    ConsistencyCertificate cert;
    bool direct = true;
    bool agree() const { return cert.consistent == direct; }

    json to_json() const
    {
        return json{{"J_size", J->size()},
                    {"s", tuple_names(*J, s)},
                    {"r", r.to_json()},
                    {"slots", L},
                    {"positive", A},
                    {"negative", B},
                    {"certificate", cert.to_json(*J)},
                    {"direct_consistent", direct},
                    {"agree", agree()}};
    }
};

/// Images are shared projections: slot i carries g_i(v restricted to S_i),
/// so equalities depend only on the pair type. Returns nullopt when the
/// drawn orbit is too small.
inline std::optional<PatternTrial> random_pattern_trial(int n, int k, std::mt19937_64& rng, int max_J = 8)
{
    auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto coin = [&](double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; };
    auto ctx = cnk_context(n, k, 3);
    IndexStructure J = ctx.base;
    int extra = uni(0, max_J - J.size());
    for (int e = 0; e < extra; ++e) {
        PointConstraints pc;
        pc.color = uni(0, static_cast<int>(J.sig.colors.size()) - 1);
        auto ord = J.order();
        int at = uni(-1, J.size() - 1);
        pc.lo = at < 0 ? -1 : ord[at];
        pc.hi = at + 1 < J.size() ? ord[at + 1] : -1;
        pc.depth = 1;
        pc.name = "x" + std::to_string(J.size());
        detail::for_each_subset(J.size(), k, [&](const std::vector<int>& idx) {
            if (coin(0.3)) pc.pos.push_back(idx);
        });
        realize_point(J, pc);
    }
    std::vector<int> base;
    for (int x : J.order())
        if (J.depth(x) == 0) base.push_back(x);
    int a = uni(1, 3);
    std::vector<int> pick;
    detail::for_each_subset(3, a, [&](const std::vector<int>& idx) {
        if (pick.empty() || coin(0.5)) pick = idx;
    });
    Tuple t;
    for (int i : pick) t.push_back(base[i]);
    Tuple s;
    for (int x : t)
        if (static_cast<int>(s.size()) + 1 < a && coin(0.3)) s.push_back(x);
    auto Jp = std::make_shared<const IndexStructure>(std::move(J));
    PatternTrial tr;
    tr.J = Jp;
    tr.s = s;
    tr.r = qf_type(t, s, *Jp);
    ParamFamily f = make_family(Jp, s, tr.r);
    if (f.size() < 2) return std::nullopt;
    tr.L = uni(2, 4);
    std::vector<char> positive(tr.L);
    for (int i = 0; i < tr.L; ++i) positive[i] = coin(0.5);
    positive[0] = 1;
    positive[1] = 0;
    for (int i = 0; i < tr.L; ++i) (positive[i] ? tr.A : tr.B).push_back(i);
    // slot -> (function id, projection)
    std::vector<std::pair<int, std::vector<int>>> src(tr.L);
    for (int i = 0; i < tr.L; ++i) {
        std::vector<int> S;
        for (int p = 0; p < a; ++p)
            if (coin(0.6)) S.push_back(p);
        int g = i;
        if (i > 0 && coin(0.5)) {
            int o = uni(0, i - 1);
            bool same_side = positive[o] == positive[i];
            if (same_side || coin(0.2)) g = src[o].first;
        }
        src[i] = {g, S};
    }
    std::map<std::pair<int, Tuple>, int> ids;
    for (const auto& v : f.orbit) {
        Tuple im;
        for (int i = 0; i < tr.L; ++i) {
            Tuple proj;
            for (int p : src[i].second) proj.push_back(v[p]);
            auto key = std::make_pair(src[i].first, proj);
            auto it = ids.find(key);
            if (it == ids.end()) it = ids.emplace(key, static_cast<int>(ids.size())).first;
            im.push_back(it->second);
        }
        f.images.push_back(im);
    }
    tr.pattern = extract_equality_pattern(f);
    tr.cert = trg_collision_analysis(tr.pattern, *Jp, s, tr.r, tr.A, tr.B);
    auto [model, fam] = family_from_pattern(Jp, s, tr.r, tr.pattern, tr.L);
    FormulaTemplate phi;
    phi.slots = tr.L;
    for (int i : tr.A) phi.pos.push_back({i});
    for (int j : tr.B) phi.neg.push_back({j});
    tr.direct = family_consistent_plain(model, orbit_instances(fam, phi));
    return tr;
}

/// Random-graph instance of a witness: b(y) = (sigma1(E1-class), sigma2(E2-class)),
/// the two maps agreeing exactly on F-matched classes; phi = R(x,y0) & ~R(x,y1).
inline ShearingInstance circle_to_shearing(const CircleWitness& w)
{
    auto v = check_circle_witness(w);
    if (!v.ok) throw InputError("circle_to_shearing: witness fails clause " + v.clause + ": " + v.detail);
    const auto& J = *w.J;
    auto cp = detail::concrete_pairs(J, w.r, w.s);
    int nt = static_cast<int>(cp.keys.size());
    auto member = [&](const std::vector<PairQfType>& rel) {
        auto ks = type_keys(rel);
        std::vector<char> in(nt, 0);
        for (int t = 0; t < nt; ++t) in[t] = ks.count(cp.keys[t]) > 0;
        return in;
    };
    auto f = member(w.F);
    auto c1 = detail::classes_of(cp, member(w.E1)), c2 = detail::classes_of(cp, member(w.E2));
    std::map<int, int> fwd, bwd;
    for (int a = 0; a < cp.n; ++a)
        for (int b = 0; b < cp.n; ++b)
            if (f[cp.at(a, b)]) {
                fwd[c1[a]] = c2[b];
                bwd[c2[b]] = c1[a];
            }
    ShearingInstance si;
    si.context = w.context;
    si.J = w.J;
    si.depth = w.depth;
    si.I0 = w.I0;
    si.I1 = w.I1;
    si.s0 = w.s;
    si.t = w.t;
    si.model = ParamModel(TheorySpec::random_graph());
    std::map<int, int> p1, p2;
    for (int a = 0; a < cp.n; ++a) {
        int c = c1[a];
        if (!p1.count(c)) {
            int id = si.model.add_element("u" + std::to_string(p1.size()));
            p1[c] = id;
            if (fwd.count(c)) p2[fwd[c]] = id;
        }
    }
    for (int a = 0; a < cp.n; ++a) {
        int c = c2[a];
        if (!p2.count(c)) p2[c] = si.model.add_element("w" + std::to_string(si.model.size()));
    }
    si.family.J = w.J;
    si.family.s = w.s;
    si.family.r = w.r;
    si.family.orbit = cp.Y;
    for (int a = 0; a < cp.n; ++a) si.family.images.push_back({p1[c1[a]], p2[c2[a]]});
    si.formula.slots = 2;
    si.formula.pos = {{0}};
    si.formula.neg = {{1}};
    return si;
}

/// First F-related pair in orbit order, as (v, w, 0, 1).
struct Collision {
    Tuple v, w;
    int i = 0, j = 1;
};

inline std::optional<Collision> canonical_collision(const ShearingInstance& inst)
{
    const auto& f = inst.family;
    for (int a = 0; a < f.size(); ++a)
        for (int b = 0; b < f.size(); ++b)
            for (const auto& p : inst.formula.pos)
                for (const auto& q : inst.formula.neg)
                    if (f.images[a][p[0]] == f.images[b][q[0]]) return Collision{f.orbit[a], f.orbit[b], p[0], q[0]};
    return std::nullopt;
}

inline CircleWitness extract_circle(const ShearingInstance& inst, const Collision& col)
{
    if (inst.model.theory.kind != TheorySpec::Kind::RandomGraph) throw InputError("extract_circle: needs T_rg");
    auto has = [](const std::vector<Tuple>& v, int i) {
        return std::find(v.begin(), v.end(), Tuple{i}) != v.end();
    };
    if (!has(inst.formula.pos, col.i)) throw InputError("extract_circle: i is not a positive coordinate");
    if (!has(inst.formula.neg, col.j)) throw InputError("extract_circle: j is not a negative coordinate");
    const auto& f = inst.family;
    if (f.index_of(col.v) < 0 || f.index_of(col.w) < 0) throw InputError("extract_circle: collision outside the orbit");
    if (f.image(col.v).at(col.i) != f.image(col.w).at(col.j))
        throw InputError("extract_circle: collision not entailed by the pattern");
    auto pat = extract_equality_pattern(f);
    CircleWitness w;
    w.context = inst.context;
    w.J = inst.J;
    w.depth = inst.depth;
    w.I0 = inst.I0;
    w.I1 = inst.I1;
    w.s = inst.s0;
    w.t = inst.t;
    w.r = f.r;
    for (const auto& [k, e] : pat.entries) {
        if (e.eq.count({col.i, col.i})) w.E1.push_back(e.type);
        if (e.eq.count({col.j, col.j})) w.E2.push_back(e.type);
        if (e.eq.count({col.i, col.j})) w.F.push_back(e.type);
    }
    CircleWitness::normalize(w.E1);
    CircleWitness::normalize(w.E2);
    CircleWitness::normalize(w.F);
    return w;
}

/// Same classes with the roles of E1 and E2 exchanged and F inverted.
inline CircleWitness mirror_witness(const CircleWitness& w)
{
    CircleWitness m = w;
    std::swap(m.E1, m.E2);
    m.F.clear();
    auto cp = detail::concrete_pairs(*w.J, w.r, w.s);
    auto kf = type_keys(w.F);
    std::set<std::string> seen;
    for (int x = 0; x < cp.n; ++x)
        for (int y = 0; y < cp.n; ++y)
            if (kf.count(cp.keys[cp.at(x, y)])) {
                const auto& q = cp.types[cp.at(y, x)];
                if (seen.insert(q.type.key()).second) m.F.push_back(q);
            }
    CircleWitness::normalize(m.F);
    return m;
}

/// The expected linear-order relations for t = (t0, t1): first coordinates
/// equal, second coordinates equal, first of one equal to second of the other.
inline bool linear_shape(const CircleWitness& w)
{
    if (w.r.arity != 2) return false;
    auto cp = detail::concrete_pairs(*w.J, w.r, w.s);
    auto k1 = type_keys(w.E1), k2 = type_keys(w.E2), kf = type_keys(w.F);
    for (int a = 0; a < cp.n; ++a)
        for (int b = 0; b < cp.n; ++b) {
            const auto& k = cp.keys[cp.at(a, b)];
            const auto &x = cp.Y[a], &y = cp.Y[b];
            if ((x[0] == y[0]) != (k1.count(k) > 0)) return false;
            if ((x[1] == y[1]) != (k2.count(k) > 0)) return false;
            if ((x[0] == y[1]) != (kf.count(k) > 0)) return false;
        }
    return true;
}

} // namespace shearlab
