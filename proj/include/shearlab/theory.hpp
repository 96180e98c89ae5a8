#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "qf_type.hpp"

namespace shearlab {

struct TheorySpec {
    enum class Kind { RandomGraph, Hypergraph };
    Kind kind = Kind::RandomGraph;
    int n = 0;
    int k = 0;
    bool non_simple = false;  // T_{n,1}: only for the tree-property demonstration

    static TheorySpec random_graph() { return {}; }
    static TheorySpec hypergraph(int n, int k)
    {
        if (!(n > k && k >= 2)) throw InputError("GENERIC_HYPERGRAPH needs n > k >= 2");
        return {Kind::Hypergraph, n, k, false};
    }
    /// Generic K_{n+1}-free graph.
    static TheorySpec clique_free_graph(int n)
    {
        if (n < 2) throw InputError("clique-free graph needs n >= 2");
        return {Kind::Hypergraph, n, 1, true};
    }

    int edge_arity() const { return kind == Kind::RandomGraph ? 2 : k + 1; }
    int clique_size() const { return kind == Kind::RandomGraph ? 0 : n + 1; }
    bool operator==(const TheorySpec&) const = default;

    json to_json() const
    {
        if (kind == Kind::RandomGraph) return json{{"kind", "RANDOM_GRAPH"}};
        return json{{"kind", "GENERIC_HYPERGRAPH"}, {"n", n}, {"k", k}, {"non_simple", non_simple}};
    }
    static TheorySpec from_json(const json& j)
    {
        if (j.at("kind") == "RANDOM_GRAPH") return random_graph();
        int n = j.at("n").get<int>(), k = j.at("k").get<int>();
        return k == 1 ? clique_free_graph(n) : hypergraph(n, k);
    }
    std::string label() const
    {
        if (kind == Kind::RandomGraph) return "T_rg";
        return "T_{" + std::to_string(n) + "," + std::to_string(k) + "}";
    }
};

/// Finite parameter model: elements 0..size()-1 with a positive R-diagram.
class ParamModel {
public:
    TheorySpec theory;

    ParamModel() = default;
    explicit ParamModel(TheorySpec t) : theory(t) {}

    int size() const { return static_cast<int>(names_.size()); }
    const std::string& name(int x) const { return names_[x]; }
    int add_element(std::string nm)
    {
        names_.push_back(std::move(nm));
        return size() - 1;
    }
    void add_edge(Tuple e)
    {
        std::sort(e.begin(), e.end());
        if (static_cast<int>(e.size()) != theory.edge_arity()) throw InputError("ParamModel: edge arity");
        for (size_t i = 1; i < e.size(); ++i)
            if (e[i] == e[i - 1]) throw InputError("ParamModel: reflexive edge");
        if (lookup_.insert(e).second) diagram_.insert(std::move(e));
    }
    bool has_edge_sorted(const Tuple& e) const { return lookup_.count(e) > 0; }
    const std::set<Tuple>& diagram() const { return diagram_; }

    /// An (n+1)-clique in the diagram, if any.
    std::optional<Tuple> clique() const
    {
        if (theory.clique_size() == 0) return std::nullopt;
        std::vector<Tuple> es(diagram_.begin(), diagram_.end());
        std::optional<Tuple> out;
        for_each_clique_in(es, theory.edge_arity(), theory.clique_size(), [](const Tuple&) { return true; },
                           [&](const Tuple& c) {
                               out = c;
                               return true;
                           });
        return out;
    }

    json to_json() const
    {
        json el = json::array(), ed = json::array();
        for (const auto& n : names_) el.push_back(n);
        for (const auto& e : diagram_) {
            json je = json::array();
            for (int x : e) je.push_back(names_[x]);
            ed.push_back(je);
        }
        return json{{"theory", theory.to_json()}, {"elements", el}, {"edges", ed}};
    }
    static ParamModel from_json(const json& j)
    {
        ParamModel m(TheorySpec::from_json(j.at("theory")));
        std::map<std::string, int> id;
        for (const auto& e : j.at("elements")) {
            auto nm = e.get<std::string>();
            if (id.count(nm)) throw InputError("duplicate parameter name " + nm);
            id[nm] = m.add_element(nm);
        }
        for (const auto& e : j.at("edges")) {
            Tuple t;
            for (const auto& x : e) {
                auto it = id.find(x.get<std::string>());
                if (it == id.end()) throw InputError("edge mentions unknown parameter");
                t.push_back(it->second);
            }
            m.add_edge(t);
        }
        return m;
    }
    int find(const std::string& nm) const
    {
        for (int x = 0; x < size(); ++x)
            if (names_[x] == nm) return x;
        return -1;
    }

private:
    std::vector<std::string> names_;
    std::set<Tuple> diagram_;
    std::unordered_set<Tuple, TupleHash> lookup_;
};

struct FormulaTemplate {
    int slots = 0;
    std::vector<Tuple> pos;  // slot tuples of size edge_arity-1
    std::vector<Tuple> neg;
    std::vector<int> neq;
    bool operator==(const FormulaTemplate&) const = default;

    json to_json() const { return json{{"slots", slots}, {"pos", pos}, {"neg", neg}, {"neq", neq}}; }
    static FormulaTemplate from_json(const json& j)
    {
        FormulaTemplate f;
        f.slots = j.at("slots").get<int>();
        f.pos = j.value("pos", std::vector<Tuple>{});
        f.neg = j.value("neg", std::vector<Tuple>{});
        f.neq = j.value("neq", std::vector<int>{});
        return f;
    }
};

struct FormulaInstance {
    FormulaTemplate tpl;
    Tuple binding;
};

/// Literal demands on the witness x after binding. Tuples are sorted.
struct Demands {
    std::set<Tuple> pos;
    std::set<Tuple> neg;
    bool degenerate_pos = false;  // R(x, a, a): unsatisfiable
};

inline void check_instance(const ParamModel& m, const FormulaInstance& f)
{
    if (static_cast<int>(f.binding.size()) != f.tpl.slots) throw InputError("binding not total on slots");
    for (int x : f.binding)
        if (x < 0 || x >= m.size()) throw InputError("binding outside the model");
    int need = m.theory.edge_arity() - 1;
    auto chk = [&](const std::vector<Tuple>& atoms) {
        for (const auto& a : atoms) {
            if (static_cast<int>(a.size()) != need) throw InputError("atom arity does not match the theory");
            for (int s : a)
                if (s < 0 || s >= f.tpl.slots) throw InputError("atom slot out of range");
        }
    };
    chk(f.tpl.pos);
    chk(f.tpl.neg);
}

inline Tuple bind(const Tuple& atom, const Tuple& binding)
{
    Tuple t;
    for (int s : atom) t.push_back(binding[s]);
    std::sort(t.begin(), t.end());
    return t;
}

inline bool has_repeat(const Tuple& sorted)
{
    for (size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i] == sorted[i - 1]) return true;
    return false;
}

inline void add_demands(Demands& d, const FormulaInstance& f)
{
    for (const auto& a : f.tpl.pos) {
        Tuple t = bind(a, f.binding);
        if (has_repeat(t)) d.degenerate_pos = true;
        else d.pos.insert(t);
    }
    for (const auto& a : f.tpl.neg) {
        Tuple t = bind(a, f.binding);
        if (!has_repeat(t)) d.neg.insert(t);
    }
}

namespace detail {

/// Every k-subset of cur containing its last element is in `pos`.
inline bool last_ksets_in(const Tuple& cur, int k, const std::set<Tuple>& pos)
{
    int c = static_cast<int>(cur.size());
    if (c < k) return true;
    bool ok = true;
    for_each_subset(c - 1, k - 1, [&](const std::vector<int>& idx) {
        if (!ok) return;
        Tuple t;
        for (int i : idx) t.push_back(cur[i]);
        t.push_back(cur.back());
        std::sort(t.begin(), t.end());
        if (!pos.count(t)) ok = false;
    });
    return ok;
}

/// Calls f(S) for every n-set S whose (k+1)-subsets are edges of m and whose
/// k-subsets all lie in `pos`.
template <class F>
void for_each_forced_clique(const ParamModel& m, const std::set<Tuple>& pos, F f)
{
    if (m.theory.clique_size() == 0 || pos.empty()) return;
    int n = m.theory.n, k = m.theory.k;
    std::set<int> ps;
    for (const auto& t : pos) ps.insert(t.begin(), t.end());
    std::vector<Tuple> es;
    for (const auto& e : m.diagram())
        if (std::all_of(e.begin(), e.end(), [&](int x) { return ps.count(x) > 0; })) es.push_back(e);
    for_each_clique_in(es, k + 1, n, [&](const Tuple& cur) { return last_ksets_in(cur, k, pos); },
                       [&](const Tuple& S) { return f(S); });
}

} // namespace detail

/// An n-set S all of whose k-subsets are demanded and (k+1)-subsets are edges.
inline std::optional<Tuple> forced_clique(const ParamModel& m, const std::set<Tuple>& pos)
{
    std::optional<Tuple> out;
    detail::for_each_forced_clique(m, pos, [&](const Tuple& S) {
        out = S;
        return true;
    });
    return out;
}

inline bool demands_consistent(const ParamModel& m, const Demands& d)
{
    if (d.degenerate_pos) return false;
    for (const auto& t : d.pos)
        if (d.neg.count(t)) return false;
    return !forced_clique(m, d.pos).has_value();
}

inline bool instance_consistent(const ParamModel& m, const FormulaInstance& f)
{
    check_instance(m, f);
    Demands d;
    add_demands(d, f);
    return demands_consistent(m, d);
}

struct FamilyVerdict {
    bool consistent = true;
    std::vector<int> core;  // indices into the family, ascending
    bool core_bound_exceeded = false;
    std::string conflict;   // human-readable description of the contradiction
};

namespace detail {

/// Lexicographically least cover of minimum size. `providers[d]` lists the
/// (ascending) instances providing demand d; returns nullopt if size > bound.
inline std::optional<std::vector<int>> min_cover(const std::vector<std::vector<int>>& providers, int bound)
{
    int nd = static_cast<int>(providers.size());
    for (const auto& p : providers)
        if (p.empty()) return std::nullopt;
    std::map<int, std::vector<int>> covers;  // instance -> demands
    for (int d = 0; d < nd; ++d)
        for (int i : providers[d]) covers[i].push_back(d);
    // feasibility: can demands not in `done` be covered by <= r instances > after?
    auto feasible = [&](auto&& self, std::vector<char>& done, int r, int after) -> bool {
        int first = -1;
        for (int d = 0; d < nd; ++d)
            if (!done[d]) {
                first = d;
                break;
            }
        if (first < 0) return true;
        if (r == 0) return false;
        for (int i : providers[first]) {
            if (i <= after) continue;
            std::vector<int> flipped;
            for (int d : covers[i])
                if (!done[d]) {
                    done[d] = 1;
                    flipped.push_back(d);
                }
            // remaining picks must also be > after, not necessarily > i
            bool ok = self(self, done, r - 1, after);
            for (int d : flipped) done[d] = 0;
            if (ok) return true;
        }
        return false;
    };
    int size = -1;
    for (int s = 1; s <= std::min(bound, nd); ++s) {
        std::vector<char> done(nd, 0);
        if (feasible(feasible, done, s, -1)) {
            size = s;
            break;
        }
    }
    if (size < 0) return std::nullopt;
    // build the lexicographically least sorted cover of that size
    std::vector<int> cand;
    for (auto& [i, ds] : covers) cand.push_back(i);
    std::vector<int> chosen;
    std::vector<char> done(nd, 0);
    int last = -1;
    for (int pos = 0; pos < size; ++pos) {
        bool placed = false;
        for (int i : cand) {
            if (i <= last) continue;
            std::vector<int> flipped;
            for (int d : covers[i])
                if (!done[d]) {
                    done[d] = 1;
                    flipped.push_back(d);
                }
            if (feasible(feasible, done, size - pos - 1, i)) {
                chosen.push_back(i);
                last = i;
                placed = true;
                break;
            }
            for (int d : flipped) done[d] = 0;
        }
        if (!placed) return std::nullopt;
        bool all = std::all_of(done.begin(), done.end(), [](char c) { return c; });
        if (all) break;
    }
    return chosen;
}

} // namespace detail

/// Consistency of the union of the instances; when inconsistent, a minimal core
/// (smallest size first, then lexicographically least).
inline FamilyVerdict family_consistent(const ParamModel& m, const std::vector<FormulaInstance>& fam, int core_bound)
{
    FamilyVerdict v;
    Demands all;
    std::map<Tuple, std::vector<int>> pos_by, neg_by;
    std::vector<int> degenerate;
    for (int i = 0; i < static_cast<int>(fam.size()); ++i) {
        check_instance(m, fam[i]);
        Demands d;
        add_demands(d, fam[i]);
        if (d.degenerate_pos) degenerate.push_back(i);
        for (const auto& t : d.pos) pos_by[t].push_back(i);
        for (const auto& t : d.neg) neg_by[t].push_back(i);
        all.pos.insert(d.pos.begin(), d.pos.end());
        all.neg.insert(d.neg.begin(), d.neg.end());
        all.degenerate_pos |= d.degenerate_pos;
    }
    if (demands_consistent(m, all)) return v;
    v.consistent = false;

    std::optional<std::vector<int>> best;
    std::string best_desc;
    auto offer = [&](std::vector<int> c, std::string desc) {
        std::sort(c.begin(), c.end());
        if (!best || c.size() < best->size() || (c.size() == best->size() && c < *best)) {
            best = c;
            best_desc = std::move(desc);
        }
    };
    if (!degenerate.empty()) offer({degenerate.front()}, "positive literal on a repeated tuple");
    for (const auto& [t, ps] : pos_by) {
        auto it = neg_by.find(t);
        if (it == neg_by.end()) continue;
        const auto& ns = it->second;
        std::vector<int> both;
        std::set_intersection(ps.begin(), ps.end(), ns.begin(), ns.end(), std::back_inserter(both));
        if (!both.empty()) offer({both.front()}, "positive/negative collision");
        else offer({ps.front(), ns.front()}, "positive/negative collision");
    }
    // every forced clique
    if (m.theory.clique_size() > 0) {
        int k = m.theory.k;
        std::set<Tuple> pos;
        for (const auto& [t, is] : pos_by) pos.insert(t);
        std::vector<Tuple> cliques;
        detail::for_each_forced_clique(m, pos, [&](const Tuple& S) {
            cliques.push_back(S);
            return false;
        });
        for (const auto& S : cliques) {
            std::vector<std::vector<int>> providers;
            std::vector<int> idx(k);
            for (int i = 0; i < k; ++i) idx[i] = i;
            int c = static_cast<int>(S.size());
            while (true) {
                Tuple t;
                for (int i : idx) t.push_back(S[i]);
                providers.push_back(pos_by[t]);
                int i = k - 1;
                while (i >= 0 && idx[i] == c - 1 - (k - 1 - i)) --i;
                if (i < 0) break;
                ++idx[i];
                for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            }
            int cap = best ? static_cast<int>(best->size()) : static_cast<int>(providers.size());
            if (auto cov = detail::min_cover(providers, cap)) {
                std::string d = "clique {";
                for (size_t i = 0; i < S.size(); ++i) d += (i ? "," : "") + m.name(S[i]);
                offer(*cov, d + "} completed by x");
            }
        }
    }
    if (!best) {
        v.core_bound_exceeded = true;
        v.conflict = "inconsistent but no core found";
        return v;
    }
    if (static_cast<int>(best->size()) > core_bound) {
        v.core_bound_exceeded = true;
        v.conflict = best_desc;
        return v;
    }
    v.core = *best;
    v.conflict = best_desc;
    return v;
}

inline bool family_consistent_plain(const ParamModel& m, const std::vector<FormulaInstance>& fam)
{
    Demands all;
    for (const auto& f : fam) {
        check_instance(m, f);
        add_demands(all, f);
    }
    return demands_consistent(m, all);
}

inline int oracle_size_limit()
{
    return 10;
}

/// Exhaustive one-point extension search: a fresh x, every sign assignment on
/// the new tuples {x} u T, checked against the literals and the clique axiom.
inline bool brute_force_consistency_oracle(const ParamModel& m, const Demands& d)
{
    if (m.size() > oracle_size_limit())
        throw BudgetError("oracle refuses models with more than " + std::to_string(oracle_size_limit()) + " elements");
    if (d.degenerate_pos) return false;
    int M = m.size(), x = M;
    int k = m.theory.edge_arity() - 1;
    // new tuples
    std::vector<Tuple> news;
    {
        std::vector<int> idx(k);
        for (int i = 0; i < k; ++i) idx[i] = i;
        if (k <= M) {
            while (true) {
                Tuple t;
                for (int i : idx) t.push_back(i);
                news.push_back(t);
                int i = k - 1;
                while (i >= 0 && idx[i] == M - k + i) --i;
                if (i < 0) break;
                ++idx[i];
                for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            }
        }
    }
    int nn = static_cast<int>(news.size());
    std::vector<int> sign(nn, -1);  // -1 unset, 0 absent, 1 present
    for (int i = 0; i < nn; ++i) {
        bool p = d.pos.count(news[i]) > 0, q = d.neg.count(news[i]) > 0;
        if (p && q) return false;
        if (p) sign[i] = 1;
        if (q) sign[i] = 0;
    }
    std::map<Tuple, int> where;
    for (int i = 0; i < nn; ++i) where[news[i]] = i;
    int cs = m.theory.clique_size();
    int ar = m.theory.edge_arity();
    auto edge = [&](const Tuple& e) -> bool {
        if (e.back() == x) {
            Tuple t(e.begin(), e.end() - 1);
            return sign[where[t]] == 1;
        }
        return m.has_edge_sorted(e);
    };
    // axiom: no cs-subset of M+1 elements with all ar-subsets edges
    auto axioms_ok = [&]() {
        if (cs == 0) return true;
        std::vector<int> all(M + 1);
        for (int i = 0; i <= M; ++i) all[i] = i;
        bool bad = false;
        std::vector<int> idx(cs);
        for (int i = 0; i < cs; ++i) idx[i] = i;
        if (cs > M + 1) return true;
        while (!bad) {
            Tuple S;
            for (int i : idx) S.push_back(all[i]);
            bool clique = true;
            std::vector<int> j2(ar);
            for (int i = 0; i < ar; ++i) j2[i] = i;
            while (clique) {
                Tuple e;
                for (int i : j2) e.push_back(S[i]);
                if (!edge(e)) clique = false;
                int i = ar - 1;
                while (i >= 0 && j2[i] == cs - ar + i) --i;
                if (i < 0) break;
                ++j2[i];
                for (int j = i + 1; j < ar; ++j) j2[j] = j2[j - 1] + 1;
            }
            if (clique) bad = true;
            int i = cs - 1;
            while (i >= 0 && idx[i] == M + 1 - cs + i) --i;
            if (i < 0) break;
            ++idx[i];
            for (int j = i + 1; j < cs; ++j) idx[j] = idx[j - 1] + 1;
        }
        return !bad;
    };
    std::vector<int> free;
    for (int i = 0; i < nn; ++i)
        if (sign[i] < 0) free.push_back(i);
    for (int i : free) sign[i] = 0;
    auto rec = [&](auto&& self, size_t at) -> bool {
        if (!axioms_ok()) return false;  // adding edges never removes a clique
        if (at == free.size()) return true;
        int i = free[at];
        sign[i] = 0;
        if (self(self, at + 1)) return true;
        sign[i] = 1;
        bool r = self(self, at + 1);
        sign[i] = 0;
        return r;
    };
    return rec(rec, 0);
}

inline bool brute_force_consistency_oracle(const ParamModel& m, const FormulaInstance& f)
{
    check_instance(m, f);
    Demands d;
    add_demands(d, f);
    return brute_force_consistency_oracle(m, d);
}

inline bool brute_force_consistency_oracle(const ParamModel& m, const std::vector<FormulaInstance>& fam)
{
    Demands d;
    for (const auto& f : fam) {
        check_instance(m, f);
        add_demands(d, f);
    }
    return brute_force_consistency_oracle(m, d);
}

/// Random clique-free model of size 1..max_size and a random literal
/// instance over it; bindings may repeat parameters.
inline std::pair<ParamModel, FormulaInstance> random_instance(const TheorySpec& th, int max_size, std::mt19937_64& rng)
{
    auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto coin = [&](double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; };
    int n = uni(1, max_size), ar = th.edge_arity();
    std::vector<Tuple> edges;
    detail::for_each_subset(n, ar, [&](const std::vector<int>& idx) {
        if (coin(0.45)) edges.push_back(idx);
    });
    ParamModel m(th);
    for (int i = 0; i < n; ++i) m.add_element("a" + std::to_string(i));
    for (const auto& e : edges) {
        ParamModel trial = m;
        trial.add_edge(e);
        if (!trial.clique()) m = trial;
    }
    FormulaInstance f;
    f.tpl.slots = uni(ar - 1, std::max(ar - 1, 4));
    for (int i = 0; i < f.tpl.slots; ++i) f.binding.push_back(uni(0, n - 1));
    int lits = uni(1, 4);
    for (int l = 0; l < lits; ++l) {
        Tuple t;
        for (int i = 0; i < ar - 1; ++i) t.push_back(uni(0, f.tpl.slots - 1));
        (coin(0.5) ? f.tpl.pos : f.tpl.neg).push_back(t);
    }
    if (coin(0.3)) f.tpl.neq.push_back(uni(0, f.tpl.slots - 1));
    return {m, f};
}

/// Complement-of-matching sequence: a^s_i R a^t_j iff s != t and i != j, with
/// instances  AND_s R(x, a^s_i)  in the generic K_{n+1}-free graph.
inline std::pair<ParamModel, std::vector<FormulaInstance>> tp_sequence_triangle_free(int n, int length)
{
    if (n < 2 || length < 1) throw InputError("tp_sequence: need n >= 2, length >= 1");
    ParamModel m(TheorySpec::clique_free_graph(n));
    std::vector<std::vector<int>> a(length, std::vector<int>(n));
    for (int i = 0; i < length; ++i)
        for (int s = 0; s < n; ++s) a[i][s] = m.add_element("a" + std::to_string(s) + "_" + std::to_string(i));
    for (int i = 0; i < length; ++i)
        for (int j = 0; j < length; ++j)
            for (int s = 0; s < n; ++s)
                for (int t = 0; t < n; ++t)
                    if (i < j && s != t) m.add_edge({a[i][s], a[j][t]});
    FormulaTemplate tpl;
    tpl.slots = n;
    for (int s = 0; s < n; ++s) tpl.pos.push_back({s});
    std::vector<FormulaInstance> inst;
    for (int i = 0; i < length; ++i) inst.push_back({tpl, a[i]});
    return {m, inst};
}

} // namespace shearlab
