#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qf_type.hpp"

namespace shearlab {

struct SaturationParams {
    int window = 3;
    int multiplicity = 2;
    int rounds = 2;
    bool operator==(const SaturationParams&) const = default;
    json to_json() const { return json{{"window", window}, {"multiplicity", multiplicity}, {"rounds", rounds}}; }
};

inline int growth_limit()
{
    if (const char* e = std::getenv("SHEARLAB_MAX_ELEMENTS")) return std::max(1, std::atoi(e));
    return 20000;
}

namespace detail {

inline std::vector<std::vector<int>> subsets_upto(const std::vector<int>& pool, int maxk)
{
    std::vector<std::vector<int>> out;
    for (int k = std::min<int>(maxk, static_cast<int>(pool.size())); k >= 0; --k)
        for_each_subset(static_cast<int>(pool.size()), k, [&](const std::vector<int>& idx) {
            std::vector<int> s;
            for (int i : idx) s.push_back(pool[i]);
            out.push_back(s);
        });
    return out;
}

/// k-subsets of `base` (ids, sorted by id inside each subset).
inline std::vector<Tuple> ksubsets(const std::vector<int>& base, int k)
{
    std::vector<Tuple> out;
    for_each_subset(static_cast<int>(base.size()), k, [&](const std::vector<int>& idx) {
        Tuple t;
        for (int i : idx) t.push_back(base[i]);
        std::sort(t.begin(), t.end());
        out.push_back(t);
    });
    return out;
}

/// Bitmask of T in `ks` such that {x} u T is an edge.
inline uint64_t pattern_of(const IndexStructure& J, int x, const std::vector<Tuple>& ks)
{
    uint64_t m = 0;
    Tuple e;
    for (size_t i = 0; i < ks.size(); ++i) {
        if (std::find(ks[i].begin(), ks[i].end(), x) != ks[i].end()) continue;
        e = ks[i];
        e.push_back(x);
        std::sort(e.begin(), e.end());
        if (J.has_edge_sorted(e)) m |= uint64_t(1) << i;
    }
    return m;
}

/// Would a fresh point joined exactly to the k-sets `pos` complete a clique?
inline std::optional<Tuple> completes_clique(const IndexStructure& J, const std::vector<Tuple>& pos)
{
    if (!J.sig.edge_arity || !J.sig.clique_bound || pos.empty()) return std::nullopt;
    int ar = *J.sig.edge_arity;
    int n = *J.sig.clique_bound - 1;
    std::set<int> poolset;
    std::set<Tuple> posset;
    for (auto t : pos) {
        std::sort(t.begin(), t.end());
        poolset.insert(t.begin(), t.end());
        posset.insert(t);
    }
    std::vector<int> pool(poolset.begin(), poolset.end());
    // S must have every (k+1)-subset an edge and every k-subset demanded
    std::optional<Tuple> out;
    Tuple cur;
    auto ok_last = [&]() {
        int m = static_cast<int>(cur.size());
        bool ok = true;
        if (m >= ar - 1) {
            for_each_subset(m - 1, ar - 2, [&](const std::vector<int>& idx) {
                if (!ok) return;
                Tuple t;
                for (int i : idx) t.push_back(cur[i]);
                t.push_back(cur.back());
                std::sort(t.begin(), t.end());
                if (!posset.count(t)) ok = false;
            });
        }
        if (ok && m >= ar) {
            for_each_subset(m - 1, ar - 1, [&](const std::vector<int>& idx) {
                if (!ok) return;
                Tuple t;
                for (int i : idx) t.push_back(cur[i]);
                t.push_back(cur.back());
                std::sort(t.begin(), t.end());
                if (!J.has_edge_sorted(t)) ok = false;
            });
        }
        return ok;
    };
    auto rec = [&](auto&& self, size_t from) -> bool {
        if (static_cast<int>(cur.size()) == n) {
            out = cur;
            return true;
        }
        for (size_t i = from; i < pool.size(); ++i) {
            cur.push_back(pool[i]);
            if (ok_last() && self(self, i + 1)) return true;
            cur.pop_back();
        }
        return false;
    };
    rec(rec, 0);
    return out;
}

} // namespace detail

/// Constraints for one new point: strictly between lo and hi (-1 = unbounded),
/// with a color and signed incidence demands over k-sets of existing elements.
struct PointConstraints {
    int lo = -1;
    int hi = -1;
    int color = 0;
    std::vector<Tuple> pos;
    std::vector<Tuple> neg;
    bool place_high = false;  // default: immediately above lo
    std::string name;
    int depth = 0;
};

/// Adds the point and returns its id, or nullopt when the positive demands
/// would complete a forbidden clique.
inline std::optional<int> realize_point(IndexStructure& J, const PointConstraints& c)
{
    if (c.color < 0 || c.color >= static_cast<int>(J.sig.colors.size()))
        throw InputError("realize_point: unknown color");
    if (c.lo >= J.size() || c.hi >= J.size()) throw InputError("realize_point: unknown bound");
    if (c.lo >= 0 && c.hi >= 0 && !J.less(c.lo, c.hi)) throw InputError("realize_point: empty interval");
    int ar = J.sig.edge_arity.value_or(0);
    std::set<Tuple> pos, neg;
    for (auto t : c.pos) {
        std::sort(t.begin(), t.end());
        if (ar == 0 || static_cast<int>(t.size()) != ar - 1) throw InputError("realize_point: demand arity");
        check_elements(J, t);
        for (size_t i = 1; i < t.size(); ++i)
            if (t[i] == t[i - 1]) throw InputError("realize_point: repeated element in demand");
        pos.insert(t);
    }
    for (auto t : c.neg) {
        std::sort(t.begin(), t.end());
        if (pos.count(t)) throw InputError("realize_point: conflicting signs");
        neg.insert(t);
    }
    std::vector<Tuple> pv(pos.begin(), pos.end());
    if (detail::completes_clique(J, pv)) return std::nullopt;
    int at;
    if (c.place_high && c.hi >= 0) at = J.rank(c.hi);
    else if (c.lo >= 0) at = J.rank(c.lo) + 1;
    else if (c.hi >= 0) at = J.rank(c.hi);
    else at = 0;
    std::string nm = c.name.empty() ? "x" + std::to_string(J.size()) : c.name;
    int x = J.add_element(nm, c.color, at, c.depth);
    for (auto t : pv) {
        t.push_back(x);
        J.add_edge(t);
    }
    return x;
}

/// Finite saturation in the anchored fragment: depth-0 elements are anchors;
/// round j realizes, over every base of size <= window from depth < j, every
/// consistent 1-point type whose incidences lie on anchor k-sets of the base,
/// at least `multiplicity` times.
inline IndexStructure saturate(const IndexStructure& I, const ClassSpec& kind, const SaturationParams& p)
{
    if (p.window < 1 || p.multiplicity < 1 || p.rounds < 1) throw InputError("saturation params must be >= 1");
    auto rep = validate_structure(I, kind);
    if (!rep.ok()) throw InputError("saturate: input invalid: " + rep.violations.front());
    IndexStructure J = I;
    if (J.sig.colors.empty()) return J;
    int limit = growth_limit();
    int ar = J.sig.edge_arity.value_or(0);
    int kk = ar > 0 ? ar - 1 : 0;
    int ncl = J.sig.clique_bound.value_or(0) - 1;
    std::vector<int> anchors;
    for (int x = 0; x < J.size(); ++x)
        if (J.depth(x) == 0) anchors.push_back(x);
    std::sort(anchors.begin(), anchors.end(), [&](int a, int b) { return J.less(a, b); });
    int counter = 0;
    for (int round = 1; round <= p.rounds; ++round) {
        std::vector<int> nb;
        for (int x = 0; x < J.size(); ++x)
            if (J.depth(x) > 0 && J.depth(x) < round) nb.push_back(x);
        struct Demand {
            int lo, hi;
            int color;
            std::vector<Tuple> ks;
            uint64_t pat;
        };
        std::vector<Demand> demands;
        for (const auto& ab0 : detail::subsets_upto(anchors, p.window)) {
            std::vector<int> ab = ab0;
            std::sort(ab.begin(), ab.end(), [&](int a, int b) { return J.less(a, b); });
            int f = p.window - static_cast<int>(ab.size());
            std::set<std::pair<int, int>> iv;
            auto gaps = [&](std::vector<int> seq) {
                std::sort(seq.begin(), seq.end(), [&](int a, int b) { return J.less(a, b); });
                int prev = -1;
                for (int x : seq) {
                    iv.insert({prev, x});
                    prev = x;
                }
                iv.insert({prev, -1});
            };
            if (f >= 2) {
                std::vector<int> seq = ab;
                seq.insert(seq.end(), nb.begin(), nb.end());
                gaps(seq);
            } else {
                gaps(ab);
                if (f == 1)
                    for (int y : nb) {
                        int pr = -1, su = -1;
                        for (int a : ab) {
                            if (J.less(a, y)) pr = a;
                            else if (su < 0) su = a;
                        }
                        iv.insert({pr, y});
                        iv.insert({y, su});
                    }
            }
            std::vector<Tuple> ks;
            if (kk > 0) {
                std::vector<int> abid = ab;
                std::sort(abid.begin(), abid.end());
                ks = detail::ksubsets(abid, kk);
            }
            int nbits = static_cast<int>(ks.size());
            if (nbits > 20) throw BudgetError("saturate: window too large for incidence patterns");
            std::vector<uint64_t> pats;
            for (uint64_t m = 0; m < (uint64_t(1) << nbits); ++m) {
                std::vector<Tuple> pos;
                for (int i = 0; i < nbits; ++i)
                    if (m >> i & 1) pos.push_back(ks[i]);
                if (ncl > 0 && detail::completes_clique(J, pos)) continue;
                pats.push_back(m);
            }
            // deterministic: intervals by rank of endpoints
            std::vector<std::pair<int, int>> ivs(iv.begin(), iv.end());
            std::sort(ivs.begin(), ivs.end(), [&](auto a, auto b) {
                auto key = [&](std::pair<int, int> q) {
                    return std::pair<int, int>(q.first < 0 ? -1 : J.rank(q.first), q.second < 0 ? 1 << 30 : J.rank(q.second));
                };
                return key(a) < key(b);
            });
            for (auto [lo, hi] : ivs)
                for (int c = 0; c < static_cast<int>(J.sig.colors.size()); ++c)
                    for (uint64_t m : pats) demands.push_back({lo, hi, c, ks, m});
        }
        for (int copy = 1; copy <= p.multiplicity; ++copy) {
            for (const auto& d : demands) {
                auto ord = J.order();
                int a = d.lo < 0 ? 0 : J.rank(d.lo) + 1;
                int b = d.hi < 0 ? J.size() : J.rank(d.hi);
                int have = 0;
                for (int i = a; i < b && have < copy; ++i) {
                    int x = ord[i];
                    if (J.color(x) != d.color) continue;
                    if (!d.ks.empty() && detail::pattern_of(J, x, d.ks) != d.pat) continue;
                    ++have;
                }
                if (have >= copy) continue;
                if (J.size() >= limit)
                    throw BudgetError("saturate: growth limit " + std::to_string(limit) +
                                      " reached realizing a color-" + J.sig.colors[d.color] + " type in round " +
                                      std::to_string(round));
                int at = (a + b) / 2;
                int x = J.add_element("n" + std::to_string(round) + "_" + std::to_string(counter++), d.color, at, round);
                for (size_t i = 0; i < d.ks.size(); ++i)
                    if (d.pat >> i & 1) {
                        Tuple e = d.ks[i];
                        e.push_back(x);
                        J.add_edge(e);
                    }
            }
        }
    }
    return J;
}

/// True iff saturate(J, kind, p) would add nothing.
inline bool is_saturated(const IndexStructure& J, const ClassSpec& kind, const SaturationParams& p)
{
    return saturate(J, kind, p).size() == J.size();
}

struct ConditionReport {
    bool nontrivial = false;
    bool reasonable = false;
    bool non_1_trivial = false;
    std::vector<std::string> notes;
    SaturationParams depth;
    json to_json() const
    {
        return json{{"label", "APPROXIMATE"},
                    {"nontrivial", nontrivial},
                    {"reasonable", reasonable},
                    {"non_1_trivial", non_1_trivial},
                    {"notes", notes},
                    {"saturation", depth.to_json()}};
    }
};

/// Finite-scale reading of the context conditions. Closure of a tuple is its
/// range (the only function symbol in scope is the branch meet, i.e. min).
inline ConditionReport check_context_conditions(const ContextSpec& c, const SaturationParams& p)
{
    ConditionReport r;
    r.depth = p;
    const IndexStructure& I = c.base;
    int n = I.size();
    r.nontrivial = n >= 2;
    if (!r.nontrivial) r.notes.push_back("nontrivial: I is the closure of a single point or empty");
    IndexStructure J = saturate(I, c.cls, p);
    r.reasonable = true;
    r.non_1_trivial = true;
    std::vector<int> ids(n);
    for (int i = 0; i < n; ++i) ids[i] = i;
    for (const auto& sub : detail::subsets_upto(ids, p.window)) {
        Tuple t = sub;
        std::sort(t.begin(), t.end(), [&](int a, int b) { return I.less(a, b); });
        std::map<std::string, std::vector<int>> groups;
        for (int x = 0; x < J.size(); ++x) groups[qf_type({x}, t, J).serialize()].push_back(x);
        for (auto& [k, xs] : groups) {
            bool in_cl = xs.size() == 1 && std::find(t.begin(), t.end(), xs[0]) != t.end();
            if (in_cl) continue;
            if (xs.size() == 1 && r.reasonable) {
                r.reasonable = false;
                r.notes.push_back("reasonable: " + J.name(xs[0]) + " is the unique realization of its type");
            }
            if (static_cast<int>(xs.size()) < p.multiplicity && r.non_1_trivial) {
                r.non_1_trivial = false;
                r.notes.push_back("non-1-trivial: " + J.name(xs[0]) + " has fewer than multiplicity companions");
            }
        }
    }
    return r;
}

} // namespace shearlab
