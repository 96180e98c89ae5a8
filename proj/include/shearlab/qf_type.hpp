#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "index_structure.hpp"

namespace shearlab {

/// Quantifier-free type of a tuple over a base tuple. Positions 0..arity-1 are
/// the tuple, arity..arity+base_arity-1 the base.
struct QfType {
    int arity = 0;
    int base_arity = 0;
    int edge_arity = 0;  // 0 when the signature has no edge
    std::vector<int> order;            // dense weak ranks; equal rank = same element
    std::vector<std::string> colors;
    std::vector<Tuple> incidences;     // sorted position sets carrying an edge
    std::vector<int> meet;             // per position pair i<j: position of the meet, -1 outside

    bool operator==(const QfType&) const = default;
    bool operator<(const QfType& o) const { return serialize() < o.serialize(); }

    json to_json() const
    {
        json j;
        j["arity"] = arity;
        j["base_arity"] = base_arity;
        j["edge_arity"] = edge_arity;
        j["order"] = order;
        j["colors"] = colors;
        j["incidences"] = incidences;
        if (!meet.empty()) j["meet"] = meet;
        return j;
    }
    std::string serialize() const { return to_json().dump(); }

    /// Compact key for hashing and interning; injective like serialize().
    std::string key() const
    {
        std::string k;
        auto put = [&](int v) {
            k += std::to_string(v);
            k += ',';
        };
        put(arity);
        put(base_arity);
        put(edge_arity);
        k += '|';
        for (int v : order) put(v);
        k += '|';
        for (const auto& c : colors) {
            k += c;
            k += '\x1f';
        }
        k += '|';
        for (const auto& t : incidences) {
            for (int v : t) put(v);
            k += ';';
        }
        k += '|';
        for (int v : meet) put(v);
        return k;
    }

    static QfType from_json(const json& j)
    {
        QfType q;
        q.arity = j.at("arity").get<int>();
        q.base_arity = j.at("base_arity").get<int>();
        q.edge_arity = j.value("edge_arity", 0);
        q.order = j.at("order").get<std::vector<int>>();
        q.colors = j.at("colors").get<std::vector<std::string>>();
        q.incidences = j.at("incidences").get<std::vector<Tuple>>();
        if (j.contains("meet")) q.meet = j["meet"].get<std::vector<int>>();
        return q;
    }

    int positions() const { return arity + base_arity; }
    bool same_element(int p, int q) const { return order[p] == order[q]; }
};

struct PairQfType {
    QfType type;
    int split = 0;
    bool operator==(const PairQfType&) const = default;
    json to_json() const { return json{{"split", split}, {"type", type.to_json()}}; }
    std::string serialize() const { return to_json().dump(); }
};

/// Structure access used by the generic type computation; IndexStructure
/// satisfies it through StructureView.
struct StructureView {
    const IndexStructure& s;
    int rank(int x) const { return s.rank(x); }
    const std::string& color_label(int x) const { return s.sig.colors[s.color(x)]; }
    int edge_arity() const { return s.sig.edge_arity.value_or(0); }
    bool is_edge(const Tuple& sorted) const { return s.has_edge_sorted(sorted); }
    bool has_meet() const { return s.sig.has_meet; }
    int meet(int x, int y) const { return s.meet(x, y); }
};

namespace detail {

/// Calls f(subset) for every `k`-subset of 0..n-1 (lexicographic).
template <class F>
void for_each_subset(int n, int k, F f)
{
    if (k > n || k < 0) return;
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        f(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) return;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

} // namespace detail

template <class View>
QfType qf_type_of(const View& v, const Tuple& elems, int arity)
{
    QfType q;
    int m = static_cast<int>(elems.size());
    q.arity = arity;
    q.base_arity = m - arity;
    q.edge_arity = v.edge_arity();
    std::vector<int> rk(m);
    for (int i = 0; i < m; ++i) rk[i] = v.rank(elems[i]);
    std::vector<int> srt = rk;
    std::sort(srt.begin(), srt.end());
    srt.erase(std::unique(srt.begin(), srt.end()), srt.end());
    q.order.resize(m);
    for (int i = 0; i < m; ++i)
        q.order[i] = static_cast<int>(std::lower_bound(srt.begin(), srt.end(), rk[i]) - srt.begin());
    q.colors.resize(m);
    for (int i = 0; i < m; ++i) q.colors[i] = v.color_label(elems[i]);
    int ar = q.edge_arity;
    if (ar > 0 && m >= ar) {
        Tuple sub(ar);
        detail::for_each_subset(m, ar, [&](const std::vector<int>& idx) {
            for (int i = 0; i < ar; ++i) sub[i] = elems[idx[i]];
            std::sort(sub.begin(), sub.end());
            for (int i = 1; i < ar; ++i)
                if (sub[i] == sub[i - 1]) return;
            if (v.is_edge(sub)) q.incidences.push_back(idx);
        });
    }
    if (v.has_meet()) {
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                int mt = v.meet(elems[i], elems[j]);
                int pos = -1;
                for (int p = 0; p < m; ++p)
                    if (elems[p] == mt) {
                        pos = p;
                        break;
                    }
                q.meet.push_back(pos);
            }
    }
    return q;
}

inline void check_elements(const IndexStructure& J, const Tuple& t)
{
    for (int x : t)
        if (x < 0 || x >= J.size()) throw InputError("unknown element id " + std::to_string(x));
}

inline QfType qf_type(const Tuple& t, const Tuple& s, const IndexStructure& J)
{
    check_elements(J, t);
    check_elements(J, s);
    Tuple all = t;
    all.insert(all.end(), s.begin(), s.end());
    return qf_type_of(StructureView{J}, all, static_cast<int>(t.size()));
}

inline PairQfType pair_qf_type(const Tuple& a, const Tuple& b, const Tuple& s, const IndexStructure& J)
{
    Tuple ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    return {qf_type(ab, s, J), static_cast<int>(a.size())};
}

/// Increasing tuples realizing r over s, lexicographic in ids.
inline std::vector<Tuple> realizations(const IndexStructure& J, const QfType& r, const Tuple& s)
{
    std::vector<Tuple> out;
    if (r.base_arity != static_cast<int>(s.size())) throw InputError("realizations: base arity mismatch");
    check_elements(J, s);
    if (r.edge_arity != J.sig.edge_arity.value_or(0)) return out;
    // the base part must match
    QfType b0 = qf_type({}, s, J);
    {
        int a = r.arity, m = r.positions();
        for (int i = a; i < m; ++i) {
            if (r.colors[i] != b0.colors[i - a]) return out;
            for (int j = a; j < m; ++j)
                if ((r.order[i] < r.order[j]) != (b0.order[i - a] < b0.order[j - a]) ||
                    (r.order[i] == r.order[j]) != (b0.order[i - a] == b0.order[j - a]))
                    return out;
        }
    }
    std::set<Tuple> inc(r.incidences.begin(), r.incidences.end());
    int a = r.arity, m = r.positions();
    Tuple elems(m, -1);
    for (int i = 0; i < static_cast<int>(s.size()); ++i) elems[a + i] = s[i];
    std::vector<int> placed;  // positions with elements, in placement order
    for (int i = a; i < m; ++i) placed.push_back(i);
    auto ord = J.order();
    int ar = r.edge_arity;
    Tuple sub, psub;
    auto pos_ok = [&](int p, int x) {
        if (J.sig.colors[J.color(x)] != r.colors[p]) return false;
        for (int q : placed) {
            int y = elems[q];
            bool rl = r.order[p] < r.order[q], re = r.order[p] == r.order[q];
            bool jl = J.less(x, y), je = x == y;
            if (rl != jl || re != je) return false;
        }
        if (ar > 0) {
            // subsets containing p among placed positions
            int np = static_cast<int>(placed.size());
            if (np + 1 >= ar) {
                bool ok = true;
                detail::for_each_subset(np, ar - 1, [&](const std::vector<int>& idx) {
                    if (!ok) return;
                    psub.clear();
                    for (int i : idx) psub.push_back(placed[i]);
                    psub.push_back(p);
                    std::sort(psub.begin(), psub.end());
                    sub.clear();
                    for (int q : psub) sub.push_back(elems[q] == -1 ? x : elems[q]);
                    for (size_t i = 0; i < psub.size(); ++i)
                        if (psub[i] == p) sub[i] = x;
                    std::sort(sub.begin(), sub.end());
                    bool dup = false;
                    for (int i = 1; i < ar; ++i)
                        if (sub[i] == sub[i - 1]) dup = true;
                    bool e = !dup && J.has_edge_sorted(sub);
                    if (e != (inc.count(psub) > 0)) ok = false;
                });
                if (!ok) return false;
            }
        }
        if (!r.meet.empty()) {
            auto pidx = [&](int i, int j) {
                if (i > j) std::swap(i, j);
                return i * m - i * (i + 1) / 2 + (j - i - 1);
            };
            elems[p] = x;
            for (int q : placed) {
                int mp = r.meet[pidx(p, q)];
                int mt = J.meet(x, elems[q]);
                if (mp >= 0 && elems[mp] != -1 && elems[mp] != mt) {
                    elems[p] = -1;
                    return false;
                }
                if (mp < 0) {
                    for (int t : placed)
                        if (elems[t] == mt) {
                            elems[p] = -1;
                            return false;
                        }
                    if (mt == x) {
                        elems[p] = -1;
                        return false;
                    }
                }
            }
            elems[p] = -1;
        }
        return true;
    };
    auto rec = [&](auto&& self, int p, int from) -> void {
        if (p == a) {
            Tuple t(elems.begin(), elems.begin() + a);
            if (qf_type(t, s, J) == r) out.push_back(t);
            return;
        }
        for (int i = from; i < static_cast<int>(ord.size()); ++i) {
            int x = ord[i];
            if (!pos_ok(p, x)) continue;
            elems[p] = x;
            placed.push_back(p);
            self(self, p + 1, i + 1);
            placed.pop_back();
            elems[p] = -1;
        }
    };
    rec(rec, 0, 0);
    std::sort(out.begin(), out.end());
    return out;
}

/// All types over s realized by increasing tuples of arity <= max_arity,
/// sorted by arity then canonical serialization. s = () gives unbased D(J).
inline std::vector<QfType> enumerate_types(const IndexStructure& J, const Tuple& s, int max_arity)
{
    std::vector<QfType> out;
    for (int a = 0; a <= max_arity; ++a) {
        std::map<std::string, QfType> seen;
        for (const auto& t : increasing_tuples(J, a)) {
            auto q = qf_type(t, s, J);
            seen.emplace(q.serialize(), q);
        }
        for (auto& [k, q] : seen) out.push_back(q);
    }
    return out;
}

} // namespace shearlab
