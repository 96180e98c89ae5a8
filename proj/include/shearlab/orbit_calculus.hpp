#pragma once

#include <cstdint>
#include <cstdlib>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "qf_type.hpp"

namespace shearlab {

/// Slot of a symbolic configuration: an anchor, or an unnamed point of J in
/// a gap between anchors with a color and a partially known incidence
/// pattern over anchor k-sets.
struct Slot {
    int anchor = -1;
    int gap = 0;
    int color = 0;
    uint64_t known = 0;
    uint64_t bits = 0;

    bool is_free() const { return anchor < 0; }
    int key() const { return anchor >= 0 ? 2 * anchor + 1 : 2 * gap; }
};

struct Config {
    std::vector<Slot> slots;  // increasing in J's order
    std::vector<int> coord;   // tuple coordinates -> slot
    std::vector<int> base;    // s -> slot

    std::string key() const
    {
        std::string k;
        for (const auto& s : slots) {
            k += std::to_string(s.anchor) + ":" + std::to_string(s.gap) + ":" + std::to_string(s.color) + ":" +
                 std::to_string(s.known) + ":" + std::to_string(s.bits) + ";";
        }
        k += "|";
        for (int c : coord) k += std::to_string(c) + ",";
        return k;
    }
};

/// J seen through its anchors (depth-0 elements). Every edge must carry at
/// most one non-anchor; otherwise, for small J, all elements become anchors.
class OrbitSpace {
public:
    struct Pt {
        int id;
        int color;
        uint64_t pat;
    };

    explicit OrbitSpace(std::shared_ptr<const IndexStructure> Jp) : J_(std::move(Jp))
    {
        const auto& J = *J_;
        int ar = J.sig.edge_arity.value_or(0);
        k_ = ar > 0 ? ar - 1 : 0;
        bool ok = !J.sig.has_meet;
        for (const auto& e : J.edges()) {
            int nonanchor = 0;
            for (int x : e) nonanchor += J.depth(x) != 0;
            if (nonanchor > 1) ok = false;
        }
        int na = 0;
        for (int x = 0; x < J.size(); ++x) na += J.depth(x) == 0;
        if (ok && k_ > 0 && binom_small(na, k_) > 64) ok = false;
        anchored_ = ok;
        if (!ok && J.size() > 256)
            throw BudgetError("orbit engine: J is not anchored and too large for the explicit fallback (" +
                              std::to_string(J.size()) + " elements)");
        aidx_.assign(J.size(), -1);
        for (int x : J.order())
            if (!anchored_ || J.depth(x) == 0) {
                aidx_[x] = static_cast<int>(anchors_.size());
                anchors_.push_back(x);
            }
        if (anchored_ && k_ > 0) {
            int m = static_cast<int>(anchors_.size());
            detail::for_each_subset(m, k_, [&](const std::vector<int>& idx) {
                kid_[Tuple(idx.begin(), idx.end())] = static_cast<int>(ksets_.size());
                ksets_.push_back(Tuple(idx.begin(), idx.end()));
            });
        }
        gaps_.assign(anchors_.size() + 1, {});
        if (anchored_) {
            int g = 0;
            for (int x : J.order()) {
                if (J.depth(x) == 0) {
                    ++g;
                    continue;
                }
                gaps_[g].push_back({x, J.color(x), 0});
            }
            for (auto& gp : gaps_)
                for (auto& p : gp)
                    for (size_t b = 0; b < ksets_.size(); ++b) {
                        Tuple e;
                        for (int a : ksets_[b]) e.push_back(anchors_[a]);
                        e.push_back(p.id);
                        std::sort(e.begin(), e.end());
                        if (J.has_edge_sorted(e)) p.pat |= 1ull << b;
                    }
        }
    }

    const IndexStructure& J() const { return *J_; }
    std::shared_ptr<const IndexStructure> J_ptr() const { return J_; }
    bool anchored() const { return anchored_; }
    int anchor_count() const { return static_cast<int>(anchors_.size()); }
    int anchor_of(int x) const { return aidx_[x]; }
    int anchor_id(int a) const { return anchors_[a]; }
    int gap_count() const { return static_cast<int>(gaps_.size()); }
    const std::vector<Pt>& gap(int g) const { return gaps_[g]; }
    bool gap_has_color(int g, int c) const
    {
        for (const auto& p : gaps_[g])
            if (p.color == c) return true;
        return false;
    }

    /// Bits of the k-sets inside the given anchor set.
    uint64_t kmask(const std::vector<int>& anchor_set) const
    {
        if (ksets_.empty()) return 0;
        std::vector<char> in(anchors_.size(), 0);
        for (int a : anchor_set) in[a] = 1;
        uint64_t m = 0;
        for (size_t b = 0; b < ksets_.size(); ++b) {
            bool all = true;
            for (int a : ksets_[b]) all = all && in[a];
            if (all) m |= 1ull << b;
        }
        return m;
    }
    int kset_id(const Tuple& sorted_anchor_indices) const
    {
        auto it = kid_.find(sorted_anchor_indices);
        return it == kid_.end() ? -1 : it->second;
    }
    const std::vector<Tuple>& ksets() const { return ksets_; }

    bool anchors_edge(Tuple anchor_indices) const
    {
        for (int& a : anchor_indices) a = anchors_[a];
        std::sort(anchor_indices.begin(), anchor_indices.end());
        return J_->has_edge_sorted(anchor_indices);
    }

    /// Calls f on each filling of the bits in `rel` for which c is realized
    /// in J (greedy leftmost matching inside each gap). Stops when f
    /// returns true; returns whether it stopped.
    template <class F>
    bool realize(const Config& c, uint64_t rel, F&& f) const
    {
        std::vector<int> frees;
        for (int i = 0; i < static_cast<int>(c.slots.size()); ++i)
            if (c.slots[i].is_free()) frees.push_back(i);
        Config work = c;
        auto rec = [&](auto&& self, size_t fi, int prev_gap, int ptr) -> bool {
            if (fi == frees.size()) return f(static_cast<const Config&>(work));
            Slot& s = work.slots[frees[fi]];
            const Slot orig = s;
            int start = s.gap == prev_gap ? ptr : 0;
            const auto& gp = gaps_[s.gap];
            uint64_t need = rel & ~orig.known;
            std::vector<uint64_t> seen;
            for (int i = start; i < static_cast<int>(gp.size()); ++i) {
                const auto& p = gp[i];
                if (p.color != orig.color || (p.pat & orig.known) != orig.bits) continue;
                uint64_t v = p.pat & need;
                if (std::find(seen.begin(), seen.end(), v) != seen.end()) continue;
                seen.push_back(v);
                s.known = orig.known | need;
                s.bits = orig.bits | v;
                if (self(self, fi + 1, orig.gap, i + 1)) {
                    s = orig;
                    return true;
                }
                if (need == 0) break;
            }
            s = orig;
            return false;
        };
        return rec(rec, 0, -1, 0);
    }

    bool realizable(const Config& c) const
    {
        return realize(c, 0, [](const Config&) { return true; });
    }

    /// Anchor indices present in c.
    std::vector<int> anchors_in(const Config& c) const
    {
        std::vector<int> out;
        for (const auto& s : c.slots)
            if (!s.is_free()) out.push_back(s.anchor);
        return out;
    }

    /// Realizable configurations of increasing tuples realizing r over s.
    std::vector<Config> y_configs(const QfType& r, const Tuple& s) const;

    /// Merge X and Y, identifying the `forced` slot pairs; anchors with the
    /// same index always coincide, free slots may coincide. Calls
    /// f(merged, mapX, mapY) for each realized merge with the bits on the
    /// merged anchors' k-sets filled in; f returns true to stop.
    template <class F>
    bool amalgamate(const Config& X, const Config& Y, const std::vector<std::pair<int, int>>& forced, F&& f) const;

    QfType project(const Config& c, const std::vector<int>& elems, int arity) const;

private:
    static long long binom_small(int n, int k)
    {
        if (k < 0 || k > n) return 0;
        long long r = 1;
        for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
        return r;
    }

    std::shared_ptr<const IndexStructure> J_;
    bool anchored_ = true;
    int k_ = 0;
    std::vector<int> anchors_;
    std::vector<int> aidx_;
    std::vector<Tuple> ksets_;
    std::map<Tuple, int> kid_;
    std::vector<std::vector<Pt>> gaps_;
};

/// StructureView over a configuration: elements are slot indices.
struct ConfigView {
    const OrbitSpace& sp;
    const std::vector<Slot>& sl;

    int rank(int x) const { return x; }
    const std::string& color_label(int x) const { return sp.J().sig.colors[sl[x].color]; }
    int edge_arity() const { return sp.J().sig.edge_arity.value_or(0); }
    bool is_edge(const Tuple& sorted) const
    {
        int fr = -1, nfree = 0;
        Tuple an;
        for (int x : sorted) {
            if (sl[x].is_free()) {
                ++nfree;
                fr = x;
            } else {
                an.push_back(sl[x].anchor);
            }
        }
        if (nfree == 0) return sp.anchors_edge(an);
        if (nfree > 1) return false;
        std::sort(an.begin(), an.end());
        int b = sp.kset_id(an);
        if (b < 0 || !(sl[fr].known >> b & 1)) throw std::logic_error("orbit engine: incidence bit not known");
        return sl[fr].bits >> b & 1;
    }
    bool has_meet() const { return sp.J().sig.has_meet; }
    int meet(int x, int y) const
    {
        int m = sp.J().meet(sp.anchor_id(sl[x].anchor), sp.anchor_id(sl[y].anchor));
        int a = sp.anchor_of(m);
        for (int i = 0; i < static_cast<int>(sl.size()); ++i)
            if (sl[i].anchor == a) return i;
        return -1 - m;  // not among the slots
    }
};

inline QfType OrbitSpace::project(const Config& c, const std::vector<int>& elems, int arity) const
{
    return qf_type_of(ConfigView{*this, c.slots}, elems, arity);
}

inline std::vector<Config> OrbitSpace::y_configs(const QfType& r, const Tuple& s) const
{
    std::vector<Config> out;
    if (r.base_arity != static_cast<int>(s.size())) throw InputError("y_configs: base arity mismatch");
    for (int x : s)
        if (x < 0 || x >= J().size() || aidx_[x] < 0) throw InputError("y_configs: base element is not an anchor");
    int a = r.arity;
    std::vector<int> ci(a);
    for (int p = 0; p < a; ++p) ci[p] = J().sig.color_index(r.colors[p]);
    std::vector<std::pair<int, int>> ch(a);  // (anchor or -1, gap)
    std::set<std::string> seen;
    auto finish = [&] {
        // slots: chosen coordinates plus s anchors
        struct Item {
            int key, order;
            Slot s;
            int coord;  // -1 for base
        };
        std::vector<Item> items;
        for (int p = 0; p < a; ++p) {
            Slot sl;
            sl.anchor = ch[p].first;
            sl.gap = ch[p].second;
            sl.color = ci[p];
            items.push_back({sl.key(), p, sl, p});
        }
        Config c;
        std::vector<int> anch;
        for (const auto& it : items)
            if (it.s.anchor >= 0) anch.push_back(it.s.anchor);
        for (int x : s) anch.push_back(aidx_[x]);
        std::sort(anch.begin(), anch.end());
        anch.erase(std::unique(anch.begin(), anch.end()), anch.end());
        // merged order: anchors by index, frees by gap then coordinate
        std::vector<std::pair<std::pair<int, int>, Slot>> all;
        for (int an : anch) {
            Slot sl;
            sl.anchor = an;
            sl.color = J().color(anchors_[an]);
            all.push_back({{2 * an + 1, 0}, sl});
        }
        for (const auto& it : items)
            if (it.s.is_free()) all.push_back({{it.key, it.order}, it.s});
        std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        for (const auto& [kk, sl] : all) c.slots.push_back(sl);
        c.coord.assign(a, -1);
        for (int p = 0; p < a; ++p) {
            for (int i = 0; i < static_cast<int>(c.slots.size()); ++i) {
                const auto& sl = c.slots[i];
                if (ch[p].first >= 0 ? sl.anchor == ch[p].first
                                     : (sl.is_free() && all[i].first.second == p && all[i].first.first == 2 * ch[p].second)) {
                    c.coord[p] = i;
                    break;
                }
            }
        }
        for (int x : s)
            for (int i = 0; i < static_cast<int>(c.slots.size()); ++i)
                if (c.slots[i].anchor == aidx_[x]) {
                    c.base.push_back(i);
                    break;
                }
        std::vector<int> elems = c.coord;
        elems.insert(elems.end(), c.base.begin(), c.base.end());
        uint64_t rel = kmask(anch);
        std::set<Tuple> inc(r.incidences.begin(), r.incidences.end());
        for (int p = 0; p < a; ++p) {
            Slot& sl = c.slots[c.coord[p]];
            if (!sl.is_free()) continue;
            sl.known = rel;
            sl.bits = 0;
            for (size_t b = 0; b < ksets_.size(); ++b) {
                if (!(rel >> b & 1)) continue;
                Tuple pos{p};
                for (int an : ksets_[b]) {
                    int found = -1;
                    for (int q = 0; q < static_cast<int>(elems.size()); ++q)
                        if (c.slots[elems[q]].anchor == an) {
                            found = q;
                            break;
                        }
                    pos.push_back(found);
                }
                std::sort(pos.begin(), pos.end());
                if (inc.count(pos)) sl.bits |= 1ull << b;
            }
        }
        if (!(project(c, elems, a) == r)) return;
        if (!realizable(c)) return;
        if (seen.insert(c.key()).second) out.push_back(std::move(c));
    };
    auto rec = [&](auto&& self, int p, int lastkey) -> void {
        if (p == a) {
            finish();
            return;
        }
        if (ci[p] < 0) return;
        for (int an = 0; an < anchor_count(); ++an)
            if (2 * an + 1 > lastkey && J().color(anchors_[an]) == ci[p]) {
                ch[p] = {an, 0};
                self(self, p + 1, 2 * an + 1);
            }
        if (!anchored_) return;
        for (int g = 0; g < gap_count(); ++g) {
            int key = 2 * g;
            if (lastkey % 2 == 0 ? key < lastkey : key <= lastkey) continue;
            if (!gap_has_color(g, ci[p])) continue;
            ch[p] = {-1, g};
            self(self, p + 1, key);
        }
    };
    rec(rec, 0, -1);
    return out;
}

template <class F>
bool OrbitSpace::amalgamate(const Config& X, const Config& Y, const std::vector<std::pair<int, int>>& forced,
                            F&& f) const
{
    int nx = static_cast<int>(X.slots.size()), ny = static_cast<int>(Y.slots.size());
    std::vector<int> fx(nx, -1), fy(ny, -1);
    for (auto [i, j] : forced) {
        const Slot &a = X.slots[i], &b = Y.slots[j];
        if (a.is_free() != b.is_free()) return false;
        if (!a.is_free() && a.anchor != b.anchor) return false;
        if (a.is_free() && (a.gap != b.gap || a.color != b.color || ((a.bits ^ b.bits) & a.known & b.known))) return false;
        if ((fx[i] >= 0 && fx[i] != j) || (fy[j] >= 0 && fy[j] != i)) return false;
        fx[i] = j;
        fy[j] = i;
    }
    // anchors: union by index
    std::map<int, std::pair<int, int>> anch;  // anchor -> (x slot, y slot)
    for (int i = 0; i < nx; ++i)
        if (!X.slots[i].is_free()) anch[X.slots[i].anchor] = {i, -1};
    for (int j = 0; j < ny; ++j)
        if (!Y.slots[j].is_free()) {
            auto it = anch.find(Y.slots[j].anchor);
            if (it == anch.end()) anch[Y.slots[j].anchor] = {-1, j};
            else it->second.second = j;
        }
    for (auto& [an, pr] : anch) {
        if (pr.first >= 0 && fx[pr.first] >= 0 && fx[pr.first] != pr.second) return false;
        if (pr.second >= 0 && fy[pr.second] >= 0 && fy[pr.second] != pr.first) return false;
    }
    std::vector<int> anchor_set;
    for (auto& [an, pr] : anch) anchor_set.push_back(an);
    uint64_t rel = kmask(anchor_set);
    int G = gap_count();
    std::vector<std::vector<int>> xg(G), yg(G);
    for (int i = 0; i < nx; ++i)
        if (X.slots[i].is_free()) xg[X.slots[i].gap].push_back(i);
    for (int j = 0; j < ny; ++j)
        if (Y.slots[j].is_free()) yg[Y.slots[j].gap].push_back(j);
    auto compatible = [&](int i, int j) {
        const Slot &a = X.slots[i], &b = Y.slots[j];
        return a.color == b.color && !((a.bits ^ b.bits) & a.known & b.known);
    };
    using Item = std::pair<int, int>;  // (x slot or -1, y slot or -1)
    std::vector<std::vector<std::vector<Item>>> per_gap(G);
    for (int g = 0; g < G; ++g) {
        const auto &xs = xg[g], &ys = yg[g];
        std::vector<Item> cur;
        auto rec = [&](auto&& self, size_t i, size_t j) -> void {
            if (i == xs.size() && j == ys.size()) {
                per_gap[g].push_back(cur);
                return;
            }
            if (i < xs.size() && j < ys.size()) {
                int a = xs[i], b = ys[j];
                if (fx[a] == b || (fx[a] < 0 && fy[b] < 0 && compatible(a, b))) {
                    cur.push_back({a, b});
                    self(self, i + 1, j + 1);
                    cur.pop_back();
                }
            }
            if (i < xs.size() && fx[xs[i]] < 0) {
                cur.push_back({xs[i], -1});
                self(self, i + 1, j);
                cur.pop_back();
            }
            if (j < ys.size() && fy[ys[j]] < 0) {
                cur.push_back({-1, ys[j]});
                self(self, i, j + 1);
                cur.pop_back();
            }
        };
        rec(rec, 0, 0);
        if (per_gap[g].empty()) return false;
    }
    // assemble in J order: gap 0, anchor 0, gap 1, ...
    std::vector<int> pick(G, 0);
    Config m;
    std::vector<int> mapX(nx, -1), mapY(ny, -1);
    auto build_and_run = [&]() -> bool {
        m.slots.clear();
        auto put_free = [&](const Item& it) {
            Slot s = it.first >= 0 ? X.slots[it.first] : Y.slots[it.second];
            if (it.first >= 0 && it.second >= 0) {
                const Slot& o = Y.slots[it.second];
                s.bits |= o.bits & o.known;
                s.known |= o.known;
            }
            int idx = static_cast<int>(m.slots.size());
            m.slots.push_back(s);
            if (it.first >= 0) mapX[it.first] = idx;
            if (it.second >= 0) mapY[it.second] = idx;
        };
        auto ait = anch.begin();
        for (int g = 0; g < G; ++g) {
            for (const auto& it : per_gap[g][pick[g]]) put_free(it);
            if (g < anchor_count()) {
                if (ait != anch.end() && ait->first == g) {
                    Slot s;
                    s.anchor = g;
                    s.color = J().color(anchors_[g]);
                    int idx = static_cast<int>(m.slots.size());
                    m.slots.push_back(s);
                    if (ait->second.first >= 0) mapX[ait->second.first] = idx;
                    if (ait->second.second >= 0) mapY[ait->second.second] = idx;
                    ++ait;
                }
            }
        }
        return realize(m, rel, [&](const Config& filled) { return f(filled, mapX, mapY); });
    };
    auto rec = [&](auto&& self, int g) -> bool {
        if (g == G) return build_and_run();
        for (size_t c = 0; c < per_gap[g].size(); ++c) {
            pick[g] = static_cast<int>(c);
            if (self(self, g + 1)) return true;
        }
        return false;
    };
    return rec(rec, 0);
}

/// Pair types of Y x Y, interned, with the realizing configurations.
struct PairTable {
    std::shared_ptr<const OrbitSpace> space;
    QfType r;
    Tuple s;
    int arity = 0;
    std::vector<Config> ycfg;
    std::vector<QfType> types;
    std::unordered_map<std::string, int> id;
    std::vector<std::vector<Config>> configs;  // coord = first tuple then second
    std::vector<int> inv;
    int diag = -1;

    int intern(const QfType& q)
    {
        auto k = q.key();
        auto it = id.find(k);
        if (it != id.end()) return it->second;
        int n = static_cast<int>(types.size());
        id.emplace(k, n);
        types.push_back(q);
        configs.emplace_back();
        return n;
    }
    int lookup(const QfType& q) const
    {
        auto it = id.find(q.key());
        return it == id.end() ? -1 : it->second;
    }
};

inline long long env_limit(const char* name, long long dflt)
{
    if (const char* v = std::getenv(name)) {
        try {
            return std::stoll(v);
        } catch (...) {
        }
    }
    return dflt;
}

inline PairTable build_pair_table(std::shared_ptr<const OrbitSpace> sp, const QfType& r, const Tuple& s)
{
    PairTable T;
    T.space = sp;
    T.r = r;
    T.s = s;
    T.arity = r.arity;
    T.ycfg = sp->y_configs(r, s);
    int a = r.arity;
    long long cap = env_limit("SHEARLAB_MAX_PAIR_CONFIGS", 2'000'000);
    long long count = 0;
    std::vector<std::unordered_set<std::string>> seen;
    for (const auto& X : T.ycfg)
        for (const auto& Y : T.ycfg) {
            sp->amalgamate(X, Y, {}, [&](const Config& m, const std::vector<int>& mx, const std::vector<int>& my) {
                if (++count > cap)
                    throw BudgetError("pair table: more than " + std::to_string(cap) + " pair configurations");
                Config c;
                c.slots = m.slots;
                for (int p = 0; p < a; ++p) c.coord.push_back(mx[X.coord[p]]);
                for (int p = 0; p < a; ++p) c.coord.push_back(my[Y.coord[p]]);
                for (int b : X.base) c.base.push_back(mx[b]);
                std::vector<int> el = c.coord;
                el.insert(el.end(), c.base.begin(), c.base.end());
                int t = T.intern(sp->project(c, el, 2 * a));
                if (static_cast<int>(seen.size()) <= t) seen.resize(t + 1);
                if (seen[t].insert(c.key()).second) T.configs[t].push_back(std::move(c));
                return false;
            });
        }
    int n = static_cast<int>(T.types.size());
    T.inv.assign(n, -1);
    for (int t = 0; t < n; ++t) {
        const Config& c = T.configs[t].front();
        Config sw = c;
        std::rotate(sw.coord.begin(), sw.coord.begin() + a, sw.coord.end());
        std::vector<int> el = sw.coord;
        el.insert(el.end(), sw.base.begin(), sw.base.end());
        T.inv[t] = T.lookup(sp->project(sw, el, 2 * a));
        if (T.inv[t] < 0) throw std::logic_error("pair table: inverse type missing");
        bool same = true;
        for (int p = 0; p < a; ++p) same = same && c.coord[p] == c.coord[a + p];
        if (same) T.diag = t;
    }
    return T;
}

/// Composition of pair types over Y, memoized.
class Composer {
public:
    explicit Composer(const PairTable& T) : T_(T)
    {
        int a = T.arity;
        for (int t = 0; t < static_cast<int>(T.types.size()); ++t)
            for (int c = 0; c < static_cast<int>(T.configs[t].size()); ++c)
                by_first_[std::to_string(t) + "#" + sig(T.configs[t][c], 0, a)].push_back(c);
    }

    long long computed() const { return computed_; }

    const std::vector<int>& comp(int sg, int rh)
    {
        uint64_t key = static_cast<uint64_t>(sg) * T_.types.size() + rh;
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        static const long long cap = env_limit("SHEARLAB_MAX_COMPOSITIONS", 2'000'000);
        if (++computed_ > cap) throw BudgetError("composition budget exceeded: " + std::to_string(cap));
        std::vector<int> out;
        if (sg == T_.diag) out = {rh};
        else if (rh == T_.diag) out = {sg};
        else {
            std::vector<char> got(T_.types.size(), 0);
            run(sg, rh, [&](int t) {
                got[t] = 1;
                return false;
            });
            for (int t = 0; t < static_cast<int>(got.size()); ++t)
                if (got[t]) out.push_back(t);
        }
        return memo_.emplace(key, std::move(out)).first->second;
    }

    /// Whether target is in comp(sg, rh), stopping at the first hit.
    bool comp_contains(int sg, int rh, int target)
    {
        uint64_t key = static_cast<uint64_t>(sg) * T_.types.size() + rh;
        auto it = memo_.find(key);
        if (it != memo_.end()) return std::binary_search(it->second.begin(), it->second.end(), target);
        if (sg == T_.diag) return rh == target;
        if (rh == T_.diag) return sg == target;
        return run(sg, rh, [&](int t) { return t == target; });
    }

private:
    std::string sig(const Config& c, int from, int a) const
    {
        std::string k;
        for (int p = from; p < from + a; ++p) {
            const Slot& s = c.slots[c.coord[p]];
            k += s.is_free() ? "g" + std::to_string(s.gap) : "a" + std::to_string(s.anchor);
            k += ",";
        }
        return k;
    }

    template <class F>
    bool run(int sg, int rh, F&& f)
    {
        int a = T_.arity;
        const auto& sp = *T_.space;
        for (const auto& P1 : T_.configs[sg]) {
            auto bt = by_first_.find(std::to_string(rh) + "#" + sig(P1, a, a));
            if (bt == by_first_.end()) continue;
            for (int c2 : bt->second) {
                const Config& P2 = T_.configs[rh][c2];
                std::vector<std::pair<int, int>> forced;
                for (int p = 0; p < a; ++p) forced.push_back({P1.coord[a + p], P2.coord[p]});
                for (size_t b = 0; b < P1.base.size(); ++b) forced.push_back({P1.base[b], P2.base[b]});
                bool stop = sp.amalgamate(P1, P2, forced, [&](const Config& m, const std::vector<int>& mx,
                                                              const std::vector<int>& my) {
                    std::vector<int> el;
                    for (int p = 0; p < a; ++p) el.push_back(mx[P1.coord[p]]);
                    for (int p = 0; p < a; ++p) el.push_back(my[P2.coord[a + p]]);
                    for (int b : P1.base) el.push_back(mx[b]);
                    int t = T_.lookup(sp.project(m, el, 2 * a));
                    if (t < 0) throw std::logic_error("composition produced an unknown pair type");
                    return f(t);
                });
                if (stop) return true;
            }
        }
        return false;
    }

    const PairTable& T_;
    std::unordered_map<std::string, std::vector<int>> by_first_;
    std::unordered_map<uint64_t, std::vector<int>> memo_;
    long long computed_ = 0;
};

/// Least E1, E2, F with tau in F closed under: E1, E2 equivalences;
/// E1 o F, F o E2 inside F; F^-1 o F inside E2; F o F^-1 inside E1.
struct CircleFixpoint {
    bool refuted = false;
    std::vector<int> E1, E2, F;
};

class CircleSolver {
public:
    explicit CircleSolver(const PairTable& T) : T_(T), C_(T), refuted_(T.types.size(), 0) {}

    Composer& composer() { return C_; }
    long long fixpoints() const { return fixpoints_; }

    bool refuted(int t) const { return refuted_[t]; }

    /// tau o tau containing tau forces a fixed point.
    bool fast_refute(int tau)
    {
        if (refuted_[tau]) return true;
        if (tau == T_.diag || C_.comp_contains(tau, tau, tau)) {
            mark(tau);
            return true;
        }
        return false;
    }

    CircleFixpoint solve(int tau)
    {
        ++fixpoints_;
        CircleFixpoint out;
        if (fast_refute(tau)) {
            out.refuted = true;
            return out;
        }
        int n = static_cast<int>(T_.types.size());
        std::vector<char> in[3] = {std::vector<char>(n, 0), std::vector<char>(n, 0), std::vector<char>(n, 0)};
        std::vector<int> mem[3];
        std::vector<std::pair<int, int>> queue;
        bool dead = false;
        auto add = [&](int S, int t) {
            if (in[S][t]) return;
            in[S][t] = 1;
            mem[S].push_back(t);
            queue.push_back({S, t});
            if (S == 2 && (t == T_.diag || refuted_[t])) dead = true;
        };
        auto add_all = [&](int S, const std::vector<int>& ts) {
            for (int t : ts) add(S, t);
        };
        add(0, T_.diag);
        add(1, T_.diag);
        add(2, tau);
        for (size_t qi = 0; qi < queue.size() && !dead; ++qi) {
            auto [S, x] = queue[qi];
            if (S == 0 || S == 1) {
                add(S, T_.inv[x]);
                for (size_t i = 0; i < mem[S].size() && !dead; ++i) {
                    int y = mem[S][i];
                    add_all(S, C_.comp(x, y));
                    add_all(S, C_.comp(y, x));
                }
                for (size_t i = 0; i < mem[2].size() && !dead; ++i) {
                    int g = mem[2][i];
                    add_all(2, S == 0 ? C_.comp(x, g) : C_.comp(g, x));
                }
            } else {
                for (size_t i = 0; i < mem[0].size() && !dead; ++i) add_all(2, C_.comp(mem[0][i], x));
                for (size_t i = 0; i < mem[1].size() && !dead; ++i) add_all(2, C_.comp(x, mem[1][i]));
                for (size_t i = 0; i < mem[2].size() && !dead; ++i) {
                    int g = mem[2][i];
                    add_all(1, C_.comp(T_.inv[x], g));
                    add_all(1, C_.comp(T_.inv[g], x));
                    add_all(0, C_.comp(x, T_.inv[g]));
                    add_all(0, C_.comp(g, T_.inv[x]));
                }
            }
        }
        if (dead) {
            mark(tau);
            out.refuted = true;
            return out;
        }
        for (int S = 0; S < 3; ++S) std::sort(mem[S].begin(), mem[S].end());
        out.E1 = mem[0];
        out.E2 = mem[1];
        out.F = mem[2];
        return out;
    }

private:
    void mark(int t)
    {
        refuted_[t] = 1;
        refuted_[T_.inv[t]] = 1;
    }

    const PairTable& T_;
    Composer C_;
    std::vector<char> refuted_;
    long long fixpoints_ = 0;
};

} // namespace shearlab
