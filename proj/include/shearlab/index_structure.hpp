#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "json.hpp"

namespace shearlab {

using Tuple = std::vector<int>;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// J too shallow for the requested operation.
struct DepthError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TupleHash {
    size_t operator()(const Tuple& t) const noexcept
    {
        uint64_t h = 1469598103934665603ull;
        for (int x : t) {
            h ^= static_cast<uint64_t>(x) + 0x9e3779b97f4a7c15ull;
            h *= 1099511628211ull;
        }
        return static_cast<size_t>(h);
    }
};

enum class ClassKind { Linear, Kmu, Knk, TreeBranch };

struct ClassSpec {
    ClassKind kind = ClassKind::Linear;
    int mu = 0;  // KMU: number of colors allowed, 0 = unbounded
    int n = 0;   // KNK
    int k = 0;

    static ClassSpec linear() { return {ClassKind::Linear, 0, 0, 0}; }
    static ClassSpec kmu(int mu) { return {ClassKind::Kmu, mu, 0, 0}; }
    static ClassSpec knk(int n, int k) { return {ClassKind::Knk, 0, n, k}; }
    static ClassSpec tree_branch() { return {ClassKind::TreeBranch, 0, 0, 0}; }

    int edge_arity() const { return kind == ClassKind::Knk ? k + 1 : 0; }
    bool operator==(const ClassSpec&) const = default;
};

inline std::string kind_name(ClassKind k)
{
    switch (k) {
    case ClassKind::Linear: return "LINEAR";
    case ClassKind::Kmu: return "KMU";
    case ClassKind::Knk: return "KNK";
    case ClassKind::TreeBranch: return "TREE_BRANCH";
    }
    return "?";
}

struct IndexSignature {
    std::vector<std::string> colors;
    std::optional<int> edge_arity;
    std::optional<int> clique_bound;
    bool has_meet = false;

    int color_index(const std::string& label) const
    {
        for (size_t i = 0; i < colors.size(); ++i)
            if (colors[i] == label) return static_cast<int>(i);
        return -1;
    }
    int intern(const std::string& label)
    {
        int c = color_index(label);
        if (c >= 0) return c;
        colors.push_back(label);
        return static_cast<int>(colors.size()) - 1;
    }
    bool operator==(const IndexSignature&) const = default;
};

/// Finite linearly ordered colored structure with an optional symmetric
/// hyperedge and an optional meet table. Ids are dense 0..size()-1.
class IndexStructure {
public:
    IndexSignature sig;

    IndexStructure() = default;
    explicit IndexStructure(IndexSignature s) : sig(std::move(s)) {}

    int size() const { return static_cast<int>(color_.size()); }
    int color(int x) const { return color_[x]; }
    int rank(int x) const { return rank_[x]; }
    int depth(int x) const { return depth_[x]; }
    const std::string& name(int x) const { return names_[x]; }
    const std::vector<int>& ranks() const { return rank_; }
    bool less(int x, int y) const { return rank_[x] < rank_[y]; }

    /// Ids sorted by the order.
    std::vector<int> order() const
    {
        std::vector<int> o(size());
        for (int x = 0; x < size(); ++x) o[rank_[x]] = x;
        return o;
    }

    int find(const std::string& nm) const
    {
        for (int x = 0; x < size(); ++x)
            if (names_[x] == nm) return x;
        return -1;
    }

    /// Insert a new element so that it gets rank `pos` (0..size()).
    int add_element(std::string nm, int color, int pos, int depth = 0)
    {
        if (pos < 0 || pos > size()) throw InputError("add_element: bad position");
        for (int& r : rank_)
            if (r >= pos) ++r;
        int id = size();
        names_.push_back(std::move(nm));
        color_.push_back(color);
        rank_.push_back(pos);
        depth_.push_back(depth);
        if (sig.has_meet) {
            int n = size();
            std::vector<int> m(n * n);
            for (int a = 0; a < n - 1; ++a)
                for (int b = 0; b < n - 1; ++b) m[a * n + b] = meet_[a * (n - 1) + b];
            meet_ = std::move(m);
            for (int a = 0; a < n; ++a) {
                int lo = less(a, id) ? a : id;
                meet_[a * n + id] = lo;
                meet_[id * n + a] = lo;
            }
        }
        return id;
    }

    int add_element_last(std::string nm, int color, int depth = 0)
    {
        return add_element(std::move(nm), color, size(), depth);
    }

    void add_edge(Tuple e)
    {
        std::sort(e.begin(), e.end());
        if (edge_lookup_.insert(e).second) edges_.insert(std::move(e));
    }
    void remove_edge(Tuple e)
    {
        std::sort(e.begin(), e.end());
        edge_lookup_.erase(e);
        edges_.erase(e);
    }
    /// `e` must be sorted.
    bool has_edge_sorted(const Tuple& e) const { return edge_lookup_.count(e) > 0; }
    bool has_edge(Tuple e) const
    {
        std::sort(e.begin(), e.end());
        return has_edge_sorted(e);
    }
    const std::set<Tuple>& edges() const { return edges_; }

    int meet(int x, int y) const { return meet_[x * size() + y]; }
    void set_meet(int x, int y, int m)
    {
        meet_[x * size() + y] = m;
    }
    void reset_meet_table()
    {
        meet_.assign(static_cast<size_t>(size()) * size(), 0);
        for (int a = 0; a < size(); ++a)
            for (int b = 0; b < size(); ++b) meet_[a * size() + b] = less(a, b) || a == b ? a : b;
    }
    bool has_meet_table() const { return !meet_.empty() || size() == 0; }

    void set_depth(int x, int d) { depth_[x] = d; }

    bool operator==(const IndexStructure& o) const
    {
        return sig == o.sig && names_ == o.names_ && color_ == o.color_ && rank_ == o.rank_ &&
               depth_ == o.depth_ && edges_ == o.edges_ && meet_ == o.meet_;
    }

private:
    std::vector<std::string> names_;
    std::vector<int> color_;
    std::vector<int> rank_;
    std::vector<int> depth_;
    std::set<Tuple> edges_;
    std::unordered_set<Tuple, TupleHash> edge_lookup_;
    std::vector<int> meet_;
};

struct ContextSpec {
    ClassSpec cls;
    IndexStructure base;
    std::string label;
};

inline IndexSignature signature_for(const ClassSpec& c)
{
    IndexSignature s;
    if (c.kind == ClassKind::Knk) {
        s.edge_arity = c.k + 1;
        s.clique_bound = c.n + 1;
    }
    s.has_meet = c.kind == ClassKind::TreeBranch;
    return s;
}

// ---------------------------------------------------------------- cliques

/// Calls f(clique) for each `size`-subset of `pool` (sorted ids) all of whose
/// `arity`-subsets are edges. Stops early when f returns true.
template <class Pred, class F>
bool for_each_clique(const std::vector<int>& pool, int size, int arity, Pred is_edge, F f)
{
    std::vector<int> cur;
    std::vector<int> sub;
    // check all arity-subsets of cur that contain its last element
    auto last_ok = [&]() {
        int m = static_cast<int>(cur.size());
        if (m < arity) return true;
        std::vector<int> idx(arity - 1);
        for (int i = 0; i < arity - 1; ++i) idx[i] = i;
        while (true) {
            sub.clear();
            for (int i : idx) sub.push_back(cur[i]);
            sub.push_back(cur.back());
            if (!is_edge(sub)) return false;
            int i = arity - 2;
            while (i >= 0 && idx[i] == m - 1 - (arity - 1 - i)) --i;
            if (i < 0) break;
            ++idx[i];
            for (int j = i + 1; j < arity - 1; ++j) idx[j] = idx[j - 1] + 1;
        }
        return true;
    };
    auto rec = [&](auto&& self, size_t from) -> bool {
        if (static_cast<int>(cur.size()) == size) return f(cur);
        for (size_t i = from; i < pool.size(); ++i) {
            if (pool.size() - i < static_cast<size_t>(size) - cur.size()) break;
            cur.push_back(pool[i]);
            if (last_ok() && self(self, i + 1)) return true;
            cur.pop_back();
        }
        return false;
    };
    if (size <= 0) return f(cur);
    return rec(rec, 0);
}

/// Cliques of `size` >= arity seeded by their `arity` smallest ids, which must
/// form one of `edges` (each sorted). `extra(cur)` vets the last element of cur
/// against further constraints; f(clique) returns true to stop.
template <class Extra, class F>
bool for_each_clique_in(const std::vector<Tuple>& edges, int arity, int size, Extra extra, F f)
{
    if (size < arity || arity < 1) return false;
    std::set<Tuple> eset(edges.begin(), edges.end());
    std::map<int, std::set<int>> nbr;
    for (const auto& e : edges)
        for (int x : e)
            for (int y : e)
                if (x != y) nbr[x].insert(y);
    std::vector<int> cur, sub;
    auto last_ok = [&]() {
        int m = static_cast<int>(cur.size());
        bool ok = true;
        std::vector<int> idx(arity - 1);
        for (int i = 0; i < arity - 1; ++i) idx[i] = i;
        if (m < arity) return true;
        while (ok) {
            sub.clear();
            for (int i : idx) sub.push_back(cur[i]);
            sub.push_back(cur.back());
            std::sort(sub.begin(), sub.end());
            if (!eset.count(sub)) ok = false;
            int i = arity - 2;
            while (i >= 0 && idx[i] == m - 1 - (arity - 1 - i)) --i;
            if (i < 0) break;
            ++idx[i];
            for (int j = i + 1; j < arity - 1; ++j) idx[j] = idx[j - 1] + 1;
        }
        return ok;
    };
    auto rec = [&](auto&& self, const std::vector<int>& cands) -> bool {
        if (static_cast<int>(cur.size()) == size) return f(cur);
        for (size_t i = 0; i < cands.size(); ++i) {
            cur.push_back(cands[i]);
            if (last_ok() && extra(cur)) {
                std::vector<int> next;
                const auto& nb = nbr[cands[i]];
                for (size_t j = i + 1; j < cands.size(); ++j)
                    if (nb.count(cands[j])) next.push_back(cands[j]);
                if (self(self, next)) return true;
            }
            cur.pop_back();
        }
        return false;
    };
    for (const auto& e : eset) {
        cur.clear();
        bool ok = true;
        for (int x : e) {
            cur.push_back(x);
            if (!extra(cur)) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        std::vector<int> cands;
        for (int y : nbr[e[0]]) {
            if (y <= e.back()) continue;
            bool all = true;
            for (size_t i = 1; i < e.size() && all; ++i) all = nbr[e[i]].count(y) > 0;
            if (all) cands.push_back(y);
        }
        if (rec(rec, cands)) return true;
    }
    return false;
}

inline std::optional<Tuple> find_clique(const IndexStructure& s, int size)
{
    if (!s.sig.edge_arity) return std::nullopt;
    std::vector<Tuple> es(s.edges().begin(), s.edges().end());
    std::optional<Tuple> out;
    for_each_clique_in(es, *s.sig.edge_arity, size, [](const std::vector<int>&) { return true; },
                       [&](const Tuple& c) {
                           out = c;
                           return true;
                       });
    return out;
}

// ---------------------------------------------------------------- validation

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

inline ValidationReport validate_structure(const IndexStructure& s, const ClassSpec& kind)
{
    ValidationReport r;
    auto bad = [&](std::string m) { r.violations.push_back(std::move(m)); };
    int n = s.size();
    std::vector<int> seen(n, 0);
    for (int x = 0; x < n; ++x) {
        int rk = s.rank(x);
        if (rk < 0 || rk >= n || seen[rk]++) bad("order: ranks are not a permutation");
    }
    for (int x = 0; x < n; ++x)
        if (s.color(x) < 0 || s.color(x) >= static_cast<int>(s.sig.colors.size()))
            bad("partition: element " + s.name(x) + " has no color");
    for (size_t i = 0; i < s.sig.colors.size(); ++i)
        for (size_t j = i + 1; j < s.sig.colors.size(); ++j)
            if (s.sig.colors[i] == s.sig.colors[j]) bad("signature: duplicate color " + s.sig.colors[i]);
    if (s.sig.edge_arity.has_value() != s.sig.clique_bound.has_value())
        bad("signature: edge_arity and clique_bound must come together");
    if (s.sig.edge_arity && s.sig.clique_bound && *s.sig.clique_bound <= *s.sig.edge_arity)
        bad("signature: clique_bound must exceed edge_arity");

    switch (kind.kind) {
    case ClassKind::Linear:
        if (s.sig.colors.size() > 1) bad("LINEAR: more than one color");
        break;
    case ClassKind::Kmu:
        if (kind.mu > 0 && static_cast<int>(s.sig.colors.size()) > kind.mu) bad("KMU: more colors than mu");
        break;
    case ClassKind::Knk:
        if (s.sig.edge_arity != kind.k + 1 || s.sig.clique_bound != kind.n + 1)
            bad("KNK: signature does not match (n,k)");
        break;
    case ClassKind::TreeBranch:
        if (!s.sig.has_meet) bad("TREE_BRANCH: no meet");
        break;
    }
    if (kind.kind != ClassKind::Knk && !s.edges().empty()) bad("edges present in an edge-free class");

    if (!s.edges().empty()) {
        int ar = s.sig.edge_arity.value_or(0);
        for (const auto& e : s.edges()) {
            bool okE = static_cast<int>(e.size()) == ar;
            for (size_t i = 0; i < e.size(); ++i) {
                if (e[i] < 0 || e[i] >= n) okE = false;
                if (i && e[i] == e[i - 1]) okE = false;
            }
            if (!okE) bad("edges: malformed edge");
        }
        if (s.sig.clique_bound && ar > 0) {
            if (auto c = find_clique(s, *s.sig.clique_bound)) bad("clique of size " + std::to_string(c->size()));
        }
    }

    if (s.sig.has_meet && n > 0) {
        if (!s.has_meet_table()) {
            bad("meet: table missing");
        } else {
            for (int a = 0; a < n; ++a) {
                if (s.meet(a, a) != a) bad("meet: not idempotent");
                for (int b = 0; b < n; ++b) {
                    int m = s.meet(a, b);
                    if (m < 0 || m >= n) {
                        bad("meet: value out of range");
                        continue;
                    }
                    if (m != s.meet(b, a)) bad("meet: not commutative");
                    if (s.less(a, m) || s.less(b, m)) bad("meet: meet above an argument");
                    for (int c = 0; c < n; ++c)
                        if (s.meet(m, c) != s.meet(a, s.meet(b, c))) bad("meet: not associative");
                }
            }
        }
    }
    std::sort(r.violations.begin(), r.violations.end());
    r.violations.erase(std::unique(r.violations.begin(), r.violations.end()), r.violations.end());
    return r;
}

// ---------------------------------------------------------------- tuples

/// Increasing n-tuples, lexicographic in element ids.
inline std::vector<Tuple> increasing_tuples(const IndexStructure& s, int n)
{
    std::vector<Tuple> out;
    if (n < 0) return out;
    auto ord = s.order();
    Tuple cur;
    auto rec = [&](auto&& self, size_t from) -> void {
        if (static_cast<int>(cur.size()) == n) {
            out.push_back(cur);
            return;
        }
        for (size_t i = from; i < ord.size(); ++i) {
            cur.push_back(ord[i]);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    std::sort(out.begin(), out.end());
    return out;
}

/// Distinct elements have distinct 1-point types. A single point's type is its
/// color (no reflexive edges, meet(x,x)=x).
inline bool is_separated(const IndexStructure& s)
{
    std::set<int> seen;
    for (int x = 0; x < s.size(); ++x)
        if (!seen.insert(s.color(x)).second) return false;
    return true;
}

/// Restriction to `subset` (closed under meet first). New ids follow old id order.
inline IndexStructure induced_substructure(const IndexStructure& s, std::vector<int> subset,
                                           std::vector<int>* old_ids = nullptr)
{
    std::sort(subset.begin(), subset.end());
    subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
    for (int x : subset)
        if (x < 0 || x >= s.size()) throw InputError("induced_substructure: unknown element");
    if (s.sig.has_meet && s.has_meet_table()) {
        bool grew = true;
        while (grew) {
            grew = false;
            std::set<int> cur(subset.begin(), subset.end());
            for (int a : subset)
                for (int b : subset)
                    if (cur.insert(s.meet(a, b)).second) grew = true;
            subset.assign(cur.begin(), cur.end());
        }
    }
    std::vector<int> by_rank = subset;
    std::sort(by_rank.begin(), by_rank.end(), [&](int a, int b) { return s.less(a, b); });
    IndexStructure t(s.sig);
    std::map<int, int> nid;
    for (int x : subset) nid[x] = -1;
    // ids in old-id order, ranks from order
    std::map<int, int> rk;
    for (size_t i = 0; i < by_rank.size(); ++i) rk[by_rank[i]] = static_cast<int>(i);
    // add in rank order, then fix ids by construction order = old id order
    std::vector<int> tmp_order;
    for (int x : subset) {
        // position = number of already-added elements below x
        int pos = 0;
        for (int y : tmp_order)
            if (s.less(y, x)) ++pos;
        nid[x] = t.add_element(s.name(x), s.color(x), pos, s.depth(x));
        tmp_order.push_back(x);
    }
    for (const auto& e : s.edges()) {
        bool in = true;
        Tuple ne;
        for (int x : e) {
            auto it = nid.find(x);
            if (it == nid.end()) {
                in = false;
                break;
            }
            ne.push_back(it->second);
        }
        if (in) t.add_edge(ne);
    }
    if (t.sig.has_meet) {
        for (int a : subset)
            for (int b : subset) t.set_meet(nid[a], nid[b], nid[s.meet(a, b)]);
    }
    if (old_ids) *old_ids = subset;
    return t;
}

// ---------------------------------------------------------------- builtins

inline IndexStructure colored_chain(const IndexSignature& sig0, int size, bool one_color_each,
                                    const std::string& prefix = "t")
{
    IndexStructure s(sig0);
    for (int i = 0; i < size; ++i) {
        int c = one_color_each ? s.sig.intern("P" + std::to_string(i)) : s.sig.intern("*");
        s.add_element_last(prefix + std::to_string(i), c, 0);
    }
    if (s.sig.has_meet) s.reset_meet_table();
    return s;
}

inline ContextSpec linear_context(int size = 3)
{
    auto cls = ClassSpec::linear();
    return {cls, colored_chain(signature_for(cls), size, false), "linear"};
}

inline ContextSpec kmu_separated_context(int size = 4)
{
    auto cls = ClassSpec::kmu(size);
    return {cls, colored_chain(signature_for(cls), size, true), "kmu-separated"};
}

/// c_{n,k}: singleton colors, no edges.
inline ContextSpec cnk_context(int n, int k, int size = 3)
{
    if (!(n > k && k >= 1)) throw InputError("cnk: need n > k >= 1");
    auto cls = ClassSpec::knk(n, k);
    return {cls, colored_chain(signature_for(cls), size, true),
            "cnk:" + std::to_string(n) + ":" + std::to_string(k)};
}

inline ContextSpec tree_branch_context(int m)
{
    auto cls = ClassSpec::tree_branch();
    return {cls, colored_chain(signature_for(cls), m, false), "tree-branch:" + std::to_string(m)};
}

inline std::vector<std::string> split(const std::string& s, char d)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == d) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline int parse_int(const std::string& s)
{
    try {
        size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size()) throw InputError("bad integer: " + s);
        return v;
    } catch (const std::logic_error&) {
        throw InputError("bad integer: " + s);
    }
}

/// "linear[:size]", "kmu-separated[:size]", "cnk:<n>:<k>[:size]", "tree-branch:<m>".
inline ContextSpec builtin_context(const std::string& spec)
{
    auto p = split(spec, ':');
    if (p[0] == "linear") return linear_context(p.size() > 1 ? parse_int(p[1]) : 3);
    if (p[0] == "kmu-separated") return kmu_separated_context(p.size() > 1 ? parse_int(p[1]) : 4);
    if (p[0] == "cnk" && (p.size() == 3 || p.size() == 4)) {
        int n = parse_int(p[1]), k = parse_int(p[2]);
        if (!(n > k && k >= 2)) throw InputError("cnk: need n > k >= 2");
        return cnk_context(n, k, p.size() == 4 ? parse_int(p[3]) : 3);
    }
    if (p[0] == "tree-branch" && p.size() == 2) return tree_branch_context(parse_int(p[1]));
    throw InputError("unknown builtin context: " + spec);
}

// ---------------------------------------------------------------- JSON

using nlohmann::json;

inline json class_to_json(const ClassSpec& c)
{
    json j;
    j["kind"] = kind_name(c.kind);
    if (c.kind == ClassKind::Knk) {
        j["n"] = c.n;
        j["k"] = c.k;
    }
    if (c.kind == ClassKind::Kmu) j["mu"] = c.mu;
    return j;
}

inline ClassSpec class_from_json(const json& j)
{
    std::string k = j.at("kind").get<std::string>();
    if (k == "LINEAR") return ClassSpec::linear();
    if (k == "KMU") return ClassSpec::kmu(j.value("mu", 0));
    if (k == "KNK") return ClassSpec::knk(j.at("n").get<int>(), j.at("k").get<int>());
    if (k == "TREE_BRANCH") return ClassSpec::tree_branch();
    throw InputError("unknown kind " + k);
}

inline json structure_to_json(const IndexStructure& s, const ClassSpec& c)
{
    json j = class_to_json(c);
    json elems = json::array(), order = json::array(), colors = json::object(), depth = json::object();
    for (int x = 0; x < s.size(); ++x) {
        elems.push_back(s.name(x));
        colors[s.name(x)] = s.sig.colors[s.color(x)];
        if (s.depth(x)) depth[s.name(x)] = s.depth(x);
    }
    for (int x : s.order()) order.push_back(s.name(x));
    j["elements"] = elems;
    j["order"] = order;
    j["palette"] = s.sig.colors;
    j["colors"] = colors;
    json edges = json::array();
    for (const auto& e : s.edges()) {
        json je = json::array();
        for (int x : e) je.push_back(s.name(x));
        edges.push_back(je);
    }
    j["edges"] = edges;
    if (!depth.empty()) j["depth"] = depth;
    return j;
}

inline std::pair<IndexStructure, ClassSpec> structure_from_json(const json& j)
{
    ClassSpec c = class_from_json(j);
    IndexStructure s(signature_for(c));
    if (j.contains("palette"))
        for (const auto& p : j["palette"]) s.sig.intern(p.get<std::string>());
    auto elems = j.at("elements").get<std::vector<std::string>>();
    auto order = j.contains("order") ? j["order"].get<std::vector<std::string>>() : elems;
    if (order.size() != elems.size()) throw InputError("order must list every element once");
    std::map<std::string, int> pos;
    for (size_t i = 0; i < order.size(); ++i)
        if (!pos.emplace(order[i], static_cast<int>(i)).second) throw InputError("duplicate in order");
    std::set<std::string> uniq(elems.begin(), elems.end());
    if (uniq.size() != elems.size()) throw InputError("duplicate element");
    const json& cols = j.at("colors");
    std::vector<std::string> added;
    for (const auto& e : elems) {
        auto it = pos.find(e);
        if (it == pos.end()) throw InputError("element missing from order: " + e);
        if (!cols.contains(e)) throw InputError("element without color: " + e);
        int c2 = s.sig.intern(cols[e].get<std::string>());
        int p = 0;
        for (const auto& a : added)
            if (pos[a] < it->second) ++p;
        int d = j.contains("depth") && j["depth"].contains(e) ? j["depth"][e].get<int>() : 0;
        s.add_element(e, c2, p, d);
        added.push_back(e);
    }
    for (const auto& je : j.value("edges", json::array())) {
        Tuple e;
        for (const auto& nm : je) {
            int x = s.find(nm.get<std::string>());
            if (x < 0) throw InputError("edge mentions unknown element");
            e.push_back(x);
        }
        s.add_edge(e);
    }
    if (s.sig.has_meet) s.reset_meet_table();
    return {s, c};
}

inline json tuple_names(const IndexStructure& s, const Tuple& t)
{
    json a = json::array();
    for (int x : t) a.push_back(s.name(x));
    return a;
}

} // namespace shearlab
