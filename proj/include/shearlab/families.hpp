#pragma once

#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qf_type.hpp"
#include "theory.hpp"

namespace shearlab {

/// Parameter family over one orbit: realizations of r over s in J, each sent
/// to a tuple of model elements of constant length.
struct ParamFamily {
    std::shared_ptr<const IndexStructure> J;
    Tuple s;
    QfType r;
    std::vector<Tuple> orbit;   // sorted
    std::vector<Tuple> images;  // aligned with orbit
    std::vector<int> base_params;
    std::vector<int> coords;  // orbit coordinates the images are read from; empty if not a projection

    int size() const { return static_cast<int>(orbit.size()); }
    int image_length() const { return images.empty() ? 0 : static_cast<int>(images.front().size()); }
    int index_of(const Tuple& t) const
    {
        auto it = std::lower_bound(orbit.begin(), orbit.end(), t);
        if (it == orbit.end() || *it != t) return -1;
        return static_cast<int>(it - orbit.begin());
    }
    const Tuple& image(const Tuple& t) const
    {
        int i = index_of(t);
        if (i < 0) throw InputError("tuple outside the family's orbit");
        return images[i];
    }

    json to_json(const ParamModel& m) const
    {
        json asg = json::object();
        for (int i = 0; i < size(); ++i) {
            std::string key;
            for (size_t p = 0; p < orbit[i].size(); ++p) key += (p ? "," : "") + J->name(orbit[i][p]);
            json im = json::array();
            for (int x : images[i]) im.push_back(m.name(x));
            asg[key] = im;
        }
        json bp = json::array();
        for (int x : base_params) bp.push_back(m.name(x));
        return json{{"s", tuple_names(*J, s)}, {"r", r.to_json()}, {"assignment", asg}, {"base_params", bp}};
    }
};

inline ParamFamily make_family(std::shared_ptr<const IndexStructure> J, const Tuple& s, const QfType& r)
{
    ParamFamily f;
    f.J = std::move(J);
    f.s = s;
    f.r = r;
    f.orbit = realizations(*f.J, r, s);
    return f;
}

/// Atomic diagram of `elems` over A in m, canonical up to renaming.
inline std::string model_diagram_key(const ParamModel& m, const Tuple& elems, const std::vector<int>& A)
{
    std::vector<int> distinct;
    std::map<int, int> where;
    std::string k;
    auto add = [&](int x) {
        auto it = where.find(x);
        int id;
        if (it == where.end()) {
            id = static_cast<int>(distinct.size());
            where[x] = id;
            distinct.push_back(x);
        } else {
            id = it->second;
        }
        return id;
    };
    for (int x : elems) k += std::to_string(add(x)) + ",";
    int ne = static_cast<int>(distinct.size());
    k += "|";
    for (int a : A) k += std::to_string(add(a)) + ",";
    k += "|";
    int ar = m.theory.edge_arity();
    int nd = static_cast<int>(distinct.size());
    Tuple e;
    detail::for_each_subset(nd, ar, [&](const std::vector<int>& idx) {
        if (idx[0] >= ne) return;  // entirely inside A: the same for every tuple
        e.clear();
        for (int i : idx) e.push_back(distinct[i]);
        std::sort(e.begin(), e.end());
        if (m.has_edge_sorted(e)) {
            for (int i : idx) k += std::to_string(i) + ".";
            k += ";";
        }
    });
    return k;
}

struct IndiscernibleVerdict {
    bool ok = true;
    std::vector<Tuple> first;   // violating sequences of orbit tuples
    std::vector<Tuple> second;
    std::string detail;
};

/// Sequences of at most `bound` orbit tuples (bound 1 or 2) with equal
/// concatenated qf type over s must have images with equal diagrams over A.
inline IndiscernibleVerdict check_indiscernible(const ParamFamily& f, const ParamModel& m, int bound = 2)
{
    IndiscernibleVerdict v;
    const auto& J = *f.J;
    // Pass 1 keys on the type of the image coordinates only. It is stronger,
    // so success settles the question; on failure rerun with full types.
    bool projected = !f.coords.empty();
    std::map<std::string, std::pair<std::string, std::vector<int>>> seen;  // type key -> (diagram, witness)
    auto test = [&](const std::vector<int>& seq) {
        Tuple all, img;
        for (int i : seq) {
            if (projected)
                for (int c : f.coords) all.push_back(f.orbit[i][c]);
            else
                all.insert(all.end(), f.orbit[i].begin(), f.orbit[i].end());
            img.insert(img.end(), f.images[i].begin(), f.images[i].end());
        }
        Tuple q = all;
        q.insert(q.end(), f.s.begin(), f.s.end());
        std::string tk = std::to_string(seq.size()) + "#" + qf_type_of(StructureView{J}, q, static_cast<int>(all.size())).key();
        std::string dk = model_diagram_key(m, img, f.base_params);
        auto it = seen.find(tk);
        if (it == seen.end()) {
            seen.emplace(tk, std::make_pair(dk, seq));
            return true;
        }
        if (it->second.first == dk) return true;
        v.ok = false;
        for (int i : it->second.second) v.first.push_back(f.orbit[i]);
        for (int i : seq) v.second.push_back(f.orbit[i]);
        v.detail = "equal qf types, different parameter diagrams";
        return false;
    };
    int n = f.size();
    auto run = [&] {
        for (int i = 0; i < n; ++i)
            if (!test({i})) return false;
        if (bound >= 2)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (!test({i, j})) return false;
        return true;
    };
    if (run()) return v;
    if (projected) {
        projected = false;
        seen.clear();
        v = IndiscernibleVerdict{};
        run();
    }
    return v;
}

/// Model with one parameter per index element and J's edges mirrored.
struct Mirror {
    ParamModel model;
    std::vector<int> param;  // J id -> model id
};

inline Mirror build_mirror(const IndexStructure& J, const TheorySpec& theory)
{
    if (J.sig.edge_arity && *J.sig.edge_arity != theory.edge_arity())
        throw InputError("mirror: theory edge arity differs from the index edge arity");
    Mirror mr{ParamModel(theory), {}};
    for (int x = 0; x < J.size(); ++x) mr.param.push_back(mr.model.add_element("a_" + J.name(x)));
    for (const auto& e : J.edges()) {
        Tuple t;
        for (int x : e) t.push_back(mr.param[x]);
        mr.model.add_edge(t);
    }
    return mr;
}

/// Mirror family restricted to the orbit of r over s; images take the
/// coordinates listed in `coords` (all coordinates when empty).
inline ParamFamily mirror_family(std::shared_ptr<const IndexStructure> J, const Mirror& mr, const Tuple& s,
                                 const QfType& r, std::vector<int> coords = {}, std::vector<int> base_params = {})
{
    ParamFamily f = make_family(std::move(J), s, r);
    if (coords.empty()) {
        coords.resize(r.arity);
        std::iota(coords.begin(), coords.end(), 0);
    }
    for (const auto& t : f.orbit) {
        Tuple im;
        for (int c : coords) im.push_back(mr.param[t[c]]);
        f.images.push_back(im);
    }
    f.coords = coords;
    f.base_params = std::move(base_params);
    return f;
}

/// Build the mirror model and the family over the orbit of tp(t, s).
inline std::pair<ParamModel, ParamFamily> build_mirror_family(const IndexStructure& J, const TheorySpec& theory,
                                                              const Tuple& t, const Tuple& s)
{
    Mirror mr = build_mirror(J, theory);
    auto Jp = std::make_shared<const IndexStructure>(J);
    ParamFamily f = mirror_family(Jp, mr, s, qf_type(t, s, J));
    return {mr.model, f};
}

// ------------------------------------------------------------ equality patterns

struct EqualityPattern {
    struct Entry {
        PairQfType type;
        std::set<std::pair<int, int>> eq;
    };
    std::map<std::string, Entry> entries;  // keyed by the pair type's key()

    const std::set<std::pair<int, int>>* find(const QfType& q) const
    {
        auto it = entries.find(q.key());
        return it == entries.end() ? nullptr : &it->second.eq;
    }
    bool diagonal_only() const
    {
        for (const auto& [k, e] : entries)
            for (auto [i, j] : e.eq)
                if (i != j) return false;
        return true;
    }
    json to_json() const
    {
        json out = json::array();
        std::vector<std::pair<std::string, const Entry*>> rows;
        for (const auto& [k, e] : entries) rows.push_back({e.type.serialize(), &e});
        std::sort(rows.begin(), rows.end());
        for (const auto& [ser, e] : rows) {
            json eq = json::array();
            for (auto [i, j] : e->eq) eq.push_back({i, j});
            out.push_back(json{{"pair_type", e->type.to_json()}, {"equal", eq}});
        }
        return out;
    }
};

inline QfType pair_type_in(const IndexStructure& J, const Tuple& a, const Tuple& b, const Tuple& s)
{
    Tuple q = a;
    q.insert(q.end(), b.begin(), b.end());
    q.insert(q.end(), s.begin(), s.end());
    return qf_type_of(StructureView{J}, q, static_cast<int>(a.size() + b.size()));
}

struct PatternError : InputError {
    using InputError::InputError;
};

/// Coordinate equalities per realized pair type; throws PatternError naming
/// the pair type when two realizing pairs disagree.
inline EqualityPattern extract_equality_pattern(const ParamFamily& f)
{
    EqualityPattern p;
    const auto& J = *f.J;
    int L = f.image_length();
    for (int a = 0; a < f.size(); ++a)
        for (int b = 0; b < f.size(); ++b) {
            QfType q = pair_type_in(J, f.orbit[a], f.orbit[b], f.s);
            std::set<std::pair<int, int>> eq;
            for (int i = 0; i < L; ++i)
                for (int j = 0; j < L; ++j)
                    if (f.images[a][i] == f.images[b][j]) eq.insert({i, j});
            std::string k = q.key();
            auto it = p.entries.find(k);
            if (it == p.entries.end()) {
                p.entries.emplace(k, EqualityPattern::Entry{{q, f.r.arity}, eq});
            } else if (it->second.eq != eq) {
                throw PatternError("equality pattern disagrees on pair type " + q.serialize());
            }
        }
    return p;
}

/// Union-find family: fresh parameters per class of (tuple, coordinate)
/// under the pattern's equalities. The model is edge-free.
inline std::pair<ParamModel, ParamFamily> family_from_pattern(std::shared_ptr<const IndexStructure> J, const Tuple& s,
                                                              const QfType& r, const EqualityPattern& pat, int L,
                                                              const TheorySpec& theory = TheorySpec::random_graph())
{
    ParamFamily f = make_family(std::move(J), s, r);
    int n = f.size();
    std::vector<int> parent(n * L);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const auto* eq = pat.find(pair_type_in(*f.J, f.orbit[a], f.orbit[b], f.s));
            if (!eq) continue;
            for (auto [i, j] : *eq) {
                int x = find(a * L + i), y = find(b * L + j);
                if (x != y) parent[std::max(x, y)] = std::min(x, y);
            }
        }
    ParamModel m(theory);
    std::map<int, int> id;
    for (int a = 0; a < n; ++a) {
        Tuple im;
        for (int i = 0; i < L; ++i) {
            int root = find(a * L + i);
            auto it = id.find(root);
            if (it == id.end()) it = id.emplace(root, m.add_element("b" + std::to_string(id.size()))).first;
            im.push_back(it->second);
        }
        f.images.push_back(im);
    }
    return {m, f};
}

/// Transitivity over every triple of orbit tuples: eq(t1,t2) then eq(t2,t3)
/// must give eq(t1,t3). Returns a description of the first failure.
inline std::optional<std::string> check_pattern_coherence(const EqualityPattern& pat, const IndexStructure& J,
                                                          const Tuple& s, const std::vector<Tuple>& orbit, int L)
{
    int n = static_cast<int>(orbit.size());
    std::vector<std::vector<const std::set<std::pair<int, int>>*>> eq(n, std::vector<const std::set<std::pair<int, int>>*>(n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) eq[a][b] = pat.find(pair_type_in(J, orbit[a], orbit[b], s));
    for (int a = 0; a < n; ++a) {
        if (!eq[a][a]) return "pair type of a tuple with itself missing";
        for (int i = 0; i < L; ++i)
            if (!eq[a][a]->count({i, i})) return "diagonal equality missing";
    }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (!eq[a][b]) continue;
            for (auto [i, j] : *eq[a][b])
                if (!eq[b][a] || !eq[b][a]->count({j, i})) return "pattern not symmetric";
            for (int c = 0; c < n; ++c) {
                if (!eq[b][c]) continue;
                for (auto [i, j] : *eq[a][b])
                    for (int l = 0; l < L; ++l)
                        if (eq[b][c]->count({j, l}) && (!eq[a][c] || !eq[a][c]->count({i, l})))
                            return "transitivity fails through " + J.name(orbit[b][0]) + "...";
            }
        }
    return std::nullopt;
}

} // namespace shearlab
