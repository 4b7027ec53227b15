#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "orbitwist/graded_form.hpp"
#include "orbitwist/groups.hpp"

namespace orbitwist {

/// Finite groupoid with dense integer ids. Composition is stored as a dense
/// table: compose(g, f) = g o f, defined exactly when src(g) = tgt(f).
/// Objects may optionally carry a single shared chart (the Tier-C case).
class FiniteGroupoid {
  public:
    FiniteGroupoid() = default;
    FiniteGroupoid(int n_objects, std::vector<int> src, std::vector<int> tgt,
                   std::vector<std::vector<int>> compose_table)
        : n_objects_(n_objects), src_(std::move(src)), tgt_(std::move(tgt)),
          compose_(std::move(compose_table)) {
        finish_build();
    }

    int n_objects() const { return n_objects_; }
    int n_morphisms() const { return int(src_.size()); }
    int src(int f) const { return src_.at(f); }
    int tgt(int f) const { return tgt_.at(f); }
    int identity(int x) const { return id_.at(x); }
    int inverse(int f) const { return inv_.at(f); }
    bool is_identity(int f) const { return id_.at(src(f)) == f; }

    bool composable(int g, int f) const { return src_.at(g) == tgt_.at(f); }
    int compose(int g, int f) const {
        if (!composable(g, f)) throw std::invalid_argument("FiniteGroupoid: not composable");
        return compose_.at(g).at(f);
    }

    const std::optional<ChartPtr>& chart() const { return chart_; }
    void set_chart(ChartPtr c) { chart_ = std::move(c); }

    std::vector<int> automorphisms(int x) const {
        std::vector<int> out;
        for (int f = 0; f < n_morphisms(); ++f)
            if (src_[f] == x && tgt_[f] == x) out.push_back(f);
        return out;
    }
    std::vector<int> hom(int x, int y) const {
        std::vector<int> out;
        for (int f = 0; f < n_morphisms(); ++f)
            if (src_[f] == x && tgt_[f] == y) out.push_back(f);
        return out;
    }

    /// Checks identity, inverse and associativity laws; throws on defects.
    void validate() const {
        for (int x = 0; x < n_objects_; ++x) {
            int e = id_.at(x);
            if (src_[e] != x || tgt_[e] != x)
                throw std::logic_error("groupoid: identity endpoints wrong");
        }
        for (int f = 0; f < n_morphisms(); ++f) {
            if (compose(f, id_[src_[f]]) != f || compose(id_[tgt_[f]], f) != f)
                throw std::logic_error("groupoid: identity law fails");
            int g = inv_.at(f);
            if (compose(g, f) != id_[src_[f]] || compose(f, g) != id_[tgt_[f]])
                throw std::logic_error("groupoid: inverse law fails");
        }
        for (int a = 0; a < n_morphisms(); ++a)
            for (int b = 0; b < n_morphisms(); ++b) {
                if (!composable(a, b)) continue;
                for (int c = 0; c < n_morphisms(); ++c) {
                    if (!composable(b, c)) continue;
                    if (compose(compose(a, b), c) != compose(a, compose(b, c)))
                        throw std::logic_error("groupoid: associativity fails");
                }
            }
    }

    std::vector<std::pair<int, int>> composable_pairs() const {
        std::vector<std::pair<int, int>> out;
        for (int g = 0; g < n_morphisms(); ++g)
            for (int f = 0; f < n_morphisms(); ++f)
                if (composable(g, f)) out.emplace_back(g, f);
        return out;
    }

  private:
    void finish_build() {
        int m = n_morphisms();
        if (int(tgt_.size()) != m || int(compose_.size()) != m)
            throw std::invalid_argument("FiniteGroupoid: inconsistent sizes");
        // identities: e with e o e = e and e neutral
        id_.assign(n_objects_, -1);
        for (int e = 0; e < m; ++e) {
            if (src_[e] != tgt_[e]) continue;
            bool neutral = true;
            for (int f = 0; f < m && neutral; ++f) {
                if (src_[f] == src_[e] && compose_[f][e] != f) neutral = false;
                if (tgt_[f] == src_[e] && compose_[e][f] != f) neutral = false;
            }
            if (neutral) {
                if (id_[src_[e]] >= 0) throw std::invalid_argument("groupoid: two identities");
                id_[src_[e]] = e;
            }
        }
        for (int x = 0; x < n_objects_; ++x)
            if (id_[x] < 0) throw std::invalid_argument("groupoid: object without identity");
        inv_.assign(m, -1);
        for (int f = 0; f < m; ++f) {
            for (int g = 0; g < m; ++g) {
                if (src_[g] != tgt_[f] || tgt_[g] != src_[f]) continue;
                if (compose_[g][f] == id_[src_[f]] && compose_[f][g] == id_[tgt_[f]]) {
                    inv_[f] = g;
                    break;
                }
            }
            if (inv_[f] < 0) throw std::invalid_argument("groupoid: morphism without inverse");
        }
    }

    int n_objects_ = 0;
    std::vector<int> src_, tgt_;
    std::vector<std::vector<int>> compose_;
    std::vector<int> id_, inv_;
    std::optional<ChartPtr> chart_;
};

/// One-object groupoid from a group multiplication table.
inline FiniteGroupoid from_group(const MultTable& table) {
    std::string why;
    if (!is_group_table(table, &why)) throw std::invalid_argument("from_group: " + why);
    int n = int(table.size());
    return FiniteGroupoid(1, std::vector<int>(n, 0), std::vector<int>(n, 0), table);
}

/// Action groupoid of a group acting on a finite set.
/// action[g][x] = g . x; morphisms are pairs (g, x): x -> g.x.
inline FiniteGroupoid action_groupoid(const MultTable& table,
                                      const std::vector<std::vector<int>>& action) {
    std::string why;
    if (!is_group_table(table, &why)) throw std::invalid_argument("action_groupoid: " + why);
    int ng = int(table.size());
    if (int(action.size()) != ng) throw std::invalid_argument("action_groupoid: action size");
    int np = action.empty() ? 0 : int(action[0].size());
    int e = group_identity(table);
    for (int x = 0; x < np; ++x)
        if (action[e][x] != x) throw std::invalid_argument("action_groupoid: identity acts nontrivially");
    for (int g = 0; g < ng; ++g)
        for (int h = 0; h < ng; ++h)
            for (int x = 0; x < np; ++x)
                if (action[table[g][h]][x] != action[g][action[h][x]])
                    throw std::invalid_argument("action_groupoid: not an action");

    auto mid = [np](int g, int x) { return g * np + x; };
    int m = ng * np;
    std::vector<int> src(m), tgt(m);
    std::vector<std::vector<int>> comp(m, std::vector<int>(m, -1));
    for (int g = 0; g < ng; ++g)
        for (int x = 0; x < np; ++x) {
            src[mid(g, x)] = x;
            tgt[mid(g, x)] = action[g][x];
        }
    for (int g = 0; g < ng; ++g)
        for (int x = 0; x < np; ++x)
            for (int h = 0; h < ng; ++h) {
                // (g, h.x) o (h, x) = (g h, x)
                comp[mid(g, action[h][x])][mid(h, x)] = mid(table[g][h], x);
            }
    // compose table must be -1 off the composable locus; fix shape
    FiniteGroupoid G(np, src, tgt, comp);
    return G;
}

/// Pair groupoid on n objects: exactly one morphism between any two objects.
inline FiniteGroupoid pair_groupoid(int n) {
    if (n < 1) throw std::invalid_argument("pair_groupoid: need n >= 1");
    auto mid = [n](int y, int x) { return y * n + x; };  // morphism x -> y
    int m = n * n;
    std::vector<int> src(m), tgt(m);
    std::vector<std::vector<int>> comp(m, std::vector<int>(m, -1));
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            src[mid(y, x)] = x;
            tgt[mid(y, x)] = y;
        }
    for (int z = 0; z < n; ++z)
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x) comp[mid(z, y)][mid(y, x)] = mid(z, x);
    return FiniteGroupoid(n, src, tgt, comp);
}

inline FiniteGroupoid disjoint_union(const FiniteGroupoid& a, const FiniteGroupoid& b) {
    int no = a.n_objects() + b.n_objects();
    int ma = a.n_morphisms(), mb = b.n_morphisms();
    std::vector<int> src(ma + mb), tgt(ma + mb);
    std::vector<std::vector<int>> comp(ma + mb, std::vector<int>(ma + mb, -1));
    for (int f = 0; f < ma; ++f) {
        src[f] = a.src(f);
        tgt[f] = a.tgt(f);
    }
    for (int f = 0; f < mb; ++f) {
        src[ma + f] = a.n_objects() + b.src(f);
        tgt[ma + f] = a.n_objects() + b.tgt(f);
    }
    for (int g = 0; g < ma; ++g)
        for (int f = 0; f < ma; ++f)
            if (a.composable(g, f)) comp[g][f] = a.compose(g, f);
    for (int g = 0; g < mb; ++g)
        for (int f = 0; f < mb; ++f)
            if (b.composable(g, f)) comp[ma + g][ma + f] = ma + b.compose(g, f);
    return FiniteGroupoid(no, src, tgt, comp);
}

/// Partition of objects into connected components, deterministically ordered
/// by least object id.
inline std::vector<std::vector<int>> connected_components(const FiniteGroupoid& G) {
    std::vector<int> parent(G.n_objects());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int f = 0; f < G.n_morphisms(); ++f) {
        int a = find(G.src(f)), b = find(G.tgt(f));
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::map<int, std::vector<int>> buckets;
    for (int x = 0; x < G.n_objects(); ++x) buckets[find(x)].push_back(x);
    std::vector<std::vector<int>> out;
    for (auto& [root, xs] : buckets) out.push_back(xs);
    return out;
}

/// Inertia groupoid: objects are pairs (x, g: x -> x); morphisms are pairs
/// (f, (x, g)) with f: x -> x', mapping to (x', f g f^{-1}).
class InertiaGroupoid {
  public:
    explicit InertiaGroupoid(const FiniteGroupoid& parent) : parent_(&parent) {
        for (int x = 0; x < parent.n_objects(); ++x)
            for (int g : parent.automorphisms(x)) objects_.emplace_back(x, g);
        std::sort(objects_.begin(), objects_.end());
        std::map<std::pair<int, int>, int> oindex;
        for (int i = 0; i < int(objects_.size()); ++i) oindex[objects_[i]] = i;

        // morphisms: (f, source inertia object)
        std::vector<int> src, tgt;
        for (int i = 0; i < int(objects_.size()); ++i) {
            auto [x, g] = objects_[i];
            for (int f = 0; f < parent.n_morphisms(); ++f) {
                if (parent.src(f) != x) continue;
                int g2 = parent.compose(parent.compose(f, g), parent.inverse(f));
                morphisms_.emplace_back(f, i);
                src.push_back(i);
                tgt.push_back(oindex.at({parent.tgt(f), g2}));
            }
        }
        std::vector<std::vector<int>> comp(morphisms_.size(),
                                           std::vector<int>(morphisms_.size(), -1));
        std::map<std::pair<int, int>, int> mindex;
        for (int i = 0; i < int(morphisms_.size()); ++i) mindex[morphisms_[i]] = i;
        for (int j = 0; j < int(morphisms_.size()); ++j)
            for (int i = 0; i < int(morphisms_.size()); ++i) {
                if (src[j] != tgt[i]) continue;
                int f = parent.compose(morphisms_[j].first, morphisms_[i].first);
                comp[j][i] = mindex.at({f, src[i]});
            }
        g_ = FiniteGroupoid(int(objects_.size()), src, tgt, std::move(comp));
        if (parent.chart()) g_.set_chart(*parent.chart());
    }

    const FiniteGroupoid& groupoid() const { return g_; }
    const FiniteGroupoid& parent() const { return *parent_; }
    int n_objects() const { return int(objects_.size()); }
    int n_morphisms() const { return int(morphisms_.size()); }

    /// (base object, automorphism) of an inertia object.
    std::pair<int, int> object_data(int i) const { return objects_.at(i); }
    /// (parent morphism, source inertia object) of an inertia morphism.
    std::pair<int, int> morphism_data(int i) const { return morphisms_.at(i); }

    int project_object(int i) const { return objects_.at(i).first; }     // p
    int sector(int i) const { return objects_.at(i).second; }
    int project_morphism(int i) const { return morphisms_.at(i).first; }  // p
    /// i: X -> Lambda X, x |-> (x, id_x).
    int include_object(int x) const {
        auto it = std::lower_bound(objects_.begin(), objects_.end(),
                                   std::make_pair(x, parent_->identity(x)));
        return int(it - objects_.begin());
    }

    int find_object(int x, int g) const {
        auto it = std::lower_bound(objects_.begin(), objects_.end(), std::make_pair(x, g));
        if (it == objects_.end() || *it != std::make_pair(x, g))
            throw std::invalid_argument("InertiaGroupoid: no such object");
        return int(it - objects_.begin());
    }

  private:
    const FiniteGroupoid* parent_;
    FiniteGroupoid g_;
    std::vector<std::pair<int, int>> objects_;
    std::vector<std::pair<int, int>> morphisms_;
};

inline InertiaGroupoid inertia(const FiniteGroupoid& G) { return InertiaGroupoid(G); }

/// Functor between finite groupoids, given on objects and morphisms.
struct GroupoidFunctor {
    const FiniteGroupoid* source = nullptr;
    const FiniteGroupoid* target = nullptr;
    std::vector<int> obj_map;
    std::vector<int> mor_map;

    void validate() const {
        if (int(obj_map.size()) != source->n_objects() ||
            int(mor_map.size()) != source->n_morphisms())
            throw std::invalid_argument("GroupoidFunctor: size mismatch");
        for (int f = 0; f < source->n_morphisms(); ++f) {
            if (target->src(mor_map[f]) != obj_map[source->src(f)] ||
                target->tgt(mor_map[f]) != obj_map[source->tgt(f)])
                throw std::invalid_argument("GroupoidFunctor: endpoints not preserved");
        }
        for (int x = 0; x < source->n_objects(); ++x)
            if (mor_map[source->identity(x)] != target->identity(obj_map[x]))
                throw std::invalid_argument("GroupoidFunctor: identities not preserved");
        for (int g = 0; g < source->n_morphisms(); ++g)
            for (int f = 0; f < source->n_morphisms(); ++f)
                if (source->composable(g, f) &&
                    mor_map[source->compose(g, f)] != target->compose(mor_map[g], mor_map[f]))
                    throw std::invalid_argument("GroupoidFunctor: composition not preserved");
    }
};

/// Morita check at finite scale: fully faithful and essentially surjective.
inline bool check_morita(const GroupoidFunctor& F) {
    F.validate();
    const auto& S = *F.source;
    const auto& T = *F.target;
    // fully faithful: Hom(x,y) -> Hom(Fx,Fy) bijective
    for (int x = 0; x < S.n_objects(); ++x)
        for (int y = 0; y < S.n_objects(); ++y) {
            auto hs = S.hom(x, y);
            auto ht = T.hom(F.obj_map[x], F.obj_map[y]);
            if (hs.size() != ht.size()) return false;
            std::vector<int> images;
            for (int f : hs) images.push_back(F.mor_map[f]);
            std::sort(images.begin(), images.end());
            if (std::adjacent_find(images.begin(), images.end()) != images.end()) return false;
        }
    // essentially surjective: every target object isomorphic to some image
    for (int y = 0; y < T.n_objects(); ++y) {
        bool hit = false;
        for (int x = 0; x < S.n_objects() && !hit; ++x)
            if (!T.hom(F.obj_map[x], y).empty()) hit = true;
        if (!hit) return false;
    }
    return true;
}

}  // namespace orbitwist
