#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace orbitwist {

/// Multiplication table of a finite group: table[g][f] = g*f.
using MultTable = std::vector<std::vector<int>>;

inline bool is_group_table(const MultTable& t, std::string* why = nullptr) {
    int n = int(t.size());
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    for (auto& row : t) {
        if (int(row.size()) != n) return fail("ragged table");
        for (int v : row)
            if (v < 0 || v >= n) return fail("entry out of range");
    }
    // identity
    int e = -1;
    for (int c = 0; c < n; ++c) {
        bool ok = true;
        for (int g = 0; g < n && ok; ++g) ok = t[c][g] == g && t[g][c] == g;
        if (ok) { e = c; break; }
    }
    if (e < 0) return fail("no identity");
    // inverses
    for (int g = 0; g < n; ++g) {
        bool has = false;
        for (int h = 0; h < n; ++h)
            if (t[g][h] == e && t[h][g] == e) { has = true; break; }
        if (!has) return fail("missing inverse");
    }
    // associativity
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                if (t[t[a][b]][c] != t[a][t[b][c]]) return fail("not associative");
    return true;
}

inline int group_identity(const MultTable& t) {
    for (int c = 0; c < int(t.size()); ++c) {
        bool ok = true;
        for (int g = 0; g < int(t.size()) && ok; ++g) ok = t[c][g] == g && t[g][c] == g;
        if (ok) return c;
    }
    throw std::invalid_argument("group_identity: no identity");
}

inline int group_inverse(const MultTable& t, int g) {
    int e = group_identity(t);
    for (int h = 0; h < int(t.size()); ++h)
        if (t[g][h] == e) return h;
    throw std::invalid_argument("group_inverse: missing inverse");
}

inline MultTable cyclic_group(int m) {
    MultTable t(m, std::vector<int>(m));
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) t[a][b] = (a + b) % m;
    return t;
}

inline MultTable product_group(const MultTable& a, const MultTable& b) {
    int na = int(a.size()), nb = int(b.size());
    MultTable t(na * nb, std::vector<int>(na * nb));
    for (int i = 0; i < na * nb; ++i)
        for (int j = 0; j < na * nb; ++j)
            t[i][j] = a[i / nb][j / nb] * nb + b[i % nb][j % nb];
    return t;
}

/// Groups with elements a^k and a^k b, where b a b^{-1} = a^{-1} and
/// b^2 = a^s: dihedral for s = 0, dicyclic for s = n/2.
inline MultTable reflection_type_group(int n, int s) {
    auto idx = [n](int k, int e) { return ((k % n) + n) % n + e * n; };
    MultTable t(2 * n, std::vector<int>(2 * n));
    for (int k1 = 0; k1 < n; ++k1)
        for (int k2 = 0; k2 < n; ++k2) {
            t[idx(k1, 0)][idx(k2, 0)] = idx(k1 + k2, 0);
            t[idx(k1, 0)][idx(k2, 1)] = idx(k1 + k2, 1);
            t[idx(k1, 1)][idx(k2, 0)] = idx(k1 - k2, 1);
            t[idx(k1, 1)][idx(k2, 1)] = idx(k1 - k2 + s, 0);
        }
    return t;
}

inline MultTable dihedral_group(int n) { return reflection_type_group(n, 0); }
inline MultTable dicyclic_group(int n2) {
    if (n2 % 2) throw std::invalid_argument("dicyclic_group: need even rotation order");
    return reflection_type_group(n2, n2 / 2);
}
inline MultTable quaternion_group() { return dicyclic_group(4); }

/// Closure of a set of permutations under composition, as a mult table.
inline MultTable permutation_closure(const std::vector<std::vector<int>>& gens) {
    if (gens.empty()) return cyclic_group(1);
    std::size_t deg = gens[0].size();
    std::vector<int> id(deg);
    std::iota(id.begin(), id.end(), 0);
    auto compose = [&](const std::vector<int>& p, const std::vector<int>& q) {
        std::vector<int> r(deg);
        for (std::size_t i = 0; i < deg; ++i) r[i] = p[q[i]];
        return r;
    };
    std::set<std::vector<int>> seen{id};
    std::vector<std::vector<int>> elems{id};
    for (std::size_t i = 0; i < elems.size(); ++i)
        for (auto& g : gens) {
            auto h = compose(elems[i], g);
            if (seen.insert(h).second) elems.push_back(h);
        }
    std::sort(elems.begin(), elems.end());
    std::map<std::vector<int>, int> index;
    for (std::size_t i = 0; i < elems.size(); ++i) index[elems[i]] = int(i);
    MultTable t(elems.size(), std::vector<int>(elems.size()));
    for (std::size_t a = 0; a < elems.size(); ++a)
        for (std::size_t b = 0; b < elems.size(); ++b)
            t[a][b] = index.at(compose(elems[a], elems[b]));
    return t;
}

inline MultTable symmetric3_group() { return permutation_closure({{1, 0, 2}, {1, 2, 0}}); }
inline MultTable alternating4_group() {
    return permutation_closure({{1, 0, 3, 2}, {1, 2, 0, 3}});
}

inline std::vector<std::vector<int>> conjugacy_classes(const MultTable& t) {
    int n = int(t.size());
    std::vector<int> cls(n, -1);
    std::vector<std::vector<int>> out;
    for (int g = 0; g < n; ++g) {
        if (cls[g] >= 0) continue;
        std::vector<int> c;
        for (int h = 0; h < n; ++h) {
            int x = t[t[h][g]][group_inverse(t, h)];
            if (cls[x] < 0) {
                cls[x] = int(out.size());
                c.push_back(x);
            }
        }
        std::sort(c.begin(), c.end());
        out.push_back(c);
    }
    return out;
}

inline int element_order(const MultTable& t, int g) {
    int e = group_identity(t);
    int x = g, k = 1;
    while (x != e) {
        x = t[x][g];
        ++k;
    }
    return k;
}

inline int group_exponent(const MultTable& t) {
    long long l = 1;
    for (int g = 0; g < int(t.size()); ++g) l = std::lcm(l, (long long)element_order(t, g));
    return int(l);
}

/// Named groups for manifests and fixtures.
inline MultTable named_group(const std::string& name) {
    if (name == "trivial" || name == "Z/1") return cyclic_group(1);
    if (name.rfind("Z/", 0) == 0 && name.find('x') == std::string::npos)
        return cyclic_group(std::stoi(name.substr(2)));
    if (name == "Z/2xZ/2" || name == "(Z/2)^2") return product_group(cyclic_group(2), cyclic_group(2));
    if (name == "(Z/2)^3") {
        auto z2 = cyclic_group(2);
        return product_group(product_group(z2, z2), z2);
    }
    if (name == "Z/2xZ/4") return product_group(cyclic_group(2), cyclic_group(4));
    if (name == "Z/2xZ/6") return product_group(cyclic_group(2), cyclic_group(6));
    if (name == "Z/3xZ/3" || name == "(Z/3)^2") return product_group(cyclic_group(3), cyclic_group(3));
    if (name == "S3") return symmetric3_group();
    if (name == "A4") return alternating4_group();
    if (name == "Q8") return quaternion_group();
    if (name == "Dic3") return dicyclic_group(6);
    if (name.rfind("D", 0) == 0) return dihedral_group(std::stoi(name.substr(1)));
    throw std::invalid_argument("named_group: unknown group " + name);
}

}  // namespace orbitwist
