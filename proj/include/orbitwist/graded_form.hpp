#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "orbitwist/polynomial.hpp"

namespace orbitwist {

/// Local model: polynomial forms on R^n tensored with a Grassmann algebra
/// on k odd generators. `even_vars` are the coordinates, `odd_params` the
/// Grassmann generators (constants under d).
struct Chart {
    std::vector<std::string> even_vars;
    std::vector<std::string> odd_params;

    Chart() = default;
    Chart(std::vector<std::string> ev, std::vector<std::string> od)
        : even_vars(std::move(ev)), odd_params(std::move(od)) {
        check_unique();
    }

    std::size_t n() const { return even_vars.size(); }
    std::size_t k() const { return odd_params.size(); }

    bool operator==(const Chart& o) const {
        return even_vars == o.even_vars && odd_params == o.odd_params;
    }

  private:
    void check_unique() const {
        std::vector<std::string> all = even_vars;
        all.insert(all.end(), odd_params.begin(), odd_params.end());
        std::sort(all.begin(), all.end());
        if (std::adjacent_find(all.begin(), all.end()) != all.end())
            throw std::invalid_argument("Chart: duplicate variable names");
        if (even_vars.size() > 62 || odd_params.size() > 62)
            throw std::invalid_argument("Chart: too many generators");
    }
};

using ChartPtr = std::shared_ptr<const Chart>;

inline ChartPtr make_chart(std::vector<std::string> ev, std::vector<std::string> od) {
    return std::make_shared<const Chart>(std::move(ev), std::move(od));
}

/// Key of one graded monomial: a squarefree product of odd params and dt's.
struct MonoKey {
    std::uint64_t eta = 0;  // bitmask over odd params
    std::uint64_t dt = 0;   // bitmask over coordinate differentials

    bool operator<(const MonoKey& o) const {
        return eta != o.eta ? eta < o.eta : dt < o.dt;
    }
    bool operator==(const MonoKey& o) const { return eta == o.eta && dt == o.dt; }
    int parity() const { return (std::popcount(eta) + std::popcount(dt)) & 1; }
    int dt_degree() const { return std::popcount(dt); }
    int grassmann_degree() const { return std::popcount(eta); }
};

/// Koszul sign for merging two canonical odd-generator words.
/// Returns +1/-1; 0 is signalled by the caller when masks intersect.
inline int koszul_merge_sign(const MonoKey& a, const MonoKey& b) {
    // Rank order: eta_0 < eta_1 < ... < dt_0 < dt_1 < ...
    // Count pairs (x in a, y in b) with rank(x) > rank(y).
    int inversions = 0;
    for (std::uint64_t m = b.eta; m;) {
        int i = std::countr_zero(m);
        m &= m - 1;
        inversions += std::popcount(a.eta >> (i + 1)) + std::popcount(a.dt);
    }
    for (std::uint64_t m = b.dt; m;) {
        int j = std::countr_zero(m);
        m &= m - 1;
        inversions += std::popcount(a.dt >> (j + 1));
    }
    return (inversions & 1) ? -1 : 1;
}

/// Element of the exact graded-commutative algebra over a chart:
/// a sum of (polynomial coefficient) * (Grassmann monomial) * (dt monomial).
/// Monomials are kept squarefree and canonically ordered; zero coefficients
/// are never stored.
class GradedForm {
  public:
    GradedForm() = default;
    explicit GradedForm(ChartPtr chart) : chart_(std::move(chart)) {}

    static GradedForm zero(ChartPtr chart) { return GradedForm(std::move(chart)); }
    static GradedForm scalar(ChartPtr chart, const GaussianRational& c) {
        GradedForm f(chart);
        f.add_term(MonoKey{}, Polynomial::constant(chart->n(), c));
        return f;
    }
    static GradedForm one(ChartPtr chart) { return scalar(std::move(chart), GaussianRational(1)); }
    static GradedForm coordinate(ChartPtr chart, std::size_t i) {
        GradedForm f(chart);
        f.add_term(MonoKey{}, Polynomial::variable(chart->n(), i));
        return f;
    }
    static GradedForm from_poly(ChartPtr chart, const Polynomial& p) {
        GradedForm f(chart);
        f.add_term(MonoKey{}, p);
        return f;
    }
    static GradedForm dt(ChartPtr chart, std::size_t i) {
        if (i >= chart->n()) throw std::invalid_argument("GradedForm: dt index out of range");
        GradedForm f(chart);
        f.add_term(MonoKey{0, std::uint64_t(1) << i},
                   Polynomial::constant(chart->n(), GaussianRational(1)));
        return f;
    }
    static GradedForm eta(ChartPtr chart, std::size_t i) {
        if (i >= chart->k()) throw std::invalid_argument("GradedForm: eta index out of range");
        GradedForm f(chart);
        f.add_term(MonoKey{std::uint64_t(1) << i, 0},
                   Polynomial::constant(chart->n(), GaussianRational(1)));
        return f;
    }

    const ChartPtr& chart() const { return chart_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<MonoKey, Polynomial>& terms() const { return terms_; }

    void add_term(const MonoKey& key, const Polynomial& p) {
        if (p.is_zero()) return;
        auto it = terms_.find(key);
        if (it == terms_.end()) {
            terms_.emplace(key, p);
        } else {
            it->second += p;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    Polynomial component(const MonoKey& key) const {
        auto it = terms_.find(key);
        return it == terms_.end() ? Polynomial(chart_->n()) : it->second;
    }

    /// True when every term has the same total Z/2 parity `par`.
    bool is_homogeneous_parity(int par) const {
        for (auto& [k, p] : terms_)
            if (k.parity() != par) return false;
        return true;
    }
    /// True when every term has dt-degree `deg` and no Grassmann factor.
    bool is_pure_form_degree(int deg) const {
        for (auto& [k, p] : terms_)
            if (k.dt_degree() != deg || k.eta != 0) return false;
        return true;
    }

    int max_dt_degree() const {
        int d = 0;
        for (auto& [k, p] : terms_) d = std::max(d, k.dt_degree());
        return d;
    }

    /// Splits off the component of total parity 0 (even) or 1 (odd).
    GradedForm parity_part(int par) const {
        GradedForm r(chart_);
        for (auto& [k, p] : terms_)
            if (k.parity() == par) r.add_term(k, p);
        return r;
    }

    friend GradedForm operator+(const GradedForm& a, const GradedForm& b) {
        a.check_chart(b);
        GradedForm r = a;
        for (auto& [k, p] : b.terms_) r.add_term(k, p);
        return r;
    }
    friend GradedForm operator-(const GradedForm& a, const GradedForm& b) {
        a.check_chart(b);
        GradedForm r = a;
        for (auto& [k, p] : b.terms_) r.add_term(k, -p);
        return r;
    }
    GradedForm operator-() const {
        GradedForm r(chart_);
        for (auto& [k, p] : terms_) r.add_term(k, -p);
        return r;
    }
    GradedForm operator*(const GaussianRational& c) const {
        GradedForm r(chart_);
        for (auto& [k, p] : terms_) r.add_term(k, p * c);
        return r;
    }
    GradedForm& operator+=(const GradedForm& o) { return *this = *this + o; }
    GradedForm& operator-=(const GradedForm& o) { return *this = *this - o; }

    friend bool operator==(const GradedForm& a, const GradedForm& b) {
        return *a.chart_ == *b.chart_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const GradedForm& a, const GradedForm& b) { return !(a == b); }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::string out;
        for (auto& [k, p] : terms_) {
            if (!out.empty()) out += " + ";
            out += "[" + p.str(chart_->even_vars) + "]";
            for (std::uint64_t m = k.eta; m;) {
                int i = std::countr_zero(m);
                m &= m - 1;
                out += "*" + chart_->odd_params[i];
            }
            for (std::uint64_t m = k.dt; m;) {
                int i = std::countr_zero(m);
                m &= m - 1;
                out += "*d" + chart_->even_vars[i];
            }
        }
        return out;
    }

    void check_chart(const GradedForm& o) const {
        if (!chart_ || !o.chart_ || !(*chart_ == *o.chart_))
            throw std::invalid_argument("GradedForm: chart mismatch");
    }

  private:
    ChartPtr chart_;
    std::map<MonoKey, Polynomial> terms_;
};

/// Exterior (wedge) product. Bilinear, associative, Koszul-signed.
inline GradedForm wedge(const GradedForm& a, const GradedForm& b) {
    a.check_chart(b);
    GradedForm r(a.chart());
    for (auto& [ka, pa] : a.terms())
        for (auto& [kb, pb] : b.terms()) {
            if ((ka.eta & kb.eta) || (ka.dt & kb.dt)) continue;  // squarefree
            MonoKey k{ka.eta | kb.eta, ka.dt | kb.dt};
            int sign = koszul_merge_sign(ka, kb);
            Polynomial p = pa * pb;
            r.add_term(k, sign == 1 ? p : -p);
        }
    return r;
}

/// de Rham differential. Raises dt-degree by one; odd params are constants.
inline GradedForm exterior_d(const GradedForm& a) {
    GradedForm r(a.chart());
    std::size_t n = a.chart()->n();
    for (auto& [k, p] : a.terms()) {
        for (std::size_t v = 0; v < n; ++v) {
            std::uint64_t bit = std::uint64_t(1) << v;
            if (k.dt & bit) continue;
            Polynomial dp = p.derivative(v);
            if (dp.is_zero()) continue;
            // dt_v from the left: passes the eta part and earlier dt's.
            int crossings = std::popcount(k.eta) + std::popcount(k.dt & (bit - 1));
            MonoKey nk{k.eta, k.dt | bit};
            r.add_term(nk, (crossings & 1) ? -dp : dp);
        }
    }
    return r;
}

/// Polynomial map between charts: each target coordinate is a polynomial
/// in the source coordinates. Odd params must agree and pass through.
struct ChartMap {
    ChartPtr source;
    ChartPtr target;
    std::vector<Polynomial> images;  // one per target even var, in source vars

    ChartMap(ChartPtr src, ChartPtr tgt, std::vector<Polynomial> im)
        : source(std::move(src)), target(std::move(tgt)), images(std::move(im)) {
        if (images.size() != target->n())
            throw std::invalid_argument("ChartMap: arity mismatch");
        for (auto& p : images)
            if (p.nvars() != source->n())
                throw std::invalid_argument("ChartMap: image arity mismatch");
        if (source->odd_params != target->odd_params)
            throw std::invalid_argument("ChartMap: odd params must agree");
    }

    static ChartMap identity(ChartPtr c) {
        std::vector<Polynomial> im;
        for (std::size_t i = 0; i < c->n(); ++i) im.push_back(Polynomial::variable(c->n(), i));
        return ChartMap(c, c, std::move(im));
    }
};

/// Pullback along a polynomial chart map; an algebra map commuting with d.
inline GradedForm pullback(const ChartMap& phi, const GradedForm& a) {
    if (!(*a.chart() == *phi.target))
        throw std::invalid_argument("pullback: form not on target chart");
    GradedForm r(phi.source);
    std::size_t ns = phi.source->n();
    for (auto& [k, p] : a.terms()) {
        GradedForm term(phi.source);
        term.add_term(MonoKey{k.eta, 0}, p.substitute(phi.images));
        // Wedge d(phi_j) for each dt_j in ascending order.
        for (std::uint64_t m = k.dt; m;) {
            int j = std::countr_zero(m);
            m &= m - 1;
            GradedForm dphi(phi.source);
            for (std::size_t v = 0; v < ns; ++v) {
                Polynomial dp = phi.images[j].derivative(v);
                if (!dp.is_zero()) dphi.add_term(MonoKey{0, std::uint64_t(1) << v}, dp);
            }
            term = wedge(term, dphi);
        }
        r += term;
    }
    return r;
}

/// Derivation data for contraction: a coefficient form per coordinate dt.
struct Derivation {
    std::map<std::size_t, GradedForm> dt_coeff;
};

/// Contraction i_v: odd derivation of dt-degree -1.
inline GradedForm contract(const Derivation& v, const GradedForm& a) {
    GradedForm r(a.chart());
    for (auto& [k, p] : a.terms()) {
        int pos = std::popcount(k.eta);  // odd factors preceding the first dt
        for (std::uint64_t m = k.dt; m;) {
            int j = std::countr_zero(m);
            m &= m - 1;
            auto it = v.dt_coeff.find(std::size_t(j));
            if (it != v.dt_coeff.end() && !it->second.is_zero()) {
                std::uint64_t bit = std::uint64_t(1) << j;
                GradedForm prefix(a.chart());
                prefix.add_term(MonoKey{k.eta, k.dt & (bit - 1)}, p);
                GradedForm suffix(a.chart());
                suffix.add_term(MonoKey{0, k.dt & ~(bit | (bit - 1))},
                                Polynomial::constant(a.chart()->n(), GaussianRational(1)));
                GradedForm piece = wedge(wedge(prefix, it->second), suffix);
                r += (pos & 1) ? -piece : piece;
            }
            ++pos;
        }
    }
    return r;
}

/// Fiberwise integral over [0,1] in the last even variable.
/// Convention: the fiber dt is extracted from the rightmost slot of the
/// wedge word (Stokes-compatible with the concordance check).
inline GradedForm integrate_fiber(const GradedForm& a) {
    const ChartPtr& big = a.chart();
    if (big->n() == 0) throw std::invalid_argument("integrate_fiber: no fiber variable");
    std::size_t f = big->n() - 1;
    std::uint64_t fbit = std::uint64_t(1) << f;

    auto small = make_chart(
        std::vector<std::string>(big->even_vars.begin(), big->even_vars.end() - 1),
        big->odd_params);

    // Substitutions t_f -> 1 and t_f -> 0 into the smaller variable space.
    std::vector<Polynomial> to_one, to_zero;
    for (std::size_t i = 0; i < f; ++i) {
        to_one.push_back(Polynomial::variable(small->n(), i));
        to_zero.push_back(Polynomial::variable(small->n(), i));
    }
    to_one.push_back(Polynomial::constant(small->n(), GaussianRational(1)));
    to_zero.push_back(Polynomial::constant(small->n(), GaussianRational(0)));

    GradedForm r(small);
    for (auto& [k, p] : a.terms()) {
        if (!(k.dt & fbit)) continue;  // no dt_f factor: integrates to zero
        // Move dt_f to the end: it crosses the dt's with larger index.
        int crossings = std::popcount(k.dt >> (f + 1));
        Polynomial anti = p.antiderivative(f);
        Polynomial val = anti.substitute(to_one) - anti.substitute(to_zero);
        if (val.is_zero()) continue;
        MonoKey nk{k.eta, k.dt & ~fbit};
        r.add_term(nk, (crossings & 1) ? -val : val);
    }
    return r;
}

}  // namespace orbitwist
