#pragma once

#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "orbitwist/graded_form.hpp"
#include "orbitwist/groupoid.hpp"
#include "orbitwist/smith.hpp"

namespace orbitwist {

using GroupoidPtr = std::shared_ptr<const FiniteGroupoid>;

/// Gerbe data on a finite groupoid: a 2-cocycle h stored as exponents in
/// Q/Z (h = e^{2 pi i q}), an optional 1-form A per morphism and 2-form B
/// per object when the groupoid carries a chart, and polynomial exponent
/// tails realizing d log h. Forms are stored in cycle units: a stored form
/// w stands for 2 pi i w, so the pair/triangle identities are exact
/// rational statements.
class DeligneCocycle {
  public:
    explicit DeligneCocycle(GroupoidPtr g)
        : g_(std::move(g)),
          q_(g_->n_morphisms(), std::vector<QModZ>(g_->n_morphisms())) {
        if (g_->chart()) {
            chart_ = *g_->chart();
            std::size_t m = g_->n_morphisms();
            lift_.assign(m, std::vector<Polynomial>(m, Polynomial((*chart_)->n())));
            a_.assign(m, GradedForm(*chart_));
            b_.assign(g_->n_objects(), GradedForm(*chart_));
        }
    }

    const FiniteGroupoid& groupoid() const { return *g_; }
    const GroupoidPtr& groupoid_ptr() const { return g_; }
    bool tier_c() const { return chart_.has_value(); }
    const ChartPtr& chart() const {
        if (!chart_) throw std::logic_error("DeligneCocycle: no chart (Tier-D)");
        return *chart_;
    }

    QModZ q(int g, int f) const { return q_.at(g).at(f); }
    void set_q(int g, int f, QModZ v) {
        require_composable(g, f);
        q_.at(g).at(f) = v;
    }

    const Polynomial& lift_tail(int g, int f) const { return lift_.at(g).at(f); }
    void set_lift_tail(int g, int f, Polynomial p) {
        require_composable(g, f);
        if (!p.constant_term().is_zero())
            throw std::invalid_argument("lift tail must have zero constant term");
        lift_.at(g).at(f) = std::move(p);
    }

    const GradedForm& A(int f) const { return a_.at(f); }
    void set_A(int f, GradedForm w) { a_.at(f) = std::move(w); }
    const GradedForm& B(int x) const { return b_.at(x); }
    void set_B(int x, GradedForm w) { b_.at(x) = std::move(w); }

  private:
    void require_composable(int g, int f) const {
        if (!g_->composable(g, f))
            throw std::invalid_argument("DeligneCocycle: pair not composable");
    }

    GroupoidPtr g_;
    std::vector<std::vector<QModZ>> q_;
    std::optional<ChartPtr> chart_;
    std::vector<std::vector<Polynomial>> lift_;  // Tier-C exponent tails
    std::vector<GradedForm> a_;
    std::vector<GradedForm> b_;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks the triangle identity for h, the pair identity for A against
/// d log h, and the curving identity for B, listing every violation.
inline ValidationReport validate_cocycle(const DeligneCocycle& c) {
    ValidationReport rep;
    const auto& G = c.groupoid();
    for (int a = 0; a < G.n_morphisms(); ++a)
        for (int b = 0; b < G.n_morphisms(); ++b) {
            if (!G.composable(a, b)) continue;
            for (int d = 0; d < G.n_morphisms(); ++d) {
                if (!G.composable(b, d)) continue;
                QModZ lhs = c.q(a, b) - c.q(a, G.compose(b, d)) + c.q(G.compose(a, b), d) -
                            c.q(b, d);
                bool tails_ok = true;
                if (c.tier_c()) {
                    Polynomial tp = c.lift_tail(a, b) - c.lift_tail(a, G.compose(b, d)) +
                                    c.lift_tail(G.compose(a, b), d) - c.lift_tail(b, d);
                    tails_ok = tp.is_zero();
                }
                if (!lhs.is_zero() || !tails_ok)
                    rep.violations.push_back("triple (" + std::to_string(a) + "," +
                                             std::to_string(b) + "," + std::to_string(d) +
                                             "): cocycle identity fails");
            }
        }
    if (c.tier_c()) {
        for (int g = 0; g < G.n_morphisms(); ++g)
            for (int f = 0; f < G.n_morphisms(); ++f) {
                if (!G.composable(g, f)) continue;
                GradedForm lhs = c.A(g) + c.A(f) - c.A(G.compose(g, f));
                GradedForm rhs = exterior_d(
                    GradedForm::from_poly(c.chart(), c.lift_tail(g, f)));
                if (lhs != rhs)
                    rep.violations.push_back("pair (" + std::to_string(g) + "," +
                                             std::to_string(f) + "): A vs d log h fails");
            }
        for (int f = 0; f < G.n_morphisms(); ++f) {
            GradedForm lhs = c.B(G.tgt(f)) - c.B(G.src(f));
            if (lhs != exterior_d(c.A(f)))
                rep.violations.push_back("morphism " + std::to_string(f) +
                                         ": curving identity fails");
        }
    }
    return rep;
}

/// Degree-1 Deligne cochain: a phase per morphism (with optional polynomial
/// tail) and a 1-form per object.
struct DeligneCochain {
    std::vector<QModZ> lambda;          // per morphism
    std::vector<Polynomial> lambda_tail;  // per morphism (Tier-C; may be empty)
    std::vector<GradedForm> pi;          // per object (Tier-C; may be empty)
};

inline DeligneCocycle apply_coboundary(const DeligneCocycle& c, const DeligneCochain& w) {
    const auto& G = c.groupoid();
    if (int(w.lambda.size()) != G.n_morphisms())
        throw std::invalid_argument("apply_coboundary: lambda size");
    DeligneCocycle out = c;
    for (int g = 0; g < G.n_morphisms(); ++g)
        for (int f = 0; f < G.n_morphisms(); ++f) {
            if (!G.composable(g, f)) continue;
            out.set_q(g, f, c.q(g, f) + w.lambda[g] + w.lambda[f] - w.lambda[G.compose(g, f)]);
            if (c.tier_c() && !w.lambda_tail.empty()) {
                out.set_lift_tail(g, f, c.lift_tail(g, f) + w.lambda_tail[g] + w.lambda_tail[f] -
                                            w.lambda_tail[G.compose(g, f)]);
            }
        }
    if (c.tier_c()) {
        for (int f = 0; f < G.n_morphisms(); ++f) {
            GradedForm a = c.A(f);
            if (!w.lambda_tail.empty())
                a += exterior_d(GradedForm::from_poly(c.chart(), w.lambda_tail[f]));
            if (!w.pi.empty()) a += w.pi[G.tgt(f)] - w.pi[G.src(f)];
            out.set_A(f, a);
        }
        for (int x = 0; x < G.n_objects(); ++x) {
            GradedForm b = c.B(x);
            if (!w.pi.empty()) b += exterior_d(w.pi[x]);
            out.set_B(x, b);
        }
    }
    return out;
}

/// 3-curvature per object, plus closedness and invariance diagnostics.
inline std::vector<GradedForm> three_curvature(const DeligneCocycle& c, ValidationReport* rep = nullptr) {
    const auto& G = c.groupoid();
    std::vector<GradedForm> omega;
    if (!c.tier_c()) {
        if (rep) rep->violations.push_back("Tier-D input: 3-curvature is identically zero");
        return omega;
    }
    for (int x = 0; x < G.n_objects(); ++x) {
        omega.push_back(exterior_d(c.B(x)));
        if (rep && !exterior_d(omega.back()).is_zero())
            rep->violations.push_back("object " + std::to_string(x) + ": d Omega != 0");
    }
    if (rep)
        for (int f = 0; f < G.n_morphisms(); ++f)
            if (omega[G.src(f)] != omega[G.tgt(f)])
                rep->violations.push_back("morphism " + std::to_string(f) +
                                          ": Omega not invariant");
    return omega;
}

/// Transgressed line data on the inertia groupoid: the transition phase H
/// per inertia morphism, the restricted connection 1-form per inertia
/// object, and the 3-curvature pulled up.
struct TransgressedLine {
    GroupoidPtr parent;
    std::shared_ptr<InertiaGroupoid> inertia;
    std::vector<QModZ> H;                 // per inertia morphism
    std::vector<GradedForm> nabla_prime;  // per inertia object (Tier-C)
    std::vector<GradedForm> omega3;       // per inertia object (Tier-C)
    std::optional<ChartPtr> chart;

    bool tier_c() const { return chart.has_value(); }
};

/// Shift by the constant coboundary that makes the cocycle vanish on
/// identity pairs (q(id, f) = q(f, id) = 0). This realizes the canonical
/// trivialization of the extension along identities; the transgressed data
/// is computed in this normalization.
inline DeligneCocycle normalize_identities(const DeligneCocycle& c) {
    const auto& G = c.groupoid();
    DeligneCochain w;
    w.lambda.assign(G.n_morphisms(), QModZ());
    for (int x = 0; x < G.n_objects(); ++x) {
        int e = G.identity(x);
        w.lambda[e] = -c.q(e, e);
    }
    return apply_coboundary(c, w);
}

/// The transition phase of the transgressed line for a single conjugation,
/// computed from the cocycle: q(f,g) - q(f,f^{-1}) + q(fg,f^{-1}).
inline QModZ transgression_phase(const DeligneCocycle& c, int f, int g) {
    const auto& G = c.groupoid();
    int finv = G.inverse(f);
    return c.q(f, g) - c.q(f, finv) + c.q(G.compose(f, g), finv);
}

/// The same phase by the conjugation route: q(f,g) - q(fgf^{-1},f).
inline QModZ transgression_phase_conj(const DeligneCocycle& c, int f, int g) {
    const auto& G = c.groupoid();
    int conj = G.compose(G.compose(f, g), G.inverse(f));
    return c.q(f, g) - c.q(conj, f);
}

inline TransgressedLine transgress(const DeligneCocycle& raw) {
    auto rep = validate_cocycle(raw);
    if (!rep.ok()) throw std::invalid_argument("transgress: invalid cocycle");
    DeligneCocycle c = normalize_identities(raw);
    TransgressedLine out;
    out.parent = c.groupoid_ptr();
    out.inertia = std::make_shared<InertiaGroupoid>(*out.parent);
    const auto& I = *out.inertia;
    for (int i = 0; i < I.n_morphisms(); ++i) {
        auto [f, src_obj] = I.morphism_data(i);
        int g = I.sector(src_obj);
        QModZ h1 = transgression_phase(c, f, g);
        QModZ h2 = transgression_phase_conj(c, f, g);
        if (h1 != h2) throw std::logic_error("transgress: the two phase routes disagree");
        out.H.push_back(h1);
    }
    if (c.tier_c()) {
        out.chart = c.chart();
        for (int i = 0; i < I.n_objects(); ++i) {
            int g = I.sector(i);
            GradedForm a = c.A(g);
            if (!exterior_d(a).is_zero())
                throw std::logic_error("transgress: restricted connection not flat");
            out.nabla_prime.push_back(a);
            out.omega3.push_back(exterior_d(c.B(I.project_object(i))));
        }
    }
    return out;
}

/// H is a Q/Z-valued 1-cocycle on inertia: multiplicative on composable pairs.
inline bool transgression_multiplicative(const TransgressedLine& t) {
    const auto& I = t.inertia->groupoid();
    for (int j = 0; j < I.n_morphisms(); ++j)
        for (int i = 0; i < I.n_morphisms(); ++i) {
            if (!I.composable(j, i)) continue;
            if (t.H[I.compose(j, i)] != t.H[j] + t.H[i]) return false;
        }
    return true;
}

// ---------------------------------------------------------------------------
// Group cohomology over Z/n via the bar complex and Smith normal form
// ---------------------------------------------------------------------------

struct H2Result {
    std::vector<std::int64_t> divisors;  // nontrivial elementary divisors
    /// One representative cocycle per divisor, as dense exponent tables.
    std::vector<std::vector<std::vector<QModZ>>> generators;
    std::int64_t modulus = 1;

    std::size_t class_count() const {
        std::size_t n = 1;
        for (auto d : divisors) n *= std::size_t(d);
        return n;
    }
    /// Representative of the class with the given generator coefficients.
    std::vector<std::vector<QModZ>> representative(const std::vector<std::int64_t>& coeff) const {
        if (coeff.size() != divisors.size())
            throw std::invalid_argument("H2Result: coefficient count");
        std::size_t g = generators.empty() ? 0 : generators[0].size();
        std::vector<std::vector<QModZ>> q(g, std::vector<QModZ>(g));
        for (std::size_t i = 0; i < coeff.size(); ++i)
            for (std::size_t a = 0; a < g; ++a)
                for (std::size_t b = 0; b < g; ++b)
                    for (std::int64_t k = 0; k < coeff[i]; ++k)
                        q[a][b] += generators[i][a][b];
        return q;
    }
};

/// Elementary divisors of H^2(G, Z/n) together with representative
/// cocycles. Kernel and quotient are computed over Z through Smith normal
/// forms of the bar-complex coboundaries.
inline H2Result group_h2(const MultTable& table, std::int64_t n) {
    if (n < 2) throw std::invalid_argument("group_h2: need modulus >= 2");
    std::string why;
    if (!is_group_table(table, &why)) throw std::invalid_argument("group_h2: " + why);
    std::int64_t g = std::int64_t(table.size());
    std::size_t m1 = std::size_t(g), m2 = std::size_t(g * g), m3 = std::size_t(g * g * g);
    auto pidx = [g](std::int64_t a, std::int64_t b) { return std::size_t(a * g + b); };

    // delta2: C^2 -> C^3, row (a,b,c): q(a,b) - q(a,bc) + q(ab,c) - q(b,c)
    IntMatrix d2(m3, m2);
    for (std::int64_t a = 0; a < g; ++a)
        for (std::int64_t b = 0; b < g; ++b)
            for (std::int64_t c = 0; c < g; ++c) {
                std::size_t row = std::size_t((a * g + b) * g + c);
                d2.at(row, pidx(a, b)) += 1;
                d2.at(row, pidx(a, table[b][c])) -= 1;
                d2.at(row, pidx(table[a][b], c)) += 1;
                d2.at(row, pidx(b, c)) -= 1;
            }
    SmithResult s2 = smith_normal_form(d2, /*track_u=*/false, /*track_v=*/true);

    // Kernel of (delta2 mod n): columns V * diag(s), s_i = n / gcd(d_i, n).
    std::vector<std::int64_t> scale(m2, 1);
    for (std::size_t i = 0; i < s2.divisors.size(); ++i)
        scale[i] = n / std::gcd(s2.divisors[i], n);

    // Relations: delta1 image plus n * Id, expressed in the kernel basis.
    IntMatrix rel(m2, m1 + m2);
    for (std::int64_t a = 0; a < g; ++a)
        for (std::int64_t b = 0; b < g; ++b) {
            rel.at(pidx(a, b), std::size_t(a)) += 1;
            rel.at(pidx(a, b), std::size_t(b)) += 1;
            rel.at(pidx(a, b), std::size_t(table[a][b])) -= 1;
        }
    for (std::size_t i = 0; i < m2; ++i) rel.at(i, m1 + i) = n;

    IntMatrix z = s2.v_inv * rel;
    for (std::size_t i = 0; i < m2; ++i) {
        for (std::size_t j = 0; j < m1 + m2; ++j) {
            if (z.at(i, j) % scale[i] != 0)
                throw std::logic_error("group_h2: relation outside kernel");
            z.at(i, j) /= scale[i];
        }
    }

    SmithResult sz = smith_normal_form(z);
    if (sz.divisors.size() != m2) throw std::logic_error("group_h2: quotient not finite");

    H2Result out;
    out.modulus = n;
    for (std::size_t i = 0; i < m2; ++i) {
        std::int64_t d = sz.divisors[i];
        if (d == 1) continue;
        out.divisors.push_back(d);
        // generator: B * (column i of U^{-1}) with B = V * diag(scale)
        std::vector<std::int64_t> w(m2);
        for (std::size_t r = 0; r < m2; ++r) w[r] = sz.u_inv.at(r, i);
        std::vector<std::vector<QModZ>> q(m1, std::vector<QModZ>(m1));
        for (std::int64_t a = 0; a < g; ++a)
            for (std::int64_t b = 0; b < g; ++b) {
                std::int64_t acc = 0;
                for (std::size_t k = 0; k < m2; ++k)
                    acc = IntMatrix::add(acc,
                                         IntMatrix::mul(s2.v.at(pidx(a, b), k),
                                                        IntMatrix::mul(scale[k], w[k])));
                q[a][b] = QModZ(acc, n);
            }
        out.generators.push_back(std::move(q));
    }
    return out;
}

/// Builds a Tier-D cocycle on the one-object groupoid of G from a dense
/// exponent table.
inline DeligneCocycle cocycle_from_table(GroupoidPtr g,
                                         const std::vector<std::vector<QModZ>>& q) {
    DeligneCocycle c(std::move(g));
    const auto& G = c.groupoid();
    for (int a = 0; a < G.n_morphisms(); ++a)
        for (int b = 0; b < G.n_morphisms(); ++b)
            if (G.composable(a, b)) c.set_q(a, b, q.at(a).at(b));
    return c;
}

/// Quotient of H^2(G, Z/n) by the subgroup of classes that become trivial
/// in H^2(G, U(1)); this is the classification of genuinely distinct twists
/// at the U(1) level. Divisors of the quotient, via Smith normal form.
inline std::vector<std::int64_t> u1_reduced_divisors(const MultTable& table,
                                                     const H2Result& h2, std::int64_t n);

/// Heuristic test for triviality of the class in H^2(G, U(1)): coboundary
/// solvability over Z/N with N = |G| * n, escalating once to N * |G|.
inline bool u1_trivial(const MultTable& table, const std::vector<std::vector<QModZ>>& q,
                       std::int64_t n) {
    std::int64_t g = std::int64_t(table.size());
    std::size_t m1 = std::size_t(g), m2 = std::size_t(g * g);
    for (int round = 0; round < 2; ++round) {
        std::int64_t N = g * n;
        if (round == 1) N *= g;
        IntMatrix a(m2, m1 + m2);
        std::vector<std::int64_t> b(m2, 0);
        for (std::int64_t x = 0; x < g; ++x)
            for (std::int64_t y = 0; y < g; ++y) {
                std::size_t row = std::size_t(x * g + y);
                a.at(row, std::size_t(x)) += 1;
                a.at(row, std::size_t(y)) += 1;
                a.at(row, std::size_t(table[x][y])) -= 1;
                a.at(row, m1 + row) = N;
                Rational v = q.at(x).at(y).value() * Rational(N);
                if (!v.is_integer()) throw std::invalid_argument("u1_trivial: modulus mismatch");
                b[row] = v.num();
            }
        auto s = smith_normal_form(a);
        std::vector<std::int64_t> x;
        if (solve_integer(s, b, x)) return true;
    }
    return false;
}

inline std::vector<std::int64_t> u1_reduced_divisors(const MultTable& table,
                                                     const H2Result& h2, std::int64_t n) {
    std::size_t r = h2.divisors.size();
    if (r == 0) return {};
    // columns: the relations d_i e_i plus the coefficient vectors of every
    // U(1)-trivial class
    std::vector<std::vector<std::int64_t>> trivial;
    std::vector<std::int64_t> coeff(r, 0);
    for (;;) {
        if (u1_trivial(table, h2.representative(coeff), n)) trivial.push_back(coeff);
        std::size_t k = 0;
        while (k < r && ++coeff[k] == h2.divisors[k]) coeff[k++] = 0;
        if (k == r) break;
    }
    IntMatrix rel(r, r + trivial.size());
    for (std::size_t i = 0; i < r; ++i) rel.at(i, i) = h2.divisors[i];
    for (std::size_t j = 0; j < trivial.size(); ++j)
        for (std::size_t i = 0; i < r; ++i) rel.at(i, r + j) = trivial[j][i];
    auto s = smith_normal_form(rel, false, false);
    std::vector<std::int64_t> out;
    for (auto d : s.divisors)
        if (d > 1) out.push_back(d);
    return out;
}

}  // namespace orbitwist
