#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "orbitwist/graded_form.hpp"
#include "orbitwist/grassmann.hpp"

namespace orbitwist {

/// Polynomial in one even variable t with Grassmann-algebra coefficients.
class GrassmannPoly {
  public:
    GrassmannPoly() = default;
    explicit GrassmannPoly(std::vector<GrassmannValue> coeffs) : c_(std::move(coeffs)) { trim(); }

    static GrassmannPoly constant(const GrassmannValue& v) { return GrassmannPoly({v}); }
    static GrassmannPoly t_power(int d, const GrassmannValue& v) {
        std::vector<GrassmannValue> c(d + 1);
        c[d] = v;
        return GrassmannPoly(std::move(c));
    }

    bool is_zero() const { return c_.empty(); }
    int degree() const { return int(c_.size()) - 1; }
    GrassmannValue coeff(std::size_t d) const {
        return d < c_.size() ? c_[d] : GrassmannValue();
    }

    friend GrassmannPoly operator+(const GrassmannPoly& a, const GrassmannPoly& b) {
        std::vector<GrassmannValue> c(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(i) + b.coeff(i);
        return GrassmannPoly(std::move(c));
    }
    friend GrassmannPoly operator-(const GrassmannPoly& a, const GrassmannPoly& b) {
        std::vector<GrassmannValue> c(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(i) - b.coeff(i);
        return GrassmannPoly(std::move(c));
    }
    GrassmannPoly operator-() const {
        std::vector<GrassmannValue> c(c_.size());
        for (std::size_t i = 0; i < c_.size(); ++i) c[i] = -c_[i];
        return GrassmannPoly(std::move(c));
    }
    friend bool operator==(const GrassmannPoly& a, const GrassmannPoly& b) {
        return a.c_ == b.c_;
    }
    friend bool operator!=(const GrassmannPoly& a, const GrassmannPoly& b) { return !(a == b); }

    GrassmannPoly derivative() const {
        if (c_.size() <= 1) return GrassmannPoly();
        std::vector<GrassmannValue> c(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i)
            c[i - 1] = c_[i] * GaussianRational(std::int64_t(i));
        return GrassmannPoly(std::move(c));
    }

    /// Antiderivative normalized to vanish at t = 0.
    GrassmannPoly antiderivative() const {
        if (c_.empty()) return GrassmannPoly();
        std::vector<GrassmannValue> c(c_.size() + 1);
        for (std::size_t i = 0; i < c_.size(); ++i)
            c[i + 1] = c_[i] * GaussianRational(Rational(1, std::int64_t(i + 1)));
        return GrassmannPoly(std::move(c));
    }

    /// Evaluation by finite Taylor expansion around the rational base point.
    GrassmannValue eval_taylor(const Rational& base, const GrassmannValue& nil) const {
        GrassmannValue acc;
        GrassmannPoly der = *this;
        GrassmannValue nil_pow = GrassmannValue::scalar(GaussianRational(1));
        Rational fact(1);
        for (int j = 0;; ++j) {
            if (j > 0) {
                nil_pow = nil_pow * nil;
                fact *= Rational(j);
                if (nil_pow.is_zero()) break;
            }
            GrassmannValue dj;  // der evaluated at the rational base
            Rational tp(1);
            for (std::size_t d = 0; d < der.c_.size(); ++d) {
                dj += der.c_[d] * GaussianRational(tp);
                tp *= base;
            }
            acc += dj * nil_pow * GaussianRational(Rational(1) / fact);
            der = der.derivative();
            if (der.is_zero()) break;
        }
        return acc;
    }

    /// Evaluation by Horner's scheme directly in the Grassmann algebra.
    GrassmannValue eval_horner(const GrassmannValue& x) const {
        GrassmannValue acc;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

  private:
    void trim() {
        while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    }
    std::vector<GrassmannValue> c_;
};

/// u = f + theta*g on S x R^{1|1}, S = R^{0|k}.
struct SuperFunction {
    GrassmannPoly f;
    GrassmannPoly g;

    bool is_zero() const { return f.is_zero() && g.is_zero(); }
    friend SuperFunction operator+(const SuperFunction& a, const SuperFunction& b) {
        return {a.f + b.f, a.g + b.g};
    }
    friend SuperFunction operator-(const SuperFunction& a, const SuperFunction& b) {
        return {a.f - b.f, a.g - b.g};
    }
    friend bool operator==(const SuperFunction& a, const SuperFunction& b) {
        return a.f == b.f && a.g == b.g;
    }
};

/// An S-point of R^{1|1}: even coordinate with nilpotent correction plus an
/// odd coordinate.
struct SuperPoint {
    Rational base;
    GrassmannValue even_nil;  // even, nilpotent
    GrassmannValue odd;       // odd

    SuperPoint() = default;
    SuperPoint(Rational b, GrassmannValue en, GrassmannValue od)
        : base(std::move(b)), even_nil(std::move(en)), odd(std::move(od)) {
        if (!even_nil.is_nilpotent() || !even_nil.is_even())
            throw std::invalid_argument("SuperPoint: even part must be even nilpotent");
        if (!odd.is_odd() && !odd.is_zero())
            throw std::invalid_argument("SuperPoint: odd part must be odd");
    }
    static SuperPoint at(Rational t) { return SuperPoint(std::move(t), {}, {}); }

    GrassmannValue even_full() const {
        return GrassmannValue::scalar(GaussianRational(base)) + even_nil;
    }
    friend bool operator==(const SuperPoint& a, const SuperPoint& b) {
        return a.base == b.base && a.even_nil == b.even_nil && a.odd == b.odd;
    }
};

/// Superinterval [b, a]; a is the incoming endpoint, b the outgoing one,
/// and a >= b modulo nilpotents.
struct SuperInterval {
    SuperPoint out_point;  // b
    SuperPoint in_point;   // a

    SuperInterval(SuperPoint b, SuperPoint a)
        : out_point(std::move(b)), in_point(std::move(a)) {
        if (in_point.base < out_point.base)
            throw std::invalid_argument("SuperInterval: need a >= b modulo nilpotents");
    }

    friend bool operator==(const SuperInterval& x, const SuperInterval& y) {
        return x.out_point == y.out_point && x.in_point == y.in_point;
    }
};

/// D = d_theta - theta * d_t applied to u = f + theta*g.
inline SuperFunction apply_D(const SuperFunction& u) {
    return {u.g, -u.f.derivative()};
}

/// Primitive v with D(v) = u: v = theta*f - G, dG/dt = g, G(0) = 0.
inline SuperFunction primitive(const SuperFunction& u) {
    return {-u.g.antiderivative(), u.f};
}

inline GrassmannValue evaluate(const SuperFunction& v, const SuperPoint& p) {
    GrassmannValue fv = v.f.eval_taylor(p.base, p.even_nil);
    GrassmannValue gv = v.g.eval_taylor(p.base, p.even_nil);
    return fv + p.odd * gv;
}

/// Berezin integral over the superinterval via the fundamental theorem:
/// returns v(b) - v(a) for any primitive v of u.
inline GrassmannValue integrate_ftc(const SuperFunction& u, const SuperInterval& J) {
    SuperFunction v = primitive(u);
    return evaluate(v, J.out_point) - evaluate(v, J.in_point);
}

/// Independent oracle for the same integral, assembled endpoint by endpoint:
/// b1*f(b0) - a1*f(a0) + G(a0) - G(b0), with all substitutions done by
/// Horner evaluation in the Grassmann algebra.
inline GrassmannValue integrate_direct(const SuperFunction& u, const SuperInterval& J) {
    GrassmannPoly G = u.g.antiderivative();
    GrassmannValue b0 = J.out_point.even_full();
    GrassmannValue a0 = J.in_point.even_full();
    GrassmannValue r = J.out_point.odd * u.f.eval_horner(b0);
    r -= J.in_point.odd * u.f.eval_horner(a0);
    r += G.eval_horner(a0);
    r -= G.eval_horner(b0);
    return r;
}

/// Invertible value exp(2 pi i (q + nilpotent)), kept at the exponent level:
/// the root-of-unity exponent q in Q/Z (plus a possible imaginary part) and
/// the nilpotent Grassmann tail. Products add exponents; equality is
/// structural.
struct PhaseValue {
    GaussianRational exponent;  // real part normalized into [0,1)
    GrassmannValue tail;        // nilpotent

    PhaseValue() = default;
    explicit PhaseValue(QModZ q) : exponent(q.value()) {}
    PhaseValue(GaussianRational e, GrassmannValue t) : exponent(normalize(e)), tail(std::move(t)) {
        if (!tail.is_nilpotent()) throw std::invalid_argument("PhaseValue: tail must be nilpotent");
    }
    static PhaseValue one() { return PhaseValue(); }
    static PhaseValue from_grassmann_exponent(const GrassmannValue& c) {
        return PhaseValue(c.body(), c.soul());
    }

    bool is_one() const { return exponent.is_zero() && tail.is_zero(); }

    friend PhaseValue operator*(const PhaseValue& x, const PhaseValue& y) {
        return PhaseValue(x.exponent + y.exponent, x.tail + y.tail);
    }
    PhaseValue inverse() const { return PhaseValue(-exponent, -tail); }
    PhaseValue& operator*=(const PhaseValue& o) { return *this = *this * o; }

    friend bool operator==(const PhaseValue& x, const PhaseValue& y) {
        return x.exponent == y.exponent && x.tail == y.tail;
    }
    friend bool operator!=(const PhaseValue& x, const PhaseValue& y) { return !(x == y); }

    static GaussianRational normalize(const GaussianRational& e) {
        Rational re = e.re() - Rational(e.re().floor());
        return GaussianRational(re, e.im());
    }

    std::string str() const {
        std::string s = "e(" + exponent.str() + ")";
        if (!tail.is_zero()) s += "*exp(" + tail.str("n") + ")";
        return s;
    }
};

/// Super parallel transport of a rank-1 connection with 1-form data
/// A = a_t dt + a_theta dtheta along the superinterval J:
/// exp of the integral of <D, A> = a_theta - theta*a_t.
inline PhaseValue super_parallel_transport(const SuperFunction& a_t, const SuperFunction& a_theta,
                                           const SuperInterval& J) {
    SuperFunction integrand{a_theta.f, a_theta.g - a_t.f};
    GrassmannValue c = integrate_ftc(integrand, J);
    return PhaseValue::from_grassmann_exponent(c);
}

// ---------------------------------------------------------------------------
// Odd-line contraction identities
// ---------------------------------------------------------------------------

/// Chart for functions and 1-forms on (Pi T R^m) x R^{0|1}, flattened into a
/// single graded-commutative algebra:
///   even vars:  t_1..t_m, dtheta, dpsi_1..dpsi_m
///   odd params: psi_1..psi_m, theta, dT_1..dT_m   (dT_j = d of t_j upstairs)
struct OddLineChart {
    std::size_t m;
    ChartPtr chart;

    explicit OddLineChart(std::size_t m_, const std::vector<std::string>& base_names)
        : m(m_) {
        std::vector<std::string> ev = base_names;
        ev.push_back("dtheta");
        for (std::size_t i = 0; i < m; ++i) ev.push_back("dpsi_" + base_names[i]);
        std::vector<std::string> od;
        for (std::size_t i = 0; i < m; ++i) od.push_back("psi_" + base_names[i]);
        od.push_back("theta");
        for (std::size_t i = 0; i < m; ++i) od.push_back("dT_" + base_names[i]);
        chart = make_chart(std::move(ev), std::move(od));
    }

    std::size_t t_var(std::size_t i) const { return i; }
    std::size_t dtheta_var() const { return m; }
    std::size_t psi_param(std::size_t i) const { return i; }
    std::size_t theta_param() const { return m; }

    GradedForm psi(std::size_t i) const { return GradedForm::eta(chart, psi_param(i)); }
    GradedForm theta() const { return GradedForm::eta(chart, theta_param()); }

    /// The function on Pi T X corresponding to a differential form on X.
    GradedForm tilde(const GradedForm& omega) const {
        GradedForm r(chart);
        std::size_t nb = omega.chart()->n();
        for (auto& [k, p] : omega.terms()) {
            if (k.eta != 0) throw std::invalid_argument("tilde: base form may not carry etas");
            Polynomial lifted = lift_poly(p, nb);
            MonoKey nk{k.dt, 0};  // dt mask becomes psi mask (same indices)
            r.add_term(nk, lifted);
        }
        return r;
    }

    /// De Rham vector field acting on flattened functions: t_i -> psi_i.
    GradedForm deRham(const GradedForm& x) const {
        GradedForm r(chart);
        for (std::size_t v = 0; v < m; ++v) {
            GradedForm dv(chart);
            for (auto& [k, p] : x.terms()) dv.add_term(k, p.derivative(t_var(v)));
            r += wedge(psi(v), dv);
        }
        return r;
    }

    /// mu^*: x -> x + theta * D(x), the R^{0|1}-action on flattened functions.
    GradedForm mu_star(const GradedForm& x) const { return x + wedge(theta(), deRham(x)); }

    Polynomial lift_poly(const Polynomial& p, std::size_t base_nvars) const {
        std::vector<Polynomial> im;
        for (std::size_t i = 0; i < base_nvars; ++i)
            im.push_back(Polynomial::variable(chart->n(), t_var(i)));
        return p.substitute(im);
    }
};

namespace detail {

/// Ordered n-fold contraction count: every completion order contributes the
/// sign (-1)^{position} per step, the positions being 0-based slots in the
/// ordered factor word. Computed by honest recursion over conversion states.
inline void contraction_orders(std::vector<bool>& converted, int remaining, int sign,
                               long long& total) {
    if (remaining == 0) {
        total += sign;
        return;
    }
    for (std::size_t s = 0; s < converted.size(); ++s) {
        if (converted[s]) continue;
        converted[s] = true;
        contraction_orders(converted, remaining - 1, (s & 1) ? -sign : sign, total);
        converted[s] = false;
    }
}

}  // namespace detail

/// Both sides of the odd-line contraction identity for a homogeneous
/// degree-n form on R^m:
///   lhs: the n-fold ordered contraction of ev^* omega with d_theta,
///        following the factor expansion F_j = dT_j + dtheta psi_j + theta dpsi_j;
///   rhs: s(n) * n! * (tilde(omega) + theta * tilde(d omega)),
///        s(n) = -1 iff n = 2,3 mod 4.
inline std::pair<GradedForm, GradedForm> lemma2_check(const GradedForm& omega, int n) {
    if (omega.chart()->k() != 0)
        throw std::invalid_argument("lemma2_check: base chart must have no odd params");
    if (!omega.is_pure_form_degree(n))
        throw std::invalid_argument("lemma2_check: form not homogeneous of the stated degree");
    OddLineChart pc(omega.chart()->n(), omega.chart()->even_vars);

    GradedForm lhs(pc.chart);
    for (auto& [k, p] : omega.terms()) {
        // prefix = lift(p) + theta * D(lift(p))
        GradedForm fl = GradedForm(pc.chart);
        fl.add_term(MonoKey{}, pc.lift_poly(p, omega.chart()->n()));
        GradedForm prefix = pc.mu_star(fl);
        // Ordered contraction over the n factor slots.
        std::vector<bool> converted(std::size_t(n), false);
        long long total = 0;
        detail::contraction_orders(converted, n, 1, total);
        // Converted word: psi_{j1} ^ ... ^ psi_{jn} in ascending slot order.
        GradedForm word = GradedForm::one(pc.chart);
        for (std::uint64_t mask = k.dt; mask;) {
            int j = std::countr_zero(mask);
            mask &= mask - 1;
            word = wedge(word, pc.psi(std::size_t(j)));
        }
        lhs += wedge(prefix, word) * GaussianRational(total);
    }

    int mod = ((n % 4) + 4) % 4;
    std::int64_t sign = (mod == 2 || mod == 3) ? -1 : 1;
    std::int64_t fact = 1;
    for (int j = 2; j <= n; ++j) fact *= j;
    GradedForm rhs = pc.tilde(omega) + wedge(pc.theta(), pc.tilde(exterior_d(omega)));
    rhs = rhs * GaussianRational(sign * fact);

    return {lhs, rhs};
}

/// Companion identity: mu^* of the n-fold ordered D-contraction of pi^* omega
/// equals the same right-hand side.
inline std::pair<GradedForm, GradedForm> corollary1_check(const GradedForm& omega, int n) {
    auto [lhs_unused, rhs] = lemma2_check(omega, n);
    OddLineChart pc(omega.chart()->n(), omega.chart()->even_vars);
    GradedForm contracted(pc.chart);
    for (auto& [k, p] : omega.terms()) {
        GradedForm fl(pc.chart);
        fl.add_term(MonoKey{}, pc.lift_poly(p, omega.chart()->n()));
        std::vector<bool> converted(std::size_t(n), false);
        long long total = 0;
        detail::contraction_orders(converted, n, 1, total);
        GradedForm word = GradedForm::one(pc.chart);
        for (std::uint64_t mask = k.dt; mask;) {
            int j = std::countr_zero(mask);
            mask &= mask - 1;
            word = wedge(word, pc.psi(std::size_t(j)));
        }
        contracted += wedge(fl, word) * GaussianRational(total);
    }
    return {pc.mu_star(contracted), rhs};
}

// ---------------------------------------------------------------------------
// Boundary-term regression on R^{1|2}
// ---------------------------------------------------------------------------

struct BerezinBoundaryCase {
    GaussianRational naive;    // integral in the original coordinates
    GaussianRational shifted;  // after t = t' + eta1 eta2
    bool discrepant() const { return naive != shifted; }
};

/// For u = u(t) on R^{1|2}: the Berezin integral over [0,1] x R^{0|2} is 0
/// in the original coordinates but u(1) - u(0) after the nilpotent shift.
inline BerezinBoundaryCase berezin_boundary_case(const std::vector<GaussianRational>& u_coeffs) {
    // Naive: the theta1*theta2 component of u(t) integrated in t; u has none.
    GrassmannPoly u;
    {
        std::vector<GrassmannValue> c;
        for (auto& k : u_coeffs) c.push_back(GrassmannValue::scalar(k));
        u = GrassmannPoly(std::move(c));
    }
    GrassmannPoly naive_int = u.antiderivative();
    GaussianRational naive =
        (naive_int.eval_taylor(Rational(1), {}) - naive_int.eval_taylor(Rational(0), {})).coeff(3);

    // Shifted: u(t + eta1 eta2) = u + eta1 eta2 u'(t); extract the
    // eta1 eta2 component and integrate over [0,1].
    GrassmannValue shift = GrassmannValue::generator(0) * GrassmannValue::generator(1);
    GrassmannPoly shifted_int = u.derivative().antiderivative();
    GaussianRational shifted =
        ((shifted_int.eval_taylor(Rational(1), {}) - shifted_int.eval_taylor(Rational(0), {})) *
         shift).coeff(3);
    return {naive, shifted};
}

/// Regression: the boundary discrepancy appears exactly as expected on the
/// standard cases u = t, u = const, u = t^2.
inline bool rudakov_regression() {
    auto lin = berezin_boundary_case({GaussianRational(0), GaussianRational(1)});       // u = t
    auto cst = berezin_boundary_case({GaussianRational(5)});                            // u = 5
    auto sq = berezin_boundary_case({GaussianRational(0), GaussianRational(0),
                                     GaussianRational(1)});                             // u = t^2
    bool ok = lin.naive == GaussianRational(0) && lin.shifted == GaussianRational(1) &&
              lin.discrepant();
    ok = ok && cst.naive == GaussianRational(0) && cst.shifted == GaussianRational(0) &&
         !cst.discrepant();
    ok = ok && sq.naive == GaussianRational(0) && sq.shifted == GaussianRational(1) &&
         sq.discrepant();
    return ok;
}

}  // namespace orbitwist
