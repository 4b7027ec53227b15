#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "orbitwist/deligne.hpp"
#include "orbitwist/graded_form.hpp"
#include "orbitwist/grassmann.hpp"
#include "orbitwist/groupoid.hpp"
#include "orbitwist/superline.hpp"
#include "orbitwist/twisted_bundle.hpp"

namespace orbitwist::fixtures {

using Rng = std::mt19937_64;

inline Rational random_rational(Rng& rng, int num_range = 6, int den_range = 4) {
    std::uniform_int_distribution<std::int64_t> num(-num_range, num_range);
    std::uniform_int_distribution<std::int64_t> den(1, den_range);
    return Rational(num(rng), den(rng));
}

inline GaussianRational random_gaussian(Rng& rng, bool allow_imag = true) {
    Rational re = random_rational(rng);
    if (!allow_imag) return GaussianRational(re);
    std::uniform_int_distribution<int> coin(0, 3);
    if (coin(rng) == 0) return GaussianRational(re, random_rational(rng));
    return GaussianRational(re);
}

inline ChartPtr standard_chart(std::size_t n, std::size_t k) {
    std::vector<std::string> ev, od;
    for (std::size_t i = 0; i < n; ++i) ev.push_back("t" + std::to_string(i + 1));
    for (std::size_t i = 0; i < k; ++i) od.push_back("y" + std::to_string(i + 1));
    return make_chart(std::move(ev), std::move(od));
}

inline Polynomial random_polynomial(Rng& rng, std::size_t nvars, int max_degree, int max_terms) {
    Polynomial p(nvars);
    std::uniform_int_distribution<int> nterms(1, max_terms);
    std::uniform_int_distribution<int> deg(0, max_degree);
    int terms = nterms(rng);
    for (int t = 0; t < terms; ++t) {
        Polynomial::Monomial m(nvars, 0);
        int budget = deg(rng);
        std::uniform_int_distribution<std::size_t> pick(0, nvars == 0 ? 0 : nvars - 1);
        for (int d = 0; d < budget && nvars > 0; ++d) m[pick(rng)] += 1;
        p.add_term(m, random_gaussian(rng));
    }
    return p;
}

inline GradedForm random_form(Rng& rng, const ChartPtr& chart, int max_poly_degree = 3,
                              int max_terms = 4) {
    GradedForm f(chart);
    std::uniform_int_distribution<int> nterms(1, max_terms);
    std::uniform_int_distribution<std::uint64_t> etam(0, (std::uint64_t(1) << chart->k()) - 1);
    std::uniform_int_distribution<std::uint64_t> dtm(0, (std::uint64_t(1) << chart->n()) - 1);
    int terms = nterms(rng);
    for (int t = 0; t < terms; ++t) {
        MonoKey k{chart->k() ? etam(rng) : 0, chart->n() ? dtm(rng) : 0};
        f.add_term(k, random_polynomial(rng, chart->n(), max_poly_degree, 2));
    }
    return f;
}

/// Random form with every term of the given total parity.
inline GradedForm random_form_parity(Rng& rng, const ChartPtr& chart, int parity,
                                     int max_poly_degree = 2) {
    for (int tries = 0; tries < 200; ++tries) {
        GradedForm f = random_form(rng, chart, max_poly_degree).parity_part(parity);
        if (!f.is_zero()) return f;
    }
    return GradedForm::zero(chart);
}

/// Random homogeneous dt-degree-n form with no Grassmann part.
inline GradedForm random_pure_degree_form(Rng& rng, const ChartPtr& chart, int n,
                                          int max_poly_degree = 2, int max_terms = 3) {
    GradedForm f(chart);
    std::vector<std::uint64_t> masks;
    for (std::uint64_t m = 0; m < (std::uint64_t(1) << chart->n()); ++m)
        if (std::popcount(m) == n) masks.push_back(m);
    if (masks.empty()) return f;
    std::uniform_int_distribution<std::size_t> pick(0, masks.size() - 1);
    std::uniform_int_distribution<int> nterms(1, max_terms);
    int terms = nterms(rng);
    for (int t = 0; t < terms; ++t)
        f.add_term(MonoKey{0, masks[pick(rng)]},
                   random_polynomial(rng, chart->n(), max_poly_degree, 2));
    return f;
}

inline GrassmannValue random_grassmann(Rng& rng, std::size_t k, int max_terms = 3) {
    GrassmannValue v;
    std::uniform_int_distribution<std::uint64_t> mask(0, (std::uint64_t(1) << k) - 1);
    std::uniform_int_distribution<int> nterms(1, max_terms);
    int terms = nterms(rng);
    for (int t = 0; t < terms; ++t) v.add(k ? mask(rng) : 0, random_gaussian(rng));
    return v;
}

inline GrassmannPoly random_grassmann_poly(Rng& rng, std::size_t k, int max_degree) {
    std::uniform_int_distribution<int> deg(0, max_degree);
    std::vector<GrassmannValue> c(deg(rng) + 1);
    for (auto& v : c) v = random_grassmann(rng, k);
    return GrassmannPoly(std::move(c));
}

inline SuperFunction random_superfunction(Rng& rng, std::size_t k, int max_degree = 5) {
    return {random_grassmann_poly(rng, k, max_degree), random_grassmann_poly(rng, k, max_degree)};
}

inline SuperPoint random_superpoint(Rng& rng, std::size_t k, Rational base) {
    GrassmannValue even = random_grassmann(rng, k).soul().parity_part(0);
    GrassmannValue odd = random_grassmann(rng, k).parity_part(1);
    return SuperPoint(base, even, odd);
}

inline SuperInterval random_superinterval(Rng& rng, std::size_t k) {
    Rational b = random_rational(rng, 3, 3);
    Rational a = b + Rational(std::uniform_int_distribution<std::int64_t>(0, 4)(rng),
                              std::uniform_int_distribution<std::int64_t>(1, 3)(rng));
    return SuperInterval(random_superpoint(rng, k, b), random_superpoint(rng, k, a));
}

// ---------------------------------------------------------------------------
// Cocycle fixtures
// ---------------------------------------------------------------------------

/// The standard discrete-torsion exponents on Z/2 x Z/2 (elements indexed
/// as x*2 + y): q(a, b) = a_2 * b_1 / 2.
inline std::vector<std::vector<QModZ>> torsion_table_z2z2() {
    std::vector<std::vector<QModZ>> q(4, std::vector<QModZ>(4));
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) q[a][b] = QModZ((a % 2) * (b / 2), 2);
    return q;
}

inline DeligneCochain random_phase_cochain(Rng& rng, const FiniteGroupoid& G, std::int64_t den) {
    DeligneCochain w;
    std::uniform_int_distribution<std::int64_t> num(0, den - 1);
    for (int f = 0; f < G.n_morphisms(); ++f) w.lambda.push_back(QModZ(num(rng), den));
    return w;
}

/// Random valid Tier-D cocycle on a one-object groupoid: a random class
/// from H^2(G, Z/n) shifted by a random coboundary.
inline DeligneCocycle random_cocycle(Rng& rng, GroupoidPtr g, const MultTable& table,
                                     const H2Result& h2, std::int64_t n) {
    std::vector<std::int64_t> coeff;
    for (auto d : h2.divisors)
        coeff.push_back(std::uniform_int_distribution<std::int64_t>(0, d - 1)(rng));
    DeligneCocycle c = cocycle_from_table(g, h2.divisors.empty()
                                                 ? std::vector<std::vector<QModZ>>(
                                                       table.size(),
                                                       std::vector<QModZ>(table.size()))
                                                 : h2.representative(coeff));
    return apply_coboundary(c, random_phase_cochain(rng, c.groupoid(), 2 * n));
}

/// Random Tier-C cochain: polynomial tails per morphism and 1-forms per
/// object.
inline DeligneCochain random_form_cochain(Rng& rng, const FiniteGroupoid& G, const ChartPtr& chart,
                                          std::int64_t phase_den = 4) {
    DeligneCochain w = random_phase_cochain(rng, G, phase_den);
    for (int f = 0; f < G.n_morphisms(); ++f) {
        Polynomial p = random_polynomial(rng, chart->n(), 2, 2);
        p.add_term(Polynomial::Monomial(chart->n(), 0), -p.constant_term());
        w.lambda_tail.push_back(p);
    }
    for (int x = 0; x < G.n_objects(); ++x) {
        GradedForm pi(chart);
        for (std::size_t v = 0; v < chart->n(); ++v)
            pi += wedge(GradedForm::from_poly(chart, random_polynomial(rng, chart->n(), 2, 2)),
                        GradedForm::dt(chart, v));
        w.pi.push_back(pi);
    }
    return w;
}

/// Random valid Tier-C cocycle: a Tier-D class on a charted groupoid pushed
/// through a random form-level coboundary (which is exactly the general
/// shape the validators accept).
inline DeligneCocycle random_tier_c_cocycle(Rng& rng, GroupoidPtr g, const MultTable& table,
                                            const H2Result& h2, std::int64_t n) {
    if (!g->chart()) throw std::invalid_argument("random_tier_c_cocycle: groupoid lacks chart");
    std::vector<std::int64_t> coeff;
    for (auto d : h2.divisors)
        coeff.push_back(std::uniform_int_distribution<std::int64_t>(0, d - 1)(rng));
    DeligneCocycle c = cocycle_from_table(g, h2.divisors.empty()
                                                 ? std::vector<std::vector<QModZ>>(
                                                       table.size(),
                                                       std::vector<QModZ>(table.size()))
                                                 : h2.representative(coeff));
    return apply_coboundary(c, random_form_cochain(rng, c.groupoid(), c.chart(), 2 * n));
}

// ---------------------------------------------------------------------------
// Bundle fixtures
// ---------------------------------------------------------------------------

/// Trivial rank r (even) bundle with identity transitions over any cocycle
/// with vanishing exponents.
inline TwistedBundle trivial_bundle(std::shared_ptr<const DeligneCocycle> c, int rank) {
    const auto& G = c->groupoid();
    TwistedBundle v(c, std::vector<SuperDim>(G.n_objects(), SuperDim{rank, 0}));
    for (int f = 0; f < G.n_morphisms(); ++f)
        v.set_rho_exact(f, ExactMatrix::identity(rank));
    return v;
}

/// The Pauli bundle over the discrete-torsion cocycle on Z/2 x Z/2
/// (elements e, b, a, ab indexed 0..3): rho(a) = sigma_x, rho(b) = sigma_z.
inline TwistedBundle pauli_bundle(std::shared_ptr<const DeligneCocycle> c) {
    TwistedBundle v(c, {SuperDim{2, 0}});
    ExactMatrix id = ExactMatrix::identity(2);
    ExactMatrix sx(2, 2), sz(2, 2), sxz(2, 2);
    sx.at(0, 1) = GaussianRational(1);
    sx.at(1, 0) = GaussianRational(1);
    sz.at(0, 0) = GaussianRational(1);
    sz.at(1, 1) = GaussianRational(-1);
    sxz.at(0, 1) = GaussianRational(-1);
    sxz.at(1, 0) = GaussianRational(1);
    v.set_rho_exact(0, id);
    v.set_rho_exact(1, sz);
    v.set_rho_exact(2, sx);
    v.set_rho_exact(3, sxz);
    return v;
}

/// Bundle carrying an honest (untwisted) representation given by exact
/// integer matrices per group element.
inline TwistedBundle bundle_from_exact(std::shared_ptr<const DeligneCocycle> c,
                                       std::vector<ExactMatrix> mats, SuperDim d) {
    TwistedBundle v(c, std::vector<SuperDim>(c->groupoid().n_objects(), d));
    for (int f = 0; f < int(mats.size()); ++f) v.set_rho_exact(f, std::move(mats[f]));
    return v;
}

/// Random Tier-C section over the inertia of a transgressed line.
inline FormSection random_section(Rng& rng, const TransgressedLine& t, int max_poly_degree = 2) {
    FormSection s;
    for (int i = 0; i < t.inertia->n_objects(); ++i)
        s.forms.push_back(random_form(rng, *t.chart, max_poly_degree, 3));
    return s;
}

}  // namespace orbitwist::fixtures
