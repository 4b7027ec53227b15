#include <catch2/catch_amalgamated.hpp>

#include "orbitwist/fixtures.hpp"
#include "orbitwist/form_matrix.hpp"
#include "orbitwist/graded_form.hpp"

using namespace orbitwist;

namespace {
ChartPtr chart3() { return fixtures::standard_chart(3, 2); }

GradedForm dt(const ChartPtr& c, std::size_t i) { return GradedForm::dt(c, i); }
GradedForm tv(const ChartPtr& c, std::size_t i) { return GradedForm::coordinate(c, i); }
}  // namespace

TEST_CASE("wedge antisymmetry and bilinearity") {
    auto c = chart3();
    REQUIRE((wedge(dt(c, 0), dt(c, 1)) + wedge(dt(c, 1), dt(c, 0))).is_zero());
    // (t1 dt1) ^ (t2 dt2) = t1 t2 dt1^dt2
    auto lhs = wedge(wedge(tv(c, 0), dt(c, 0)), wedge(tv(c, 1), dt(c, 1)));
    auto rhs = wedge(wedge(tv(c, 0), tv(c, 1)), wedge(dt(c, 0), dt(c, 1)));
    REQUIRE(lhs == rhs);
    // (y1 dt1) ^ (y1) = 0
    auto e1 = GradedForm::eta(c, 0);
    REQUIRE(wedge(wedge(e1, dt(c, 0)), e1).is_zero());
}

TEST_CASE("wedge graded commutativity on random forms") {
    fixtures::Rng rng(7);
    for (int it = 0; it < 60; ++it) {
        auto c = fixtures::standard_chart(3, 2);
        for (int pa = 0; pa < 2; ++pa)
            for (int pb = 0; pb < 2; ++pb) {
                auto a = fixtures::random_form_parity(rng, c, pa);
                auto b = fixtures::random_form_parity(rng, c, pb);
                auto ab = wedge(a, b);
                auto ba = wedge(b, a);
                if (pa * pb == 1) {
                    REQUIRE(ab == -ba);
                } else {
                    REQUIRE(ab == ba);
                }
            }
    }
}

TEST_CASE("wedge associativity on random forms") {
    fixtures::Rng rng(8);
    auto c = fixtures::standard_chart(3, 2);
    for (int it = 0; it < 40; ++it) {
        auto a = fixtures::random_form(rng, c);
        auto b = fixtures::random_form(rng, c);
        auto d = fixtures::random_form(rng, c);
        REQUIRE(wedge(wedge(a, b), d) == wedge(a, wedge(b, d)));
    }
}

TEST_CASE("exterior derivative basics") {
    auto c = chart3();
    // d(t1 t2) = t2 dt1 + t1 dt2
    auto f = wedge(tv(c, 0), tv(c, 1));
    auto expect = wedge(tv(c, 1), dt(c, 0)) + wedge(tv(c, 0), dt(c, 1));
    REQUIRE(exterior_d(f) == expect);
    // d(t1 dt2) = dt1 ^ dt2
    REQUIRE(exterior_d(wedge(tv(c, 0), dt(c, 1))) == wedge(dt(c, 0), dt(c, 1)));
    // d(d(t1^2 t2 dt3)) = 0
    auto g = wedge(wedge(tv(c, 0), wedge(tv(c, 0), tv(c, 1))), dt(c, 2));
    REQUIRE(exterior_d(exterior_d(g)).is_zero());
    // etas are constants
    REQUIRE(exterior_d(GradedForm::eta(c, 0)).is_zero());
}

TEST_CASE("d squared vanishes on random forms") {
    fixtures::Rng rng(9);
    for (int it = 0; it < 500; ++it) {
        auto c = fixtures::standard_chart(1 + it % 4, it % 4);
        auto a = fixtures::random_form(rng, c, 4);
        REQUIRE(exterior_d(exterior_d(a)).is_zero());
    }
}

TEST_CASE("d is a graded derivation") {
    fixtures::Rng rng(10);
    auto c = fixtures::standard_chart(3, 2);
    for (int it = 0; it < 60; ++it) {
        int pa = it % 2;
        auto a = fixtures::random_form_parity(rng, c, pa);
        auto b = fixtures::random_form(rng, c);
        auto lhs = exterior_d(wedge(a, b));
        auto rhs = wedge(exterior_d(a), b) +
                   (pa ? -wedge(a, exterior_d(b)) : wedge(a, exterior_d(b)));
        REQUIRE(lhs == rhs);
    }
}

TEST_CASE("pullback examples") {
    auto src = fixtures::standard_chart(1, 0);
    auto tgt = fixtures::standard_chart(1, 0);
    // phi: t -> t^2 pulls dt back to 2t dt
    auto sq = Polynomial::variable(1, 0) * Polynomial::variable(1, 0);
    ChartMap phi(src, tgt, {sq});
    auto pb = pullback(phi, GradedForm::dt(tgt, 0));
    auto expect = wedge(GradedForm::coordinate(src, 0), GradedForm::dt(src, 0)) *
                  GaussianRational(2);
    REQUIRE(pb == expect);

    // swap chart vars: dt1^dt2 -> -dt1^dt2
    auto c2 = fixtures::standard_chart(2, 0);
    ChartMap swap(c2, c2, {Polynomial::variable(2, 1), Polynomial::variable(2, 0)});
    auto w = wedge(GradedForm::dt(c2, 0), GradedForm::dt(c2, 1));
    REQUIRE(pullback(swap, w) == -w);

    // constant map kills t dt
    ChartMap cst(src, tgt, {Polynomial::constant(1, GaussianRational(0))});
    REQUIRE(pullback(cst, wedge(GradedForm::coordinate(tgt, 0), GradedForm::dt(tgt, 0))).is_zero());
}

TEST_CASE("pullback commutes with d and wedge") {
    fixtures::Rng rng(11);
    for (int it = 0; it < 60; ++it) {
        auto src = fixtures::standard_chart(2, 2);
        auto tgt = fixtures::standard_chart(2, 2);
        std::vector<Polynomial> images;
        for (int j = 0; j < 2; ++j) images.push_back(fixtures::random_polynomial(rng, 2, 3, 2));
        ChartMap phi(src, tgt, images);
        auto a = fixtures::random_form(rng, tgt, 2);
        auto b = fixtures::random_form(rng, tgt, 2);
        REQUIRE(pullback(phi, exterior_d(a)) == exterior_d(pullback(phi, a)));
        REQUIRE(pullback(phi, wedge(a, b)) == wedge(pullback(phi, a), pullback(phi, b)));
    }
}

TEST_CASE("contraction examples") {
    auto c = chart3();
    Derivation d1;
    d1.dt_coeff[0] = GradedForm::one(c);
    // i_{d/dt1}(dt1 ^ dt2) = dt2
    REQUIRE(contract(d1, wedge(dt(c, 0), dt(c, 1))) == dt(c, 1));
    // i_{d/dt1}(f dt2) = 0
    REQUIRE(contract(d1, wedge(tv(c, 1), dt(c, 1))).is_zero());
    // i_{t2 d/dt1}(dt1) = t2
    Derivation t2d1;
    t2d1.dt_coeff[0] = tv(c, 1);
    REQUIRE(contract(t2d1, dt(c, 0)) == tv(c, 1));
}

TEST_CASE("contraction is an odd derivation with square zero") {
    fixtures::Rng rng(12);
    auto c = fixtures::standard_chart(3, 2);
    for (int it = 0; it < 40; ++it) {
        Derivation v;
        for (std::size_t j = 0; j < 3; ++j)
            v.dt_coeff[j] = GradedForm::from_poly(c, fixtures::random_polynomial(rng, 3, 2, 2));
        auto a = fixtures::random_form(rng, c);
        REQUIRE(contract(v, contract(v, a)).is_zero());

        int pa = it % 2;
        auto ha = fixtures::random_form_parity(rng, c, pa);
        auto b = fixtures::random_form(rng, c);
        auto lhs = contract(v, wedge(ha, b));
        auto rhs = wedge(contract(v, ha), b) +
                   (pa ? -wedge(ha, contract(v, b)) : wedge(ha, contract(v, b)));
        REQUIRE(lhs == rhs);
    }
}

TEST_CASE("fiber integration") {
    // chart (t1, tf); fiber = tf
    auto c = fixtures::standard_chart(2, 1);
    auto small = fixtures::standard_chart(1, 1);
    // tf dtf -> 1/2
    auto a = wedge(tv(c, 1), dt(c, 1));
    REQUIRE(integrate_fiber(a) == GradedForm::scalar(small, GaussianRational(Rational(1, 2))));
    // dt1 (no fiber factor) -> 0
    REQUIRE(integrate_fiber(dt(c, 0)).is_zero());
    // t1 dtf ^ dt1 -> -t1 dt1  (fiber dt extracted from the rightmost slot)
    auto b = wedge(tv(c, 0), wedge(dt(c, 1), dt(c, 0)));
    auto expect = -wedge(GradedForm::coordinate(small, 0), GradedForm::dt(small, 0));
    REQUIRE(integrate_fiber(b) == expect);
}

TEST_CASE("supertrace basics") {
    auto c = chart3();
    auto id21 = FormMatrix::identity(c, 2, 1);
    REQUIRE(supertrace(id21) == GradedForm::one(c));
    fixtures::Rng rng(3);
    FormMatrix m(c, 1, 1);
    m.at(0, 0) = fixtures::random_form_parity(rng, c, 0);
    m.at(1, 1) = fixtures::random_form_parity(rng, c, 0);
    REQUIRE(supertrace(m) == m.at(0, 0) - m.at(1, 1));
    // odd-parity diagonal components of the odd block enter with a plus
    m.at(1, 1) = fixtures::random_form_parity(rng, c, 1);
    REQUIRE(supertrace(m) == m.at(0, 0) + m.at(1, 1));
}

TEST_CASE("supertrace kills supercommutators of even matrices") {
    fixtures::Rng rng(13);
    auto c = fixtures::standard_chart(2, 1);
    // Even supermatrices on C^{2|1}: block-diagonal entries of even parity,
    // block-off-diagonal entries of odd parity.
    auto random_even = [&]() {
        FormMatrix m(c, 2, 1);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                int want = (int(i >= 2) + int(j >= 2)) & 1;
                m.at(i, j) = fixtures::random_form_parity(rng, c, want, 1);
            }
        return m;
    };
    for (int it = 0; it < 25; ++it) {
        FormMatrix a = random_even(), b = random_even();
        REQUIRE(supertrace(a * b - b * a).is_zero());
    }
}

TEST_CASE("supertrace graded cyclicity on homogeneous matrices") {
    fixtures::Rng rng(14);
    auto c = fixtures::standard_chart(2, 1);
    // A super matrix of parity p has entries of form parity p + block(i) + block(j).
    auto random_homog = [&](int p) {
        FormMatrix m(c, 1, 1);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) {
                int want = (p + int(i >= 1) + int(j >= 1)) & 1;
                m.at(i, j) = fixtures::random_form_parity(rng, c, want, 1);
            }
        return m;
    };
    for (int it = 0; it < 30; ++it) {
        for (int pa = 0; pa < 2; ++pa)
            for (int pb = 0; pb < 2; ++pb) {
                auto a = random_homog(pa);
                auto b = random_homog(pb);
                auto lhs = supertrace(a * b);
                auto rhs = supertrace(b * a);
                if (pa * pb == 1) {
                    REQUIRE(lhs == -rhs);
                } else {
                    REQUIRE(lhs == rhs);
                }
            }
    }
}

TEST_CASE("exp of nilpotent matrices") {
    auto c = fixtures::standard_chart(2, 1);
    // M = 0 -> Id
    FormMatrix z(c, 1, 0);
    REQUIRE(exp_positive_degree(z) == FormMatrix::identity(c, 1, 0));
    // 1x1 [dt1^dt2] -> [1 + dt1^dt2]
    FormMatrix m(c, 1, 0);
    m.at(0, 0) = wedge(dt(c, 0), dt(c, 1));
    auto e = exp_positive_degree(m);
    REQUIRE(e.at(0, 0) == GradedForm::one(c) + wedge(dt(c, 0), dt(c, 1)));
    // strictly triangular
    FormMatrix n(c, 2, 0);
    n.at(0, 1) = dt(c, 0);
    auto en = exp_positive_degree(n);
    REQUIRE(en.at(0, 0) == GradedForm::one(c));
    REQUIRE(en.at(0, 1) == dt(c, 0));
    REQUIRE(en.at(1, 0).is_zero());
    REQUIRE(en.at(1, 1) == GradedForm::one(c));
    // non-nilpotent scalar part rejected
    FormMatrix bad(c, 1, 0);
    bad.at(0, 0) = GradedForm::coordinate(c, 0);
    REQUIRE_THROWS_AS(exp_positive_degree(bad), std::domain_error);
}

TEST_CASE("exp is multiplicative on commuting scalar multiples of Id") {
    fixtures::Rng rng(15);
    auto c = fixtures::standard_chart(2, 2);
    for (int it = 0; it < 20; ++it) {
        auto s = fixtures::random_form_parity(rng, c, 0, 2);
        auto w = fixtures::random_form_parity(rng, c, 0, 2);
        // strip any scalar components so the exponential terminates
        GradedForm s2(c), w2(c);
        for (auto& [k, p] : s.terms())
            if (k.eta != 0 || k.dt != 0) s2.add_term(k, p);
        for (auto& [k, p] : w.terms())
            if (k.eta != 0 || k.dt != 0) w2.add_term(k, p);
        FormMatrix ms = FormMatrix::identity(c, 2, 1).scalar_wedge(s2);
        FormMatrix mw = FormMatrix::identity(c, 2, 1).scalar_wedge(w2);
        REQUIRE(exp_positive_degree(ms + mw) == exp_positive_degree(ms) * exp_positive_degree(mw));
    }
}

TEST_CASE("canonical rendering is deterministic") {
    auto c = chart3();
    auto f = wedge(tv(c, 0), dt(c, 1)) + GradedForm::eta(c, 0) * GaussianRational(Rational(1, 2));
    REQUIRE(f.str() == "[(1)*t1]*dt2 + [(1/2)]*y1");
    REQUIRE(GradedForm::zero(c).str() == "0");
}
