#include <catch2/catch_amalgamated.hpp>

#include "orbitwist/fixtures.hpp"
#include "orbitwist/transgression.hpp"

using namespace orbitwist;

namespace {
std::shared_ptr<const DeligneCocycle> torsion_cocycle() {
    auto g = std::make_shared<const FiniteGroupoid>(from_group(named_group("Z/2xZ/2")));
    return std::make_shared<const DeligneCocycle>(
        cocycle_from_table(g, fixtures::torsion_table_z2z2()));
}

Skeleton two_jump_loop(const FiniteGroupoid& G, int j0, int j1) {
    Skeleton k;
    k.closed = true;
    k.arcs.emplace_back(G.src(j0),
                        SuperInterval(SuperPoint::at(Rational(0)), SuperPoint::at(Rational(1))));
    k.arcs.emplace_back(G.tgt(j0),
                        SuperInterval(SuperPoint::at(Rational(0)), SuperPoint::at(Rational(1))));
    k.jumps = {j0, j1};
    k.validate(G);
    return k;
}

/// Random closed Tier-D loop in a one-object groupoid.
Skeleton random_loop(fixtures::Rng& rng, const FiniteGroupoid& G, int max_arcs = 4) {
    std::uniform_int_distribution<int> n_arcs(1, max_arcs);
    std::uniform_int_distribution<int> pick(0, G.n_morphisms() - 1);
    Skeleton k;
    k.closed = true;
    int n = n_arcs(rng);
    for (int i = 0; i < n; ++i) {
        k.arcs.emplace_back(
            0, SuperInterval(SuperPoint::at(Rational(0)), SuperPoint::at(Rational(i + 1))));
        k.jumps.push_back(pick(rng));
    }
    k.validate(G);
    return k;
}
}  // namespace

TEST_CASE("refinement splits arcs and keeps the loop") {
    auto tors = torsion_cocycle();
    const auto& G = tors->groupoid();
    Skeleton k = constant_superloop(G, 0, 3, Rational(1));
    auto fine = refine(k, G, 0, SuperPoint::at(Rational(1, 2)));
    REQUIRE(fine.n_arcs() == 2);
    REQUIRE(fine.jumps.size() == 2);
    REQUIRE(G.is_identity(fine.jumps[0]));
    REQUIRE(fine.jumps[1] == 3);
    REQUIRE(fine.arcs[0].J == SuperInterval(SuperPoint::at(Rational(1, 2)),
                                            SuperPoint::at(Rational(1))));
    REQUIRE(fine.arcs[1].J == SuperInterval(SuperPoint::at(Rational(0)),
                                            SuperPoint::at(Rational(1, 2))));
    REQUIRE(fine.holonomy(G) == k.holonomy(G));

    // double refinement commutes up to relabeling
    auto a = refine(refine(k, G, 0, SuperPoint::at(Rational(2, 3))), G, 1,
                    SuperPoint::at(Rational(1, 3)));
    auto b = refine(refine(k, G, 0, SuperPoint::at(Rational(1, 3))), G, 0,
                    SuperPoint::at(Rational(2, 3)));
    REQUIRE(a.arcs == b.arcs);
    REQUIRE(a.jumps == b.jumps);

    REQUIRE_THROWS_AS(refine(k, G, 0, SuperPoint::at(Rational(2))), std::invalid_argument);
}

TEST_CASE("loop holonomy values") {
    auto tors = torsion_cocycle();
    const auto& G = tors->groupoid();

    // trivial cocycle: always 1
    auto triv = std::make_shared<const DeligneCocycle>(DeligneCocycle(tors->groupoid_ptr()));
    fixtures::Rng rng(51);
    for (int it = 0; it < 20; ++it)
        REQUIRE(loop_holonomy(random_loop(rng, G), *triv).is_one());

    // the specific 2-jump loop (a then b) against the torsion cocycle: -1
    Skeleton k = two_jump_loop(G, 2, 1);
    auto v = loop_holonomy(k, *tors);
    REQUIRE(v.exponent == GaussianRational(Rational(1, 2)));
    REQUIRE(v.tail.is_zero());

    // single length-1 arc with A = c dt, no twist: exp(-c)
    Skeleton one = constant_superloop(G, 0, G.identity(0), Rational(1));
    one.arcs[0].a_t = SuperFunction{
        GrassmannPoly::constant(GrassmannValue::scalar(GaussianRational(Rational(1, 5)))),
        GrassmannPoly()};
    auto w = loop_holonomy(one, *triv);
    REQUIRE(w.exponent == GaussianRational(Rational(4, 5)));
}

TEST_CASE("loop holonomy is invariant under refinement") {
    fixtures::Rng rng(52);
    std::vector<MultTable> groups = {named_group("Z/2xZ/2"), symmetric3_group(),
                                     quaternion_group()};
    int done = 0;
    for (auto& tbl : groups) {
        int n = std::min(group_exponent(tbl), 4);
        auto h2 = group_h2(tbl, n);
        auto gp = std::make_shared<const FiniteGroupoid>(from_group(tbl));
        for (int it = 0; it < 34 && done < 100; ++it, ++done) {
            auto c = fixtures::random_cocycle(rng, gp, tbl, h2, n);
            Skeleton k = random_loop(rng, *gp);
            std::uniform_int_distribution<std::size_t> arc(0, k.n_arcs() - 1);
            std::size_t ai = arc(rng);
            Rational len = k.arcs[ai].J.in_point.base - k.arcs[ai].J.out_point.base;
            SuperPoint split = SuperPoint::at(k.arcs[ai].J.out_point.base + len * Rational(1, 2));
            auto fine = refine(k, *gp, ai, split);
            REQUIRE(loop_holonomy(fine, c) == loop_holonomy(k, c));
        }
    }
    REQUIRE(done >= 100);
}

TEST_CASE("gauge change acts on loop holonomy by the frame shift") {
    fixtures::Rng rng(53);
    auto tbl = named_group("Z/2xZ/2");
    auto h2 = group_h2(tbl, 2);
    auto gp = std::make_shared<const FiniteGroupoid>(from_group(tbl));
    for (int it = 0; it < 50; ++it) {
        auto c = fixtures::random_cocycle(rng, gp, tbl, h2, 2);
        Skeleton k = random_loop(rng, *gp);
        auto w = fixtures::random_phase_cochain(rng, *gp, 8);
        w.lambda[gp->identity(0)] = QModZ();  // normalized gauge
        auto c2 = apply_coboundary(c, w);
        QModZ frame_shift;
        for (int j : k.jumps) frame_shift += w.lambda[j];
        frame_shift -= w.lambda[k.holonomy(*gp)];
        auto v1 = loop_holonomy(k, c);
        auto v2 = loop_holonomy(k, c2);
        // the value in the gauge-transported frame is unchanged
        REQUIRE(v2 == v1 * PhaseValue(frame_shift));
        // and pure curving changes leave it strictly invariant
        DeligneCochain curving;
        curving.lambda.assign(gp->n_morphisms(), QModZ());
        REQUIRE(loop_holonomy(k, apply_coboundary(c, curving)) == v1);
    }
}

TEST_CASE("identity and refinement comparisons evaluate to one") {
    fixtures::Rng rng(54);
    std::vector<MultTable> groups = {named_group("Z/2xZ/2"), symmetric3_group()};
    int done = 0;
    for (auto& tbl : groups) {
        int n = std::min(group_exponent(tbl), 4);
        auto h2 = group_h2(tbl, n);
        auto gp = std::make_shared<const FiniteGroupoid>(from_group(tbl));
        for (int it = 0; it < 50 && done < 100; ++it, ++done) {
            auto c = fixtures::random_cocycle(rng, gp, tbl, h2, n);
            Skeleton k = random_loop(rng, *gp);
            REQUIRE(evaluate_Q(identity_comparison(k, *gp), c).is_one());
            std::uniform_int_distribution<std::size_t> arc(0, k.n_arcs() - 1);
            std::size_t ai = arc(rng);
            Rational len = k.arcs[ai].J.in_point.base - k.arcs[ai].J.out_point.base;
            SuperPoint split = SuperPoint::at(k.arcs[ai].J.out_point.base + len * Rational(1, 2));
            auto fine = refine(k, *gp, ai, split);
            auto cmp = refinement_comparison(fine, k, ai, *gp);
            REQUIRE(evaluate_Q(cmp, c).is_one());
        }
    }
    REQUIRE(done >= 100);
}

namespace {
/// Conjugated copy of a loop: target jumps j'_k = m_{k+1} j_k m_k^{-1}.
Skeleton conjugated_loop(const Skeleton& k, const FiniteGroupoid& G, const std::vector<int>& m) {
    Skeleton out = k;
    for (std::size_t i = 0; i < k.n_arcs(); ++i) out.arcs[i].object = G.tgt(m[i]);
    for (std::size_t kk = 0; kk < k.jumps.size(); ++kk) {
        std::size_t i = (kk + 1) % k.n_arcs();
        out.jumps[kk] = G.compose(G.compose(m[i], k.jumps[kk]), G.inverse(m[kk]));
    }
    out.validate(G);
    return out;
}

SkeletonComparison correspondence(const Skeleton& src, const Skeleton& dst,
                                  const std::vector<int>& m, const FiniteGroupoid& G) {
    SkeletonComparison cmp;
    cmp.source = &src;
    cmp.target = &dst;
    cmp.corr = m;
    cmp.legs.assign(src.n_arcs(), {});
    for (std::size_t i = 0; i < src.n_arcs(); ++i) cmp.arc_map.push_back(int(i));
    return cmp;
}
}  // namespace

TEST_CASE("Q is multiplicative under composition of comparisons") {
    fixtures::Rng rng(55);
    auto tbl = quaternion_group();
    auto h2 = group_h2(tbl, 4);
    auto gp = std::make_shared<const FiniteGroupoid>(from_group(tbl));
    std::uniform_int_distribution<int> pick(0, gp->n_morphisms() - 1);
    for (int it = 0; it < 60; ++it) {
        auto c = fixtures::random_cocycle(rng, gp, tbl, h2, 4);
        Skeleton a = random_loop(rng, *gp);
        std::vector<int> m1, m2;
        for (std::size_t i = 0; i < a.n_arcs(); ++i) m1.push_back(pick(rng));
        Skeleton b = conjugated_loop(a, *gp, m1);
        for (std::size_t i = 0; i < a.n_arcs(); ++i) m2.push_back(pick(rng));
        Skeleton d = conjugated_loop(b, *gp, m2);

        auto l1 = correspondence(a, b, m1, *gp);
        auto l2 = correspondence(b, d, m2, *gp);
        auto l12 = compose_comparisons(l2, l1, *gp);
        REQUIRE(evaluate_Q(l12, c) == evaluate_Q(l2, c) * evaluate_Q(l1, c));
    }
}

TEST_CASE("crossing comparisons route through a common refinement") {
    fixtures::Rng rng(56);
    auto tbl = named_group("Z/2xZ/2");
    auto h2 = group_h2(tbl, 2);
    auto gp = std::make_shared<const FiniteGroupoid>(from_group(tbl));
    for (int it = 0; it < 25; ++it) {
        auto c = fixtures::random_cocycle(rng, gp, tbl, h2, 2);
        Skeleton k = random_loop(rng, *gp, 2);
        // two skeletons cut at crossing positions 1/3 and 2/3 of arc 0
        Rational b0 = k.arcs[0].J.out_point.base;
        Rational len = k.arcs[0].J.in_point.base - b0;
        auto r1 = refine(k, *gp, 0, SuperPoint::at(b0 + len * Rational(1, 3)));
        auto r2 = refine(k, *gp, 0, SuperPoint::at(b0 + len * Rational(2, 3)));
        // their common refinement
        auto r12 = refine(r1, *gp, 0, SuperPoint::at(b0 + len * Rational(2, 3)));
        auto r21 = refine(r2, *gp, 1, SuperPoint::at(b0 + len * Rational(1, 3)));
        REQUIRE(r12.arcs == r21.arcs);
        // the crossing comparison r1 -> r2 factors through r12: both legs
        // are refinements, so the composite value is 1 * 1
        auto leg1 = refinement_comparison(r12, r1, 0, *gp);
        auto leg2 = refinement_comparison(r21, r2, 1, *gp);
        REQUIRE(evaluate_Q(leg1, c).is_one());
        REQUIRE(evaluate_Q(leg2, c).is_one());
    }
}

TEST_CASE("gauge change leaves comparison values of matched pairs") {
    // pure-gauge comparison: same loop, cocycle replaced by a coboundary
    // partner; closed-loop holonomy recomputed in the transported frame is
    // unchanged (exercised above); here the Q of the identity comparison
    // stays exactly 1 under any gauge.
    fixtures::Rng rng(57);
    auto tbl = named_group("Z/2xZ/2");
    auto h2 = group_h2(tbl, 2);
    auto gp = std::make_shared<const FiniteGroupoid>(from_group(tbl));
    for (int it = 0; it < 30; ++it) {
        auto c = fixtures::random_cocycle(rng, gp, tbl, h2, 2);
        auto w = fixtures::random_phase_cochain(rng, *gp, 8);
        auto c2 = apply_coboundary(c, w);
        Skeleton k = random_loop(rng, *gp);
        REQUIRE(evaluate_Q(identity_comparison(k, *gp), c2).is_one());
    }
}

TEST_CASE("partition function on loops") {
    auto tors = torsion_cocycle();
    const auto& G = tors->groupoid();
    auto pauli = fixtures::pauli_bundle(tors);

    // trivial twist, trivial flat bundle of rank r: value r on any loop
    auto trivc = std::make_shared<const DeligneCocycle>(DeligneCocycle(tors->groupoid_ptr()));
    auto v3 = fixtures::trivial_bundle(trivc, 3);
    fixtures::Rng rng(58);
    for (int it = 0; it < 10; ++it) {
        Skeleton k = random_loop(rng, G);
        REQUIRE(std::abs(partition_function(v3, k) - Complex(3.0)) < 1e-12);
    }

    // loop with holonomy a: str(sigma_x^{-1}) = 0
    Skeleton loop_a = constant_superloop(G, 0, 2, Rational(1));
    REQUIRE(std::abs(partition_function(pauli, loop_a)) < 1e-12);

    // the partition function only depends on the holonomy and matches ch
    InertiaGroupoid I(G);
    auto ch = chern_character(pauli, I);
    for (int i = 0; i < I.n_objects(); ++i) {
        int g = I.sector(i);
        Skeleton one = constant_superloop(G, 0, g, Rational(1));
        Complex direct = partition_function(pauli, one);
        REQUIRE(direct == ch.values(i));
        // a two-jump decomposition of the same holonomy gives the same value
        for (int j0 = 0; j0 < G.n_morphisms(); ++j0) {
            int j1 = G.compose(g, G.inverse(j0));
            Skeleton two = two_jump_loop(G, j0, j1);
            REQUIRE(std::abs(partition_function(pauli, two) - direct) < 1e-12);
        }
    }
}

TEST_CASE("partition function is additive and multiplicative") {
    auto tors = torsion_cocycle();
    const auto& G = tors->groupoid();
    auto pauli = fixtures::pauli_bundle(tors);
    auto dsum = direct_sum(pauli, pauli);
    fixtures::Rng rng(59);
    for (int it = 0; it < 10; ++it) {
        Skeleton k = random_loop(rng, G);
        Complex one = partition_function(pauli, k);
        REQUIRE(std::abs(partition_function(dsum, k) - 2.0 * one) < 1e-12);
    }
}

TEST_CASE("dimensional reduction on Tier-D fixtures") {
    // untwisted Z/2 with the sign representation
    auto z2 = std::make_shared<const DeligneCocycle>(DeligneCocycle(
        std::make_shared<const FiniteGroupoid>(from_group(cyclic_group(2)))));
    ExactMatrix d11 = ExactMatrix::identity(2);
    d11.at(1, 1) = GaussianRational(-1);
    auto honest = fixtures::bundle_from_exact(z2, {ExactMatrix::identity(2), d11}, {2, 0});
    InertiaGroupoid Iz(z2->groupoid());
    REQUIRE(dimensional_reduction_check(honest, Iz).ok());

    // untwisted S3, regular-ish bundle
    auto s3 = std::make_shared<const DeligneCocycle>(DeligneCocycle(
        std::make_shared<const FiniteGroupoid>(from_group(symmetric3_group()))));
    auto v1 = fixtures::trivial_bundle(s3, 2);
    InertiaGroupoid Is(s3->groupoid());
    REQUIRE(dimensional_reduction_check(v1, Is).ok());

    // twisted Klein four: Pauli bundle
    auto tors = torsion_cocycle();
    auto pauli = fixtures::pauli_bundle(tors);
    InertiaGroupoid It(tors->groupoid());
    REQUIRE(dimensional_reduction_check(pauli, It).ok());

    // negative control: perturb one transition
    TwistedBundle broken = pauli;
    CMatrix bad = pauli.rho(2);
    bad(0, 1) += 0.25;
    broken.set_rho(2, bad);
    REQUIRE_FALSE(dimensional_reduction_check(broken, It).ok());
}

TEST_CASE("dimensional reduction on a rank-1 Tier-C fixture with nonzero B") {
    auto chart = fixtures::standard_chart(3, 0);
    auto g = from_group(cyclic_group(2));
    g.set_chart(chart);
    auto gp = std::make_shared<const FiniteGroupoid>(std::move(g));
    DeligneCocycle cz(gp);
    cz.set_B(0, wedge(GradedForm::coordinate(chart, 0),
                      wedge(GradedForm::dt(chart, 1), GradedForm::dt(chart, 2))) +
                    wedge(GradedForm::dt(chart, 0), GradedForm::dt(chart, 1)));
    auto czp = std::make_shared<const DeligneCocycle>(std::move(cz));
    REQUIRE(validate_cocycle(*czp).ok());

    TwistedBundle v(czp, {SuperDim{1, 0}});
    v.set_rho_exact(0, ExactMatrix::identity(1));
    v.set_rho_exact(1, ExactMatrix::identity(1));
    FormMatrix w(chart, 1, 0);
    w.at(0, 0) = wedge(GradedForm::coordinate(chart, 1), GradedForm::dt(chart, 0)) +
                 wedge(GradedForm::coordinate(chart, 0), GradedForm::dt(chart, 2));
    v.set_nabla(0, w);
    REQUIRE(validate_bundle(v).ok());

    InertiaGroupoid I(czp->groupoid());
    auto rep = dimensional_reduction_check(v, I);
    REQUIRE(rep.ok());

    // spelled out: partition = exp(B) ^ ch on each sector
    auto chf = chern_character_forms(v, I);
    for (int i = 0; i < I.n_objects(); ++i) {
        auto [x, gg] = I.object_data(i);
        Skeleton loop = constant_superloop(czp->groupoid(), x, gg, Rational(1));
        auto pf = partition_function_forms(v, loop);
        REQUIRE(wedge(exp_positive_degree(-czp->B(x)), pf) == chf.forms[i]);
    }
}

TEST_CASE("reduced superconnection agrees with the delocalized differential") {
    fixtures::Rng rng(60);
    auto v4 = named_group("Z/2xZ/2");
    auto h2 = group_h2(v4, 2);
    auto g = from_group(v4);
    g.set_chart(fixtures::standard_chart(2, 0));
    auto gp = std::make_shared<const FiniteGroupoid>(std::move(g));

    // A = 0, B = 0: plain d
    DeligneCocycle flat(gp);
    auto op0 = reduced_superconnection(flat);
    auto t0 = transgress(flat);
    for (int it = 0; it < 5; ++it) {
        auto s = fixtures::random_section(rng, t0);
        auto lhs = op0.apply(s);
        for (std::size_t i = 0; i < s.forms.size(); ++i)
            REQUIRE(lhs.forms[i] == exterior_d(s.forms[i]));
    }

    // B closed: still plain d (Omega = 0), through a nonzero gauge factor
    DeligneCocycle bcl(gp);
    auto chart = *gp->chart();
    for (int x = 0; x < 1; ++x)
        bcl.set_B(0, wedge(GradedForm::dt(chart, 0), GradedForm::dt(chart, 1)));
    auto op1 = reduced_superconnection(bcl);
    auto t1 = transgress(bcl);
    for (int it = 0; it < 5; ++it) {
        auto s = fixtures::random_section(rng, t1);
        auto lhs = op1.apply(s);
        for (std::size_t i = 0; i < s.forms.size(); ++i)
            REQUIRE(lhs.forms[i] == exterior_d(s.forms[i]));
    }

    // random Tier-C data: operator equality with the delocalized
    // differential, exactly, on random sections
    for (int it = 0; it < 8; ++it) {
        auto c = fixtures::random_tier_c_cocycle(rng, gp, v4, h2, 2);
        auto op = reduced_superconnection(c);
        auto t = transgress(c);
        for (int jt = 0; jt < 4; ++jt) {
            auto s = fixtures::random_section(rng, t);
            auto lhs = op.apply(s);
            auto rhs = twisted_differential(t, s);
            REQUIRE(lhs == rhs);
        }
    }
}

TEST_CASE("morita smoke: pair groupoids against the point") {
    for (int n = 1; n <= 5; ++n) {
        auto pn = std::make_shared<const FiniteGroupoid>(pair_groupoid(n));
        auto pt = std::make_shared<const FiniteGroupoid>(from_group(cyclic_group(1)));
        DeligneCocycle cn(pn), cpt(pt);

        // flat-section dimensions agree
        REQUIRE(flat_sections(transgress(cn)).dimension == 1);
        REQUIRE(flat_sections(transgress(cpt)).dimension == 1);

        // ch values agree under the collapse functor
        auto cnp = std::make_shared<const DeligneCocycle>(cn);
        auto cptp = std::make_shared<const DeligneCocycle>(cpt);
        auto vb = fixtures::trivial_bundle(cnp, 2);
        auto vp = fixtures::trivial_bundle(cptp, 2);
        InertiaGroupoid In(*pn), Ip(*pt);
        auto chn = chern_character(vb, In);
        auto chp = chern_character(vp, Ip);
        for (int i = 0; i < In.n_objects(); ++i)
            REQUIRE(chn.values(i) == chp.values(0));

        // loop holonomies agree: any pair-groupoid loop collapses to a
        // constant loop at the point with trivial value
        fixtures::Rng rng(61);
        for (int it = 0; it < 10 && n > 1; ++it) {
            Skeleton k;
            k.closed = true;
            std::uniform_int_distribution<int> obj(0, n - 1);
            std::vector<int> objs = {obj(rng), obj(rng), obj(rng)};
            for (int i = 0; i < 3; ++i) {
                k.arcs.emplace_back(objs[i], SuperInterval(SuperPoint::at(Rational(0)),
                                                           SuperPoint::at(Rational(1))));
            }
            auto pair_mor = [n](int y, int x) { return y * n + x; };
            k.jumps = {pair_mor(objs[1], objs[0]), pair_mor(objs[2], objs[1]),
                       pair_mor(objs[0], objs[2])};
            k.validate(*pn);
            REQUIRE(loop_holonomy(k, cn).is_one());
            // image loop under the collapse functor
            Skeleton img = constant_superloop(*pt, 0, 0, Rational(1));
            REQUIRE(loop_holonomy(img, cpt).is_one());
        }

        // partition functions agree as well
        REQUIRE(dimensional_reduction_check(vb, In).ok());
        REQUIRE(dimensional_reduction_check(vp, Ip).ok());
    }
}
