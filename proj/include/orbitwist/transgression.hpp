#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "orbitwist/deligne.hpp"
#include "orbitwist/superline.hpp"
#include "orbitwist/twisted_bundle.hpp"

namespace orbitwist {

/// One arc of a skeleton: a superinterval lying over a groupoid object,
/// with rank-1 connection data along it. Traversal runs from the incoming
/// endpoint a to the outgoing endpoint b.
struct Arc {
    int object = 0;
    SuperInterval J;
    SuperFunction a_t;      // dt component of the 1-form along the arc
    SuperFunction a_theta;  // dtheta component

    Arc(int obj, SuperInterval j) : object(obj), J(std::move(j)) {}
    Arc(int obj, SuperInterval j, SuperFunction at, SuperFunction ath)
        : object(obj), J(std::move(j)), a_t(std::move(at)), a_theta(std::move(ath)) {}

    friend bool operator==(const Arc& x, const Arc& y) {
        return x.object == y.object && x.J == y.J && x.a_t == y.a_t && x.a_theta == y.a_theta;
    }
};

/// Skeleton of a superpath or superloop: arcs joined by groupoid jumps.
/// jumps[i] connects arc i to arc i+1; for closed skeletons the last jump
/// closes arc n-1 back to arc 0.
struct Skeleton {
    std::vector<Arc> arcs;
    std::vector<int> jumps;
    bool closed = false;

    std::size_t n_arcs() const { return arcs.size(); }

    void validate(const FiniteGroupoid& G) const {
        if (arcs.empty()) throw std::invalid_argument("Skeleton: no arcs");
        std::size_t expect = arcs.size() - 1 + (closed ? 1 : 0);
        if (jumps.size() != expect) throw std::invalid_argument("Skeleton: jump count");
        for (std::size_t i = 0; i < jumps.size(); ++i) {
            int src_arc = int(i);
            int tgt_arc = int((i + 1) % arcs.size());
            if (G.src(jumps[i]) != arcs[src_arc].object ||
                G.tgt(jumps[i]) != arcs[tgt_arc].object)
                throw std::invalid_argument("Skeleton: jump endpoints do not match arcs");
        }
    }

    /// Composite of all jumps of a closed skeleton, an automorphism of the
    /// first arc's object.
    int holonomy(const FiniteGroupoid& G) const {
        if (!closed) throw std::logic_error("Skeleton: holonomy needs a closed skeleton");
        int h = jumps[0];
        for (std::size_t i = 1; i < jumps.size(); ++i) h = G.compose(jumps[i], h);
        return h;
    }
};

/// The constant superloop of the given length at the sector (x, g).
inline Skeleton constant_superloop(const FiniteGroupoid& G, int x, int g, Rational length) {
    Skeleton k;
    k.arcs.emplace_back(x, SuperInterval(SuperPoint::at(Rational(0)),
                                         SuperPoint::at(std::move(length))));
    k.jumps.push_back(g);
    k.closed = true;
    k.validate(G);
    return k;
}

/// Splits one arc at an interior point; the two pieces are joined by an
/// identity jump, and the loop itself is unchanged.
inline Skeleton refine(const Skeleton& sk, const FiniteGroupoid& G, std::size_t arc_index,
                       const SuperPoint& split) {
    const Arc& arc = sk.arcs.at(arc_index);
    if (!(arc.J.out_point.base < split.base && split.base < arc.J.in_point.base))
        throw std::invalid_argument("refine: split point not interior to the arc");
    Skeleton out;
    out.closed = sk.closed;
    for (std::size_t i = 0; i < sk.arcs.size(); ++i) {
        if (i != arc_index) {
            out.arcs.push_back(sk.arcs[i]);
            continue;
        }
        // traversal enters at a: first piece [split, a], then [b, split]
        out.arcs.emplace_back(arc.object, SuperInterval(split, arc.J.in_point), arc.a_t,
                              arc.a_theta);
        out.arcs.emplace_back(arc.object, SuperInterval(arc.J.out_point, split), arc.a_t,
                              arc.a_theta);
    }
    for (std::size_t i = 0; i <= sk.jumps.size(); ++i) {
        if (i == arc_index) out.jumps.push_back(G.identity(arc.object));
        if (i < sk.jumps.size()) out.jumps.push_back(sk.jumps[i]);
    }
    out.validate(G);
    return out;
}

namespace detail {

/// Left fold of the jump phases: sum of q(j_k, j_{k-1} o ... o j_0) over
/// k >= 1, skipping identity jumps (their line factors are canonically
/// trivial). Exponents are taken from the identity-normalized cocycle.
inline QModZ fold_jump_phases(const Skeleton& sk, const FiniteGroupoid& G,
                              const DeligneCocycle& cn) {
    QModZ acc;
    int composite = -1;
    for (std::size_t k = 0; k < sk.jumps.size(); ++k) {
        int j = sk.jumps[k];
        if (composite < 0) {
            composite = j;
            continue;
        }
        if (!G.is_identity(j)) acc += cn.q(j, composite);
        composite = G.compose(j, composite);
    }
    return acc;
}

}  // namespace detail

/// Value of the transgressed line on a closed superloop, in the tautological
/// frame of L at the holonomy morphism: the product of the arc transports
/// with the folded jump phases. Under a gauge change by (lambda, Pi) the
/// coordinate shifts by sum lambda(jumps) - lambda(holonomy), which is
/// exactly the induced change of frame; it is strictly invariant under pure
/// curving changes (lambda = 0).
inline PhaseValue loop_holonomy(const Skeleton& sk, const DeligneCocycle& c) {
    if (!sk.closed) throw std::invalid_argument("loop_holonomy: need a closed skeleton");
    const auto& G = c.groupoid();
    sk.validate(G);
    DeligneCocycle cn = normalize_identities(c);
    PhaseValue v(detail::fold_jump_phases(sk, G, cn));
    for (auto& arc : sk.arcs) v *= super_parallel_transport(arc.a_t, arc.a_theta, arc.J);
    return v;
}

/// One cylinder piece of a skeleton comparison.
struct CylinderLeg {
    SuperInterval J;
    SuperFunction a_t;
    SuperFunction a_theta;
};

/// Comparison of two skeletons of the same underlying loop. Each source arc
/// maps into a target arc (arc_map, weakly monotone and surjective, so the
/// source refines the target), carries a correspondence morphism between
/// the objects, and optionally cylinder transport data. The two supported
/// shapes are refinements (identity correspondences, finer source) and
/// compatible correspondences (aligned arcs); composites cover the rest.
struct SkeletonComparison {
    const Skeleton* source = nullptr;
    const Skeleton* target = nullptr;
    std::vector<int> arc_map;  // source arc -> target arc
    std::vector<int> corr;     // morphism per source arc
    std::vector<std::vector<CylinderLeg>> legs;  // transport pieces per source arc

    void validate(const FiniteGroupoid& G) const {
        if (!source || !target) throw std::invalid_argument("comparison: missing skeletons");
        std::size_t ns = source->n_arcs(), nt = target->n_arcs();
        if (arc_map.size() != ns || corr.size() != ns || legs.size() != ns)
            throw std::invalid_argument("comparison: data per source arc");
        if (source->closed != target->closed)
            throw std::invalid_argument("comparison: open/closed mismatch");
        std::vector<bool> hit(nt, false);
        for (std::size_t i = 0; i < ns; ++i) {
            int t = arc_map[i];
            if (t < 0 || t >= int(nt)) throw std::invalid_argument("comparison: arc_map range");
            hit[t] = true;
            if (G.src(corr[i]) != source->arcs[i].object ||
                G.tgt(corr[i]) != target->arcs[t].object)
                throw std::invalid_argument("comparison: correspondence endpoints");
        }
        for (bool h : hit)
            if (!h) throw std::invalid_argument("comparison: arc_map not surjective");
        for (std::size_t k = 0; k + 1 < ns; ++k)
            if (arc_map[k + 1] != arc_map[k] && arc_map[k + 1] != arc_map[k] + 1)
                throw std::invalid_argument("comparison: arc_map not monotone");
        // commuting squares at every source boundary
        for (std::size_t k = 0; k < source->jumps.size(); ++k) {
            std::size_t i = (k + 1) % ns;
            int jprime = paired_target_jump(G, k);
            if (G.compose(corr[i], source->jumps[k]) != G.compose(jprime, corr[k]))
                throw std::invalid_argument("comparison: squares do not commute");
        }
        if (!source->closed) {
            // globular restriction: endpoint sectors are fixed
            if (!G.is_identity(corr.front()) || !G.is_identity(corr.back()))
                throw std::invalid_argument("comparison: endpoints must be fixed");
        }
    }

    int paired_target_jump(const FiniteGroupoid& G, std::size_t k) const {
        std::size_t i = (k + 1) % source->n_arcs();
        bool interior = arc_map[i] == arc_map[k] && (k + 1 < source->n_arcs());
        if (interior) return G.identity(target->arcs[arc_map[k]].object);
        return target->jumps.at(arc_map[k]);
    }
};

inline SkeletonComparison identity_comparison(const Skeleton& sk, const FiniteGroupoid& G) {
    SkeletonComparison cmp;
    cmp.source = &sk;
    cmp.target = &sk;
    cmp.legs.assign(sk.n_arcs(), {});
    for (std::size_t i = 0; i < sk.n_arcs(); ++i) {
        cmp.arc_map.push_back(int(i));
        cmp.corr.push_back(G.identity(sk.arcs[i].object));
    }
    return cmp;
}

/// Comparison realizing the refinement produced by refine(sk, arc_index, .):
/// source the finer skeleton, target the original, identity correspondences.
inline SkeletonComparison refinement_comparison(const Skeleton& fine, const Skeleton& coarse,
                                                std::size_t arc_index, const FiniteGroupoid& G) {
    if (fine.n_arcs() != coarse.n_arcs() + 1)
        throw std::invalid_argument("refinement_comparison: expected one split");
    SkeletonComparison cmp;
    cmp.source = &fine;
    cmp.target = &coarse;
    cmp.legs.assign(fine.n_arcs(), {});
    for (std::size_t i = 0; i < fine.n_arcs(); ++i) {
        int t = i <= arc_index ? int(std::min(i, arc_index)) : int(i - 1);
        if (i == arc_index + 1) t = int(arc_index);
        cmp.arc_map.push_back(t);
        cmp.corr.push_back(G.identity(fine.arcs[i].object));
    }
    return cmp;
}

/// Transgression value of a comparison: the cylinder transports times the
/// elbow phases q(corr_i, j_i) - q(j'_i, corr_{i-1}).
inline PhaseValue evaluate_Q(const SkeletonComparison& cmp, const DeligneCocycle& c) {
    const auto& G = c.groupoid();
    cmp.validate(G);
    DeligneCocycle cn = normalize_identities(c);
    PhaseValue v;
    for (auto& arc_legs : cmp.legs)
        for (auto& leg : arc_legs) v *= super_parallel_transport(leg.a_t, leg.a_theta, leg.J);
    for (std::size_t k = 0; k < cmp.source->jumps.size(); ++k) {
        std::size_t i = (k + 1) % cmp.source->n_arcs();
        QModZ phase = cn.q(cmp.corr[i], cmp.source->jumps[k]) -
                      cn.q(cmp.paired_target_jump(G, k), cmp.corr[k]);
        v *= PhaseValue(phase);
    }
    return v;
}

/// Compose comparisons: arc maps and correspondences compose, cylinders
/// concatenate (each target-side cylinder is picked up once).
inline SkeletonComparison compose_comparisons(const SkeletonComparison& second,
                                              const SkeletonComparison& first,
                                              const FiniteGroupoid& G) {
    if (first.target != second.source)
        throw std::invalid_argument("compose_comparisons: middle skeleton mismatch");
    SkeletonComparison out;
    out.source = first.source;
    out.target = second.target;
    out.legs.assign(first.corr.size(), {});
    std::vector<bool> taken(second.corr.size(), false);
    for (std::size_t i = 0; i < first.corr.size(); ++i) {
        int mid = first.arc_map[i];
        out.arc_map.push_back(second.arc_map[mid]);
        out.corr.push_back(G.compose(second.corr[mid], first.corr[i]));
        out.legs[i] = first.legs[i];
        if (!taken[mid]) {
            taken[mid] = true;
            out.legs[i].insert(out.legs[i].end(), second.legs[mid].begin(),
                               second.legs[mid].end());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Partition functions
// ---------------------------------------------------------------------------

/// Numeric partition function of a twisted bundle on a closed superloop:
/// the folded jump phase times str of the inverse of the loop composite
/// rho(j_{n-1}) ... rho(j_0); arc transports act trivially in Tier-D.
inline Complex partition_function(const TwistedBundle& v, const Skeleton& sk) {
    if (!sk.closed) throw std::invalid_argument("partition_function: need a closed loop");
    const auto& c = v.cocycle();
    const auto& G = c.groupoid();
    sk.validate(G);
    for (int j : sk.jumps)
        if (!(v.dim(G.src(j)) == v.dim(G.tgt(j))))
            throw std::invalid_argument("partition_function: dimension mismatch along jumps");
    DeligneCocycle cn = normalize_identities(c);
    QModZ fold = detail::fold_jump_phases(sk, G, cn);
    int x0 = sk.arcs[0].object;
    CMatrix o_inv = CMatrix::Identity(v.dim(x0).total(), v.dim(x0).total());
    for (int j : sk.jumps) o_inv = o_inv * v.rho(j).inverse();
    Complex value = numeric_supertrace(o_inv, v.dim(x0));
    if (!fold.is_zero()) value *= unit_phase(fold);
    return value;
}

/// Tier-C partition function as a graded form: the arc transport along a
/// reduced length l is exp(-l * curvature), entering through its inverse.
inline GradedForm partition_function_forms(const TwistedBundle& v, const Skeleton& sk) {
    if (!v.has_nabla() || !v.has_exact())
        throw std::domain_error("partition_function_forms: needs a Tier-C bundle");
    if (!sk.closed) throw std::invalid_argument("partition_function_forms: need a closed loop");
    const auto& c = v.cocycle();
    const auto& G = c.groupoid();
    sk.validate(G);
    DeligneCocycle cn = normalize_identities(c);
    QModZ fold = detail::fold_jump_phases(sk, G, cn);

    int x0 = sk.arcs[0].object;
    SuperDim d0 = v.dim(x0);
    // O^{-1} = SP_0^{-1} rho(j_0)^{-1} ... SP_{n-1}^{-1} rho(j_{n-1})^{-1}
    FormMatrix o_inv = FormMatrix::identity(c.chart(), d0.p, d0.q);
    for (std::size_t i = 0; i < sk.arcs.size(); ++i) {
        const Arc& arc = sk.arcs[i];
        Rational len = arc.J.in_point.base - arc.J.out_point.base;
        FormMatrix sp_inv = exp_positive_degree(curvature(v, arc.object)
                                                    .scalar_wedge(GradedForm::scalar(
                                                        c.chart(), GaussianRational(len))));
        o_inv = o_inv * sp_inv;
        if (i < sk.jumps.size()) {
            int j = sk.jumps[i];
            o_inv = o_inv * v.rho_exact(j).inverse().as_form_matrix(c.chart(), v.dim(G.src(j)));
        }
    }
    GradedForm value = supertrace(o_inv);
    return value * fold.exact_value();
}

// ---------------------------------------------------------------------------
// Dimensional reduction
// ---------------------------------------------------------------------------

/// The operator on inertia sections assembled from the constant-loop
/// family: the infinitesimal generator along D of acting by the rotation
/// factor 1 + theta*A~ gives d + A, and conjugating with the gauge factor
/// exp(-B) turns it into d + A + Omega.
struct ReducedSuperconnection {
    std::function<FormSection(const FormSection&)> apply;
};

namespace detail {

/// Coefficient of the eta generator at `slot` as a left factor.
inline GradedForm extract_left_eta(const GradedForm& x, std::size_t slot) {
    GradedForm out(x.chart());
    std::uint64_t bit = std::uint64_t(1) << slot;
    for (auto& [k, p] : x.terms()) {
        if (!(k.eta & bit)) continue;
        int before = std::popcount(k.eta & (bit - 1));
        MonoKey nk{k.eta & ~bit, k.dt};
        out.add_term(nk, (before & 1) ? -p : p);
    }
    return out;
}

/// Inverse of the tilde map: psi monomials back to dt monomials.
inline GradedForm untilde(const OddLineChart& pc, const GradedForm& x, const ChartPtr& base) {
    GradedForm out(base);
    std::uint64_t psi_mask = (std::uint64_t(1) << pc.m) - 1;
    for (auto& [k, p] : x.terms()) {
        if (k.dt != 0 || (k.eta & ~psi_mask))
            throw std::invalid_argument("untilde: not a pure function on Pi T X");
        std::vector<Polynomial> im;
        for (std::size_t i = 0; i < pc.chart->n(); ++i)
            im.push_back(i < pc.m ? Polynomial::variable(base->n(), i)
                                  : Polynomial::constant(base->n(), GaussianRational(0)));
        out.add_term(MonoKey{0, k.eta}, p.substitute(im));
    }
    return out;
}

}  // namespace detail

inline ReducedSuperconnection reduced_superconnection(const DeligneCocycle& c) {
    if (!c.tier_c()) throw std::domain_error("reduced_superconnection: needs Tier-C data");
    auto cptr = std::make_shared<DeligneCocycle>(c);
    auto tptr = std::make_shared<TransgressedLine>(transgress(c));
    ReducedSuperconnection out;
    out.apply = [cptr, tptr](const FormSection& s) {
        const ChartPtr& base = *tptr->chart;
        OddLineChart pc(base->n(), base->even_vars);
        const InertiaGroupoid& I = *tptr->inertia;
        FormSection r;
        for (std::size_t i = 0; i < s.forms.size(); ++i) {
            const GradedForm& B = cptr->B(I.project_object(int(i)));
            GradedForm exp_plus = exp_positive_degree(B);
            GradedForm exp_minus = exp_positive_degree(-B);
            // operator on the loop-family side: infinitesimal rotation of
            // mu* s~ * (1 + theta A~), which is d + A on forms
            GradedForm gauged = wedge(exp_plus, s.forms[i]);
            GradedForm s_t = pc.tilde(gauged);
            GradedForm a_t = pc.tilde(tptr->nabla_prime[i]);
            GradedForm acted = pc.mu_star(s_t);
            acted = acted + wedge(acted, wedge(pc.theta(), a_t));
            GradedForm gen = detail::extract_left_eta(acted, pc.theta_param());
            GradedForm dq = detail::untilde(pc, gen, base);
            r.forms.push_back(wedge(exp_minus, dq));
        }
        return r;
    };
    return out;
}

/// Per-object equality of the partition function on the constant length-1
/// superloop with the Chern character, through the exp(-B) identification
/// in Tier-C.
struct ReductionReport {
    std::vector<std::string> mismatches;
    bool ok() const { return mismatches.empty(); }
};

inline ReductionReport dimensional_reduction_check(const TwistedBundle& v,
                                                   const InertiaGroupoid& I, double tol = 0.0) {
    ReductionReport rep;
    const auto& c = v.cocycle();
    const auto& G = c.groupoid();
    NumericSection ch = chern_character(v, I);
    for (int i = 0; i < I.n_objects(); ++i) {
        auto [x, g] = I.object_data(i);
        Skeleton loop = constant_superloop(G, x, g, Rational(1));
        Complex pf = partition_function(v, loop);
        double diff = std::abs(pf - ch.values(i));
        if (diff > tol)
            rep.mismatches.push_back("sector (" + std::to_string(x) + "," + std::to_string(g) +
                                     "): partition function differs from ch by " +
                                     std::to_string(diff));
        // the value must not depend on how the holonomy is decomposed into
        // jumps; this is where invalid transition data shows up
        for (int h = 0; h < G.n_morphisms(); ++h) {
            if (G.src(h) != x) continue;
            int y = G.tgt(h);
            if (!(v.dim(y) == v.dim(x))) continue;
            int back = G.compose(g, G.inverse(h));
            Skeleton two;
            two.closed = true;
            two.arcs.emplace_back(x, SuperInterval(SuperPoint::at(Rational(0)),
                                                   SuperPoint::at(Rational(1))));
            two.arcs.emplace_back(y, SuperInterval(SuperPoint::at(Rational(0)),
                                                   SuperPoint::at(Rational(1))));
            two.jumps = {h, back};
            Complex pf2 = partition_function(v, two);
            if (std::abs(pf2 - ch.values(i)) > 1e-9 * (1.0 + std::abs(ch.values(i)))) {
                rep.mismatches.push_back("sector (" + std::to_string(x) + "," +
                                         std::to_string(g) +
                                         "): decomposed loop disagrees with ch");
                break;
            }
        }
    }
    if (v.has_nabla() && v.has_exact()) {
        FormSection chf = chern_character_forms(v, I);
        for (int i = 0; i < I.n_objects(); ++i) {
            auto [x, g] = I.object_data(i);
            Skeleton loop = constant_superloop(c.groupoid(), x, g, Rational(1));
            GradedForm pf = partition_function_forms(v, loop);
            GradedForm expB = exp_positive_degree(-c.B(x));
            if (wedge(expB, pf) != chf.forms[i])
                rep.mismatches.push_back("sector (" + std::to_string(x) + "," +
                                         std::to_string(g) + "): form-level reduction fails");
        }
    }
    return rep;
}

}  // namespace orbitwist
