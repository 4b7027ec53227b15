#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "orbitwist/fixtures.hpp"
#include "orbitwist/transgression.hpp"

namespace orbitwist {

struct SelfTestResult {
    std::vector<std::pair<std::string, bool>> checks;
    bool ok() const {
        for (auto& [n, b] : checks)
            if (!b) return false;
        return true;
    }
};

/// Seeded property battery covering every module; deterministic for a fixed
/// seed. `inject_failure` flips the first check, as a harness for exit-code
/// tests.
inline SelfTestResult run_selftest(std::uint64_t seed, bool inject_failure = false) {
    SelfTestResult res;
    auto check = [&](const std::string& name, bool ok) { res.checks.emplace_back(name, ok); };
    fixtures::Rng rng(seed);

    // exterior algebra
    {
        bool ok = true;
        auto c = fixtures::standard_chart(3, 2);
        for (int it = 0; it < 40 && ok; ++it) {
            auto a = fixtures::random_form(rng, c, 3);
            auto b = fixtures::random_form(rng, c, 3);
            ok = exterior_d(exterior_d(a)).is_zero() &&
                 wedge(wedge(a, b), a) == wedge(a, wedge(b, a));
        }
        check("graded-forms: d^2 = 0 and associativity", ok);
    }
    // Berezin integration
    {
        bool ok = true;
        for (int it = 0; it < 100 && ok; ++it) {
            auto u = fixtures::random_superfunction(rng, 3, 5);
            auto J = fixtures::random_superinterval(rng, 3);
            ok = integrate_ftc(u, J) == integrate_direct(u, J);
        }
        check("superline: fundamental theorem matches the direct oracle", ok);
    }
    // contraction identity with sign table
    {
        bool ok = true;
        auto c3 = fixtures::standard_chart(3, 0);
        for (int n = 0; n <= 3 && ok; ++n)
            for (int it = 0; it < 6 && ok; ++it) {
                auto w = fixtures::random_pure_degree_form(rng, c3, n, 2);
                auto [lhs, rhs] = lemma2_check(w, n);
                ok = lhs == rhs;
            }
        check("superline: odd-line contraction identity", ok);
    }
    check("superline: boundary-term regression", rudakov_regression());
    // groupoids
    {
        bool ok = true;
        for (auto name : {"Z/4", "S3", "Q8"}) {
            auto t = named_group(name);
            auto I = inertia(from_group(t));
            ok = ok && connected_components(I.groupoid()).size() == conjugacy_classes(t).size();
        }
        check("groupoid: inertia components are conjugacy classes", ok);
    }
    // twist classification
    {
        bool ok = true;
        for (int m = 2; m <= 6 && ok; ++m)
            for (int n = 2; n <= 6 && ok; ++n) {
                auto h2 = group_h2(cyclic_group(m), n);
                int expect = std::gcd(m, n);
                ok = expect == 1 ? h2.divisors.empty()
                                 : h2.divisors == std::vector<std::int64_t>{expect};
            }
        ok = ok && group_h2(named_group("Z/2xZ/2"), 2).divisors.size() == 3;
        check("deligne: bar-complex cohomology matches the gcd rule", ok);
    }
    // transgression
    {
        bool ok = true;
        auto tbl = named_group("Z/2xZ/2");
        auto h2 = group_h2(tbl, 2);
        auto gp = std::make_shared<const FiniteGroupoid>(from_group(tbl));
        for (int it = 0; it < 10 && ok; ++it) {
            auto c = fixtures::random_cocycle(rng, gp, tbl, h2, 2);
            ok = validate_cocycle(c).ok() && transgression_multiplicative(transgress(c));
        }
        check("deligne: transgressed phases form a cocycle on inertia", ok);
    }
    // flat sections vs irreducibles
    {
        bool ok = true;
        for (auto name : {"Z/2xZ/2", "S3"}) {
            auto tbl = named_group(name);
            int n = group_exponent(tbl);
            auto h2 = group_h2(tbl, n);
            auto gp = std::make_shared<const FiniteGroupoid>(from_group(tbl));
            auto c = fixtures::random_cocycle(rng, gp, tbl, h2, n);
            std::vector<std::vector<QModZ>> q(tbl.size(), std::vector<QModZ>(tbl.size()));
            for (std::size_t a = 0; a < tbl.size(); ++a)
                for (std::size_t b = 0; b < tbl.size(); ++b) q[a][b] = c.q(int(a), int(b));
            auto irr = irreducible_projective_reps(tbl, q, seed);
            ok = ok && irr.converged &&
                 flat_sections(transgress(c)).dimension == int(irr.dims.size());
        }
        check("bundles: flat dimension counts the irreducibles", ok);
    }
    // loop holonomy refinement invariance
    {
        bool ok = true;
        auto tbl = quaternion_group();
        auto h2 = group_h2(tbl, 4);
        auto gp = std::make_shared<const FiniteGroupoid>(from_group(tbl));
        std::uniform_int_distribution<int> pick(0, gp->n_morphisms() - 1);
        for (int it = 0; it < 10 && ok; ++it) {
            auto c = fixtures::random_cocycle(rng, gp, tbl, h2, 4);
            Skeleton k;
            k.closed = true;
            for (int i = 0; i < 3; ++i) {
                k.arcs.emplace_back(0, SuperInterval(SuperPoint::at(Rational(0)),
                                                     SuperPoint::at(Rational(1))));
                k.jumps.push_back(pick(rng));
            }
            auto fine = refine(k, *gp, 1, SuperPoint::at(Rational(1, 2)));
            ok = loop_holonomy(fine, c) == loop_holonomy(k, c);
        }
        check("transgression: holonomy invariant under refinement", ok);
    }
    // dimensional reduction
    {
        auto gp = std::make_shared<const FiniteGroupoid>(from_group(named_group("Z/2xZ/2")));
        auto tors = std::make_shared<const DeligneCocycle>(
            cocycle_from_table(gp, fixtures::torsion_table_z2z2()));
        auto pauli = fixtures::pauli_bundle(tors);
        InertiaGroupoid I(*gp);
        check("transgression: dimensional reduction on the torsion fixture",
              dimensional_reduction_check(pauli, I).ok());
    }

    if (inject_failure && !res.checks.empty()) res.checks.front().second = false;
    return res;
}

}  // namespace orbitwist
