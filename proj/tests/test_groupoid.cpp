#include <catch2/catch_amalgamated.hpp>

#include "orbitwist/groupoid.hpp"
#include "orbitwist/groups.hpp"

using namespace orbitwist;

TEST_CASE("group table validation") {
    REQUIRE(is_group_table(cyclic_group(5)));
    REQUIRE(is_group_table(symmetric3_group()));
    REQUIRE(is_group_table(quaternion_group()));
    REQUIRE(is_group_table(alternating4_group()));
    REQUIRE(is_group_table(dicyclic_group(6)));
    // broken table: no identity
    MultTable bad = {{1, 0}, {1, 0}};
    REQUIRE_FALSE(is_group_table(bad));
    REQUIRE_THROWS_AS(from_group(bad), std::invalid_argument);
}

TEST_CASE("group sizes and exponents") {
    REQUIRE(symmetric3_group().size() == 6);
    REQUIRE(alternating4_group().size() == 12);
    REQUIRE(quaternion_group().size() == 8);
    REQUIRE(dicyclic_group(6).size() == 12);
    REQUIRE(group_exponent(symmetric3_group()) == 6);
    REQUIRE(group_exponent(quaternion_group()) == 4);
    REQUIRE(conjugacy_classes(symmetric3_group()).size() == 3);
    REQUIRE(conjugacy_classes(alternating4_group()).size() == 4);
    REQUIRE(conjugacy_classes(quaternion_group()).size() == 5);
}

TEST_CASE("from_group basics") {
    auto z2 = from_group(cyclic_group(2));
    z2.validate();
    REQUIRE(z2.n_objects() == 1);
    REQUIRE(z2.n_morphisms() == 2);
    auto s3 = from_group(symmetric3_group());
    s3.validate();
    REQUIRE(s3.n_morphisms() == 6);
}

TEST_CASE("action groupoid") {
    auto z2 = cyclic_group(2);
    // trivial action on one point is the one-object Z/2 groupoid
    auto g1 = action_groupoid(z2, {{0}, {0}});
    g1.validate();
    REQUIRE(g1.n_objects() == 1);
    REQUIRE(g1.n_morphisms() == 2);
    // swap of two points: connected, 4 morphisms
    auto g2 = action_groupoid(z2, {{0, 1}, {1, 0}});
    g2.validate();
    REQUIRE(g2.n_objects() == 2);
    REQUIRE(g2.n_morphisms() == 4);
    REQUIRE(connected_components(g2).size() == 1);
    // Z/3 rotating three points: free, 9 morphisms, trivial stabilizers
    auto z3 = cyclic_group(3);
    auto g3 = action_groupoid(z3, {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}});
    g3.validate();
    REQUIRE(g3.n_objects() == 3);
    REQUIRE(g3.n_morphisms() == 9);
    REQUIRE(connected_components(g3).size() == 1);
    for (int x = 0; x < 3; ++x) REQUIRE(g3.automorphisms(x).size() == 1);
    // non-action rejected: the involution cannot act as a 3-cycle
    REQUIRE_THROWS_AS(action_groupoid(z2, {{0, 1, 2}, {1, 2, 0}}), std::invalid_argument);
}

TEST_CASE("pair groupoid") {
    REQUIRE_THROWS_AS(pair_groupoid(0), std::invalid_argument);
    auto p1 = pair_groupoid(1);
    p1.validate();
    REQUIRE(p1.n_morphisms() == 1);
    auto p3 = pair_groupoid(3);
    p3.validate();
    REQUIRE(p3.n_morphisms() == 9);
    // inertia of a pair groupoid: n identity sectors, one component
    auto in3 = inertia(p3);
    REQUIRE(in3.n_objects() == 3);
    for (int i = 0; i < 3; ++i)
        REQUIRE(in3.sector(i) == p3.identity(in3.project_object(i)));
    REQUIRE(connected_components(in3.groupoid()).size() == 1);
}

TEST_CASE("inertia of one-object groupoids") {
    auto z2 = from_group(cyclic_group(2));
    auto iz2 = inertia(z2);
    iz2.groupoid().validate();
    REQUIRE(iz2.n_objects() == 2);
    for (int i = 0; i < 2; ++i) REQUIRE(iz2.groupoid().automorphisms(i).size() == 2);

    auto s3 = from_group(symmetric3_group());
    auto is3 = inertia(s3);
    is3.groupoid().validate();
    REQUIRE(is3.n_objects() == 6);
    REQUIRE(connected_components(is3.groupoid()).size() == 3);
}

TEST_CASE("inertia components match conjugacy classes for groups up to order 12") {
    for (auto name : {"Z/2", "Z/3", "Z/4", "Z/2xZ/2", "S3", "Z/6", "Q8", "D4",
                      "(Z/2)^3", "Z/9", "(Z/3)^2", "A4", "D6", "Dic3", "Z/12"}) {
        auto table = named_group(name);
        auto G = from_group(table);
        auto I = inertia(G);
        // objects of inertia biject with group elements
        REQUIRE(I.n_objects() == int(table.size()));
        // components biject with conjugacy classes (independent enumeration)
        auto classes = conjugacy_classes(table);
        auto comps = connected_components(I.groupoid());
        REQUIRE(comps.size() == classes.size());
        // and the partition of sectors by component matches the classes
        std::set<std::vector<int>> by_comp;
        for (auto& comp : comps) {
            std::vector<int> sectors;
            for (int i : comp) sectors.push_back(I.sector(i));
            std::sort(sectors.begin(), sectors.end());
            by_comp.insert(sectors);
        }
        std::set<std::vector<int>> by_class(classes.begin(), classes.end());
        REQUIRE(by_comp == by_class);
    }
}

TEST_CASE("inertia commutes with disjoint union") {
    auto a = from_group(cyclic_group(2));
    auto b = from_group(cyclic_group(3));
    auto u = disjoint_union(a, b);
    u.validate();
    REQUIRE(connected_components(u).size() == 2);
    auto iu = inertia(u);
    REQUIRE(iu.n_objects() == inertia(a).n_objects() + inertia(b).n_objects());
    REQUIRE(iu.n_morphisms() == inertia(a).n_morphisms() + inertia(b).n_morphisms());
}

TEST_CASE("components of disjoint union of two Z/2 groupoids") {
    auto g = disjoint_union(from_group(cyclic_group(2)), from_group(cyclic_group(2)));
    REQUIRE(connected_components(g).size() == 2);
    REQUIRE(connected_components(pair_groupoid(4)).size() == 1);
}

TEST_CASE("morita check") {
    // collapse pair_groupoid(3) onto the point groupoid: an equivalence
    auto p3 = pair_groupoid(3);
    auto pt = from_group(cyclic_group(1));
    GroupoidFunctor collapse{&p3, &pt, std::vector<int>(3, 0),
                             std::vector<int>(9, 0)};
    REQUIRE(check_morita(collapse));

    // Z/2 -> trivial groupoid: not faithful
    auto z2 = from_group(cyclic_group(2));
    GroupoidFunctor crush{&z2, &pt, {0}, {0, 0}};
    REQUIRE_FALSE(check_morita(crush));

    // identity functor
    std::vector<int> mor_id(9);
    std::iota(mor_id.begin(), mor_id.end(), 0);
    GroupoidFunctor idf{&p3, &p3, {0, 1, 2}, mor_id};
    REQUIRE(check_morita(idf));

    // non-functor input rejected
    GroupoidFunctor badf{&z2, &z2, {0}, {1, 0}};
    REQUIRE_THROWS_AS(check_morita(badf), std::invalid_argument);
}

TEST_CASE("morita equivalences preserve component counts and automorphisms") {
    for (int n = 2; n <= 5; ++n) {
        auto pn = pair_groupoid(n);
        auto pt = from_group(cyclic_group(1));
        GroupoidFunctor collapse{&pn, &pt, std::vector<int>(n, 0),
                                 std::vector<int>(n * n, 0)};
        REQUIRE(check_morita(collapse));
        REQUIRE(connected_components(pn).size() == connected_components(pt).size());
        REQUIRE(pn.automorphisms(0).size() == pt.automorphisms(0).size());
    }
}
