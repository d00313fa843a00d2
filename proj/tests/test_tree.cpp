#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "common.hpp"
#include "doctest.h"
#include "hgtree/tree_io.hpp"

using namespace hgt;
using fixtures::path;
using fixtures::ytree;

TEST_CASE("total height") {
    CHECK(total_height(EdgeTree::point()) == 0.0);
    CHECK(total_height(ytree()) == 3.0);
    CHECK(total_height(path(3.0)) == 3.0);
}

TEST_CASE("point distance") {
    EdgeTree y = ytree();
    TreePoint a{{0}, 2.0}, b{{1}, 0.5};
    CHECK(point_distance(y, a, b) == 2.5);
    CHECK(point_distance(y, a, a) == 0.0);
    CHECK(point_distance(y, TreePoint{{}, 0.0}, TreePoint{{}, 0.7}) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK_THROWS_AS(point_distance(y, TreePoint{{5}, 0.0}, a), TreeError);
    CHECK_THROWS_AS(point_distance(y, TreePoint{{0}, 2.5}, a), TreeError);
}

TEST_CASE("graft") {
    CHECK(iso_equal(graft({}), EdgeTree::point()));
    EdgeTree g = graft({path(2.0), path(0.5)});
    CHECK(g.stem(0) == 0.0);
    CHECK(g.num_children(0) == 2);
    CHECK(total_height(g) == 2.0);
    CHECK(iso_equal(graft({EdgeTree::point()}), EdgeTree::point()));
}

TEST_CASE("split measure and right profile") {
    EdgeTree y = ytree();
    auto m = split_measure(1.0, y);
    REQUIRE(m.size() == 2);
    CHECK(iso_equal(graft(m), graft({path(2.0), path(0.5)})));
    CHECK(split_measure(3.0, y).empty());
    auto s = split_measure(1.2, path(3.0));
    REQUIRE(s.size() == 1);
    CHECK(iso_equal(s[0], path(1.8)));

    CHECK(right_profile(1.0, y) == 2);
    CHECK(right_profile(0.0, y) == 1);
    CHECK(right_profile(3.0, y) == 0);
    CHECK(right_profile(0.4, EdgeTree::point()) == 0);
}

TEST_CASE("above and below") {
    EdgeTree y = ytree();
    CHECK(iso_equal(above(1.0, y), graft({path(2.0), path(0.5)})));
    TreeBuilder b(1.0);
    b.add(0, 0.5);
    b.add(0, 0.5);
    CHECK(iso_equal(below(1.5, y), b.build()));
    CHECK(iso_equal(above(0.0, y), y));
}

TEST_CASE("first branch") {
    auto fb = first_branch(ytree());
    CHECK(fb.D == 1.0);
    CHECK(fb.k == 2);
    CHECK(iso_equal(fb.theta, graft({path(2.0), path(0.5)})));
    auto fp = first_branch(path(3.0));
    CHECK(fp.D == 3.0);
    CHECK(fp.k == 0);
    CHECK(iso_equal(fp.theta, EdgeTree::point()));
    auto f0 = first_branch(EdgeTree::point());
    CHECK(f0.infinite);
    CHECK(f0.k == 0);
}

TEST_CASE("scale") {
    EdgeTree y = ytree();
    CHECK(iso_equal(scale(1.0, y), y));
    EdgeTree h = scale(0.5, y);
    CHECK(h.stem(0) == 0.5);
    CHECK(h.stem(1) == 1.0);
    CHECK(h.stem(2) == 0.25);
    CHECK_THROWS_AS(scale(0.0, y), TreeError);
    std::mt19937_64 g(3);
    for (int i = 0; i < 50; ++i) {
        EdgeTree t = fixtures::random_tree(g, 1 + i % 9);
        CHECK(total_height(scale(0.25, t)) == 0.25 * total_height(t));
    }
}

TEST_CASE("canonical forms") {
    TreeBuilder chain(1.0);
    chain.add(0, 2.0);
    CHECK(iso_equal(chain.build(), path(3.0)));
    TreeBuilder sw(1.0);
    sw.add(0, 0.5);
    sw.add(0, 2.0);
    CHECK(iso_equal(sw.build(), ytree()));
    CHECK(canonicalize(sw.build()) == canonicalize(ytree()));
    CHECK_FALSE(iso_equal(path(3.0), path(2.0)));
    // zero-length inner edge contracts
    TreeBuilder z(1.0);
    int m = z.add(0, 0.0);
    z.add(m, 2.0);
    z.add(m, 0.5);
    CHECK(iso_equal(z.build(), ytree()));
    CHECK(iso_equal(path(1.0), path(1.0 + 1e-9), 1e-6));
}

TEST_CASE("four points condition on random trees") {
    std::mt19937_64 g(11);
    for (int rep = 0; rep < 20; ++rep) {
        EdgeTree t = fixtures::random_tree(g, 12);
        std::uniform_int_distribution<int> vd(0, t.size() - 1);
        std::uniform_real_distribution<double> ud(0.0, 1.0);
        auto pick = [&] {
            int v = vd(g);
            return EdgePoint{v, t.birth(v) + ud(g) * t.stem(v)};
        };
        int bad = 0;
        for (int q = 0; q < 1000; ++q) {
            EdgePoint x = pick(), y = pick(), z = pick(), w = pick();
            double s1 = edge_distance(t, x, y) + edge_distance(t, z, w);
            double s2 = edge_distance(t, x, z) + edge_distance(t, y, w);
            double s3 = edge_distance(t, x, w) + edge_distance(t, y, z);
            double a[3] = {s1, s2, s3};
            std::sort(a, a + 3);
            bad += std::abs(a[2] - a[1]) > 1e-12;
        }
        CHECK(bad == 0);
    }
}

TEST_CASE("splitting identities on random trees") {
    std::mt19937_64 g(5);
    for (int rep = 0; rep < 200; ++rep) {
        EdgeTree t = fixtures::random_tree(g, 1 + rep % 10);
        CHECK(iso_equal(graft(split_measure(0.0, t)), t));
        double a = std::uniform_int_distribution<int>(0, 24)(g) / 8.0;
        double b = std::uniform_int_distribution<int>(0, 24)(g) / 8.0;
        CHECK(iso_equal(above(a + b, t), above(a, above(b, t))));
        CHECK(right_profile(a, t) == static_cast<int>(split_measure(a, t).size()));
        CHECK(total_height(below(a, t)) == std::min(a, total_height(t)));
    }
}

TEST_CASE("right profile is right-continuous at breakpoints") {
    std::mt19937_64 g(9);
    for (int rep = 0; rep < 50; ++rep) {
        EdgeTree t = fixtures::random_tree(g, 8);
        for (int v = 0; v < t.size(); ++v) {
            double y = t.death(v);
            CHECK(right_profile(y, t) == right_profile(y + 1.0 / 1024, t));
            if (y > 0) CHECK(left_profile(y, t) == left_profile(y - 1.0 / 1024, t));
        }
    }
}

TEST_CASE("json and newick round trip") {
    std::mt19937_64 g(21);
    for (int rep = 0; rep < 30; ++rep) {
        EdgeTree t = fixtures::random_tree(g, 1 + rep % 7, 3);
        EdgeTree j = tree_from_json(to_json(t));
        CHECK(j == t);
        EdgeTree n = tree_from_newick(to_newick(t));
        CHECK(n == t);
    }
    EdgeTree y = tree_from_json(R"({"stem":1.0,"children":[{"stem":2.0,"children":[]},{"stem":0.5}]})");
    CHECK(iso_equal(y, ytree()));
    CHECK(iso_equal(tree_from_newick("(A:2,B:0.5):1;"), ytree()));
    CHECK_THROWS_AS(tree_from_json(R"({"stem":-1})"), TreeError);

    auto dir = std::filesystem::temp_directory_path();
    save_tree((dir / "hgt_rt.nwk").string(), ytree());
    CHECK(load_tree((dir / "hgt_rt.nwk").string()) == ytree());
    save_tree((dir / "hgt_rt.json").string(), ytree());
    CHECK(load_tree((dir / "hgt_rt.json").string()) == ytree());
}
