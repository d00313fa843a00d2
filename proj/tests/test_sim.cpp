#include <cmath>

#include "doctest.h"
#include "hgtree/reduction.hpp"
#include "hgtree/verify.hpp"

using namespace hgt;

namespace {

OffspringLaw binary() { return OffspringLaw::from_pmf({0.5, 0.0, 0.5}); }

SamplerConfig cfg(std::uint64_t seed, std::optional<double> cap = std::nullopt) {
    SamplerConfig c;
    c.seed = seed;
    c.height_cap = cap;
    return c;
}

BranchingMechanism quad() {
    BranchingMechanism m;
    m.b = 2.0;
    return m;
}

}  // namespace

TEST_CASE("philox known answers") {
    using A = Philox4x32Ctr;
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}) == A{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          A{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams") {
    Stream a(5), b(5), c(6);
    for (int i = 0; i < 10; ++i) {
        auto x = a.next_u64();
        CHECK(x == b.next_u64());
        CHECK(x != c.next_u64());
    }
    CHECK(derive_key(1, 0) != derive_key(1, 1));
    CHECK(derive_key(1, 0) != derive_key(2, 0));
    Stream u(9);
    double lo = 1, hi = 0;
    for (int i = 0; i < 100000; ++i) {
        double x = u.uniform();
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
}

TEST_CASE("poisson sampler") {
    for (double m : {0.3, 4.0, 29.0, 31.0, 250.0}) {
        Stream s(static_cast<std::uint64_t>(m * 1000));
        std::vector<double> x(40000);
        for (auto& v : x) v = static_cast<double>(s.poisson(m));
        auto r = mean_check(x, m);
        CHECK_MESSAGE(r.pass, r.note);
        // variance equals the mean
        std::vector<double> sq(x.size());
        double mean = 0;
        for (double v : x) mean += v;
        mean /= x.size();
        for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (x[i] - mean) * (x[i] - mean);
        auto rv = mean_check(sq, m, 0.0, 4.0);
        CHECK_MESSAGE(rv.pass, rv.note);
    }
    Stream s(3);
    std::vector<std::int64_t> x(20000);
    for (auto& v : x) v = s.poisson(60.0);
    auto target = poisson_law(60.0);
    std::vector<std::int64_t> h;
    for (auto v : x) {
        if (static_cast<std::size_t>(v) >= h.size()) h.resize(v + 1);
        ++h[v];
    }
    CHECK(chi_square(target.pmf, h).p_value.value() > 0.001);
    CHECK(Stream(1).poisson(0.0) == 0);
}

TEST_CASE("chi square and ks basics") {
    auto r = chi_square({0.25, 0.25, 0.5}, {250, 250, 500});
    CHECK(r.statistic == 0.0);
    CHECK(*r.p_value == 1.0);
    CHECK(r.pass);
    // expected mass beyond the vector forms a tail cell
    auto t = chi_square({0.5}, {500, 300, 200});
    CHECK(t.statistic == 0.0);
    CHECK(t.note == "df=1");
    CHECK_THROWS_AS(chi_square({1.0}, {10}), StatsError);
    CHECK(kolmogorov_survival(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
    CHECK(kolmogorov_survival(0.8276) == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(kolmogorov_survival(0.5) == doctest::Approx(0.9639452436648751).epsilon(1e-9));
    CHECK(kolmogorov_survival(0.99) + 0.0 == doctest::Approx(kolmogorov_survival(0.99)));
    // both series agree where they meet
    CHECK(std::abs(kolmogorov_survival(std::nextafter(1.0, 0.0)) - kolmogorov_survival(1.0)) < 1e-12);
    std::vector<double> few(10, 0.5);
    CHECK_THROWS_AS(ks_test([](double x) { return x; }, few), StatsError);
    // shifted distribution fails
    Stream s(11);
    std::vector<double> x(10000);
    for (auto& v : x) v = s.exponential(1.0) + 0.05;
    CHECK_FALSE(ks_test([](double y) { return -std::expm1(-y); }, x).pass);
    std::vector<std::int64_t> c(3);
    for (int i = 0; i < 10000; ++i) ++c[std::min<std::int64_t>(s.poisson(1.2), 2)];
    CHECK_FALSE(chi_square(poisson_law(1.0).pmf, c).pass);
}

TEST_CASE("composite is bonferroni") {
    TestReport a, b;
    a.p_value = 0.008;
    b.p_value = 0.5;
    // 0.008 > 0.01 / 2
    auto r = composite("x", {a, b}, 0.01);
    CHECK(r.pass);
    CHECK(*r.p_value == doctest::Approx(0.016));
    CHECK(r.parts[0].threshold == 0.005);
    a.p_value = 0.006;
    b.p_value = 0.004;
    CHECK_FALSE(composite("x", {a, b}, 0.01).pass);
    a.p_value = 0.2;
    b.p_value = 0.3;
    CHECK(composite("x", {a, b}, 0.01).pass);
    // error-type parts only: statistic is the worst part
    auto m1 = mean_check({1.0, 1.1, 0.9, 1.0}, 1.0, 0.0), m2 = mean_check({2.0, 2.2, 1.8, 2.4}, 0.0, 0.0);
    auto e = composite("e", {m1, m2}, 0.01);
    CHECK_FALSE(e.p_value.has_value());
    CHECK(e.statistic == m2.statistic);
    CHECK_FALSE(e.pass);
}

TEST_CASE("pure death tree") {
    auto d0 = OffspringLaw::from_pmf({1.0});
    std::vector<double> stems(100000);
    for (int i = 0; i < 100000; ++i) {
        auto s = sample_gw_tree(d0, 2.0, cfg(replica_seed(1, i)));
        REQUIRE(s.tree.size() == 1);
        stems[i] = s.tree.stem(0);
    }
    auto r = mean_check(stems, 0.5);
    CHECK_MESSAGE(r.pass, r.note);
}

TEST_CASE("sampler is deterministic and lattice valued") {
    auto a = sample_gw_tree(binary(), 1.0, cfg(42, 10.0));
    auto b = sample_gw_tree(binary(), 1.0, cfg(42, 10.0));
    CHECK(a.tree == b.tree);
    CHECK(a.truncated == b.truncated);
    for (int v = 0; v < a.tree.size(); ++v) {
        double scaled = std::ldexp(a.tree.death(v), 36);
        CHECK(scaled == std::round(scaled));
    }
    // truncation only clips: below the cap the trees agree
    for (int seed = 0; seed < 50; ++seed) {
        auto t1 = sample_gw_tree(binary(), 1.0, cfg(seed, 3.0));
        auto t2 = sample_gw_tree(binary(), 1.0, cfg(seed, 6.0));
        CHECK(iso_equal(below(3.0, t1.tree), below(3.0, t2.tree)));
        CHECK(total_height(t1.tree) <= 3.0);
    }
}

TEST_CASE("vertex cap") {
    auto sup = OffspringLaw::from_pmf({0.1, 0.0, 0.9});
    SamplerConfig c = cfg(1);
    c.vertex_cap = 1000;
    try {
        for (int s = 0; s < 20; ++s) {
            c.seed = s;
            sample_gw_tree(sup, 1.0, c);
        }
        FAIL("expected a vertex cap error");
    } catch (const SamplerError& e) {
        CHECK(std::string(e.what()).find("apparent explosion") != std::string::npos);
    }
    CHECK_THROWS_AS(sample_gw_tree(OffspringLaw::from_pmf({0.5, 0.5}), 1.0, cfg(1)), SamplerError);
}

TEST_CASE("forests") {
    auto d0 = OffspringLaw::from_pmf({1.0});
    auto p = sample_gw_forest(GwLaw{binary(), 1.0, InitialLaw::dirac(0)}, cfg(3));
    CHECK(p.tree.size() == 1);
    CHECK(total_height(p.tree) == 0.0);
    for (int s = 0; s < 20; ++s) CHECK(right_profile(0.0, sample_gw_forest(GwLaw{d0, 1.0, InitialLaw::dirac(3)}, cfg(s)).tree) == 3);
    // mixed Poisson root counts
    std::vector<double> n(20000);
    for (int i = 0; i < 20000; ++i)
        n[i] = right_profile(0.0, sample_gw_forest(quad(), AtomicLaw{{{1.0, 1.0}}}, 4.0, cfg(replica_seed(5, i), 0.01)).tree);
    auto r = mean_check(n, 4.0);
    CHECK_MESSAGE(r.pass, r.note);
}

TEST_CASE("mean profile") {
    // E Z_a = exp(c (m - 1) a)
    auto xi = OffspringLaw::from_pmf({0.3, 0.0, 0.5, 0.2});
    for (double a : {0.5, 1.0, 2.0}) {
        std::vector<double> z(50000);
        for (int i = 0; i < 50000; ++i) z[i] = right_profile(a, sample_gw_tree(xi, 1.0, cfg(replica_seed(7, i), 2.5)).tree);
        auto r = mean_check(z, std::exp(0.6 * a));
        CHECK_MESSAGE(r.pass, r.note);
    }
}

TEST_CASE("first branch is Exp(c) times xi") {
    auto xi = OffspringLaw::from_pmf({0.3, 0.0, 0.5, 0.2});
    std::vector<double> D;
    std::vector<std::int64_t> k(4);
    for (int i = 0; i < 20000; ++i) {
        auto fb = first_branch(sample_gw_tree(xi, 2.0, cfg(replica_seed(8, i), 5.0)).tree);
        D.push_back(fb.D);
        ++k[fb.k];
    }
    CHECK(ks_test([](double x) { return -std::expm1(-2.0 * x); }, D).pass);
    CHECK(chi_square(xi.pmf(3), k).pass);
}

TEST_CASE("discrete trees") {
    auto d0 = OffspringLaw::from_pmf({1.0});
    auto t = sample_discrete_gw(d0, InitialLaw::dirac(1), 10, cfg(1)).tree;
    CHECK(iso_equal(normalize(t), EdgeTree::path(1.0)));
    auto f = sample_discrete_gw(binary(), InitialLaw::dirac(7), 5, cfg(2));
    CHECK(right_profile(0.0, f.tree) == 7);
    CHECK(total_height(f.tree) <= 6.0);
    for (int v = 1; v < f.tree.size(); ++v) CHECK(f.tree.stem(v) == 1.0);
    auto lz = lazy_embedding(binary(), 2.0, 100.0);
    CHECK(lz.prob(1) == doctest::Approx(0.98));
    CHECK(100.0 * (1.0 - lz.prob(1)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(lz.prob(2) == doctest::Approx(0.01));
    // lazy steps keep the tree valid
    auto lt = sample_discrete_gw(lz, InitialLaw::dirac(3), 400, cfg(3)).tree;
    CHECK(right_profile(0.0, lt) == 3);
}

TEST_CASE("growth schedule") {
    AtomicLaw d1{{{1.0, 1.0}}};
    auto s = build_growth_schedule(quad(), d1, {{1.0, 2.0}, {9.0, 10.0}}, {1.0, 2.0, 4.0, 9.0});
    CHECK(s.betas == std::vector<double>{2.0, 3.0, 5.0, 10.0});
    CHECK(s.depths[2] == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(s.depths[3] == 0.0);
    for (std::size_t i = 0; i < 4; ++i) CHECK(s.depths[i] == doctest::Approx((10.0 / s.betas[i] - 1.0) / 10.0).epsilon(1e-9));
    for (std::size_t i = 1; i < 4; ++i) CHECK(s.depths[i] < s.depths[i - 1]);
    CHECK_THROWS_AS(build_growth_schedule(quad(), d1, {{1.0, 3.0}, {9.0, 2.0}}, {1.0, 9.0}), CsbpError);
    CHECK_THROWS_AS(build_growth_schedule(quad(), d1, {{1.0, 2.0}, {9.0, 10.0}}, {0.5, 9.0}), CsbpError);

    for (int seed = 0; seed < 30; ++seed) {
        auto lv = sample_growth_process(s, cfg(seed, 1.0));
        for (std::size_t i = 0; i < lv.size(); ++i)
            for (std::size_t j = i + 1; j < lv.size(); ++j) {
                EdgeTree e = leaf_erase(s.depths[i] - s.depths[j], lv[j].second);
                CHECK(e == lv[i].second);
                CHECK(right_profile(0.0, lv[i].second) <= right_profile(0.0, lv[j].second));
            }
    }
}

TEST_CASE("parallel replicas do not depend on workers") {
    VerifyOptions one{1, 0.01}, four{4, 0.01};
    auto a = test_height_law(binary(), 1.0, 20.0, 2000, 9, one);
    auto b = test_height_law(binary(), 1.0, 20.0, 2000, 9, four);
    CHECK(report_json(a) == report_json(b));
    std::vector<int> slots(100);
    parallel_for(100, 3, [&](std::int64_t i) { slots[i] = static_cast<int>(i * i); });
    for (int i = 0; i < 100; ++i) CHECK(slots[i] == i * i);
    CHECK_THROWS_AS(parallel_for(10, 2, [](std::int64_t i) { if (i == 7) throw std::runtime_error("x"); }), std::runtime_error);
}
