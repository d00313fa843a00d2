#include <cmath>
#include <random>

#include "doctest.h"
#include "hgtree/laws.hpp"

using namespace hgt;

namespace {

OffspringLaw binary() { return OffspringLaw::from_pmf({0.5, 0.0, 0.5}); }

BranchingMechanism gaussian(double b) {
    BranchingMechanism m;
    m.b = b;
    return m;
}

BranchingMechanism stable_mech(double g) {
    BranchingMechanism m;
    m.stable = StablePart{g, 1.0};
    return m;
}

// single atom at 1 with drift chosen so that psi'(0+) = 0
BranchingMechanism atom_mech() {
    BranchingMechanism m;
    m.pi = {{1.0, 1.0}};
    m.a = 1.0;
    return m;
}

OffspringLaw random_law(std::mt19937_64& g) {
    int K = std::uniform_int_distribution<int>(2, 6)(g);
    std::vector<double> p(K + 1);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    double s = 0;
    for (int k = 0; k <= K; ++k) {
        if (k == 1) continue;
        p[k] = u(g);
        s += p[k];
    }
    for (double& x : p) x /= s;
    // push the rounding error into xi(0)
    double t = 0;
    for (int k = 1; k <= K; ++k) t += p[k];
    p[0] = 1.0 - t;
    return OffspringLaw::from_pmf(p);
}

}  // namespace

TEST_CASE("pgf examples") {
    CHECK(binary().pgf(0.3) == doctest::Approx(0.545).epsilon(1e-15));
    CHECK(binary().pgf(1.0) == 1.0);
    CHECK(stable_offspring(1.5).pgf(0.0) == doctest::Approx(2.0 / 3).epsilon(1e-15));
    CHECK(stable_offspring(1.5).pgf(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(binary().pgf(1.5), DomainError);
    // stable law matches r + (1-r)^g / g
    for (double r : {-0.5, 0.0, 0.3, 0.9}) {
        auto s = stable_offspring(1.3);
        CHECK(s.pgf(r) == doctest::Approx(r + std::pow(1 - r, 1.3) / 1.3).epsilon(1e-14));
    }
}

TEST_CASE("smallest fixed point") {
    CHECK(smallest_fixed_point(binary()) == 1.0);
    CHECK(smallest_fixed_point(OffspringLaw::from_pmf({0.2, 0.0, 0.8})) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(smallest_fixed_point(OffspringLaw::from_pmf({1.0})) == 1.0);
    CHECK(smallest_fixed_point(OffspringLaw::from_pmf({0.0, 0.0, 1.0})) == 0.0);
}

TEST_CASE("conservativity") {
    CHECK(is_conservative(binary()));
    CHECK(is_conservative(stable_offspring(1.5)));
    CHECK(is_conservative(OffspringLaw::from_pmf({0.7, 0.0, 0.3})));
}

TEST_CASE("stable offspring pmf") {
    auto s2 = stable_offspring(2.0);
    CHECK(s2.prob(0) == 0.5);
    CHECK(s2.prob(1) == 0.0);
    CHECK(s2.prob(2) == 0.5);
    CHECK(s2.prob(3) == 0.0);
    auto s = stable_offspring(1.5);
    CHECK(s.prob(0) == doctest::Approx(2.0 / 3));
    CHECK(s.prob(1) == 0.0);
    CHECK(s.prob(2) == doctest::Approx(0.25).epsilon(1e-14));
    // partial sums plus the closed-form survival add to one
    double tot = 0;
    for (int k = 0; k <= 2000; ++k) {
        CHECK(s.prob(k) >= 0.0);
        tot += s.prob(k);
    }
    double surv = (0.5 / 1.5) * std::exp(std::lgamma(2000 - 0.5) - std::lgamma(0.5) - std::lgamma(2001.0));
    CHECK(tot + surv == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(stable_offspring(2.5), LawError);
    CHECK_THROWS_AS(stable_offspring(1.0), LawError);
}

TEST_CASE("quantile sampling map") {
    auto s = stable_offspring(1.5);
    CHECK(s.quantile(0.999) == 0);
    CHECK(s.quantile(0.3) == 2);
    // P(K > k) < v  iff  quantile(v) <= k
    for (double v : {0.2, 0.01, 1e-4, 1e-8}) {
        auto k = s.quantile(v);
        double surv_k = 0, surv_km1 = 0;
        double cum = 0;
        for (int j = 0; j <= std::min<std::int64_t>(k, 100000); ++j) {
            if (j == k - 1) surv_km1 = 1 - cum - s.prob(j);
            cum += s.prob(j);
        }
        surv_k = 1 - cum;
        if (k < 100000) {
            CHECK(surv_k < v + 1e-12);
            if (k > 0) CHECK(surv_km1 >= v - 1e-12);
        }
    }
    CHECK(binary().quantile(0.7) == 0);
    CHECK(binary().quantile(0.3) == 2);
}

TEST_CASE("reduce law examples") {
    GwLaw L{binary(), 1.5, InitialLaw::dirac(1)};
    for (double a : {0.0, 0.2, 0.7}) {
        GwLaw R = reduce_law(L, a);
        CHECK(R.xi.prob(0) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(R.xi.prob(2) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(R.xi.prob(1) == 0.0);
        CHECK(R.c == doctest::Approx(1.5 * (1 - a)).epsilon(1e-14));
    }
    GwLaw P{binary(), 1.0, poisson_law(3.0)};
    GwLaw PR = reduce_law(P, 0.4);
    auto target = poisson_law(1.8);
    for (int k = 0; k < 20; ++k) CHECK(PR.mu.prob(k) == doctest::Approx(target.prob(k)).epsilon(1e-12));
    CHECK(law_distance(reduce_law(L, 0.0), L) == 0.0);
    // supercritical law: alpha above q is not admissible
    GwLaw S{OffspringLaw::from_pmf({0.2, 0.0, 0.8}), 1.0, InitialLaw::dirac(1)};
    CHECK_NOTHROW(reduce_law(S, 0.25));
    CHECK_THROWS_AS(reduce_law(S, 0.5), LawError);
}

TEST_CASE("reduced pgf matches the closed formula") {
    std::mt19937_64 g(1);
    for (int rep = 0; rep < 30; ++rep) {
        OffspringLaw xi = random_law(g);
        double al = std::uniform_real_distribution<double>(0.0, 0.9)(g);
        if (al > xi.pgf(al)) al = 0.5 * smallest_fixed_point(xi);
        GwLaw R = reduce_law({xi, 1.0, InitialLaw::dirac(2)}, al);
        double d = 1 - xi.pgf_deriv(al);
        for (int i = 0; i < 20; ++i) {
            double r = i / 19.0;
            double want = r + (xi.pgf(al + (1 - al) * r) - al - (1 - al) * r) / ((1 - al) * d);
            CHECK(R.xi.pgf(r) == doctest::Approx(want).epsilon(1e-12));
        }
        CHECK(R.c < 1.0 + 1e-15);
        CHECK(R.mu.prob(0) >= 0.0);
    }
}

TEST_CASE("invert law round trip") {
    GwLaw L{OffspringLaw::from_pmf({0.3, 0.0, 0.5, 0.2}), 2.0, InitialLaw::dirac(1)};
    GwLaw back = invert_law(reduce_law(L, 0.2), 0.2);
    CHECK(law_distance(back, L) <= 1e-10);
    CHECK(law_distance(invert_law(L, 0.0), L) == 0.0);
    // a point mass at one root has no inverse
    CHECK_THROWS_AS(invert_law(GwLaw{binary(), 1.0, InitialLaw::dirac(1)}, 0.6), LawError);
    GwLaw B{binary(), 1.0, poisson_law(1.0)};
    GwLaw Bi = invert_law(B, 0.6);
    CHECK(Bi.mu.prob(3) == doctest::Approx(poisson_law(2.5).prob(3)).epsilon(1e-13));
    CHECK(Bi.xi.prob(0) == doctest::Approx(0.5));
    CHECK(Bi.xi.prob(2) == doctest::Approx(0.5));
    CHECK(Bi.c == doctest::Approx(1.0 / 0.4));

    std::mt19937_64 g(2);
    double worst = 0;
    for (int rep = 0; rep < 100; ++rep) {
        OffspringLaw xi = random_law(g);
        GwLaw X{xi, 1.0 + rep % 3, InitialLaw::dirac(1 + rep % 3)};
        double q = smallest_fixed_point(xi);
        for (int i = 1; i <= 9; ++i) {
            double al = i / 10.0;
            if (al > q) break;
            worst = std::max(worst, law_distance(invert_law(reduce_law(X, al), al), X));
        }
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("inversion needs a certified extension") {
    auto m = atom_mech();
    InitialLaw mu = poisson_law(2.0);
    InitialLaw truncated = mu;
    truncated.mixed.reset();
    truncated.residual_mass = 1e-13;
    CHECK_THROWS_AS(thin_initial(truncated, -0.5), DomainError);
    CHECK_NOTHROW(thin_initial(mu, -0.5));
}

TEST_CASE("compose alphas") {
    CHECK(compose_alphas(0.5, 0.5) == 0.75);
    CHECK(compose_alphas(0.3, 0.0) == doctest::Approx(0.3).epsilon(1e-16));
    std::mt19937_64 g(4);
    for (int rep = 0; rep < 50; ++rep) {
        OffspringLaw xi = random_law(g);
        double q = smallest_fixed_point(xi);
        double a = 0.4 * std::min(q, 0.9), b = 0.3 * std::min(q, 0.9);
        GwLaw L{xi, 1.0, InitialLaw::dirac(3)};
        GwLaw two = reduce_law(reduce_law(L, a), b);
        GwLaw one = reduce_law(L, compose_alphas(a, b));
        CHECK(law_distance(two, one) <= 1e-12);
    }
}

TEST_CASE("psi evaluation") {
    CHECK(psi_eval(gaussian(2.0), 3.0) == 9.0);
    CHECK(psi_eval(atom_mech(), 0.0) == 0.0);
    CHECK(psi_eval(atom_mech(), 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(psi_deriv(atom_mech(), 0.0) == doctest::Approx(0.0));
    CHECK(psi_root(gaussian(1.0)) == 0.0);
    BranchingMechanism sup;
    sup.a = -1.0;
    sup.b = 2.0;
    CHECK(psi_root(sup) == doctest::Approx(1.0).epsilon(1e-15));
    auto m = mechanism_from_json(R"({"a":1,"pi":[[1,1]]})");
    CHECK(psi_eval(m, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK_THROWS_AS(mechanism_from_json(R"({"b":-1})"), LawError);
}

TEST_CASE("offspring from psi") {
    for (double g : {1.2, 1.5, 1.8}) {
        auto ref = offspring_from_psi(stable_mech(g), 1.0).first;
        for (double l : {0.5, 4.0}) {
            auto x = offspring_from_psi(stable_mech(g), l).first;
            for (int k = 0; k < 50; ++k) CHECK(x.prob(k) == doctest::Approx(ref.prob(k)).epsilon(1e-12));
        }
        auto st = stable_offspring(g);
        for (int k = 0; k < 50; ++k) CHECK(ref.prob(k) == doctest::Approx(st.prob(k)).epsilon(1e-12));
    }
    auto [x2, c2] = offspring_from_psi(gaussian(2.0), 3.0);
    CHECK(x2.prob(0) == doctest::Approx(0.5));
    CHECK(x2.prob(2) == doctest::Approx(0.5));
    CHECK(c2 == doctest::Approx(6.0));
    auto [xa, ca] = offspring_from_psi(atom_mech(), 1.0);
    double e = std::exp(-1.0);
    CHECK(ca == doctest::Approx(1 - e));
    CHECK(xa.prob(0) == doctest::Approx(e / (1 - e)).epsilon(1e-14));
    // pgf identity on the pmf
    for (int i = 0; i <= 10; ++i) {
        double r = i / 10.0;
        double s = 0;
        for (int k = 0; k < 200; ++k) s += xa.prob(k) * std::pow(r, k);
        CHECK(s == doctest::Approx(xa.pgf(r)).epsilon(1e-12));
    }
    double mass = 0;
    for (int k = 0; k < 200; ++k) mass += xa.prob(k);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    BranchingMechanism sup;
    sup.a = -1.0;
    sup.b = 2.0;
    CHECK_THROWS_AS(offspring_from_psi(sup, 0.5), LawError);
}

TEST_CASE("mu from rho") {
    auto p = mu_from_rho(AtomicLaw{{{1.0, 1.0}}}, 2.0);
    for (int k = 0; k < 10; ++k)
        CHECK(p.prob(k) == doctest::Approx(std::exp(-2.0) * std::pow(2.0, k) / std::tgamma(k + 1.0)).epsilon(1e-13));
    auto d = mu_from_rho(AtomicLaw{{{0.0, 1.0}}}, 5.0);
    CHECK(d.prob(0) == 1.0);
    CHECK(d.pmf.size() == 1);
    auto m = mu_from_rho(AtomicLaw{{{1.0, 0.5}, {3.0, 0.5}}}, 1.0);
    CHECK(m.prob(0) == doctest::Approx(0.5 * std::exp(-1.0) + 0.5 * std::exp(-3.0)).epsilon(1e-14));
    CHECK(m.residual_mass < 1e-12);
}

TEST_CASE("extension probe") {
    auto b = extension_probe(binary(), {0.9});
    CHECK(b[0].ok);
    auto s = extension_probe(stable_offspring(1.5), {0.99});
    CHECK(s[0].ok);
    // mass at three children only: the inverse has a negative entry
    auto bad = extension_probe(OffspringLaw::from_pmf({0.6, 0.0, 0.0, 0.4}), {0.1, 0.5});
    CHECK_FALSE(bad[1].ok);
    auto psi = extension_probe(offspring_from_psi_law(atom_mech(), 2.0), {0.3, 0.6, 0.9});
    for (const auto& r : psi) CHECK(r.ok);
}

TEST_CASE("law json") {
    CHECK(offspring_from_json(R"({"pmf":[0.5,0,0.5]})").prob(2) == 0.5);
    CHECK(offspring_from_json(R"({"stable":1.5})").prob(2) == doctest::Approx(0.25));
    CHECK(offspring_from_json(R"({"psi":{"b":2},"lambda":1})").prob(2) == doctest::Approx(0.5));
    CHECK_THROWS_AS(offspring_from_json(R"({"pmf":[0.5,0.4]})"), LawError);
    CHECK_THROWS_AS(offspring_from_json(R"({"pmf":[1.5,-0.5]})"), LawError);
    CHECK(atomic_from_json(R"({"atoms":[[1,0.5],[3,0.5]]})").atoms.size() == 2);
    CHECK_THROWS_AS(atomic_from_json(R"({"atoms":[[1,0.4]]})"), LawError);

    GwLaw L = gw_law_from_json(R"({"xi":{"pmf":[0.5,0,0.5]},"c":2,"mu":{"poisson":1.5}})");
    CHECK(L.c == 2.0);
    CHECK(L.mu.prob(1) == doctest::Approx(1.5 * std::exp(-1.5)));
    CHECK(gw_law_from_json(R"({"xi":{"stable":1.5}})").mu.prob(1) == 1.0);
    GwLaw P = gw_law_from_json(R"({"psi":{"b":2},"rho":{"atoms":[[1,1]]},"lambda":4})");
    CHECK(P.c == doctest::Approx(8.0));
    CHECK(P.mu.prob(2) == doctest::Approx(8.0 * std::exp(-4.0)));
    CHECK_THROWS_AS(gw_law_from_json(R"({"xi":{"pmf":[1]},"c":0})"), LawError);
    CHECK_THROWS_AS(gw_law_from_json(R"({"xi":{"pmf":[1]},"mu":{"pmf":[0.5]}})"), LawError);
    CHECK_THROWS_AS(gw_law_from_json(R"([1,2])"), LawError);
    auto j = to_json(L, 4);
    CHECK(j.find("\"rest\"") != std::string::npos);
}
