#include <cmath>

#include "doctest.h"
#include "hgtree/csbp.hpp"

using namespace hgt;

namespace {

BranchingMechanism quad(double b, double a = 0.0) {
    BranchingMechanism m;
    m.a = a;
    m.b = b;
    return m;
}

BranchingMechanism stable_mech(double g, double kap = 1.0) {
    BranchingMechanism m;
    m.stable = StablePart{g, kap};
    return m;
}

BranchingMechanism atom_mech() {
    BranchingMechanism m;
    m.pi = {{1.0, 1.0}};
    m.a = 1.0;
    return m;
}

AtomicLaw delta(double y) { return AtomicLaw{{{y, 1.0}}}; }

}  // namespace

TEST_CASE("u flow closed forms") {
    CsbpKernel k(quad(2.0));
    CHECK(u_flow(k, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-11));
    CHECK(u_flow(k, 0.0, 3.0) == 3.0);
    CHECK(u_flow(k, 5.0, 0.0) == 0.0);
    for (double th : {0.01, 1.0, 50.0, 1e6})
        for (double a : {0.1, 2.0, 30.0}) CHECK(u_flow(k, a, th) == doctest::Approx(th / (1 + th * a)).epsilon(1e-10));
    // psi = -l + l^2: logistic flow pulled to q = 1
    CsbpKernel s(quad(2.0, -1.0));
    CHECK(s.q() == doctest::Approx(1.0).epsilon(1e-15));
    for (double th : {0.2, 0.999999, 3.0})
        for (double a : {0.5, 4.0, 40.0}) {
            double want = 1.0 / (1.0 + (1.0 / th - 1.0) * std::exp(-a));
            CHECK(u_flow(s, a, th) == doctest::Approx(want).epsilon(1e-10));
        }
    CHECK(u_flow(s, 7.0, 1.0) == 1.0);
    CHECK_THROWS_AS(u_flow(k, -1.0, 1.0), CsbpError);
}

TEST_CASE("u flow semigroup") {
    for (const auto& m : {quad(1.0, 0.3), stable_mech(1.5), atom_mech(), stable_mech(1.2, 0.5)}) {
        CsbpKernel k(m);
        for (double th : {0.3, 2.0, 17.0}) {
            double two = u_flow(k, 0.4, u_flow(k, 0.7, th));
            CHECK(two == doctest::Approx(u_flow(k, 1.1, th)).epsilon(1e-9));
        }
    }
}

TEST_CASE("v scale") {
    CHECK(v_scale(CsbpKernel(quad(2.0)), 0.5) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(v_scale(CsbpKernel(stable_mech(1.5)), 1.0) == doctest::Approx(4.0).epsilon(1e-10));
    CHECK_THROWS_AS(v_scale(CsbpKernel(atom_mech()), 1.0), CsbpError);
    CHECK_THROWS_AS(v_scale(CsbpKernel(quad(2.0)), 0.0), CsbpError);
    for (double g : {1.2, 1.5, 1.8, 2.0})
        for (double h : {0.05, 1.0, 10.0}) {
            CsbpKernel k(stable_mech(g));
            double want = std::pow((g - 1.0) * h, -1.0 / (g - 1.0));
            auto d = v_scale_detail(k, h);
            CHECK(d.value == doctest::Approx(want).epsilon(1e-9));
            CHECK(std::abs(d.flow_route - d.integral_route) <= 1e-8 * std::max(1.0, d.value));
        }
    // mixed mechanisms, including a supercritical one where v(h) -> q
    BranchingMechanism mix = quad(1.0, 0.5);
    mix.pi = {{0.5, 2.0}, {3.0, 0.25}};
    BranchingMechanism sup = quad(2.0, -1.0);
    sup.stable = StablePart{1.5, 0.3};
    for (const auto& m : {mix, sup})
        for (double h : {0.1, 1.0, 20.0}) {
            CsbpKernel k(m);
            auto d = v_scale_detail(k, h);
            CHECK(std::abs(d.flow_route - d.integral_route) <= 1e-8 * std::max(1.0, d.value));
            CHECK(d.value >= k.q());
        }
    CsbpKernel s(sup);
    CHECK(v_scale(s, 80.0) == doctest::Approx(s.q()).epsilon(1e-12));
}

TEST_CASE("grey and conservative") {
    CHECK(grey_and_conservative(CsbpKernel(quad(1.0))).grey);
    CHECK(grey_and_conservative(CsbpKernel(stable_mech(1.3))).grey);
    auto a = grey_and_conservative(CsbpKernel(atom_mech()));
    CHECK_FALSE(a.grey);
    CHECK(a.conservative);
}

TEST_CASE("extinction and mean") {
    CsbpKernel k(quad(2.0));
    CHECK(extinction_cdf(k, delta(1.0), 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
    CHECK(extinction_cdf(k, AtomicLaw{{{1.0, 0.5}, {2.0, 0.5}}}, 1.0) ==
          doctest::Approx(0.5 * std::exp(-1.0) + 0.5 * std::exp(-2.0)).epsilon(1e-10));
    CHECK(csbp_mean(CsbpKernel(quad(2.0, 0.5)), delta(3.0), 2.0) == doctest::Approx(3.0 * std::exp(-1.0)));
    CHECK(csbp_mean(CsbpKernel(stable_mech(1.5)), delta(1.0), 1.0) == 1.0);
}

TEST_CASE("gw laplace and height") {
    auto bin = OffspringLaw::from_pmf({0.5, 0.0, 0.5});
    for (double c : {0.5, 1.0, 3.0})
        for (double a : {0.25, 1.0, 8.0})
            for (double th : {0.1, 1.0, 5.0}) {
                double z0 = 1 - std::exp(-th);
                double want = 1 - z0 / (1 + c * a * z0 / 2);
                CHECK(gw_laplace(bin, c, a, th) == doctest::Approx(want).epsilon(1e-11));
            }
    CHECK(height_cdf(bin, 1.0, 2.0) == doctest::Approx(0.5).epsilon(1e-11));
    CHECK(height_cdf(bin, 1.0, 0.0) == 0.0);
    // stable height law: P(H > a) = (1 + (g-1) c a / g)^(-1/(g-1))
    double g = 1.5;
    auto st = stable_offspring(g);
    for (double a : {0.5, 3.0}) {
        double want = 1 - std::pow(1 + (g - 1) * a / g, -1 / (g - 1));
        CHECK(height_cdf(st, 1.0, a) == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("gw laplace bridges to the u flow") {
    // c_l (phi_l(1-z) - 1 + z) = psi(l z) / l, so l z(a) = u(a, l z0)
    for (const auto& m : {atom_mech(), quad(2.0), stable_mech(1.5), quad(1.0, -0.2)}) {
        CsbpKernel k(m);
        for (double lam : {1.5, 4.0}) {
            if (lam <= k.q()) continue;
            auto [xi, c] = offspring_from_psi(m, lam);
            for (double a : {0.3, 2.0})
                for (double th : {0.2, 3.0}) {
                    double z0 = -std::expm1(-th);
                    double want = 1 - u_flow(k, a, lam * z0) / lam;
                    CHECK(gw_laplace(xi, c, a, th) == doctest::Approx(want).epsilon(1e-9));
                }
        }
    }
}

TEST_CASE("erased forest laplace") {
    CsbpKernel k(quad(2.0));
    CHECK(reduced_parameter(k, 4.0, 0.5) == doctest::Approx(4.0 / 3).epsilon(1e-11));
    CHECK(reduced_parameter(k, kLevyForest, 0.5) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK_THROWS_AS(reduced_parameter(k, 0.0, 0.5), CsbpError);
    // the erased forest is GW(xi_{4/3}, 8/3, Poisson(4/3))
    auto [xi, c] = offspring_from_psi(quad(2.0), 4.0 / 3);
    CHECK(c == doctest::Approx(8.0 / 3));
    for (double th : {0.0, 0.5, 2.0}) {
        double L = gw_laplace(xi, c, 1.0, th);
        double want = std::exp(-(4.0 / 3) * (1 - L));
        CHECK(erased_forest_laplace(k, delta(1.0), 4.0, 0.5, 1.0, th) == doctest::Approx(want).epsilon(1e-10));
    }
    // a = 0 is the reduced initial law
    CHECK(erased_forest_laplace(k, delta(1.0), 4.0, 0.5, 0.0, 1e6) == doctest::Approx(std::exp(-4.0 / 3)).epsilon(1e-12));
}

TEST_CASE("profile pmf matches the laplace transform") {
    auto bin = OffspringLaw::from_pmf({0.5, 0.0, 0.5});
    auto p = profile_pmf(bin, 1.0, InitialLaw::dirac(1), 1.0, 200);
    REQUIRE(p.size() == 202);
    double tot = 0;
    for (double x : p) tot += x;
    CHECK(tot == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(p.back() < 1e-12);
    // binary at rate c: P(Z_a = 0) = (c a / 2) / (1 + c a / 2)
    CHECK(p[0] == doctest::Approx(1.0 / 3).epsilon(1e-9));
    for (double th : {0.1, 1.0, 4.0}) {
        double s = 0;
        for (int n = 0; n <= 200; ++n) s += p[n] * std::exp(-th * n);
        CHECK(s == doctest::Approx(gw_laplace(bin, 1.0, 1.0, th)).epsilon(1e-8));
    }
    auto st = stable_offspring(1.5);
    auto q = profile_pmf(st, 1.0, poisson_law(2.0), 0.5, 400);
    for (double th : {0.5, 2.0}) {
        double s = 0;
        for (int n = 0; n <= 400; ++n) s += q[n] * std::exp(-th * n);
        double L = gw_laplace(st, 1.0, 0.5, th);
        CHECK(s == doctest::Approx(std::exp(-2.0 * (1 - L))).epsilon(1e-6));
    }
}
