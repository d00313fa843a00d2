#include "hgtree/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "hgtree/reduction.hpp"

namespace hgt {

void parallel_for(std::int64_t n, int workers, const std::function<void(std::int64_t)>& body) {
    if (n <= 0) return;
    workers = std::max(1, workers);
    if (workers == 1) {
        for (std::int64_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::mutex mu;
    std::int64_t bad = n;
    std::exception_ptr err;
    auto run = [&] {
        for (;;) {
            std::int64_t i = next++;
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                // keep the failure of the lowest index, independent of timing
                std::lock_guard<std::mutex> lk(mu);
                if (i < bad) {
                    bad = i;
                    err = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(run);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

SamplerConfig replica_cfg(std::uint64_t seed, std::int64_t i, std::optional<double> cap) {
    SamplerConfig c;
    c.seed = replica_seed(seed, static_cast<std::uint64_t>(i));
    c.height_cap = cap;
    return c;
}

std::vector<std::int64_t> histogram(const std::vector<std::int64_t>& xs) {
    std::vector<std::int64_t> h;
    for (auto x : xs) {
        if (x < 0) continue;
        if (static_cast<std::size_t>(x) >= h.size()) h.resize(x + 1, 0);
        ++h[x];
    }
    return h;
}

std::vector<double> pmf_head(const OffspringLaw& xi, int kmax) { return xi.pmf(kmax); }

TestReport named(TestReport r, std::string name) {
    r.name = std::move(name);
    return r;
}

TestReport finish(TestReport r, std::uint64_t seed, Clock::time_point t0) {
    r.seed = seed;
    r.runtime = seconds_since(t0);
    return r;
}

TestReport failed(std::string name, std::string why, std::int64_t n) {
    TestReport r;
    r.name = std::move(name);
    r.sample_size = n;
    r.pass = false;
    r.note = std::move(why);
    return r;
}

}  // namespace

TestReport test_height_law(const OffspringLaw& xi, double c, double H, std::int64_t n, std::uint64_t seed,
                           const VerifyOptions& o) {
    auto t0 = Clock::now();
    std::vector<double> g(n);
    parallel_for(n, o.workers, [&](std::int64_t i) { g[i] = total_height(sample_gw_tree(xi, c, replica_cfg(seed, i, H)).tree); });
    auto r = ks_test([&](double x) { return height_cdf(xi, c, x); }, g, H, o.threshold);
    r.note += "; heights vs height_cdf";
    return finish(named(r, "height_law"), seed, t0);
}

TestReport test_reduced_law(const GwLaw& law, double h, double H, std::int64_t n, std::uint64_t seed,
                            std::optional<double> alpha_override, const VerifyOptions& o) {
    auto t0 = Clock::now();
    if (!(h > 0.0) || !(H > h)) throw std::invalid_argument("test_reduced_law: need 0 < h < height_cap");
    const double alpha = alpha_override ? *alpha_override : height_cdf(law.xi, law.c, h);
    const GwLaw red = reduce_law(law, alpha);
    const double Hr = H - h;  // the reduced forest is exact below H - h
    struct Obs {
        std::int64_t z0 = 0, k = -1;
        double D = -1.0;
    };
    std::vector<Obs> obs(n);
    parallel_for(n, o.workers, [&](std::int64_t i) {
        EdgeTree R = leaf_erase(h, sample_gw_forest(law, replica_cfg(seed, i, H)).tree);
        Obs& ob = obs[i];
        ob.z0 = right_profile(0.0, R);
        if (ob.z0 == 0) return;
        // the first surviving progenitor; which one survives does not depend on its shape
        FirstBranch fb = first_branch(split_measure(0.0, R).front());
        ob.D = std::min(fb.D, Hr);
        if (fb.D < Hr) ob.k = fb.k;
    });
    std::vector<std::int64_t> z0s, ks;
    std::vector<double> Ds;
    for (const auto& ob : obs) {
        z0s.push_back(ob.z0);
        if (ob.z0 == 0) continue;
        Ds.push_back(ob.D);
        if (ob.k >= 0) ks.push_back(ob.k);
    }
    if (Ds.size() < 1000) return finish(failed("reduced_law", "too few conditioned samples", n), seed, t0);
    std::vector<TestReport> parts;
    parts.push_back(named(chi_square(pmf_head(red.xi, 64), histogram(ks), o.threshold), "first_branch_children"));
    const double cr = red.c;
    parts.push_back(named(ks_test([cr](double x) { return -std::expm1(-cr * x); }, Ds, Hr, o.threshold), "first_segment"));
    std::vector<double> mu(red.mu.pmf.begin(), red.mu.pmf.begin() + std::min<std::size_t>(red.mu.pmf.size(), 200));
    parts.push_back(named(chi_square(mu, histogram(z0s), o.threshold), "root_count"));
    auto r = composite("reduced_law", std::move(parts), o.threshold);
    r.sample_size = n;
    r.note = fmt::format("alpha={:.12g} c_reduced={:.12g} conditioned={}", alpha, cr, Ds.size());
    return finish(r, seed, t0);
}

TestReport test_erased_forest_law(const BranchingMechanism& m, const AtomicLaw& rho, double lam, double h, double a,
                                  std::int64_t n, std::uint64_t seed, std::optional<double> h_target,
                                  const VerifyOptions& o) {
    auto t0 = Clock::now();
    const double ht = h_target ? *h_target : h;
    const double H = a + h + 0.125;
    CsbpKernel k(m);
    std::vector<std::int64_t> z(n);
    parallel_for(n, o.workers, [&](std::int64_t i) {
        EdgeTree F = sample_gw_forest(m, rho, lam, replica_cfg(seed, i, H)).tree;
        z[i] = erased_profile(h, a, F);
    });
    std::vector<TestReport> parts;
    for (double th : {0.5, 1.0, 2.0}) {
        std::vector<double> v(n);
        for (std::int64_t i = 0; i < n; ++i) v[i] = std::exp(-th * static_cast<double>(z[i]));
        parts.push_back(named(mean_check(v, erased_forest_laplace(k, rho, lam, ht, a, th)), fmt::format("laplace_theta_{}", th)));
    }
    const double u = reduced_parameter(k, lam, ht);
    GwLaw e = gw_from_psi(m, rho, u);
    auto pmf = profile_pmf(e.xi, e.c, e.mu, a, 200);
    pmf.pop_back();  // overflow state joins the tail cell
    parts.push_back(named(chi_square(pmf, histogram(z), o.threshold), "erased_profile_pmf"));
    auto r = composite("erased_forest_law", std::move(parts), o.threshold);
    r.sample_size = n;
    r.note = fmt::format("reduced parameter u(h,lambda)={:.12g}", u);
    return finish(r, seed, t0);
}

TestReport test_regenerative(const GwLaw& law, double a, double H, std::int64_t n, std::uint64_t seed, int extra_power,
                             const VerifyOptions& o) {
    auto t0 = Clock::now();
    if (!(H > a)) throw std::invalid_argument("test_regenerative: height cap must exceed a");
    std::vector<std::int64_t> zs(n);
    std::vector<double> gs(n);
    parallel_for(n, o.workers, [&](std::int64_t i) {
        EdgeTree F = sample_gw_forest(law, replica_cfg(seed, i, H)).tree;
        zs[i] = right_profile(a, F);
        gs[i] = total_height(above(a, F));
    });
    std::vector<TestReport> parts;
    std::string note;
    std::int64_t bad0 = 0;
    for (std::int64_t i = 0; i < n; ++i)
        if (zs[i] == 0 && gs[i] != 0.0) ++bad0;
    TestReport zero;
    zero.name = "stratum_0_point";
    zero.sample_size = n;
    zero.statistic = static_cast<double>(bad0);
    zero.max_abs_error = static_cast<double>(bad0);
    zero.pass = bad0 == 0;
    parts.push_back(zero);
    for (int kk = 1; kk <= 3; ++kk) {
        std::vector<double> g;
        for (std::int64_t i = 0; i < n; ++i)
            if (zs[i] == kk) g.push_back(gs[i]);
        if (g.size() < 1000) {
            note += fmt::format("stratum {} skipped ({} samples); ", kk, g.size());
            continue;
        }
        const int pw = kk + extra_power;
        auto cdf = [&](double x) { return std::pow(height_cdf(law.xi, law.c, x), pw); };
        parts.push_back(named(ks_test(cdf, g, H - a, o.threshold), fmt::format("stratum_{}", kk)));
    }
    auto r = composite("regenerative", std::move(parts), o.threshold);
    r.sample_size = n;
    r.note = note;
    return finish(r, seed, t0);
}

TestReport test_martingale(const GrowthSchedule& s, double a, double H, std::int64_t n, std::uint64_t seed,
                           const VerifyOptions& o) {
    auto t0 = Clock::now();
    const std::size_t L = s.lambdas.size();
    if (L < 2) {
        TestReport r;
        r.name = "martingale";
        r.pass = true;
        r.note = "single level: vacuous";
        return finish(r, seed, t0);
    }
    if (!(a < H - s.depths.front())) throw std::invalid_argument("test_martingale: a must lie below H - h_lambda on every level");
    std::vector<std::vector<double>> x(L, std::vector<double>(n));
    parallel_for(n, o.workers, [&](std::int64_t i) {
        auto lv = sample_growth_process(s, replica_cfg(seed, i, H));
        for (std::size_t j = 0; j < L; ++j) x[j][i] = right_profile(a, lv[j].second) / s.betas[j];
    });
    std::vector<TestReport> parts;
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = i + 1; j < L; ++j) {
            std::vector<double> d(n);
            for (std::int64_t t = 0; t < n; ++t) d[t] = x[i][t] - x[j][t];
            parts.push_back(named(mean_check(d, 0.0), fmt::format("levels_{}_{}", s.lambdas[i], s.lambdas[j])));
        }
    auto r = composite("martingale", std::move(parts), o.threshold);
    r.sample_size = n;
    return finish(r, seed, t0);
}

TestReport test_invariance(const InvarianceSetup& s, std::int64_t n, std::uint64_t seed, const VerifyOptions& o) {
    auto t0 = Clock::now();
    const int p = s.p;
    // statistics are read on the unscaled tree at heights p a and p h, which
    // equals rescaling by 1/p and keeps integer heights exact
    const double ap = s.a * p, hp = s.h * p;
    const int gcap = static_cast<int>(std::ceil(ap + hp)) - 1;
    const auto xi = OffspringLaw::from_pmf({0.5, 0.0, 0.5});
    const auto mu = InitialLaw::dirac(p);
    BranchingMechanism feller;
    feller.b = 1.0;
    const AtomicLaw rho{{{1.0, 1.0}}};
    CsbpKernel k(feller);
    std::vector<std::int64_t> z(n), ze(n);
    parallel_for(n, o.workers, [&](std::int64_t i) {
        SamplerConfig c = replica_cfg(seed, i, std::nullopt);
        c.vertex_cap = 100'000'000;
        EdgeTree F = sample_discrete_gw(xi, mu, gcap, c).tree;
        z[i] = right_profile(ap, F);
        ze[i] = erased_profile(hp, ap, F);
    });
    std::vector<TestReport> parts;
    const double allow = s.allowance_k / p;
    for (double th : s.thetas) {
        std::vector<double> v(n);
        for (std::int64_t i = 0; i < n; ++i) v[i] = std::exp(-th * static_cast<double>(z[i]) / p);
        double target = std::exp(-u_flow(k, s.a, th));
        parts.push_back(named(mean_check(v, target, allow), fmt::format("laplace_theta_{}", th)));
    }
    // limit of the h-erased forest: GW(xi_v, c_v; mu_v) with v = v(h)
    const double v = reduced_parameter(k, kLevyForest, s.h);
    GwLaw e = gw_from_psi(feller, rho, v);
    auto pmf = profile_pmf(e.xi, e.c, e.mu, s.a, 200);
    for (double th : {0.5, 2.0}) {
        double lt = 0.0;
        for (std::size_t j = 0; j + 1 < pmf.size(); ++j) lt += pmf[j] * std::exp(-th * static_cast<double>(j));
        double ref = erased_forest_laplace(k, rho, kLevyForest, s.h, s.a, th);
        if (std::abs(lt - ref) > 1e-6) throw CsbpError("test_invariance: erased pmf and Laplace transform disagree");
    }
    pmf.pop_back();
    parts.push_back(named(chi_square(pmf, histogram(ze), o.threshold), "erased_profile_pmf"));
    auto r = composite("invariance", std::move(parts), o.threshold);
    r.sample_size = n;
    r.note = fmt::format("p={} allowance={:.3g} v(h)={:.12g}", p, allow, v);
    return finish(r, seed, t0);
}

TestReport test_tightness_bounds(const std::vector<EdgeTree>& trees, const std::vector<TightnessPoint>& grid,
                                 const std::function<int(double, double, const EdgeTree&)>& covering_fn) {
    auto t0 = Clock::now();
    std::int64_t viol = 0;
    for (const auto& t : trees)
        for (const auto& g : grid) {
            int N = covering_fn ? covering_fn(g.h, g.r, t) : covering_number(g.h, g.r, t);
            if (erased_profile(g.h, g.a, t) > N) ++viol;
            if (N > covering_upper_bound(g.h, g.r, t)) ++viol;
        }
    TestReport r;
    r.name = "tightness_bounds";
    r.sample_size = static_cast<std::int64_t>(trees.size());
    r.statistic = static_cast<double>(viol);
    r.max_abs_error = static_cast<double>(viol);
    r.threshold = 0.0;
    r.pass = viol == 0;
    r.note = fmt::format("{} violations over {} checks", viol, 2 * trees.size() * grid.size());
    return finish(r, 0, t0);
}

namespace {

// rejection rate of `rule` over reps seeds
TestReport rate(const std::string& name, int reps, std::uint64_t seed, int workers,
                const std::function<bool(std::uint64_t)>& rejects) {
    std::vector<char> rej(reps);
    parallel_for(reps, workers, [&](std::int64_t i) { rej[i] = rejects(replica_seed(seed, static_cast<std::uint64_t>(i))); });
    int c = 0;
    for (char x : rej) c += x;
    TestReport r;
    r.name = name;
    r.sample_size = reps;
    r.statistic = static_cast<double>(c) / reps;
    r.max_abs_error = r.statistic;
    r.threshold = 0.03;
    r.pass = r.statistic <= 0.03;
    r.note = fmt::format("{} of {} rejected", c, reps);
    return r;
}

}  // namespace

TestReport calibration(std::uint64_t seed, int reps, const VerifyOptions& o) {
    auto t0 = Clock::now();
    std::vector<TestReport> parts;
    const auto bin = OffspringLaw::from_pmf({0.5, 0.0, 0.5});
    const VerifyOptions inner{1, o.threshold};
    const std::uint64_t base = splitmix64(seed);
    // decision rules fed with exact draws from their targets
    parts.push_back(rate("chi_square_null", reps, derive_key(base, 1), o.workers, [&](std::uint64_t s) {
        Stream st(s);
        auto target = poisson_law(4.0 / 3.0);
        std::vector<std::int64_t> x(10000);
        for (auto& v : x) v = st.poisson(4.0 / 3.0);
        return !chi_square(target.pmf, histogram(x), o.threshold).pass;
    }));
    parts.push_back(rate("ks_null", reps, derive_key(base, 2), o.workers, [&](std::uint64_t s) {
        Stream st(s);
        std::vector<double> x(1000);
        for (auto& v : x) v = st.exponential(1.0);
        return !ks_test([](double t) { return -std::expm1(-t); }, x, std::nullopt, o.threshold).pass;
    }));
    parts.push_back(rate("ks_censored_null", reps, derive_key(base, 3), o.workers, [&](std::uint64_t s) {
        Stream st(s);
        std::vector<double> x(1000);
        for (auto& v : x) {
            double u = st.uniform();
            v = std::min(2.0 * u / (1.0 - u), 20.0);
        }
        return !ks_test([](double t) { return t / (t + 2.0); }, x, 20.0, o.threshold).pass;
    }));
    parts.push_back(rate("laplace_null", reps, derive_key(base, 4), o.workers, [&](std::uint64_t s) {
        Stream st(s);
        std::vector<double> z(2000);
        for (auto& v : z) v = static_cast<double>(st.poisson(2.0));
        std::vector<TestReport> ps;
        for (double th : {0.5, 1.0, 2.0}) {
            std::vector<double> e(z.size());
            for (std::size_t i = 0; i < z.size(); ++i) e[i] = std::exp(-th * z[i]);
            ps.push_back(mean_check(e, std::exp(-2.0 * -std::expm1(-th))));
        }
        return !composite("laplace", ps, o.threshold).pass;
    }));
    // full pipelines at reduced sample sizes
    parts.push_back(rate("height_law_pipeline", reps, derive_key(base, 5), o.workers,
                         [&](std::uint64_t s) { return !test_height_law(bin, 1.0, 20.0, 1000, s, inner).pass; }));
    parts.push_back(rate("reduced_law_pipeline", reps, derive_key(base, 6), o.workers, [&](std::uint64_t s) {
        return !test_reduced_law({bin, 1.0, InitialLaw::dirac(1)}, 1.0, 8.0, 1600, s, std::nullopt, inner).pass;
    }));
    BranchingMechanism quad;
    quad.b = 2.0;
    const AtomicLaw d1{{{1.0, 1.0}}};
    parts.push_back(rate("erased_forest_pipeline", reps, derive_key(base, 7), o.workers, [&](std::uint64_t s) {
        return !test_erased_forest_law(quad, d1, 4.0, 0.5, 1.0, 1000, s, std::nullopt, inner).pass;
    }));
    auto sched = build_growth_schedule(quad, d1, {{1.0, 2.0}, {9.0, 10.0}}, {1.0, 2.0, 4.0, 9.0});
    parts.push_back(rate("martingale_pipeline", reps, derive_key(base, 8), o.workers,
                         [&](std::uint64_t s) { return !test_martingale(sched, 0.5, 1.0, 400, s, inner).pass; }));
    // strata 1 and 2 only at this size
    parts.push_back(rate("regenerative_pipeline", reps, derive_key(base, 9), o.workers, [&](std::uint64_t s) {
        return !test_regenerative({bin, 1.0, InitialLaw::dirac(1)}, 1.0, 4.0, 12000, s, 0, inner).pass;
    }));
    auto r = composite("calibration", std::move(parts), o.threshold);
    r.note = "rejection rate per rule must be <= 0.03";
    return finish(r, seed, t0);
}

std::vector<std::string> suite_names() {
    return {"height-law", "reduced-law", "erased-forest", "regenerative", "martingale", "invariance", "tightness", "calibration"};
}

std::vector<TestReport> run_suite(const std::string& name, std::uint64_t seed, const VerifyOptions& o) {
    const auto bin = OffspringLaw::from_pmf({0.5, 0.0, 0.5});
    BranchingMechanism quad;
    quad.b = 2.0;
    const AtomicLaw d1{{{1.0, 1.0}}};
    std::vector<TestReport> out;
    if (name == "height-law") {
        out.push_back(test_height_law(bin, 1.0, 20.0, 50000, seed, o));
    } else if (name == "reduced-law") {
        out.push_back(named(test_reduced_law({bin, 1.0, InitialLaw::dirac(1)}, 1.0, 8.0, 50000, seed, std::nullopt, o),
                            "reduced_law_binary"));
        out.push_back(named(test_reduced_law({stable_offspring(1.5), 1.0, InitialLaw::dirac(1)}, 0.5, 6.0, 50000,
                                             derive_key(seed, 1), std::nullopt, o),
                            "reduced_law_stable_1.5"));
    } else if (name == "erased-forest") {
        out.push_back(test_erased_forest_law(quad, d1, 4.0, 0.5, 1.0, 50000, seed, std::nullopt, o));
    } else if (name == "regenerative") {
        out.push_back(test_regenerative({bin, 1.0, InitialLaw::dirac(1)}, 1.0, 21.0, 100000, seed, 0, o));
    } else if (name == "martingale") {
        auto s = build_growth_schedule(quad, d1, {{1.0, 2.0}, {9.0, 10.0}}, {1.0, 2.0, 4.0, 9.0});
        out.push_back(test_martingale(s, 0.5, 1.0, 50000, seed, o));
    } else if (name == "invariance") {
        InvarianceSetup s;
        out.push_back(named(test_invariance(s, 4000, seed, o), "invariance_p200"));
    } else if (name == "tightness") {
        std::vector<EdgeTree> trees;
        for (int i = 0; i < 200; ++i) {
            SamplerConfig c = replica_cfg(seed, i, 8.0);
            trees.push_back(sample_gw_tree(bin, 1.0, c).tree);
        }
        out.push_back(test_tightness_bounds(trees, {{0.2, 2, 1}, {0.2, 4, 2.5}, {0.5, 2, 1}, {0.5, 4, 3}}));
        out.back().seed = seed;
    } else if (name == "calibration") {
        out.push_back(calibration(seed, 200, o));
    } else {
        throw std::invalid_argument("unknown suite: " + name);
    }
    return out;
}

}  // namespace hgt
