#include "hgtree/csbp.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

namespace hgt {

CsbpKernel::CsbpKernel(BranchingMechanism mech, SolverConfig cfg) : mech_(std::move(mech)), cfg_(cfg) {
    if (!(cfg_.rtol > 0.0 && cfg_.rtol <= 1e-6)) throw CsbpError("csbp: rtol must be in (0, 1e-6]");
    try {
        q_ = psi_root(mech_);
    } catch (const LawError& e) {
        throw CsbpError(e.what());
    }
}

double u_flow(const CsbpKernel& k, double a, double theta) {
    if (!(a >= 0.0) || !(theta >= 0.0) || !std::isfinite(theta)) throw CsbpError("u_flow: need a >= 0 and finite theta >= 0");
    const double q = k.q();
    if (a == 0.0 || theta == 0.0 || theta == q) return theta;
    const double slope = k.dpsi(q);
    // near a simple fixed point the flow is linear to second order
    const double band = 1e-6 * std::max(1.0, q);
    auto near = [&](double u) { return slope > 0.0 && std::abs(u - q) <= band; };
    auto finish = [&](double u, double rest) { return q + (u - q) * std::exp(-slope * rest); };
    if (near(theta)) return finish(theta, a);
    OdeOptions opt;
    opt.rtol = k.config().rtol;
    opt.atol = 1e-300;
    opt.max_step = k.config().max_step;
    opt.guard = k.config().guard;
    auto rhs = [&](double, const std::vector<double>& y, std::vector<double>& dy) { dy[0] = -k.psi(std::max(y[0], 0.0)); };
    auto stop = [&](double, const std::vector<double>& y) { return near(y[0]); };
    OdeResult r;
    try {
        r = integrate_dp45(rhs, {theta}, 0.0, a, opt, stop);
    } catch (const SolverError& e) {
        throw CsbpError(std::string("u_flow: ") + e.what());
    }
    if (r.t < a) return finish(r.y[0], a - r.t);
    return r.y[0];
}

GreyConservative grey_and_conservative(const CsbpKernel& k) {
    // psi grows like b l^2 / 2 or kappa l^gamma, else at most linearly; a
    // finite Levy list keeps psi'(0+) finite so the conservativity integral
    // diverges
    const auto& m = k.mech();
    bool grey = m.b > 0.0 || (m.stable && m.stable->coef > 0.0);
    return {grey, true};
}

namespace {

double tail_integral(const CsbpKernel& k, double v) {
    // r = v s keeps exp_sinh on a unit scale; it degrades for huge lower limits
    boost::math::quadrature::exp_sinh<double> es;
    auto f = [&](double s) { return v / k.psi(v * s); };
    return es.integrate(f, 1.0, std::numeric_limits<double>::infinity(), 1e-14);
}

}  // namespace

VScale v_scale_detail(const CsbpKernel& k, double h) {
    if (!(h > 0.0)) throw CsbpError("v_scale: h must be positive");
    if (!grey_and_conservative(k).grey) throw CsbpError("v_scale: Grey condition fails (psi grows at most linearly)");
    const auto& m = k.mech();
    // inverse of the leading order of int_theta^inf dr/psi(r)
    std::function<double(double)> Tinv;
    double ratio;
    if (m.b > 0.0) {
        Tinv = [b = m.b](double t) { return 2.0 / (b * t); };
        ratio = 2.0;
    } else {
        double g = m.stable->gamma, kap = m.stable->coef;
        Tinv = [g, kap](double t) { return std::pow(t * kap * (g - 1.0), -1.0 / (g - 1.0)); };
        ratio = std::pow(2.0, 1.0 / (g - 1.0));
    }
    // u(h, theta) = v(h - T_exact(theta)); extrapolate in T_exact to 0
    double th0 = std::max(Tinv(h / 20.0), 100.0 * (1.0 + k.q()));
    std::vector<double> xs, fs;
    double th = th0;
    for (int j = 0; j < 6; ++j, th *= ratio) {
        // exact abscissa: lower-order terms of psi put logs into T
        xs.push_back(tail_integral(k, th));
        fs.push_back(u_flow(k, h, th));
    }
    double v1 = neville_at_zero(xs, fs);

    // root of int_v^inf dr/psi = h
    const double q = k.q();
    auto G = [&](double v) { return tail_integral(k, v) - h; };
    double lo = std::max(v1, q + 1e-300), hi = lo;
    double v2;
    bool pinned = false;
    int guard = 0;
    while (G(lo) < 0.0) {
        double nl = q + 0.5 * (lo - q);
        if (nl <= q || nl == lo || ++guard > 2000) {
            pinned = true;  // v is q to double precision
            break;
        }
        hi = lo;
        lo = nl;
    }
    if (pinned) {
        v2 = lo;
    } else {
        guard = 0;
        while (G(hi) > 0.0) {
            lo = hi;
            hi = q + 2.0 * (hi - q) + 1e-300;
            if (++guard > 2000) throw CsbpError("v_scale: root not bracketed");
        }
        std::uintmax_t it = 200;
        auto r = boost::math::tools::toms748_solve(G, lo, hi, boost::math::tools::eps_tolerance<double>(50), it);
        v2 = 0.5 * (r.first + r.second);
    }
    if (std::abs(v1 - v2) > 1e-8 * std::max(1.0, v2))
        throw CsbpError(fmt::format("v_scale: routes disagree ({:.17g} vs {:.17g})", v1, v2));
    return {v2, v1, v2};
}

double v_scale(const CsbpKernel& k, double h) { return v_scale_detail(k, h).value; }

double extinction_cdf(const CsbpKernel& k, const AtomicLaw& rho, double a) {
    if (!(a > 0.0)) throw CsbpError("extinction_cdf: a must be positive");
    double v = v_scale(k, a);
    double s = 0.0;
    for (auto [y, w] : rho.atoms) s += w * std::exp(-v * y);
    return s;
}

double csbp_mean(const CsbpKernel& k, const AtomicLaw& rho, double a) {
    double d = k.dpsi(0.0);
    if (!std::isfinite(d)) throw CsbpError("csbp_mean: psi'(0+) is infinite");
    double s = 0.0;
    for (auto [y, w] : rho.atoms) s += w * y;
    return std::exp(-d * a) * s;
}

namespace {

// z = 1 - w solves z' = -c gap(z)
double pgf_flow(const OffspringLaw& xi, double c, double a, double z0) {
    if (!(c > 0.0)) throw CsbpError("gw flow: c must be positive");
    if (!(a >= 0.0)) throw CsbpError("gw flow: a must be >= 0");
    if (a == 0.0 || z0 == 0.0) return z0;
    if (xi.gap(z0) == 0.0) return z0;
    OdeOptions opt;
    opt.rtol = 1e-12;
    opt.atol = 1e-300;
    opt.guard = 0.5;
    auto rhs = [&](double, const std::vector<double>& y, std::vector<double>& dy) {
        dy[0] = -c * xi.gap(std::clamp(y[0], 0.0, 1.0));
    };
    try {
        return integrate_dp45(rhs, {z0}, 0.0, a, opt).y[0];
    } catch (const SolverError& e) {
        throw CsbpError(std::string("gw flow: ") + e.what());
    }
}

}  // namespace

double gw_laplace(const OffspringLaw& xi, double c, double a, double theta) {
    if (!(theta >= 0.0)) throw CsbpError("gw_laplace: theta must be >= 0");
    double z = pgf_flow(xi, c, a, -std::expm1(-theta));
    return 1.0 - z;
}

double height_cdf(const OffspringLaw& xi, double c, double a) {
    if (!(a >= 0.0)) throw CsbpError("height_cdf: a must be >= 0");
    double z = pgf_flow(xi, c, a, 1.0);
    double w = 1.0 - z;
    if (w < -1e-12 || w > 1.0 + 1e-12) throw CsbpError("height_cdf: value left [0,1]");
    return std::clamp(w, 0.0, 1.0);
}

double reduced_parameter(const CsbpKernel& k, double lam, double h) {
    if (!(h > 0.0)) throw CsbpError("reduced_parameter: h must be positive");
    if (lam == kLevyForest) return v_scale(k, h);
    if (!(lam > k.q())) throw CsbpError("reduced_parameter: lambda must exceed q");
    return u_flow(k, h, lam);
}

double erased_forest_laplace(const CsbpKernel& k, const AtomicLaw& rho, double lam, double h, double a, double theta) {
    if (!(theta >= 0.0) || !(a >= 0.0)) throw CsbpError("erased_forest_laplace: need a, theta >= 0");
    if (theta == 0.0) return 1.0;
    double inner = reduced_parameter(k, lam, h) * -std::expm1(-theta);
    double u = u_flow(k, a, inner);
    double s = 0.0;
    for (auto [y, w] : rho.atoms) s += w * std::exp(-y * u);
    return s;
}

std::vector<double> profile_pmf(const OffspringLaw& xi, double c, const InitialLaw& mu, double a, int nmax) {
    if (nmax < 1) throw CsbpError("profile_pmf: nmax must be >= 1");
    const int N = nmax;
    std::vector<double> p(N + 2);
    for (int k = 0; k <= N + 1; ++k) p[k] = xi.prob(k);
    // over[j] = P(K > j)
    std::vector<double> over(N + 2);
    {
        long double s = 0.0L;
        for (int j = 0; j <= N + 1; ++j) {
            s += p[j];
            over[j] = std::max(0.0, static_cast<double>(1.0L - s));
        }
    }
    const double stay = p[1];
    std::vector<double> y0(N + 2, 0.0);
    long double tot = 0.0L;
    for (int n = 0; n <= N; ++n) {
        y0[n] = mu.prob(n);
        tot += y0[n];
    }
    y0[N + 1] = std::max(0.0, static_cast<double>(1.0L - tot));
    auto rhs = [&](double, const std::vector<double>& y, std::vector<double>& dy) {
        std::fill(dy.begin(), dy.end(), 0.0);
        for (int m = 1; m <= N; ++m) {
            double r = c * m * y[m];
            if (r == 0.0) continue;
            dy[m] -= r * (1.0 - stay);
            for (int k = 0; m - 1 + k <= N; ++k)
                if (k != 1) dy[m - 1 + k] += r * p[k];
            dy[N + 1] += r * over[N + 1 - m];
        }
    };
    OdeOptions opt;
    opt.rtol = 1e-10;
    opt.atol = 1e-15;
    auto res = integrate_dp45(rhs, y0, 0.0, a, opt);
    for (double& x : res.y) {
        if (x < -1e-9) throw CsbpError("profile_pmf: negative mass, solver failed");
        x = std::max(x, 0.0);  // roundoff
    }
    return res.y;
}

}  // namespace hgt
