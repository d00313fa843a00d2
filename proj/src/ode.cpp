#include "hgtree/ode.hpp"

#include <algorithm>
#include <cmath>

namespace hgt {

namespace {

// Dormand-Prince tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

OdeResult integrate_dp45(const OdeRhs& f, std::vector<double> y, double t0, double t1, const OdeOptions& opt,
                         const OdeStop& stop) {
    const std::size_t n = y.size();
    OdeResult res{t0, {}, 0, 0};
    if (!(t1 > t0)) {
        res.y = std::move(y);
        return res;
    }
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), yt(n), yn(n);
    double t = t0;
    f(t, y, k1);
    double h;
    {
        double sc = 0.0, fs = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sc = std::max(sc, std::abs(y[i]) + opt.atol);
            fs = std::max(fs, std::abs(k1[i]));
        }
        h = fs > 0 ? 1e-3 * sc / fs : t1 - t0;
        h = std::min(h, t1 - t0);
        if (opt.max_step > 0) h = std::min(h, opt.max_step);
    }
    while (t < t1) {
        if (stop && stop(t, y)) break;
        if (res.steps + res.rejected > opt.max_steps) throw SolverError("ode: too many steps");
        if (h < 1e-15 * std::max(1.0, std::abs(t))) throw SolverError("ode: step size underflow");
        bool last = false;
        if (t + h >= t1) {
            h = t1 - t;
            last = true;
        }
        if (opt.guard > 0) {
            bool bad = false;
            for (std::size_t i = 0; i < n; ++i)
                if (std::abs(k1[i]) * h > opt.guard * (std::abs(y[i]) + opt.atol)) bad = true;
            if (bad) {
                h *= 0.5;
                ++res.rejected;
                continue;
            }
        }
        for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * a21 * k1[i];
        f(t + c2 * h, yt, k2);
        for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        f(t + c3 * h, yt, k3);
        for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(t + c4 * h, yt, k4);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f(t + c5 * h, yt, k5);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        f(t + h, yt, k6);
        for (std::size_t i = 0; i < n; ++i)
            yn[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        f(t + h, yn, k7);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(yn[i]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / std::max<std::size_t>(n, 1));
        if (!std::isfinite(err)) {
            h *= 0.25;
            ++res.rejected;
            continue;
        }
        double fac = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        if (err <= 1.0) {
            t = last ? t1 : t + h;
            y.swap(yn);
            k1.swap(k7);
            ++res.steps;
            h *= std::clamp(fac, 0.2, 5.0);
        } else {
            h *= std::clamp(fac, 0.1, 0.9);
            ++res.rejected;
        }
        if (opt.max_step > 0) h = std::min(h, opt.max_step);
    }
    res.t = t;
    res.y = std::move(y);
    return res;
}

double neville_at_zero(const std::vector<double>& x, std::vector<double> f) {
    const std::size_t n = x.size();
    for (std::size_t m = 1; m < n; ++m)
        for (std::size_t i = 0; i + m < n; ++i) f[i] = (x[i + m] * f[i] - x[i] * f[i + 1]) / (x[i + m] - x[i]);
    return f[0];
}

}  // namespace hgt
