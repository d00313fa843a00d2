#include "hgtree/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "json.hpp"

namespace hgt {

using nlohmann::ordered_json;

namespace {

ordered_json to_j(const TestReport& r, bool with_runtime) {
    ordered_json j;
    j["name"] = r.name;
    j["sample_size"] = r.sample_size;
    j["statistic"] = r.statistic;
    j["p_value"] = r.p_value ? ordered_json(*r.p_value) : ordered_json(nullptr);
    j["max_abs_error"] = r.max_abs_error ? ordered_json(*r.max_abs_error) : ordered_json(nullptr);
    j["threshold"] = r.threshold;
    j["pass"] = r.pass;
    j["seed"] = r.seed;
    if (with_runtime) j["runtime"] = r.runtime;
    if (!r.note.empty()) j["note"] = r.note;
    if (!r.parts.empty()) {
        j["parts"] = ordered_json::array();
        for (const auto& p : r.parts) j["parts"].push_back(to_j(p, with_runtime));
    }
    return j;
}

}  // namespace

std::string report_json(const TestReport& r, bool with_runtime, int indent) { return to_j(r, with_runtime).dump(indent); }

TestReport chi_square(const std::vector<double>& expected_pmf, const std::vector<std::int64_t>& observed, double threshold) {
    TestReport r;
    r.name = "chi_square";
    r.threshold = threshold;
    std::int64_t n = 0;
    for (auto o : observed) {
        if (o < 0) throw StatsError("chi_square: negative count");
        n += o;
    }
    if (n == 0) throw StatsError("chi_square: no observations");
    long double mass = 0.0L;
    for (double p : expected_pmf) {
        if (!(p >= 0.0)) throw StatsError("chi_square: negative expected mass");
        mass += p;
    }
    const std::size_t K = expected_pmf.size();
    std::vector<double> e(K + 1, 0.0), o(K + 1, 0.0);
    for (std::size_t k = 0; k < K; ++k) e[k] = n * expected_pmf[k];
    e[K] = n * std::max(0.0L, 1.0L - mass);
    for (std::size_t k = 0; k < observed.size(); ++k) o[std::min(k, K)] += static_cast<double>(observed[k]);
    // merge cells
    std::vector<double> ce, co;
    double ae = 0.0, ao = 0.0;
    for (std::size_t k = 0; k <= K; ++k) {
        ae += e[k];
        ao += o[k];
        if (ae >= 5.0) {
            ce.push_back(ae);
            co.push_back(ao);
            ae = ao = 0.0;
        }
    }
    if (ae > 0.0 || ao > 0.0) {
        if (ce.empty()) {
            ce.push_back(ae);
            co.push_back(ao);
        } else {
            ce.back() += ae;
            co.back() += ao;
        }
    }
    r.sample_size = n;
    if (ce.size() < 2) throw StatsError("chi_square: degenerate binning (fewer than two cells)");
    double stat = 0.0;
    for (std::size_t i = 0; i < ce.size(); ++i) {
        if (ce[i] <= 0.0) throw StatsError("chi_square: observations in a cell of zero expected mass");
        stat += (co[i] - ce[i]) * (co[i] - ce[i]) / ce[i];
    }
    const double df = static_cast<double>(ce.size() - 1);
    r.statistic = stat;
    r.p_value = stat == 0.0 ? 1.0 : boost::math::gamma_q(df / 2.0, stat / 2.0);
    r.pass = *r.p_value > threshold;
    r.note = "df=" + std::to_string(ce.size() - 1);
    return r;
}

double kolmogorov_survival(double x) {
    if (x <= 0.0) return 1.0;
    if (x < 1.0) {
        // Jacobi form: converges fast for small x
        const double pi2 = std::numbers::pi * std::numbers::pi;
        double s = 0.0;
        for (int k = 1; k <= 50; ++k) {
            double t = std::exp(-(2 * k - 1) * (2 * k - 1) * pi2 / (8 * x * x));
            s += t;
            if (t < 1e-18 * s) break;
        }
        return 1.0 - std::sqrt(2 * std::numbers::pi) / x * s;
    }
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        double t = std::exp(-2.0 * k * k * x * x);
        s += (k % 2 ? t : -t);
        if (t < 1e-18) break;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

TestReport ks_test(const std::function<double(double)>& cdf, std::vector<double> x, std::optional<double> censor,
                   double threshold) {
    TestReport r;
    r.name = "ks";
    r.threshold = threshold;
    const std::size_t n = x.size();
    if (n < 1000) throw StatsError("ks_test: needs at least 1000 samples");
    std::sort(x.begin(), x.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (censor && x[i] >= *censor) {
            // the sup over x < censor ends just below the atom
            double F = cdf(*censor);
            d = std::max(d, std::abs(F - static_cast<double>(i) / n));
            break;
        }
        double F = cdf(x[i]);
        d = std::max({d, F - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - F});
    }
    const double sn = std::sqrt(static_cast<double>(n));
    r.sample_size = static_cast<std::int64_t>(n);
    r.statistic = d;
    r.p_value = kolmogorov_survival(d * (sn + 0.12 + 0.11 / sn));
    r.pass = *r.p_value > threshold;
    if (censor) r.note = "censored at " + std::to_string(*censor);
    return r;
}

TestReport mean_check(const std::vector<double>& v, double target, double allowance, double z) {
    TestReport r;
    r.name = "mean";
    const std::size_t n = v.size();
    if (n < 2) throw StatsError("mean_check: needs at least 2 values");
    long double s = 0.0L;
    for (double x : v) s += x;
    const double m = static_cast<double>(s / n);
    long double ss = 0.0L;
    for (double x : v) ss += (x - m) * (x - m);
    const double se = std::sqrt(static_cast<double>(ss / (n - 1)) / n);
    const double err = std::abs(m - target);
    r.sample_size = static_cast<std::int64_t>(n);
    r.max_abs_error = err;
    // error in standard errors after the allowance
    r.statistic = se > 0.0 ? std::max(0.0, err - allowance) / se : (err <= allowance ? 0.0 : INFINITY);
    r.threshold = z;
    r.pass = r.statistic <= z;
    char buf[160];
    std::snprintf(buf, sizeof buf, "mean=%.10g target=%.10g se=%.3g allowance=%.3g", m, target, se, allowance);
    r.note = buf;
    return r;
}

TestReport composite(const std::string& name, std::vector<TestReport> parts, double threshold) {
    TestReport r;
    r.name = name;
    r.threshold = threshold;
    int m = 0;
    for (const auto& p : parts)
        if (p.p_value) ++m;
    double pmin = 1.0;
    bool ok = true;
    for (auto& p : parts) {
        if (p.p_value) {
            p.threshold = threshold / m;
            p.pass = *p.p_value > p.threshold;
            pmin = std::min(pmin, *p.p_value);
        }
        ok = ok && p.pass;
        r.sample_size = std::max(r.sample_size, p.sample_size);
    }
    if (m > 0) {
        r.p_value = std::min(1.0, m * pmin);
        r.statistic = *r.p_value;
    } else {
        for (const auto& p : parts) r.statistic = std::max(r.statistic, p.statistic);
    }
    r.pass = ok && !parts.empty();
    r.parts = std::move(parts);
    return r;
}

}  // namespace hgt
