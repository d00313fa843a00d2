#include "hgtree/laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

namespace hgt {

namespace {

constexpr double kTrunc = 1e-12;
constexpr int kMaxTerms = 200000;

using nlohmann::json;

json parse_json(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw LawError(std::string(what) + ": " + e.what());
    }
}

// Coefficients t_k of T(r) = (1-r)^gamma - 1 + gamma r for k >= 2.
double stable_coef(double gamma, std::int64_t k) {
    if (k < 2) return 0.0;
    if (gamma == 2.0) return k == 2 ? 1.0 : 0.0;
    double s = gamma - 1.0;
    double lg = std::log(gamma) + std::log(s) + std::lgamma(k - gamma) - std::lgamma(2.0 - gamma) - std::lgamma(k + 1.0);
    return std::exp(lg);
}

// sum_{j>k} t_j: the partial sums of (1-r)^gamma are the coefficients of
// (1-r)^(gamma-1), which gives s Gamma(k-s) / (Gamma(1-s) Gamma(k+1)).
double stable_survival(double gamma, std::int64_t k) {
    double s = gamma - 1.0;
    if (k <= 1) return s;
    if (gamma == 2.0) return 0.0;
    return std::exp(std::log(s) + std::lgamma(k - s) - std::lgamma(1.0 - s) - std::lgamma(k + 1.0));
}

void check_mechanism(const BranchingMechanism& m) {
    if (!(m.b >= 0.0) || !std::isfinite(m.a) || !std::isfinite(m.b)) throw LawError("mechanism: need finite a and b >= 0");
    for (auto [x, w] : m.pi)
        if (!(x > 0.0) || !(w >= 0.0) || !std::isfinite(x) || !std::isfinite(w))
            throw LawError("mechanism: Levy atoms need x > 0 and w >= 0");
    if (m.stable && (!(m.stable->gamma > 1.0 && m.stable->gamma <= 2.0) || !(m.stable->coef >= 0.0)))
        throw LawError("mechanism: stable part needs gamma in (1,2] and coef >= 0");
}

}  // namespace

double psi_eval(const BranchingMechanism& m, double lam) {
    double v = m.a * lam + 0.5 * m.b * lam * lam;
    for (auto [x, w] : m.pi) v += w * (std::expm1(-lam * x) + (x < 1.0 ? lam * x : 0.0));
    if (m.stable) v += m.stable->coef * std::pow(lam, m.stable->gamma);
    return v;
}

double psi_deriv(const BranchingMechanism& m, double lam) {
    double v = m.a + m.b * lam;
    for (auto [x, w] : m.pi) v += w * x * ((x < 1.0 ? 1.0 : 0.0) - std::exp(-lam * x));
    if (m.stable && lam > 0.0) v += m.stable->coef * m.stable->gamma * std::pow(lam, m.stable->gamma - 1.0);
    return v;
}

double psi_root(const BranchingMechanism& m) {
    if (psi_deriv(m, 0.0) >= 0.0) return 0.0;
    double hi = 1.0;
    while (psi_eval(m, hi) <= 0.0) {
        hi *= 2.0;
        if (hi > 1e300) throw LawError("mechanism: psi is not eventually positive");
    }
    double lo = hi;
    while (psi_eval(m, lo) >= 0.0) lo *= 0.5;
    for (int i = 0; i < 200 && hi - lo > 1e-16 * hi; ++i) {
        double mid = 0.5 * (lo + hi);
        (psi_eval(m, mid) < 0.0 ? lo : hi) = mid;
    }
    return hi;
}

BranchingMechanism mechanism_from_json(const std::string& text) {
    json j = parse_json(text, "mechanism");
    if (!j.is_object()) throw LawError("mechanism: object expected");
    BranchingMechanism m;
    try {
        m.a = j.value("a", 0.0);
        m.b = j.value("b", 0.0);
        if (j.contains("pi"))
            for (const auto& at : j["pi"]) m.pi.emplace_back(at.at(0).get<double>(), at.at(1).get<double>());
        if (j.contains("stable")) m.stable = StablePart{j["stable"].at("gamma").get<double>(), j["stable"].at("coef").get<double>()};
    } catch (const json::exception& e) {
        throw LawError(std::string("mechanism: ") + e.what());
    }
    check_mechanism(m);
    return m;
}

std::string to_json(const BranchingMechanism& m) {
    json j{{"a", m.a}, {"b", m.b}, {"pi", json::array()}};
    for (auto [x, w] : m.pi) j["pi"].push_back({x, w});
    if (m.stable) j["stable"] = {{"gamma", m.stable->gamma}, {"coef", m.stable->coef}};
    return j.dump();
}

AtomicLaw atomic_from_json(const std::string& text) {
    json j = parse_json(text, "rho");
    AtomicLaw r;
    double tot = 0.0;
    try {
        for (const auto& at : j.at("atoms")) {
            double y = at.at(0).get<double>(), w = at.at(1).get<double>();
            if (!(y >= 0.0) || !(w >= 0.0)) throw LawError("rho: atoms need y >= 0 and w >= 0");
            r.atoms.emplace_back(y, w);
            tot += w;
        }
    } catch (const json::exception& e) {
        throw LawError(std::string("rho: ") + e.what());
    }
    if (std::abs(tot - 1.0) > 1e-12) throw LawError("rho: weights must sum to 1");
    return r;
}

InitialLaw InitialLaw::dirac(int n) {
    if (n < 0) throw LawError("initial law: negative count");
    InitialLaw l;
    l.pmf.assign(n + 1, 0.0);
    l.pmf[n] = 1.0;
    return l;
}

double InitialLaw::pgf(double r) const {
    if (mixed) {
        double s = 0.0;
        for (auto [y, w] : mixed->rho.atoms) s += w * std::exp(-mixed->lambda * y * (1.0 - r));
        return s;
    }
    long double s = 0.0;
    for (std::size_t k = pmf.size(); k-- > 0;) s = s * r + pmf[k];
    return static_cast<double>(s);
}

double InitialLaw::mean() const {
    if (mixed) {
        double s = 0.0;
        for (auto [y, w] : mixed->rho.atoms) s += w * y;
        return mixed->lambda * s;
    }
    double s = 0.0;
    for (std::size_t k = 0; k < pmf.size(); ++k) s += k * pmf[k];
    return s;
}

InitialLaw mu_from_rho(const AtomicLaw& rho, double lam) {
    if (!(lam >= 0.0) || !std::isfinite(lam)) throw LawError("mu_from_rho: lambda must be >= 0");
    InitialLaw l;
    l.mixed = InitialLaw::Mixed{rho, lam};
    double top = 0.0;
    for (auto [y, w] : rho.atoms) top = std::max(top, lam * y);
    long double cum = 0.0;
    for (int k = 0; k < kMaxTerms; ++k) {
        long double p = 0.0;
        for (auto [y, w] : rho.atoms) {
            if (w == 0.0) continue;
            double m = lam * y;
            if (m == 0.0) {
                p += k == 0 ? w : 0.0;
                continue;
            }
            p += std::exp(std::log(w) - m + k * std::log(m) - std::lgamma(k + 1.0));
        }
        l.pmf.push_back(static_cast<double>(p));
        cum += p;
        if (1.0L - cum < kTrunc && k >= top) break;
    }
    l.residual_mass = std::max(0.0, static_cast<double>(1.0L - cum));
    return l;
}

InitialLaw poisson_law(double mean) { return mu_from_rho(AtomicLaw{{{1.0, 1.0}}}, mean); }

OffspringLaw OffspringLaw::from_pmf(std::vector<double> pmf) {
    if (pmf.empty()) throw LawError("offspring law: empty pmf");
    long double s = 0.0;
    for (double p : pmf) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw LawError("offspring law: entries must be finite and >= 0");
        s += p;
    }
    if (std::abs(static_cast<double>(s) - 1.0) > 1e-12) throw LawError("offspring law: pmf must sum to 1");
    while (pmf.size() > 1 && pmf.back() == 0.0) pmf.pop_back();
    OffspringLaw l;
    l.head_ = std::move(pmf);
    l.finish();
    return l;
}

void OffspringLaw::finish() {
    suffix_.assign(head_.size(), 0.0);
    long double s = 0.0;
    for (std::size_t k = head_.size(); k-- > 0;) {
        suffix_[k] = static_cast<double>(s);
        s += head_[k];
    }
}

double OffspringLaw::tail_survival(std::int64_t k) const {
    return omega_ == 0.0 ? 0.0 : omega_ * stable_survival(gamma_, k);
}

double OffspringLaw::prob(std::int64_t k) const {
    if (k < 0) return 0.0;
    double p = k < static_cast<std::int64_t>(head_.size()) ? head_[k] : 0.0;
    if (omega_ != 0.0) p += omega_ * stable_coef(gamma_, k);
    return p;
}

std::vector<double> OffspringLaw::pmf(int kmax) const {
    std::vector<double> p(kmax + 1);
    for (int k = 0; k <= kmax; ++k) p[k] = prob(k);
    return p;
}

double OffspringLaw::domain_lo() const {
    if (psi_ || residual_ == 0.0) return -std::numeric_limits<double>::infinity();
    return -1.0;
}

double OffspringLaw::pgf(double r) const {
    if (r > 1.0 || r < domain_lo()) throw DomainError("pgf: argument outside the certified domain");
    if (psi_) {
        double l = psi_->lambda;
        return r + psi_eval(psi_->mech, (1.0 - r) * l) / (l * psi_deriv(psi_->mech, l));
    }
    long double s = 0.0;
    for (std::size_t k = head_.size(); k-- > 0;) s = s * r + head_[k];
    if (omega_ != 0.0) s += omega_ * (std::pow(1.0 - r, gamma_) - 1.0 + gamma_ * r);
    return static_cast<double>(s);
}

double OffspringLaw::pgf_deriv(double r) const {
    if (r > 1.0 || r < domain_lo()) throw DomainError("pgf: argument outside the certified domain");
    if (psi_) {
        double l = psi_->lambda;
        return 1.0 - psi_deriv(psi_->mech, (1.0 - r) * l) / psi_deriv(psi_->mech, l);
    }
    long double s = 0.0;
    for (std::size_t k = head_.size(); k-- > 1;) s = s * r + k * head_[k];
    if (omega_ != 0.0) s += omega_ * gamma_ * (1.0 - std::pow(1.0 - r, gamma_ - 1.0));
    return static_cast<double>(s);
}

namespace {

// (1-z)^k - 1 + k z
double binom_gap(int k, double z) {
    if (k < 2) return 0.0;
    if (k * z > 0.1) return std::pow(1.0 - z, k) - 1.0 + k * z;
    long double term = 1.0L, s = 0.0L;
    for (int j = 1; j <= k; ++j) {
        term *= -static_cast<long double>(z) * (k - j + 1) / j;
        if (j >= 2) s += term;
        if (std::abs(term) < 1e-22L * std::abs(s)) break;
    }
    return static_cast<double>(s);
}

}  // namespace

double OffspringLaw::gap(double z) const {
    if (z < 0.0 || z > 1.0 - domain_lo()) throw DomainError("gap: argument outside the certified domain");
    if (psi_) {
        double l = psi_->lambda;
        return psi_eval(psi_->mech, z * l) / (l * psi_deriv(psi_->mech, l));
    }
    // sum h_k g_k(z) + omega z^gamma - residual + z (1 - mean)
    long double s = 0.0L, m = 0.0L;
    for (std::size_t k = 0; k < head_.size(); ++k) {
        s += head_[k] * binom_gap(static_cast<int>(k), z);
        m += k * head_[k];
    }
    if (omega_ != 0.0) {
        s += omega_ * std::pow(z, gamma_);
        m += omega_ * gamma_;
    }
    return static_cast<double>(s - residual_ + z * (1.0L - m));
}

double OffspringLaw::mean() const { return pgf_deriv(1.0); }

std::int64_t OffspringLaw::quantile(double v) const {
    const double target = v * (1.0 - residual_);
    const std::int64_t n = static_cast<std::int64_t>(head_.size());
    auto S = [&](std::int64_t k) { return (k < n ? suffix_[k] : 0.0) + tail_survival(k); };
    for (std::int64_t k = 0; k < n; ++k)
        if (S(k) < target) return k;
    if (omega_ == 0.0) {
        std::int64_t k = n - 1;
        while (k > 0 && head_[k] == 0.0) --k;
        return k;
    }
    std::int64_t lo = n - 1, hi = std::max<std::int64_t>(n, 2);
    while (!(S(hi) < target)) {
        lo = hi;
        if (hi > (std::int64_t(1) << 60)) return hi;
        hi *= 2;
    }
    while (hi - lo > 1) {
        std::int64_t mid = lo + (hi - lo) / 2;
        (S(mid) < target ? hi : lo) = mid;
    }
    return hi;
}

OffspringLaw stable_offspring(double gamma) {
    if (!(gamma > 1.0 && gamma <= 2.0)) throw LawError("stable offspring: gamma must be in (1,2]");
    OffspringLaw l;
    l.head_ = {1.0 / gamma};
    l.omega_ = 1.0 / gamma;
    l.gamma_ = gamma;
    l.finish();
    return l;
}

OffspringLaw offspring_from_psi_law(const BranchingMechanism& m, double lam) {
    check_mechanism(m);
    double q = psi_root(m);
    if (!(lam > q) || !std::isfinite(lam)) throw LawError("offspring_from_psi: lambda must exceed the largest root of psi");
    double dps = psi_deriv(m, lam);
    if (!(dps > 0.0)) throw LawError("offspring_from_psi: psi'(lambda) must be positive");
    OffspringLaw l;
    l.psi_ = OffspringLaw::Psi{m, lam};
    l.head_ = {psi_eval(m, lam) / (lam * dps), 0.0};
    double tail_mass = 0.0;
    if (m.stable && m.stable->coef > 0.0) {
        l.omega_ = m.stable->coef * std::pow(lam, m.stable->gamma - 1.0) / dps;
        l.gamma_ = m.stable->gamma;
        tail_mass = l.omega_ * (l.gamma_ - 1.0);
    }
    double top = 0.0;
    for (auto [x, w] : m.pi) top = std::max(top, lam * x);
    long double cum = l.head_[0] + tail_mass;
    for (int k = 2; k < kMaxTerms; ++k) {
        long double p = k == 2 ? 0.5L * lam * m.b / dps : 0.0L;
        for (auto [x, w] : m.pi) {
            if (w == 0.0) continue;
            p += std::exp((k - 1) * std::log(lam) + std::log(w) + k * std::log(x) - lam * x - std::lgamma(k + 1.0) - std::log(dps));
        }
        l.head_.push_back(static_cast<double>(p));
        cum += p;
        if (1.0L - cum < kTrunc && k >= top) break;
        if (m.pi.empty()) break;
    }
    while (l.head_.size() > 1 && l.head_.back() == 0.0) l.head_.pop_back();
    l.residual_ = std::max(0.0, static_cast<double>(1.0L - cum));
    if (l.residual_ < 1e-15) l.residual_ = 0.0;
    l.finish();
    return l;
}

std::pair<OffspringLaw, double> offspring_from_psi(const BranchingMechanism& m, double lam) {
    OffspringLaw l = offspring_from_psi_law(m, lam);
    return {l, psi_deriv(m, lam)};
}

OffspringLaw transform_offspring(const OffspringLaw& xi, double a) {
    if (a == 0.0) return xi;
    if (!(a < 1.0)) throw LawError("transform: parameter must be < 1");
    if (xi.psi_) return offspring_from_psi_law(xi.psi_->mech, xi.psi_->lambda * (1.0 - a));
    if (a < xi.domain_lo()) throw DomainError("transform: generating function not certified at negative argument");
    const double fa = xi.pgf(a), da = xi.pgf_deriv(a);
    const double denom = 1.0 - da;
    if (!(denom > 0.0)) throw LawError("transform: phi'(a) >= 1, parameter outside the admissible set");
    const int K = static_cast<int>(xi.head_.size()) - 1;
    OffspringLaw out;
    out.head_.assign(std::max(K + 1, 2), 0.0);
    out.head_[0] = (fa - a) / ((1.0 - a) * denom);
    for (int k = 2; k <= K; ++k) {
        // sum_{n>=k} head_n C(n,k) a^(n-k)
        long double term = 1.0L, s = 0.0L;
        for (int n = k; n <= K; ++n) {
            if (n > k) term = term * n / (n - k) * a;
            s += term * xi.head_[n];
        }
        out.head_[k] = static_cast<double>(std::pow(1.0L - a, k - 1) * s / denom);
    }
    if (xi.omega_ != 0.0) {
        out.omega_ = xi.omega_ * std::pow(1.0 - a, xi.gamma_ - 1.0) / denom;
        out.gamma_ = xi.gamma_;
    }
    while (out.head_.size() > 1 && out.head_.back() == 0.0) out.head_.pop_back();
    if (xi.residual_ > 0.0) {
        long double s = out.omega_ * (out.gamma_ - 1.0);
        for (double p : out.head_) s += p;
        out.residual_ = std::max(0.0, static_cast<double>(1.0L - s));
    }
    out.finish();
    return out;
}

InitialLaw thin_initial(const InitialLaw& mu, double a) {
    if (a == 0.0) return mu;
    if (!(a < 1.0)) throw LawError("thinning: parameter must be < 1");
    if (mu.mixed) return mu_from_rho(mu.mixed->rho, mu.mixed->lambda * (1.0 - a));
    if (a < 0.0 && mu.residual_mass > 0.0) throw DomainError("thinning: truncated law at negative argument");
    const int K = static_cast<int>(mu.pmf.size()) - 1;
    InitialLaw out;
    out.pmf.assign(K + 1, 0.0);
    for (int k = 0; k <= K; ++k) {
        long double term = 1.0L, s = 0.0L;
        for (int n = k; n <= K; ++n) {
            if (n > k) term = term * n / (n - k) * a;
            s += term * mu.pmf[n];
        }
        out.pmf[k] = static_cast<double>(std::pow(1.0L - a, k) * s);
    }
    if (mu.residual_mass > 0.0) {
        long double s = 0.0;
        for (double p : out.pmf) s += p;
        out.residual_mass = std::max(0.0, static_cast<double>(1.0L - s));
    }
    return out;
}

double smallest_fixed_point(const OffspringLaw& xi) {
    if (xi.mean() <= 1.0) return 1.0;
    if (xi.prob(0) == 0.0) return 0.0;
    // phi(r) - r is convex, positive at 0 and negative just below 1
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
        double mid = 0.5 * (lo + hi);
        (xi.pgf_deriv(mid) < 1.0 ? lo : hi) = mid;
    }
    double rmin = lo;
    lo = 0.0;
    hi = rmin;
    for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
        double mid = 0.5 * (lo + hi);
        (xi.pgf(mid) - mid > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Every representable law has a finite mean, and a finite mean makes
// (phi(r) - r)_- vanish to first order at 1 so the integral diverges.
bool is_conservative(const OffspringLaw& xi) { return std::isfinite(xi.mean()); }

OffspringLaw offspring_from_json(const std::string& text) {
    json j = parse_json(text, "offspring law");
    try {
        if (j.contains("pmf")) return OffspringLaw::from_pmf(j["pmf"].get<std::vector<double>>());
        if (j.contains("stable")) return stable_offspring(j["stable"].get<double>());
        if (j.contains("psi")) return offspring_from_psi_law(mechanism_from_json(j["psi"].dump()), j.at("lambda").get<double>());
    } catch (const json::exception& e) {
        throw LawError(std::string("offspring law: ") + e.what());
    }
    throw LawError("offspring law: expected pmf, stable or psi");
}

GwLaw gw_from_psi(const BranchingMechanism& m, const AtomicLaw& rho, double lam) {
    auto [xi, c] = offspring_from_psi(m, lam);
    return GwLaw{xi, c, mu_from_rho(rho, lam)};
}

GwLaw reduce_law(const GwLaw& law, double alpha) {
    if (!(alpha < 1.0)) throw LawError("reduce_law: alpha must be < 1");
    if (alpha < law.xi.domain_lo()) throw DomainError("reduce_law: alpha outside the certified domain");
    if (alpha > law.xi.pgf(alpha) + 1e-15) throw LawError("reduce_law: alpha > phi(alpha), not admissible");
    GwLaw out;
    out.xi = transform_offspring(law.xi, alpha);
    out.c = law.c * (1.0 - law.xi.pgf_deriv(alpha));
    out.mu = thin_initial(law.mu, alpha);
    return out;
}

namespace {

double clean_negatives(std::vector<double>& v) {
    double mn = 0.0;
    for (double& x : v) {
        mn = std::min(mn, x);
        if (x < 0.0 && x >= -1e-12) x = 0.0;
    }
    return mn;
}

}  // namespace

GwLaw invert_law(const GwLaw& law, double alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw LawError("invert_law: alpha must be in [0,1)");
    if (alpha == 0.0) return law;
    double a = -alpha / (1.0 - alpha);
    GwLaw out;
    out.xi = transform_offspring(law.xi, a);
    out.c = law.c * (1.0 - law.xi.pgf_deriv(a));
    out.mu = thin_initial(law.mu, a);
    std::vector<double> h = out.xi.head();
    if (clean_negatives(h) < -1e-12 || out.xi.tail_weight() < 0.0)
        throw LawError("invert_law: negative offspring mass, the law does not extend to this alpha");
    if (clean_negatives(out.mu.pmf) < -1e-12) throw LawError("invert_law: negative initial mass");
    return out;
}

InitialLaw initial_from_json(const std::string& text) {
    json j = parse_json(text, "initial law");
    try {
        if (j.contains("dirac")) {
            int n = j["dirac"].get<int>();
            if (n < 0) throw LawError("initial law: dirac needs n >= 0");
            return InitialLaw::dirac(n);
        }
        if (j.contains("poisson")) return poisson_law(j["poisson"].get<double>());
        if (j.contains("pmf")) {
            InitialLaw mu;
            mu.pmf = j["pmf"].get<std::vector<double>>();
            long double s = 0.0L;
            for (double p : mu.pmf) {
                if (!(p >= 0.0)) throw LawError("initial law: negative mass");
                s += p;
            }
            if (std::abs(static_cast<double>(s) - 1.0) > 1e-12) throw LawError("initial law: pmf must sum to 1");
            return mu;
        }
    } catch (const json::exception& e) {
        throw LawError(std::string("initial law: ") + e.what());
    }
    throw LawError("initial law: expected dirac, poisson or pmf");
}

GwLaw gw_law_from_json(const std::string& text) {
    json j = parse_json(text, "law");
    if (!j.is_object()) throw LawError("law: object expected");
    try {
        if (j.contains("psi")) {
            AtomicLaw rho{{{1.0, 1.0}}};
            if (j.contains("rho")) rho = atomic_from_json(j["rho"].dump());
            return gw_from_psi(mechanism_from_json(j["psi"].dump()), rho, j.at("lambda").get<double>());
        }
        GwLaw law;
        law.xi = offspring_from_json(j.at("xi").dump());
        law.c = j.value("c", 1.0);
        if (!(law.c > 0.0) || !std::isfinite(law.c)) throw LawError("law: c must be positive");
        if (j.contains("mu")) law.mu = initial_from_json(j["mu"].dump());
        return law;
    } catch (const json::exception& e) {
        throw LawError(std::string("law: ") + e.what());
    }
}

std::string to_json(const GwLaw& law, int kmax) {
    auto trunc = [&](auto&& prob) {
        json a = json::array();
        long double s = 0.0L;
        for (int k = 0; k <= kmax; ++k) {
            double p = prob(k);
            a.push_back(p);
            s += p;
        }
        return std::make_pair(a, static_cast<double>(std::max(0.0L, 1.0L - s)));
    };
    auto [xp, xr] = trunc([&](int k) { return law.xi.prob(k); });
    auto [mp, mr] = trunc([&](int k) { return law.mu.prob(k); });
    json j;
    j["c"] = law.c;
    j["xi"] = {{"pmf", xp}, {"rest", xr}, {"mean", law.xi.mean()}, {"q", smallest_fixed_point(law.xi)}};
    j["mu"] = {{"pmf", mp}, {"rest", mr}, {"mean", law.mu.mean()}};
    return j.dump();
}

double compose_alphas(double alpha, double beta) { return 1.0 - (1.0 - alpha) * (1.0 - beta); }

double law_distance(const GwLaw& x, const GwLaw& y, int kmax) {
    double d = std::abs(x.c - y.c);
    for (int k = 0; k <= kmax; ++k) {
        d = std::max(d, std::abs(x.xi.prob(k) - y.xi.prob(k)));
        d = std::max(d, std::abs(x.mu.prob(k) - y.mu.prob(k)));
    }
    return d;
}

std::vector<ProbeResult> extension_probe(const OffspringLaw& xi, const std::vector<double>& alphas) {
    std::vector<ProbeResult> out;
    for (double al : alphas) {
        ProbeResult r{al, false, 0.0, ""};
        try {
            if (!(al > 0.0 && al < 1.0)) throw LawError("alpha must be in (0,1)");
            OffspringLaw inv = transform_offspring(xi, -al / (1.0 - al));
            double mn = 0.0;
            for (double p : inv.head()) mn = std::min(mn, p);
            if (inv.tail_weight() < 0.0) mn = std::min(mn, inv.tail_weight());
            r.min_entry = mn;
            r.ok = mn >= -1e-12;
            if (!r.ok) r.note = "negative mass after inversion";
        } catch (const LawError& e) {
            r.note = e.what();
        }
        out.push_back(r);
    }
    return out;
}

}  // namespace hgt
