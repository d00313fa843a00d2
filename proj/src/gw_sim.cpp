#include "hgtree/gw_sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <type_traits>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include "hgtree/reduction.hpp"

namespace hgt {

std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t i) { return derive_key(splitmix64(seed ^ 0x7265706C69636173ull), i); }

double snap_to_lattice(double x, int bits) {
    double n = std::max(1.0, std::round(std::ldexp(x, bits)));
    return std::ldexp(n, -bits);
}

namespace {

// birth-ordered expansion; keys make every vertex a function of (seed, word)
struct Item {
    double birth;
    std::uint64_t seq;
    int parent;  // -1: the item is node 0
    std::uint64_t key;
};

struct Later {
    bool operator()(const Item& a, const Item& b) const { return a.birth != b.birth ? a.birth > b.birth : a.seq > b.seq; }
};

// Fifo: constant lifetimes, where queue order already is (birth, seq) order
template <bool Fifo = false, class Life, class Count>
bool expand(TreeBuilder& b, std::vector<Item> init, std::optional<double> cap, std::int64_t vertex_cap, Life life,
            Count count, bool supercritical) {
    std::uint64_t seq = init.size();
    using Queue = std::conditional_t<Fifo, std::queue<Item, std::deque<Item>>,
                                     std::priority_queue<Item, std::vector<Item>, Later>>;
    Queue pq;
    for (const auto& it : init) pq.push(it);
    bool truncated = false;
    std::int64_t nv = 0;
    while (!pq.empty()) {
        Item it;
        if constexpr (Fifo)
            it = pq.front();
        else
            it = pq.top();
        pq.pop();
        if (++nv > vertex_cap) {
            std::string why = !cap && supercritical
                                  ? "supercritical law without height cap: apparent explosion, set --height-cap"
                                  : "the tree is a.s. finite here, raise vertex_cap";
            throw SamplerError(fmt::format("vertex_cap {} exceeded with frontier at height {:.6g} ({})", vertex_cap,
                                           it.birth, why));
        }
        Stream s(it.key);
        double L = life(s);
        double death = it.birth + L;
        bool clip = cap && death >= *cap;
        if (clip) {
            L = *cap - it.birth;
            truncated = true;
        }
        int node = 0;
        if (it.parent < 0)
            b.set_stem(0, L);
        else
            node = b.add(it.parent, L);
        if (clip) continue;
        std::int64_t k = count(s);
        for (std::int64_t i = 0; i < k; ++i) pq.push({death, seq++, node, derive_key(it.key, static_cast<std::uint64_t>(i))});
    }
    return truncated;
}

void check_cfg(const SamplerConfig& cfg) {
    if (cfg.vertex_cap < 1) throw SamplerError("vertex_cap must be >= 1");
    if (cfg.height_cap && !(*cfg.height_cap > 0.0)) throw SamplerError("height_cap must be positive");
    if (cfg.lattice_bits < 0 || cfg.lattice_bits > 52) throw SamplerError("lattice_bits must be in [0, 52]");
}

void check_offspring(const OffspringLaw& xi) {
    if (!xi.proper()) throw SamplerError("offspring law must give no mass to one child");
}

Sample forest_from_roots(const OffspringLaw& xi, double c, std::int64_t n, std::uint64_t key, const SamplerConfig& cfg) {
    TreeBuilder b(0.0);
    std::vector<Item> init;
    for (std::int64_t i = 0; i < n; ++i) init.push_back({0.0, static_cast<std::uint64_t>(i), 0, derive_key(key, static_cast<std::uint64_t>(i))});
    const int bits = cfg.lattice_bits;
    bool tr = expand(
        b, std::move(init), cfg.height_cap, cfg.vertex_cap, [&](Stream& s) { return snap_to_lattice(s.exponential(c), bits); },
        [&](Stream& s) { return xi.quantile(s.uniform()); }, xi.mean() > 1.0);
    return {b.build(), tr};
}

}  // namespace

std::int64_t draw_initial(const InitialLaw& mu, Stream& s) {
    double u = s.uniform();
    if (mu.mixed) {
        const auto& atoms = mu.mixed->rho.atoms;
        double acc = 0.0;
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            acc += atoms[i].second;
            if (u <= acc || i + 1 == atoms.size()) return s.poisson(mu.mixed->lambda * atoms[i].first);
        }
        return 0;
    }
    // inversion, with truncated mass renormalised away
    const double target = u * (1.0 - mu.residual_mass);
    long double acc = 0.0L;
    for (std::size_t k = 0; k < mu.pmf.size(); ++k) {
        acc += mu.pmf[k];
        if (acc >= target) return static_cast<std::int64_t>(k);
    }
    return static_cast<std::int64_t>(mu.pmf.size()) - 1;
}

Sample sample_gw_tree(const OffspringLaw& xi, double c, const SamplerConfig& cfg) {
    check_cfg(cfg);
    check_offspring(xi);
    if (!(c > 0.0) || !std::isfinite(c)) throw SamplerError("c must be positive");
    TreeBuilder b(0.0);
    const int bits = cfg.lattice_bits;
    bool tr = expand(
        b, {{0.0, 0, -1, splitmix64(cfg.seed)}}, cfg.height_cap, cfg.vertex_cap,
        [&](Stream& s) { return snap_to_lattice(s.exponential(c), bits); }, [&](Stream& s) { return xi.quantile(s.uniform()); },
        xi.mean() > 1.0);
    return {b.build(), tr};
}

Sample sample_gw_forest(const GwLaw& law, const SamplerConfig& cfg) {
    check_cfg(cfg);
    check_offspring(law.xi);
    if (!(law.c > 0.0) || !std::isfinite(law.c)) throw SamplerError("c must be positive");
    const std::uint64_t key = splitmix64(cfg.seed);
    Stream s(key);
    std::int64_t n = draw_initial(law.mu, s);
    return forest_from_roots(law.xi, law.c, n, key, cfg);
}

Sample sample_gw_forest(const BranchingMechanism& m, const AtomicLaw& rho, double lam, const SamplerConfig& cfg) {
    return sample_gw_forest(gw_from_psi(m, rho, lam), cfg);
}

Sample sample_discrete_gw(const OffspringLaw& xi_p, const InitialLaw& mu_p, int generation_cap, const SamplerConfig& cfg) {
    check_cfg(cfg);
    if (!(xi_p.prob(1) < 1.0)) throw SamplerError("discrete GW: xi(1) must be < 1");
    if (!(mu_p.prob(0) < 1.0) && !mu_p.mixed) throw SamplerError("discrete GW: mu(0) must be < 1");
    if (generation_cap < 0) throw SamplerError("discrete GW: generation_cap must be >= 0");
    std::optional<double> cap = static_cast<double>(generation_cap) + 1.0;
    if (cfg.height_cap) cap = std::min(*cap, *cfg.height_cap);
    const std::uint64_t key = splitmix64(cfg.seed);
    Stream s(key);
    std::int64_t n = draw_initial(mu_p, s);
    TreeBuilder b(0.0);
    std::vector<Item> init;
    for (std::int64_t i = 0; i < n; ++i) init.push_back({0.0, static_cast<std::uint64_t>(i), 0, derive_key(key, static_cast<std::uint64_t>(i))});
    bool tr = expand<true>(
        b, std::move(init), cap, cfg.vertex_cap, [](Stream&) { return 1.0; }, [&](Stream& s2) { return xi_p.quantile(s2.uniform()); },
        xi_p.mean() > 1.0);
    return {b.build(), tr};
}

OffspringLaw lazy_embedding(const OffspringLaw& xi, double c, double gamma_p) {
    if (!xi.finite_support()) throw LawError("lazy_embedding: needs a finitely supported offspring law");
    if (!(c > 0.0) || !(gamma_p >= c)) throw LawError("lazy_embedding: need 0 < c <= gamma_p");
    std::vector<double> p = xi.head();
    if (p.size() < 2) p.resize(2, 0.0);
    const double r = c / gamma_p;
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = k == 1 ? 0.0 : r * p[k];
    // xi(1) = 0, so the rest sums to r
    long double s = 0.0L;
    for (double x : p) s += x;
    p[1] = static_cast<double>(1.0L - s);
    return OffspringLaw::from_pmf(std::move(p));
}

GrowthSchedule build_growth_schedule(const BranchingMechanism& m, const AtomicLaw& rho,
                                     const std::vector<std::pair<double, double>>& beta_points,
                                     const std::vector<double>& lambda_grid, int lattice_bits) {
    if (beta_points.empty()) throw CsbpError("growth schedule: no beta points");
    if (lambda_grid.empty()) throw CsbpError("growth schedule: empty lambda grid");
    for (std::size_t i = 1; i < beta_points.size(); ++i)
        if (!(beta_points[i].first > beta_points[i - 1].first) || beta_points[i].second < beta_points[i - 1].second)
            throw CsbpError("growth schedule: beta points must have increasing lambda and nondecreasing beta");
    for (std::size_t i = 1; i < lambda_grid.size(); ++i)
        if (!(lambda_grid[i] > lambda_grid[i - 1])) throw CsbpError("growth schedule: lambda grid must be increasing");
    auto beta = [&](double l) {
        if (beta_points.size() == 1) {
            if (l != beta_points[0].first) throw CsbpError("growth schedule: lambda outside the beta points");
            return beta_points[0].second;
        }
        if (l < beta_points.front().first || l > beta_points.back().first)
            throw CsbpError("growth schedule: lambda outside the beta points");
        auto it = std::upper_bound(beta_points.begin(), beta_points.end(), l,
                                   [](double x, const std::pair<double, double>& p) { return x < p.first; });
        if (it == beta_points.end()) return beta_points.back().second;
        auto lo = *(it - 1), hi = *it;
        return lo.second + (hi.second - lo.second) * (l - lo.first) / (hi.first - lo.first);
    };
    CsbpKernel k(m);
    auto gc = grey_and_conservative(k);
    if (!gc.conservative) throw CsbpError("growth schedule: mechanism is not conservative");
    GrowthSchedule s{m, rho, lambda_grid, {}, {}};
    for (double l : lambda_grid) {
        double b = beta(l);
        if (!(b > k.q())) throw CsbpError("growth schedule: beta must exceed the largest root of psi");
        s.betas.push_back(b);
    }
    const double bmax = s.betas.back();
    if (!std::isfinite(bmax)) throw CsbpError("growth schedule: beta(lambda_max) must be finite");
    for (double b : s.betas) {
        if (b == bmax) {
            s.depths.push_back(0.0);
            continue;
        }
        auto f = [&](double h) { return u_flow(k, h, bmax) - b; };
        double lo = 0.0, hi = 1.0;
        int guard = 0;
        while (f(hi) > 0.0) {
            lo = hi;
            hi *= 2.0;
            if (++guard > 60) throw CsbpError("growth schedule: root not bracketed (beta outside the flow range)");
        }
        std::uintmax_t it = 200;
        auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(50), it);
        double h = 0.5 * (r.first + r.second);
        // depths on the lattice keep erasure differences exact
        s.depths.push_back(std::ldexp(std::round(std::ldexp(h, lattice_bits)), -lattice_bits));
    }
    for (std::size_t i = 1; i < s.depths.size(); ++i)
        if (!(s.depths[i] < s.depths[i - 1])) throw CsbpError("growth schedule: depths not strictly decreasing");
    return s;
}

std::vector<std::pair<double, EdgeTree>> sample_growth_process(const GrowthSchedule& s, const SamplerConfig& cfg) {
    if (!cfg.height_cap) throw SamplerError("growth process: a height cap is required");
    Sample deep = sample_gw_forest(s.mech, s.rho, s.betas.back(), cfg);
    std::vector<std::pair<double, EdgeTree>> out;
    for (std::size_t i = 0; i < s.lambdas.size(); ++i)
        out.emplace_back(s.lambdas[i], s.depths[i] == 0.0 ? deep.tree : leaf_erase(s.depths[i], deep.tree));
    return out;
}

}  // namespace hgt
