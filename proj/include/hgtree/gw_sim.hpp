#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hgtree/csbp.hpp"
#include "hgtree/laws.hpp"
#include "hgtree/rng.hpp"
#include "hgtree/tree.hpp"

namespace hgt {

class SamplerError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct SamplerConfig {
    std::uint64_t seed = 0;
    std::optional<double> height_cap;
    std::int64_t vertex_cap = 10'000'000;
    // lifetimes are rounded to multiples of 2^-lattice_bits (at least one unit)
    int lattice_bits = 36;
};

struct Sample {
    EdgeTree tree;
    bool truncated = false;
};

// Seed of replica i; replicas never share streams with each other.
std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t i);
double snap_to_lattice(double x, int bits);

Sample sample_gw_tree(const OffspringLaw& xi, double c, const SamplerConfig& cfg);
// Root of stem 0 carrying N ~ mu independent trees.
Sample sample_gw_forest(const GwLaw& law, const SamplerConfig& cfg);
Sample sample_gw_forest(const BranchingMechanism& m, const AtomicLaw& rho, double lam, const SamplerConfig& cfg);
// Unit lifetimes; vertices of generation `generation_cap` are not expanded.
Sample sample_discrete_gw(const OffspringLaw& xi_p, const InitialLaw& mu_p, int generation_cap, const SamplerConfig& cfg);
// xi^p(1) = 1 - c/gamma_p, xi^p(k) = (c/gamma_p) xi(k) otherwise
OffspringLaw lazy_embedding(const OffspringLaw& xi, double c, double gamma_p);

// Draw from an initial law (mixed Poisson laws are drawn exactly).
std::int64_t draw_initial(const InitialLaw& mu, Stream& s);

struct GrowthSchedule {
    BranchingMechanism mech;
    AtomicLaw rho;
    std::vector<double> lambdas;  // increasing
    std::vector<double> betas;    // beta(lambda)
    std::vector<double> depths;   // h_lambda, on the lattice, decreasing
};

// beta_points: (lambda, beta) pairs, interpolated linearly.
GrowthSchedule build_growth_schedule(const BranchingMechanism& m, const AtomicLaw& rho,
                                     const std::vector<std::pair<double, double>>& beta_points,
                                     const std::vector<double>& lambda_grid, int lattice_bits = 36);
// One deep forest at beta(lambda_max), erased down to every level.
std::vector<std::pair<double, EdgeTree>> sample_growth_process(const GrowthSchedule& s, const SamplerConfig& cfg);

}  // namespace hgt
