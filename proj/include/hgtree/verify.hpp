#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hgtree/gw_sim.hpp"
#include "hgtree/stats.hpp"

namespace hgt {

// Runs body(i) for i in [0, n) on `workers` threads. Results must be written to
// slot i so that merging does not depend on scheduling.
void parallel_for(std::int64_t n, int workers, const std::function<void(std::int64_t)>& body);

struct VerifyOptions {
    int workers = 1;
    double threshold = 0.01;
};

// P(height <= a) against height_cdf, KS censored at the height cap.
TestReport test_height_law(const OffspringLaw& xi, double c, double height_cap, std::int64_t n, std::uint64_t seed,
                           const VerifyOptions& o = {});

// alpha_override replaces height_cdf(h) (power checks).
TestReport test_reduced_law(const GwLaw& law, double h, double height_cap, std::int64_t n, std::uint64_t seed,
                            std::optional<double> alpha_override = std::nullopt, const VerifyOptions& o = {});

// h_target replaces h in the targets (power checks).
TestReport test_erased_forest_law(const BranchingMechanism& m, const AtomicLaw& rho, double lam, double h, double a,
                                  std::int64_t n, std::uint64_t seed, std::optional<double> h_target = std::nullopt,
                                  const VerifyOptions& o = {});

// extra_power adds to the stratum exponent of the target (power checks).
TestReport test_regenerative(const GwLaw& law, double a, double height_cap, std::int64_t n, std::uint64_t seed,
                             int extra_power = 0, const VerifyOptions& o = {});

TestReport test_martingale(const GrowthSchedule& s, double a, double height_cap, std::int64_t n, std::uint64_t seed,
                           const VerifyOptions& o = {});

struct InvarianceSetup {
    int p = 200;             // mu_p = delta_p, gamma_p = p
    double a = 1.0;
    double h = 1.0;
    std::vector<double> thetas{0.5, 1.0, 2.0};
    double allowance_k = 0.01;  // discretisation allowance K / p
};
// Critical binary discrete forests against the Feller limit psi = l^2 / 2.
TestReport test_invariance(const InvarianceSetup& s, std::int64_t n, std::uint64_t seed, const VerifyOptions& o = {});

struct TightnessPoint {
    double h, r, a;
};
// covering_fn replaces covering_number (mutation checks).
TestReport test_tightness_bounds(const std::vector<EdgeTree>& trees, const std::vector<TightnessPoint>& grid,
                                 const std::function<int(double, double, const EdgeTree&)>& covering_fn = {});

// Null rejection rates of every decision rule over `reps` seeds.
TestReport calibration(std::uint64_t seed, int reps, const VerifyOptions& o = {});

std::vector<std::string> suite_names();
// Throws std::invalid_argument on an unknown suite.
std::vector<TestReport> run_suite(const std::string& name, std::uint64_t seed, const VerifyOptions& o = {});

}  // namespace hgt
