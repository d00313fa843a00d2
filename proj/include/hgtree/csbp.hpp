#pragma once

#include <limits>
#include <vector>

#include "hgtree/laws.hpp"
#include "hgtree/ode.hpp"

namespace hgt {

class CsbpError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct SolverConfig {
    double rtol = 1e-12;
    double atol = 1e-14;
    double max_step = 0.0;
    double guard = 0.5;
};

class CsbpKernel {
  public:
    explicit CsbpKernel(BranchingMechanism mech, SolverConfig cfg = {});
    const BranchingMechanism& mech() const { return mech_; }
    const SolverConfig& config() const { return cfg_; }
    double q() const { return q_; }
    double psi(double l) const { return psi_eval(mech_, l); }
    double dpsi(double l) const { return psi_deriv(mech_, l); }

  private:
    BranchingMechanism mech_;
    SolverConfig cfg_;
    double q_;
};

// sentinel for lambda = infinity (Levy forest)
inline constexpr double kLevyForest = std::numeric_limits<double>::infinity();

double u_flow(const CsbpKernel& k, double a, double theta);

struct VScale {
    double value;
    double flow_route;      // extrapolated flow from large theta
    double integral_route;  // root of the tail integral
};
VScale v_scale_detail(const CsbpKernel& k, double h);
double v_scale(const CsbpKernel& k, double h);

struct GreyConservative {
    bool grey;
    bool conservative;
};
GreyConservative grey_and_conservative(const CsbpKernel& k);

double extinction_cdf(const CsbpKernel& k, const AtomicLaw& rho, double a);
double csbp_mean(const CsbpKernel& k, const AtomicLaw& rho, double a);

// w(a, theta) with dw/da = c (phi(w) - w), w(0) = exp(-theta)
double gw_laplace(const OffspringLaw& xi, double c, double a, double theta);
// P(Gamma <= a) for one GW(xi, c) tree
double height_cdf(const OffspringLaw& xi, double c, double a);

// u(h, lambda), or v(h) for the Levy-forest sentinel
double reduced_parameter(const CsbpKernel& k, double lam, double h);
// E[exp(-theta Z_a^(h)(F_lambda))]
double erased_forest_laplace(const CsbpKernel& k, const AtomicLaw& rho, double lam, double h, double a, double theta);

// Law of Z_a^+ for a GW(xi, c; mu) forest by the forward equations of the
// branching chain on {0..nmax} plus an overflow state (last entry).
std::vector<double> profile_pmf(const OffspringLaw& xi, double c, const InitialLaw& mu, double a, int nmax);

}  // namespace hgt
