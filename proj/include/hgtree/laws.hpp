#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hgt {

class LawError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Raised when a generating function is asked for a value outside the range
// where the representation is known to be exact.
class DomainError : public LawError {
  public:
    using LawError::LawError;
};

struct StablePart {
    double gamma = 2.0;  // in (1, 2]
    double coef = 0.0;   // kappa in kappa * lambda^gamma
};

// psi(l) = a l + b l^2 / 2 + sum w (exp(-l x) - 1 + l x 1{x<1}) + kappa l^gamma
struct BranchingMechanism {
    double a = 0.0;
    double b = 0.0;
    std::vector<std::pair<double, double>> pi;  // (x, w)
    std::optional<StablePart> stable;
};

double psi_eval(const BranchingMechanism& m, double lam);
double psi_deriv(const BranchingMechanism& m, double lam);
// largest root of psi (0 when psi'(0+) >= 0)
double psi_root(const BranchingMechanism& m);
BranchingMechanism mechanism_from_json(const std::string& text);
std::string to_json(const BranchingMechanism& m);

// Atomic probability measure on [0, inf): the initial law rho.
struct AtomicLaw {
    std::vector<std::pair<double, double>> atoms;  // (y, w)
};

AtomicLaw atomic_from_json(const std::string& text);

// Law on the naturals. When `mixed` is set the law is exactly the mixed
// Poisson law int rho(dy) Poisson(lambda y), and pmf is its truncation.
struct InitialLaw {
    std::vector<double> pmf;
    double residual_mass = 0.0;
    struct Mixed {
        AtomicLaw rho;
        double lambda = 0.0;
    };
    std::optional<Mixed> mixed;

    static InitialLaw dirac(int n);
    double prob(int k) const { return k >= 0 && k < static_cast<int>(pmf.size()) ? pmf[k] : 0.0; }
    double pgf(double r) const;
    double mean() const;
};

InitialLaw mu_from_rho(const AtomicLaw& rho, double lam);
InitialLaw poisson_law(double mean);

// Offspring law: phi(r) = sum head[k] r^k + omega * T(r) with the stable tail
// T(r) = (1-r)^gamma - 1 + gamma r (coefficients >= 0 from k = 2 on). When
// `psi` is set the law is xi_lambda for that mechanism and phi is evaluated in
// closed form.
class OffspringLaw {
  public:
    OffspringLaw() { finish(); }
    static OffspringLaw from_pmf(std::vector<double> pmf);

    const std::vector<double>& head() const { return head_; }
    double tail_weight() const { return omega_; }
    double tail_gamma() const { return gamma_; }
    double residual_mass() const { return residual_; }
    bool finite_support() const { return omega_ == 0.0 && residual_ == 0.0 && !psi_; }
    bool has_psi() const { return psi_.has_value(); }
    const BranchingMechanism& psi_mechanism() const { return psi_->mech; }
    double psi_lambda() const { return psi_->lambda; }

    double prob(std::int64_t k) const;
    std::vector<double> pmf(int kmax) const;
    double pgf(double r) const;
    double pgf_deriv(double r) const;
    // phi(1-z) - (1-z), evaluated without cancellation for small z
    double gap(double z) const;
    double mean() const;
    // lowest r where pgf is certified
    double domain_lo() const;
    bool proper() const { return prob(1) == 0.0; }
    bool nontrivial() const { return prob(0) + prob(1) < 1.0; }

    // Draws a child count from a uniform v in (0, 1), read as an upper-tail
    // probability: returns the least k with P(K > k) < v. Truncated mass is
    // renormalised away.
    std::int64_t quantile(double v) const;

  private:
    friend OffspringLaw stable_offspring(double gamma);
    friend OffspringLaw offspring_from_psi_law(const BranchingMechanism& m, double lam);
    friend OffspringLaw transform_offspring(const OffspringLaw& xi, double a);

    void finish();
    double tail_survival(std::int64_t k) const;  // omega * sum_{j>k} t_j

    std::vector<double> head_{1.0};
    std::vector<double> suffix_;  // suffix_[k] = sum_{j>k} head_j
    double omega_ = 0.0;
    double gamma_ = 2.0;
    double residual_ = 0.0;
    struct Psi {
        BranchingMechanism mech;
        double lambda;
    };
    std::optional<Psi> psi_;
};

OffspringLaw stable_offspring(double gamma);
// xi_lambda and c_lambda = psi'(lambda)
std::pair<OffspringLaw, double> offspring_from_psi(const BranchingMechanism& m, double lam);
OffspringLaw offspring_from_psi_law(const BranchingMechanism& m, double lam);
// generic change of variable r -> a + (1-a) r behind reduction (a = alpha)
// and inversion (a = -alpha/(1-alpha))
OffspringLaw transform_offspring(const OffspringLaw& xi, double a);
InitialLaw thin_initial(const InitialLaw& mu, double a);

double smallest_fixed_point(const OffspringLaw& xi);
bool is_conservative(const OffspringLaw& xi);
OffspringLaw offspring_from_json(const std::string& text);

struct GwLaw {
    OffspringLaw xi;
    double c = 1.0;
    InitialLaw mu = InitialLaw::dirac(1);
};

// (xi_lambda, c_lambda, mu_lambda)
GwLaw gw_from_psi(const BranchingMechanism& m, const AtomicLaw& rho, double lam);
GwLaw reduce_law(const GwLaw& law, double alpha);
GwLaw invert_law(const GwLaw& law, double alpha);
double compose_alphas(double alpha, double beta);
// {"xi": <offspring>, "c": 1, "mu": {"dirac": n} | {"pmf": [..]} | {"poisson": m}}
// or {"psi": <mechanism>, "rho": {"atoms": [[y, w], ..]}, "lambda": l}
GwLaw gw_law_from_json(const std::string& text);
InitialLaw initial_from_json(const std::string& text);
// pmfs truncated at kmax, with the remaining mass reported as "rest"
std::string to_json(const GwLaw& law, int kmax = 30);
// largest |difference| of offspring and initial pmfs up to kmax, plus |dc|
double law_distance(const GwLaw& x, const GwLaw& y, int kmax = 60);

struct ProbeResult {
    double alpha;
    bool ok;
    double min_entry;
    std::string note;
};
std::vector<ProbeResult> extension_probe(const OffspringLaw& xi, const std::vector<double>& alphas);

}  // namespace hgt
