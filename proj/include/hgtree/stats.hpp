#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hgt {

class StatsError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct TestReport {
    std::string name;
    std::int64_t sample_size = 0;
    double statistic = 0.0;
    std::optional<double> p_value;
    std::optional<double> max_abs_error;
    // p-value tests pass when p > threshold; error tests when statistic <= threshold
    double threshold = 0.0;
    bool pass = false;
    std::uint64_t seed = 0;
    double runtime = 0.0;
    std::string note;
    std::vector<TestReport> parts;
};

// Runtime is left out unless asked for, so reports stay byte-identical.
std::string report_json(const TestReport& r, bool with_runtime = false, int indent = 2);

// Cells are merged left to right until every expected count is >= 5; mass of
// expected beyond its length forms a tail cell.
TestReport chi_square(const std::vector<double>& expected_pmf, const std::vector<std::int64_t>& observed,
                      double threshold = 0.01);

// P(K > x) for the Kolmogorov distribution.
double kolmogorov_survival(double x);

// One-sample KS against a continuous cdf. With `censor`, samples are taken as
// min(X, censor) and the sup runs over x < censor, which keeps the asymptotic
// p-value conservative.
TestReport ks_test(const std::function<double(double)>& cdf, std::vector<double> samples,
                   std::optional<double> censor = std::nullopt, double threshold = 0.01);

// |mean - target| <= z * SE + allowance
TestReport mean_check(const std::vector<double>& values, double target, double allowance = 0.0, double z = 3.0);

// Bonferroni: p-value parts are held to threshold / (number of p-value parts).
TestReport composite(const std::string& name, std::vector<TestReport> parts, double threshold = 0.01);

}  // namespace hgt
