#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

namespace hgt {

class SolverError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct OdeOptions {
    double rtol = 1e-12;
    double atol = 1e-14;
    double max_step = 0.0;  // 0: no limit
    // reject a step when |f_i| * step > guard * (|y_i| + atol); <= 0 disables
    double guard = 0.0;
    long max_steps = 10000000;
};

using OdeRhs = std::function<void(double t, const std::vector<double>& y, std::vector<double>& dy)>;
// return true to stop integration at the current (accepted) state
using OdeStop = std::function<bool(double t, const std::vector<double>& y)>;

struct OdeResult {
    double t;
    std::vector<double> y;
    long steps = 0;
    long rejected = 0;
};

// Dormand-Prince 5(4) with adaptive steps, from t0 to t1 (t1 > t0).
OdeResult integrate_dp45(const OdeRhs& f, std::vector<double> y0, double t0, double t1, const OdeOptions& opt,
                         const OdeStop& stop = nullptr);

// Value at x = 0 of the polynomial through (x_i, f_i).
double neville_at_zero(const std::vector<double>& x, std::vector<double> f);

}  // namespace hgt
