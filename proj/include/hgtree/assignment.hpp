#pragma once

#include <vector>

namespace hgt {

struct Assignment {
    double value = 0.0;
    std::vector<int> row_to_col;  // -1 when the row stays unmatched
};

// Minimise the largest cost of a partial matching between rows and columns,
// where an unmatched row i costs row_alone[i] and an unmatched column j costs
// col_alone[j]. Among optimal matchings the one with least total cost is
// returned.
Assignment bottleneck_assignment(const std::vector<std::vector<double>>& cost,
                                 const std::vector<double>& row_alone,
                                 const std::vector<double>& col_alone);

}  // namespace hgt
