#include "hgtree/assignment.hpp"

#include <algorithm>
#include <limits>

namespace hgt {

namespace {

using Mat = std::vector<std::vector<double>>;

// Kuhn's augmenting paths on the graph of entries <= tau.
bool perfect(const Mat& C, double tau) {
    const int n = static_cast<int>(C.size());
    std::vector<int> mc(n, -1);
    std::vector<char> seen;
    auto aug = [&](auto&& self, int r) -> bool {
        for (int c = 0; c < n; ++c) {
            if (C[r][c] > tau || seen[c]) continue;
            seen[c] = 1;
            if (mc[c] < 0 || self(self, mc[c])) {
                mc[c] = r;
                return true;
            }
        }
        return false;
    };
    for (int r = 0; r < n; ++r) {
        seen.assign(n, 0);
        if (!aug(aug, r)) return false;
    }
    return true;
}

// Hungarian method with potentials, O(n^3). Returns column of each row.
std::vector<int> hungarian(const Mat& a) {
    const int n = static_cast<int>(a.size());
    const double INF = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0), v(n + 1, 0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, INF);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            int i0 = p[j0], j1 = 0;
            double delta = INF;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> col(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) col[p[j] - 1] = j - 1;
    return col;
}

}  // namespace

Assignment bottleneck_assignment(const Mat& cost, const std::vector<double>& ra, const std::vector<double>& cb) {
    const int na = static_cast<int>(ra.size()), nb = static_cast<int>(cb.size());
    Assignment out;
    out.row_to_col.assign(na, -1);
    const int n = na + nb;
    if (n == 0) return out;
    // rows: A items then dummies; columns: B items then dummies
    Mat C(n, std::vector<double>(n, 0.0));
    double big = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double c = 0.0;
            if (i < na && j < nb)
                c = cost[i][j];
            else if (i < na)
                c = ra[i];
            else if (j < nb)
                c = cb[j];
            C[i][j] = c;
            big = std::max(big, c);
        }
    std::vector<double> vals;
    for (const auto& r : C) vals.insert(vals.end(), r.begin(), r.end());
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    std::size_t lo = 0, hi = vals.size() - 1;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (perfect(C, vals[mid]))
            hi = mid;
        else
            lo = mid + 1;
    }
    const double tau = vals[lo];
    const double penalty = (big + 1.0) * (n + 1) * 4.0;
    Mat D = C;
    for (auto& r : D)
        for (double& x : r)
            if (x > tau) x = penalty;
    auto col = hungarian(D);
    out.value = tau;
    for (int i = 0; i < na; ++i)
        if (col[i] < nb) out.row_to_col[i] = col[i];
    return out;
}

}  // namespace hgt
