#include <algorithm>
#include <limits>

#include "hgtree/reduction.hpp"

namespace hgt {

namespace {

// x + e*eps for an infinitesimal eps > 0, ordered lexicographically. Greedy
// covering with closed balls of radius h - eps, for all small eps at once,
// gives the open-ball covering number of radius h.
struct Eps {
    double v;
    int e;
    friend bool operator<(Eps a, Eps b) { return a.v < b.v || (a.v == b.v && a.e < b.e); }
    friend bool operator<=(Eps a, Eps b) { return !(b < a); }
};

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
    Eps lo, hi;
};

void subtract(std::vector<Interval>& iv, Eps c1, Eps c2) {
    std::vector<Interval> out;
    for (const auto& I : iv) {
        if (c2 < I.lo || I.hi < c1) {
            out.push_back(I);
            continue;
        }
        if (I.lo < c1) out.push_back({I.lo, c1});
        if (c2 < I.hi) out.push_back({c2, I.hi});
    }
    iv.swap(out);
}

std::vector<EdgePoint> greedy(double h, const EdgeTree& K) {
    const int n = K.size();
    std::vector<std::vector<Interval>> unc(n);
    for (int v = 0; v < n; ++v) unc[v].push_back({{K.birth(v), 0}, {K.death(v), 0}});
    std::vector<EdgePoint> centers;
    const Eps R{h, -1};
    for (;;) {
        int ex = -1;
        Eps hx{-kInf, 0};
        for (int v = 0; v < n; ++v)
            for (const auto& I : unc[v])
                if (ex < 0 || hx < I.hi) {
                    hx = I.hi;
                    ex = v;
                }
        if (ex < 0) break;
        if (hx <= R) {
            centers.push_back({0, 0.0});
            break;
        }
        Eps c{hx.v - h, hx.e + 1};
        int e = ex;
        while (e != 0 && c < Eps{K.birth(e), 0}) e = K.parent(e);
        centers.push_back({e, c.v});
        for (int f = 0; f < n; ++f) {
            if (unc[f].empty()) continue;
            Eps lo{-kInf, 0}, hi{kInf, 0};
            if (f == e) {
                lo = {c.v - h, c.e + 1};
                hi = {c.v + h, c.e - 1};
            } else if (K.is_ancestor(f, e)) {
                lo = {c.v - h, c.e + 1};
            } else if (K.is_ancestor(e, f)) {
                hi = {c.v + h, c.e - 1};
            } else {
                double m = K.death(K.lca(e, f));
                hi = {h + 2.0 * m - c.v, -1 - c.e};
            }
            subtract(unc[f], lo, hi);
        }
    }
    return centers;
}

}  // namespace

std::vector<EdgePoint> covering_centers(double h, double r, const EdgeTree& t) {
    if (!(h > 0.0) || !(r > 0.0)) throw TreeError("covering_number: h and r must be positive");
    return greedy(h, below(r, t));
}

int covering_number(double h, double r, const EdgeTree& t) {
    return static_cast<int>(covering_centers(h, r, t).size());
}

std::vector<double> covering_grid(double h, double r) {
    // a(0) < h'/2 and h' <= a(k+1) - a(k) < 3h'/2 with h' = h/3
    const double hp = h / 3.0;
    std::vector<double> g;
    for (int k = 0;; ++k) {
        double a = hp / 4.0 + 1.25 * hp * k;
        if (a > r) break;
        g.push_back(a);
    }
    return g;
}

int covering_upper_bound(double h, double r, const EdgeTree& t) {
    int s = 1;
    for (double a : covering_grid(h, r)) s += erased_profile(h / 3.0, a, t);
    return s;
}

}  // namespace hgt
