#include "hgtree/gh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "hgtree/assignment.hpp"
#include "hgtree/reduction.hpp"

namespace hgt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Height-preserving alignment. A planted item is an edge entered at height y;
// two items are aligned along their common length, after which the longer
// one continues as a single item in the next forest matching step.
class Aligner {
  public:
    Aligner(const EdgeTree& a, const EdgeTree& b)
        : A(a), B(b), HA(a.subtree_heights()), HB(b.subtree_heights()),
          memo(static_cast<std::size_t>(a.size()) * b.size(), kNaN) {}

    std::vector<CorrespondencePiece> run() {
        pieces.clear();
        planted(0, 0, 0.0);
        return pieces;
    }

  private:
    const EdgeTree& A;
    const EdgeTree& B;
    std::vector<double> HA, HB;
    std::vector<double> memo;
    std::vector<CorrespondencePiece> pieces;

    struct Step {
        std::vector<int> ia, ib;
        double y;
    };

    Step next(int u, int v) const {
        Step s;
        double du = A.death(u), dv = B.death(v);
        s.y = std::min(du, dv);
        if (du <= dv)
            for (int i = 0; i < A.num_children(u); ++i) s.ia.push_back(A.child(u, i));
        else
            s.ia.push_back(u);
        if (dv <= du)
            for (int i = 0; i < B.num_children(v); ++i) s.ib.push_back(B.child(v, i));
        else
            s.ib.push_back(v);
        return s;
    }

    Assignment match(const Step& s) {
        std::vector<std::vector<double>> c(s.ia.size(), std::vector<double>(s.ib.size()));
        std::vector<double> ua(s.ia.size()), ub(s.ib.size());
        for (std::size_t i = 0; i < s.ia.size(); ++i) {
            ua[i] = HA[s.ia[i]] - s.y;
            for (std::size_t j = 0; j < s.ib.size(); ++j) c[i][j] = est(s.ia[i], s.ib[j]);
        }
        for (std::size_t j = 0; j < s.ib.size(); ++j) ub[j] = HB[s.ib[j]] - s.y;
        return bottleneck_assignment(c, ua, ub);
    }

    double est(int u, int v) {
        double& m = memo[static_cast<std::size_t>(u) * B.size() + v];
        if (!std::isnan(m)) return m;
        m = match(next(u, v)).value;
        return m;
    }

    void planted(int u, int v, double y) {
        Step s = next(u, v);
        pieces.push_back({{u, y}, 1, {v, y}, 1, s.y - y});
        Assignment as = match(s);
        EdgePoint pa{u, s.y}, pb{v, s.y};
        std::vector<char> usedb(s.ib.size(), 0);
        for (std::size_t i = 0; i < s.ia.size(); ++i) {
            int j = as.row_to_col[i];
            if (j >= 0) {
                usedb[j] = 1;
                planted(s.ia[i], s.ib[j], s.y);
            } else {
                collapse(A, s.ia[i], s.y, pb, true);
            }
        }
        for (std::size_t j = 0; j < s.ib.size(); ++j)
            if (!usedb[j]) collapse(B, s.ib[j], s.y, pa, false);
    }

    void collapse(const EdgeTree& T, int w, double y, EdgePoint target, bool first) {
        auto add = [&](int e, double lo) {
            double len = T.death(e) - lo;
            if (first)
                pieces.push_back({{e, lo}, 1, target, 0, len});
            else
                pieces.push_back({target, 0, {e, lo}, 1, len});
        };
        add(w, y);
        std::vector<int> st{w};
        while (!st.empty()) {
            int x = st.back();
            st.pop_back();
            for (int i = 0; i < T.num_children(x); ++i) {
                int c = T.child(x, i);
                add(c, T.birth(c));
                st.push_back(c);
            }
        }
    }
};

enum class Rel { Same, AncFirst, AncSecond, Apart };

struct Relation {
    Rel r;
    double m;  // death height of the lca when apart
};

Relation relation(const EdgeTree& t, int u, int v) {
    if (u == v) return {Rel::Same, 0.0};
    if (t.is_ancestor(u, v)) return {Rel::AncFirst, 0.0};
    if (t.is_ancestor(v, u)) return {Rel::AncSecond, 0.0};
    return {Rel::Apart, t.death(t.lca(u, v))};
}

double rdist(const Relation& r, double y, double z) {
    switch (r.r) {
        case Rel::Same: return std::abs(y - z);
        case Rel::AncFirst: return z - y;
        case Rel::AncSecond: return y - z;
        default: return (y - r.m) + (z - r.m);
    }
}

}  // namespace

double correspondence_distortion(const EdgeTree& t1, const EdgeTree& t2,
                                 const std::vector<CorrespondencePiece>& pieces) {
    double dis = 0.0;
    const std::size_t n = pieces.size();
    std::vector<std::pair<double, double>> cand;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& P = pieces[i];
        for (std::size_t j = i; j < n; ++j) {
            const auto& Q = pieces[j];
            Relation r1 = relation(t1, P.p1.v, Q.p1.v);
            Relation r2 = relation(t2, P.p2.v, Q.p2.v);
            const double Ls = P.len, Lt = Q.len;
            auto F = [&](double s, double t) {
                s = std::clamp(s, 0.0, Ls);
                t = std::clamp(t, 0.0, Lt);
                double d1 = rdist(r1, P.p1.y + P.s1 * s, Q.p1.y + Q.s1 * t);
                double d2 = rdist(r2, P.p2.y + P.s2 * s, Q.p2.y + Q.s2 * t);
                return std::abs(d1 - d2);
            };
            cand.clear();
            cand.push_back({0, 0});
            cand.push_back({Ls, 0});
            cand.push_back({0, Lt});
            cand.push_back({Ls, Lt});
            // kink lines al*s + be*t = ga, present when both points sit on one edge
            struct Line {
                double al, be, ga;
            };
            Line lines[2];
            int nl = 0;
            if (r1.r == Rel::Same && (P.s1 || Q.s1)) lines[nl++] = {double(P.s1), -double(Q.s1), Q.p1.y - P.p1.y};
            if (r2.r == Rel::Same && (P.s2 || Q.s2)) lines[nl++] = {double(P.s2), -double(Q.s2), Q.p2.y - P.p2.y};
            for (int k = 0; k < nl; ++k) {
                const Line& l = lines[k];
                if (l.be != 0.0) {
                    cand.push_back({0, (l.ga) / l.be});
                    cand.push_back({Ls, (l.ga - l.al * Ls) / l.be});
                }
                if (l.al != 0.0) {
                    cand.push_back({l.ga / l.al, 0});
                    cand.push_back({(l.ga - l.be * Lt) / l.al, Lt});
                }
            }
            if (nl == 2) {
                double det = lines[0].al * lines[1].be - lines[1].al * lines[0].be;
                if (det != 0.0) {
                    double s = (lines[0].ga * lines[1].be - lines[1].ga * lines[0].be) / det;
                    double t = (lines[0].al * lines[1].ga - lines[1].al * lines[0].ga) / det;
                    cand.push_back({s, t});
                }
            }
            for (auto [s, t] : cand) {
                if (s < -1e-12 * (1 + Ls) || s > Ls * (1 + 1e-12) + 1e-300) continue;
                if (t < -1e-12 * (1 + Lt) || t > Lt * (1 + 1e-12) + 1e-300) continue;
                dis = std::max(dis, F(s, t));
            }
        }
    }
    return dis;
}

GhUpper gh_upper(const EdgeTree& t1, const EdgeTree& t2) {
    EdgeTree a = normalize(t1), b = normalize(t2);
    GhUpper best;
    best.bound = std::numeric_limits<double>::infinity();
    for (int pass = 0; pass < 2; ++pass) {
        std::vector<CorrespondencePiece> pcs;
        if (pass == 0) {
            pcs = Aligner(a, b).run();
        } else {
            pcs = Aligner(b, a).run();
            for (auto& p : pcs) {
                std::swap(p.p1, p.p2);
                std::swap(p.s1, p.s2);
            }
        }
        double dis = correspondence_distortion(a, b, pcs);
        if (dis / 2 < best.bound) {
            best.bound = dis / 2;
            best.witness.pieces = std::move(pcs);
            best.witness.distortion = dis;
        }
    }
    best.witness.t1 = a;
    best.witness.t2 = b;
    return best;
}

namespace {

std::vector<double> vertex_heights(const EdgeTree& t) {
    std::vector<double> y{0.0};
    for (int v = 0; v < t.size(); ++v) y.push_back(t.death(v));
    std::sort(y.begin(), y.end());
    y.erase(std::unique(y.begin(), y.end()), y.end());
    return y;
}

std::vector<double> thin(std::vector<double> v, std::size_t cap) {
    if (v.size() <= cap) return v;
    std::vector<double> out;
    for (std::size_t i = 0; i < cap; ++i) out.push_back(v[i * (v.size() - 1) / (cap - 1)]);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

int zcount(const EdgeTree& t, const std::vector<double>& H, double h, double a) {
    int n = 0;
    for (int v = 0; v < t.size(); ++v) n += (t.birth(v) < a && a <= std::min(t.death(v), H[v] - h));
    return n;
}

// Profile-gap bound. If delta(T1,T2) < eps < h/5 there is a correspondence R
// with dis R < 2 eps pairing the roots. Take the points L of R_h(T1) at height
// a > 0 and for each s in L a point z(s) at height a+h above it. Distinct z's
// meet below a, so they are > 2h apart. Partners z' in T2 have heights within
// 2 eps of a+h and are > 2h - 2 eps apart, hence any two of them meet below
// a + 3 eps. Their ancestors at height a + 3 eps are distinct and each has a
// descendant at distance > h - 5 eps, so Z_{a+3eps}^{(h-5eps)}(T2) >= #L.
// Contrapositive: a smaller count at some eps forces delta >= eps.
double profile_bound(const EdgeTree& t1, const EdgeTree& t2) {
    auto H1 = t1.subtree_heights();
    auto H2 = t2.subtree_heights();
    auto Y1 = vertex_heights(t1);
    auto Y2 = vertex_heights(t2);
    std::vector<double> acand;
    for (std::size_t i = 0; i + 1 < Y1.size(); ++i) {
        double g = Y1[i + 1] - Y1[i];
        if (Y1[i] > 0) acand.push_back(Y1[i]);
        acand.push_back(Y1[i] + 0.01 * g);
        acand.push_back(Y1[i] + 0.5 * g);
    }
    acand = thin(acand, 48);
    std::vector<double> Hs(H2.begin(), H2.end());
    double best = 0.0;
    std::vector<double> br;
    for (double a : acand) {
        if (!(a > 0)) continue;
        std::vector<double> hc;
        for (int v = 0; v < t1.size(); ++v)
            if (H1[v] > a) hc.push_back(H1[v] - a);
        std::sort(hc.begin(), hc.end());
        hc.erase(std::unique(hc.begin(), hc.end()), hc.end());
        std::size_t m = hc.size();
        for (std::size_t i = 0; i + 1 < m; ++i) hc.push_back(0.5 * (hc[i] + hc[i + 1]));
        std::sort(hc.begin(), hc.end());
        hc = thin(hc, 16);
        for (double h : hc) {
            if (!(h / 5 > best)) continue;
            int z1 = zcount(t1, H1, h, a);
            if (z1 == 0) continue;
            br.assign({0.0, h / 5});
            for (double y : Y2) {
                double e = (y - a) / 3;
                if (e > 0 && e < h / 5) br.push_back(e);
            }
            for (double Hv : Hs) {
                double e = (a + h - Hv) / 2;
                if (e > 0 && e < h / 5) br.push_back(e);
            }
            std::sort(br.begin(), br.end());
            br.erase(std::unique(br.begin(), br.end()), br.end());
            for (std::size_t i = br.size() - 1; i > 0; --i) {
                if (!(br[i] > best)) break;
                double e = 0.5 * (br[i - 1] + br[i]);
                if (zcount(t2, H2, h - 5 * e, a + 3 * e) < z1) {
                    best = br[i];
                    break;
                }
            }
        }
    }
    return best;
}

}  // namespace

double gh_lower(const EdgeTree& t1, const EdgeTree& t2) {
    EdgeTree a = normalize(t1), b = normalize(t2);
    double lb = 0.5 * std::abs(total_height(a) - total_height(b));
    lb = std::max(lb, profile_bound(a, b));
    lb = std::max(lb, profile_bound(b, a));
    return lb;
}

namespace {

struct Net {
    std::vector<EdgePoint> pts;
    double radius = 0.0;
};

Net make_net(const EdgeTree& t, double eps) {
    Net n;
    n.pts.push_back({0, 0.0});
    for (int v = 0; v < t.size(); ++v) {
        double b = t.birth(v), len = t.stem(v);
        if (len <= 0) continue;
        int k = std::max(1, static_cast<int>(std::ceil(len / (2 * eps))));
        for (int i = 1; i <= k; ++i) n.pts.push_back({v, i == k ? t.death(v) : b + len * i / k});
        n.radius = std::max(n.radius, len / k / 2);
    }
    return n;
}

}  // namespace

Enclosure gh_exact_tiny(const EdgeTree& t1, const EdgeTree& t2, double eps, int max_net) {
    if (!(eps > 0)) throw TreeError("gh_exact_tiny: eps must be positive");
    EdgeTree a = normalize(t1), b = normalize(t2);
    Net N1 = make_net(a, eps), N2 = make_net(b, eps);
    const int n1 = static_cast<int>(N1.pts.size()), n2 = static_cast<int>(N2.pts.size());
    if (n1 > max_net || n2 > max_net)
        throw TreeError("gh_exact_tiny: net too large (" + std::to_string(std::max(n1, n2)) + " points)");
    std::vector<std::vector<double>> D1(n1, std::vector<double>(n1)), D2(n2, std::vector<double>(n2));
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n1; ++j) D1[i][j] = edge_distance(a, N1.pts[i], N1.pts[j]);
    for (int i = 0; i < n2; ++i)
        for (int j = 0; j < n2; ++j) D2[i][j] = edge_distance(b, N2.pts[i], N2.pts[j]);
    std::vector<double> thr{0.0};
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n1; ++j)
            for (int k = 0; k < n2; ++k)
                for (int l = 0; l < n2; ++l) thr.push_back(std::abs(D1[i][j] - D2[k][l]));
    std::sort(thr.begin(), thr.end());
    thr.erase(std::unique(thr.begin(), thr.end()), thr.end());

    auto feasible = [&](double tau) {
        std::vector<std::pair<int, int>> S{{0, 0}};
        std::vector<int> cov1(n1, 0), cov2(n2, 0);
        cov1[0] = cov2[0] = 1;
        auto ok = [&](int x, int y) {
            for (auto [p, q] : S)
                if (std::abs(D1[x][p] - D2[y][q]) > tau) return false;
            return true;
        };
        std::function<bool(int)> rec = [&](int var) -> bool {
            if (var == n1 + n2) return true;
            bool left = var < n1;
            int z = left ? var : var - n1;
            if (left ? cov1[z] : cov2[z]) return rec(var + 1);
            int m = left ? n2 : n1;
            for (int w = 0; w < m; ++w) {
                int x = left ? z : w, y = left ? w : z;
                if (!ok(x, y)) continue;
                S.push_back({x, y});
                ++cov1[x];
                ++cov2[y];
                if (rec(var + 1)) return true;
                --cov1[x];
                --cov2[y];
                S.pop_back();
            }
            return false;
        };
        return rec(1);
    };
    std::size_t lo = 0, hi = thr.size() - 1;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (feasible(thr[mid]))
            hi = mid;
        else
            lo = mid + 1;
    }
    double dn = thr[lo] / 2;
    double slack = N1.radius + N2.radius;
    return {std::max(0.0, dn - slack), dn + slack};
}

Enclosure delta_series(const EdgeTree& t1, const EdgeTree& t2) {
    double G = std::max(total_height(t1), total_height(t2));
    int K = std::max(1, static_cast<int>(std::ceil(G)));
    Enclosure e;
    for (int k = 1; k <= K; ++k) {
        EdgeTree b1 = below(k, t1), b2 = below(k, t2);
        double lo = gh_lower(b1, b2);
        double hi = gh_upper(b1, b2).bound;
        double w = k < K ? std::ldexp(1.0, -k) : std::ldexp(1.0, 1 - K);
        e.lo += w * lo;
        e.hi += w * std::max(lo, hi);
    }
    return e;
}

}  // namespace hgt
