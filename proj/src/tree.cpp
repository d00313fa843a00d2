#include "hgtree/tree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>

namespace hgt {

EdgeTree::EdgeTree() : stem_{0.0}, parent_{-1} { finish(); }

EdgeTree EdgeTree::path(double length) {
    return from_parents({-1}, {length});
}

EdgeTree EdgeTree::from_parents(const std::vector<int>& parent, const std::vector<double>& stem) {
    const int n = static_cast<int>(parent.size());
    if (n == 0 || stem.size() != parent.size())
        throw TreeError("tree: parent/stem arrays empty or of different length");
    if (parent[0] != -1) throw TreeError("tree: node 0 must be the root");
    // children in CSR form, siblings in increasing input index
    std::vector<int> start(n + 1, 0);
    for (int i = 1; i < n; ++i) {
        if (parent[i] < 0 || parent[i] >= n || parent[i] == i)
            throw TreeError("tree: bad parent index at node " + std::to_string(i));
        ++start[parent[i] + 1];
    }
    for (int i = 0; i < n; ++i) start[i + 1] += start[i];
    std::vector<int> kids(n > 0 ? n - 1 : 0);
    {
        std::vector<int> fill(start.begin(), start.end() - 1);
        for (int i = 1; i < n; ++i) kids[fill[parent[i]]++] = i;
    }
    for (int i = 0; i < n; ++i)
        if (!std::isfinite(stem[i]) || stem[i] < 0.0)
            throw TreeError("tree: stems must be finite and nonnegative");

    std::vector<int> order;
    order.reserve(n);
    std::vector<int> newid(n, -1);
    order.push_back(0);
    newid[0] = 0;
    for (std::size_t h = 0; h < order.size(); ++h) {
        int v = order[h];
        for (int j = start[v]; j < start[v + 1]; ++j) {
            int c = kids[j];
            newid[c] = static_cast<int>(order.size());
            order.push_back(c);
        }
    }
    if (static_cast<int>(order.size()) != n) throw TreeError("tree: parent array contains a cycle");

    EdgeTree t;
    t.stem_.assign(n, 0.0);
    t.parent_.assign(n, -1);
    for (int i = 0; i < n; ++i) {
        int old = order[i];
        t.stem_[i] = stem[old];
        t.parent_[i] = old == 0 ? -1 : newid[parent[old]];
    }
    t.finish();
    return t;
}

void EdgeTree::finish() {
    const int n = size();
    first_.assign(n, n);
    nchild_.assign(n, 0);
    death_.assign(n, 0.0);
    depth_.assign(n, 0);
    for (int i = 1; i < n; ++i) {
        int p = parent_[i];
        if (first_[p] == n) first_[p] = i;
        ++nchild_[p];
    }
    death_[0] = stem_[0];
    for (int i = 1; i < n; ++i) {
        death_[i] = death_[parent_[i]] + stem_[i];
        depth_[i] = depth_[parent_[i]] + 1;
    }
    tin_.assign(n, 0);
    tout_.assign(n, 0);
    int clock = 0;
    std::vector<std::pair<int, int>> st;
    st.push_back({0, 0});
    tin_[0] = clock++;
    while (!st.empty()) {
        auto& [v, i] = st.back();
        if (i < nchild_[v]) {
            int c = first_[v] + i++;
            tin_[c] = clock++;
            st.push_back({c, 0});
        } else {
            tout_[v] = clock++;
            st.pop_back();
        }
    }
}

int EdgeTree::lca(int u, int v) const {
    while (depth_[u] > depth_[v]) u = parent_[u];
    while (depth_[v] > depth_[u]) v = parent_[v];
    while (u != v) {
        u = parent_[u];
        v = parent_[v];
    }
    return u;
}

std::vector<double> EdgeTree::subtree_heights() const {
    std::vector<double> H(death_);
    for (int i = size() - 1; i > 0; --i) H[parent_[i]] = std::max(H[parent_[i]], H[i]);
    return H;
}

double total_height(const EdgeTree& t) {
    double h = 0.0;
    for (int v = 0; v < t.size(); ++v) h = std::max(h, t.death(v));
    return h;
}

double total_length(const EdgeTree& t) {
    double s = 0.0;
    for (double x : t.stems()) s += x;
    return s;
}

int leaf_count(const EdgeTree& t) {
    // metric leaves: zero-length leaf edges do not count
    std::vector<int> L(t.size(), 0);
    for (int v = t.size() - 1; v >= 0; --v) {
        if (L[v] == 0 && t.stem(v) > 0.0 && v != 0) L[v] = 1;
        if (v > 0) L[t.parent(v)] += L[v];
    }
    if (L[0] == 0 && t.stem(0) > 0.0) return 1;
    return L[0];
}

EdgePoint resolve(const EdgeTree& t, const TreePoint& p) {
    int v = 0;
    for (int i : p.path) {
        if (i < 0 || i >= t.num_children(v)) throw TreeError("tree point: invalid child index");
        v = t.child(v, i);
    }
    if (!(p.offset >= 0.0 && p.offset <= t.stem(v))) throw TreeError("tree point: offset outside stem");
    return {v, t.birth(v) + p.offset};
}

TreePoint address(const EdgeTree& t, const EdgePoint& p) {
    TreePoint out;
    for (int v = p.v; v != 0; v = t.parent(v)) out.path.push_back(v - t.child(t.parent(v), 0));
    std::reverse(out.path.begin(), out.path.end());
    out.offset = p.y - t.birth(p.v);
    return out;
}

double point_height(const EdgeTree& t, const TreePoint& p) { return resolve(t, p).y; }

double edge_distance(const EdgeTree& t, EdgePoint p, EdgePoint q) {
    if (p.v == q.v) return std::abs(p.y - q.y);
    if (t.is_ancestor(p.v, q.v)) return q.y - p.y;
    if (t.is_ancestor(q.v, p.v)) return p.y - q.y;
    int w = t.lca(p.v, q.v);
    return (p.y - t.death(w)) + (q.y - t.death(w));
}

double point_distance(const EdgeTree& t, const TreePoint& p, const TreePoint& q) {
    return edge_distance(t, resolve(t, p), resolve(t, q));
}

namespace {

// Copy the subtree of t rooted at v below builder node `at` (v's own edge
// becomes a child edge of `at` with stem s).
void append_subtree(TreeBuilder& b, int at, const EdgeTree& t, int v, double s) {
    std::deque<std::pair<int, int>> q{{v, b.add(at, s)}};
    while (!q.empty()) {
        auto [o, n] = q.front();
        q.pop_front();
        for (int i = 0; i < t.num_children(o); ++i) {
            int c = t.child(o, i);
            q.push_back({c, b.add(n, t.stem(c))});
        }
    }
}

}  // namespace

EdgeTree subtree_above(const EdgeTree& t, int v, double y) {
    TreeBuilder b(t.death(v) - y);
    std::deque<std::pair<int, int>> q{{v, 0}};
    while (!q.empty()) {
        auto [o, n] = q.front();
        q.pop_front();
        for (int i = 0; i < t.num_children(o); ++i) {
            int c = t.child(o, i);
            q.push_back({c, b.add(n, t.stem(c))});
        }
    }
    return b.build();
}

EdgeTree graft(const std::vector<EdgeTree>& parts) {
    TreeBuilder b(0.0);
    for (const auto& p : parts) append_subtree(b, 0, p, 0, p.stem(0));
    return b.build();
}

std::vector<EdgeTree> split_measure(double a, const EdgeTree& t) {
    std::vector<EdgeTree> out;
    for (int v = 0; v < t.size(); ++v)
        if (t.birth(v) <= a && a < t.death(v)) out.push_back(subtree_above(t, v, a));
    return out;
}

int right_profile(double a, const EdgeTree& t) {
    int n = 0;
    for (int v = 0; v < t.size(); ++v) n += (t.birth(v) <= a && a < t.death(v));
    return n;
}

int left_profile(double a, const EdgeTree& t) {
    if (a <= 0.0) return right_profile(0.0, t);
    int n = 0;
    for (int v = 0; v < t.size(); ++v) n += (t.birth(v) < a && a <= t.death(v));
    return n;
}

EdgeTree above(double a, const EdgeTree& t) { return graft(split_measure(a, t)); }

EdgeTree below(double a, const EdgeTree& t) {
    if (a <= 0.0) return EdgeTree::point();
    std::vector<int> par{-1};
    std::vector<double> st{std::min(t.death(0), a)};
    std::vector<int> id(t.size(), -1);
    id[0] = 0;
    for (int v = 1; v < t.size(); ++v) {
        if (id[t.parent(v)] < 0 || !(t.birth(v) < a)) continue;
        id[v] = static_cast<int>(par.size());
        par.push_back(id[t.parent(v)]);
        st.push_back(std::min(t.death(v), a) - t.birth(v));
    }
    return EdgeTree::from_parents(par, st);
}

FirstBranch first_branch(const EdgeTree& t) {
    EdgeTree n = normalize(t);
    FirstBranch fb;
    if (n.size() == 1 && n.stem(0) == 0.0) return fb;
    double D;
    if (n.stem(0) > 0.0) {
        D = n.death(0);
    } else {
        D = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n.num_children(0); ++i) D = std::min(D, n.death(n.child(0, i)));
    }
    fb.D = D;
    fb.infinite = false;
    fb.theta = above(D, n);
    fb.k = right_profile(D, n);
    return fb;
}

EdgeTree scale(double c, const EdgeTree& t) {
    if (!(c > 0.0) || !std::isfinite(c)) throw TreeError("scale: factor must be positive and finite");
    std::vector<double> s(t.stems());
    for (double& x : s) x *= c;
    return EdgeTree::from_parents(t.parents(), s);
}

EdgeTree normalize(const EdgeTree& t) {
    const int n = t.size();
    std::vector<double> top(n);
    std::vector<std::vector<int>> kids(n);
    for (int v = n - 1; v >= 0; --v) {
        std::vector<int> k;
        for (int i = 0; i < t.num_children(v); ++i) {
            int c = t.child(v, i);
            if (top[c] == t.birth(c)) {
                k.insert(k.end(), kids[c].begin(), kids[c].end());
            } else {
                k.push_back(c);
            }
        }
        top[v] = t.death(v);
        if (k.size() == 1) {
            int c = k[0];
            top[v] = top[c];
            k = std::move(kids[c]);
        }
        kids[v] = std::move(k);
    }
    std::vector<int> par{-1};
    std::vector<double> st{top[0]};
    std::deque<std::pair<int, int>> q{{0, 0}};
    while (!q.empty()) {
        auto [o, nid] = q.front();
        q.pop_front();
        for (int c : kids[o]) {
            int id = static_cast<int>(par.size());
            par.push_back(nid);
            st.push_back(top[c] - t.birth(c));
            q.push_back({c, id});
        }
    }
    return EdgeTree::from_parents(par, st);
}

EdgeTree canonicalize(const EdgeTree& t) {
    EdgeTree n = normalize(t);
    const int N = n.size();
    std::vector<std::vector<int>> kids(N);
    std::function<int(int, int)> cmp = [&](int a, int b) -> int {
        if (a == b) return 0;
        if (n.stem(a) != n.stem(b)) return n.stem(a) < n.stem(b) ? -1 : 1;
        if (kids[a].size() != kids[b].size()) return kids[a].size() < kids[b].size() ? -1 : 1;
        for (std::size_t i = 0; i < kids[a].size(); ++i) {
            int c = cmp(kids[a][i], kids[b][i]);
            if (c != 0) return c;
        }
        return 0;
    };
    for (int v = N - 1; v >= 0; --v) {
        for (int i = 0; i < n.num_children(v); ++i) kids[v].push_back(n.child(v, i));
        std::stable_sort(kids[v].begin(), kids[v].end(), [&](int a, int b) { return cmp(a, b) < 0; });
    }
    std::vector<int> par{-1};
    std::vector<double> st{n.stem(0)};
    std::deque<std::pair<int, int>> q{{0, 0}};
    while (!q.empty()) {
        auto [o, nid] = q.front();
        q.pop_front();
        for (int c : kids[o]) {
            int id = static_cast<int>(par.size());
            par.push_back(nid);
            st.push_back(n.stem(c));
            q.push_back({c, id});
        }
    }
    return EdgeTree::from_parents(par, st);
}

bool iso_equal(const EdgeTree& a, const EdgeTree& b, double tol) {
    if (tol > 0.0) {
        auto snap = [tol](const EdgeTree& t) {
            std::vector<double> s(t.stems());
            for (double& x : s) x = std::round(x / tol) * tol;
            return EdgeTree::from_parents(t.parents(), s);
        };
        return canonicalize(snap(a)) == canonicalize(snap(b));
    }
    return canonicalize(a) == canonicalize(b);
}

}  // namespace hgt
