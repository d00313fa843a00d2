#include "hgtree/reduction.hpp"

#include <cmath>

#include "json.hpp"

namespace hgt {

namespace {

// Build the reduced tree from per-edge cut heights. An edge is kept when its
// parent is kept up to its top and its cut lies strictly above its bottom
// (zero-length edges are kept when the cut reaches their top).
EdgeTree apply_cuts(const EdgeTree& t, const std::vector<std::optional<double>>& cut) {
    const int n = t.size();
    if (!cut[0]) return EdgeTree::point();
    std::vector<int> id(n, -1);
    std::vector<char> full(n, 0);
    std::vector<int> par{-1};
    std::vector<double> st;
    {
        double c = *cut[0];
        if (c < 0.0) return EdgeTree::point();
        st.push_back(std::min(t.death(0), c));
        id[0] = 0;
        full[0] = c >= t.death(0);
    }
    for (int v = 1; v < n; ++v) {
        int p = t.parent(v);
        if (id[p] < 0 || !full[p] || !cut[v]) continue;
        double c = *cut[v];
        double b = t.birth(v);
        if (!(c > b || c >= t.death(v))) continue;
        id[v] = static_cast<int>(par.size());
        par.push_back(id[p]);
        st.push_back(std::min(t.death(v), c) - b);
        full[v] = c >= t.death(v);
    }
    return EdgeTree::from_parents(par, st);
}

std::vector<std::optional<double>> height_cuts(double h, const EdgeTree& t) {
    auto H = t.subtree_heights();
    std::vector<std::optional<double>> cut(t.size());
    for (int v = 0; v < t.size(); ++v) {
        double c = H[v] - h;
        if (c >= t.birth(v)) cut[v] = c;
    }
    return cut;
}

bool is_point(const EdgeTree& t) { return total_height(t) == 0.0; }

class HeightAtLeast : public Predicate {
  public:
    explicit HeightAtLeast(double h) : h_(h) {
        if (!(h > 0.0)) throw PredicateError("height_at_least: h must be positive");
    }
    std::string name() const override { return "height_at_least"; }
    bool holds(const EdgeTree& t) const override { return total_height(t) >= h_; }
    std::vector<std::optional<double>> edge_cuts(const EdgeTree& t) const override { return height_cuts(h_, t); }

  private:
    double h_;
};

class TotalLengthAtLeast : public Predicate {
  public:
    explicit TotalLengthAtLeast(double L) : L_(L) {
        if (!(L > 0.0)) throw PredicateError("total_length_at_least: L must be positive");
    }
    std::string name() const override { return "total_length_at_least"; }
    bool holds(const EdgeTree& t) const override { return total_length(t) >= L_; }
    std::vector<std::optional<double>> edge_cuts(const EdgeTree& t) const override {
        std::vector<double> S(t.stems());
        for (int v = t.size() - 1; v > 0; --v) S[t.parent(v)] += S[v];
        std::vector<std::optional<double>> cut(t.size());
        for (int v = 0; v < t.size(); ++v)
            if (S[v] >= L_) cut[v] = t.birth(v) + (S[v] - L_);
        return cut;
    }

  private:
    double L_;
};

class LeafCountAtLeast : public Predicate {
  public:
    explicit LeafCountAtLeast(int m) : m_(m) {
        if (m < 1) throw PredicateError("leaf_count_at_least: m must be >= 1");
    }
    std::string name() const override { return "leaf_count_at_least"; }
    bool holds(const EdgeTree& t) const override { return leaf_count(t) >= m_; }
    std::vector<std::optional<double>> edge_cuts(const EdgeTree& t) const override {
        const int n = t.size();
        std::vector<int> L(n, 0);
        for (int v = n - 1; v >= 0; --v) {
            if (L[v] == 0 && t.stem(v) > 0.0) L[v] = 1;
            if (v > 0) L[t.parent(v)] += L[v];
        }
        std::vector<std::optional<double>> cut(n);
        for (int v = 0; v < n; ++v)
            if (L[v] >= m_) cut[v] = t.death(v);
        return cut;
    }

  private:
    int m_;
};

class Never : public Predicate {
  public:
    std::string name() const override { return "never"; }
    bool holds(const EdgeTree&) const override { return false; }
    std::vector<std::optional<double>> edge_cuts(const EdgeTree& t) const override {
        return std::vector<std::optional<double>>(t.size());
    }
};

class Regularized : public Predicate {
  public:
    explicit Regularized(HereditaryPredicate A) : A_(std::move(A)) {}
    std::string name() const override { return "regularize(" + A_->name() + ")"; }
    bool holds(const EdgeTree& t) const override { return !is_point(A_->reduce(t)); }
    std::vector<std::optional<double>> edge_cuts(const EdgeTree& t) const override { return A_->edge_cuts(t); }
    EdgeTree reduce(const EdgeTree& t) const override { return A_->reduce(t); }

  private:
    HereditaryPredicate A_;
};

class Composed : public Predicate {
  public:
    Composed(HereditaryPredicate outer, HereditaryPredicate inner)
        : outer_(std::move(outer)), inner_(std::move(inner)) {}
    std::string name() const override { return outer_->name() + " o " + inner_->name(); }
    bool holds(const EdgeTree& t) const override { return outer_->holds(inner_->reduce(t)); }
    EdgeTree reduce(const EdgeTree& t) const override { return outer_->reduce(inner_->reduce(t)); }

  private:
    HereditaryPredicate outer_, inner_;
};

HereditaryPredicate parse(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind")) throw PredicateError("predicate: object with \"kind\" expected");
    std::string k = j["kind"].get<std::string>();
    if (k == "height_at_least") return height_at_least(j.at("h").get<double>());
    if (k == "total_length_at_least") return total_length_at_least(j.at("L").get<double>());
    if (k == "leaf_count_at_least") return leaf_count_at_least(j.at("m").get<int>());
    if (k == "never") return never_holds();
    if (k == "regularize") return regularize(parse(j.at("of")));
    if (k == "compose") return compose(parse(j.at("outer")), parse(j.at("inner")));
    throw PredicateError("predicate: unknown kind " + k);
}

}  // namespace

// Generic cut by bisection on holds() along each edge.
std::vector<std::optional<double>> Predicate::edge_cuts(const EdgeTree& t) const {
    std::vector<std::optional<double>> cut(t.size());
    for (int v = 0; v < t.size(); ++v) {
        double lo = t.birth(v), hi = t.death(v);
        if (!holds(subtree_above(t, v, lo))) continue;
        if (holds(subtree_above(t, v, hi))) {
            cut[v] = hi;
            continue;
        }
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
            double mid = 0.5 * (lo + hi);
            (holds(subtree_above(t, v, mid)) ? lo : hi) = mid;
        }
        cut[v] = lo;
    }
    return cut;
}

EdgeTree Predicate::reduce(const EdgeTree& t) const { return apply_cuts(t, edge_cuts(t)); }

EdgeTree leaf_erase(double h, const EdgeTree& t) {
    if (!(h > 0.0)) throw TreeError("leaf_erase: h must be positive");
    return apply_cuts(t, height_cuts(h, t));
}

int erased_profile(double h, double a, const EdgeTree& t) {
    if (!(h > 0.0)) throw TreeError("erased_profile: h must be positive");
    if (a <= 0.0) return erased_profile_right(h, 0.0, t);
    auto H = t.subtree_heights();
    int n = 0;
    for (int v = 0; v < t.size(); ++v) n += (t.birth(v) < a && a <= std::min(t.death(v), H[v] - h));
    return n;
}

int erased_profile_right(double h, double a, const EdgeTree& t) {
    if (!(h > 0.0)) throw TreeError("erased_profile: h must be positive");
    auto H = t.subtree_heights();
    int n = 0;
    for (int v = 0; v < t.size(); ++v) n += (t.birth(v) <= a && a < std::min(t.death(v), H[v] - h));
    return n;
}

HereditaryPredicate height_at_least(double h) { return std::make_shared<HeightAtLeast>(h); }
HereditaryPredicate total_length_at_least(double L) { return std::make_shared<TotalLengthAtLeast>(L); }
HereditaryPredicate leaf_count_at_least(int m) { return std::make_shared<LeafCountAtLeast>(m); }
HereditaryPredicate never_holds() { return std::make_shared<Never>(); }
HereditaryPredicate regularize(HereditaryPredicate A) { return std::make_shared<Regularized>(std::move(A)); }
HereditaryPredicate compose(HereditaryPredicate outer, HereditaryPredicate inner) {
    return std::make_shared<Composed>(std::move(outer), std::move(inner));
}

HereditaryPredicate predicate_from_json(const std::string& text) {
    try {
        return parse(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw PredicateError(std::string("predicate: ") + e.what());
    }
}

EdgeTree reduce(const HereditaryPredicate& A, const EdgeTree& t) { return A->reduce(t); }

int check_predicate(const HereditaryPredicate& A, const EdgeTree& t, int probes_per_edge) {
    if (A->holds(EdgeTree::point())) return 1;
    auto cut = A->edge_cuts(t);
    int bad = 0;
    for (int v = 0; v < t.size(); ++v) {
        double b = t.birth(v), d = t.death(v);
        if (d <= b) continue;
        for (int i = 1; i <= probes_per_edge; ++i) {
            double y = b + (d - b) * i / (probes_per_edge + 1);
            bool expect = cut[v] && y < *cut[v];
            bool unexpect_fail = cut[v] && y > *cut[v];
            bool h = A->holds(subtree_above(t, v, y));
            if ((expect && !h) || ((!cut[v] || unexpect_fail) && h)) ++bad;
        }
    }
    return bad;
}

}  // namespace hgt
