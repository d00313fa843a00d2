#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hgtree/tree.hpp"

namespace hgt {

class PredicateError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// R_h: keep the points that have a descendant at distance >= h.
EdgeTree leaf_erase(double h, const EdgeTree& t);

// Number of points at height a of R_h(t) (left-continuous in a, with the
// a = 0 value taken from the right limit).
int erased_profile(double h, double a, const EdgeTree& t);
// Z_{a+}^{(h)} = right_profile(a, R_h(t))
int erased_profile_right(double h, double a, const EdgeTree& t);

// A hereditary property given through an edge-cut solver.
class Predicate {
  public:
    virtual ~Predicate() = default;
    virtual std::string name() const = 0;
    virtual bool holds(const EdgeTree& t) const = 0;
    // For every vertex v: the largest height y on edge v such that the tree
    // above y (restricted to v's side) holds, clamped to [birth, death], or
    // nullopt when it fails already at the bottom of the edge.
    virtual std::vector<std::optional<double>> edge_cuts(const EdgeTree& t) const;
    virtual EdgeTree reduce(const EdgeTree& t) const;
    bool monotone = true;
};

using HereditaryPredicate = std::shared_ptr<const Predicate>;

HereditaryPredicate height_at_least(double h);
HereditaryPredicate total_length_at_least(double L);
HereditaryPredicate leaf_count_at_least(int m);
HereditaryPredicate never_holds();
HereditaryPredicate regularize(HereditaryPredicate A);
HereditaryPredicate compose(HereditaryPredicate outer, HereditaryPredicate inner);
// {"kind":"height_at_least","h":1.0}, {"kind":"compose","outer":..,"inner":..}, ...
HereditaryPredicate predicate_from_json(const std::string& text);

EdgeTree reduce(const HereditaryPredicate& A, const EdgeTree& t);

// Spot check of edge cuts against holds() at interior offsets; returns the
// number of inconsistencies found.
int check_predicate(const HereditaryPredicate& A, const EdgeTree& t, int probes_per_edge = 3);

// Minimal number of open balls of radius h covering the closed ball of radius
// r around the root.
int covering_number(double h, double r, const EdgeTree& t);
// Centers of the greedy cover (closed balls of radius h - 0, see covering.cpp).
std::vector<EdgePoint> covering_centers(double h, double r, const EdgeTree& t);
// Right-hand side of the covering sandwich: 1 + sum over the grid of Z^{(h/3)}.
int covering_upper_bound(double h, double r, const EdgeTree& t);
std::vector<double> covering_grid(double h, double r);

}  // namespace hgt
