#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hgt {

class TreeError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Address of a point: child indices from the root, then an offset along the
// addressed vertex's stem.
struct TreePoint {
    std::vector<int> path;
    double offset = 0.0;
};

// Finite rooted tree with edge lengths. Node 0 is the root; nodes are stored
// breadth first so that the children of a node are contiguous and every child
// has a larger index than its parent.
class EdgeTree {
  public:
    EdgeTree();  // point tree

    static EdgeTree point() { return EdgeTree(); }
    static EdgeTree path(double length);
    // parent[0] must be -1; any other node order is accepted and re-laid out.
    // Sibling order follows increasing input index.
    static EdgeTree from_parents(const std::vector<int>& parent, const std::vector<double>& stem);

    int size() const { return static_cast<int>(stem_.size()); }
    double stem(int v) const { return stem_[v]; }
    double death(int v) const { return death_[v]; }
    double birth(int v) const { return v == 0 ? 0.0 : death_[parent_[v]]; }
    int parent(int v) const { return parent_[v]; }
    int num_children(int v) const { return nchild_[v]; }
    int child(int v, int i) const { return first_[v] + i; }
    int depth(int v) const { return depth_[v]; }
    bool is_leaf(int v) const { return nchild_[v] == 0; }

    // true iff u is an ancestor of v or u == v
    bool is_ancestor(int u, int v) const { return tin_[u] <= tin_[v] && tout_[v] <= tout_[u]; }
    int lca(int u, int v) const;

    const std::vector<double>& stems() const { return stem_; }
    const std::vector<int>& parents() const { return parent_; }

    // max death height in the subtree of each vertex
    std::vector<double> subtree_heights() const;

    bool operator==(const EdgeTree& o) const {
        return stem_ == o.stem_ && parent_ == o.parent_;
    }

  private:
    void finish();

    std::vector<double> stem_;
    std::vector<int> parent_;
    std::vector<int> first_;
    std::vector<int> nchild_;
    std::vector<double> death_;
    std::vector<int> depth_;
    std::vector<int> tin_, tout_;
};

// Incremental construction; build() re-lays the nodes out breadth first.
class TreeBuilder {
  public:
    explicit TreeBuilder(double root_stem = 0.0) { parent_.push_back(-1), stem_.push_back(root_stem); }
    int add(int parent, double stem) {
        parent_.push_back(parent);
        stem_.push_back(stem);
        return static_cast<int>(stem_.size()) - 1;
    }
    void set_stem(int v, double s) { stem_[v] = s; }
    int size() const { return static_cast<int>(stem_.size()); }
    EdgeTree build() const { return EdgeTree::from_parents(parent_, stem_); }

  private:
    std::vector<int> parent_;
    std::vector<double> stem_;
};

// Resolved point: vertex and absolute height on its edge.
struct EdgePoint {
    int v = 0;
    double y = 0.0;
};

struct FirstBranch {
    double D = std::numeric_limits<double>::infinity();
    bool infinite = true;
    int k = 0;
    EdgeTree theta;
};

double total_height(const EdgeTree& t);
double total_length(const EdgeTree& t);
int leaf_count(const EdgeTree& t);

EdgePoint resolve(const EdgeTree& t, const TreePoint& p);
TreePoint address(const EdgeTree& t, const EdgePoint& p);
double point_height(const EdgeTree& t, const TreePoint& p);
// distance between points given as (vertex, absolute height)
double edge_distance(const EdgeTree& t, EdgePoint p, EdgePoint q);
double point_distance(const EdgeTree& t, const TreePoint& p, const TreePoint& q);

// Tree of descendants of the point at height y on edge v, rooted there.
EdgeTree subtree_above(const EdgeTree& t, int v, double y);

EdgeTree graft(const std::vector<EdgeTree>& parts);
std::vector<EdgeTree> split_measure(double a, const EdgeTree& t);
int right_profile(double a, const EdgeTree& t);
// birth < a <= death, with the a = 0 value taken from the right profile
int left_profile(double a, const EdgeTree& t);
EdgeTree above(double a, const EdgeTree& t);
EdgeTree below(double a, const EdgeTree& t);
FirstBranch first_branch(const EdgeTree& t);
EdgeTree scale(double c, const EdgeTree& t);

// Contract zero-length non-root edges and merge unary chains.
EdgeTree normalize(const EdgeTree& t);
EdgeTree canonicalize(const EdgeTree& t);
// tol > 0 compares stems after rounding them to multiples of tol
bool iso_equal(const EdgeTree& a, const EdgeTree& b, double tol = 0.0);

}  // namespace hgt
