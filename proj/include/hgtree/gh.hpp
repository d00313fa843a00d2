#pragma once

#include <vector>

#include "hgtree/tree.hpp"

namespace hgt {

// A piece of a correspondence: the point of t1 at height p1.y + s1*x on edge
// p1.v is paired with the point of t2 at height p2.y + s2*x on edge p2.v, for
// x in [0, len]. Slopes are 0 (a fixed point) or 1.
struct CorrespondencePiece {
    EdgePoint p1;
    int s1 = 1;
    EdgePoint p2;
    int s2 = 1;
    double len = 0.0;
};

struct CorrespondenceWitness {
    std::vector<CorrespondencePiece> pieces;
    double distortion = 0.0;
    // the trees the pieces refer to (normalized inputs)
    EdgeTree t1, t2;
};

struct GhUpper {
    double bound = 0.0;
    CorrespondenceWitness witness;
};

struct Enclosure {
    double lo = 0.0;
    double hi = 0.0;
};

// Exact distortion of a piecewise-affine correspondence.
double correspondence_distortion(const EdgeTree& t1, const EdgeTree& t2,
                                 const std::vector<CorrespondencePiece>& pieces);

GhUpper gh_upper(const EdgeTree& t1, const EdgeTree& t2);
double gh_lower(const EdgeTree& t1, const EdgeTree& t2);
Enclosure gh_exact_tiny(const EdgeTree& t1, const EdgeTree& t2, double eps, int max_net = 8);
Enclosure delta_series(const EdgeTree& t1, const EdgeTree& t2);

}  // namespace hgt
