#pragma once

#include <random>

#include "hgtree/tree.hpp"

namespace fixtures {

// root stem 1.0, leaves 2.0 and 0.5
inline hgt::EdgeTree ytree() {
    hgt::TreeBuilder b(1.0);
    b.add(0, 2.0);
    b.add(0, 0.5);
    return b.build();
}

inline hgt::EdgeTree path(double x) { return hgt::EdgeTree::path(x); }

// Random tree whose stems are multiples of 1/denom, so all heights are exact.
inline hgt::EdgeTree random_tree(std::mt19937_64& g, int edges, int denom = 8, int max_units = 16) {
    std::uniform_int_distribution<int> units(1, max_units);
    hgt::TreeBuilder b(std::bernoulli_distribution(0.2)(g) ? 0.0 : units(g) / double(denom));
    for (int i = 1; i < edges; ++i) {
        int p = std::uniform_int_distribution<int>(0, b.size() - 1)(g);
        b.add(p, units(g) / double(denom));
    }
    return b.build();
}

}  // namespace fixtures
