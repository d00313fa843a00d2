#pragma once

#include <string>

#include "hgtree/tree.hpp"

namespace hgt {

std::string to_json(const EdgeTree& t, int indent = -1);
EdgeTree tree_from_json(const std::string& text);

std::string to_newick(const EdgeTree& t);
EdgeTree tree_from_newick(const std::string& text);

// reads JSON or Newick depending on the first non-blank character
EdgeTree load_tree(const std::string& path);
void save_tree(const std::string& path, const EdgeTree& t);

}  // namespace hgt
