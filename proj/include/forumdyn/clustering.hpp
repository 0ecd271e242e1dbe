// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <string>
#include <vector>

#include "forumdyn/common.hpp"

namespace forumdyn {

enum class Linkage { Single, Complete, Average };

std::string to_string(Linkage linkage);
Linkage linkage_from_string(const std::string& s);

/// Leaves are nodes 0..N-1; merge m creates node N + m.
struct Merge {
  int left = 0;
  int right = 0;
  double height = 0.0;
  int size = 0;
};

struct Dendrogram {
  int leaves = 0;
  std::vector<Merge> merges;
  std::vector<int> leaf_order;  // left-to-right leaves of the final tree
};

/// Agglomerative clustering of a symmetric distance matrix. At every step the
/// closest pair of current clusters merges; equal distances go to the
/// lexicographically smallest (node id, node id) pair. Clusters left
/// disconnected (infinite distance) are joined at infinite height.
Dendrogram agglomerate(const MatrixXd& distances, Linkage linkage = Linkage::Average);

/// Clustering of a similarity matrix with entries in (0, 1] under the
/// distance -ln(Sim).
Dendrogram cluster(const MatrixXd& similarity, Linkage linkage = Linkage::Average);

/// Flat labels after undoing the last k - 1 merges. Cluster labels are
/// numbered by their smallest leaf.
std::vector<int> cut(const Dendrogram& tree, int clusters);

/// Newick text with branch lengths equal to height differences.
std::string to_newick(const Dendrogram& tree, const std::vector<std::string>& labels);

}  // namespace forumdyn
