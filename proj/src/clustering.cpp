// Apache License, Version 2.0, refer to LICENSE.txt

#include "forumdyn/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace forumdyn {

std::string to_string(Linkage linkage) {
  switch (linkage) {
    case Linkage::Single: return "single";
    case Linkage::Complete: return "complete";
    case Linkage::Average: return "average";
  }
  return "average";
}

Linkage linkage_from_string(const std::string& s) {
  if (s == "single") return Linkage::Single;
  if (s == "complete") return Linkage::Complete;
  if (s == "average") return Linkage::Average;
  throw Error("unknown linkage: " + s);
}

Dendrogram agglomerate(const MatrixXd& distances, Linkage linkage) {
  const auto n = static_cast<int>(distances.rows());
  if (n < 1 || distances.cols() != n) throw Error("agglomerate: need a non-empty square matrix");
  Dendrogram tree;
  tree.leaves = n;
  const int total = 2 * n - 1;
  MatrixXd d = MatrixXd::Constant(total, total, std::numeric_limits<double>::infinity());
  d.topLeftCorner(n, n) = distances;
  std::vector<int> active(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) active[static_cast<std::size_t>(i)] = i;
  std::vector<int> size(static_cast<std::size_t>(total), 1);

  for (int m = 0; m + 1 < n; ++m) {
    // `active` stays sorted, so the first strict minimum in row-major order
    // is the lexicographically smallest tied pair.
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 1;
    bool found = false;
    for (std::size_t a = 0; a < active.size(); ++a)
      for (std::size_t b = a + 1; b < active.size(); ++b) {
        const double v = d(active[a], active[b]);
        if (!found || v < best) {
          best = v;
          bi = a;
          bj = b;
          found = true;
        }
      }
    const int left = active[bi], right = active[bj];
    const int node = n + m;
    size[static_cast<std::size_t>(node)] = size[static_cast<std::size_t>(left)] + size[static_cast<std::size_t>(right)];
    tree.merges.push_back({left, right, best, size[static_cast<std::size_t>(node)]});
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bj));
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bi));
    for (int k : active) {
      const double dl = d(left, k), dr = d(right, k);
      double v = 0.0;
      switch (linkage) {
        case Linkage::Single: v = std::min(dl, dr); break;
        case Linkage::Complete: v = std::max(dl, dr); break;
        case Linkage::Average: {
          const double sl = size[static_cast<std::size_t>(left)], sr = size[static_cast<std::size_t>(right)];
          v = (sl * dl + sr * dr) / (sl + sr);
          if (std::isnan(v)) v = std::numeric_limits<double>::infinity();
          break;
        }
      }
      d(node, k) = d(k, node) = v;
    }
    active.push_back(node);
  }

  // In-order traversal from the root, left child first.
  std::vector<int> stack{total - 1};
  while (!stack.empty()) {
    const int node = stack.back();
    stack.pop_back();
    if (node < n) {
      tree.leaf_order.push_back(node);
      continue;
    }
    const auto& mg = tree.merges[static_cast<std::size_t>(node - n)];
    stack.push_back(mg.right);
    stack.push_back(mg.left);
  }
  return tree;
}

Dendrogram cluster(const MatrixXd& similarity, Linkage linkage) {
  MatrixXd dist = -similarity.array().log();
  dist = 0.5 * (dist + dist.transpose());
  dist.diagonal().setZero();
  dist = dist.cwiseMax(0.0);
  return agglomerate(dist, linkage);
}

std::vector<int> cut(const Dendrogram& tree, int clusters) {
  const int n = tree.leaves;
  clusters = std::clamp(clusters, 1, std::max(n, 1));
  std::vector<int> parent(static_cast<std::size_t>(2 * n - 1));
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };
  const int applied = n - clusters;
  for (int m = 0; m < applied; ++m) {
    const auto& mg = tree.merges[static_cast<std::size_t>(m)];
    parent[static_cast<std::size_t>(find(mg.left))] = n + m;
    parent[static_cast<std::size_t>(find(mg.right))] = n + m;
  }
  std::map<int, int> label_of_root;
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    auto [it, inserted] = label_of_root.emplace(r, static_cast<int>(label_of_root.size()));
    labels[static_cast<std::size_t>(i)] = it->second;
  }
  return labels;
}

namespace {

// Quotes labels that contain Newick metacharacters; embedded quotes are doubled.
std::string newick_label(const std::string& s) {
  if (!s.empty() && s.find_first_of(" \t()[]':;,") == std::string::npos) return s;
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

}  // namespace

std::string to_newick(const Dendrogram& tree, const std::vector<std::string>& labels) {
  const int n = tree.leaves;
  auto height = [&](int node) { return node < n ? 0.0 : tree.merges[static_cast<std::size_t>(node - n)].height; };
  std::ostringstream os;
  os.precision(17);
  auto emit = [&](auto&& self, int node, double parent_height) -> void {
    if (node < n) {
      os << newick_label(static_cast<std::size_t>(node) < labels.size() ? labels[static_cast<std::size_t>(node)]
                                                                         : std::to_string(node));
    } else {
      const auto& mg = tree.merges[static_cast<std::size_t>(node - n)];
      os << '(';
      self(self, mg.left, mg.height);
      os << ',';
      self(self, mg.right, mg.height);
      os << ')';
    }
    if (parent_height >= 0.0) os << ':' << (parent_height - height(node));
  };
  emit(emit, 2 * n - 2, -1.0);
  os << ';';
  return os.str();
}

}  // namespace forumdyn
