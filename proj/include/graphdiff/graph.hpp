#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "graphdiff/rng.hpp"

namespace graphdiff {

/// Undirected attributed graph with categorical node and edge classes.
///
/// Node i carries a class in [0, a); the unordered pair {i, j} carries a
/// class in [0, b) where class 0 means "no edge". Classes are stored as
/// indices, so the one-hot invariants (rows sum to 1, symmetric edge tensor,
/// diagonal fixed to "no edge") hold by construction. The dense one-hot
/// encodings consumed by the denoiser are materialized on demand.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph from class labels. labels_e is a row-major n*n matrix;
  /// it must be symmetric with a zero diagonal and all indices in range.
  static Graph encode(const std::vector<int>& labels_x,
                      const std::vector<int>& labels_e, int a, int b);

  /// Empty graph (all nodes class 0, no edges).
  static Graph empty(int n, int a, int b);

  int n() const { return n_; }
  int num_node_classes() const { return a_; }
  int num_edge_classes() const { return b_; }

  int node_class(int i) const { return x_[i]; }
  int edge_class(int i, int j) const { return e_[static_cast<std::size_t>(i) * n_ + j]; }

  void set_node_class(int i, int c);
  /// Sets both (i,j) and (j,i); rejects i == j for a nonzero class.
  void set_edge_class(int i, int j, int c);

  const std::vector<int>& node_classes() const { return x_; }
  const std::vector<int>& edge_classes() const { return e_; }

  /// Row-major n*a one-hot node matrix.
  std::vector<double> onehot_x() const;
  /// Row-major (n*n)*b one-hot edge tensor, slice (i,j) at row i*n+j.
  std::vector<double> onehot_e() const;

  /// Binarized adjacency: 1 where the edge class is nonzero.
  std::vector<std::uint8_t> adjacency() const;
  std::vector<int> degrees() const;
  int num_edges() const;

  /// Relabels nodes: node i of the result is node perm[i]... see permute().
  Graph permuted(const std::vector<int>& perm) const;

  bool operator==(const Graph& other) const = default;

 private:
  int n_ = 0, a_ = 1, b_ = 2;
  std::vector<int> x_;  // n node class indices
  std::vector<int> e_;  // n*n edge class indices, symmetric, zero diagonal
};

/// Action of a permutation pi on a graph: node pi(i) of the result carries
/// the attributes of node i, i.e. (pi.X)_{pi(i)} = X_i and
/// (pi.E)_{pi(i) pi(j)} = E_{ij}. Throws if perm is not a bijection.
Graph permute(const Graph& g, const std::vector<int>& perm);

std::vector<int> inverse_permutation(const std::vector<int>& perm);

/// Dense categorical distributions with the shape of a Graph: each node row
/// is a distribution over a classes, each edge slice over b classes.
/// Used for denoiser outputs and reverse-step distributions.
class SoftGraph {
 public:
  SoftGraph() = default;
  SoftGraph(int n, int a, int b);

  int n() const { return n_; }
  int num_node_classes() const { return a_; }
  int num_edge_classes() const { return b_; }

  double* node_row(int i) { return px_.data() + static_cast<std::size_t>(i) * a_; }
  const double* node_row(int i) const { return px_.data() + static_cast<std::size_t>(i) * a_; }
  double* edge_slice(int i, int j) {
    return pe_.data() + (static_cast<std::size_t>(i) * n_ + j) * b_;
  }
  const double* edge_slice(int i, int j) const {
    return pe_.data() + (static_cast<std::size_t>(i) * n_ + j) * b_;
  }

  std::vector<double>& node_probs() { return px_; }
  std::vector<double>& edge_probs() { return pe_; }
  const std::vector<double>& node_probs() const { return px_; }
  const std::vector<double>& edge_probs() const { return pe_; }

  /// One-hot SoftGraph equal to g.
  static SoftGraph from_graph(const Graph& g);

  /// Checks normalization (within tol) and edge symmetry; throws on failure.
  void validate(double tol = 1e-9) const;

  /// Samples a hard Graph: each node from its row, each edge (i<j) from its
  /// slice mirrored to (j,i); the diagonal is forced to "no edge".
  Graph collapse(RngStream& rng) const;

  /// Argmax decode (ties resolved to the lowest class index).
  Graph argmax() const;

 private:
  int n_ = 0, a_ = 1, b_ = 2;
  std::vector<double> px_;  // n*a
  std::vector<double> pe_;  // n*n*b
};

/// Empirical node/edge class marginals and the node-count histogram of a
/// dataset. Edge marginals count each unordered off-diagonal pair once.
struct DatasetStats {
  std::vector<double> m_x;            // length a, sums to 1
  std::vector<double> m_e;            // length b, sums to 1
  std::map<int, double> node_count_hist;

  int sample_n(RngStream& rng) const;
  double log_p_n(int n) const;  // -inf when n is absent from the histogram
};

/// Pooled marginals over a nonempty dataset with consistent (a, b).
/// Graphs with n == 1 contribute no edge pairs; a dataset with zero pairs
/// gets m_e = one-hot "no edge".
DatasetStats compute_stats(const std::vector<Graph>& graphs);

}  // namespace graphdiff
