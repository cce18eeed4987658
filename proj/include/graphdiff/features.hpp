#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "graphdiff/graph.hpp"

namespace graphdiff {

struct FeatureFlags {
  bool cycles = false;
  bool spectral = false;
  bool molecular = false;

  static FeatureFlags parse(const std::string& preset);  // none|cycles|spectral|molecular|all
  std::string to_string() const;
  int node_dim() const { return (cycles ? 3 : 0) + (spectral ? 3 : 0) + (molecular ? 1 : 0); }
  int graph_dim() const {
    return (cycles ? 4 : 0) + (spectral ? 6 : 0) + (molecular ? 1 : 0) + 1;  // + t/T
  }
};

/// Closed-form cycle counts from adjacency matrix powers, exact in int64.
/// x3/x4/x5: per node, number of k-cycles through the node.
/// y3..y6: number of k-cycles in the graph.
struct CycleFeatures {
  std::vector<std::int64_t> x3, x4, x5;
  std::int64_t y3 = 0, y4 = 0, y5 = 0, y6 = 0;
};

/// A is a row-major n*n 0/1 adjacency matrix; must be symmetric with a zero
/// diagonal (throws otherwise).
CycleFeatures cycle_features(const std::vector<std::uint8_t>& adjacency, int n);

/// Laplacian-based features. Eigenvalues below 1e-6 (relative to the largest)
/// count as zero; the 5 smallest nonzero eigenvalues are zero-padded when the
/// graph is too small. Eigenvectors are sign-fixed (largest-|entry| positive,
/// ties to the lowest index); degenerate eigenspaces make them only
/// approximately permutation-equivariant, which is documented in the README.
struct SpectralFeatures {
  int component_count = 0;
  std::vector<double> nonzero_eigenvalues;   // exactly 5, zero-padded
  std::vector<double> in_biggest_component;  // n, 0/1 (ties: all maximal components marked)
  std::vector<double> eigvec1, eigvec2;      // n each, zero when absent
};

SpectralFeatures spectral_features(const std::vector<std::uint8_t>& adjacency, int n);

/// Atom metadata for molecule-style graphs: node class -> symbol/valence/
/// weight, edge class -> bond order.
struct MolTables {
  std::vector<std::string> atom_symbols;  // per node class
  std::vector<int> valences;              // per node class
  std::vector<double> atom_weights;       // per node class
  std::vector<int> bond_orders;           // per edge class, [0] = 0

  /// {C, N, O, F} with bond orders none/single/double/triple.
  static MolTables default_organic();
  /// Same plus H (valence 1), for tests with explicit hydrogens.
  static MolTables organic_with_h();
};

struct MolecularFeatures {
  std::vector<double> valency;  // per node, sum of incident bond orders
  double molecular_weight = 0.0;
};

MolecularFeatures molecular_features(const Graph& g, const MolTables& tables);

/// Concatenated auxiliary features handed to the denoiser. Column order is
/// fixed: node features = [x3, x4, x5 | biggest-comp, evec1, evec2 | valency],
/// graph features = [y3, y4, y5, y6 | comp-count, lambda1..lambda5 | mol-weight | t/T],
/// with absent families skipped. t/T is always the last graph feature.
struct FeatureBundle {
  int n = 0;
  int node_dim = 0;
  int graph_dim = 0;
  std::vector<double> node_feats;   // n x node_dim, row-major
  std::vector<double> graph_feats;  // graph_dim
};

FeatureBundle assemble_features(const Graph& g, int t, int T, const FeatureFlags& flags,
                                const MolTables* tables = nullptr);

/// Continuous-input variant for the Gaussian baseline: no structural features
/// are defined on dense real tensors, so only molecular-free families are
/// skipped and the bundle carries just t/T (plus zeros for configured
/// families, keeping the network input width fixed).
FeatureBundle assemble_features_continuous(int n, int t, int T, const FeatureFlags& flags);

}  // namespace graphdiff
