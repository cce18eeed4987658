#include "graphdiff/features.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace graphdiff {

FeatureFlags FeatureFlags::parse(const std::string& preset) {
  FeatureFlags f;
  if (preset == "none") return f;
  if (preset == "cycles") {
    f.cycles = true;
  } else if (preset == "spectral") {
    f.spectral = true;
  } else if (preset == "molecular") {
    f.molecular = true;
  } else if (preset == "all") {
    f.cycles = f.spectral = f.molecular = true;
  } else {
    throw std::invalid_argument("unknown feature preset: " + preset);
  }
  return f;
}

std::string FeatureFlags::to_string() const {
  if (cycles && spectral && molecular) return "all";
  if (cycles && !spectral && !molecular) return "cycles";
  if (!cycles && spectral && !molecular) return "spectral";
  if (!cycles && !spectral && molecular) return "molecular";
  if (!cycles && !spectral && !molecular) return "none";
  std::string s;
  if (cycles) s += "cycles+";
  if (spectral) s += "spectral+";
  if (molecular) s += "molecular+";
  s.pop_back();
  return s;
}

namespace {

using IMat = std::vector<std::int64_t>;

IMat imatmul(const IMat& a, const IMat& b, int n) {
  IMat out(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const std::int64_t v = a[static_cast<std::size_t>(i) * n + k];
      if (v == 0) continue;
      for (int j = 0; j < n; ++j)
        out[static_cast<std::size_t>(i) * n + j] += v * b[static_cast<std::size_t>(k) * n + j];
    }
  return out;
}

void check_adjacency(const std::vector<std::uint8_t>& adj, int n, const char* who) {
  if (adj.size() != static_cast<std::size_t>(n) * n)
    throw std::invalid_argument(std::string(who) + ": adjacency size mismatch");
  for (int i = 0; i < n; ++i) {
    if (adj[static_cast<std::size_t>(i) * n + i] != 0)
      throw std::invalid_argument(std::string(who) + ": adjacency has a self-loop");
    for (int j = 0; j < n; ++j)
      if (adj[static_cast<std::size_t>(i) * n + j] != adj[static_cast<std::size_t>(j) * n + i])
        throw std::invalid_argument(std::string(who) + ": adjacency not symmetric");
  }
}

}  // namespace

CycleFeatures cycle_features(const std::vector<std::uint8_t>& adjacency, int n) {
  check_adjacency(adjacency, n, "cycle_features");
  IMat a(static_cast<std::size_t>(n) * n);
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = adjacency[k];
  const IMat a2 = imatmul(a, a, n);
  const IMat a3 = imatmul(a2, a, n);
  const IMat a4 = imatmul(a3, a, n);
  const IMat a5 = imatmul(a4, a, n);
  const IMat a6 = imatmul(a3, a3, n);

  auto diag = [n](const IMat& m, int i) { return m[static_cast<std::size_t>(i) * n + i]; };

  CycleFeatures f;
  f.x3.resize(n);
  f.x4.resize(n);
  f.x5.resize(n);
  std::vector<std::int64_t> deg(n), tri(n);
  for (int i = 0; i < n; ++i) {
    deg[i] = diag(a2, i);
    tri[i] = diag(a3, i);
  }

  for (int i = 0; i < n; ++i) {
    f.x3[i] = tri[i] / 2;

    std::int64_t ad = 0;  // (A d)_i
    for (int j = 0; j < n; ++j) ad += a[static_cast<std::size_t>(i) * n + j] * deg[j];
    f.x4[i] = (diag(a4, i) - deg[i] * (deg[i] - 1) - ad) / 2;

    // Corrected per-node 5-cycle count; the A^3-diagonal "spikes" attached to
    // triangles require the extra (A o A^2) d term.
    std::int64_t at = 0;   // (A t)_i with t = diag(A^3)
    std::int64_t aa2d = 0; // sum_j A_ij (A^2)_ij d_j
    for (int j = 0; j < n; ++j) {
      const std::int64_t aij = a[static_cast<std::size_t>(i) * n + j];
      at += aij * tri[j];
      aa2d += aij * a2[static_cast<std::size_t>(i) * n + j] * deg[j];
    }
    f.x5[i] = (diag(a5, i) - 2 * tri[i] * deg[i] - at + 5 * tri[i] - 2 * aa2d) / 2;
  }

  std::int64_t sx3 = 0, sx4 = 0, sx5 = 0;
  for (int i = 0; i < n; ++i) {
    sx3 += f.x3[i];
    sx4 += f.x4[i];
    sx5 += f.x5[i];
  }
  f.y3 = sx3 / 3;
  f.y4 = sx4 / 4;
  f.y5 = sx5 / 5;

  // 6-cycle count from walk statistics.
  std::int64_t tr_a6 = 0, tr_a4 = 0, tr_a3 = 0, tr_a2 = 0;
  std::int64_t tri_sq = 0, d2 = 0, d3 = 0, d_diag_a4 = 0;
  std::int64_t a_a2sq = 0, sum_a3 = 0;
  for (int i = 0; i < n; ++i) {
    tr_a6 += diag(a6, i);
    tr_a4 += diag(a4, i);
    tr_a3 += tri[i];
    tr_a2 += deg[i];
    tri_sq += tri[i] * tri[i];
    d2 += deg[i] * deg[i];
    d3 += deg[i] * deg[i] * deg[i];
    d_diag_a4 += deg[i] * diag(a4, i);
    for (int j = 0; j < n; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * n + j;
      a_a2sq += a[idx] * a2[idx] * a2[idx];
      sum_a3 += a3[idx];
    }
  }
  f.y6 = (tr_a6 - 3 * tri_sq + 9 * a_a2sq - 6 * d_diag_a4 + 6 * tr_a4 - 4 * tr_a3 + 4 * d3 +
          3 * sum_a3 - 12 * d2 + 4 * tr_a2) /
         12;
  return f;
}

SpectralFeatures spectral_features(const std::vector<std::uint8_t>& adjacency, int n) {
  check_adjacency(adjacency, n, "spectral_features");
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double deg = 0.0;
    for (int j = 0; j < n; ++j) {
      const double v = adjacency[static_cast<std::size_t>(i) * n + j];
      deg += v;
      lap(i, j) = -v;
    }
    lap(i, i) = deg;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("spectral_features: eigendecomposition failed (n=" +
                             std::to_string(n) + ")");
  const Eigen::VectorXd evals = solver.eigenvalues();
  const Eigen::MatrixXd evecs = solver.eigenvectors();

  const double max_eval = std::max(std::abs(evals(n - 1)), 1.0);
  const double zero_tol = 1e-6 * max_eval;

  SpectralFeatures out;
  out.nonzero_eigenvalues.assign(5, 0.0);
  out.eigvec1.assign(n, 0.0);
  out.eigvec2.assign(n, 0.0);

  std::vector<int> nonzero_idx;
  for (int k = 0; k < n; ++k) {
    if (std::abs(evals(k)) <= zero_tol)
      ++out.component_count;
    else
      nonzero_idx.push_back(k);
  }
  for (std::size_t k = 0; k < nonzero_idx.size() && k < 5; ++k)
    out.nonzero_eigenvalues[k] = evals(nonzero_idx[k]);

  auto sign_fixed = [&](int col, std::vector<double>& dst) {
    int best = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(evecs(i, col)) > std::abs(evecs(best, col))) best = i;
    const double s = evecs(best, col) < 0.0 ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i) dst[i] = s * evecs(i, col);
  };
  if (!nonzero_idx.empty()) sign_fixed(nonzero_idx[0], out.eigvec1);
  if (nonzero_idx.size() > 1) sign_fixed(nonzero_idx[1], out.eigvec2);

  // Biggest-component membership from exact connectivity; a size tie marks
  // every maximal component so the feature stays permutation-equivariant.
  std::vector<int> comp(n, -1);
  std::vector<int> comp_size;
  for (int start = 0; start < n; ++start) {
    if (comp[start] >= 0) continue;
    const int c = static_cast<int>(comp_size.size());
    comp_size.push_back(0);
    std::vector<int> stack{start};
    comp[start] = c;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      ++comp_size[c];
      for (int v = 0; v < n; ++v)
        if (adjacency[static_cast<std::size_t>(u) * n + v] && comp[v] < 0) {
          comp[v] = c;
          stack.push_back(v);
        }
    }
  }
  const int biggest = *std::max_element(comp_size.begin(), comp_size.end());
  out.in_biggest_component.assign(n, 0.0);
  for (int i = 0; i < n; ++i)
    if (comp_size[comp[i]] == biggest) out.in_biggest_component[i] = 1.0;
  return out;
}

MolTables MolTables::default_organic() {
  MolTables t;
  t.atom_symbols = {"C", "N", "O", "F"};
  t.valences = {4, 3, 2, 1};
  t.atom_weights = {12.011, 14.007, 15.999, 18.998};
  t.bond_orders = {0, 1, 2, 3};
  return t;
}

MolTables MolTables::organic_with_h() {
  MolTables t = default_organic();
  t.atom_symbols.push_back("H");
  t.valences.push_back(1);
  t.atom_weights.push_back(1.008);
  return t;
}

MolecularFeatures molecular_features(const Graph& g, const MolTables& tables) {
  const int n = g.n();
  if (g.num_node_classes() > static_cast<int>(tables.valences.size()))
    throw std::invalid_argument("molecular_features: node class without an atom table entry");
  if (g.num_edge_classes() > static_cast<int>(tables.bond_orders.size()))
    throw std::invalid_argument("molecular_features: edge class without a bond order");
  MolecularFeatures f;
  f.valency.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    f.molecular_weight += tables.atom_weights[g.node_class(i)];
    for (int j = 0; j < n; ++j)
      if (j != i) f.valency[i] += tables.bond_orders[g.edge_class(i, j)];
  }
  return f;
}

FeatureBundle assemble_features(const Graph& g, int t, int T, const FeatureFlags& flags,
                                const MolTables* tables) {
  const int n = g.n();
  FeatureBundle fb;
  fb.n = n;
  fb.node_dim = flags.node_dim();
  fb.graph_dim = flags.graph_dim();
  fb.node_feats.assign(static_cast<std::size_t>(n) * fb.node_dim, 0.0);
  fb.graph_feats.reserve(fb.graph_dim);

  int col = 0;
  auto put_node = [&](int c, int i, double v) {
    fb.node_feats[static_cast<std::size_t>(i) * fb.node_dim + c] = v;
  };

  if (flags.cycles) {
    const CycleFeatures cf = cycle_features(g.adjacency(), n);
    for (int i = 0; i < n; ++i) {
      put_node(col + 0, i, static_cast<double>(cf.x3[i]));
      put_node(col + 1, i, static_cast<double>(cf.x4[i]));
      put_node(col + 2, i, static_cast<double>(cf.x5[i]));
    }
    col += 3;
    fb.graph_feats.push_back(static_cast<double>(cf.y3));
    fb.graph_feats.push_back(static_cast<double>(cf.y4));
    fb.graph_feats.push_back(static_cast<double>(cf.y5));
    fb.graph_feats.push_back(static_cast<double>(cf.y6));
  }
  if (flags.spectral) {
    const SpectralFeatures sf = spectral_features(g.adjacency(), n);
    for (int i = 0; i < n; ++i) {
      put_node(col + 0, i, sf.in_biggest_component[i]);
      put_node(col + 1, i, sf.eigvec1[i]);
      put_node(col + 2, i, sf.eigvec2[i]);
    }
    col += 3;
    fb.graph_feats.push_back(static_cast<double>(sf.component_count));
    for (double v : sf.nonzero_eigenvalues) fb.graph_feats.push_back(v);
  }
  if (flags.molecular) {
    const MolTables defaults = MolTables::default_organic();
    const MolecularFeatures mf = molecular_features(g, tables ? *tables : defaults);
    for (int i = 0; i < n; ++i) put_node(col, i, mf.valency[i]);
    col += 1;
    fb.graph_feats.push_back(mf.molecular_weight);
  }
  fb.graph_feats.push_back(static_cast<double>(t) / static_cast<double>(T));
  return fb;
}

FeatureBundle assemble_features_continuous(int n, int t, int T, const FeatureFlags& flags) {
  FeatureBundle fb;
  fb.n = n;
  fb.node_dim = flags.node_dim();
  fb.graph_dim = flags.graph_dim();
  fb.node_feats.assign(static_cast<std::size_t>(n) * fb.node_dim, 0.0);
  fb.graph_feats.assign(fb.graph_dim, 0.0);
  fb.graph_feats.back() = static_cast<double>(t) / static_cast<double>(T);
  return fb;
}

}  // namespace graphdiff
