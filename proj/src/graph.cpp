#include "graphdiff/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace graphdiff {

Graph Graph::encode(const std::vector<int>& labels_x,
                    const std::vector<int>& labels_e, int a, int b) {
  const int n = static_cast<int>(labels_x.size());
  if (n <= 0) throw std::invalid_argument("encode_graph: empty node list");
  if (a < 1 || b < 1) throw std::invalid_argument("encode_graph: class counts must be >= 1");
  if (labels_e.size() != static_cast<std::size_t>(n) * n)
    throw std::invalid_argument("encode_graph: labels_e must be n*n");

  Graph g;
  g.n_ = n;
  g.a_ = a;
  g.b_ = b;
  g.x_ = labels_x;
  g.e_ = labels_e;
  for (int i = 0; i < n; ++i) {
    if (labels_x[i] < 0 || labels_x[i] >= a)
      throw std::invalid_argument("encode_graph: node class out of range at node " +
                                  std::to_string(i));
  }
  for (int i = 0; i < n; ++i) {
    if (labels_e[static_cast<std::size_t>(i) * n + i] != 0)
      throw std::invalid_argument("encode_graph: diagonal must be the no-edge class");
    for (int j = 0; j < n; ++j) {
      const int c = labels_e[static_cast<std::size_t>(i) * n + j];
      if (c < 0 || c >= b)
        throw std::invalid_argument("encode_graph: edge class out of range at (" +
                                    std::to_string(i) + "," + std::to_string(j) + ")");
      if (c != labels_e[static_cast<std::size_t>(j) * n + i])
        throw std::invalid_argument("encode_graph: labels_e not symmetric at (" +
                                    std::to_string(i) + "," + std::to_string(j) + ")");
    }
  }
  return g;
}

Graph Graph::empty(int n, int a, int b) {
  return encode(std::vector<int>(n, 0), std::vector<int>(static_cast<std::size_t>(n) * n, 0),
                a, b);
}

void Graph::set_node_class(int i, int c) {
  if (c < 0 || c >= a_) throw std::invalid_argument("set_node_class: class out of range");
  x_[i] = c;
}

void Graph::set_edge_class(int i, int j, int c) {
  if (c < 0 || c >= b_) throw std::invalid_argument("set_edge_class: class out of range");
  if (i == j) {
    if (c != 0) throw std::invalid_argument("set_edge_class: self-loops are not representable");
    return;
  }
  e_[static_cast<std::size_t>(i) * n_ + j] = c;
  e_[static_cast<std::size_t>(j) * n_ + i] = c;
}

std::vector<double> Graph::onehot_x() const {
  std::vector<double> out(static_cast<std::size_t>(n_) * a_, 0.0);
  for (int i = 0; i < n_; ++i) out[static_cast<std::size_t>(i) * a_ + x_[i]] = 1.0;
  return out;
}

std::vector<double> Graph::onehot_e() const {
  std::vector<double> out(static_cast<std::size_t>(n_) * n_ * b_, 0.0);
  for (std::size_t r = 0; r < static_cast<std::size_t>(n_) * n_; ++r)
    out[r * b_ + e_[r]] = 1.0;
  return out;
}

std::vector<std::uint8_t> Graph::adjacency() const {
  std::vector<std::uint8_t> adj(static_cast<std::size_t>(n_) * n_, 0);
  for (std::size_t r = 0; r < adj.size(); ++r) adj[r] = e_[r] != 0 ? 1 : 0;
  return adj;
}

std::vector<int> Graph::degrees() const {
  std::vector<int> d(n_, 0);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if (edge_class(i, j) != 0) ++d[i];
  return d;
}

int Graph::num_edges() const {
  int m = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if (edge_class(i, j) != 0) ++m;
  return m;
}

Graph Graph::permuted(const std::vector<int>& perm) const { return permute(*this, perm); }

std::vector<int> inverse_permutation(const std::vector<int>& perm) {
  std::vector<int> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = static_cast<int>(i);
  return inv;
}

Graph permute(const Graph& g, const std::vector<int>& perm) {
  const int n = g.n();
  if (static_cast<int>(perm.size()) != n)
    throw std::invalid_argument("permute: permutation size mismatch");
  std::vector<char> seen(n, 0);
  for (int p : perm) {
    if (p < 0 || p >= n || seen[p]) throw std::invalid_argument("permute: not a bijection");
    seen[p] = 1;
  }
  std::vector<int> x(n);
  std::vector<int> e(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) x[perm[i]] = g.node_class(i);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      e[static_cast<std::size_t>(perm[i]) * n + perm[j]] = g.edge_class(i, j);
  return Graph::encode(x, e, g.num_node_classes(), g.num_edge_classes());
}

SoftGraph::SoftGraph(int n, int a, int b)
    : n_(n), a_(a), b_(b),
      px_(static_cast<std::size_t>(n) * a, 0.0),
      pe_(static_cast<std::size_t>(n) * n * b, 0.0) {}

SoftGraph SoftGraph::from_graph(const Graph& g) {
  SoftGraph s(g.n(), g.num_node_classes(), g.num_edge_classes());
  s.px_ = g.onehot_x();
  s.pe_ = g.onehot_e();
  return s;
}

void SoftGraph::validate(double tol) const {
  for (int i = 0; i < n_; ++i) {
    double sum = 0.0;
    for (int c = 0; c < a_; ++c) {
      const double p = node_row(i)[c];
      if (p < -tol || !std::isfinite(p))
        throw std::runtime_error("SoftGraph: invalid node probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > tol)
      throw std::runtime_error("SoftGraph: node row " + std::to_string(i) +
                               " not normalized (sum=" + std::to_string(sum) + ")");
  }
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      double sum = 0.0;
      for (int c = 0; c < b_; ++c) {
        const double p = edge_slice(i, j)[c];
        if (p < -tol || !std::isfinite(p))
          throw std::runtime_error("SoftGraph: invalid edge probability");
        if (std::abs(p - edge_slice(j, i)[c]) > tol)
          throw std::runtime_error("SoftGraph: edge tensor not symmetric");
        sum += p;
      }
      if (std::abs(sum - 1.0) > tol)
        throw std::runtime_error("SoftGraph: edge slice not normalized");
    }
  }
}

Graph SoftGraph::collapse(RngStream& rng) const {
  validate();
  std::vector<int> x(n_);
  std::vector<int> e(static_cast<std::size_t>(n_) * n_, 0);
  for (int i = 0; i < n_; ++i)
    x[i] = rng.categorical({node_row(i), static_cast<std::size_t>(a_)});
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      const int c = rng.categorical({edge_slice(i, j), static_cast<std::size_t>(b_)});
      e[static_cast<std::size_t>(i) * n_ + j] = c;
      e[static_cast<std::size_t>(j) * n_ + i] = c;
    }
  }
  return Graph::encode(x, e, a_, b_);
}

Graph SoftGraph::argmax() const {
  std::vector<int> x(n_);
  std::vector<int> e(static_cast<std::size_t>(n_) * n_, 0);
  auto arg = [](const double* row, int d) {
    int best = 0;
    for (int c = 1; c < d; ++c)
      if (row[c] > row[best]) best = c;
    return best;
  };
  for (int i = 0; i < n_; ++i) x[i] = arg(node_row(i), a_);
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) {
      const int c = arg(edge_slice(i, j), b_);
      e[static_cast<std::size_t>(i) * n_ + j] = c;
      e[static_cast<std::size_t>(j) * n_ + i] = c;
    }
  return Graph::encode(x, e, a_, b_);
}

int DatasetStats::sample_n(RngStream& rng) const {
  std::vector<double> w;
  std::vector<int> vals;
  w.reserve(node_count_hist.size());
  for (const auto& [n, p] : node_count_hist) {
    vals.push_back(n);
    w.push_back(p);
  }
  return vals[rng.categorical(w)];
}

double DatasetStats::log_p_n(int n) const {
  auto it = node_count_hist.find(n);
  if (it == node_count_hist.end() || it->second <= 0.0)
    return -std::numeric_limits<double>::infinity();
  return std::log(it->second);
}

DatasetStats compute_stats(const std::vector<Graph>& graphs) {
  if (graphs.empty()) throw std::invalid_argument("compute_stats: empty dataset");
  const int a = graphs.front().num_node_classes();
  const int b = graphs.front().num_edge_classes();
  DatasetStats stats;
  stats.m_x.assign(a, 0.0);
  stats.m_e.assign(b, 0.0);
  std::size_t node_slots = 0, edge_slots = 0;
  std::map<int, std::size_t> counts;
  for (const Graph& g : graphs) {
    if (g.num_node_classes() != a || g.num_edge_classes() != b)
      throw std::invalid_argument("compute_stats: inconsistent class counts");
    for (int i = 0; i < g.n(); ++i) {
      stats.m_x[g.node_class(i)] += 1.0;
      ++node_slots;
    }
    for (int i = 0; i < g.n(); ++i)
      for (int j = i + 1; j < g.n(); ++j) {
        stats.m_e[g.edge_class(i, j)] += 1.0;
        ++edge_slots;
      }
    ++counts[g.n()];
  }
  for (double& v : stats.m_x) v /= static_cast<double>(node_slots);
  if (edge_slots == 0) {
    stats.m_e.assign(b, 0.0);
    stats.m_e[0] = 1.0;  // degenerate dataset of isolated nodes
  } else {
    for (double& v : stats.m_e) v /= static_cast<double>(edge_slots);
  }
  for (const auto& [n, c] : counts)
    stats.node_count_hist[n] = static_cast<double>(c) / static_cast<double>(graphs.size());
  return stats;
}

}  // namespace graphdiff
