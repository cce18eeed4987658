#pragma once

#include <optional>
#include <string>
#include <vector>

#include "graphdiff/features.hpp"
#include "graphdiff/graph.hpp"
#include "graphdiff/param_store.hpp"
#include "graphdiff/tensor.hpp"

namespace graphdiff {

enum class DenoiserMode { kDigress, kCongress };

DenoiserMode parse_mode(const std::string& name);
std::string to_string(DenoiserMode mode);

struct DenoiserConfig {
  int layers = 4;
  int dx = 64;  // node channel width
  int de = 32;  // edge channel width
  int dy = 16;  // global channel width
  int heads = 4;
  double lambda_edge = 5.0;  // edge loss weight (Eq. with lambda)
  DenoiserMode mode = DenoiserMode::kDigress;
  FeatureFlags flags;
  int a = 0;  // node classes
  int b = 0;  // edge classes

  void validate() const;  // widths divisible by heads, lambda > 0, a/b >= 1
};

/// Predicted clean-graph distributions (discrete mode). Slices are
/// symmetric; the diagonal is forced to one-hot "no edge".
struct DenoiserOutput {
  SoftGraph probs;
};

/// Live tensors of one forward pass; keeps the tape alive for backward.
struct ForwardPass {
  nn::Tensor px;  // (n, a) probabilities, or epsilon-hat X in congress mode
  nn::Tensor pe;  // {n, n, b} probabilities (symmetric), or epsilon-hat E
  nn::Tensor x_onehot;  // input leaves, for guidance gradients
  nn::Tensor e_onehot;
  nn::Tensor y_in;
};

/// FiLM(M1, M2) = M1 W1 + (M1 W2) . M2 + M2 for learnable W1, W2 (the W are
/// applied with bias). M1 rows broadcast when M1 is a (1, k) global vector.
nn::Tensor film(const nn::Tensor& m1, const nn::Tensor& m2, const nn::Tensor& w1,
                const nn::Tensor& b1, const nn::Tensor& w2, const nn::Tensor& b2);

/// PNA(X) = cat(max(X), min(X), mean(X), std(X)) W, column-wise stats.
nn::Tensor pna(const nn::Tensor& x, const nn::Tensor& w);

/// Graph transformer of the denoising network: per layer, nodes update via
/// self-attention whose scores are FiLM-modulated by edge features (then the
/// output paths by the global features), edges update from the pre-softmax
/// scores (linear map, symmetrized, FiLM by y), and the global channel pools
/// X and the upper-triangular E with PNA. Residual + layernorm + two-layer
/// feed-forward blocks close each channel.
class Denoiser {
 public:
  Denoiser(DenoiserConfig cfg, std::uint64_t seed);

  const DenoiserConfig& config() const { return cfg_; }
  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }

  /// Discrete mode: one-hot inputs from the noisy graph.
  ForwardPass forward(const Graph& g, const FeatureBundle& features) const;

  /// Continuous mode (or relaxed inputs): raw real node/edge tensors.
  ForwardPass forward_continuous(int n, const std::vector<double>& zx,
                                 const std::vector<double>& ze,
                                 const FeatureBundle& features) const;

  /// Extracts the hard output contract from a forward pass (discrete mode):
  /// normalized, symmetric, diagonal forced to "no edge".
  DenoiserOutput to_output(const ForwardPass& fwd) const;

  /// Eq.-3 loss on live tensors: sum_i CE(x_i) + lambda * sum_{i<j} CE(e_ij).
  nn::Tensor loss_tensor(const ForwardPass& fwd, const Graph& target) const;

 private:
  friend class Regressor;
  ForwardPass run(int n, std::vector<double> x_in, std::vector<double> e_in,
                  const FeatureBundle& features) const;
  /// Trunk shared with the regressor: returns (X, E, y) after all layers.
  struct TrunkOut {
    nn::Tensor x, e, y;
    nn::Tensor x_onehot, e_onehot, y_in;
  };
  TrunkOut trunk(int n, std::vector<double> x_in, std::vector<double> e_in,
                 const FeatureBundle& features) const;

  DenoiserConfig cfg_;
  nn::ParamStore params_;
};

/// Permutation-invariant cross-entropy loss on the extracted output.
/// Contributions are accumulated in sorted order, which makes the Lemma-2
/// invariance bit-exact.
double loss(const DenoiserOutput& out, const Graph& target, double lambda_edge);

/// Denoiser-architecture trunk with a graph-level regression head.
class Regressor {
 public:
  Regressor(DenoiserConfig cfg, int target_dim, std::uint64_t seed);

  const DenoiserConfig& config() const { return trunk_.config(); }
  int target_dim() const { return target_dim_; }
  nn::ParamStore& params() { return trunk_.params(); }
  const nn::ParamStore& params() const { return trunk_.params(); }

  struct RegressorPass {
    nn::Tensor y_hat;  // (1, k)
    nn::Tensor x_onehot, e_onehot;
  };
  RegressorPass forward(const Graph& g, const FeatureBundle& features) const;

 private:
  Denoiser trunk_;
  int target_dim_;
};

}  // namespace graphdiff
