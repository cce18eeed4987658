#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace graphdiff::nn {

/// Node of the reverse-mode autodiff tape. Values are always f64. Tensors
/// are small dense arrays with up to 4 axes; most ops treat the last axis as
/// the channel axis and flatten the leading ones.
struct TensorNode {
  std::vector<int> dims;
  std::vector<double> val;
  std::vector<double> grad;
  bool requires_grad = false;
  bool backward_done = false;
  std::vector<std::shared_ptr<TensorNode>> parents;
  std::function<void(TensorNode&)> backward_fn;

  std::size_t numel() const { return val.size(); }
};

/// Value-semantic handle to a tape node.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<TensorNode> node) : node_(std::move(node)) {}

  static Tensor leaf(std::vector<int> dims, bool requires_grad = false);
  static Tensor from_values(std::vector<int> dims, std::vector<double> values,
                            bool requires_grad = false);
  static Tensor scalar(double v);

  bool defined() const { return node_ != nullptr; }
  const std::vector<int>& dims() const { return node_->dims; }
  int dim(int i) const { return node_->dims[i]; }
  int ndim() const { return static_cast<int>(node_->dims.size()); }
  std::size_t numel() const { return node_->numel(); }
  /// Channels = size of the last axis; rows = numel / channels.
  int channels() const { return node_->dims.back(); }
  std::size_t rows() const { return node_->numel() / channels(); }

  std::vector<double>& values() { return node_->val; }
  const std::vector<double>& values() const { return node_->val; }
  std::vector<double>& grad() { return node_->grad; }
  const std::vector<double>& grad() const { return node_->grad; }
  double value() const;  // scalar tensors only

  std::shared_ptr<TensorNode> node() const { return node_; }

 private:
  std::shared_ptr<TensorNode> node_;
};

// ----------------------------------------------------------------- ops
// Shape errors always name both shapes in the message.

Tensor matmul(const Tensor& a, const Tensor& w);   // ({..., k} x (k, c)) -> {..., c}
Tensor add(const Tensor& a, const Tensor& b);      // same shape
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);      // elementwise
Tensor scale(const Tensor& a, double c);
Tensor add_rowvec(const Tensor& a, const Tensor& v);  // v is (1, channels)
Tensor mul_rowvec(const Tensor& a, const Tensor& v);
Tensor relu(const Tensor& a);
Tensor softmax_rows(const Tensor& a);              // over the last axis
Tensor layernorm_rows(const Tensor& a, double eps = 1e-5);  // pre-affine
Tensor concat_cols(const std::vector<Tensor>& parts);

/// 3-D helpers for attention; tensors are {n, n, c}.
Tensor expand_axis1(const Tensor& a, int n);  // (n,c) -> {n,n,c}, out(i,j,:) = a(i,:)
Tensor expand_axis0(const Tensor& a, int n);  // (n,c) -> {n,n,c}, out(i,j,:) = a(j,:)
Tensor softmax_axis1(const Tensor& a);        // {n,m,c}: softmax over axis 1
Tensor sum_axis1(const Tensor& a);            // {n,m,c} -> (n,c)
Tensor symmetrize_pairs(const Tensor& a);     // {n,n,c}: (a(i,j)+a(j,i))/2
Tensor upper_triangle_rows(const Tensor& a);  // {n,n,c} -> (n(n-1)/2, c), i<j row-major

/// Column-wise reductions of a 2-D (r, c) tensor to (1, c).
Tensor reduce_cols_sum(const Tensor& a);
Tensor reduce_cols_mean(const Tensor& a);
Tensor reduce_cols_max(const Tensor& a);
Tensor reduce_cols_min(const Tensor& a);
Tensor reduce_cols_std(const Tensor& a);  // population std; std of 1 row is 0

Tensor sum_all(const Tensor& a);  // -> (1,1)

/// Per-row cross-entropy against integer class targets, log clamped at 1e-12:
/// out(r) = -log(max(p(r, target_r), 1e-12)). Input is probabilities.
Tensor cross_entropy_rows(const Tensor& probs, const std::vector<int>& targets);

Tensor reshape(const Tensor& a, std::vector<int> dims);

/// Reverse pass from a scalar loss. Gradients accumulate (+=) into every
/// node reachable from the loss; call ParamStore::zero_grad first when
/// starting a fresh step. Calling backward twice on the same loss throws.
void backward(const Tensor& loss);

std::string shape_string(const std::vector<int>& dims);

}  // namespace graphdiff::nn
