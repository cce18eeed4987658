#include "graphdiff/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace graphdiff::nn {

namespace {

std::size_t numel_of(const std::vector<int>& dims) {
  std::size_t n = 1;
  for (int d : dims) {
    if (d <= 0) throw std::invalid_argument("tensor dims must be positive");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

std::shared_ptr<TensorNode> make_node(std::vector<int> dims) {
  if (dims.empty() || dims.size() > 4)
    throw std::invalid_argument("tensors have 1 to 4 axes");
  auto node = std::make_shared<TensorNode>();
  node->dims = std::move(dims);
  node->val.assign(numel_of(node->dims), 0.0);
  return node;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* who) {
  if (a.dims() != b.dims())
    throw std::invalid_argument(std::string(who) + ": shape mismatch " +
                                shape_string(a.dims()) + " vs " + shape_string(b.dims()));
}

Tensor make_op(std::vector<int> dims, std::vector<std::shared_ptr<TensorNode>> parents,
               std::function<void(TensorNode&)> backward_fn) {
  auto node = make_node(std::move(dims));
  node->parents = std::move(parents);
  node->backward_fn = std::move(backward_fn);
  return Tensor(node);
}

void ensure_grad(TensorNode& n) {
  if (n.grad.size() != n.val.size()) n.grad.assign(n.val.size(), 0.0);
}

}  // namespace

std::string shape_string(const std::vector<int>& dims) {
  std::string s = "(";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(dims[i]);
  }
  return s + ")";
}

Tensor Tensor::leaf(std::vector<int> dims, bool requires_grad) {
  auto node = make_node(std::move(dims));
  node->requires_grad = requires_grad;
  node->grad.assign(node->val.size(), 0.0);
  return Tensor(node);
}

Tensor Tensor::from_values(std::vector<int> dims, std::vector<double> values,
                           bool requires_grad) {
  Tensor t = leaf(std::move(dims), requires_grad);
  if (t.numel() != values.size())
    throw std::invalid_argument("from_values: value count does not match shape " +
                                shape_string(t.dims()));
  t.values() = std::move(values);
  return t;
}

Tensor Tensor::scalar(double v) { return from_values({1, 1}, {v}); }

double Tensor::value() const {
  if (numel() != 1) throw std::logic_error("value(): tensor is not scalar");
  return node_->val[0];
}

Tensor matmul(const Tensor& a, const Tensor& w) {
  if (w.ndim() != 2)
    throw std::invalid_argument("matmul: weight must be 2-D, got " + shape_string(w.dims()));
  const int k = a.channels();
  if (k != w.dim(0))
    throw std::invalid_argument("matmul: shape mismatch " + shape_string(a.dims()) + " vs " +
                                shape_string(w.dims()));
  const int c = w.dim(1);
  const std::size_t rows = a.rows();
  std::vector<int> out_dims = a.dims();
  out_dims.back() = c;
  Tensor out = make_op(out_dims, {a.node(), w.node()}, [rows, k, c](TensorNode& self) {
    auto& pa = *self.parents[0];
    auto& pw = *self.parents[1];
    ensure_grad(pa);
    ensure_grad(pw);
    // dA = G W', dW = A' G
    for (std::size_t r = 0; r < rows; ++r) {
      const double* g = self.grad.data() + r * c;
      const double* av = pa.val.data() + r * k;
      double* ag = pa.grad.data() + r * k;
      for (int i = 0; i < k; ++i) {
        const double* wrow = pw.val.data() + static_cast<std::size_t>(i) * c;
        double* wg = pw.grad.data() + static_cast<std::size_t>(i) * c;
        double acc = 0.0;
        const double ai = av[i];
        for (int j = 0; j < c; ++j) {
          acc += g[j] * wrow[j];
          wg[j] += ai * g[j];
        }
        ag[i] += acc;
      }
    }
  });
  const double* av = a.values().data();
  const double* wv = w.values().data();
  double* ov = out.values().data();
  for (std::size_t r = 0; r < rows; ++r) {
    for (int i = 0; i < k; ++i) {
      const double ai = av[r * k + i];
      if (ai == 0.0) continue;
      const double* wrow = wv + static_cast<std::size_t>(i) * c;
      double* orow = ov + r * c;
      for (int j = 0; j < c; ++j) orow[j] += ai * wrow[j];
    }
  }
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  Tensor out = make_op(a.dims(), {a.node(), b.node()}, [](TensorNode& self) {
    for (auto* p : {self.parents[0].get(), self.parents[1].get()}) {
      ensure_grad(*p);
      for (std::size_t i = 0; i < self.grad.size(); ++i) p->grad[i] += self.grad[i];
    }
  });
  for (std::size_t i = 0; i < out.numel(); ++i)
    out.values()[i] = a.values()[i] + b.values()[i];
  return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  Tensor out = make_op(a.dims(), {a.node(), b.node()}, [](TensorNode& self) {
    auto& pa = *self.parents[0];
    auto& pb = *self.parents[1];
    ensure_grad(pa);
    ensure_grad(pb);
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      pa.grad[i] += self.grad[i];
      pb.grad[i] -= self.grad[i];
    }
  });
  for (std::size_t i = 0; i < out.numel(); ++i)
    out.values()[i] = a.values()[i] - b.values()[i];
  return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  Tensor out = make_op(a.dims(), {a.node(), b.node()}, [](TensorNode& self) {
    auto& pa = *self.parents[0];
    auto& pb = *self.parents[1];
    ensure_grad(pa);
    ensure_grad(pb);
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      pa.grad[i] += self.grad[i] * pb.val[i];
      pb.grad[i] += self.grad[i] * pa.val[i];
    }
  });
  for (std::size_t i = 0; i < out.numel(); ++i)
    out.values()[i] = a.values()[i] * b.values()[i];
  return out;
}

Tensor scale(const Tensor& a, double c) {
  Tensor out = make_op(a.dims(), {a.node()}, [c](TensorNode& self) {
    auto& pa = *self.parents[0];
    ensure_grad(pa);
    for (std::size_t i = 0; i < self.grad.size(); ++i) pa.grad[i] += c * self.grad[i];
  });
  for (std::size_t i = 0; i < out.numel(); ++i) out.values()[i] = c * a.values()[i];
  return out;
}

Tensor add_rowvec(const Tensor& a, const Tensor& v) {
  const int c = a.channels();
  if (v.ndim() != 2 || v.dim(0) != 1 || v.dim(1) != c)
    throw std::invalid_argument("add_rowvec: shape mismatch " + shape_string(a.dims()) +
                                " vs " + shape_string(v.dims()));
  const std::size_t rows = a.rows();
  Tensor out = make_op(a.dims(), {a.node(), v.node()}, [rows, c](TensorNode& self) {
    auto& pa = *self.parents[0];
    auto& pv = *self.parents[1];
    ensure_grad(pa);
    ensure_grad(pv);
    for (std::size_t r = 0; r < rows; ++r)
      for (int j = 0; j < c; ++j) {
        pa.grad[r * c + j] += self.grad[r * c + j];
        pv.grad[j] += self.grad[r * c + j];
      }
  });
  for (std::size_t r = 0; r < rows; ++r)
    for (int j = 0; j < c; ++j)
      out.values()[r * c + j] = a.values()[r * c + j] + v.values()[j];
  return out;
}

Tensor mul_rowvec(const Tensor& a, const Tensor& v) {
  const int c = a.channels();
  if (v.ndim() != 2 || v.dim(0) != 1 || v.dim(1) != c)
    throw std::invalid_argument("mul_rowvec: shape mismatch " + shape_string(a.dims()) +
                                " vs " + shape_string(v.dims()));
  const std::size_t rows = a.rows();
  Tensor out = make_op(a.dims(), {a.node(), v.node()}, [rows, c](TensorNode& self) {
    auto& pa = *self.parents[0];
    auto& pv = *self.parents[1];
    ensure_grad(pa);
    ensure_grad(pv);
    for (std::size_t r = 0; r < rows; ++r)
      for (int j = 0; j < c; ++j) {
        pa.grad[r * c + j] += self.grad[r * c + j] * pv.val[j];
        pv.grad[j] += self.grad[r * c + j] * pa.val[r * c + j];
      }
  });
  for (std::size_t r = 0; r < rows; ++r)
    for (int j = 0; j < c; ++j)
      out.values()[r * c + j] = a.values()[r * c + j] * v.values()[j];
  return out;
}

Tensor relu(const Tensor& a) {
  Tensor out = make_op(a.dims(), {a.node()}, [](TensorNode& self) {
    auto& pa = *self.parents[0];
    ensure_grad(pa);
    for (std::size_t i = 0; i < self.grad.size(); ++i)
      if (pa.val[i] > 0.0) pa.grad[i] += self.grad[i];
  });
  for (std::size_t i = 0; i < out.numel(); ++i)
    out.values()[i] = a.values()[i] > 0.0 ? a.values()[i] : 0.0;
  return out;
}

Tensor softmax_rows(const Tensor& a) {
  const int c = a.channels();
  const std::size_t rows = a.rows();
  Tensor out = make_op(a.dims(), {a.node()}, [rows, c](TensorNode& self) {
    auto& pa = *self.parents[0];
    ensure_grad(pa);
    for (std::size_t r = 0; r < rows; ++r) {
      const double* s = self.val.data() + r * c;
      const double* g = self.grad.data() + r * c;
      double dot = 0.0;
      for (int j = 0; j < c; ++j) dot += s[j] * g[j];
      for (int j = 0; j < c; ++j) pa.grad[r * c + j] += s[j] * (g[j] - dot);
    }
  });
  for (std::size_t r = 0; r < rows; ++r) {
    const double* x = a.values().data() + r * c;
    double* y = out.values().data() + r * c;
    double m = x[0];
    for (int j = 1; j < c; ++j) m = std::max(m, x[j]);
    double sum = 0.0;
    for (int j = 0; j < c; ++j) {
      y[j] = std::exp(x[j] - m);
      sum += y[j];
    }
    for (int j = 0; j < c; ++j) y[j] /= sum;
  }
  return out;
}

Tensor layernorm_rows(const Tensor& a, double eps) {
  const int c = a.channels();
  const std::size_t rows = a.rows();
  auto node = make_node(a.dims());
  node->parents = {a.node()};
  // stash per-row inverse std for the backward pass
  auto inv_std = std::make_shared<std::vector<double>>(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* x = a.values().data() + r * c;
    double* y = node->val.data() + r * c;
    double mean = 0.0;
    for (int j = 0; j < c; ++j) mean += x[j];
    mean /= c;
    double var = 0.0;
    for (int j = 0; j < c; ++j) var += (x[j] - mean) * (x[j] - mean);
    var /= c;
    const double istd = 1.0 / std::sqrt(var + eps);
    (*inv_std)[r] = istd;
    for (int j = 0; j < c; ++j) y[j] = (x[j] - mean) * istd;
  }
  node->backward_fn = [rows, c, inv_std](TensorNode& self) {
    auto& pa = *self.parents[0];
    ensure_grad(pa);
    for (std::size_t r = 0; r < rows; ++r) {
      const double* y = self.val.data() + r * c;
      const double* g = self.grad.data() + r * c;
      double mean_g = 0.0, mean_gy = 0.0;
      for (int j = 0; j < c; ++j) {
        mean_g += g[j];
        mean_gy += g[j] * y[j];
      }
      mean_g /= c;
      mean_gy /= c;
      const double istd = (*inv_std)[r];
      for (int j = 0; j < c; ++j)
        pa.grad[r * c + j] += istd * (g[j] - mean_g - y[j] * mean_gy);
    }
  };
  return Tensor(node);
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no inputs");
  const std::size_t rows = parts[0].rows();
  int total = 0;
  for (const Tensor& p : parts) {
    if (p.rows() != rows)
      throw std::invalid_argument("concat_cols: row mismatch " + shape_string(p.dims()) +
                                  " vs " + shape_string(parts[0].dims()));
    total += p.channels();
  }
  std::vector<int> dims = parts[0].dims();
  dims.back() = total;
  std::vector<std::shared_ptr<TensorNode>> parents;
  std::vector<int> widths;
  for (const Tensor& p : parts) {
    parents.push_back(p.node());
    widths.push_back(p.channels());
  }
  Tensor out = make_op(dims, parents, [rows, total, widths](TensorNode& self) {
    for (std::size_t r = 0; r < rows; ++r) {
      int off = 0;
      for (std::size_t p = 0; p < self.parents.size(); ++p) {
        auto& par = *self.parents[p];
        ensure_grad(par);
        for (int j = 0; j < widths[p]; ++j)
          par.grad[r * widths[p] + j] += self.grad[r * total + off + j];
        off += widths[p];
      }
    }
  });
  for (std::size_t r = 0; r < rows; ++r) {
    int off = 0;
    for (std::size_t p = 0; p < parts.size(); ++p) {
      const int w = widths[p];
      for (int j = 0; j < w; ++j)
        out.values()[r * total + off + j] = parts[p].values()[r * w + j];
      off += w;
    }
  }
  return out;
}

Tensor expand_axis1(const Tensor& a, int n) {
  if (a.ndim() != 2)
    throw std::invalid_argument("expand_axis1: input must be 2-D, got " +
                                shape_string(a.dims()));
  const int m = a.dim(0), c = a.dim(1);
  Tensor out = make_op({m, n, c}, {a.node()}, [m, n, c](TensorNode& self) {
    auto& pa = *self.parents[0];
    ensure_grad(pa);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < c; ++k)
          pa.grad[static_cast<std::size_t>(i) * c + k] +=
              self.grad[(static_cast<std::size_t>(i) * n + j) * c + k];
  });
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < c; ++k)
        out.values()[(static_cast<std::size_t>(i) * n + j) * c + k] =
            a.values()[static_cast<std::size_t>(i) * c + k];
  return out;
}

Tensor expand_axis0(const Tensor& a, int n) {
  if (a.ndim() != 2)
    throw std::invalid_argument("expand_axis0: input must be 2-D, got " +
                                shape_string(a.dims()));
  const int m = a.dim(0), c = a.dim(1);
  Tensor out = make_op({n, m, c}, {a.node()}, [m, n, c](TensorNode& self) {
    auto& pa = *self.parents[0];
    ensure_grad(pa);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < c; ++k)
          pa.grad[static_cast<std::size_t>(j) * c + k] +=
              self.grad[(static_cast<std::size_t>(i) * m + j) * c + k];
  });
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < c; ++k)
        out.values()[(static_cast<std::size_t>(i) * m + j) * c + k] =
            a.values()[static_cast<std::size_t>(j) * c + k];
  return out;
}

Tensor softmax_axis1(const Tensor& a) {
  if (a.ndim() != 3)
    throw std::invalid_argument("softmax_axis1: input must be 3-D, got " +
                                shape_string(a.dims()));
  const int n = a.dim(0), m = a.dim(1), c = a.dim(2);
  Tensor out = make_op(a.dims(), {a.node()}, [n, m, c](TensorNode& self) {
    auto& pa = *self.parents[0];
    ensure_grad(pa);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < c; ++k) {
        double dot = 0.0;
        for (int j = 0; j < m; ++j) {
          const std::size_t idx = (static_cast<std::size_t>(i) * m + j) * c + k;
          dot += self.val[idx] * self.grad[idx];
        }
        for (int j = 0; j < m; ++j) {
          const std::size_t idx = (static_cast<std::size_t>(i) * m + j) * c + k;
          pa.grad[idx] += self.val[idx] * (self.grad[idx] - dot);
        }
      }
  });
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < c; ++k) {
      double mx = -1e300;
      for (int j = 0; j < m; ++j)
        mx = std::max(mx, a.values()[(static_cast<std::size_t>(i) * m + j) * c + k]);
      double sum = 0.0;
      for (int j = 0; j < m; ++j) {
        const std::size_t idx = (static_cast<std::size_t>(i) * m + j) * c + k;
        out.values()[idx] = std::exp(a.values()[idx] - mx);
        sum += out.values()[idx];
      }
      for (int j = 0; j < m; ++j)
        out.values()[(static_cast<std::size_t>(i) * m + j) * c + k] /= sum;
    }
  return out;
}

Tensor sum_axis1(const Tensor& a) {
  if (a.ndim() != 3)
    throw std::invalid_argument("sum_axis1: input must be 3-D, got " + shape_string(a.dims()));
  const int n = a.dim(0), m = a.dim(1), c = a.dim(2);
  Tensor out = make_op({n, c}, {a.node()}, [n, m, c](TensorNode& self) {
    auto& pa = *self.parents[0];
    ensure_grad(pa);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < c; ++k)
          pa.grad[(static_cast<std::size_t>(i) * m + j) * c + k] +=
              self.grad[static_cast<std::size_t>(i) * c + k];
  });
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < c; ++k)
        out.values()[static_cast<std::size_t>(i) * c + k] +=
            a.values()[(static_cast<std::size_t>(i) * m + j) * c + k];
  return out;
}

Tensor symmetrize_pairs(const Tensor& a) {
  if (a.ndim() != 3 || a.dim(0) != a.dim(1))
    throw std::invalid_argument("symmetrize_pairs: input must be {n,n,c}, got " +
                                shape_string(a.dims()));
  const int n = a.dim(0), c = a.dim(2);
  Tensor out = make_op(a.dims(), {a.node()}, [n, c](TensorNode& self) {
    auto& pa = *self.parents[0];
    ensure_grad(pa);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < c; ++k) {
          const double g = 0.5 * self.grad[(static_cast<std::size_t>(i) * n + j) * c + k];
          pa.grad[(static_cast<std::size_t>(i) * n + j) * c + k] += g;
          pa.grad[(static_cast<std::size_t>(j) * n + i) * c + k] += g;
        }
  });
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < c; ++k)
        out.values()[(static_cast<std::size_t>(i) * n + j) * c + k] =
            0.5 * (a.values()[(static_cast<std::size_t>(i) * n + j) * c + k] +
                   a.values()[(static_cast<std::size_t>(j) * n + i) * c + k]);
  return out;
}

Tensor upper_triangle_rows(const Tensor& a) {
  if (a.ndim() != 3 || a.dim(0) != a.dim(1))
    throw std::invalid_argument("upper_triangle_rows: input must be {n,n,c}, got " +
                                shape_string(a.dims()));
  const int n = a.dim(0), c = a.dim(2);
  const int pairs = n * (n - 1) / 2;
  if (pairs == 0)
    throw std::invalid_argument("upper_triangle_rows: graph has no node pairs (n=1)");
  Tensor out = make_op({pairs, c}, {a.node()}, [n, c](TensorNode& self) {
    auto& pa = *self.parents[0];
    ensure_grad(pa);
    int r = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j, ++r)
        for (int k = 0; k < c; ++k)
          pa.grad[(static_cast<std::size_t>(i) * n + j) * c + k] +=
              self.grad[static_cast<std::size_t>(r) * c + k];
  });
  int r = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, ++r)
      for (int k = 0; k < c; ++k)
        out.values()[static_cast<std::size_t>(r) * c + k] =
            a.values()[(static_cast<std::size_t>(i) * n + j) * c + k];
  return out;
}

namespace {

enum class ColReduce { kSum, kMean, kMax, kMin, kStd };

Tensor reduce_cols(const Tensor& a, ColReduce kind) {
  if (a.ndim() != 2)
    throw std::invalid_argument("column reduction: input must be 2-D, got " +
                                shape_string(a.dims()));
  const int r = a.dim(0), c = a.dim(1);
  Tensor out = make_op({1, c}, {a.node()}, [r, c, kind](TensorNode& self) {
    auto& pa = *self.parents[0];
    ensure_grad(pa);
    for (int j = 0; j < c; ++j) {
      const double g = self.grad[j];
      switch (kind) {
        case ColReduce::kSum:
          for (int i = 0; i < r; ++i) pa.grad[static_cast<std::size_t>(i) * c + j] += g;
          break;
        case ColReduce::kMean:
          for (int i = 0; i < r; ++i) pa.grad[static_cast<std::size_t>(i) * c + j] += g / r;
          break;
        case ColReduce::kMax:
        case ColReduce::kMin: {
          int best = 0;
          for (int i = 1; i < r; ++i) {
            const double v = pa.val[static_cast<std::size_t>(i) * c + j];
            const double bv = pa.val[static_cast<std::size_t>(best) * c + j];
            if (kind == ColReduce::kMax ? v > bv : v < bv) best = i;
          }
          pa.grad[static_cast<std::size_t>(best) * c + j] += g;
          break;
        }
        case ColReduce::kStd: {
          const double s = self.val[j];
          if (s <= 0.0) break;  // zero-variance column: subgradient 0
          double mean = 0.0;
          for (int i = 0; i < r; ++i) mean += pa.val[static_cast<std::size_t>(i) * c + j];
          mean /= r;
          for (int i = 0; i < r; ++i)
            pa.grad[static_cast<std::size_t>(i) * c + j] +=
                g * (pa.val[static_cast<std::size_t>(i) * c + j] - mean) / (r * s);
          break;
        }
      }
    }
  });
  for (int j = 0; j < c; ++j) {
    double v = 0.0;
    switch (kind) {
      case ColReduce::kSum:
      case ColReduce::kMean: {
        for (int i = 0; i < r; ++i) v += a.values()[static_cast<std::size_t>(i) * c + j];
        if (kind == ColReduce::kMean) v /= r;
        break;
      }
      case ColReduce::kMax:
      case ColReduce::kMin: {
        v = a.values()[j];
        for (int i = 1; i < r; ++i) {
          const double x = a.values()[static_cast<std::size_t>(i) * c + j];
          v = kind == ColReduce::kMax ? std::max(v, x) : std::min(v, x);
        }
        break;
      }
      case ColReduce::kStd: {
        double mean = 0.0;
        for (int i = 0; i < r; ++i) mean += a.values()[static_cast<std::size_t>(i) * c + j];
        mean /= r;
        double var = 0.0;
        for (int i = 0; i < r; ++i) {
          const double d = a.values()[static_cast<std::size_t>(i) * c + j] - mean;
          var += d * d;
        }
        v = std::sqrt(var / r);
        break;
      }
    }
    out.values()[j] = v;
  }
  return out;
}

}  // namespace

Tensor reduce_cols_sum(const Tensor& a) { return reduce_cols(a, ColReduce::kSum); }
Tensor reduce_cols_mean(const Tensor& a) { return reduce_cols(a, ColReduce::kMean); }
Tensor reduce_cols_max(const Tensor& a) { return reduce_cols(a, ColReduce::kMax); }
Tensor reduce_cols_min(const Tensor& a) { return reduce_cols(a, ColReduce::kMin); }
Tensor reduce_cols_std(const Tensor& a) { return reduce_cols(a, ColReduce::kStd); }

Tensor sum_all(const Tensor& a) {
  Tensor out = make_op({1, 1}, {a.node()}, [](TensorNode& self) {
    auto& pa = *self.parents[0];
    ensure_grad(pa);
    for (double& g : pa.grad) g += self.grad[0];
  });
  double v = 0.0;
  for (double x : a.values()) v += x;
  out.values()[0] = v;
  return out;
}

Tensor cross_entropy_rows(const Tensor& probs, const std::vector<int>& targets) {
  if (probs.ndim() != 2)
    throw std::invalid_argument("cross_entropy_rows: input must be 2-D, got " +
                                shape_string(probs.dims()));
  const int r = probs.dim(0), c = probs.dim(1);
  if (static_cast<int>(targets.size()) != r)
    throw std::invalid_argument("cross_entropy_rows: target count mismatch");
  for (int t : targets)
    if (t < 0 || t >= c) throw std::invalid_argument("cross_entropy_rows: target out of range");
  auto tcopy = std::make_shared<std::vector<int>>(targets);
  constexpr double kClamp = 1e-12;
  Tensor out = make_op({r, 1}, {probs.node()}, [r, c, tcopy](TensorNode& self) {
    auto& pa = *self.parents[0];
    ensure_grad(pa);
    for (int i = 0; i < r; ++i) {
      const double p = pa.val[static_cast<std::size_t>(i) * c + (*tcopy)[i]];
      if (p > kClamp)
        pa.grad[static_cast<std::size_t>(i) * c + (*tcopy)[i]] -= self.grad[i] / p;
    }
  });
  for (int i = 0; i < r; ++i) {
    const double p = probs.values()[static_cast<std::size_t>(i) * c + targets[i]];
    out.values()[i] = -std::log(std::max(p, kClamp));
  }
  return out;
}

Tensor reshape(const Tensor& a, std::vector<int> dims) {
  if (numel_of(dims) != a.numel())
    throw std::invalid_argument("reshape: element count mismatch " + shape_string(a.dims()) +
                                " vs " + shape_string(dims));
  Tensor out = make_op(dims, {a.node()}, [](TensorNode& self) {
    auto& pa = *self.parents[0];
    ensure_grad(pa);
    for (std::size_t i = 0; i < self.grad.size(); ++i) pa.grad[i] += self.grad[i];
  });
  out.values() = a.values();
  return out;
}

void backward(const Tensor& loss) {
  if (!loss.defined()) throw std::invalid_argument("backward: undefined tensor");
  if (loss.numel() != 1)
    throw std::invalid_argument("backward: loss must be scalar, got " +
                                shape_string(loss.dims()));
  TensorNode* root = loss.node().get();
  if (root->backward_done)
    throw std::logic_error("backward: already called on this graph; rebuild the forward pass");
  root->backward_done = true;

  // Iterative post-order DFS; reverse yields a valid topological order.
  std::vector<TensorNode*> order;
  std::unordered_set<TensorNode*> visited;
  std::vector<std::pair<TensorNode*, std::size_t>> stack{{root, 0}};
  visited.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      TensorNode* parent = node->parents[next++].get();
      if (visited.insert(parent).second) stack.push_back({parent, 0});
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  ensure_grad(*root);
  root->grad[0] = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    TensorNode* node = *it;
    if (node->grad.size() != node->val.size()) ensure_grad(*node);
    if (node->backward_fn) node->backward_fn(*node);
  }
}

}  // namespace graphdiff::nn
