#pragma once

#include <string>
#include <vector>

#include "graphdiff/rng.hpp"
#include "graphdiff/tensor.hpp"

namespace graphdiff::nn {

enum class Init { kZero, kOne, kUniformFanIn };

/// Named parameter tensors with deterministic (creation) iteration order,
/// plus the optimizer moment buffers. Weight matrices are initialized
/// U[-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero.
class ParamStore {
 public:
  Tensor create(const std::string& name, std::vector<int> dims, Init init, RngStream& rng);
  Tensor get(const std::string& name) const;
  bool contains(const std::string& name) const;

  const std::vector<std::pair<std::string, Tensor>>& items() const { return items_; }
  std::size_t num_scalars() const;

  void zero_grad();

  // Optimizer state, lazily sized on the first adamlike_step call.
  std::vector<std::vector<double>>& adam_m() { return adam_m_; }
  std::vector<std::vector<double>>& adam_v() { return adam_v_; }
  long& adam_steps() { return adam_steps_; }
  const std::vector<std::vector<double>>& adam_m() const { return adam_m_; }
  const std::vector<std::vector<double>>& adam_v() const { return adam_v_; }
  long adam_steps() const { return adam_steps_; }

 private:
  std::vector<std::pair<std::string, Tensor>> items_;
  std::vector<std::vector<double>> adam_m_, adam_v_;
  long adam_steps_ = 0;
};

/// Plain gradient descent: p -= lr * g.
void sgd_step(ParamStore& store, double lr);

/// Adam-style update with bias correction; deterministic given input order.
void adamlike_step(ParamStore& store, double lr, double beta1 = 0.9, double beta2 = 0.999,
                   double eps = 1e-8);

}  // namespace graphdiff::nn
