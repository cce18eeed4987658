#include "graphdiff/param_store.hpp"

#include <cmath>
#include <stdexcept>

namespace graphdiff::nn {

Tensor ParamStore::create(const std::string& name, std::vector<int> dims, Init init,
                          RngStream& rng) {
  if (contains(name)) throw std::invalid_argument("ParamStore: duplicate parameter " + name);
  Tensor t = Tensor::leaf(std::move(dims), /*requires_grad=*/true);
  switch (init) {
    case Init::kZero:
      break;
    case Init::kOne:
      for (double& v : t.values()) v = 1.0;
      break;
    case Init::kUniformFanIn: {
      const double bound = 1.0 / std::sqrt(static_cast<double>(t.dim(0)));
      for (double& v : t.values()) v = (2.0 * rng.uniform() - 1.0) * bound;
      break;
    }
  }
  items_.emplace_back(name, t);
  return t;
}

Tensor ParamStore::get(const std::string& name) const {
  for (const auto& [n, t] : items_)
    if (n == name) return t;
  throw std::invalid_argument("ParamStore: unknown parameter " + name);
}

bool ParamStore::contains(const std::string& name) const {
  for (const auto& [n, t] : items_)
    if (n == name) return true;
  return false;
}

std::size_t ParamStore::num_scalars() const {
  std::size_t n = 0;
  for (const auto& [name, t] : items_) n += t.numel();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& [name, t] : items_) {
    auto& g = t.node()->grad;
    g.assign(t.numel(), 0.0);
  }
}

void sgd_step(ParamStore& store, double lr) {
  for (auto& [name, t] : store.items()) {
    auto& v = t.node()->val;
    const auto& g = t.node()->grad;
    if (g.size() != v.size()) continue;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= lr * g[i];
  }
}

void adamlike_step(ParamStore& store, double lr, double beta1, double beta2, double eps) {
  auto& ms = store.adam_m();
  auto& vs = store.adam_v();
  const auto& items = store.items();
  if (ms.size() != items.size()) {
    ms.resize(items.size());
    vs.resize(items.size());
    for (std::size_t p = 0; p < items.size(); ++p) {
      ms[p].assign(items[p].second.numel(), 0.0);
      vs[p].assign(items[p].second.numel(), 0.0);
    }
  }
  const long t = ++store.adam_steps();
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  for (std::size_t p = 0; p < items.size(); ++p) {
    auto& val = items[p].second.node()->val;
    const auto& g = items[p].second.node()->grad;
    if (g.size() != val.size()) continue;
    for (std::size_t i = 0; i < val.size(); ++i) {
      ms[p][i] = beta1 * ms[p][i] + (1.0 - beta1) * g[i];
      vs[p][i] = beta2 * vs[p][i] + (1.0 - beta2) * g[i] * g[i];
      const double mhat = ms[p][i] / bc1;
      const double vhat = vs[p][i] / bc2;
      val[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

}  // namespace graphdiff::nn
