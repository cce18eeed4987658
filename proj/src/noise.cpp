#include "graphdiff/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace graphdiff {

double cosine_alpha_bar(int t, int T, double s) {
  if (T < 1) throw std::invalid_argument("cosine_alpha_bar: T must be >= 1");
  if (t < 0 || t > T) throw std::invalid_argument("cosine_alpha_bar: t outside [0, T]");
  if (!(s > 0.0)) throw std::invalid_argument("cosine_alpha_bar: s must be > 0");
  if (t == T) return 0.0;
  const double u = (static_cast<double>(t) / T + s) / (1.0 + s);
  const double c = std::cos(0.5 * std::numbers::pi * u);
  const double v = c * c;
  return std::min(1.0, std::max(0.0, v));
}

NoiseSchedule NoiseSchedule::cosine(int T, double s) {
  NoiseSchedule sched;
  sched.T = T;
  sched.s = s;
  sched.alpha_bar.resize(T + 1);
  sched.alpha.assign(T + 1, 1.0);
  sched.beta.assign(T + 1, 0.0);
  for (int t = 0; t <= T; ++t) sched.alpha_bar[t] = cosine_alpha_bar(t, T, s);
  for (int t = 1; t <= T; ++t) {
    const double prev = sched.alpha_bar[t - 1];
    sched.alpha[t] = prev > 0.0 ? sched.alpha_bar[t] / prev : 0.0;
    sched.beta[t] = 1.0 - sched.alpha[t];
  }
  return sched;
}

TransitionKind parse_transition_kind(const std::string& name) {
  if (name == "uniform") return TransitionKind::kUniform;
  if (name == "marginal") return TransitionKind::kMarginal;
  throw std::invalid_argument("unknown transition kind: " + name);
}

std::string to_string(TransitionKind kind) {
  return kind == TransitionKind::kUniform ? "uniform" : "marginal";
}

DenseMat DenseMat::identity(int d) {
  DenseMat m(d, d);
  for (int i = 0; i < d; ++i) m.at(i, i) = 1.0;
  return m;
}

DenseMat matmul(const DenseMat& a, const DenseMat& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matmul: shape mismatch");
  DenseMat out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      const double v = a.at(i, k);
      if (v == 0.0) continue;
      for (int j = 0; j < b.cols; ++j) out.at(i, j) += v * b.at(k, j);
    }
  return out;
}

DenseMat uniform_transition(double alpha_t, int d) {
  if (d < 1) throw std::invalid_argument("uniform_transition: d must be >= 1");
  if (alpha_t < 0.0 || alpha_t > 1.0)
    throw std::invalid_argument("uniform_transition: alpha outside [0,1]");
  DenseMat q(d, d);
  const double off = (1.0 - alpha_t) / d;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) q.at(i, j) = off + (i == j ? alpha_t : 0.0);
  return q;
}

DenseMat marginal_transition(double alpha_t, double beta_t, const std::vector<double>& m) {
  if (std::abs(alpha_t + beta_t - 1.0) > 1e-12)
    throw std::invalid_argument("marginal_transition: alpha + beta must equal 1");
  if (alpha_t < 0.0 || alpha_t > 1.0)
    throw std::invalid_argument("marginal_transition: alpha outside [0,1]");
  double sum = 0.0;
  for (double v : m) {
    if (v < 0.0) throw std::invalid_argument("marginal_transition: negative marginal");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("marginal_transition: marginal not normalized");
  const int d = static_cast<int>(m.size());
  DenseMat q(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) q.at(i, j) = beta_t * m[j] + (i == j ? alpha_t : 0.0);
  return q;
}

DenseMat cumulative_transition(double alpha_bar_t, const std::vector<double>& m) {
  if (alpha_bar_t < 0.0 || alpha_bar_t > 1.0)
    throw std::invalid_argument("cumulative_transition: alpha_bar outside [0,1]");
  return marginal_transition(alpha_bar_t, 1.0 - alpha_bar_t, m);
}

NoiseModel::NoiseModel(NoiseSchedule sched, TransitionKind kind, const DatasetStats& stats)
    : sched_(std::move(sched)), kind_(kind) {
  const int a = static_cast<int>(stats.m_x.size());
  const int b = static_cast<int>(stats.m_e.size());
  if (kind == TransitionKind::kUniform) {
    m_x_.assign(a, 1.0 / a);
    m_e_.assign(b, 1.0 / b);
  } else {
    m_x_ = stats.m_x;
    m_e_ = stats.m_e;
  }
}

TransitionMatrices NoiseModel::at(int t) const {
  if (t < 1 || t > sched_.T) throw std::invalid_argument("NoiseModel::at: t outside [1, T]");
  TransitionMatrices tm;
  tm.kind = kind_;
  tm.q_x = step_x(t);
  tm.q_e = step_e(t);
  tm.qbar_x = cum_x(t);
  tm.qbar_e = cum_e(t);
  return tm;
}

DenseMat NoiseModel::step_x(int t) const {
  return marginal_transition(sched_.alpha[t], sched_.beta[t], m_x_);
}
DenseMat NoiseModel::step_e(int t) const {
  return marginal_transition(sched_.alpha[t], sched_.beta[t], m_e_);
}
DenseMat NoiseModel::cum_x(int t) const {
  if (t == 0) return DenseMat::identity(a());
  return cumulative_transition(sched_.alpha_bar[t], m_x_);
}
DenseMat NoiseModel::cum_e(int t) const {
  if (t == 0) return DenseMat::identity(b());
  return cumulative_transition(sched_.alpha_bar[t], m_e_);
}

std::vector<double> posterior_single(int z_t, int x, const DenseMat& q_t,
                                     const DenseMat& qbar_prev) {
  const int d = q_t.rows;
  if (q_t.cols != d || qbar_prev.rows != d || qbar_prev.cols != d)
    throw std::invalid_argument("posterior_single: matrix shapes inconsistent");
  if (z_t < 0 || z_t >= d || x < 0 || x >= d)
    throw std::invalid_argument("posterior_single: class index out of range");
  std::vector<double> p(d);
  double total = 0.0;
  for (int c = 0; c < d; ++c) {
    p[c] = q_t.at(c, z_t) * qbar_prev.at(x, c);
    total += p[c];
  }
  if (!(total > 0.0))
    throw std::runtime_error("posterior_single: zero posterior mass (state pair impossible)");
  for (double& v : p) v /= total;
  return p;
}

Graph apply_discrete_noise(const Graph& g, int t, const NoiseModel& noise, RngStream& rng) {
  if (t < 1 || t > noise.T())
    throw std::invalid_argument("apply_discrete_noise: t outside [1, T]");
  const int n = g.n();
  const DenseMat qbar_x = noise.cum_x(t);
  const DenseMat qbar_e = noise.cum_e(t);
  std::vector<int> x(n);
  std::vector<int> e(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i) {
    const double* row = &qbar_x.data[static_cast<std::size_t>(g.node_class(i)) * qbar_x.cols];
    x[i] = rng.categorical({row, static_cast<std::size_t>(qbar_x.cols)});
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double* row = &qbar_e.data[static_cast<std::size_t>(g.edge_class(i, j)) * qbar_e.cols];
      const int c = rng.categorical({row, static_cast<std::size_t>(qbar_e.cols)});
      e[static_cast<std::size_t>(i) * n + j] = c;
      e[static_cast<std::size_t>(j) * n + i] = c;
    }
  return Graph::encode(x, e, g.num_node_classes(), g.num_edge_classes());
}

Graph sample_prior(int n, const DatasetStats& stats, TransitionKind kind, int a, int b,
                   RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_prior: n must be >= 1");
  std::vector<double> qx, qe;
  if (kind == TransitionKind::kUniform) {
    qx.assign(a, 1.0 / a);
    qe.assign(b, 1.0 / b);
  } else {
    qx = stats.m_x;
    qe = stats.m_e;
  }
  std::vector<int> x(n);
  std::vector<int> e(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i) x[i] = rng.categorical(qx);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const int c = rng.categorical(qe);
      e[static_cast<std::size_t>(i) * n + j] = c;
      e[static_cast<std::size_t>(j) * n + i] = c;
    }
  return Graph::encode(x, e, a, b);
}

ContinuousNoiseParams ContinuousNoiseParams::from_schedule(const NoiseSchedule& sched) {
  ContinuousNoiseParams p;
  p.alpha.resize(sched.T + 1);
  p.sigma.resize(sched.T + 1);
  for (int t = 0; t <= sched.T; ++t) {
    p.alpha[t] = std::sqrt(sched.alpha_bar[t]);
    p.sigma[t] = std::sqrt(1.0 - sched.alpha_bar[t]);
  }
  return p;
}

VpStep vp_params(int t, const ContinuousNoiseParams& params) {
  const int T = static_cast<int>(params.alpha.size()) - 1;
  if (t < 1 || t > T) throw std::invalid_argument("vp_params: t outside [1, T]");
  VpStep s;
  s.alpha_t = params.alpha[t];
  s.sigma_t = params.sigma[t];
  const double a_prev = params.alpha[t - 1];
  s.alpha_cond = a_prev > 0.0 ? params.alpha[t] / a_prev : 0.0;
  const double var_cond =
      s.sigma_t * s.sigma_t - s.alpha_cond * s.alpha_cond * params.sigma[t - 1] * params.sigma[t - 1];
  if (var_cond < -1e-12)
    throw std::runtime_error("vp_params: negative conditional variance (schedule inconsistent)");
  s.sigma_cond = std::sqrt(std::max(0.0, var_cond));
  s.sigma_post = s.sigma_t > 0.0 ? s.sigma_cond * params.sigma[t - 1] / s.sigma_t : 0.0;
  return s;
}

std::vector<double> sample_symmetric_noise(int n, int b, RngStream& rng) {
  std::vector<double> eps(static_cast<std::size_t>(n) * n * b, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int c = 0; c < b; ++c) {
        const double v = rng.normal();
        eps[(static_cast<std::size_t>(i) * n + j) * b + c] = v;
        eps[(static_cast<std::size_t>(j) * n + i) * b + c] = v;
      }
  return eps;
}

GaussianNoised apply_gaussian_noise(const Graph& g, int t, const ContinuousNoiseParams& params,
                                    RngStream& rng) {
  const int T = static_cast<int>(params.alpha.size()) - 1;
  if (t < 1 || t > T) throw std::invalid_argument("apply_gaussian_noise: t outside [1, T]");
  const int n = g.n();
  const int a = g.num_node_classes();
  const int b = g.num_edge_classes();
  GaussianNoised out;
  out.eps_x.resize(static_cast<std::size_t>(n) * a);
  for (double& v : out.eps_x) v = rng.normal();
  out.eps_e = sample_symmetric_noise(n, b, rng);
  const double alpha_t = params.alpha[t];
  const double sigma_t = params.sigma[t];
  out.zx = g.onehot_x();
  out.ze = g.onehot_e();
  for (std::size_t k = 0; k < out.zx.size(); ++k)
    out.zx[k] = alpha_t * out.zx[k] + sigma_t * out.eps_x[k];
  for (std::size_t k = 0; k < out.ze.size(); ++k)
    out.ze[k] = alpha_t * out.ze[k] + sigma_t * out.eps_e[k];
  return out;
}

}  // namespace graphdiff
