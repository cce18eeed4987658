#pragma once

#include <vector>

#include "graphdiff/graph.hpp"
#include "graphdiff/rng.hpp"

namespace graphdiff {

/// Cosine schedule value alpha_bar^t = cos(0.5*pi*(t/T + s)/(1+s))^2,
/// clamped to [0,1] and to exactly 0 at t = T.
double cosine_alpha_bar(int t, int T, double s);

/// Per-step and cumulative retention coefficients of the diffusion chain.
/// alpha_bar[0] is close to (but below) 1; alpha_bar[T] is exactly 0.
/// Per-step alpha[t] = alpha_bar[t] / alpha_bar[t-1] with a 0/0 guard.
struct NoiseSchedule {
  int T = 0;
  double s = 0.008;
  std::vector<double> alpha_bar;  // indices 0..T
  std::vector<double> alpha;      // indices 1..T ([0] unused, set to 1)
  std::vector<double> beta;       // 1 - alpha

  static NoiseSchedule cosine(int T, double s = 0.008);
};

enum class TransitionKind { kUniform, kMarginal };

TransitionKind parse_transition_kind(const std::string& name);
std::string to_string(TransitionKind kind);

/// Small dense row-major matrix, just enough linear algebra for the
/// transition checks and oracles.
struct DenseMat {
  int rows = 0, cols = 0;
  std::vector<double> data;

  DenseMat() = default;
  DenseMat(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}
  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  static DenseMat identity(int d);
};

DenseMat matmul(const DenseMat& a, const DenseMat& b);

/// Q = alpha * I + (1 - alpha) * 11'/d. Rejects alpha outside [0,1].
DenseMat uniform_transition(double alpha_t, int d);

/// Q = alpha * I + beta * 1 m'. Requires alpha + beta = 1 and m normalized.
DenseMat marginal_transition(double alpha_t, double beta_t, const std::vector<double>& m);

/// Closed-form cumulative transition Qbar = alpha_bar * I + (1-alpha_bar) 1 m'
/// (m uniform for the uniform kind). Equals the ordered product Q^1..Q^t.
DenseMat cumulative_transition(double alpha_bar_t, const std::vector<double>& m);

/// Transition matrices for one timestep of the node and edge chains.
struct TransitionMatrices {
  DenseMat q_x, q_e;          // single-step
  DenseMat qbar_x, qbar_e;    // cumulative
  TransitionKind kind = TransitionKind::kMarginal;
};

/// Bundles schedule + stationary distributions and hands out per-step
/// matrices. Immutable after construction; shareable across threads.
class NoiseModel {
 public:
  NoiseModel(NoiseSchedule sched, TransitionKind kind, const DatasetStats& stats);

  const NoiseSchedule& schedule() const { return sched_; }
  TransitionKind kind() const { return kind_; }
  int T() const { return sched_.T; }
  int a() const { return static_cast<int>(m_x_.size()); }
  int b() const { return static_cast<int>(m_e_.size()); }

  /// Limit distributions of the node/edge chains (uniform or data marginals).
  const std::vector<double>& limit_x() const { return m_x_; }
  const std::vector<double>& limit_e() const { return m_e_; }

  TransitionMatrices at(int t) const;  // t in [1, T]
  DenseMat step_x(int t) const;
  DenseMat step_e(int t) const;
  DenseMat cum_x(int t) const;  // t in [0, T]; t = 0 gives the identity
  DenseMat cum_e(int t) const;

 private:
  NoiseSchedule sched_;
  TransitionKind kind_;
  std::vector<double> m_x_, m_e_;
};

/// One-step denoising posterior q(z^{t-1} = c | z^t, x) for a single
/// categorical variable: proportional to Q^t[c, z_t] * Qbar^{t-1}[x, c].
/// Throws when the unnormalized vector has no mass (state pair impossible
/// under the noise model).
std::vector<double> posterior_single(int z_t, int x, const DenseMat& q_t,
                                     const DenseMat& qbar_prev);

/// Samples G^t ~ q(G^t | g): each node from x_i Qbar_X^t, each unordered
/// edge from e_ij Qbar_E^t, mirrored; the diagonal stays "no edge".
Graph apply_discrete_noise(const Graph& g, int t, const NoiseModel& noise, RngStream& rng);

/// Samples from the prior q_X(n) x q_E(n) of the given transition kind.
Graph sample_prior(int n, const DatasetStats& stats, TransitionKind kind, int a, int b,
                   RngStream& rng);

/// Variance-preserving continuous relaxation used by the Gaussian baseline:
/// alpha^t = sqrt(alpha_bar^t) so that (sigma^t)^2 = 1 - (alpha^t)^2.
struct ContinuousNoiseParams {
  std::vector<double> alpha;  // 0..T
  std::vector<double> sigma;  // 0..T

  static ContinuousNoiseParams from_schedule(const NoiseSchedule& sched);
};

/// Conditional / posterior coefficients at step t (1 <= t <= T).
struct VpStep {
  double alpha_t, sigma_t;
  double alpha_cond;   // alpha^{t|t-1}
  double sigma_cond;   // sigma^{t|t-1}
  double sigma_post;   // sigma^{t -> t-1}
};

VpStep vp_params(int t, const ContinuousNoiseParams& params);

/// Continuous noisy state and the injected noise (the regression target).
struct GaussianNoised {
  std::vector<double> zx;     // n*a
  std::vector<double> ze;     // n*n*b, symmetric, zero diagonal noise
  std::vector<double> eps_x;  // n*a
  std::vector<double> eps_e;  // n*n*b
};

GaussianNoised apply_gaussian_noise(const Graph& g, int t, const ContinuousNoiseParams& params,
                                    RngStream& rng);

/// Standard-normal tensor over edge slots, sampled on the upper triangle and
/// mirrored; diagonal slices are zero.
std::vector<double> sample_symmetric_noise(int n, int b, RngStream& rng);

}  // namespace graphdiff
