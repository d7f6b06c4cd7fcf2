#pragma once

// Monte Carlo samplers for the limit laws of empirical OT values, with
// estimated costs (weakly converging cost processes) or with costs optimized
// over a finite parameter grid.

#include <optional>
#include <vector>

#include "otl/transport.hpp"

namespace otl {

/// Gaussian cost process Zc on the N x M product support.
struct CostProcess {
  enum class Kind { zero, independent_entries, linear_map };
  Kind kind = Kind::zero;
  Matrix std_dev;    // independent_entries: N x M entrywise standard deviations
  Matrix map;        // linear_map: (N M) x k, row i * M + j
  Matrix cov_param;  // linear_map: k x k covariance of the parameter Zp

  static CostProcess zero() { return {}; }
  static CostProcess independent_entries(Matrix std_dev);
  static CostProcess linear_map(Matrix map, Matrix cov_param);

  /// Dimension of the Gaussian parameter Zp (N M entries for independent
  /// entries, k for a linear map, 0 for zero).
  Eigen::Index parameters() const;
  bool is_zero() const { return kind == Kind::zero; }
};

/// Joint law of (Zmu, Znu, Zp): Zmu and Znu are independent multinomial
/// bridges with covariances diag(w) - w w'. Zp may be correlated with the
/// bridges through the optional cross blocks Cov(Zp, Zmu) (k x N) and
/// Cov(Zp, Znu) (k x M).
struct GaussianTripleModel {
  Vector mu_weights;
  Vector nu_weights;
  CostProcess cost;
  Matrix cross_mu;
  Matrix cross_nu;

  static GaussianTripleModel bridges(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                     CostProcess cost = CostProcess::zero());
  Matrix cov_mu() const;
  Matrix cov_nu() const;
  bool has_cross() const { return cross_mu.size() > 0 || cross_nu.size() > 0; }
  void validate() const;
};

struct TripleDraw {
  Vector zmu;
  Vector znu;
  Matrix zc;  // N x M; empty when the cost process is zero
  Vector zp;  // parameter draw (empty for zero / independent entries)
};

/// Draw factory for a fixed model. The joint covariance is factored once when
/// cross blocks are present (jitter 1e-12 trace/dim, symmetric eigen
/// decomposition); otherwise the blocks are drawn independently. Bridge draws
/// are projected onto the complement of the constants.
class TripleSampler {
 public:
  explicit TripleSampler(GaussianTripleModel model);
  TripleDraw draw(std::mt19937_64& rng) const;
  const GaussianTripleModel& model() const { return model_; }

 private:
  GaussianTripleModel model_;
  Matrix joint_factor_;   // (N + M + k) x r when cross blocks are present
  Matrix param_factor_;   // k x r for a linear map without cross blocks
};

std::vector<TripleDraw> sample_bridges(const GaussianTripleModel& model, std::uint64_t seed, int n_draws,
                                       int threads = 1);

struct Summary {
  double mean = 0.0;
  double std = 0.0;
  double q025 = 0.0;
  double q50 = 0.0;
  double q975 = 0.0;
};

/// Linear-interpolation quantile of sorted data.
double quantile_sorted(const std::vector<double>& sorted, double p);
Summary summarize(const std::vector<double>& draws);

struct LimitSampleSet {
  std::vector<double> draws;
  Summary summary;

  static LimitSampleSet from(std::vector<double> draws);
};

struct LimitOptions {
  int n_draws = 1000;
  std::uint64_t seed = 0;
  int threads = 1;
  std::optional<double> face_tol;
};

/// Draws of min over the primal face of <Zc, pi> plus max over the dual face
/// of sqrt(lambda) Zmu.phi + sqrt(1 - lambda) Znu.psi. The one-sample ratio
/// drops the Znu term.
LimitSampleSet sample_limit_wcc(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c,
                                const GaussianTripleModel& model, const SampleRatio& ratio,
                                const LimitOptions& options);

enum class ExtremalMode { inf, sup };
const char* to_string(ExtremalMode mode);

struct ExtremalOptions : LimitOptions {
  std::optional<double> arg_tol;  // default 1e-7 (1 + |extremum|)
};

/// Grid values and optimizer set used by the extremal sampler.
struct ExtremalSetup {
  std::vector<double> values;          // OT(mu, nu, c_theta) per grid point
  double extremum = 0.0;
  std::vector<std::size_t> optimizers; // indices within arg_tol of the extremum
};

ExtremalSetup extremal_setup(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostFamily& family,
                             ExtremalMode mode, std::optional<double> arg_tol = std::nullopt);

/// Limit of the infimum (sup) of the OT value over the grid. In inf mode the
/// potentials at every minimizing theta must be unique up to shifts, else
/// "KP violated" is thrown; each draw is the minimum of the point
/// evaluations. In sup mode each draw is the maximum over maximizers of the
/// dual-face maximum. Only the bridge part of `model` is used.
LimitSampleSet sample_limit_extremal(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostFamily& family,
                                     ExtremalMode mode, const GaussianTripleModel& model, const SampleRatio& ratio,
                                     const ExtremalOptions& options);

/// Cost process of a plug-in group-family cost
///   Zc(x_i, y_j) = 2 <J_i Ztheta, g_inv_i - y_j>,  Ztheta ~ N(0, theta_cov),
/// where J_i (d x k) is the derivative of the inverse transform at x_i and
/// g_inv (N x d) holds the inverse-transformed row points.
CostProcess gof_cost_process_model(const Matrix& theta_cov, const std::vector<Matrix>& jacobian,
                                   const Matrix& g_inv, const std::vector<Point>& y_support);

}  // namespace otl
