#pragma once

// Applications built on the core solver and the limit samplers:
// goodness of fit against a group family, OT up to rotations (Procrustes),
// OT between mixture weights (sketched Wasserstein), and sliced OT.

#include <optional>
#include <vector>

#include "otl/limitlaw.hpp"

namespace otl {

/// Group acting on R^d with g_theta(y) = b + A y:
///   location:        theta = b                (d parameters, A = I)
///   location_scale:  theta = (b, s), s > 0    (d + 1 parameters, A = s I)
///   affine:          theta = (b, vec(A))      (d + d^2 parameters, column-major A)
/// Identifiability is the caller's responsibility.
class GroupFamily {
 public:
  enum class Kind { location, location_scale, affine };

  GroupFamily(Kind kind, int dim);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  int dim_theta() const;

  /// g_theta^{-1}(x) = A^{-1} (x - b).
  Point g_inverse(const Vector& theta, const Point& x) const;
  /// g_theta(y) = b + A y.
  Point g(const Vector& theta, const Point& y) const;
  /// d x dim_theta derivative of theta -> g_theta^{-1}(x).
  Matrix jacobian(const Vector& theta, const Point& x) const;
  /// Central-difference version of jacobian(); used to cross-check it.
  Matrix numerical_jacobian(const Vector& theta, const Point& x, double h = 1e-6) const;

 private:
  void check_theta(const Vector& theta) const;
  Kind kind_;
  int dim_;
};

/// Moment matching: the mean (location) or mean and pooled standard
/// deviation (location_scale) of g_theta # nu0 equal those of mu. Affine
/// families are not covered.
Vector moment_estimate(const GroupFamily& family, const DiscreteMeasure& mu, const DiscreteMeasure& nu0);

/// OT(mu_n, nu0, c) with c(x, y) = |g_theta^{-1}(x) - y|^2.
double gof_statistic(const EmpiricalSample& sample, const DiscreteMeasure& nu0, const GroupFamily& family,
                     const Vector& theta_hat);
double gof_statistic(const DiscreteMeasure& mu_n, const DiscreteMeasure& nu0, const GroupFamily& family,
                     const Vector& theta_hat);

/// Joint Gaussian limit of the estimator sqrt(n) (theta_hat - theta) and the
/// bridge of mu: Cov(Ztheta) and Cov(Ztheta, Zmu) (dim_theta x N).
struct ThetaModel {
  Matrix cov;
  Matrix cross_mu;
};

/// Limit of the location moment estimator: Ztheta = sum_i x_i Zmu_i.
ThetaModel location_moment_model(const DiscreteMeasure& mu);

/// One-sample limit of sqrt(n) (gof_statistic - OT(mu, nu0, c_theta)).
LimitSampleSet gof_limit(const DiscreteMeasure& mu, const DiscreteMeasure& nu0, const GroupFamily& family,
                         const Vector& theta, const ThetaModel& theta_model, const LimitOptions& options);

/// Finite set of rotations in SO(2) or SO(3) with a covering radius `mesh`
/// in operator norm (exact for the angle grid, a seeded probe estimate for
/// the quaternion net).
class RotationGrid {
 public:
  /// Angles 2 pi k / count, k = 0..count-1.
  static RotationGrid angles(int count);
  /// Super-Fibonacci quaternion spiral with `count` points.
  static RotationGrid quaternion_net(int count);

  int dim() const { return dim_; }
  std::size_t size() const { return rotations_.size(); }
  const Matrix& rotation(std::size_t k) const { return rotations_[k]; }
  const std::vector<Matrix>& rotations() const { return rotations_; }
  double mesh() const { return mesh_; }

 private:
  RotationGrid() = default;
  int dim_ = 2;
  std::vector<Matrix> rotations_;
  double mesh_ = 0.0;
};

Matrix rotation_2d(double angle);
/// Rotation matrix of a (not necessarily normalized) quaternion (w, x, y, z).
Matrix rotation_from_quaternion(double w, double x, double y, double z);
/// Nearest rotation to M in Frobenius norm (SVD with a determinant fix).
Matrix project_to_rotation(const Matrix& m);

enum class ProcrustesRefine { grid_only, alternating };

struct ProcrustesResult {
  double value = 0.0;
  Matrix rotation;
  std::vector<double> grid_values;
  std::size_t best_grid_index = 0;
  /// Objective after each alternating step (starts with the grid minimum).
  std::vector<double> trace;
};

/// min over rotations R of OT(mu, nu, c_R) with c_R(x, y) = |R x - y|^2,
/// so that nu = R_# mu is recovered with best rotation R.
ProcrustesResult procrustes_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const RotationGrid& grid,
                               ProcrustesRefine refine = ProcrustesRefine::alternating, int threads = 1);

struct MixtureSpec {
  Vector alpha;
  Vector beta;
  Matrix d_matrix;
  bool metric = false;  // additionally require a pseudo-metric

  void validate() const;
  DiscreteMeasure alpha_measure() const;
  DiscreteMeasure beta_measure() const;
};

struct SketchedResult {
  double value = 0.0;
  Matrix plan;
};

SketchedResult sketched_wasserstein(const MixtureSpec& spec);

/// Limit of the estimated sketched distance under a joint Gaussian model for
/// (alpha_hat, beta_hat, d_hat); the cost part of `model` describes d_hat.
LimitSampleSet sketched_limit(const MixtureSpec& spec, const GaussianTripleModel& model, const SampleRatio& ratio,
                              const LimitOptions& options);

/// OT between two empirical laws on the line with cost |x - y|^p, computed
/// by the quantile (north-west corner) coupling of the sorted samples.
double ot_1d(std::vector<double> x, std::vector<double> y, double p);

/// Directions on S^{d-1} with nonnegative quadrature weights summing to one.
class SphereGrid {
 public:
  /// Uniform angles on the circle (d = 2).
  static SphereGrid circle(int count);
  /// Spherical Fibonacci net (d = 3).
  static SphereGrid fibonacci(int count);
  /// Normalized Gaussian directions (any d).
  static SphereGrid random(int dim, int count, std::uint64_t seed);
  /// circle for d = 2, fibonacci for d = 3, random otherwise.
  static SphereGrid for_dimension(int dim, int count, std::uint64_t seed = 0);

  SphereGrid(std::vector<Vector> directions, std::vector<double> weights);

  int dim() const { return static_cast<int>(directions_.front().size()); }
  std::size_t size() const { return directions_.size(); }
  const Vector& direction(std::size_t k) const { return directions_[k]; }
  const std::vector<Vector>& directions() const { return directions_; }
  double weight(std::size_t k) const { return weights_[k]; }
  /// Covering radius in Euclidean distance (exact on the circle, a seeded
  /// probe estimate otherwise).
  double mesh() const { return mesh_; }

 private:
  std::vector<Vector> directions_;
  std::vector<double> weights_;
  double mesh_ = 0.0;
};

enum class SlicedMode { average, max, process };
const char* to_string(SlicedMode mode);

struct SlicedValues {
  std::vector<double> per_direction;
  double average = 0.0;
  double max = 0.0;  // on the p-th power scale
  std::size_t argmax = 0;
};

std::vector<double> project(const std::vector<Point>& points, const Vector& direction);

/// Per-direction ot_1d of the projections, their quadrature mean and maximum.
SlicedValues sliced_ot(const EmpiricalSample& x, const EmpiricalSample& y, const SphereGrid& grid, double p,
                       int threads = 1);

/// Grid maximum refined locally: golden-section search over the angle on the
/// circle, shrinking random perturbations of the best direction otherwise.
struct MaxSlicedResult {
  double value = 0.0;
  Vector direction;
};
MaxSlicedResult max_sliced_refined(const EmpiricalSample& x, const EmpiricalSample& y, const SphereGrid& grid,
                                   double p, std::uint64_t seed = 0);

/// Projection cost family theta -> |theta'(x - y)|^p over the grid, with
/// Lipschitz constant p diameter^p for supports of the given diameter.
CostFamily sliced_cost_family(const SphereGrid& grid, double p, double diameter);

struct SlicedLimit {
  std::vector<LimitSampleSet> per_direction;  // process mode
  LimitSampleSet law;                         // average / max modes
};

/// Limit laws of the sliced statistics. Per direction the limit is the
/// dual-face maximum of sqrt(lambda) Zmu.phi + sqrt(1 - lambda) Znu.psi for
/// the projected cost, with one bridge draw shared by all directions; the
/// average mode integrates these with the quadrature weights and the max mode
/// uses the extremal sampler over the grid.
SlicedLimit sliced_limits(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const SphereGrid& grid, double p,
                          const SampleRatio& ratio, SlicedMode mode, const ExtremalOptions& options);

}  // namespace otl
