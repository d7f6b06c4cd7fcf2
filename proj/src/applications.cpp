#include "otl/applications.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace otl {

// ---------------------------------------------------------------------------
// Group families and goodness of fit

GroupFamily::GroupFamily(Kind kind, int dim) : kind_(kind), dim_(dim) {
  require(dim >= 1, "group family dimension must be positive");
}

int GroupFamily::dim_theta() const {
  switch (kind_) {
    case Kind::location: return dim_;
    case Kind::location_scale: return dim_ + 1;
    case Kind::affine: return dim_ + dim_ * dim_;
  }
  return 0;
}

void GroupFamily::check_theta(const Vector& theta) const {
  require(theta.size() == dim_theta(), "theta has the wrong length for this group family");
  require(theta.allFinite(), "theta must be finite");
  if (kind_ == Kind::location_scale) require(theta[dim_] > 0.0, "scale parameter must be positive");
}

namespace {

Matrix linear_part(const Vector& theta, int d) {
  return Eigen::Map<const Matrix>(theta.data() + d, d, d);
}

}  // namespace

Point GroupFamily::g_inverse(const Vector& theta, const Point& x) const {
  check_theta(theta);
  require(x.size() == dim_, "point dimension does not match the group family");
  const Vector shifted = x - theta.head(dim_);
  switch (kind_) {
    case Kind::location: return shifted;
    case Kind::location_scale: return shifted / theta[dim_];
    case Kind::affine: {
      const Eigen::FullPivLU<Matrix> lu(linear_part(theta, dim_));
      require(lu.isInvertible(), "affine parameter is singular");
      return lu.solve(shifted);
    }
  }
  return shifted;
}

Point GroupFamily::g(const Vector& theta, const Point& y) const {
  check_theta(theta);
  require(y.size() == dim_, "point dimension does not match the group family");
  switch (kind_) {
    case Kind::location: return theta.head(dim_) + y;
    case Kind::location_scale: return theta.head(dim_) + theta[dim_] * y;
    case Kind::affine: return theta.head(dim_) + linear_part(theta, dim_) * y;
  }
  return y;
}

Matrix GroupFamily::jacobian(const Vector& theta, const Point& x) const {
  check_theta(theta);
  const int d = dim_;
  Matrix jac = Matrix::Zero(d, dim_theta());
  switch (kind_) {
    case Kind::location:
      jac = -Matrix::Identity(d, d);
      break;
    case Kind::location_scale: {
      const double s = theta[d];
      jac.leftCols(d) = -Matrix::Identity(d, d) / s;
      jac.col(d) = -(x - theta.head(d)) / (s * s);
      break;
    }
    case Kind::affine: {
      const Matrix a_inv = linear_part(theta, d).inverse();
      const Vector z = a_inv * (x - theta.head(d));
      jac.leftCols(d) = -a_inv;
      // d(A^{-1}) / dA_kl = -A^{-1} e_k e_l' A^{-1}
      for (int l = 0; l < d; ++l)
        for (int k = 0; k < d; ++k) jac.col(d + k + l * d) = -a_inv.col(k) * z[l];
      break;
    }
  }
  return jac;
}

Matrix GroupFamily::numerical_jacobian(const Vector& theta, const Point& x, double h) const {
  Matrix jac(dim_, dim_theta());
  for (int k = 0; k < dim_theta(); ++k) {
    Vector up = theta, down = theta;
    up[k] += h;
    down[k] -= h;
    jac.col(k) = (g_inverse(up, x) - g_inverse(down, x)) / (2.0 * h);
  }
  return jac;
}

namespace {

Vector measure_mean(const DiscreteMeasure& m) {
  Vector mean = Vector::Zero(m.dim());
  for (std::size_t i = 0; i < m.size(); ++i) mean += m.weight(i) * m.point(i);
  return mean;
}

double measure_total_variance(const DiscreteMeasure& m) {
  const Vector mean = measure_mean(m);
  double v = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) v += m.weight(i) * (m.point(i) - mean).squaredNorm();
  return v;
}

Matrix support_matrix(const DiscreteMeasure& m) {
  Matrix x(static_cast<Eigen::Index>(m.size()), m.dim());
  for (std::size_t i = 0; i < m.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = m.point(i).transpose();
  return x;
}

}  // namespace

Vector moment_estimate(const GroupFamily& family, const DiscreteMeasure& mu, const DiscreteMeasure& nu0) {
  require(mu.dim() == family.dim() && nu0.dim() == family.dim(), "measure dimension does not match the family");
  const Vector mean_mu = measure_mean(mu), mean_nu = measure_mean(nu0);
  switch (family.kind()) {
    case GroupFamily::Kind::location:
      return mean_mu - mean_nu;
    case GroupFamily::Kind::location_scale: {
      const double var_nu = measure_total_variance(nu0);
      require(var_nu > 0.0, "reference measure is degenerate");
      const double s = std::sqrt(measure_total_variance(mu) / var_nu);
      require(s > 0.0, "sample is degenerate");
      Vector theta(family.dim_theta());
      theta.head(family.dim()) = mean_mu - s * mean_nu;
      theta[family.dim()] = s;
      return theta;
    }
    case GroupFamily::Kind::affine:
      break;
  }
  throw InvalidArgument("no moment estimator for affine families");
}

double gof_statistic(const DiscreteMeasure& mu_n, const DiscreteMeasure& nu0, const GroupFamily& family,
                     const Vector& theta_hat) {
  require(mu_n.dim() == family.dim() && nu0.dim() == family.dim(), "measure dimension does not match the family");
  std::vector<Point> pulled;
  pulled.reserve(mu_n.size());
  for (const auto& x : mu_n.support()) pulled.push_back(family.g_inverse(theta_hat, x));
  const CostMatrix c = CostMatrix::evaluate(pulled, nu0.support(), costs::squared_euclidean);
  const OtSolution sol = solve_ot(mu_n, nu0, c);
  if (!sol.ok()) throw NumericalFailure("goodness-of-fit solve failed");
  return sol.value;
}

double gof_statistic(const EmpiricalSample& sample, const DiscreteMeasure& nu0, const GroupFamily& family,
                     const Vector& theta_hat) {
  return gof_statistic(sample.to_measure(), nu0, family, theta_hat);
}

ThetaModel location_moment_model(const DiscreteMeasure& mu) {
  const Matrix x = support_matrix(mu);
  const Vector& w = mu.weights();
  const Matrix bridge = Matrix(w.asDiagonal()) - w * w.transpose();
  ThetaModel model;
  model.cross_mu = x.transpose() * bridge;
  model.cov = model.cross_mu * x;
  return model;
}

LimitSampleSet gof_limit(const DiscreteMeasure& mu, const DiscreteMeasure& nu0, const GroupFamily& family,
                         const Vector& theta, const ThetaModel& theta_model, const LimitOptions& options) {
  require(theta_model.cov.rows() == family.dim_theta() && theta_model.cov.cols() == family.dim_theta(),
          "theta covariance has the wrong shape");
  Matrix g_inv(static_cast<Eigen::Index>(mu.size()), family.dim());
  std::vector<Matrix> jac;
  std::vector<Point> pulled;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    pulled.push_back(family.g_inverse(theta, mu.point(i)));
    g_inv.row(static_cast<Eigen::Index>(i)) = pulled.back().transpose();
    jac.push_back(family.jacobian(theta, mu.point(i)));
  }
  const CostMatrix c = CostMatrix::evaluate(pulled, nu0.support(), costs::squared_euclidean);
  auto model = GaussianTripleModel::bridges(
      mu, nu0, gof_cost_process_model(theta_model.cov, jac, g_inv, nu0.support()));
  if (!model.cost.is_zero() && theta_model.cross_mu.size() > 0) model.cross_mu = theta_model.cross_mu;
  return sample_limit_wcc(mu, nu0, c, model, SampleRatio::asymptotic(1.0), options);
}

// ---------------------------------------------------------------------------
// Rotations and Procrustes

Matrix rotation_2d(double angle) {
  Matrix r(2, 2);
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

Matrix rotation_from_quaternion(double w, double x, double y, double z) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  require(n > 0.0, "zero quaternion");
  w /= n, x /= n, y /= n, z /= n;
  Matrix r(3, 3);
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
       2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
       2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

Matrix project_to_rotation(const Matrix& m) {
  require(m.rows() == m.cols() && m.rows() >= 1, "rotation projection needs a square matrix");
  const Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vector signs = Vector::Ones(m.rows());
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) signs[m.rows() - 1] = -1.0;
  return svd.matrixU() * signs.asDiagonal() * svd.matrixV().transpose();
}

RotationGrid RotationGrid::angles(int count) {
  require(count >= 1, "rotation grid needs at least one angle");
  RotationGrid grid;
  grid.dim_ = 2;
  for (int k = 0; k < count; ++k) grid.rotations_.push_back(rotation_2d(2.0 * std::numbers::pi * k / count));
  grid.mesh_ = 2.0 * std::sin(std::numbers::pi / (2.0 * count));
  return grid;
}

RotationGrid RotationGrid::quaternion_net(int count) {
  require(count >= 1, "rotation grid needs at least one point");
  // Super-Fibonacci spiral on S^3; q and -q give the same rotation.
  const double phi = std::sqrt(2.0);
  const double psi = 1.533751168755204288118041;
  std::vector<Eigen::Vector4d> quats;
  for (int i = 0; i < count; ++i) {
    const double s = i + 0.5;
    const double r = std::sqrt(s / count), big_r = std::sqrt(1.0 - s / count);
    const double alpha = 2.0 * std::numbers::pi * s / phi, beta = 2.0 * std::numbers::pi * s / psi;
    quats.emplace_back(r * std::sin(alpha), r * std::cos(alpha), big_r * std::sin(beta), big_r * std::cos(beta));
  }
  RotationGrid grid;
  grid.dim_ = 3;
  for (const auto& q : quats) grid.rotations_.push_back(rotation_from_quaternion(q[0], q[1], q[2], q[3]));
  // For unit quaternions |R_p - R_q|_2 = 2 sqrt(1 - <p, q>^2).
  std::mt19937_64 rng = substream(0x71756174ULL, static_cast<std::uint64_t>(count));
  std::normal_distribution<double> gauss;
  double mesh = 0.0;
  for (int probe = 0; probe < 2000; ++probe) {
    Eigen::Vector4d p(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
    p.normalize();
    double best = 0.0;
    for (const auto& q : quats) best = std::max(best, std::abs(p.dot(q)));
    mesh = std::max(mesh, 2.0 * std::sqrt(std::max(0.0, 1.0 - best * best)));
  }
  grid.mesh_ = mesh;
  return grid;
}

namespace {

double rotated_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const Matrix& r, OtSolution* out = nullptr) {
  std::vector<Point> rotated;
  rotated.reserve(mu.size());
  for (const auto& x : mu.support()) rotated.push_back(r * x);
  OtSolution sol = solve_ot(mu, nu, CostMatrix::evaluate(rotated, nu.support(), costs::squared_euclidean));
  if (!sol.ok()) throw NumericalFailure("Procrustes transport solve failed");
  const double v = sol.value;
  if (out) *out = std::move(sol);
  return v;
}

}  // namespace

ProcrustesResult procrustes_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const RotationGrid& grid,
                               ProcrustesRefine refine, int threads) {
  require(mu.dim() == nu.dim(), "Procrustes needs equal ambient dimensions");
  require(mu.dim() == grid.dim(), "rotation grid dimension does not match the measures");
  ProcrustesResult out;
  out.grid_values.assign(grid.size(), 0.0);
  parallel_for(grid.size(), threads, [&](std::size_t k) { out.grid_values[k] = rotated_ot(mu, nu, grid.rotation(k)); });
  out.best_grid_index = static_cast<std::size_t>(
      std::min_element(out.grid_values.begin(), out.grid_values.end()) - out.grid_values.begin());
  out.value = out.grid_values[out.best_grid_index];
  out.rotation = grid.rotation(out.best_grid_index);
  out.trace.push_back(out.value);
  if (refine == ProcrustesRefine::grid_only) return out;

  // Alternate between the optimal plan for the current rotation and the
  // optimal rotation for the current plan; both steps can only lower the value.
  OtSolution sol;
  rotated_ot(mu, nu, out.rotation, &sol);
  for (int iter = 0; iter < 100; ++iter) {
    Matrix cross = Matrix::Zero(mu.dim(), mu.dim());
    const Matrix& plan = sol.plan.entries;
    for (Eigen::Index i = 0; i < plan.rows(); ++i)
      for (Eigen::Index j = 0; j < plan.cols(); ++j)
        if (plan(i, j) > 0.0)
          cross += plan(i, j) * nu.point(static_cast<std::size_t>(j)) * mu.point(static_cast<std::size_t>(i)).transpose();
    const Matrix candidate = project_to_rotation(cross);
    OtSolution next;
    const double value = rotated_ot(mu, nu, candidate, &next);
    if (!(value < out.value)) break;
    const double gain = out.value - value;
    out.value = value;
    out.rotation = candidate;
    out.trace.push_back(value);
    sol = std::move(next);
    if (gain < 1e-10) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sketched Wasserstein

void MixtureSpec::validate() const {
  const Eigen::Index k = alpha.size();
  require(k >= 1 && beta.size() == k, "mixture weights must have equal positive length");
  require(d_matrix.rows() == k && d_matrix.cols() == k, "component distance matrix must be K x K");
  require(d_matrix.allFinite() && d_matrix.minCoeff() >= 0.0, "component distances must be finite and nonnegative");
  for (const Vector* w : {&alpha, &beta})
    require(w->allFinite() && w->minCoeff() >= 0.0 && std::abs(w->sum() - 1.0) <= kWeightTolerance,
            "mixture weights must lie in the simplex");
  if (metric) check_pseudo_metric(d_matrix);
}

namespace {

DiscreteMeasure indexed_measure(const Vector& w) {
  std::vector<double> atoms(static_cast<std::size_t>(w.size()));
  std::iota(atoms.begin(), atoms.end(), 0.0);
  return DiscreteMeasure::on_line(atoms, std::vector<double>(w.data(), w.data() + w.size()));
}

}  // namespace

DiscreteMeasure MixtureSpec::alpha_measure() const { return indexed_measure(alpha); }
DiscreteMeasure MixtureSpec::beta_measure() const { return indexed_measure(beta); }

SketchedResult sketched_wasserstein(const MixtureSpec& spec) {
  spec.validate();
  const OtSolution sol = solve_ot(spec.alpha_measure(), spec.beta_measure(), CostMatrix(spec.d_matrix));
  if (!sol.ok()) throw NumericalFailure("sketched Wasserstein solve failed");
  return {sol.value, sol.plan.entries};
}

LimitSampleSet sketched_limit(const MixtureSpec& spec, const GaussianTripleModel& model, const SampleRatio& ratio,
                              const LimitOptions& options) {
  spec.validate();
  return sample_limit_wcc(spec.alpha_measure(), spec.beta_measure(), CostMatrix(spec.d_matrix), model, ratio,
                          options);
}

// ---------------------------------------------------------------------------
// One-dimensional and sliced OT

double ot_1d(std::vector<double> x, std::vector<double> y, double p) {
  require(!x.empty() && !y.empty(), "ot_1d needs nonempty samples");
  require(p >= 1.0, "ot_1d needs p >= 1");
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const auto n = static_cast<long long>(x.size()), m = static_cast<long long>(y.size());
  double total = 0.0;
  if (n == m) {
    for (long long i = 0; i < n; ++i) total += std::pow(std::abs(x[i] - y[i]), p);
    return total / static_cast<double>(n);
  }
  // Quantile coupling in integer units: every x carries m units, every y n.
  long long i = 0, j = 0, left_x = m, left_y = n;
  while (i < n && j < m) {
    const long long flow = std::min(left_x, left_y);
    total += static_cast<double>(flow) * std::pow(std::abs(x[i] - y[j]), p);
    left_x -= flow;
    left_y -= flow;
    if (left_x == 0) ++i, left_x = m;
    if (left_y == 0) ++j, left_y = n;
  }
  return total / (static_cast<double>(n) * static_cast<double>(m));
}

namespace {

double probe_mesh(const std::vector<Vector>& dirs, std::uint64_t seed) {
  const auto d = dirs.front().size();
  std::mt19937_64 rng = substream(seed, dirs.size());
  std::normal_distribution<double> gauss;
  double mesh = 0.0;
  for (int probe = 0; probe < 2000; ++probe) {
    Vector p(d);
    for (Eigen::Index k = 0; k < d; ++k) p[k] = gauss(rng);
    p.normalize();
    double best = -1.0;
    for (const auto& u : dirs) best = std::max(best, p.dot(u));
    mesh = std::max(mesh, std::sqrt(std::max(0.0, 2.0 - 2.0 * best)));
  }
  return mesh;
}

std::vector<double> equal_weights(std::size_t n) { return std::vector<double>(n, 1.0 / static_cast<double>(n)); }

}  // namespace

SphereGrid::SphereGrid(std::vector<Vector> directions, std::vector<double> weights)
    : directions_(std::move(directions)), weights_(std::move(weights)) {
  require(!directions_.empty(), "sphere grid needs at least one direction");
  require(weights_.size() == directions_.size(), "one quadrature weight per direction");
  const auto d = directions_.front().size();
  require(d >= 2, "sphere grid needs dimension >= 2");
  for (const auto& u : directions_) {
    require(u.size() == d, "directions have inconsistent dimension");
    require(std::abs(u.norm() - 1.0) <= 1e-12, "directions must be unit vectors");
  }
  double total = 0.0;
  for (double w : weights_) {
    require(w >= 0.0, "quadrature weights must be nonnegative");
    total += w;
  }
  require(std::abs(total - 1.0) <= 1e-12, "quadrature weights must sum to one");
  mesh_ = probe_mesh(directions_, 0x73706865ULL);
}

SphereGrid SphereGrid::circle(int count) {
  require(count >= 1, "circle grid needs at least one direction");
  std::vector<Vector> dirs;
  for (int k = 0; k < count; ++k) {
    const double a = 2.0 * std::numbers::pi * k / count;
    dirs.push_back((Vector(2) << std::cos(a), std::sin(a)).finished());
  }
  SphereGrid grid(std::move(dirs), equal_weights(static_cast<std::size_t>(count)));
  grid.mesh_ = 2.0 * std::sin(std::numbers::pi / (2.0 * count));
  return grid;
}

SphereGrid SphereGrid::fibonacci(int count) {
  require(count >= 1, "Fibonacci grid needs at least one direction");
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Vector> dirs;
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    Vector u(3);
    u << r * std::cos(golden * i), r * std::sin(golden * i), z;
    dirs.push_back(u.normalized());
  }
  return SphereGrid(std::move(dirs), equal_weights(static_cast<std::size_t>(count)));
}

SphereGrid SphereGrid::random(int dim, int count, std::uint64_t seed) {
  require(dim >= 2 && count >= 1, "random sphere grid needs dim >= 2 and count >= 1");
  std::mt19937_64 rng = substream(seed, 0);
  std::normal_distribution<double> gauss;
  std::vector<Vector> dirs;
  while (static_cast<int>(dirs.size()) < count) {
    Vector u(dim);
    for (int k = 0; k < dim; ++k) u[k] = gauss(rng);
    if (u.norm() > 1e-8) dirs.push_back(u.normalized());
  }
  return SphereGrid(std::move(dirs), equal_weights(static_cast<std::size_t>(count)));
}

SphereGrid SphereGrid::for_dimension(int dim, int count, std::uint64_t seed) {
  if (dim == 2) return circle(count);
  if (dim == 3) return fibonacci(count);
  return random(dim, count, seed);
}

const char* to_string(SlicedMode mode) {
  switch (mode) {
    case SlicedMode::average: return "average";
    case SlicedMode::max: return "max";
    case SlicedMode::process: return "process";
  }
  return "?";
}

std::vector<double> project(const std::vector<Point>& points, const Vector& direction) {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& x : points) {
    require(x.size() == direction.size(), "projection direction dimension mismatch");
    out.push_back(direction.dot(x));
  }
  return out;
}

SlicedValues sliced_ot(const EmpiricalSample& x, const EmpiricalSample& y, const SphereGrid& grid, double p,
                       int threads) {
  require(x.dim() == grid.dim() && y.dim() == grid.dim(), "sample dimension does not match the sphere grid");
  SlicedValues out;
  out.per_direction.assign(grid.size(), 0.0);
  parallel_for(grid.size(), threads, [&](std::size_t k) {
    out.per_direction[k] = ot_1d(project(x.draws(), grid.direction(k)), project(y.draws(), grid.direction(k)), p);
  });
  for (std::size_t k = 0; k < grid.size(); ++k) out.average += grid.weight(k) * out.per_direction[k];
  out.argmax = static_cast<std::size_t>(
      std::max_element(out.per_direction.begin(), out.per_direction.end()) - out.per_direction.begin());
  out.max = out.per_direction[out.argmax];
  return out;
}

MaxSlicedResult max_sliced_refined(const EmpiricalSample& x, const EmpiricalSample& y, const SphereGrid& grid,
                                   double p, std::uint64_t seed) {
  const SlicedValues base = sliced_ot(x, y, grid, p);
  MaxSlicedResult best{base.max, grid.direction(base.argmax)};
  auto value = [&](const Vector& u) { return ot_1d(project(x.draws(), u), project(y.draws(), u), p); };

  if (grid.dim() == 2) {
    auto at = [](double a) { return (Vector(2) << std::cos(a), std::sin(a)).finished(); };
    const double center = std::atan2(best.direction[1], best.direction[0]);
    const double h = 2.0 * std::asin(std::min(1.0, grid.mesh() / 2.0)) + 1e-12;
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = center - h, hi = center + h;
    double a = hi - invphi * (hi - lo), b = lo + invphi * (hi - lo);
    double fa = value(at(a)), fb = value(at(b));
    for (int iter = 0; iter < 60; ++iter) {
      if (fa >= fb) {
        hi = b, b = a, fb = fa;
        a = hi - invphi * (hi - lo);
        fa = value(at(a));
      } else {
        lo = a, a = b, fa = fb;
        b = lo + invphi * (hi - lo);
        fb = value(at(b));
      }
    }
    const double mid = 0.5 * (lo + hi), fm = value(at(mid));
    if (fm > best.value) best = {fm, at(mid)};
    return best;
  }

  std::mt19937_64 rng = substream(seed, 0x6d6178ULL);
  std::normal_distribution<double> gauss;
  double radius = std::max(grid.mesh(), 1e-3);
  int stale = 0;
  for (int iter = 0; iter < 400 && radius > 1e-9; ++iter) {
    Vector u = best.direction;
    for (Eigen::Index k = 0; k < u.size(); ++k) u[k] += radius * gauss(rng);
    u.normalize();
    const double v = value(u);
    if (v > best.value) {
      best = {v, u};
      stale = 0;
    } else if (++stale == 20) {
      radius /= 2.0;
      stale = 0;
    }
  }
  return best;
}

CostFamily sliced_cost_family(const SphereGrid& grid, double p, double diameter) {
  require(p >= 1.0, "sliced cost needs p >= 1");
  require(diameter >= 0.0 && std::isfinite(diameter), "diameter must be finite");
  return CostFamily(
      grid.directions(),
      [p](const Vector& theta, const Point& x, const Point& y) { return std::pow(std::abs(theta.dot(x - y)), p); },
      p * std::pow(diameter, p));
}

namespace {

double joint_diameter(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  double d = 0.0;
  for (const auto& x : mu.support())
    for (const auto& y : nu.support()) d = std::max(d, (x - y).norm());
  return d;
}

}  // namespace

SlicedLimit sliced_limits(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const SphereGrid& grid, double p,
                          const SampleRatio& ratio, SlicedMode mode, const ExtremalOptions& options) {
  require(mu.dim() == grid.dim() && nu.dim() == grid.dim(), "measure dimension does not match the sphere grid");
  const CostFamily family = sliced_cost_family(grid, p, joint_diameter(mu, nu));
  const auto model = GaussianTripleModel::bridges(mu, nu);
  SlicedLimit out;
  if (mode == SlicedMode::max) {
    out.law = sample_limit_extremal(mu, nu, family, ExtremalMode::sup, model, ratio, options);
    return out;
  }

  std::vector<DualFace> faces;
  for (std::size_t t = 0; t < grid.size(); ++t)
    faces.emplace_back(mu, nu, family.cost_matrix(t, mu.support(), nu.support()), options.face_tol);
  const auto bridges = sample_bridges(model, options.seed, options.n_draws, options.threads);
  const double a = std::sqrt(ratio.lambda()), b = std::sqrt(1.0 - ratio.lambda());
  std::vector<std::vector<double>> draws(grid.size(), std::vector<double>(bridges.size()));
  parallel_for(bridges.size(), options.threads, [&](std::size_t k) {
    const Vector gphi = a * bridges[k].zmu;
    const Vector gpsi = b * bridges[k].znu;
    for (std::size_t t = 0; t < grid.size(); ++t) draws[t][k] = faces[t].maximize(gphi, gpsi);
  });
  if (mode == SlicedMode::process) {
    for (auto& d : draws) out.per_direction.push_back(LimitSampleSet::from(std::move(d)));
    return out;
  }
  std::vector<double> avg(bridges.size(), 0.0);
  for (std::size_t t = 0; t < grid.size(); ++t)
    for (std::size_t k = 0; k < avg.size(); ++k) avg[k] += grid.weight(t) * draws[t][k];
  out.law = LimitSampleSet::from(std::move(avg));
  return out;
}

}  // namespace otl
