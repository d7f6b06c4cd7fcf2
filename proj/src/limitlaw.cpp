#include "otl/limitlaw.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace otl {

CostProcess CostProcess::independent_entries(Matrix std_dev) {
  require(std_dev.allFinite() && (std_dev.size() == 0 || std_dev.minCoeff() >= 0.0),
          "standard deviations must be finite and nonnegative");
  CostProcess p;
  p.kind = Kind::independent_entries;
  p.std_dev = std::move(std_dev);
  return p;
}

CostProcess CostProcess::linear_map(Matrix map, Matrix cov_param) {
  require(map.cols() == cov_param.rows() && cov_param.rows() == cov_param.cols(),
          "linear map and parameter covariance shapes differ");
  require(map.allFinite() && cov_param.allFinite(), "cost process has non-finite entries");
  CostProcess p;
  p.kind = Kind::linear_map;
  p.map = std::move(map);
  p.cov_param = std::move(cov_param);
  return p;
}

Eigen::Index CostProcess::parameters() const {
  switch (kind) {
    case Kind::zero: return 0;
    case Kind::independent_entries: return std_dev.size();
    case Kind::linear_map: return cov_param.rows();
  }
  return 0;
}

GaussianTripleModel GaussianTripleModel::bridges(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                                 CostProcess cost) {
  GaussianTripleModel m;
  m.mu_weights = mu.weights();
  m.nu_weights = nu.weights();
  m.cost = std::move(cost);
  m.validate();
  return m;
}

Matrix GaussianTripleModel::cov_mu() const {
  return Matrix(mu_weights.asDiagonal()) - mu_weights * mu_weights.transpose();
}

Matrix GaussianTripleModel::cov_nu() const {
  return Matrix(nu_weights.asDiagonal()) - nu_weights * nu_weights.transpose();
}

void GaussianTripleModel::validate() const {
  const Eigen::Index n = mu_weights.size(), m = nu_weights.size(), k = cost.parameters();
  require(n > 0 && m > 0, "empty bridge");
  require(mu_weights.minCoeff() >= 0.0 && nu_weights.minCoeff() >= 0.0, "bridge weights must be nonnegative");
  require(std::abs(mu_weights.sum() - 1.0) <= 1e-10 && std::abs(nu_weights.sum() - 1.0) <= 1e-10,
          "bridge weights must sum to one");
  if (cost.kind == CostProcess::Kind::independent_entries)
    require(cost.std_dev.rows() == n && cost.std_dev.cols() == m, "cost noise shape does not match supports");
  if (cost.kind == CostProcess::Kind::linear_map)
    require(cost.map.rows() == n * m, "linear map rows must equal N * M");
  if (cross_mu.size() > 0) require(cross_mu.rows() == k && cross_mu.cols() == n, "cross_mu must be k x N");
  if (cross_nu.size() > 0) require(cross_nu.rows() == k && cross_nu.cols() == m, "cross_nu must be k x M");
  if (has_cross()) require(k > 0, "cross covariance without a cost process");
}

namespace {

Matrix psd_factor(const Matrix& cov) {
  const Eigen::Index dim = cov.rows();
  Matrix sym = 0.5 * (cov + cov.transpose());
  const double jitter = 1e-12 * std::max(sym.trace(), 0.0) / static_cast<double>(std::max<Eigen::Index>(dim, 1));
  sym.diagonal().array() += jitter;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) throw NumericalFailure("covariance factorization failed");
  const Vector& values = eig.eigenvalues();
  const double top = std::max(1.0, values.cwiseAbs().maxCoeff());
  if (values.minCoeff() < -1e-9 * top) throw InvalidArgument("covariance not positive semidefinite");
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < dim; ++i)
    if (values[i] > 0.0) keep.push_back(i);
  Matrix factor(dim, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t r = 0; r < keep.size(); ++r)
    factor.col(static_cast<Eigen::Index>(r)) = eig.eigenvectors().col(keep[r]) * std::sqrt(values[keep[r]]);
  return factor;
}

// Exact multinomial bridge: sqrt(w) * xi - w (sqrt(w) . xi).
Vector bridge(const Vector& w, std::mt19937_64& rng, std::normal_distribution<double>& normal) {
  Vector xi(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) xi[i] = normal(rng);
  const Vector root = w.cwiseSqrt();
  return root.cwiseProduct(xi) - w * root.dot(xi);
}

void center(Vector& z) {
  if (z.size() > 0) z.array() -= z.mean();
}

}  // namespace

TripleSampler::TripleSampler(GaussianTripleModel model) : model_(std::move(model)) {
  model_.validate();
  const Eigen::Index n = model_.mu_weights.size(), m = model_.nu_weights.size(), k = model_.cost.parameters();
  if (model_.has_cross()) {
    const Matrix param_cov =
        model_.cost.kind == CostProcess::Kind::linear_map
            ? model_.cost.cov_param
            : Matrix(model_.cost.std_dev.reshaped<Eigen::RowMajor>().array().square().matrix().asDiagonal());
    Matrix joint = Matrix::Zero(n + m + k, n + m + k);
    joint.block(0, 0, n, n) = model_.cov_mu();
    joint.block(n, n, m, m) = model_.cov_nu();
    joint.block(n + m, n + m, k, k) = param_cov;
    if (model_.cross_mu.size() > 0) {
      joint.block(n + m, 0, k, n) = model_.cross_mu;
      joint.block(0, n + m, n, k) = model_.cross_mu.transpose();
    }
    if (model_.cross_nu.size() > 0) {
      joint.block(n + m, n, k, m) = model_.cross_nu;
      joint.block(n, n + m, m, k) = model_.cross_nu.transpose();
    }
    joint_factor_ = psd_factor(joint);
  } else if (model_.cost.kind == CostProcess::Kind::linear_map) {
    param_factor_ = psd_factor(model_.cost.cov_param);
  }
}

TripleDraw TripleSampler::draw(std::mt19937_64& rng) const {
  const Eigen::Index n = model_.mu_weights.size(), m = model_.nu_weights.size(), k = model_.cost.parameters();
  std::normal_distribution<double> normal;
  TripleDraw d;
  Vector zp;
  if (joint_factor_.size() > 0) {
    Vector xi(joint_factor_.cols());
    for (Eigen::Index i = 0; i < xi.size(); ++i) xi[i] = normal(rng);
    const Vector z = joint_factor_ * xi;
    d.zmu = z.head(n);
    d.znu = z.segment(n, m);
    zp = z.tail(k);
  } else {
    d.zmu = bridge(model_.mu_weights, rng, normal);
    d.znu = bridge(model_.nu_weights, rng, normal);
    if (model_.cost.kind == CostProcess::Kind::independent_entries) {
      zp.resize(k);
      const auto sd = model_.cost.std_dev.reshaped<Eigen::RowMajor>();
      for (Eigen::Index i = 0; i < k; ++i) zp[i] = sd[i] * normal(rng);
    } else if (model_.cost.kind == CostProcess::Kind::linear_map) {
      Vector xi(param_factor_.cols());
      for (Eigen::Index i = 0; i < xi.size(); ++i) xi[i] = normal(rng);
      zp = param_factor_ * xi;
    }
  }
  center(d.zmu);
  center(d.znu);
  switch (model_.cost.kind) {
    case CostProcess::Kind::zero: break;
    case CostProcess::Kind::independent_entries:
      d.zc = zp.reshaped<Eigen::RowMajor>(n, m);
      break;
    case CostProcess::Kind::linear_map: {
      const Vector flat = model_.cost.map * zp;
      d.zc = flat.reshaped<Eigen::RowMajor>(n, m);
      d.zp = zp;
      break;
    }
  }
  return d;
}

std::vector<TripleDraw> sample_bridges(const GaussianTripleModel& model, std::uint64_t seed, int n_draws,
                                       int threads) {
  require(n_draws >= 0, "n_draws must be nonnegative");
  const TripleSampler sampler(model);
  std::vector<TripleDraw> out(static_cast<std::size_t>(n_draws));
  parallel_for(out.size(), threads, [&](std::size_t k) {
    auto rng = substream(seed, k);
    out[k] = sampler.draw(rng);
  });
  return out;
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  require(!sorted.empty(), "quantile of empty data");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Summary summarize(const std::vector<double>& draws) {
  Summary s;
  if (draws.empty()) return s;
  const auto n = static_cast<double>(draws.size());
  for (double d : draws) s.mean += d;
  s.mean /= n;
  double ss = 0.0;
  for (double d : draws) ss += (d - s.mean) * (d - s.mean);
  s.std = draws.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  std::vector<double> sorted = draws;
  std::sort(sorted.begin(), sorted.end());
  s.q025 = quantile_sorted(sorted, 0.025);
  s.q50 = quantile_sorted(sorted, 0.5);
  s.q975 = quantile_sorted(sorted, 0.975);
  return s;
}

LimitSampleSet LimitSampleSet::from(std::vector<double> draws) {
  for (double d : draws) require(std::isfinite(d), "non-finite limit draw");
  LimitSampleSet set;
  set.summary = summarize(draws);
  set.draws = std::move(draws);
  return set;
}

namespace {

void check_model_fits(const GaussianTripleModel& model, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  require(model.mu_weights.size() == static_cast<Eigen::Index>(mu.size()) &&
              model.nu_weights.size() == static_cast<Eigen::Index>(nu.size()),
          "model supports do not match measures");
  require((model.mu_weights - mu.weights()).cwiseAbs().maxCoeff() <= 1e-12 &&
              (model.nu_weights - nu.weights()).cwiseAbs().maxCoeff() <= 1e-12,
          "model bridge weights do not match measures");
}

}  // namespace

LimitSampleSet sample_limit_wcc(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c,
                                const GaussianTripleModel& model, const SampleRatio& ratio,
                                const LimitOptions& options) {
  c.check_shape(mu, nu);
  check_model_fits(model, mu, nu);
  require(options.n_draws > 0, "n_draws must be positive");
  const OtSolution solution = solve_ot(mu, nu, c);
  if (!solution.ok()) throw NumericalFailure("transport solver failed");
  const PrimalFace primal(mu, nu, c, solution, options.face_tol);
  const DualFace dual(mu, nu, c, solution, options.face_tol);
  const TripleSampler sampler(model);
  const double a = std::sqrt(ratio.lambda());
  const double b = ratio.one_sample() ? 0.0 : std::sqrt(1.0 - ratio.lambda());
  const bool with_cost = !model.cost.is_zero();

  std::vector<double> draws(static_cast<std::size_t>(options.n_draws));
  parallel_for(draws.size(), options.threads, [&](std::size_t k) {
    auto rng = substream(options.seed, k);
    const TripleDraw d = sampler.draw(rng);
    const double cost_term = with_cost ? primal.minimize(d.zc) : 0.0;
    draws[k] = cost_term + dual.maximize(a * d.zmu, b * d.znu);
  });
  return LimitSampleSet::from(std::move(draws));
}

const char* to_string(ExtremalMode mode) { return mode == ExtremalMode::inf ? "inf" : "sup"; }

ExtremalSetup extremal_setup(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostFamily& family,
                             ExtremalMode mode, std::optional<double> arg_tol) {
  require(family.size() > 0, "empty parameter grid");
  ExtremalSetup setup;
  for (std::size_t t = 0; t < family.size(); ++t) {
    const OtSolution s = solve_ot(mu, nu, family.cost_matrix(t, mu.support(), nu.support()));
    if (!s.ok()) throw NumericalFailure("transport solver failed");
    setup.values.push_back(s.value);
  }
  setup.extremum = mode == ExtremalMode::inf ? *std::min_element(setup.values.begin(), setup.values.end())
                                             : *std::max_element(setup.values.begin(), setup.values.end());
  const double tol = arg_tol.value_or(1e-7 * (1.0 + std::abs(setup.extremum)));
  for (std::size_t t = 0; t < setup.values.size(); ++t)
    if (std::abs(setup.values[t] - setup.extremum) <= tol) setup.optimizers.push_back(t);
  return setup;
}

LimitSampleSet sample_limit_extremal(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostFamily& family,
                                     ExtremalMode mode, const GaussianTripleModel& model, const SampleRatio& ratio,
                                     const ExtremalOptions& options) {
  check_model_fits(model, mu, nu);
  require(options.n_draws > 0, "n_draws must be positive");
  const ExtremalSetup setup = extremal_setup(mu, nu, family, mode, options.arg_tol);
  std::vector<DualFace> faces;
  for (std::size_t t : setup.optimizers) {
    faces.emplace_back(mu, nu, family.cost_matrix(t, mu.support(), nu.support()), options.face_tol);
    if (mode == ExtremalMode::inf && !are_potentials_unique(faces.back()).unique)
      throw InvalidArgument("KP violated");
  }
  GaussianTripleModel bridges_only = model;
  bridges_only.cost = CostProcess::zero();
  bridges_only.cross_mu.resize(0, 0);
  bridges_only.cross_nu.resize(0, 0);
  const TripleSampler sampler(bridges_only);
  const double a = std::sqrt(ratio.lambda());
  const double b = ratio.one_sample() ? 0.0 : std::sqrt(1.0 - ratio.lambda());

  std::vector<double> draws(static_cast<std::size_t>(options.n_draws));
  parallel_for(draws.size(), options.threads, [&](std::size_t k) {
    auto rng = substream(options.seed, k);
    const TripleDraw d = sampler.draw(rng);
    const Vector gphi = a * d.zmu, gpsi = b * d.znu;
    double best = mode == ExtremalMode::inf ? std::numeric_limits<double>::infinity()
                                            : -std::numeric_limits<double>::infinity();
    for (const DualFace& face : faces) {
      if (mode == ExtremalMode::inf) best = std::min(best, face.evaluate_at_solution(gphi, gpsi));
      else best = std::max(best, face.maximize(gphi, gpsi));
    }
    draws[k] = best;
  });
  return LimitSampleSet::from(std::move(draws));
}

CostProcess gof_cost_process_model(const Matrix& theta_cov, const std::vector<Matrix>& jacobian,
                                   const Matrix& g_inv, const std::vector<Point>& y_support) {
  const Eigen::Index k = theta_cov.rows();
  require(theta_cov.cols() == k && k > 0, "parameter covariance must be square");
  const auto n = static_cast<Eigen::Index>(jacobian.size());
  const auto m = static_cast<Eigen::Index>(y_support.size());
  require(n > 0 && m > 0, "empty support");
  require(g_inv.rows() == n, "inverse-transformed points do not match jacobians");
  const Eigen::Index d = g_inv.cols();
  for (const Matrix& j : jacobian) require(j.rows() == d && j.cols() == k, "jacobian must be d x k");
  for (const Point& y : y_support) require(y.size() == d, "target dimension mismatch");
  if (theta_cov.cwiseAbs().maxCoeff() == 0.0) return CostProcess::zero();
  Matrix map(n * m, k);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      const Vector diff = g_inv.row(i).transpose() - y_support[static_cast<std::size_t>(j)];
      map.row(i * m + j) = 2.0 * diff.transpose() * jacobian[static_cast<std::size_t>(i)];
    }
  return CostProcess::linear_map(std::move(map), theta_cov);
}

}  // namespace otl
