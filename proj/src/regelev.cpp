#include "otl/regelev.hpp"

#include <cmath>

namespace otl {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Matrix apply_bounded(const Matrix& c, const elevation::Bounded& s) {
  return c.cwiseMax(-s.bound).cwiseMin(s.bound);
}

Matrix apply_modulus(const Matrix& c, const elevation::Modulus& s) {
  const Eigen::Index n = c.rows();
  Matrix penalty(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < n; ++k) penalty(i, k) = 2.0 * s.w(s.metric(i, k));
  Matrix out(c.rows(), c.cols());
  for (Eigen::Index j = 0; j < c.cols(); ++j)
    for (Eigen::Index i = 0; i < n; ++i) out(i, j) = (c.col(j) + penalty.col(i)).minCoeff();
  return out;
}

Matrix apply_holder(const Matrix& c, const elevation::Holder& s) {
  const Eigen::Index n = c.rows();
  const auto d = static_cast<Eigen::Index>(s.gradient.size());
  const double kappa = s.kappa < 0.0 ? 2.0 * std::sqrt(static_cast<double>(d)) : s.kappa;
  Matrix out(c.rows(), c.cols());
  for (Eigen::Index j = 0; j < c.cols(); ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      double best = c(i, j);
      for (Eigen::Index k = 0; k < n; ++k) {
        if (k == i) continue;
        const Point diff = s.rows[static_cast<std::size_t>(i)] - s.rows[static_cast<std::size_t>(k)];
        double v = c(k, j) + kappa * std::pow(diff.norm(), s.gamma);
        for (Eigen::Index a = 0; a < d; ++a) v += s.gradient[static_cast<std::size_t>(a)](k, j) * diff[a];
        best = std::min(best, v);
      }
      out(i, j) = best;
    }
  return out;
}

Matrix apply(const Matrix& c, const ElevationSpec& spec);

Matrix apply_combined(const Matrix& c, const elevation::Combined& s) {
  Matrix out = Matrix::Zero(c.rows(), c.cols());
  for (const auto& chart : s.charts) {
    Matrix sub(static_cast<Eigen::Index>(chart.rows.size()), c.cols());
    for (std::size_t r = 0; r < chart.rows.size(); ++r) sub.row(static_cast<Eigen::Index>(r)) = c.row(chart.rows[r]);
    const Matrix lifted = apply(sub, *chart.spec);
    for (std::size_t r = 0; r < chart.rows.size(); ++r)
      out.row(chart.rows[r]) += chart.eta[chart.rows[r]] * lifted.row(static_cast<Eigen::Index>(r));
  }
  return out;
}

Matrix apply(const Matrix& c, const ElevationSpec& spec) {
  return std::visit(Overloaded{[&](const elevation::Bounded& s) { return apply_bounded(c, s); },
                               [&](const elevation::Modulus& s) { return apply_modulus(c, s); },
                               [&](const elevation::Holder& s) { return apply_holder(c, s); },
                               [&](const elevation::Combined& s) { return apply_combined(c, s); }},
                    spec.kind);
}

}  // namespace

void ElevationSpec::validate(Eigen::Index n, Eigen::Index m) const {
  std::visit(Overloaded{
                 [&](const elevation::Bounded& s) {
                   require(std::isfinite(s.bound) && s.bound > 0.0, "bound must be positive");
                 },
                 [&](const elevation::Modulus& s) {
                   require(s.metric.rows() == n && s.metric.cols() == n, "metric shape does not match cost rows");
                   check_pseudo_metric(s.metric);
                 },
                 [&](const elevation::Holder& s) {
                   require(static_cast<Eigen::Index>(s.rows.size()) == n, "support size does not match cost rows");
                   require(!s.gradient.empty(), "gradient tensor is empty");
                   require(static_cast<Eigen::Index>(s.gradient.size()) == s.rows.front().size(),
                           "gradient dimension does not match support");
                   for (const Matrix& g : s.gradient)
                     require(g.rows() == n && g.cols() == m && g.allFinite(), "gradient shape does not match cost");
                   require(s.gamma > 1.0 && s.gamma <= 2.0, "gamma must lie in (1, 2]");
                 },
                 [&](const elevation::Combined& s) {
                   require(!s.charts.empty(), "no charts");
                   Vector total = Vector::Zero(n);
                   for (const auto& chart : s.charts) {
                     require(chart.spec != nullptr, "chart without spec");
                     require(chart.eta.size() == n, "partition weights have wrong length");
                     std::vector<bool> inside(static_cast<std::size_t>(n), false);
                     for (int r : chart.rows) {
                       require(r >= 0 && r < n, "chart row out of range");
                       inside[static_cast<std::size_t>(r)] = true;
                     }
                     for (Eigen::Index i = 0; i < n; ++i) {
                       require(chart.eta[i] >= 0.0, "partition weights must be nonnegative");
                       require(inside[static_cast<std::size_t>(i)] || chart.eta[i] == 0.0,
                               "partition weight outside its chart");
                     }
                     total += chart.eta;
                     chart.spec->validate(static_cast<Eigen::Index>(chart.rows.size()), m);
                   }
                   require((total.array() - 1.0).abs().maxCoeff() <= 1e-12, "partition weights do not sum to one");
                 }},
             kind);
}

CostMatrix elevate(const CostMatrix& c, const ElevationSpec& spec) {
  spec.validate(c.rows(), c.cols());
  return CostMatrix(apply(c.values(), spec));
}

CostMatrix elevate_bounded_modulus(const CostMatrix& c, double bound, const ModulusOfContinuity& w,
                                   const Matrix& metric) {
  return elevate(elevate(c, ElevationSpec::bounded(bound)), ElevationSpec::modulus(w, metric));
}

std::vector<Matrix> numerical_x_gradient(const std::vector<Point>& rows, const std::vector<Point>& cols,
                                         const CostMatrix::Function& cost, double step) {
  require(!rows.empty() && !cols.empty(), "empty support");
  const auto d = rows.front().size();
  const auto n = static_cast<Eigen::Index>(rows.size()), m = static_cast<Eigen::Index>(cols.size());
  std::vector<Matrix> grad(static_cast<std::size_t>(d), Matrix(n, m));
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index i = 0; i < n; ++i) {
      Point hi = rows[static_cast<std::size_t>(i)], lo = hi;
      hi[a] += step;
      lo[a] -= step;
      for (Eigen::Index j = 0; j < m; ++j)
        grad[static_cast<std::size_t>(a)](i, j) =
            (cost(hi, cols[static_cast<std::size_t>(j)]) - cost(lo, cols[static_cast<std::size_t>(j)])) / (2.0 * step);
    }
  return grad;
}

std::vector<ProbeRow> elevation_convergence_probe(const CostMatrix& c, double sigma, const ElevationSpec& spec,
                                                  const std::vector<double>& rates, int reps, std::uint64_t seed,
                                                  int threads) {
  require(sigma >= 0.0 && std::isfinite(sigma), "noise scale must be nonnegative");
  require(reps > 0, "reps must be positive");
  const CostMatrix fixed = elevate(c, spec);
  if ((fixed.values() - c.values()).cwiseAbs().maxCoeff() > 1e-12)
    throw InvalidArgument("population cost not a fixed point");

  std::vector<ProbeRow> table;
  for (std::size_t r = 0; r < rates.size(); ++r) {
    const double rate = rates[r];
    require(rate > 0.0 && std::isfinite(rate), "rates must be positive");
    std::vector<double> stats(static_cast<std::size_t>(reps));
    parallel_for(stats.size(), threads, [&](std::size_t k) {
      auto rng = substream(seed, r * 1000003ULL + k);
      std::normal_distribution<double> normal;
      Matrix noisy = c.values();
      for (Eigen::Index e = 0; e < noisy.size(); ++e) noisy.data()[e] += sigma / rate * normal(rng);
      const Matrix lifted = apply(noisy, spec);
      stats[k] = rate * (lifted - noisy).cwiseAbs().maxCoeff();
    });
    std::vector<double> sorted = stats;
    std::sort(sorted.begin(), sorted.end());
    ProbeRow row;
    row.rate = rate;
    const std::size_t h = sorted.size() / 2;
    row.median = sorted.size() % 2 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
    for (double s : stats) row.mean += s / static_cast<double>(stats.size());
    row.max = sorted.back();
    table.push_back(row);
  }
  return table;
}

}  // namespace otl
