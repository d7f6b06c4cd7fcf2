#pragma once

// Regularity elevation: maps an arbitrary cost matrix to one that is bounded,
// has a prescribed modulus in x, or is locally Hölder-dominated, while fixing
// every matrix that already has the property.

#include <memory>
#include <variant>
#include <vector>

#include "otl/measures.hpp"

namespace otl {

struct ElevationSpec;

namespace elevation {

/// Clamp to [-bound, bound].
struct Bounded {
  double bound;
};

/// (Psi c)_ij = min_i' c_i'j + 2 w(d(i, i')).
struct Modulus {
  ModulusOfContinuity w;
  Matrix metric;  // N x N pseudo-metric on the row support
};

/// (Psi c)_ij = min_i' c_i'j + <grad_x c(x_i', y_j), x_i - x_i'> + kappa |x_i - x_i'|^gamma
/// with kappa = 2 sqrt(d) unless overridden.
struct Holder {
  std::vector<Point> rows;        // row support x_1..x_N
  std::vector<Matrix> gradient;   // d matrices of shape N x M: d/dx_k c(x_i, y_j)
  double gamma = 2.0;
  double kappa = -1.0;            // negative selects 2 sqrt(d)
};

/// Chart-wise elevation: the sub-spec acts on the chart's rows (in the order
/// listed) and the results are blended with the partition weights eta.
struct Chart {
  std::vector<int> rows;
  Vector eta;  // length N, zero outside `rows`
  std::shared_ptr<const ElevationSpec> spec;
};
struct Combined {
  std::vector<Chart> charts;
};

}  // namespace elevation

struct ElevationSpec {
  std::variant<elevation::Bounded, elevation::Modulus, elevation::Holder, elevation::Combined> kind;

  static ElevationSpec bounded(double bound) { return {elevation::Bounded{bound}}; }
  static ElevationSpec modulus(ModulusOfContinuity w, Matrix metric) {
    return {elevation::Modulus{std::move(w), std::move(metric)}};
  }
  /// Throws unless the spec is consistent with an N x M cost matrix.
  void validate(Eigen::Index n, Eigen::Index m) const;
};

CostMatrix elevate(const CostMatrix& c, const ElevationSpec& spec);

/// Clamp to [-bound, bound] followed by the modulus elevation; the result is
/// bounded by `bound` and has modulus 2w.
CostMatrix elevate_bounded_modulus(const CostMatrix& c, double bound, const ModulusOfContinuity& w,
                                   const Matrix& metric);

/// Central-difference x-gradient of a cost function on the product support.
std::vector<Matrix> numerical_x_gradient(const std::vector<Point>& rows, const std::vector<Point>& cols,
                                         const CostMatrix::Function& cost, double step = 1e-5);

struct ProbeRow {
  double rate = 0.0;
  double median = 0.0;
  double mean = 0.0;
  double max = 0.0;
};

/// Monte Carlo over c_n = c + (sigma / a_n) Z with Z standard Gaussian,
/// reporting a_n ||Psi(c_n) - c_n||_inf per rate. Throws "population cost not
/// a fixed point" unless elevate(c) = c.
std::vector<ProbeRow> elevation_convergence_probe(const CostMatrix& c, double sigma, const ElevationSpec& spec,
                                                  const std::vector<double>& rates, int reps, std::uint64_t seed,
                                                  int threads = 1);

}  // namespace otl
