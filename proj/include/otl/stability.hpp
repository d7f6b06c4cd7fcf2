#pragma once

// First-order behaviour of the OT value under joint perturbation of the
// marginals and the cost: two-sided bounds via the optimal faces, and the
// one-sided directional derivative.

#include <optional>
#include <utility>

#include "otl/transport.hpp"

namespace otl {

struct SandwichBounds {
  double lower = 0.0;
  double upper = 0.0;
  bool contains(double value, double tol = 1e-7) const { return lower - tol <= value && value <= upper + tol; }
};

/// Direction (dmu, dnu, dc). The weight components sum to zero.
struct PerturbationTriple {
  Vector dmu;
  Vector dnu;
  Matrix dc;

  static PerturbationTriple zero(Eigen::Index n, Eigen::Index m) {
    return {Vector::Zero(n), Vector::Zero(m), Matrix::Zero(n, m)};
  }
  PerturbationTriple scaled(double t) const { return {t * dmu, t * dnu, t * dc}; }

  /// Throws unless shapes fit, the sums vanish within 1e-12 and no
  /// massless atom receives negative mass.
  void check_admissible(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const;
};

/// Bounds lower <= OT(mu_t, nu_t, c_t) - OT(mu, nu, c) <= upper. All four
/// measures must share the supports indexing the cost matrices; see
/// embed_in_union for measures on different supports.
SandwichBounds sandwich_bounds(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const DiscreteMeasure& mu_t,
                               const DiscreteMeasure& nu_t, const CostMatrix& c, const CostMatrix& c_t,
                               std::optional<double> face_tol = std::nullopt);

/// Directional derivative of the OT value at (mu, nu, c) along `delta`:
/// min over the primal face of <dc, pi> plus max over the dual face of
/// dmu.phi + dnu.psi.
double gateaux_derivative(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c,
                          const PerturbationTriple& delta, std::optional<double> face_tol = std::nullopt);

/// Both measures re-expressed on the union of their supports (first
/// measure's points first), with zero weight on the added points.
std::pair<DiscreteMeasure, DiscreteMeasure> embed_in_union(const DiscreteMeasure& a, const DiscreteMeasure& b);

}  // namespace otl
