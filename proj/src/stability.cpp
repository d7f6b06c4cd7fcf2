#include "otl/stability.hpp"

#include <cmath>

namespace otl {

void PerturbationTriple::check_admissible(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const {
  const auto n = static_cast<Eigen::Index>(mu.size()), m = static_cast<Eigen::Index>(nu.size());
  require(dmu.size() == n && dnu.size() == m, "perturbation shape does not match measures");
  require(dc.rows() == n && dc.cols() == m, "cost perturbation shape does not match measures");
  require(dmu.allFinite() && dnu.allFinite() && dc.allFinite(), "perturbation has non-finite entries");
  require(std::abs(dmu.sum()) <= 1e-12 && std::abs(dnu.sum()) <= 1e-12, "inadmissible direction: mass not conserved");
  for (Eigen::Index i = 0; i < n; ++i)
    require(mu.weight(static_cast<std::size_t>(i)) > 0.0 || dmu[i] >= 0.0, "inadmissible direction: negative mass");
  for (Eigen::Index j = 0; j < m; ++j)
    require(nu.weight(static_cast<std::size_t>(j)) > 0.0 || dnu[j] >= 0.0, "inadmissible direction: negative mass");
}

namespace {

// Any optimal pair of the perturbed problem yields an upper bound, so when
// massless atoms make the unrestricted face unbounded the bounded box is
// searched instead.
double upper_dual_term(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c,
                       const Vector& dmu, const Vector& dnu, std::optional<double> face_tol) {
  const DualFace face(mu, nu, c, face_tol);
  try {
    return face.maximize(dmu, dnu);
  } catch (const InvalidArgument&) {
    return DualFace(mu, nu, c, face.solution(), face_tol, true).maximize(dmu, dnu);
  }
}

void require_same_support(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  require(a.size() == b.size(), "support mismatch");
  for (std::size_t i = 0; i < a.size(); ++i)
    require(a.point(i).size() == b.point(i).size() && a.point(i) == b.point(i), "support mismatch");
}

}  // namespace

SandwichBounds sandwich_bounds(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const DiscreteMeasure& mu_t,
                               const DiscreteMeasure& nu_t, const CostMatrix& c, const CostMatrix& c_t,
                               std::optional<double> face_tol) {
  require_same_support(mu, mu_t);
  require_same_support(nu, nu_t);
  c.check_shape(mu, nu);
  c_t.check_shape(mu, nu);
  const Vector dmu = mu_t.weights() - mu.weights();
  const Vector dnu = nu_t.weights() - nu.weights();
  const Matrix dc = c_t.values() - c.values();

  // Lower: optimal plans for the perturbed problem, potentials for the base one.
  const double lower = PrimalFace(mu_t, nu_t, c_t, face_tol).minimize(dc) +
                       DualFace(mu, nu, c, face_tol).maximize(dmu, dnu);
  // Upper, first split: cost change at fixed perturbed marginals, then the
  // marginal change under c.
  const double upper_a = PrimalFace(mu_t, nu_t, c, face_tol).minimize(dc) +
                         upper_dual_term(mu_t, nu_t, c, dmu, dnu, face_tol);
  // Upper, second split: cost change at the base marginals, then the marginal
  // change under c_t, evaluated directly on the c_t-transforms.
  const double upper_b = PrimalFace(mu, nu, c, face_tol).minimize(dc) +
                         upper_dual_term(mu_t, nu_t, c_t, dmu, dnu, face_tol);
  return {lower, std::min(upper_a, upper_b)};
}

double gateaux_derivative(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c,
                          const PerturbationTriple& delta, std::optional<double> face_tol) {
  delta.check_admissible(mu, nu);
  const OtSolution solution = solve_ot(mu, nu, c);
  if (!solution.ok()) throw NumericalFailure("transport solver failed");
  return PrimalFace(mu, nu, c, solution, face_tol).minimize(delta.dc) +
         DualFace(mu, nu, c, solution, face_tol).maximize(delta.dmu, delta.dnu);
}

std::pair<DiscreteMeasure, DiscreteMeasure> embed_in_union(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  require(a.dim() == b.dim(), "dimension mismatch");
  std::vector<Point> support = a.support();
  for (const Point& p : b.support()) {
    bool found = false;
    for (const Point& q : a.support()) found = found || p == q;
    if (!found) support.push_back(p);
  }
  auto pad = [&](const DiscreteMeasure& mu) {
    std::vector<double> w(support.size(), 0.0);
    for (std::size_t i = 0; i < mu.size(); ++i)
      for (std::size_t k = 0; k < support.size(); ++k)
        if (support[k] == mu.point(i)) {
          w[k] = mu.weight(i);
          break;
        }
    return DiscreteMeasure(support, w);
  };
  return {pad(a), pad(b)};
}

}  // namespace otl
