#pragma once

// Exact discrete optimal transport and linear programs over the optimal faces.
//
// solve_ot runs a transportation (bipartite network) simplex and returns the
// value, a vertex plan and dual potentials with zero duality gap. The face
// programs
//
//   min <g, pi>            over couplings with <c, pi> <= OT + tol
//   max gphi.phi + gpsi.psi over dual-feasible pairs with mu.phi + nu.psi >= OT - tol
//
// evaluate the linear functionals that appear in the limit laws and in the
// directional derivative of the OT value.

#include <optional>
#include <string>

#include "otl/linprog.hpp"
#include "otl/measures.hpp"

namespace otl {

/// Coupling of two finite measures. Row sums match mu and column sums match
/// nu within 1e-9; tiny negative entries are clamped to zero.
struct TransportPlan {
  Matrix entries;

  double cost(const CostMatrix& c) const { return (entries.array() * c.values().array()).sum(); }
  double max_marginal_error(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const;
};

/// Dual potentials (phi on the mu-support, psi on the nu-support) with
/// phi_i + psi_j <= c_ij.
struct DualPair {
  Vector phi;
  Vector psi;

  double objective(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const {
    return mu.integrate(phi) + nu.integrate(psi);
  }
  /// max_ij (phi_i + psi_j - c_ij); nonpositive for feasible pairs.
  double max_violation(const CostMatrix& c) const;
};

enum class SolveStatus { optimal, infeasible, numerical_failure };
const char* to_string(SolveStatus status);

struct OtSolution {
  double value = 0.0;
  TransportPlan plan;
  DualPair dual;
  SolveStatus status = SolveStatus::numerical_failure;
  int iterations = 0;

  bool ok() const { return status == SolveStatus::optimal; }
};

/// Transportation simplex with a spanning-tree basis. Entering cells follow
/// the most negative reduced cost (ties to the lowest row-major index) and
/// the rule falls back to Bland's after a streak of degenerate pivots.
/// Supplies and demands need not be normalized but must have equal totals.
class TransportSolver {
 public:
  OtSolution solve(const Vector& supply, const Vector& demand, const Matrix& cost) const;
  OtSolution solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c) const;
};

OtSolution solve_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c);

/// Default inflation of the optimal faces: 1e-9 (1 + |OT|).
double default_face_tol(double ot_value);

/// Primal optimal face of (mu, nu, c).
///
/// A coupling lies on the face iff it is supported on the cells whose reduced
/// cost c_ij - phi_i - psi_j under the optimal potentials is at most the face
/// tolerance. minimize() therefore solves a transport problem with cost g on
/// those cells and a prohibitive penalty elsewhere, falling back to the dense
/// simplex if any mass leaks onto a penalized cell.
class PrimalFace {
 public:
  PrimalFace(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c,
             std::optional<double> face_tol = std::nullopt);
  PrimalFace(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c,
             const OtSolution& solution, std::optional<double> face_tol = std::nullopt);

  /// min <g, pi> over the face; optionally returns the minimizing plan.
  double minimize(const Matrix& g, Matrix* argmin = nullptr) const;
  double ot_value() const { return ot_; }
  double face_tol() const { return tol_; }
  const OtSolution& solution() const { return solution_; }
  /// Cells admitted to the face.
  const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& tight_cells() const { return tight_; }

 private:
  void build();
  double minimize_dense(const Matrix& g, Matrix* argmin) const;
  Vector mu_, nu_;
  Matrix cost_;
  OtSolution solution_;
  double ot_ = 0.0;
  double tol_ = 0.0;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> tight_;
};

/// Dual optimal face of (mu, nu, c).
///
/// The face is invariant under (phi + k, psi - k), so a linear functional is
/// bounded on it only when sum(gphi) = sum(gpsi); otherwise "dual face
/// unbounded under g" is thrown. The maximizer is read off the optimal
/// potentials of the transport problem with marginals (gphi + s mu,
/// gpsi + s nu): once s is large enough those potentials lie on the face and
/// maximize g there. With `box` set, |phi|, |psi| <= 2 ||c|| + 1 is imposed
/// and the boxed program is solved directly by the dense simplex.
class DualFace {
 public:
  DualFace(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c,
           std::optional<double> face_tol = std::nullopt, bool box = false);
  DualFace(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c,
           const OtSolution& solution, std::optional<double> face_tol = std::nullopt, bool box = false);

  double maximize(const Vector& gphi, const Vector& gpsi, DualPair* argmax = nullptr) const;
  double ot_value() const { return ot_; }
  const OtSolution& solution() const { return solution_; }
  /// gphi.phi* + gpsi.psi* at the solver's potentials.
  double evaluate_at_solution(const Vector& gphi, const Vector& gpsi) const {
    return gphi.dot(solution_.dual.phi) + gpsi.dot(solution_.dual.psi);
  }

 private:
  double maximize_boxed(const Vector& gphi, const Vector& gpsi, DualPair* argmax) const;
  double maximize_dense(const Vector& gphi, const Vector& gpsi) const;
  Vector mu_, nu_;
  Matrix cost_;
  OtSolution solution_;
  double ot_ = 0.0;
  double tol_ = 0.0;
  bool box_ = false;
};

double min_over_primal_face(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c,
                            const Matrix& g, std::optional<double> face_tol = std::nullopt);

double max_over_dual_face(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c,
                          const Vector& gphi, const Vector& gpsi,
                          std::optional<double> face_tol = std::nullopt, bool box = false);

/// Heuristic certificate from random perturbation directions. `witness`
/// receives a direction that exposes a second optimizer when one is found.
struct UniquenessReport {
  bool unique = true;
  double max_deviation = 0.0;
  std::optional<Matrix> witness_plan_direction;
  std::optional<std::pair<Vector, Vector>> witness_dual_direction;
};

/// Primal uniqueness: for `trials` Gaussian directions g, the face minimum
/// must equal <g, pi*> within 1e-7 (1 + |<g, pi*>|). `eps` is the face
/// inflation used by the probes.
UniquenessReport is_plan_unique(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c,
                                int trials, double eps, std::uint64_t seed = 0x706c616eULL);

/// Uniqueness of potentials up to a constant shift: for `trials` random
/// shift-annihilating directions the dual-face maximum must match the point
/// evaluation at the solver's potentials within `tol`.
UniquenessReport are_potentials_unique(const DualFace& face, int trials = 16, double tol = 1e-6,
                                       std::uint64_t seed = 0x706f74ULL);

}  // namespace otl
