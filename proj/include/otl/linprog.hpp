#pragma once

// Dense two-phase simplex. Used for the optimal-face programs (which add a
// row to a transportation polytope and so are no longer network problems) and
// as an independent cross-check in tests.

#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace otl {

enum class LpStatus { optimal, infeasible, unbounded, numerical_failure };

const char* to_string(LpStatus status);

struct LpResult {
  LpStatus status = LpStatus::numerical_failure;
  double value = 0.0;
  Eigen::VectorXd x;
  bool ok() const { return status == LpStatus::optimal; }
};

/// min c'x subject to A x = b, x >= 0.
///
/// The feasible region is fixed at construction: phase one runs once in
/// prepare() and every minimize() call restarts phase two from the stored
/// feasible basis, so repeated solves with changing objectives are cheap.
/// Entering variables follow Dantzig's rule (ties to the lowest index) and
/// switch to Bland's rule after a run of degenerate pivots.
class StandardFormLp {
 public:
  StandardFormLp(Eigen::MatrixXd a, Eigen::VectorXd b);

  /// Phase one. Returns optimal when a feasible basis was found.
  LpStatus prepare();
  bool prepared() const { return prepared_; }
  bool feasible() const { return feasible_; }

  LpResult minimize(const Eigen::VectorXd& c) const;

  Eigen::Index variables() const { return a_.cols(); }
  Eigen::Index constraints() const { return a_.rows(); }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  bool prepared_ = false;
  bool feasible_ = false;
  bool failed_ = false;
  // Phase-two starting tableau: rows x (n + 1), rhs in the last column.
  std::vector<double> tableau_;
  std::vector<int> basis_;
  int rows_ = 0;
};

/// One-shot convenience wrapper.
LpResult solve_standard_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c);

/// General LP with bounded or free variables and mixed constraint senses,
/// reduced to standard form internally.
class LinearProgram {
 public:
  enum class Sense { less_equal, equal, greater_equal };
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  int add_variable(double lower = 0.0, double upper = kInf, double cost = 0.0);
  void set_cost(int var, double cost);
  void add_constraint(const std::vector<std::pair<int, double>>& terms, Sense sense, double rhs);

  LpResult minimize() const;
  /// Returns the maximum in `value` (sign restored).
  LpResult maximize() const;

  int variable_count() const { return static_cast<int>(lower_.size()); }

 private:
  LpResult solve(bool maximize) const;

  std::vector<double> lower_, upper_, cost_;
  struct Row {
    std::vector<std::pair<int, double>> terms;
    Sense sense;
    double rhs;
  };
  std::vector<Row> rows_;
};

}  // namespace otl
