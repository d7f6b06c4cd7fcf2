#pragma once

// Core domain types: finitely supported measures, cost matrices, parametric
// cost families and moduli of continuity, plus the checks on finite data that
// decide whether a configuration satisfies the regularity hypotheses of the
// limit theorems.

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "otl/common.hpp"

namespace otl {

using Point = Eigen::VectorXd;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kWeightTolerance = 1e-12;

Point make_point(std::initializer_list<double> coords);

/// Probability measure on finitely many distinct points.
///
/// Weights must be nonnegative and sum to one within 1e-12; the constructor
/// rejects anything else instead of renormalizing. Repeated support points are
/// merged by adding their weights (first occurrence keeps its position).
/// Zero weights are allowed so that measures can be embedded into a larger
/// common support.
class DiscreteMeasure {
 public:
  DiscreteMeasure(std::vector<Point> support, std::vector<double> weights);

  static DiscreteMeasure uniform(std::vector<Point> support);
  /// Atoms on the real line.
  static DiscreteMeasure on_line(const std::vector<double>& atoms, std::vector<double> weights);
  /// Same support with new weights; skips duplicate merging.
  DiscreteMeasure reweighted(const Vector& weights) const;

  std::size_t size() const { return support_.size(); }
  int dim() const { return dim_; }
  const std::vector<Point>& support() const { return support_; }
  const Point& point(std::size_t i) const { return support_[i]; }
  const Vector& weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_[static_cast<Eigen::Index>(i)]; }

  /// Expectation of f over the atoms.
  double integrate(const Vector& f) const { return weights_.dot(f); }

 private:
  DiscreteMeasure() = default;
  std::vector<Point> support_;
  Vector weights_;
  int dim_ = 0;
};

/// i.i.d. draws X_1..X_n; to_measure() assigns each distinct point the mass
/// count/n, with counts accumulated as integers.
class EmpiricalSample {
 public:
  explicit EmpiricalSample(std::vector<Point> draws);
  static EmpiricalSample on_line(const std::vector<double>& values);

  std::size_t size() const { return draws_.size(); }
  int dim() const { return static_cast<int>(draws_.front().size()); }
  const std::vector<Point>& draws() const { return draws_; }
  /// `atom_of_draw`, when given, receives the support index of every draw.
  DiscreteMeasure to_measure(std::vector<int>* atom_of_draw = nullptr) const;

 private:
  std::vector<Point> draws_;
};

/// Cost evaluated on the product of two finite supports.
class CostMatrix {
 public:
  CostMatrix() = default;
  explicit CostMatrix(Matrix values);

  using Function = std::function<double(const Point&, const Point&)>;
  static CostMatrix evaluate(const std::vector<Point>& rows, const std::vector<Point>& cols,
                             const Function& cost);
  static CostMatrix evaluate(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                             const Function& cost) {
    return evaluate(mu.support(), nu.support(), cost);
  }

  Eigen::Index rows() const { return values_.rows(); }
  Eigen::Index cols() const { return values_.cols(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }
  const Matrix& values() const { return values_; }
  double sup_norm() const { return values_.size() ? values_.cwiseAbs().maxCoeff() : 0.0; }
  CostMatrix transposed() const { return CostMatrix(values_.transpose()); }

  /// Throws unless the shape matches the two measures.
  void check_shape(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const;

 private:
  Matrix values_;
};

/// Common ground costs.
namespace costs {
double squared_euclidean(const Point& x, const Point& y);
double euclidean(const Point& x, const Point& y);
/// |x - y|^p in Euclidean norm.
CostMatrix::Function power(double p);
}  // namespace costs

/// Family {c_theta} over a finite parameter grid.
class CostFamily {
 public:
  using Function = std::function<double(const Vector& theta, const Point& x, const Point& y)>;

  CostFamily(std::vector<Vector> grid, Function eval, double lipschitz_const_in_theta);

  std::size_t size() const { return grid_.size(); }
  const std::vector<Vector>& grid() const { return grid_; }
  const Vector& theta(std::size_t k) const { return grid_[k]; }
  double lipschitz_constant() const { return lipschitz_; }
  double eval(const Vector& theta, const Point& x, const Point& y) const {
    return eval_(theta, x, y);
  }
  CostMatrix cost_matrix(std::size_t k, const std::vector<Point>& rows,
                         const std::vector<Point>& cols) const;

  /// Exhaustive pair scan of the Lipschitz invariant on the given supports:
  /// max_{x,y} |c_theta - c_theta'| <= L * |theta - theta'| for all grid pairs.
  bool verify_lipschitz(const std::vector<Point>& rows, const std::vector<Point>& cols,
                        double tol = 1e-12) const;

 private:
  std::vector<Vector> grid_;
  Function eval_;
  double lipschitz_;
};

/// Concave modulus of continuity w with w(0) = 0.
class ModulusOfContinuity {
 public:
  struct Linear {
    double slope;
  };
  struct Holder {
    double gamma;
    double scale;
  };
  /// Piecewise-linear interpolation through (t_k, w_k), starting at (0, 0)
  /// and constant after the last knot.
  struct Table {
    std::vector<double> t;
    std::vector<double> w;
  };

  static ModulusOfContinuity linear(double slope);
  static ModulusOfContinuity holder(double gamma, double scale);
  static ModulusOfContinuity table(std::vector<double> t, std::vector<double> w);

  double operator()(double t) const { return apply(t); }
  double apply(double t) const;
  ModulusOfContinuity scaled(double factor) const;

  /// Finite concavity certificate: checks monotonicity and midpoint concavity
  /// on a 64-point grid spanning the observed distances.
  bool certify_on(const std::vector<double>& distances) const;

 private:
  explicit ModulusOfContinuity(std::variant<Linear, Holder, Table> kind) : kind_(std::move(kind)) {}
  std::variant<Linear, Holder, Table> kind_;
};

/// Sample-size bookkeeping: lambda = m / (n + m) and rate sqrt(nm / (n + m)).
/// The one-sample setting uses lambda = 1 and rate sqrt(n).
class SampleRatio {
 public:
  SampleRatio(long n, long m);
  static SampleRatio one_sample(long n);
  /// Asymptotic ratio without concrete sizes (rate() is then 1).
  static SampleRatio asymptotic(double lambda);

  double lambda() const { return lambda_; }
  double rate() const { return rate_; }
  long n() const { return n_; }
  long m() const { return m_; }
  bool one_sample() const { return lambda_ == 1.0; }

 private:
  SampleRatio() = default;
  double lambda_ = 0.5;
  double rate_ = 1.0;
  long n_ = 0;
  long m_ = 0;
};

/// True iff no nonempty proper subfamily of mu-components carries exactly the
/// mass of a nonempty proper subfamily of nu-components (comparison within
/// 1e-12). Labels assign each support index to a component 0..K-1.
bool validate_nondegeneracy(const DiscreteMeasure& mu, const std::vector<int>& mu_components,
                            const DiscreteMeasure& nu, const std::vector<int>& nu_components);

/// Pairwise Euclidean distances between support points.
Matrix distance_matrix(const std::vector<Point>& support);

/// Throws unless `metric` is symmetric with zero diagonal and satisfies the
/// triangle inequality (all triples up to 60 points, sampled beyond).
void check_pseudo_metric(const Matrix& metric);

/// True iff |c_ij - c_i'j| <= w(d(i, i')) + 1e-12 for all rows i, i' and columns j.
bool modulus_bound_check(const CostMatrix& c, const ModulusOfContinuity& w, const Matrix& metric);

/// Sample read from CSV: one row per point, header required, optional final
/// `weight` column.
struct CsvSample {
  std::vector<Point> points;
  std::optional<std::vector<double>> weights;

  /// Weighted files become a DiscreteMeasure with the given weights,
  /// unweighted ones the empirical measure of the rows.
  DiscreteMeasure to_measure() const;
  EmpiricalSample to_sample() const;
};

CsvSample read_csv_sample(const std::string& path);
CsvSample parse_csv_sample(const std::string& text);
/// Numeric matrix from CSV; a non-numeric first row is skipped as header.
Matrix read_csv_matrix(const std::string& path);

}  // namespace otl
