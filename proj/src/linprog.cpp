#include "otl/linprog.hpp"

#include <cmath>

#include "otl/common.hpp"

namespace otl {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal:
      return "optimal";
    case LpStatus::infeasible:
      return "infeasible";
    case LpStatus::unbounded:
      return "unbounded";
    case LpStatus::numerical_failure:
      return "numerical_failure";
  }
  return "unknown";
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr int kDegenerateStreak = 40;

// Row-major tableau with the objective (reduced costs) stored separately.
struct Tableau {
  int rows;
  int cols;  // structural columns, rhs excluded
  std::vector<double> t;
  std::vector<double> obj;  // cols + 1 entries; last holds -objective value
  std::vector<int> basis;

  double& at(int r, int c) { return t[static_cast<std::size_t>(r) * (cols + 1) + c]; }
  double at(int r, int c) const { return t[static_cast<std::size_t>(r) * (cols + 1) + c]; }
  double rhs(int r) const { return at(r, cols); }

  void pivot(int r, int c) {
    const std::size_t w = static_cast<std::size_t>(cols) + 1;
    double* pr = &t[static_cast<std::size_t>(r) * w];
    const double inv = 1.0 / pr[c];
    for (std::size_t k = 0; k < w; ++k) pr[k] *= inv;
    pr[c] = 1.0;
    for (int i = 0; i < rows; ++i) {
      if (i == r) continue;
      double* pi = &t[static_cast<std::size_t>(i) * w];
      const double f = pi[c];
      if (f == 0.0) continue;
      for (std::size_t k = 0; k < w; ++k) pi[k] -= f * pr[k];
      pi[c] = 0.0;
    }
    const double f = obj[static_cast<std::size_t>(c)];
    if (f != 0.0) {
      for (std::size_t k = 0; k < w; ++k) obj[k] -= f * pr[k];
      obj[static_cast<std::size_t>(c)] = 0.0;
    }
    basis[static_cast<std::size_t>(r)] = c;
  }
};

// Runs primal simplex on `tab` restricted to columns [0, active_cols).
LpStatus run_simplex(Tableau& tab, int active_cols, double cost_tol) {
  const int max_iter = 20000 + 50 * (tab.rows + tab.cols);
  int degenerate = 0;
  bool bland = false;
  for (int iter = 0; iter < max_iter; ++iter) {
    int enter = -1;
    double best = -cost_tol;
    for (int j = 0; j < active_cols; ++j) {
      const double d = tab.obj[static_cast<std::size_t>(j)];
      if (d < -cost_tol) {
        if (bland) {
          enter = j;
          break;
        }
        if (d < best) {
          best = d;
          enter = j;
        }
      }
    }
    if (enter < 0) return LpStatus::optimal;

    int leave = -1;
    double ratio = 0.0;
    for (int i = 0; i < tab.rows; ++i) {
      const double a = tab.at(i, enter);
      if (a <= kPivotTol) continue;
      const double q = std::max(tab.rhs(i), 0.0) / a;
      if (leave < 0 || q < ratio - 1e-13 ||
          (q <= ratio + 1e-13 && tab.basis[static_cast<std::size_t>(i)] < tab.basis[static_cast<std::size_t>(leave)])) {
        leave = i;
        ratio = q;
      }
    }
    if (leave < 0) return LpStatus::unbounded;
    if (ratio <= 1e-14) {
      if (++degenerate > kDegenerateStreak) bland = true;
    } else {
      degenerate = 0;
    }
    tab.pivot(leave, enter);
  }
  return LpStatus::numerical_failure;
}

double cost_tolerance(const Eigen::VectorXd& c) {
  const double scale = c.size() ? c.cwiseAbs().maxCoeff() : 0.0;
  return 1e-11 * std::max(1.0, scale);
}

}  // namespace

StandardFormLp::StandardFormLp(Eigen::MatrixXd a, Eigen::VectorXd b) : a_(std::move(a)), b_(std::move(b)) {
  require(a_.rows() == b_.size(), "LP constraint matrix and right-hand side differ in rows");
  require(a_.allFinite() && b_.allFinite(), "LP data must be finite");
}

LpStatus StandardFormLp::prepare() {
  prepared_ = true;
  const int m = static_cast<int>(a_.rows());
  const int n = static_cast<int>(a_.cols());

  Tableau tab{m, n + m, {}, {}, {}};
  tab.t.assign(static_cast<std::size_t>(m) * (n + m + 1), 0.0);
  tab.obj.assign(static_cast<std::size_t>(n + m + 1), 0.0);
  tab.basis.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double sign = b_[i] < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) tab.at(i, j) = sign * a_(i, j);
    tab.at(i, n + i) = 1.0;
    tab.at(i, n + m) = sign * b_[i];
    tab.basis[static_cast<std::size_t>(i)] = n + i;
    for (int j = 0; j < n; ++j) tab.obj[static_cast<std::size_t>(j)] -= tab.at(i, j);
    tab.obj[static_cast<std::size_t>(n + m)] -= tab.at(i, n + m);
  }

  const LpStatus phase1 = run_simplex(tab, n, 1e-12);
  if (phase1 == LpStatus::numerical_failure) {
    failed_ = true;
    return LpStatus::numerical_failure;
  }
  const double infeasibility = -tab.obj[static_cast<std::size_t>(n + m)];
  const double scale = 1.0 + (b_.size() ? b_.cwiseAbs().maxCoeff() : 0.0);
  if (infeasibility > 1e-9 * scale) {
    feasible_ = false;
    return LpStatus::infeasible;
  }

  // Drive remaining artificials out of the basis; rows where that is
  // impossible are linearly dependent and get dropped.
  std::vector<bool> keep(static_cast<std::size_t>(m), true);
  for (int i = 0; i < m; ++i) {
    if (tab.basis[static_cast<std::size_t>(i)] < n) continue;
    int col = -1;
    double best = kPivotTol;
    for (int j = 0; j < n; ++j) {
      if (std::abs(tab.at(i, j)) > best) {
        best = std::abs(tab.at(i, j));
        col = j;
      }
    }
    if (col >= 0) {
      tab.pivot(i, col);
    } else {
      keep[static_cast<std::size_t>(i)] = false;
    }
  }

  rows_ = 0;
  tableau_.clear();
  basis_.clear();
  for (int i = 0; i < m; ++i) {
    if (!keep[static_cast<std::size_t>(i)]) continue;
    for (int j = 0; j < n; ++j) tableau_.push_back(tab.at(i, j));
    tableau_.push_back(std::max(tab.at(i, n + m), 0.0));
    basis_.push_back(tab.basis[static_cast<std::size_t>(i)]);
    ++rows_;
  }
  feasible_ = true;
  return LpStatus::optimal;
}

LpResult StandardFormLp::minimize(const Eigen::VectorXd& c) const {
  require(prepared_, "StandardFormLp::prepare must run before minimize");
  require(c.size() == a_.cols(), "objective length does not match the LP");
  LpResult out;
  if (failed_) {
    out.status = LpStatus::numerical_failure;
    return out;
  }
  if (!feasible_) {
    out.status = LpStatus::infeasible;
    return out;
  }
  const int n = static_cast<int>(a_.cols());
  Tableau tab{rows_, n, tableau_, std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0), basis_};
  for (int j = 0; j < n; ++j) tab.obj[static_cast<std::size_t>(j)] = c[j];
  for (int i = 0; i < rows_; ++i) {
    const double cb = c[tab.basis[static_cast<std::size_t>(i)]];
    if (cb == 0.0) continue;
    for (int j = 0; j <= n; ++j) tab.obj[static_cast<std::size_t>(j)] -= cb * tab.at(i, j);
  }
  out.status = run_simplex(tab, n, cost_tolerance(c));
  if (out.status != LpStatus::optimal) return out;
  out.x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < rows_; ++i) out.x[tab.basis[static_cast<std::size_t>(i)]] = std::max(tab.rhs(i), 0.0);
  out.value = c.dot(out.x);
  return out;
}

LpResult solve_standard_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  StandardFormLp lp(a, b);
  const LpStatus st = lp.prepare();
  if (st != LpStatus::optimal) {
    LpResult out;
    out.status = st;
    return out;
  }
  return lp.minimize(c);
}

int LinearProgram::add_variable(double lower, double upper, double cost) {
  require(!(lower > upper), "variable lower bound exceeds upper bound");
  require(lower < kInf && upper > -kInf, "variable bounds are empty");
  lower_.push_back(lower);
  upper_.push_back(upper);
  cost_.push_back(cost);
  return static_cast<int>(lower_.size()) - 1;
}

void LinearProgram::set_cost(int var, double cost) { cost_.at(static_cast<std::size_t>(var)) = cost; }

void LinearProgram::add_constraint(const std::vector<std::pair<int, double>>& terms, Sense sense, double rhs) {
  for (const auto& [v, a] : terms) {
    require(v >= 0 && v < variable_count(), "constraint references an unknown variable");
    require(std::isfinite(a), "constraint coefficient must be finite");
  }
  require(std::isfinite(rhs), "constraint right-hand side must be finite");
  rows_.push_back(Row{terms, sense, rhs});
}

LpResult LinearProgram::minimize() const { return solve(false); }

LpResult LinearProgram::maximize() const { return solve(true); }

LpResult LinearProgram::solve(bool maximize) const {
  // Each original variable maps to one or two standard columns:
  // x = offset + sign * y  (one bound finite)   or   x = y+ - y-  (free).
  struct Map {
    int col;
    int neg_col;  // -1 unless free
    double offset;
    double sign;
  };
  const int nv = variable_count();
  std::vector<Map> map(static_cast<std::size_t>(nv));
  int cols = 0;
  std::vector<std::pair<int, double>> upper_rows;  // (var, width) for two-sided bounds
  for (int v = 0; v < nv; ++v) {
    const double lo = lower_[static_cast<std::size_t>(v)], hi = upper_[static_cast<std::size_t>(v)];
    if (std::isfinite(lo)) {
      map[static_cast<std::size_t>(v)] = {cols++, -1, lo, 1.0};
      if (std::isfinite(hi)) upper_rows.emplace_back(v, hi - lo);
    } else if (std::isfinite(hi)) {
      map[static_cast<std::size_t>(v)] = {cols++, -1, hi, -1.0};
    } else {
      map[static_cast<std::size_t>(v)] = {cols, cols + 1, 0.0, 1.0};
      cols += 2;
    }
  }
  int slack_count = static_cast<int>(upper_rows.size());
  for (const auto& r : rows_) slack_count += r.sense == Sense::equal ? 0 : 1;
  const int m = static_cast<int>(rows_.size() + upper_rows.size());
  const int n = cols + slack_count;

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, n);
  Eigen::VectorXd b(m);
  int slack = cols;
  int r = 0;
  for (const auto& row : rows_) {
    double rhs = row.rhs;
    for (const auto& [v, coef] : row.terms) {
      const Map& mp = map[static_cast<std::size_t>(v)];
      rhs -= coef * mp.offset;
      a(r, mp.col) += coef * mp.sign;
      if (mp.neg_col >= 0) a(r, mp.neg_col) -= coef;
    }
    if (row.sense == Sense::less_equal) a(r, slack++) = 1.0;
    if (row.sense == Sense::greater_equal) a(r, slack++) = -1.0;
    b[r++] = rhs;
  }
  for (const auto& [v, width] : upper_rows) {
    a(r, map[static_cast<std::size_t>(v)].col) = 1.0;
    a(r, slack++) = 1.0;
    b[r++] = width;
  }

  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  double constant = 0.0;
  const double dir = maximize ? -1.0 : 1.0;
  for (int v = 0; v < nv; ++v) {
    const Map& mp = map[static_cast<std::size_t>(v)];
    const double cv = dir * cost_[static_cast<std::size_t>(v)];
    constant += cv * mp.offset;
    c[mp.col] += cv * mp.sign;
    if (mp.neg_col >= 0) c[mp.neg_col] -= cv;
  }

  LpResult std_result = solve_standard_lp(a, b, c);
  LpResult out;
  out.status = std_result.status;
  if (!std_result.ok()) return out;
  out.x.resize(nv);
  for (int v = 0; v < nv; ++v) {
    const Map& mp = map[static_cast<std::size_t>(v)];
    double x = mp.offset + mp.sign * std_result.x[mp.col];
    if (mp.neg_col >= 0) x -= std_result.x[mp.neg_col];
    out.x[v] = x;
  }
  out.value = dir * (std_result.value + constant);
  return out;
}

}  // namespace otl
