#include "otl/transport.hpp"

#include <cmath>
#include <random>

namespace otl {

double TransportPlan::max_marginal_error(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const {
  const double row = (entries.rowwise().sum() - mu.weights()).cwiseAbs().maxCoeff();
  const double col = (entries.colwise().sum().transpose() - nu.weights()).cwiseAbs().maxCoeff();
  return std::max(row, col);
}

double DualPair::max_violation(const CostMatrix& c) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = 0; j < c.cols(); ++j) worst = std::max(worst, phi[i] + psi[j] - c(i, j));
  return worst;
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

struct Cell {
  int i, j;
  double flow;
};

constexpr int kDegenerateStreak = 40;

}  // namespace

OtSolution TransportSolver::solve(const Vector& supply, const Vector& demand, const Matrix& cost) const {
  const int n = static_cast<int>(supply.size());
  const int m = static_cast<int>(demand.size());
  require(n > 0 && m > 0, "empty marginal");
  require(cost.rows() == n && cost.cols() == m, "cost matrix shape does not match marginals");
  require(supply.minCoeff() >= 0.0 && demand.minCoeff() >= 0.0, "negative marginal mass");
  const double total = supply.sum();
  require(std::abs(total - demand.sum()) <= 1e-9 * (1.0 + std::abs(total)), "marginal totals differ");
  require(cost.allFinite(), "cost matrix has non-finite entries");

  OtSolution out;
  // Northwest-corner start: n + m - 1 cells forming a spanning tree.
  std::vector<Cell> basis;
  basis.reserve(static_cast<std::size_t>(n + m - 1));
  {
    Vector a = supply, b = demand;
    int i = 0, j = 0;
    while (true) {
      const double x = std::min(a[i], b[j]);
      basis.push_back({i, j, x});
      a[i] -= x;
      b[j] -= x;
      if (i == n - 1 && j == m - 1) break;
      if (j == m - 1 || (i < n - 1 && a[i] <= b[j])) ++i;
      else ++j;
    }
  }

  const int nodes = n + m;
  std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(nodes));
  std::vector<int> parent(static_cast<std::size_t>(nodes)), parent_edge(static_cast<std::size_t>(nodes));
  std::vector<int> queue;
  queue.reserve(static_cast<std::size_t>(nodes));
  Vector u(n), v(m);
  const double price_tol = 1e-11 * std::max(1.0, cost.cwiseAbs().maxCoeff());

  auto rebuild = [&] {
    for (auto& a : adj) a.clear();
    for (int e = 0; e < static_cast<int>(basis.size()); ++e) {
      adj[static_cast<std::size_t>(basis[e].i)].push_back({n + basis[e].j, e});
      adj[static_cast<std::size_t>(n + basis[e].j)].push_back({basis[e].i, e});
    }
  };
  // BFS from `root`, filling parent/parent_edge; returns nodes reached.
  auto bfs = [&](int root) {
    std::fill(parent.begin(), parent.end(), -2);
    queue.clear();
    queue.push_back(root);
    parent[static_cast<std::size_t>(root)] = -1;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const int x = queue[h];
      for (auto [y, e] : adj[static_cast<std::size_t>(x)]) {
        if (parent[static_cast<std::size_t>(y)] != -2) continue;
        parent[static_cast<std::size_t>(y)] = x;
        parent_edge[static_cast<std::size_t>(y)] = e;
        queue.push_back(y);
      }
    }
    return queue.size();
  };

  const long max_iter = 50L * n * m + 1000;
  int streak = 0;
  std::vector<int> path;
  for (long iter = 0;; ++iter) {
    if (iter > max_iter) {
      out.status = SolveStatus::numerical_failure;
      return out;
    }
    rebuild();
    if (static_cast<int>(bfs(0)) != nodes) {
      out.status = SolveStatus::numerical_failure;
      return out;
    }
    u[0] = 0.0;
    for (std::size_t h = 1; h < queue.size(); ++h) {
      const int x = queue[h];
      const Cell& c = basis[static_cast<std::size_t>(parent_edge[static_cast<std::size_t>(x)])];
      if (x < n) u[x] = cost(c.i, c.j) - v[c.j];
      else v[x - n] = cost(c.i, c.j) - u[c.i];
    }

    int ei = -1, ej = -1;
    double best = -price_tol;
    const bool bland = streak >= kDegenerateStreak;
    for (int i = 0; i < n && !(bland && ei >= 0); ++i) {
      for (int j = 0; j < m; ++j) {
        const double r = cost(i, j) - u[i] - v[j];
        if (r < best) {
          best = bland ? -price_tol : r;
          ei = i;
          ej = j;
          if (bland) break;
        }
      }
    }
    if (ei < 0) {
      out.iterations = static_cast<int>(iter);
      break;
    }

    // Cycle: entering cell plus the tree path from column ej back to row ei.
    bfs(ei);
    path.clear();
    for (int x = n + ej; x != ei; x = parent[static_cast<std::size_t>(x)])
      path.push_back(parent_edge[static_cast<std::size_t>(x)]);
    // path[0] is adjacent to column ej and takes a minus sign; signs alternate.
    int leave = -1;
    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < path.size(); k += 2) {
      const Cell& c = basis[static_cast<std::size_t>(path[k])];
      const bool better = c.flow < theta ||
                          (bland && c.flow == theta &&
                           c.i * m + c.j < basis[static_cast<std::size_t>(leave)].i * m +
                                               basis[static_cast<std::size_t>(leave)].j);
      if (better) {
        theta = c.flow;
        leave = path[k];
      }
    }
    for (std::size_t k = 0; k < path.size(); ++k) {
      Cell& c = basis[static_cast<std::size_t>(path[k])];
      c.flow += (k % 2 == 0) ? -theta : theta;
    }
    streak = theta > 0.0 ? 0 : streak + 1;
    basis[static_cast<std::size_t>(leave)] = {ei, ej, theta};
  }

  out.plan.entries = Matrix::Zero(n, m);
  for (const Cell& c : basis) out.plan.entries(c.i, c.j) = std::max(0.0, c.flow);
  out.dual.phi = u;
  out.dual.psi = v;
  out.value = (out.plan.entries.array() * cost.array()).sum();
  const double dual_value = supply.dot(u) + demand.dot(v);
  const double scale = 1.0 + std::abs(out.value) + total * cost.cwiseAbs().maxCoeff();
  out.status = std::abs(out.value - dual_value) <= 1e-8 * scale ? SolveStatus::optimal
                                                                 : SolveStatus::numerical_failure;
  return out;
}

OtSolution TransportSolver::solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                  const CostMatrix& c) const {
  c.check_shape(mu, nu);
  return solve(mu.weights(), nu.weights(), c.values());
}

OtSolution solve_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c) {
  return TransportSolver{}.solve(mu, nu, c);
}

double default_face_tol(double ot_value) { return 1e-9 * (1.0 + std::abs(ot_value)); }

namespace {

OtSolution checked_solution(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c) {
  OtSolution s = solve_ot(mu, nu, c);
  if (!s.ok()) throw NumericalFailure("transport solver failed");
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Primal face

PrimalFace::PrimalFace(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c,
                       std::optional<double> face_tol)
    : PrimalFace(mu, nu, c, checked_solution(mu, nu, c), face_tol) {}

PrimalFace::PrimalFace(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c,
                       const OtSolution& solution, std::optional<double> face_tol)
    : mu_(mu.weights()), nu_(nu.weights()), cost_(c.values()), solution_(solution) {
  c.check_shape(mu, nu);
  require(solution.ok(), "primal face needs an optimal solution");
  ot_ = solution.value;
  tol_ = face_tol.value_or(default_face_tol(ot_));
  require(tol_ >= 0.0, "face tolerance must be nonnegative");
  build();
}

void PrimalFace::build() {
  const Vector& phi = solution_.dual.phi;
  const Vector& psi = solution_.dual.psi;
  tight_.resize(cost_.rows(), cost_.cols());
  for (Eigen::Index i = 0; i < cost_.rows(); ++i)
    for (Eigen::Index j = 0; j < cost_.cols(); ++j) tight_(i, j) = cost_(i, j) - phi[i] - psi[j] <= tol_;
}

double PrimalFace::minimize(const Matrix& g, Matrix* argmin) const {
  require(g.rows() == cost_.rows() && g.cols() == cost_.cols(), "functional shape does not match plan");
  require(g.allFinite(), "functional has non-finite entries");
  const double gmax = g.cwiseAbs().maxCoeff();
  const double penalty = 4.0 * static_cast<double>(cost_.rows() + cost_.cols()) * (gmax + 1.0);
  Matrix restricted = g;
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j)
      if (!tight_(i, j)) restricted(i, j) = penalty;
  const OtSolution s = TransportSolver{}.solve(mu_, nu_, restricted);
  if (s.ok()) {
    double leaked = 0.0;
    for (Eigen::Index i = 0; i < g.rows(); ++i)
      for (Eigen::Index j = 0; j < g.cols(); ++j)
        if (!tight_(i, j)) leaked += s.plan.entries(i, j);
    if (leaked <= 1e-12) {
      if (argmin) *argmin = s.plan.entries;
      return (s.plan.entries.array() * g.array()).sum();
    }
  }
  return minimize_dense(g, argmin);
}

// min <g, pi> s.t. row sums, column sums, <c, pi> + slack = OT + tol.
double PrimalFace::minimize_dense(const Matrix& g, Matrix* argmin) const {
  const Eigen::Index n = cost_.rows(), m = cost_.cols(), nm = n * m;
  Matrix a = Matrix::Zero(n + m + 1, nm + 1);
  Vector b(n + m + 1), obj = Vector::Zero(nm + 1);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      const Eigen::Index k = i * m + j;
      a(i, k) = 1.0;
      a(n + j, k) = 1.0;
      a(n + m, k) = cost_(i, j);
      obj[k] = g(i, j);
    }
  a(n + m, nm) = 1.0;
  b << mu_, nu_, ot_ + tol_;
  const LpResult r = solve_standard_lp(a, b, obj);
  if (!r.ok()) throw NumericalFailure(std::string("primal face program: ") + to_string(r.status));
  if (argmin) {
    argmin->resize(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < m; ++j) (*argmin)(i, j) = std::max(0.0, r.x[i * m + j]);
  }
  return r.value;
}

// ---------------------------------------------------------------------------
// Dual face

DualFace::DualFace(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c,
                   std::optional<double> face_tol, bool box)
    : DualFace(mu, nu, c, checked_solution(mu, nu, c), face_tol, box) {}

DualFace::DualFace(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c,
                   const OtSolution& solution, std::optional<double> face_tol, bool box)
    : mu_(mu.weights()), nu_(nu.weights()), cost_(c.values()), solution_(solution), box_(box) {
  c.check_shape(mu, nu);
  require(solution.ok(), "dual face needs an optimal solution");
  ot_ = solution.value;
  tol_ = face_tol.value_or(default_face_tol(ot_));
  require(tol_ >= 0.0, "face tolerance must be nonnegative");
}

double DualFace::maximize(const Vector& gphi, const Vector& gpsi, DualPair* argmax) const {
  require(gphi.size() == mu_.size() && gpsi.size() == nu_.size(), "functional shape does not match potentials");
  require(gphi.allFinite() && gpsi.allFinite(), "functional has non-finite entries");
  if (box_) return maximize_boxed(gphi, gpsi, argmax);

  const double gscale = std::max(gphi.cwiseAbs().maxCoeff(), gpsi.cwiseAbs().maxCoeff());
  if (std::abs(gphi.sum() - gpsi.sum()) > 1e-9 * (1.0 + gscale))
    throw InvalidArgument("dual face unbounded under g");

  // Smallest s keeping the perturbed marginals nonnegative. A negative
  // coefficient on a massless atom sends that potential to -infinity.
  double s = 1.0;
  auto lower = [&](const Vector& g, const Vector& w) {
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      if (g[i] >= 0.0) continue;
      if (w[i] <= 0.0) throw InvalidArgument("dual face unbounded under g");
      s = std::max(s, -g[i] / w[i]);
    }
  };
  lower(gphi, mu_);
  lower(gpsi, nu_);
  s *= 2.0;

  const TransportSolver solver;
  for (int attempt = 0; attempt < 40; ++attempt, s *= 4.0) {
    Vector supply = (gphi + s * mu_).cwiseMax(0.0);
    Vector demand = (gpsi + s * nu_).cwiseMax(0.0);
    const OtSolution r = solver.solve(supply, demand, cost_);
    if (!r.ok()) break;
    if (mu_.dot(r.dual.phi) + nu_.dot(r.dual.psi) >= ot_ - tol_) {
      if (argmax) *argmax = r.dual;
      return gphi.dot(r.dual.phi) + gpsi.dot(r.dual.psi);
    }
  }
  return maximize_dense(gphi, gpsi);
}

// LP dual of the face program:
//   min <c, pi> - s (OT - tol)  s.t.  pi 1 - s mu = gphi,  pi' 1 - s nu = gpsi,  pi, s >= 0.
double DualFace::maximize_dense(const Vector& gphi, const Vector& gpsi) const {
  const Eigen::Index n = cost_.rows(), m = cost_.cols(), nm = n * m;
  Matrix a = Matrix::Zero(n + m, nm + 1);
  Vector b(n + m), obj(nm + 1);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      const Eigen::Index k = i * m + j;
      a(i, k) = 1.0;
      a(n + j, k) = 1.0;
      obj[k] = cost_(i, j);
    }
  a.col(nm) << -mu_, -nu_;
  obj[nm] = -(ot_ - tol_);
  b << gphi, gpsi;
  const LpResult r = solve_standard_lp(a, b, obj);
  if (r.status == LpStatus::infeasible) throw InvalidArgument("dual face unbounded under g");
  if (!r.ok()) throw NumericalFailure(std::string("dual face program: ") + to_string(r.status));
  return r.value;
}

double DualFace::maximize_boxed(const Vector& gphi, const Vector& gpsi, DualPair* argmax) const {
  const Eigen::Index n = cost_.rows(), m = cost_.cols();
  const double bound = 2.0 * cost_.cwiseAbs().maxCoeff() + 1.0;
  LinearProgram lp;
  for (Eigen::Index i = 0; i < n; ++i) lp.add_variable(-bound, bound, gphi[i]);
  for (Eigen::Index j = 0; j < m; ++j) lp.add_variable(-bound, bound, gpsi[j]);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      lp.add_constraint({{static_cast<int>(i), 1.0}, {static_cast<int>(n + j), 1.0}},
                        LinearProgram::Sense::less_equal, cost_(i, j));
  std::vector<std::pair<int, double>> mass;
  for (Eigen::Index i = 0; i < n; ++i) mass.push_back({static_cast<int>(i), mu_[i]});
  for (Eigen::Index j = 0; j < m; ++j) mass.push_back({static_cast<int>(n + j), nu_[j]});
  lp.add_constraint(mass, LinearProgram::Sense::greater_equal, ot_ - tol_);
  const LpResult r = lp.maximize();
  if (!r.ok()) throw NumericalFailure(std::string("boxed dual face program: ") + to_string(r.status));
  if (argmax) {
    argmax->phi = r.x.head(n);
    argmax->psi = r.x.tail(m);
  }
  return r.value;
}

double min_over_primal_face(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c,
                            const Matrix& g, std::optional<double> face_tol) {
  return PrimalFace(mu, nu, c, face_tol).minimize(g);
}

double max_over_dual_face(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c,
                          const Vector& gphi, const Vector& gpsi, std::optional<double> face_tol, bool box) {
  return DualFace(mu, nu, c, face_tol, box).maximize(gphi, gpsi);
}

// ---------------------------------------------------------------------------
// Uniqueness probes

UniquenessReport is_plan_unique(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c,
                                int trials, double eps, std::uint64_t seed) {
  require(trials > 0, "trials must be positive");
  const PrimalFace face(mu, nu, c, eps);
  const Matrix& plan = face.solution().plan.entries;
  auto rng = substream(seed, 0);
  std::normal_distribution<double> normal;
  UniquenessReport report;
  for (int t = 0; t < trials; ++t) {
    Matrix g(c.rows(), c.cols());
    for (Eigen::Index k = 0; k < g.size(); ++k) g.data()[k] = normal(rng);
    const double at_plan = (plan.array() * g.array()).sum();
    const double lo = face.minimize(g);
    const double dev = at_plan - lo;
    report.max_deviation = std::max(report.max_deviation, dev);
    if (dev > 1e-7 * (1.0 + std::abs(at_plan)) && report.unique) {
      report.unique = false;
      report.witness_plan_direction = g;
    }
  }
  return report;
}

UniquenessReport are_potentials_unique(const DualFace& face, int trials, double tol, std::uint64_t seed) {
  require(trials > 0, "trials must be positive");
  const Eigen::Index n = face.solution().dual.phi.size(), m = face.solution().dual.psi.size();
  auto rng = substream(seed, 0);
  std::normal_distribution<double> normal;
  UniquenessReport report;
  for (int t = 0; t < trials; ++t) {
    Vector gphi(n), gpsi(m);
    for (Eigen::Index i = 0; i < n; ++i) gphi[i] = normal(rng);
    for (Eigen::Index j = 0; j < m; ++j) gpsi[j] = normal(rng);
    gphi.array() -= gphi.mean();
    gpsi.array() -= gpsi.mean();
    const double at_solution = face.evaluate_at_solution(gphi, gpsi);
    double dev;
    try {
      dev = face.maximize(gphi, gpsi) - at_solution;
    } catch (const InvalidArgument&) {
      dev = std::numeric_limits<double>::infinity();
    }
    report.max_deviation = std::max(report.max_deviation, dev);
    if (dev > tol && report.unique) {
      report.unique = false;
      report.witness_dual_direction = std::make_pair(gphi, gpsi);
    }
  }
  return report;
}

}  // namespace otl
