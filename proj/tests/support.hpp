#pragma once

// Shared generators and independent oracles for the unit suites.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "otl/transport.hpp"

namespace testing {

using otl::DiscreteMeasure;
using otl::Matrix;
using otl::Point;
using otl::Vector;

inline std::vector<double> random_weights(std::mt19937_64& rng, int n, double zero_prob = 0.0) {
  std::uniform_real_distribution<double> u(0.05, 1.0), coin(0.0, 1.0);
  std::vector<double> w(static_cast<std::size_t>(n));
  for (auto& x : w) x = coin(rng) < zero_prob ? 0.0 : u(rng);
  if (std::accumulate(w.begin(), w.end(), 0.0) == 0.0) w[0] = 1.0;
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= total;
  return w;
}

inline std::vector<Point> random_points(std::mt19937_64& rng, int n, int d) {
  std::normal_distribution<double> g;
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) {
    Point p(d);
    for (int k = 0; k < d; ++k) p[k] = g(rng);
    pts.push_back(p);
  }
  return pts;
}

inline DiscreteMeasure random_measure(std::mt19937_64& rng, int n, int d = 1, double zero_prob = 0.0) {
  return DiscreteMeasure(random_points(rng, n, d), random_weights(rng, n, zero_prob));
}

inline Matrix random_matrix(std::mt19937_64& rng, int n, int m, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix c(n, m);
  for (Eigen::Index k = 0; k < c.size(); ++k) c.data()[k] = u(rng);
  return c;
}

/// Minimum of sum_i c(i, sigma(i)) / n over all permutations.
inline double assignment_brute_force(const Matrix& c) {
  const auto n = static_cast<int>(c.rows());
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += c(i, perm[static_cast<std::size_t>(i)]);
    best = std::min(best, s / n);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Independent optimality certificate: primal feasibility, dual feasibility
/// and zero gap together prove optimality of both.
inline bool certifies(const Vector& mu, const Vector& nu, const Matrix& c, const otl::OtSolution& s,
                      double tol = 1e-8) {
  const Matrix& p = s.plan.entries;
  if (p.minCoeff() < 0.0) return false;
  if ((p.rowwise().sum() - mu).cwiseAbs().maxCoeff() > 1e-9) return false;
  if ((p.colwise().sum().transpose() - nu).cwiseAbs().maxCoeff() > 1e-9) return false;
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      if (s.dual.phi[i] + s.dual.psi[j] > c(i, j) + 1e-9) return false;
      if (p(i, j) > 1e-9 && std::abs(c(i, j) - s.dual.phi[i] - s.dual.psi[j]) > 1e-7) return false;
    }
  const double primal = (p.array() * c.array()).sum();
  const double dual = mu.dot(s.dual.phi) + nu.dot(s.dual.psi);
  return std::abs(primal - dual) <= tol * (1.0 + std::abs(primal)) && std::abs(primal - s.value) <= 1e-9 * (1.0 + std::abs(primal));
}

/// Bounded Lipschitz program by vertex enumeration. At a vertex of
/// {|f_k| <= 1, |f_{k+1} - f_k| <= gap_k} the tight links split the atoms into
/// runs, and each run is pinned by one coordinate at +-1. Enumerating link
/// states and anchors therefore visits every vertex; infeasible candidates are
/// discarded.
inline double bl_vertex_oracle(const std::vector<double>& atoms, const std::vector<double>& mass) {
  const int K = static_cast<int>(atoms.size());
  std::vector<int> link(static_cast<std::size_t>(std::max(0, K - 1)), -1);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> f(static_cast<std::size_t>(K));
  auto evaluate = [&] {
    for (int k = 0; k < K; ++k)
      if (std::abs(f[k]) > 1.0 + 1e-12) return;
    for (int k = 0; k + 1 < K; ++k)
      if (std::abs(f[k + 1] - f[k]) > atoms[k + 1] - atoms[k] + 1e-12) return;
    double v = 0.0;
    for (int k = 0; k < K; ++k) v += f[k] * mass[k];
    best = std::max(best, v);
  };
  std::vector<std::pair<int, int>> runs;
  // Fills the runs from index r on, then evaluates.
  std::function<void(std::size_t)> pin = [&](std::size_t r) {
    if (r == runs.size()) return evaluate();
    const auto [lo, hi] = runs[r];
    for (int a = lo; a <= hi; ++a)
      for (double sign : {-1.0, 1.0}) {
        f[a] = sign;
        for (int k = a; k < hi; ++k) f[k + 1] = f[k] + link[k] * (atoms[k + 1] - atoms[k]);
        for (int k = a; k > lo; --k) f[k - 1] = f[k] - link[k - 1] * (atoms[k] - atoms[k - 1]);
        pin(r + 1);
      }
  };
  while (true) {
    runs.clear();
    int start = 0;
    for (int k = 0; k + 1 < K; ++k)
      if (link[k] == 0) runs.push_back({start, k}), start = k + 1;
    runs.push_back({start, K - 1});
    pin(0);
    int k = 0;
    while (k < K - 1 && link[k] == 1) link[k++] = -1;
    if (k == K - 1) break;
    ++link[k];
  }
  return best;
}

}  // namespace testing
