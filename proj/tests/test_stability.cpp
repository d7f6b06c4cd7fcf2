#include <doctest.h>

#include "otl/stability.hpp"
#include "support.hpp"

using namespace otl;

namespace {

double ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const Matrix& c) {
  const OtSolution s = solve_ot(mu, nu, CostMatrix(c));
  REQUIRE(s.ok());
  return s.value;
}

// Admissible direction: weight differences towards another random measure.
PerturbationTriple random_direction(std::mt19937_64& rng, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const auto n = static_cast<int>(mu.size()), m = static_cast<int>(nu.size());
  const auto wa = testing::random_weights(rng, n), wb = testing::random_weights(rng, m);
  const Vector a = Eigen::Map<const Vector>(wa.data(), n), b = Eigen::Map<const Vector>(wb.data(), m);
  return {a - mu.weights(), b - nu.weights(), testing::random_matrix(rng, n, m)};
}

}  // namespace

TEST_CASE("identical inputs give a zero sandwich") {
  auto rng = substream(51, 0);
  const auto mu = testing::random_measure(rng, 4);
  const auto nu = testing::random_measure(rng, 3);
  const CostMatrix c(testing::random_matrix(rng, 4, 3));
  const SandwichBounds b = sandwich_bounds(mu, nu, mu, nu, c, c);
  CHECK(b.lower == doctest::Approx(0.0));
  CHECK(b.upper == doctest::Approx(0.0));
}

TEST_CASE("constant cost shift") {
  auto rng = substream(52, 0);
  const auto mu = testing::random_measure(rng, 4);
  const auto nu = testing::random_measure(rng, 5);
  const Matrix c = testing::random_matrix(rng, 4, 5);
  const double eps = 0.125;
  const SandwichBounds b = sandwich_bounds(mu, nu, mu, nu, CostMatrix(c), CostMatrix((c.array() + eps).matrix()));
  CHECK(b.lower == doctest::Approx(eps));
  CHECK(b.upper == doctest::Approx(eps));
}

TEST_CASE("sandwich contains the exact difference") {
  auto rng = substream(53, 0);
  std::uniform_int_distribution<int> size(1, 8);
  int width_zero = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const int n = size(rng), m = size(rng);
    const auto pts_x = testing::random_points(rng, n, 1), pts_y = testing::random_points(rng, m, 1);
    const double z = rep % 4 == 0 ? 0.3 : 0.0;
    const DiscreteMeasure mu(pts_x, testing::random_weights(rng, n, z)), mu_t(pts_x, testing::random_weights(rng, n, z));
    const DiscreteMeasure nu(pts_y, testing::random_weights(rng, m, z)), nu_t(pts_y, testing::random_weights(rng, m, z));
    Matrix c = testing::random_matrix(rng, n, m);
    if (rep % 3 == 0) c = (2.0 * c).array().round().matrix();
    const Matrix ct = c + testing::random_matrix(rng, n, m, 0.2);
    const double diff = ot(mu_t, nu_t, ct) - ot(mu, nu, c);
    const SandwichBounds b = sandwich_bounds(mu, nu, mu_t, nu_t, CostMatrix(c), CostMatrix(ct));
    CHECK(b.lower <= b.upper + 1e-8);
    CHECK(b.lower - 1e-7 <= diff);
    CHECK(diff <= b.upper + 1e-7);
    width_zero += std::abs(b.upper - b.lower) < 1e-9;
  }
  // The bounds are not trivially tight everywhere.
  CHECK(width_zero < 1000);
}

TEST_CASE("support mismatch is rejected") {
  const auto a = DiscreteMeasure::on_line({0, 1}, {0.5, 0.5});
  const auto b = DiscreteMeasure::on_line({0, 2}, {0.5, 0.5});
  const CostMatrix c(Matrix::Zero(2, 2));
  CHECK_THROWS_AS(sandwich_bounds(a, a, b, a, c, c), InvalidArgument);
}

TEST_CASE("union embedding") {
  const auto a = DiscreteMeasure::on_line({0, 1}, {0.5, 0.5});
  const auto b = DiscreteMeasure::on_line({1, 2}, {0.25, 0.75});
  const auto [ea, eb] = embed_in_union(a, b);
  REQUIRE(ea.size() == 3);
  CHECK(ea.weight(2) == 0.0);
  CHECK(eb.weight(0) == 0.0);
  CHECK(eb.weight(1) == 0.25);
  CHECK(eb.point(2)[0] == 2.0);
}

TEST_CASE("derivative: trivial directions") {
  auto rng = substream(54, 0);
  const auto mu = testing::random_measure(rng, 3);
  const auto nu = testing::random_measure(rng, 4);
  const CostMatrix c(testing::random_matrix(rng, 3, 4));
  CHECK(gateaux_derivative(mu, nu, c, PerturbationTriple::zero(3, 4)) == doctest::Approx(0.0));
  PerturbationTriple along_c = PerturbationTriple::zero(3, 4);
  along_c.dc = c.values();
  CHECK(gateaux_derivative(mu, nu, c, along_c) == doctest::Approx(ot(mu, nu, c.values())));
}

TEST_CASE("derivative matches one-sided difference quotients") {
  auto rng = substream(55, 0);
  for (int rep = 0; rep < 40; ++rep) {
    const auto mu = testing::random_measure(rng, 3, 1, rep % 2 ? 0.3 : 0.0);
    const auto nu = testing::random_measure(rng, 3, 1, rep % 2 ? 0.3 : 0.0);
    Matrix c = testing::random_matrix(rng, 3, 3);
    if (rep % 3 == 0) c = c.array().round().matrix();
    const PerturbationTriple d = random_direction(rng, mu, nu);
    const double deriv = gateaux_derivative(mu, nu, CostMatrix(c), d);
    const double base = ot(mu, nu, c);
    std::vector<double> err;
    for (double t : {1e-2, 1e-3, 1e-4}) {
      const auto mu_t = mu.reweighted(mu.weights() + t * d.dmu);
      const auto nu_t = nu.reweighted(nu.weights() + t * d.dnu);
      const double q = (ot(mu_t, nu_t, c + t * d.dc) - base) / t;
      err.push_back(std::abs(q - deriv));
    }
    // Past the last kink the remainder is the bilinear plan-cost term, O(t).
    CHECK(err[2] <= 1e-2);
    CHECK(err[2] <= err[0] + 1e-6);
  }
}

TEST_CASE("derivative is positively homogeneous") {
  auto rng = substream(56, 0);
  for (int rep = 0; rep < 30; ++rep) {
    const auto mu = testing::random_measure(rng, 4);
    const auto nu = testing::random_measure(rng, 3);
    const CostMatrix c(testing::random_matrix(rng, 4, 3).array().round().matrix());
    const PerturbationTriple d = random_direction(rng, mu, nu);
    const double one = gateaux_derivative(mu, nu, c, d);
    CHECK(gateaux_derivative(mu, nu, c, d.scaled(2.5)) == doctest::Approx(2.5 * one).epsilon(1e-8));
  }
}

TEST_CASE("derivative is additive when plan and potentials are unique") {
  auto rng = substream(57, 0);
  int certified = 0;
  for (int rep = 0; rep < 60 && certified < 15; ++rep) {
    const auto mu = testing::random_measure(rng, 3);
    const auto nu = testing::random_measure(rng, 3);
    const CostMatrix c(testing::random_matrix(rng, 3, 3));
    if (!is_plan_unique(mu, nu, c, 8, 1e-9).unique) continue;
    if (!are_potentials_unique(DualFace(mu, nu, c)).unique) continue;
    ++certified;
    const PerturbationTriple a = random_direction(rng, mu, nu), b = random_direction(rng, mu, nu);
    const PerturbationTriple sum{a.dmu + b.dmu, a.dnu + b.dnu, a.dc + b.dc};
    CHECK(gateaux_derivative(mu, nu, c, sum) ==
          doctest::Approx(gateaux_derivative(mu, nu, c, a) + gateaux_derivative(mu, nu, c, b)).epsilon(1e-8));
  }
  CHECK(certified >= 5);
}

TEST_CASE("inadmissible directions") {
  const auto mu = DiscreteMeasure::on_line({0, 1}, {1.0, 0.0});
  const CostMatrix c(Matrix::Zero(2, 2));
  PerturbationTriple d = PerturbationTriple::zero(2, 2);
  d.dmu << 0.1, -0.1;
  CHECK_THROWS_AS(gateaux_derivative(mu, mu, c, d), InvalidArgument);
  d.dmu << 0.1, 0.0;
  CHECK_THROWS_AS(gateaux_derivative(mu, mu, c, d), InvalidArgument);
}
