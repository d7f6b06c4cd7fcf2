#include <doctest.h>

#include <memory>

#include "otl/limitlaw.hpp"
#include "support.hpp"

using namespace otl;

namespace {

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double weighted_variance(const Vector& w, const Vector& f) {
  const double m = w.dot(f);
  return w.dot((f.array() - m).square().matrix());
}

// 2x2 instance with a unique plan (three positive cells) and potentials
// phi = (0, 1), psi = (0, -1).
struct UniqueInstance {
  DiscreteMeasure mu = DiscreteMeasure::on_line({0, 1}, {0.3, 0.7});
  DiscreteMeasure nu = DiscreteMeasure::on_line({0, 1}, {0.6, 0.4});
  CostMatrix c{(Matrix(2, 2) << 0, 2, 1, 0).finished()};
  Matrix plan = (Matrix(2, 2) << 0.3, 0.0, 0.3, 0.4).finished();
  Vector phi = (Vector(2) << 0, 1).finished();
  Vector psi = (Vector(2) << 0, -1).finished();
};

}  // namespace

TEST_CASE("bridge covariances") {
  const auto dirac = DiscreteMeasure::on_line({3.0}, {1.0});
  const auto uniform = DiscreteMeasure::on_line({0, 1}, {0.5, 0.5});
  for (const auto& d : sample_bridges(GaussianTripleModel::bridges(dirac, uniform), 1, 50)) {
    CHECK(d.zmu[0] == 0.0);
    CHECK(d.zc.size() == 0);
  }
  const int n = 100000;
  const auto draws = sample_bridges(GaussianTripleModel::bridges(uniform, uniform), 2, n);
  std::vector<double> first, second;
  for (const auto& d : draws) {
    first.push_back(d.zmu[0]);
    second.push_back(d.zmu[1]);
    CHECK(std::abs(d.zmu.sum()) <= 1e-6 * (1.0 + d.zmu.norm()));
  }
  const double var = variance(first);
  // Var of the sample variance of a Gaussian: 2 sigma^4 / (n - 1).
  CHECK(std::abs(var - 0.25) <= 3.0 * std::sqrt(2.0 * 0.25 * 0.25 / (n - 1)));
  double cross = 0.0, s1 = 0.0, s2 = 0.0;
  for (std::size_t k = 0; k < first.size(); ++k) {
    cross += first[k] * second[k];
    s1 += first[k] * first[k];
    s2 += second[k] * second[k];
  }
  CHECK(cross / std::sqrt(s1 * s2) == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("bridge and cost draws with cross covariance") {
  // Zp = 2 * Zmu_0 exactly: Cov(Zp, Zmu) = 2 * cov_mu.row(0), Var(Zp) = 4 * cov_mu(0, 0).
  const auto mu = DiscreteMeasure::on_line({0, 1, 2}, {0.2, 0.3, 0.5});
  const auto nu = DiscreteMeasure::on_line({0}, {1.0});
  GaussianTripleModel model = GaussianTripleModel::bridges(mu, nu, CostProcess::linear_map(Matrix::Ones(3, 1), Matrix::Constant(1, 1, 4 * 0.16)));
  model.cross_mu = 2.0 * model.cov_mu().row(0);
  for (const auto& d : sample_bridges(model, 3, 200)) {
    CHECK(std::abs(d.zc(0, 0) - 2.0 * d.zmu[0]) <= 1e-5);
    CHECK(d.zc(2, 0) == d.zc(0, 0));
  }
  model.cross_mu *= 10.0;
  CHECK_THROWS_AS(sample_bridges(model, 3, 1), InvalidArgument);
}

TEST_CASE("sampling is independent of the thread count") {
  auto rng = substream(71, 0);
  const auto mu = testing::random_measure(rng, 4);
  const auto nu = testing::random_measure(rng, 3);
  const CostMatrix c(testing::random_matrix(rng, 4, 3));
  const auto model = GaussianTripleModel::bridges(mu, nu, CostProcess::independent_entries(Matrix::Constant(4, 3, 0.5)));
  LimitOptions o;
  o.n_draws = 300;
  o.seed = 5;
  o.threads = 1;
  const auto a = sample_limit_wcc(mu, nu, c, model, SampleRatio(10, 30), o);
  o.threads = 4;
  const auto b = sample_limit_wcc(mu, nu, c, model, SampleRatio(10, 30), o);
  CHECK(a.draws == b.draws);
}

TEST_CASE("degenerate limits") {
  const auto dirac = DiscreteMeasure::on_line({0.0}, {1.0});
  LimitOptions o;
  o.n_draws = 100;
  const auto set = sample_limit_wcc(dirac, dirac, CostMatrix(Matrix::Zero(1, 1)), GaussianTripleModel::bridges(dirac, dirac),
                                    SampleRatio(5, 5), o);
  for (double d : set.draws) CHECK(d == 0.0);

  // Constant potentials: c constant in x and y.
  auto rng = substream(72, 0);
  const auto mu = testing::random_measure(rng, 3);
  const auto nu = testing::random_measure(rng, 4);
  const auto flat = sample_limit_wcc(mu, nu, CostMatrix(Matrix::Constant(3, 4, 2.0)), GaussianTripleModel::bridges(mu, nu),
                                     SampleRatio(5, 5), o);
  for (double d : flat.draws) CHECK(std::abs(d) <= 1e-9);
}

TEST_CASE("unique plan and potentials: Gaussian limit variance") {
  const UniqueInstance inst;
  const double lambda = 0.4;
  LimitOptions o;
  o.n_draws = 20000;
  o.seed = 7;
  const auto plain = sample_limit_wcc(inst.mu, inst.nu, inst.c, GaussianTripleModel::bridges(inst.mu, inst.nu),
                                      SampleRatio::asymptotic(lambda), o);
  const double expected = lambda * weighted_variance(inst.mu.weights(), inst.phi) +
                          (1 - lambda) * weighted_variance(inst.nu.weights(), inst.psi);
  CHECK(variance(plain.draws) == doctest::Approx(expected).epsilon(0.05));
  CHECK(std::abs(mean(plain.draws)) <= 4.0 * std::sqrt(expected / o.n_draws));

  Matrix sd(2, 2);
  sd << 1.0, 2.0, 0.5, 1.5;
  const auto noisy = sample_limit_wcc(inst.mu, inst.nu, inst.c,
                                      GaussianTripleModel::bridges(inst.mu, inst.nu, CostProcess::independent_entries(sd)),
                                      SampleRatio::asymptotic(lambda), o);
  const double with_cost = expected + (inst.plan.array().square() * sd.array().square()).sum();
  CHECK(variance(noisy.draws) == doctest::Approx(with_cost).epsilon(0.05));
}

TEST_CASE("scaling equivariance") {
  auto rng = substream(73, 0);
  const auto mu = testing::random_measure(rng, 3);
  const auto nu = testing::random_measure(rng, 3);
  const CostMatrix c(testing::random_matrix(rng, 3, 3).array().round().matrix());
  const auto model = GaussianTripleModel::bridges(mu, nu, CostProcess::independent_entries(Matrix::Constant(3, 3, 0.3)));
  const PrimalFace primal(mu, nu, c);
  const DualFace dual(mu, nu, c);
  const double a = std::sqrt(0.3), b = std::sqrt(0.7);
  for (const auto& d : sample_bridges(model, 4, 100)) {
    const double once = primal.minimize(d.zc) + dual.maximize(a * d.zmu, b * d.znu);
    const double thrice = primal.minimize(3.0 * d.zc) + dual.maximize(3.0 * a * d.zmu, 3.0 * b * d.znu);
    CHECK(thrice == doctest::Approx(3.0 * once).epsilon(1e-9));
  }
}

TEST_CASE("one-sample ratio ignores the second bridge") {
  const UniqueInstance inst;
  LimitOptions o;
  o.n_draws = 20000;
  o.seed = 8;
  const auto set = sample_limit_wcc(inst.mu, inst.nu, inst.c, GaussianTripleModel::bridges(inst.mu, inst.nu),
                                    SampleRatio::one_sample(100), o);
  CHECK(variance(set.draws) == doctest::Approx(weighted_variance(inst.mu.weights(), inst.phi)).epsilon(0.05));
}

TEST_CASE("summary statistics") {
  const auto set = LimitSampleSet::from({3, 1, 2, 4, 5});
  CHECK(set.summary.mean == 3.0);
  CHECK(set.summary.q50 == 3.0);
  CHECK(set.summary.q025 == doctest::Approx(1.1));
  CHECK(set.summary.std == doctest::Approx(std::sqrt(2.5)));
  CHECK_THROWS_AS(LimitSampleSet::from({1.0, std::nan("")}), InvalidArgument);
}

namespace {

// Cost family indexed by theta in {0, 1, ...}: theta selects one of the
// supplied matrices, points are integer indices on the line.
CostFamily matrix_family(std::vector<Matrix> mats) {
  std::vector<Vector> grid;
  for (std::size_t k = 0; k < mats.size(); ++k) grid.push_back(Vector::Constant(1, static_cast<double>(k)));
  auto shared = std::make_shared<std::vector<Matrix>>(std::move(mats));
  return CostFamily(
      grid,
      [shared](const Vector& t, const Point& x, const Point& y) {
        return (*shared)[static_cast<std::size_t>(t[0])](static_cast<Eigen::Index>(x[0]), static_cast<Eigen::Index>(y[0]));
      },
      1e6);
}

}  // namespace

TEST_CASE("extremal: singleton grid reduces to the fixed-cost limit") {
  const UniqueInstance inst;
  const auto family = matrix_family({inst.c.values()});
  ExtremalOptions o;
  o.n_draws = 500;
  o.seed = 9;
  const auto model = GaussianTripleModel::bridges(inst.mu, inst.nu);
  const auto ratio = SampleRatio::asymptotic(0.5);
  const auto fixed = sample_limit_wcc(inst.mu, inst.nu, inst.c, model, ratio, o);
  const auto inf = sample_limit_extremal(inst.mu, inst.nu, family, ExtremalMode::inf, model, ratio, o);
  const auto sup = sample_limit_extremal(inst.mu, inst.nu, family, ExtremalMode::sup, model, ratio, o);
  for (int k = 0; k < o.n_draws; ++k) {
    CHECK(inf.draws[static_cast<std::size_t>(k)] == doctest::Approx(fixed.draws[static_cast<std::size_t>(k)]).epsilon(1e-9));
    CHECK(sup.draws[static_cast<std::size_t>(k)] == doctest::Approx(fixed.draws[static_cast<std::size_t>(k)]).epsilon(1e-9));
  }
}

TEST_CASE("extremal: dominated parameters never contribute") {
  const UniqueInstance inst;
  const Matrix worse = (inst.c.values().array() + 1.0).matrix();
  ExtremalOptions o;
  o.n_draws = 300;
  const auto model = GaussianTripleModel::bridges(inst.mu, inst.nu);
  const auto ratio = SampleRatio::asymptotic(0.5);
  const auto setup = extremal_setup(inst.mu, inst.nu, matrix_family({inst.c.values(), worse}), ExtremalMode::inf);
  REQUIRE(setup.optimizers == std::vector<std::size_t>{0});
  const auto both = sample_limit_extremal(inst.mu, inst.nu, matrix_family({inst.c.values(), worse}), ExtremalMode::inf,
                                          model, ratio, o);
  const auto one = sample_limit_extremal(inst.mu, inst.nu, matrix_family({inst.c.values()}), ExtremalMode::inf, model,
                                         ratio, o);
  CHECK(both.draws == one.draws);
}

TEST_CASE("extremal: tie between two unique-potential costs") {
  const UniqueInstance inst;
  // Second cost with different unique potentials and the same OT value.
  Matrix cb(2, 2);
  cb << 3, 0, 0, 3;
  const double ot_a = solve_ot(inst.mu, inst.nu, inst.c).value;
  const OtSolution sb = solve_ot(inst.mu, inst.nu, CostMatrix(cb));
  cb.array() += ot_a - sb.value;
  const auto family = matrix_family({inst.c.values(), cb});
  const double lambda = 0.5;
  ExtremalOptions o;
  o.n_draws = 40000;
  o.seed = 10;
  const auto set = sample_limit_extremal(inst.mu, inst.nu, family, ExtremalMode::inf,
                                         GaussianTripleModel::bridges(inst.mu, inst.nu), SampleRatio::asymptotic(lambda), o);

  // Bivariate oracle: X_t = sqrt(l) Zmu.phi_t + sqrt(1 - l) Znu.psi_t.
  const OtSolution a = solve_ot(inst.mu, inst.nu, inst.c), b = solve_ot(inst.mu, inst.nu, CostMatrix(cb));
  const auto cov = [&](const Vector& w, const Vector& f, const Vector& g) {
    return w.dot(f.cwiseProduct(g)) - w.dot(f) * w.dot(g);
  };
  const Vector& wm = inst.mu.weights();
  const Vector& wn = inst.nu.weights();
  const double vaa = lambda * cov(wm, a.dual.phi, a.dual.phi) + (1 - lambda) * cov(wn, a.dual.psi, a.dual.psi);
  const double vbb = lambda * cov(wm, b.dual.phi, b.dual.phi) + (1 - lambda) * cov(wn, b.dual.psi, b.dual.psi);
  const double vab = lambda * cov(wm, a.dual.phi, b.dual.phi) + (1 - lambda) * cov(wn, a.dual.psi, b.dual.psi);
  REQUIRE(vaa * vbb - vab * vab > 1e-6);
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> g;
  const double l11 = std::sqrt(vaa), l21 = vab / l11, l22 = std::sqrt(vbb - l21 * l21);
  std::vector<double> oracle;
  for (int k = 0; k < 200000; ++k) {
    const double u = g(rng), v = g(rng);
    oracle.push_back(std::min(l11 * u, l21 * u + l22 * v));
  }
  const double se = std::sqrt(variance(set.draws) / o.n_draws + variance(oracle) / oracle.size());
  CHECK(mean(set.draws) < 0.0);
  CHECK(std::abs(mean(set.draws) - mean(oracle)) <= 4.0 * se);
}

TEST_CASE("extremal: non-unique potentials at a minimizer") {
  const auto u = DiscreteMeasure::on_line({0, 1}, {0.5, 0.5});
  const auto family = matrix_family({(Matrix(2, 2) << 0, 1, 1, 0).finished()});
  ExtremalOptions o;
  o.n_draws = 10;
  CHECK_THROWS_WITH_AS(sample_limit_extremal(u, u, family, ExtremalMode::inf, GaussianTripleModel::bridges(u, u),
                                             SampleRatio::asymptotic(0.5), o),
                       "KP violated", InvalidArgument);
  CHECK_NOTHROW(sample_limit_extremal(u, u, family, ExtremalMode::sup, GaussianTripleModel::bridges(u, u),
                                      SampleRatio::asymptotic(0.5), o));
}

TEST_CASE("goodness-of-fit cost process") {
  const std::vector<Point> ys{make_point({0.0}), make_point({1.0})};
  const std::vector<Matrix> jac(3, Matrix::Constant(1, 1, -1.0));
  Matrix ginv(3, 1);
  ginv << -0.5, 0.25, 1.5;
  CHECK(gof_cost_process_model(Matrix::Zero(1, 1), jac, ginv, ys).is_zero());
  const CostProcess p = gof_cost_process_model(Matrix::Constant(1, 1, 2.0), jac, ginv, ys);
  REQUIRE(p.kind == CostProcess::Kind::linear_map);
  // Location family: Zc(x, y) = -2 Ztheta (x - theta - y).
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) CHECK(p.map(i * 2 + j, 0) == doctest::Approx(-2.0 * (ginv(i, 0) - ys[j][0])));
  CHECK_THROWS_AS(gof_cost_process_model(Matrix::Zero(2, 2), jac, ginv, ys), InvalidArgument);
}
