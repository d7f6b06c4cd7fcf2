#include "otl/measures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace otl {

namespace {

struct PointLess {
  bool operator()(const Point& a, const Point& b) const {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  }
};

void check_finite(const Point& p) {
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    require(std::isfinite(p[k]), "support point has a non-finite coordinate");
  }
}

}  // namespace

Point make_point(std::initializer_list<double> coords) {
  Point p(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index k = 0;
  for (double c : coords) p[k++] = c;
  return p;
}

DiscreteMeasure::DiscreteMeasure(std::vector<Point> support, std::vector<double> weights) {
  require(!support.empty(), "measure needs at least one atom");
  require(support.size() == weights.size(), "support and weight vectors differ in length");
  dim_ = static_cast<int>(support.front().size());
  require(dim_ >= 1, "support points need at least one coordinate");

  double total = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    require(support[i].size() == dim_, "support points have inconsistent dimension");
    check_finite(support[i]);
    require(std::isfinite(weights[i]) && weights[i] >= 0.0, "weights must be finite and nonnegative");
    total += weights[i];
  }
  require(std::abs(total - 1.0) <= kWeightTolerance,
          "weights must sum to one (got " + std::to_string(total) + ")");

  std::map<Point, std::size_t, PointLess> index;
  std::vector<double> merged;
  for (std::size_t i = 0; i < support.size(); ++i) {
    auto [it, inserted] = index.emplace(support[i], support_.size());
    if (inserted) {
      support_.push_back(std::move(support[i]));
      merged.push_back(weights[i]);
    } else {
      merged[it->second] += weights[i];
    }
  }
  weights_ = Eigen::Map<Vector>(merged.data(), static_cast<Eigen::Index>(merged.size()));
}

DiscreteMeasure DiscreteMeasure::uniform(std::vector<Point> support) {
  require(!support.empty(), "measure needs at least one atom");
  const std::size_t n = support.size();
  return DiscreteMeasure(std::move(support), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

DiscreteMeasure DiscreteMeasure::on_line(const std::vector<double>& atoms, std::vector<double> weights) {
  std::vector<Point> support;
  support.reserve(atoms.size());
  for (double a : atoms) support.push_back(make_point({a}));
  return DiscreteMeasure(std::move(support), std::move(weights));
}

DiscreteMeasure DiscreteMeasure::reweighted(const Vector& weights) const {
  require(weights.size() == static_cast<Eigen::Index>(size()), "reweighting changes the support size");
  require(weights.allFinite() && weights.minCoeff() >= 0.0, "weights must be finite and nonnegative");
  require(std::abs(weights.sum() - 1.0) <= kWeightTolerance, "weights must sum to one");
  DiscreteMeasure out;
  out.support_ = support_;
  out.weights_ = weights;
  out.dim_ = dim_;
  return out;
}

EmpiricalSample::EmpiricalSample(std::vector<Point> draws) : draws_(std::move(draws)) {
  require(!draws_.empty(), "empirical sample needs at least one draw");
  const auto d = draws_.front().size();
  for (const auto& p : draws_) {
    require(p.size() == d, "draws have inconsistent dimension");
    check_finite(p);
  }
}

EmpiricalSample EmpiricalSample::on_line(const std::vector<double>& values) {
  std::vector<Point> draws;
  draws.reserve(values.size());
  for (double v : values) draws.push_back(make_point({v}));
  return EmpiricalSample(std::move(draws));
}

DiscreteMeasure EmpiricalSample::to_measure(std::vector<int>* atom_of_draw) const {
  std::map<Point, std::size_t, PointLess> index;
  std::vector<Point> support;
  std::vector<long> counts;
  if (atom_of_draw) atom_of_draw->clear();
  for (const auto& p : draws_) {
    auto [it, inserted] = index.emplace(p, support.size());
    if (inserted) {
      support.push_back(p);
      counts.push_back(1);
    } else {
      ++counts[it->second];
    }
    if (atom_of_draw) atom_of_draw->push_back(static_cast<int>(it->second));
  }
  const double n = static_cast<double>(draws_.size());
  std::vector<double> weights(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) weights[i] = static_cast<double>(counts[i]) / n;
  return DiscreteMeasure(std::move(support), std::move(weights));
}

CostMatrix::CostMatrix(Matrix values) : values_(std::move(values)) {
  require(values_.allFinite(), "cost matrix has non-finite entries");
}

CostMatrix CostMatrix::evaluate(const std::vector<Point>& rows, const std::vector<Point>& cols,
                                const Function& cost) {
  Matrix values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cost(rows[i], cols[j]);
    }
  }
  return CostMatrix(std::move(values));
}

void CostMatrix::check_shape(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const {
  require(rows() == static_cast<Eigen::Index>(mu.size()) && cols() == static_cast<Eigen::Index>(nu.size()),
          "cost matrix is " + std::to_string(rows()) + "x" + std::to_string(cols()) +
              " but the measures have " + std::to_string(mu.size()) + " and " +
              std::to_string(nu.size()) + " atoms");
}

namespace costs {

double squared_euclidean(const Point& x, const Point& y) { return (x - y).squaredNorm(); }

double euclidean(const Point& x, const Point& y) { return (x - y).norm(); }

CostMatrix::Function power(double p) {
  require(p >= 1.0, "cost exponent must be at least one");
  return [p](const Point& x, const Point& y) { return std::pow((x - y).norm(), p); };
}

}  // namespace costs

CostFamily::CostFamily(std::vector<Vector> grid, Function eval, double lipschitz_const_in_theta)
    : grid_(std::move(grid)), eval_(std::move(eval)), lipschitz_(lipschitz_const_in_theta) {
  require(!grid_.empty(), "cost family needs a nonempty parameter grid");
  require(static_cast<bool>(eval_), "cost family needs an evaluation function");
  require(lipschitz_ >= 0.0 && std::isfinite(lipschitz_), "Lipschitz constant must be finite and >= 0");
}

CostMatrix CostFamily::cost_matrix(std::size_t k, const std::vector<Point>& rows,
                                   const std::vector<Point>& cols) const {
  const Vector& theta = grid_.at(k);
  return CostMatrix::evaluate(rows, cols, [&](const Point& x, const Point& y) { return eval_(theta, x, y); });
}

bool CostFamily::verify_lipschitz(const std::vector<Point>& rows, const std::vector<Point>& cols,
                                  double tol) const {
  std::vector<Matrix> mats;
  mats.reserve(grid_.size());
  for (std::size_t k = 0; k < grid_.size(); ++k) mats.push_back(cost_matrix(k, rows, cols).values());
  for (std::size_t a = 0; a < grid_.size(); ++a) {
    for (std::size_t b = a + 1; b < grid_.size(); ++b) {
      const double gap = (mats[a] - mats[b]).cwiseAbs().maxCoeff();
      if (gap > lipschitz_ * (grid_[a] - grid_[b]).norm() + tol) return false;
    }
  }
  return true;
}

ModulusOfContinuity ModulusOfContinuity::linear(double slope) {
  require(slope >= 0.0 && std::isfinite(slope), "linear modulus needs a finite slope >= 0");
  return ModulusOfContinuity(Linear{slope});
}

ModulusOfContinuity ModulusOfContinuity::holder(double gamma, double scale) {
  require(gamma > 0.0 && scale >= 0.0, "Holder modulus needs gamma > 0 and scale >= 0");
  return ModulusOfContinuity(Holder{gamma, scale});
}

ModulusOfContinuity ModulusOfContinuity::table(std::vector<double> t, std::vector<double> w) {
  require(!t.empty() && t.size() == w.size(), "modulus table needs matching nonempty knots");
  for (std::size_t k = 0; k < t.size(); ++k) {
    require(t[k] > (k ? t[k - 1] : 0.0), "modulus knots must be strictly increasing and positive");
    require(w[k] >= (k ? w[k - 1] : 0.0), "modulus table must be nondecreasing");
  }
  // Slopes of consecutive segments, starting from the origin, must decrease.
  double prev_slope = w[0] / t[0];
  for (std::size_t k = 1; k < t.size(); ++k) {
    const double slope = (w[k] - w[k - 1]) / (t[k] - t[k - 1]);
    require(slope <= prev_slope + 1e-12, "modulus table must be concave");
    prev_slope = slope;
  }
  return ModulusOfContinuity(Table{std::move(t), std::move(w)});
}

double ModulusOfContinuity::apply(double t) const {
  if (t <= 0.0) return 0.0;
  return std::visit(
      [t](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Linear>) {
          return k.slope * t;
        } else if constexpr (std::is_same_v<K, Holder>) {
          return k.scale * std::pow(t, k.gamma);
        } else {
          if (t >= k.t.back()) return k.w.back();
          const auto it = std::upper_bound(k.t.begin(), k.t.end(), t);
          const std::size_t hi = static_cast<std::size_t>(it - k.t.begin());
          const double t0 = hi ? k.t[hi - 1] : 0.0;
          const double w0 = hi ? k.w[hi - 1] : 0.0;
          return w0 + (k.w[hi] - w0) * (t - t0) / (k.t[hi] - t0);
        }
      },
      kind_);
}

ModulusOfContinuity ModulusOfContinuity::scaled(double factor) const {
  require(factor >= 0.0, "modulus scale factor must be >= 0");
  return std::visit(
      [factor](const auto& k) -> ModulusOfContinuity {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Linear>) {
          return ModulusOfContinuity(Linear{k.slope * factor});
        } else if constexpr (std::is_same_v<K, Holder>) {
          return ModulusOfContinuity(Holder{k.gamma, k.scale * factor});
        } else {
          Table out = k;
          for (double& v : out.w) v *= factor;
          return ModulusOfContinuity(std::move(out));
        }
      },
      kind_);
}

bool ModulusOfContinuity::certify_on(const std::vector<double>& distances) const {
  double hi = 0.0;
  for (double d : distances) hi = std::max(hi, d);
  if (hi <= 0.0) return apply(0.0) == 0.0;
  constexpr int kGrid = 64;
  std::vector<double> grid(kGrid + 1), values(kGrid + 1);
  for (int k = 0; k <= kGrid; ++k) {
    grid[k] = hi * k / kGrid;
    values[k] = apply(grid[k]);
  }
  if (values[0] != 0.0) return false;
  const double tol = 1e-12 * (1.0 + std::abs(values[kGrid]));
  for (int k = 1; k <= kGrid; ++k) {
    if (values[k] < values[k - 1] - tol) return false;
  }
  for (int a = 0; a <= kGrid; ++a) {
    for (int b = a + 2; b <= kGrid; b += 2) {
      if (apply(0.5 * (grid[a] + grid[b])) < 0.5 * (values[a] + values[b]) - tol) return false;
    }
  }
  return true;
}

SampleRatio::SampleRatio(long n, long m) : n_(n), m_(m) {
  require(n > 0 && m > 0, "sample sizes must be positive");
  const double nd = static_cast<double>(n), md = static_cast<double>(m);
  lambda_ = md / (nd + md);
  rate_ = std::sqrt(nd * md / (nd + md));
}

SampleRatio SampleRatio::one_sample(long n) {
  require(n > 0, "sample size must be positive");
  SampleRatio r;
  r.lambda_ = 1.0;
  r.rate_ = std::sqrt(static_cast<double>(n));
  r.n_ = n;
  r.m_ = 0;
  return r;
}

SampleRatio SampleRatio::asymptotic(double lambda) {
  require(lambda > 0.0 && lambda <= 1.0, "lambda must lie in (0, 1]");
  SampleRatio r;
  r.lambda_ = lambda;
  r.rate_ = 1.0;
  return r;
}

namespace {

std::vector<double> component_masses(const DiscreteMeasure& m, const std::vector<int>& labels) {
  if (labels.size() != m.size()) throw InvalidArgument("partition mismatch");
  int count = 0;
  for (int l : labels) {
    if (l < 0) throw InvalidArgument("partition mismatch");
    count = std::max(count, l + 1);
  }
  std::vector<double> masses(static_cast<std::size_t>(count), 0.0);
  std::vector<bool> used(static_cast<std::size_t>(count), false);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    masses[static_cast<std::size_t>(labels[i])] += m.weight(i);
    used[static_cast<std::size_t>(labels[i])] = true;
  }
  if (std::find(used.begin(), used.end(), false) != used.end()) throw InvalidArgument("partition mismatch");
  return masses;
}

// Sums over all nonempty proper subsets.
std::vector<double> proper_subset_sums(const std::vector<double>& masses) {
  const std::size_t k = masses.size();
  require(k <= 22, "too many components for subset enumeration");
  std::vector<double> sums;
  const std::uint64_t full = (std::uint64_t{1} << k) - 1;
  for (std::uint64_t s = 1; s < full; ++s) {
    double total = 0.0;
    for (std::size_t b = 0; b < k; ++b) {
      if (s >> b & 1U) total += masses[b];
    }
    sums.push_back(total);
  }
  return sums;
}

}  // namespace

bool validate_nondegeneracy(const DiscreteMeasure& mu, const std::vector<int>& mu_components,
                            const DiscreteMeasure& nu, const std::vector<int>& nu_components) {
  const auto a = proper_subset_sums(component_masses(mu, mu_components));
  auto b = proper_subset_sums(component_masses(nu, nu_components));
  if (a.empty() || b.empty()) return true;
  std::sort(b.begin(), b.end());
  for (double s : a) {
    auto it = std::lower_bound(b.begin(), b.end(), s - kWeightTolerance);
    if (it != b.end() && std::abs(*it - s) <= kWeightTolerance) return false;
  }
  return true;
}

Matrix distance_matrix(const std::vector<Point>& support) {
  const auto n = static_cast<Eigen::Index>(support.size());
  Matrix d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) d(i, j) = (support[i] - support[j]).norm();
  }
  return d;
}

void check_pseudo_metric(const Matrix& metric) {
  require(metric.rows() == metric.cols(), "metric must be square");
  require(metric.allFinite(), "metric has non-finite entries");
  const Eigen::Index n = metric.rows();
  const double tol = 1e-12 * (1.0 + (n ? metric.cwiseAbs().maxCoeff() : 0.0));
  for (Eigen::Index i = 0; i < n; ++i) {
    require(std::abs(metric(i, i)) <= tol, "metric must have zero diagonal");
    for (Eigen::Index j = 0; j < n; ++j) {
      require(metric(i, j) >= -tol, "metric must be nonnegative");
      require(std::abs(metric(i, j) - metric(j, i)) <= tol, "metric must be symmetric");
    }
  }
  auto triangle = [&](Eigen::Index i, Eigen::Index j, Eigen::Index k) {
    require(metric(i, k) <= metric(i, j) + metric(j, k) + tol, "metric violates the triangle inequality");
  };
  if (n <= 60) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k) triangle(i, j, k);
  } else {
    auto rng = substream(0x6d657472ULL, static_cast<std::uint64_t>(n));
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    for (int t = 0; t < 200000; ++t) triangle(pick(rng), pick(rng), pick(rng));
  }
}

bool modulus_bound_check(const CostMatrix& c, const ModulusOfContinuity& w, const Matrix& metric) {
  require(metric.rows() == c.rows() && metric.cols() == c.rows(),
          "metric dimension does not match the cost rows");
  check_pseudo_metric(metric);
  const Matrix& v = c.values();
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index k = i + 1; k < v.rows(); ++k) {
      const double bound = w(metric(i, k)) + 1e-12;
      if ((v.row(i) - v.row(k)).cwiseAbs().maxCoeff() > bound) return false;
    }
  }
  return true;
}

DiscreteMeasure CsvSample::to_measure() const {
  if (weights) return DiscreteMeasure(points, *weights);
  return to_sample().to_measure();
}

EmpiricalSample CsvSample::to_sample() const {
  require(!weights, "weighted CSV data cannot be used as an i.i.d. sample");
  return EmpiricalSample(points);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  return out;
}

double parse_number(const std::string& s, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == s.size() && !s.empty(), "line " + std::to_string(line_no) + ": '" + s + "' is not a number");
  require(std::isfinite(v), "line " + std::to_string(line_no) + ": non-finite value");
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

CsvSample parse_csv_sample(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos) header = split_csv_line(line);
  }
  require(!header.empty(), "CSV input is empty (a header row is required)");
  const bool weighted = header.back() == "weight";
  const std::size_t dim = header.size() - (weighted ? 1 : 0);
  require(dim >= 1, "CSV needs at least one coordinate column");

  CsvSample out;
  std::vector<double> weights;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    require(cells.size() == header.size(),
            "line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) + " columns");
    Point p(static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < dim; ++k) p[static_cast<Eigen::Index>(k)] = parse_number(cells[k], line_no);
    out.points.push_back(std::move(p));
    if (weighted) weights.push_back(parse_number(cells.back(), line_no));
  }
  require(!out.points.empty(), "CSV input has a header but no data rows");
  if (weighted) out.weights = std::move(weights);
  return out;
}

CsvSample read_csv_sample(const std::string& path) { return parse_csv_sample(read_file(path)); }

Matrix read_csv_matrix(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    if (rows.empty() && line_no == 1) {
      bool numeric = true;
      try {
        for (const auto& c : cells) parse_number(c, line_no);
      } catch (const InvalidArgument&) {
        numeric = false;
      }
      if (!numeric) continue;
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_number(c, line_no));
    require(rows.empty() || row.size() == rows.front().size(), "ragged matrix at line " + std::to_string(line_no));
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), "matrix file '" + path + "' has no rows");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

}  // namespace otl
