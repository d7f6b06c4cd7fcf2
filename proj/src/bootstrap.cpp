#include "otl/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <map>
#include <numeric>

#include "otl/transport.hpp"

namespace otl {

EmpiricalLaw1D::EmpiricalLaw1D(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_) require(std::isfinite(v), "empirical law has non-finite values");
  std::sort(values_.begin(), values_.end());
}

double EmpiricalLaw1D::mean() const {
  require(!values_.empty(), "mean of an empty law");
  return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

CostEstimator fixed_cost_estimator(CostMatrix::Function cost) {
  return [cost = std::move(cost)](const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    return CostMatrix::evaluate(mu, nu, cost);
  };
}

CostEstimator plugin_cost_estimator(std::function<Vector(const DiscreteMeasure&, const DiscreteMeasure&)> theta_hat,
                                    CostFamily::Function cost) {
  return [theta_hat = std::move(theta_hat), cost = std::move(cost)](const DiscreteMeasure& mu,
                                                                    const DiscreteMeasure& nu) {
    const Vector theta = theta_hat(mu, nu);
    return CostMatrix::evaluate(mu, nu, [&](const Point& x, const Point& y) { return cost(theta, x, y); });
  };
}

std::pair<long, long> bootstrap_sizes(long n, long m, const BootstrapConfig& cfg) {
  require(n >= 1 && m >= 1, "bootstrap needs nonempty samples");
  require(cfg.k >= 0 && cfg.l >= 0, "resample sizes must be nonnegative");
  long k = cfg.k;
  if (k == 0) {
    // floor(n^(2/3)) without trusting pow at perfect cubes.
    const long long n2 = static_cast<long long>(n) * n;
    long long r = std::llround(std::cbrt(static_cast<double>(n2)));
    while (r * r * r > n2) --r;
    while ((r + 1) * (r + 1) * (r + 1) <= n2) ++r;
    k = std::max(1L, static_cast<long>(r));
  }
  long l = cfg.l;
  if (l == 0) l = std::max(1L, std::lround(static_cast<double>(k) * static_cast<double>(m) / static_cast<double>(n)));
  return {k, l};
}

namespace {

class Resampler {
 public:
  explicit Resampler(const EmpiricalSample& sample) : full_(sample.to_measure(&atom_of_draw_)) {}

  const DiscreteMeasure& full() const { return full_; }

  DiscreteMeasure draw(std::mt19937_64& rng, long size) const {
    std::vector<long> counts(full_.size(), 0);
    std::uniform_int_distribution<std::size_t> pick(0, atom_of_draw_.size() - 1);
    for (long r = 0; r < size; ++r) ++counts[static_cast<std::size_t>(atom_of_draw_[pick(rng)])];
    std::vector<Point> support;
    std::vector<double> weights;
    for (std::size_t a = 0; a < counts.size(); ++a) {
      if (counts[a] == 0) continue;
      support.push_back(full_.point(a));
      weights.push_back(static_cast<double>(counts[a]) / static_cast<double>(size));
    }
    return DiscreteMeasure(std::move(support), std::move(weights));
  }

 private:
  std::vector<int> atom_of_draw_;
  DiscreteMeasure full_;
};

void check_config(const BootstrapConfig& cfg) {
  require(cfg.replicates >= 1, "bootstrap needs at least one replicate");
}

void check_failures(int failures, int replicates) {
  if (static_cast<double>(failures) > 0.01 * replicates)
    throw NumericalFailure("bootstrap: " + std::to_string(failures) + " of " + std::to_string(replicates) +
                           " replicates failed");
}

std::vector<std::string> size_warnings(long n, long m, long k, long l) {
  std::vector<std::string> out;
  if (k > n || l > m) out.push_back("resample size exceeds sample size");
  return out;
}

double solved_value(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c) {
  c.check_shape(mu, nu);
  const OtSolution sol = solve_ot(mu, nu, c);
  if (!sol.ok()) throw NumericalFailure(std::string("OT solve failed: ") + to_string(sol.status));
  return sol.value;
}

}  // namespace

BootstrapLaw bootstrap_ot_wcc(const EmpiricalSample& sample_x, const EmpiricalSample& sample_y,
                              const BootstrapConfig& cfg) {
  check_config(cfg);
  require(static_cast<bool>(cfg.cost_estimator), "bootstrap needs a cost estimator");
  const long n = static_cast<long>(sample_x.size());
  const long m = static_cast<long>(sample_y.size());
  const auto [k, l] = bootstrap_sizes(n, m, cfg);
  const Resampler rx(sample_x), ry(sample_y);
  const double ot_n = solved_value(rx.full(), ry.full(), cfg.cost_estimator(rx.full(), ry.full()));

  const double rate = std::sqrt(static_cast<double>(k));
  std::vector<double> stats(static_cast<std::size_t>(cfg.replicates), std::numeric_limits<double>::quiet_NaN());
  parallel_for(stats.size(), cfg.threads, [&](std::size_t b) {
    std::mt19937_64 rng = substream(cfg.seed, b);
    const DiscreteMeasure mu = rx.draw(rng, k);
    const DiscreteMeasure nu = ry.draw(rng, l);
    try {
      stats[b] = rate * (solved_value(mu, nu, cfg.cost_estimator(mu, nu)) - ot_n);
    } catch (const std::exception&) {
    }
  });

  BootstrapLaw out;
  out.k = k;
  out.l = l;
  out.warnings = size_warnings(n, m, k, l);
  std::vector<double> kept;
  for (double s : stats) {
    if (std::isnan(s)) ++out.failures;
    else kept.push_back(s);
  }
  check_failures(out.failures, cfg.replicates);
  out.law = EmpiricalLaw1D(std::move(kept));
  return out;
}

const char* to_string(ProcessMode mode) {
  switch (mode) {
    case ProcessMode::process_at_grid: return "process";
    case ProcessMode::inf: return "inf";
    case ProcessMode::sup: return "sup";
  }
  return "?";
}

BootstrapProcessLaw bootstrap_ot_process(const EmpiricalSample& sample_x, const EmpiricalSample& sample_y,
                                         const CostFamily& family, ProcessMode mode, const BootstrapConfig& cfg) {
  check_config(cfg);
  require(family.size() >= 1, "cost family grid is empty");
  const long n = static_cast<long>(sample_x.size());
  const long m = static_cast<long>(sample_y.size());
  const auto [k, l] = bootstrap_sizes(n, m, cfg);
  const Resampler rx(sample_x), ry(sample_y);
  const std::size_t T = family.size();

  auto values_on = [&](const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    std::vector<double> v(T);
    for (std::size_t t = 0; t < T; ++t) v[t] = solved_value(mu, nu, family.cost_matrix(t, mu.support(), nu.support()));
    return v;
  };
  auto reduce = [&](const std::vector<double>& v) {
    return mode == ProcessMode::inf ? *std::min_element(v.begin(), v.end()) : *std::max_element(v.begin(), v.end());
  };

  const std::vector<double> full = values_on(rx.full(), ry.full());
  const double rate = std::sqrt(static_cast<double>(k));
  const std::size_t B = static_cast<std::size_t>(cfg.replicates);
  std::vector<std::vector<double>> stats(B);
  parallel_for(B, cfg.threads, [&](std::size_t b) {
    std::mt19937_64 rng = substream(cfg.seed, b);
    const DiscreteMeasure mu = rx.draw(rng, k);
    const DiscreteMeasure nu = ry.draw(rng, l);
    try {
      const std::vector<double> v = values_on(mu, nu);
      if (mode == ProcessMode::process_at_grid) {
        std::vector<double> s(T);
        for (std::size_t t = 0; t < T; ++t) s[t] = rate * (v[t] - full[t]);
        stats[b] = std::move(s);
      } else {
        stats[b] = {rate * (reduce(v) - reduce(full))};
      }
    } catch (const std::exception&) {
    }
  });

  BootstrapProcessLaw out;
  out.k = k;
  out.l = l;
  out.warnings = size_warnings(n, m, k, l);
  if (mode != ProcessMode::process_at_grid && static_cast<double>(k) > std::pow(static_cast<double>(n), 0.9))
    out.warnings.push_back("k > n^0.9: the inf/sup bootstrap needs k = o(n)");
  std::vector<std::vector<double>> kept(mode == ProcessMode::process_at_grid ? T : 1);
  for (const auto& s : stats) {
    if (s.empty()) {
      ++out.failures;
      continue;
    }
    for (std::size_t t = 0; t < s.size(); ++t) kept[t].push_back(s[t]);
  }
  check_failures(out.failures, cfg.replicates);
  if (mode == ProcessMode::process_at_grid) {
    for (auto& v : kept) out.per_theta.emplace_back(std::move(v));
  } else {
    out.law = EmpiricalLaw1D(std::move(kept[0]));
  }
  return out;
}

double bl_dual_value(const std::vector<double>& atoms, const std::vector<double>& signed_mass) {
  require(atoms.size() == signed_mass.size() && !atoms.empty(), "bl program needs matching nonempty inputs");
  // Dynamic program over the concave value function V_k(f) = best objective of
  // f_1..f_k with f_k = f on [-1, 1]. V_k is stored as its slope segments
  // (keyed by slope - offset) together with its value at f = -1. The step to
  // k + 1 takes the running maximum over a window of half-width `gap`, which
  // inserts a flat piece of length 2 gap and trims gap from both ends, and
  // then adds the linear term d_{k+1} f.
  std::map<double, double> segments;
  double offset = signed_mass[0];
  double value_left = -signed_mass[0];
  segments[0.0] = 2.0;
  for (std::size_t k = 1; k < atoms.size(); ++k) {
    const double gap = atoms[k] - atoms[k - 1];
    require(gap >= 0.0, "bl program needs sorted atoms");
    if (gap > 0.0) {
      segments[-offset] += 2.0 * gap;
      double left = gap;
      while (left > 0.0 && !segments.empty()) {
        auto it = std::prev(segments.end());
        const double take = std::min(it->second, left);
        value_left += (it->first + offset) * take;
        left -= take;
        if (take >= it->second) segments.erase(it);
        else it->second -= take;
      }
      double right = gap;
      while (right > 0.0 && !segments.empty()) {
        auto it = segments.begin();
        const double take = std::min(it->second, right);
        right -= take;
        if (take >= it->second) segments.erase(it);
        else it->second -= take;
      }
    }
    offset += signed_mass[k];
    value_left -= signed_mass[k];
  }
  double best = value_left;
  for (const auto& [key, len] : segments) best += std::max(0.0, key + offset) * len;
  return best;
}

namespace {

std::vector<double> thinned(const std::vector<double>& values, std::size_t keep, std::uint64_t seed, std::uint64_t stream) {
  if (keep >= values.size()) return values;
  std::vector<double> v = values;
  std::mt19937_64 rng = substream(seed, stream);
  std::shuffle(v.begin(), v.end(), rng);
  v.resize(std::max<std::size_t>(1, keep));
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

double d_bl_1d(const EmpiricalLaw1D& p, const EmpiricalLaw1D& q, std::size_t max_atoms, std::uint64_t seed) {
  require(!p.empty() && !q.empty(), "d_BL needs nonempty laws");
  // Canonical argument order makes the result exactly symmetric.
  const bool swap = std::make_pair(q.size(), std::cref(q.values())) < std::make_pair(p.size(), std::cref(p.values()));
  std::vector<double> a = swap ? q.values() : p.values();
  std::vector<double> b = swap ? p.values() : q.values();
  const std::size_t total = a.size() + b.size();
  if (total > max_atoms) {
    const double r = static_cast<double>(max_atoms) / static_cast<double>(total);
    a = thinned(a, static_cast<std::size_t>(r * static_cast<double>(a.size())), seed, 0);
    b = thinned(b, static_cast<std::size_t>(r * static_cast<double>(b.size())), seed, 1);
  }
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::vector<double> atoms, mass;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    const double x = j == b.size() || (i < a.size() && a[i] <= b[j]) ? a[i] : b[j];
    std::size_t ca = 0, cb = 0;
    while (i < a.size() && a[i] == x) ++ca, ++i;
    while (j < b.size() && b[j] == x) ++cb, ++j;
    // Integer counts keep equal masses exactly cancelling.
    atoms.push_back(x);
    mass.push_back(static_cast<double>(ca) / na - static_cast<double>(cb) / nb);
  }
  return bl_dual_value(atoms, mass);
}

double ks_distance(const EmpiricalLaw1D& p, const EmpiricalLaw1D& q) {
  require(!p.empty() && !q.empty(), "KS distance needs nonempty laws");
  const auto& a = p.values();
  const auto& b = q.values();
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double best = 0.0;
  while (i < a.size() || j < b.size()) {
    const double x = j == b.size() || (i < a.size() && a[i] <= b[j]) ? a[i] : b[j];
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return best;
}

}  // namespace otl
