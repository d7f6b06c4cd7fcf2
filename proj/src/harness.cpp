#include "otl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <ostream>
#include <set>

#include "otl/regelev.hpp"
#include "otl/stability.hpp"

namespace otl {

namespace {

// Stream tags keep the different random quantities of one run apart.
enum Tag : std::uint64_t { kData = 1, kLimit = 2, kBoot = 3, kNegative = 4, kProbe = 5, kGenerator = 6 };

std::uint64_t derive(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(tag * 0x9e3779b97f4a7c15ULL + index));
}

const std::map<std::string, Scenario>& scenario_names() {
  static const std::map<std::string, Scenario> names = {
      {"wcc_clt", Scenario::wcc_clt},
      {"extremal_clt", Scenario::extremal_clt},
      {"bootstrap_wcc", Scenario::bootstrap_wcc},
      {"bootstrap_extremal", Scenario::bootstrap_extremal},
      {"sliced", Scenario::sliced},
      {"procrustes", Scenario::procrustes},
      {"sketched", Scenario::sketched},
      {"gof", Scenario::gof},
      {"stability_probe", Scenario::stability_probe},
      {"regelev_probe", Scenario::regelev_probe}};
  return names;
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidArgument(std::string("config key \"") + key + "\" has the wrong type");
  }
}

DiscreteMeasure parse_measure(const Json& j, const std::string& what) {
  if (j.is_object() && j.contains("generator")) {
    const Json& g = j.at("generator");
    const int atoms = get_or<int>(g, "atoms", 0);
    const int dim = get_or<int>(g, "dim", 1);
    require(atoms >= 1 && dim >= 1, what + ".generator needs atoms >= 1 and dim >= 1");
    std::mt19937_64 rng = substream(derive(get_or<std::uint64_t>(g, "seed", 0), kGenerator, 0), 0);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    std::vector<Point> pts;
    std::vector<double> w;
    for (int i = 0; i < atoms; ++i) {
      Point p(dim);
      for (int k = 0; k < dim; ++k) p[k] = gauss(rng);
      pts.push_back(p);
      w.push_back(unif(rng));
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& x : w) x /= total;
    // The last weight absorbs the rounding so the total is one.
    w.back() = 1.0 - std::accumulate(w.begin(), w.end() - 1, 0.0);
    return DiscreteMeasure(std::move(pts), std::move(w));
  }
  return measure_from_json(j, what);
}

std::vector<long> parse_sizes(const Json& j, const char* key) {
  std::vector<long> out;
  if (!j.contains(key)) return out;
  const Json& v = j.at(key);
  if (v.is_number_integer()) out.push_back(v.get<long>());
  else if (v.is_array())
    for (const auto& x : v) {
      require(x.is_number_integer(), std::string(key) + " must hold integers");
      out.push_back(x.get<long>());
    }
  else throw InvalidArgument(std::string(key) + " must be an integer or an array of integers");
  for (long n : out) require(n >= 1, std::string(key) + " entries must be positive");
  return out;
}

/// Index of each population atom, for matrix costs given on the population.
std::map<Point, int, bool (*)(const Point&, const Point&)> atom_index(const DiscreteMeasure& m) {
  std::map<Point, int, bool (*)(const Point&, const Point&)> idx(
      [](const Point& a, const Point& b) {
        return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
      });
  for (std::size_t i = 0; i < m.size(); ++i) idx.emplace(m.point(i), static_cast<int>(i));
  return idx;
}

CostMatrix::Function matrix_lookup(const Matrix& values, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  require(values.rows() == static_cast<Eigen::Index>(mu.size()) && values.cols() == static_cast<Eigen::Index>(nu.size()),
          "cost matrix shape does not match the population supports");
  auto rows = std::make_shared<decltype(atom_index(mu))>(atom_index(mu));
  auto cols = std::make_shared<decltype(atom_index(nu))>(atom_index(nu));
  return [values, rows, cols](const Point& x, const Point& y) {
    const auto i = rows->find(x);
    const auto j = cols->find(y);
    require(i != rows->end() && j != cols->end(), "point outside the population support of a matrix cost");
    return values(i->second, j->second);
  };
}

double shift_cost(const Vector& theta, const Point& x, const Point& y) { return (x - y - theta).squaredNorm(); }

Vector weighted_mean(const DiscreteMeasure& m) {
  Vector mean = Vector::Zero(m.dim());
  for (std::size_t i = 0; i < m.size(); ++i) mean += m.weight(i) * m.point(i);
  return mean;
}

Matrix support_matrix(const DiscreteMeasure& m) {
  Matrix x(static_cast<Eigen::Index>(m.size()), m.dim());
  for (std::size_t i = 0; i < m.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = m.point(i).transpose();
  return x;
}

Matrix bridge_cov(const Vector& w) { return Matrix(w.asDiagonal()) - w * w.transpose(); }

double solved(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostMatrix& c) {
  const OtSolution sol = solve_ot(mu, nu, c);
  if (!sol.ok()) throw NumericalFailure(std::string("OT solve failed: ") + to_string(sol.status));
  return sol.value;
}

Json summary_json(const std::vector<double>& v) {
  if (v.empty()) return nullptr;
  return to_json(summarize(v));
}

/// Fraction of pairs of rows on which d_BL and KS order the same way.
Json diagnostic_agreement(const Json& rows) {
  std::vector<std::pair<double, double>> d;
  for (const auto& r : rows)
    if (r.contains("d_bl") && r["d_bl"].is_number()) d.push_back({r["d_bl"].get<double>(), r["ks"].get<double>()});
  if (d.size() < 2) return nullptr;
  int agree = 0, total = 0;
  for (std::size_t a = 0; a < d.size(); ++a)
    for (std::size_t b = a + 1; b < d.size(); ++b) {
      ++total;
      agree += (d[a].first < d[b].first) == (d[a].second < d[b].second);
    }
  return static_cast<double>(agree) / total;
}

std::string size_label(const char* what, long n, long m) {
  return std::string(what) + "_n" + std::to_string(n) + (m > 0 ? "_m" + std::to_string(m) : "");
}

/// Shared tail of the Monte Carlo scenarios: distances, row and raw draws.
void add_comparison_row(ExperimentReport& report, const ExperimentConfig& cfg, long n, long m, Json row,
                        std::vector<double> stats, int failures, const std::optional<LimitSampleSet>& limit) {
  row["n"] = n;
  if (m > 0) row["m"] = m;
  row["reps"] = cfg.reps;
  row["failures"] = failures;
  row["statistic"] = summary_json(stats);
  row["limit"] = limit ? to_json(limit->summary) : Json(nullptr);
  if (limit && !stats.empty()) {
    const LawDistance dist = compare_laws(stats, limit->draws);
    row["d_bl"] = dist.d_bl;
    row["ks"] = dist.ks;
  } else {
    row["d_bl"] = nullptr;
    row["ks"] = nullptr;
  }
  report.rows.push_back(row);
  if (cfg.keep_raw) {
    report.raw.push_back({size_label("statistic", n, m), std::move(stats)});
    if (limit) report.raw.push_back({size_label("limit", n, m), limit->draws});
  }
}

/// Runs reps in parallel; a replicate that throws NumericalFailure is counted.
template <class F>
std::pair<std::vector<double>, int> replicate(const ExperimentConfig& cfg, std::size_t size_index, F&& statistic) {
  std::vector<double> out(static_cast<std::size_t>(cfg.reps), std::numeric_limits<double>::quiet_NaN());
  const std::uint64_t stream_seed = derive(cfg.seed, kData, size_index);
  parallel_for(out.size(), cfg.threads, [&](std::size_t r) {
    std::mt19937_64 rng = substream(stream_seed, r);
    try {
      out[r] = statistic(rng);
    } catch (const NumericalFailure&) {
    }
  });
  std::vector<double> kept;
  int failures = 0;
  for (double v : out) {
    if (std::isnan(v)) ++failures;
    else kept.push_back(v);
  }
  return {kept, failures};
}

ExperimentReport new_report(const ExperimentConfig& cfg) {
  ExperimentReport report;
  report.scenario = to_string(cfg.scenario);
  report.config = cfg.raw;
  report.seed = cfg.seed;
  return report;
}

void finish(ExperimentReport& report) { report.summary["diagnostic_agreement"] = diagnostic_agreement(report.rows); }

LimitOptions limit_options(const ExperimentConfig& cfg, std::size_t size_index) {
  LimitOptions opt;
  opt.n_draws = cfg.limit_draws;
  opt.seed = derive(cfg.seed, kLimit, size_index);
  opt.threads = cfg.threads;
  opt.face_tol = cfg.face_tol;
  return opt;
}

ExtremalOptions extremal_options(const ExperimentConfig& cfg, std::size_t size_index) {
  ExtremalOptions opt;
  static_cast<LimitOptions&>(opt) = limit_options(cfg, size_index);
  return opt;
}

const DiscreteMeasure& need(const std::optional<DiscreteMeasure>& m, const char* what) {
  require(m.has_value(), std::string("scenario needs \"") + what + "\"");
  return *m;
}

GaussianTripleModel wcc_model(const ExperimentConfig& cfg, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                              double lambda) {
  if (cfg.cost.estimated()) return shift_plugin_model(mu, nu, lambda);
  return GaussianTripleModel::bridges(mu, nu);
}

}  // namespace

const char* to_string(Scenario s) {
  for (const auto& [name, value] : scenario_names())
    if (value == s) return name.c_str();
  return "?";
}

Scenario scenario_from_string(const std::string& name) {
  const auto it = scenario_names().find(name);
  require(it != scenario_names().end(), "unknown scenario \"" + name + "\"");
  return it->second;
}

CostSpec CostSpec::from_json(const Json& j) {
  CostSpec spec;
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "squared_euclidean") spec.kind = Kind::squared_euclidean;
    else if (s == "euclidean") spec.kind = Kind::euclidean;
    else if (s == "shift_plugin") spec.kind = Kind::shift_plugin;
    else throw InvalidArgument("unknown cost \"" + s + "\"");
    return spec;
  }
  require(j.is_object(), "cost must be a name or an object");
  if (j.contains("matrix")) {
    spec.kind = Kind::matrix;
    spec.matrix = matrix_from_json(j.at("matrix"), "cost.matrix");
  } else if (j.contains("p")) {
    spec.kind = Kind::power;
    spec.p = get_or<double>(j, "p", 2.0);
    require(spec.p > 0.0, "cost.p must be positive");
  } else {
    return from_json(j.at("kind"));
  }
  return spec;
}

CostMatrix::Function CostSpec::population(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const {
  switch (kind) {
    case Kind::squared_euclidean: return costs::squared_euclidean;
    case Kind::euclidean: return costs::euclidean;
    case Kind::power: return costs::power(p);
    case Kind::matrix: return matrix_lookup(matrix, mu, nu);
    case Kind::shift_plugin: {
      const Vector theta = mean_shift(mu, nu);
      return [theta](const Point& x, const Point& y) { return shift_cost(theta, x, y); };
    }
  }
  return costs::squared_euclidean;
}

CostEstimator CostSpec::estimator(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const {
  if (kind == Kind::shift_plugin)
    return plugin_cost_estimator([](const DiscreteMeasure& a, const DiscreteMeasure& b) { return mean_shift(a, b); },
                                 shift_cost);
  return fixed_cost_estimator(population(mu, nu));
}

FamilySpec FamilySpec::from_json(const Json& j) {
  require(j.is_object(), "family must be an object");
  FamilySpec spec;
  const std::string mode = get_or<std::string>(j, "mode", "sup");
  require(mode == "inf" || mode == "sup", "family.mode must be \"inf\" or \"sup\"");
  spec.mode = mode == "inf" ? ExtremalMode::inf : ExtremalMode::sup;
  const std::string kind = get_or<std::string>(j, "kind", "shift");
  if (kind == "shift") {
    require(j.contains("grid") && j.at("grid").is_array() && !j.at("grid").empty(), "family.grid must be a nonempty array");
    for (const auto& t : j.at("grid")) spec.grid.push_back(t.is_array() ? vector_from_json(t, "family.grid") : Vector::Constant(1, t.get<double>()));
  } else if (kind == "matrices") {
    spec.kind = Kind::matrices;
    require(j.contains("costs") && j.at("costs").is_array() && !j.at("costs").empty(), "family.costs must be a nonempty array");
    for (const auto& c : j.at("costs")) spec.matrices.push_back(matrix_from_json(c, "family.costs"));
    for (std::size_t k = 0; k < spec.matrices.size(); ++k) spec.grid.push_back(Vector::Constant(1, static_cast<double>(k)));
  } else {
    throw InvalidArgument("unknown family kind \"" + kind + "\"");
  }
  return spec;
}

CostFamily FamilySpec::build(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const {
  double diam = 0.0;
  for (const auto& x : mu.support())
    for (const auto& y : nu.support()) diam = std::max(diam, (x - y).norm());
  if (kind == Kind::shift) {
    for (const auto& t : grid) require(t.size() == mu.dim(), "family.grid entries must match the data dimension");
    double tmax = 0.0;
    for (const auto& t : grid) tmax = std::max(tmax, t.norm());
    return CostFamily(grid, shift_cost, 2.0 * (diam + tmax));
  }
  std::vector<CostMatrix::Function> lookups;
  double lipschitz = 0.0;
  for (std::size_t a = 0; a < matrices.size(); ++a) {
    lookups.push_back(matrix_lookup(matrices[a], mu, nu));
    for (std::size_t b = 0; b < a; ++b)
      lipschitz = std::max(lipschitz, (matrices[a] - matrices[b]).cwiseAbs().maxCoeff() / static_cast<double>(a - b));
  }
  return CostFamily(
      grid,
      [lookups](const Vector& theta, const Point& x, const Point& y) {
        return lookups[static_cast<std::size_t>(std::lround(theta[0]))](x, y);
      },
      lipschitz);
}

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  require(j.is_object(), "config must be a JSON object");
  static const std::set<std::string> known = {
      "scenario", "seed", "threads", "mu", "nu", "cost", "family", "n", "m", "reps", "limit_draws", "face_tol",
      "datasets", "replicates", "k", "negative_control", "keep_raw", "output", "sliced", "procrustes", "sketched",
      "gof", "stability", "regelev"};
  for (const auto& [key, value] : j.items()) require(known.count(key) > 0, "unknown config key \"" + key + "\"");
  require(j.contains("scenario") && j.at("scenario").is_string(), "config needs a \"scenario\" string");

  ExperimentConfig cfg;
  cfg.raw = j;
  cfg.scenario = scenario_from_string(j.at("scenario").get<std::string>());
  cfg.seed = get_or<std::uint64_t>(j, "seed", 0);
  cfg.threads = get_or<int>(j, "threads", 1);
  require(cfg.threads >= 1, "threads must be positive");
  if (j.contains("mu")) cfg.mu = parse_measure(j.at("mu"), "mu");
  if (j.contains("nu")) cfg.nu = parse_measure(j.at("nu"), "nu");
  if (j.contains("cost")) cfg.cost = CostSpec::from_json(j.at("cost"));
  if (j.contains("family")) cfg.family = FamilySpec::from_json(j.at("family"));
  const auto ns = parse_sizes(j, "n");
  auto ms = parse_sizes(j, "m");
  if (ms.empty()) ms = ns;
  require(ms.size() == ns.size(), "n and m must have equal length");
  const bool one_sample = cfg.scenario == Scenario::gof;
  for (std::size_t k = 0; k < ns.size(); ++k) cfg.sizes.push_back({ns[k], one_sample ? 0 : ms[k]});
  cfg.reps = get_or<int>(j, "reps", cfg.reps);
  cfg.limit_draws = get_or<int>(j, "limit_draws", cfg.limit_draws);
  require(cfg.reps >= 1 && cfg.limit_draws >= 1, "reps and limit_draws must be positive");
  if (j.contains("face_tol")) cfg.face_tol = get_or<double>(j, "face_tol", 0.0);
  cfg.datasets = get_or<int>(j, "datasets", cfg.datasets);
  cfg.replicates = get_or<int>(j, "replicates", cfg.replicates);
  require(cfg.datasets >= 1 && cfg.replicates >= 1, "datasets and replicates must be positive");
  if (j.contains("k")) {
    const Json& k = j.at("k");
    cfg.k_rule = k.is_number_integer() ? std::to_string(k.get<long>()) : get_or<std::string>(j, "k", "n^2/3");
    resample_size(cfg.k_rule, 1000);
  }
  cfg.negative_control = get_or<bool>(j, "negative_control", false);
  cfg.keep_raw = get_or<bool>(j, "keep_raw", false);
  if (j.contains("output")) {
    cfg.report_path = get_or<std::string>(j.at("output"), "report", "");
    cfg.raw_csv_path = get_or<std::string>(j.at("output"), "raw_csv", "");
  }
  for (const char* block : {"sliced", "procrustes", "sketched", "gof", "stability", "regelev"})
    if (j.contains(block)) {
      require(j.at(block).is_object(), std::string(block) + " must be an object");
      cfg.application = j.at(block);
    }

  switch (cfg.scenario) {
    case Scenario::extremal_clt:
    case Scenario::bootstrap_extremal:
      require(cfg.family.has_value(), "scenario needs a \"family\"");
      [[fallthrough]];
    case Scenario::wcc_clt:
    case Scenario::bootstrap_wcc:
    case Scenario::sliced:
    case Scenario::procrustes:
      need(cfg.mu, "mu");
      need(cfg.nu, "nu");
      require(!cfg.sizes.empty(), "scenario needs sample sizes \"n\"");
      break;
    case Scenario::gof:
      need(cfg.mu, "mu");
      require(cfg.application.contains("nu0"), "gof scenario needs gof.nu0");
      require(!cfg.sizes.empty(), "scenario needs sample sizes \"n\"");
      break;
    case Scenario::sketched:
      require(cfg.application.contains("alpha") && cfg.application.contains("beta") && cfg.application.contains("d"),
              "sketched scenario needs sketched.alpha, sketched.beta and sketched.d");
      require(!cfg.sizes.empty(), "scenario needs sample sizes \"n\"");
      break;
    case Scenario::stability_probe:
    case Scenario::regelev_probe:
      break;
  }
  return cfg;
}

Json ExperimentReport::to_json() const {
  Json out;
  out["library_version"] = kLibraryVersion;
  out["scenario"] = scenario;
  out["seed"] = seed;
  out["environment"] = {{"compiler", __VERSION__}, {"cplusplus", static_cast<long>(__cplusplus)},
                        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                      std::to_string(EIGEN_MINOR_VERSION)}};
  out["config"] = config;
  out["rows"] = rows;
  out["summary"] = summary;
  out["warnings"] = warnings;
  return out;
}

void ExperimentReport::write_raw_csv(std::ostream& out) const {
  out << "label,index,value\n";
  char buf[64];
  for (const auto& [label, values] : raw)
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", values[i]);
      out << label << ',' << i << ',' << buf << '\n';
    }
}

LawDistance compare_laws(const std::vector<double>& statistic, const std::vector<double>& limit) {
  const EmpiricalLaw1D a(statistic), b(limit);
  return {d_bl_1d(a, b), ks_distance(a, b)};
}

Vector mean_shift(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  require(mu.dim() == nu.dim(), "mean shift needs equal dimensions");
  return weighted_mean(mu) - weighted_mean(nu);
}

GaussianTripleModel shift_plugin_model(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double lambda) {
  require(lambda > 0.0 && lambda <= 1.0, "lambda must lie in (0, 1]");
  const Vector theta = mean_shift(mu, nu);
  const Matrix x = support_matrix(mu), y = support_matrix(nu);
  const auto n = x.rows(), m = y.rows(), d = x.cols();
  Matrix map(n * m, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) map.row(i * m + j) = -2.0 * (x.row(i) - y.row(j) - theta.transpose());
  const Matrix smu = bridge_cov(mu.weights()), snu = bridge_cov(nu.weights());
  const Matrix cov = lambda * x.transpose() * smu * x + (1.0 - lambda) * y.transpose() * snu * y;
  auto model = GaussianTripleModel::bridges(mu, nu, CostProcess::linear_map(map, cov));
  model.cross_mu = std::sqrt(lambda) * x.transpose() * smu;
  model.cross_nu = -std::sqrt(1.0 - lambda) * y.transpose() * snu;
  return model;
}

EmpiricalSample draw_sample(const DiscreteMeasure& mu, long n, std::mt19937_64& rng) {
  require(n >= 1, "sample size must be positive");
  std::vector<double> cumulative(mu.size());
  std::partial_sum(mu.weights().data(), mu.weights().data() + mu.size(), cumulative.begin());
  std::uniform_real_distribution<double> unif(0.0, cumulative.back());
  std::vector<Point> draws;
  draws.reserve(static_cast<std::size_t>(n));
  for (long r = 0; r < n; ++r) {
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), unif(rng));
    if (it == cumulative.end()) --it;
    // Skip massless atoms that share a cumulative value with the next one.
    while (mu.weight(static_cast<std::size_t>(it - cumulative.begin())) == 0.0) ++it;
    draws.push_back(mu.point(static_cast<std::size_t>(it - cumulative.begin())));
  }
  return EmpiricalSample(std::move(draws));
}

long resample_size(const std::string& rule, long n) {
  if (rule == "n^2/3") {
    BootstrapConfig cfg;
    return bootstrap_sizes(n, n, cfg).first;
  }
  if (rule == "n") return n;
  try {
    std::size_t used = 0;
    const long k = std::stol(rule, &used);
    require(used == rule.size() && k >= 1, "");
    return k;
  } catch (const std::exception&) {
    throw InvalidArgument("k must be \"n^2/3\", \"n\" or a positive integer");
  }
}

ExperimentReport run_wcc_clt(const ExperimentConfig& cfg) {
  const DiscreteMeasure& mu = need(cfg.mu, "mu");
  const DiscreteMeasure& nu = need(cfg.nu, "nu");
  ExperimentReport report = new_report(cfg);
  const CostMatrix c = CostMatrix::evaluate(mu, nu, cfg.cost.population(mu, nu));
  const double ot = solved(mu, nu, c);
  const CostEstimator estimator = cfg.cost.estimator(mu, nu);
  report.summary["ot_population"] = ot;
  for (std::size_t s = 0; s < cfg.sizes.size(); ++s) {
    const auto [n, m] = cfg.sizes[s];
    const SampleRatio ratio(n, m);
    auto [stats, failures] = replicate(cfg, s, [&](std::mt19937_64& rng) {
      const DiscreteMeasure mu_n = draw_sample(mu, n, rng).to_measure();
      const DiscreteMeasure nu_m = draw_sample(nu, m, rng).to_measure();
      return ratio.rate() * (solved(mu_n, nu_m, estimator(mu_n, nu_m)) - ot);
    });
    const auto limit = sample_limit_wcc(mu, nu, c, wcc_model(cfg, mu, nu, ratio.lambda()), ratio, limit_options(cfg, s));
    add_comparison_row(report, cfg, n, m, {{"rate", ratio.rate()}}, std::move(stats), failures, limit);
  }
  finish(report);
  return report;
}

ExperimentReport run_extremal_clt(const ExperimentConfig& cfg) {
  const DiscreteMeasure& mu = need(cfg.mu, "mu");
  const DiscreteMeasure& nu = need(cfg.nu, "nu");
  const FamilySpec& spec = *cfg.family;
  const CostFamily family = spec.build(mu, nu);
  ExperimentReport report = new_report(cfg);
  const ExtremalSetup setup = extremal_setup(mu, nu, family, spec.mode);
  report.summary["extremum_population"] = setup.extremum;
  report.summary["optimizers"] = setup.optimizers;

  // Grid edges for the boundary diagnostic on one-dimensional grids.
  std::optional<std::pair<double, double>> edges;
  if (spec.kind == FamilySpec::Kind::shift && family.theta(0).size() == 1) {
    double lo = family.theta(0)[0], hi = lo;
    for (const auto& t : family.grid()) lo = std::min(lo, t[0]), hi = std::max(hi, t[0]);
    if (lo < hi) edges = {lo, hi};
  }

  for (std::size_t s = 0; s < cfg.sizes.size(); ++s) {
    const auto [n, m] = cfg.sizes[s];
    const SampleRatio ratio(n, m);
    std::atomic<int> boundary_hits{0};
    auto [stats, failures] = replicate(cfg, s, [&](std::mt19937_64& rng) {
      const DiscreteMeasure mu_n = draw_sample(mu, n, rng).to_measure();
      const DiscreteMeasure nu_m = draw_sample(nu, m, rng).to_measure();
      std::size_t best = 0;
      double value = 0.0;
      for (std::size_t t = 0; t < family.size(); ++t) {
        const double v = solved(mu_n, nu_m, family.cost_matrix(t, mu_n.support(), nu_m.support()));
        const bool better = spec.mode == ExtremalMode::inf ? v < value : v > value;
        if (t == 0 || better) value = v, best = t;
      }
      if (edges && (family.theta(best)[0] == edges->first || family.theta(best)[0] == edges->second))
        ++boundary_hits;
      return ratio.rate() * (value - setup.extremum);
    });
    std::optional<LimitSampleSet> limit;
    try {
      limit = sample_limit_extremal(mu, nu, family, spec.mode, GaussianTripleModel::bridges(mu, nu), ratio,
                                    extremal_options(cfg, s));
    } catch (const InvalidArgument& e) {
      report.warnings.push_back(size_label("limit", n, m) + ": " + e.what());
    }
    const int hits = boundary_hits.load();
    if (hits > 0)
      report.warnings.push_back(size_label("grid", n, m) + ": empirical optimizer on the grid boundary in " +
                                std::to_string(hits) + " replicates");
    add_comparison_row(report, cfg, n, m, {{"rate", ratio.rate()}, {"boundary_hits", hits}}, std::move(stats),
                       failures, limit);
  }
  finish(report);
  return report;
}

ExperimentReport run_bootstrap_experiment(const ExperimentConfig& cfg) {
  const DiscreteMeasure& mu = need(cfg.mu, "mu");
  const DiscreteMeasure& nu = need(cfg.nu, "nu");
  const bool extremal = cfg.scenario == Scenario::bootstrap_extremal;
  require(!extremal || cfg.family.has_value(), "scenario needs a \"family\"");
  std::optional<CostFamily> family;
  if (extremal) family = cfg.family->build(mu, nu);
  ExperimentReport report = new_report(cfg);
  const CostMatrix c = CostMatrix::evaluate(mu, nu, cfg.cost.population(mu, nu));
  const CostEstimator estimator = cfg.cost.estimator(mu, nu);

  for (std::size_t s = 0; s < cfg.sizes.size(); ++s) {
    const auto [n, m] = cfg.sizes[s];
    const SampleRatio ratio(n, m);
    LimitSampleSet limit;
    if (extremal) {
      limit = sample_limit_extremal(mu, nu, *family, cfg.family->mode, GaussianTripleModel::bridges(mu, nu), ratio,
                                    extremal_options(cfg, s));
    } else {
      limit = sample_limit_wcc(mu, nu, c, wcc_model(cfg, mu, nu, ratio.lambda()), ratio, limit_options(cfg, s));
    }

    // Bootstrap law on the scale of sqrt(nm / (n + m)): the bootstrap emits
    // sqrt(k) (...) and sqrt(k l / (k + l)) = sqrt(k) sqrt(l / (k + l)).
    auto bootstrap_law = [&](const EmpiricalSample& x, const EmpiricalSample& y, long k, std::uint64_t seed,
                             std::vector<std::string>& warnings) {
      BootstrapConfig bc;
      bc.k = k;
      bc.replicates = cfg.replicates;
      bc.seed = seed;
      bc.threads = cfg.threads;
      bc.cost_estimator = estimator;
      std::vector<double> values;
      long kk = 0, ll = 0;
      if (extremal) {
        const auto out = bootstrap_ot_process(x, y, *family, cfg.family->mode == ExtremalMode::inf ? ProcessMode::inf : ProcessMode::sup, bc);
        values = out.law.values();
        kk = out.k, ll = out.l;
        warnings.insert(warnings.end(), out.warnings.begin(), out.warnings.end());
      } else {
        const auto out = bootstrap_ot_wcc(x, y, bc);
        values = out.law.values();
        kk = out.k, ll = out.l;
        warnings.insert(warnings.end(), out.warnings.begin(), out.warnings.end());
      }
      const double scale = std::sqrt(static_cast<double>(ll) / static_cast<double>(kk + ll));
      for (auto& v : values) v *= scale;
      return std::make_pair(values, std::make_pair(kk, ll));
    };

    const long k = resample_size(cfg.k_rule, n);
    Json per_dataset = Json::array();
    double sum_bl = 0.0, sum_ks = 0.0, neg_bl = 0.0, neg_ks = 0.0;
    std::pair<long, long> sizes_used{0, 0};
    std::set<std::string> warnings;
    for (int d = 0; d < cfg.datasets; ++d) {
      std::mt19937_64 rng = substream(derive(cfg.seed, kData, s), static_cast<std::uint64_t>(d));
      const EmpiricalSample x = draw_sample(mu, n, rng);
      const EmpiricalSample y = draw_sample(nu, m, rng);
      std::vector<std::string> w;
      const auto [law, used] = bootstrap_law(x, y, k, derive(derive(cfg.seed, kBoot, s), kBoot, static_cast<std::uint64_t>(d)), w);
      sizes_used = used;
      const LawDistance dist = compare_laws(law, limit.draws);
      sum_bl += dist.d_bl;
      sum_ks += dist.ks;
      Json entry = {{"d_bl", dist.d_bl}, {"ks", dist.ks}};
      if (cfg.keep_raw && d == 0) report.raw.push_back({size_label("bootstrap", n, m), law});
      if (cfg.negative_control) {
        const auto [neg, unused] =
            bootstrap_law(x, y, n, derive(derive(cfg.seed, kNegative, s), kNegative, static_cast<std::uint64_t>(d)), w);
        const LawDistance nd = compare_laws(neg, limit.draws);
        neg_bl += nd.d_bl;
        neg_ks += nd.ks;
        entry["negative_control"] = {{"d_bl", nd.d_bl}, {"ks", nd.ks}};
      }
      warnings.insert(w.begin(), w.end());
      per_dataset.push_back(entry);
    }
    Json row = {{"n", n}, {"m", m}, {"k", sizes_used.first}, {"l", sizes_used.second},
                {"datasets", cfg.datasets}, {"replicates", cfg.replicates},
                {"d_bl", sum_bl / cfg.datasets}, {"ks", sum_ks / cfg.datasets},
                {"limit", to_json(limit.summary)}, {"per_dataset", per_dataset}};
    if (cfg.negative_control)
      row["negative_control"] = {{"k", n}, {"d_bl", neg_bl / cfg.datasets}, {"ks", neg_ks / cfg.datasets}};
    for (const auto& w : warnings) report.warnings.push_back(size_label("bootstrap", n, m) + ": " + w);
    if (cfg.keep_raw) report.raw.push_back({size_label("limit", n, m), limit.draws});
    report.rows.push_back(row);
  }
  finish(report);
  return report;
}

namespace {

ExperimentReport run_sliced(const ExperimentConfig& cfg) {
  const DiscreteMeasure& mu = need(cfg.mu, "mu");
  const DiscreteMeasure& nu = need(cfg.nu, "nu");
  const Json& a = cfg.application;
  const double p = get_or<double>(a, "p", 2.0);
  const int count = get_or<int>(a, "directions", 64);
  const std::string mode_name = get_or<std::string>(a, "mode", "max");
  require(mode_name == "max" || mode_name == "average", "sliced.mode must be \"max\" or \"average\"");
  const SlicedMode mode = mode_name == "max" ? SlicedMode::max : SlicedMode::average;
  const SphereGrid grid = SphereGrid::for_dimension(mu.dim(), count, derive(cfg.seed, kGenerator, 1));
  const CostFamily family = sliced_cost_family(grid, p, 0.0);

  std::vector<double> population(grid.size());
  for (std::size_t t = 0; t < grid.size(); ++t)
    population[t] = solved(mu, nu, family.cost_matrix(t, mu.support(), nu.support()));
  double pop = 0.0;
  if (mode == SlicedMode::max) pop = *std::max_element(population.begin(), population.end());
  else
    for (std::size_t t = 0; t < grid.size(); ++t) pop += grid.weight(t) * population[t];

  ExperimentReport report = new_report(cfg);
  report.summary["population"] = pop;
  report.summary["mesh"] = grid.mesh();
  for (std::size_t s = 0; s < cfg.sizes.size(); ++s) {
    const auto [n, m] = cfg.sizes[s];
    const SampleRatio ratio(n, m);
    auto [stats, failures] = replicate(cfg, s, [&](std::mt19937_64& rng) {
      const SlicedValues v = sliced_ot(draw_sample(mu, n, rng), draw_sample(nu, m, rng), grid, p);
      return ratio.rate() * ((mode == SlicedMode::max ? v.max : v.average) - pop);
    });
    std::optional<LimitSampleSet> limit;
    try {
      limit = sliced_limits(mu, nu, grid, p, ratio, mode, extremal_options(cfg, s)).law;
    } catch (const InvalidArgument& e) {
      report.warnings.push_back(size_label("limit", n, m) + ": " + e.what());
    }
    add_comparison_row(report, cfg, n, m, {{"rate", ratio.rate()}, {"mode", mode_name}}, std::move(stats), failures,
                       limit);
  }
  finish(report);
  return report;
}

ExperimentReport run_procrustes(const ExperimentConfig& cfg) {
  const DiscreteMeasure& mu = need(cfg.mu, "mu");
  const DiscreteMeasure& nu = need(cfg.nu, "nu");
  const Json& a = cfg.application;
  require(mu.dim() == nu.dim() && (mu.dim() == 2 || mu.dim() == 3), "Procrustes needs 2D or 3D measures");
  const int count = get_or<int>(a, "grid", mu.dim() == 2 ? 72 : 500);
  const RotationGrid grid = mu.dim() == 2 ? RotationGrid::angles(count) : RotationGrid::quaternion_net(count);
  const std::string refine = get_or<std::string>(a, "refine", "alternating");
  require(refine == "alternating" || refine == "grid_only", "procrustes.refine must be \"alternating\" or \"grid_only\"");
  const ProcrustesResult pop = procrustes_ot(
      mu, nu, grid, refine == "alternating" ? ProcrustesRefine::alternating : ProcrustesRefine::grid_only, cfg.threads);

  ExperimentReport report = new_report(cfg);
  report.summary["value"] = pop.value;
  report.summary["rotation"] = to_json(pop.rotation);
  report.summary["grid_minimum"] = pop.grid_values[pop.best_grid_index];
  report.summary["mesh"] = grid.mesh();
  report.summary["refinement_steps"] = pop.trace.size() - 1;

  // Finite-grid statistic: the infimum of the OT process over the rotations.
  std::vector<Vector> thetas;
  for (const auto& r : grid.rotations()) thetas.push_back(r.reshaped());
  double rx = 0.0, ry = 0.0;
  for (const auto& x : mu.support()) rx = std::max(rx, x.norm());
  for (const auto& y : nu.support()) ry = std::max(ry, y.norm());
  const int d = mu.dim();
  const CostFamily family(
      thetas,
      [d](const Vector& theta, const Point& x, const Point& y) {
        return (Eigen::Map<const Matrix>(theta.data(), d, d) * x - y).squaredNorm();
      },
      2.0 * rx * (rx + ry));
  const double grid_min = pop.grid_values[pop.best_grid_index];
  for (std::size_t s = 0; s < cfg.sizes.size(); ++s) {
    const auto [n, m] = cfg.sizes[s];
    const SampleRatio ratio(n, m);
    auto [stats, failures] = replicate(cfg, s, [&](std::mt19937_64& rng) {
      const DiscreteMeasure mu_n = draw_sample(mu, n, rng).to_measure();
      const DiscreteMeasure nu_m = draw_sample(nu, m, rng).to_measure();
      return ratio.rate() * (procrustes_ot(mu_n, nu_m, grid, ProcrustesRefine::grid_only).value - grid_min);
    });
    std::optional<LimitSampleSet> limit;
    try {
      limit = sample_limit_extremal(mu, nu, family, ExtremalMode::inf, GaussianTripleModel::bridges(mu, nu), ratio,
                                    extremal_options(cfg, s));
    } catch (const InvalidArgument& e) {
      report.warnings.push_back(size_label("limit", n, m) + ": " + e.what());
    }
    add_comparison_row(report, cfg, n, m, {{"rate", ratio.rate()}}, std::move(stats), failures, limit);
  }
  finish(report);
  return report;
}

ExperimentReport run_sketched(const ExperimentConfig& cfg) {
  const Json& a = cfg.application;
  MixtureSpec spec{vector_from_json(a.at("alpha"), "sketched.alpha"), vector_from_json(a.at("beta"), "sketched.beta"),
                   matrix_from_json(a.at("d"), "sketched.d"), get_or<bool>(a, "metric", false)};
  const double noise = get_or<double>(a, "d_noise", 0.0);
  require(noise >= 0.0, "sketched.d_noise must be nonnegative");
  const SketchedResult pop = sketched_wasserstein(spec);
  const DiscreteMeasure alpha = spec.alpha_measure(), beta = spec.beta_measure();
  const Eigen::Index k = spec.alpha.size();

  ExperimentReport report = new_report(cfg);
  report.summary["value"] = pop.value;
  report.summary["plan"] = to_json(pop.plan);
  for (std::size_t s = 0; s < cfg.sizes.size(); ++s) {
    const auto [n, m] = cfg.sizes[s];
    const SampleRatio ratio(n, m);
    auto [stats, failures] = replicate(cfg, s, [&](std::mt19937_64& rng) {
      auto frequencies = [&](const DiscreteMeasure& w, long size) {
        Vector f = Vector::Zero(k);
        const auto sample = draw_sample(w, size, rng);
        for (const auto& x : sample.draws()) f[static_cast<Eigen::Index>(std::lround(x[0]))] += 1.0;
        return Vector(f / static_cast<double>(size));
      };
      MixtureSpec est{frequencies(alpha, n), frequencies(beta, m), spec.d_matrix, false};
      std::normal_distribution<double> gauss;
      // Zero distances are known exactly; only positive entries are estimated,
      // so the clamp at zero binds only far in the tails.
      for (Eigen::Index e = 0; e < est.d_matrix.size(); ++e)
        if (spec.d_matrix.data()[e] > 0.0)
          est.d_matrix.data()[e] = std::max(0.0, est.d_matrix.data()[e] + noise / ratio.rate() * gauss(rng));
      return ratio.rate() * (sketched_wasserstein(est).value - pop.value);
    });
    const Matrix sd = noise * (spec.d_matrix.array() > 0.0).cast<double>().matrix();
    CostProcess process = noise > 0.0 ? CostProcess::independent_entries(sd) : CostProcess::zero();
    const auto limit = sketched_limit(spec, GaussianTripleModel::bridges(alpha, beta, process), ratio, limit_options(cfg, s));
    add_comparison_row(report, cfg, n, m, {{"rate", ratio.rate()}}, std::move(stats), failures, limit);
  }
  finish(report);
  return report;
}

ExperimentReport run_gof(const ExperimentConfig& cfg) {
  const DiscreteMeasure& mu = need(cfg.mu, "mu");
  const Json& a = cfg.application;
  const DiscreteMeasure nu0 = parse_measure(a.at("nu0"), "gof.nu0");
  const std::string kind = get_or<std::string>(a, "family", "location");
  GroupFamily::Kind fk = GroupFamily::Kind::location;
  if (kind == "location_scale") fk = GroupFamily::Kind::location_scale;
  else require(kind == "location", "gof.family must be \"location\" or \"location_scale\"");
  const GroupFamily family(fk, mu.dim());
  const Vector theta = moment_estimate(family, mu, nu0);
  const double pop = gof_statistic(mu, nu0, family, theta);

  ExperimentReport report = new_report(cfg);
  report.summary["population"] = pop;
  report.summary["theta"] = to_json(theta);
  for (std::size_t s = 0; s < cfg.sizes.size(); ++s) {
    const long n = cfg.sizes[s].first;
    const double rate = std::sqrt(static_cast<double>(n));
    auto [stats, failures] = replicate(cfg, s, [&](std::mt19937_64& rng) {
      const DiscreteMeasure mu_n = draw_sample(mu, n, rng).to_measure();
      return rate * (gof_statistic(mu_n, nu0, family, moment_estimate(family, mu_n, nu0)) - pop);
    });
    std::optional<LimitSampleSet> limit;
    if (fk == GroupFamily::Kind::location)
      limit = gof_limit(mu, nu0, family, theta, location_moment_model(mu), limit_options(cfg, s));
    else
      report.warnings.push_back("no estimator limit model for location_scale; limit comparison skipped");
    add_comparison_row(report, cfg, n, 0, {{"rate", rate}}, std::move(stats), failures, limit);
  }
  finish(report);
  return report;
}

ExperimentReport run_stability_probe(const ExperimentConfig& cfg) {
  const Json& a = cfg.application;
  const int instances = get_or<int>(a, "instances", 20);
  const int atoms = get_or<int>(a, "atoms", 4);
  const int dim = get_or<int>(a, "dim", 2);
  std::vector<double> ts = {1e-2, 1e-3, 1e-4};
  if (a.contains("t")) {
    const Vector v = vector_from_json(a.at("t"), "stability.t");
    ts.assign(v.data(), v.data() + v.size());
  }
  require(instances >= 1 && atoms >= 1 && dim >= 1, "stability probe needs positive sizes");

  std::vector<double> max_err(ts.size(), 0.0);
  std::vector<int> outside(ts.size(), 0);
  int corollary_violations = 0;
  std::vector<std::vector<double>> errs(static_cast<std::size_t>(instances));
  std::vector<std::vector<int>> bad(static_cast<std::size_t>(instances));
  std::vector<int> cor(static_cast<std::size_t>(instances), 0);
  const std::uint64_t stream = derive(cfg.seed, kProbe, 0);
  parallel_for(static_cast<std::size_t>(instances), cfg.threads, [&](std::size_t i) {
    std::mt19937_64 rng = substream(stream, i);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    auto points = [&](int k) {
      std::vector<Point> p;
      for (int a2 = 0; a2 < k; ++a2) {
        Point x(dim);
        for (int c = 0; c < dim; ++c) x[c] = gauss(rng);
        p.push_back(x);
      }
      return p;
    };
    auto weights = [&](int k) {
      Vector w(k);
      for (int c = 0; c < k; ++c) w[c] = unif(rng);
      return Vector(w / w.sum());
    };
    const auto xs = points(atoms), ys = points(atoms);
    const Vector wmu = weights(atoms), wnu = weights(atoms);
    const DiscreteMeasure mu(xs, std::vector<double>(wmu.data(), wmu.data() + atoms));
    const DiscreteMeasure nu(ys, std::vector<double>(wnu.data(), wnu.data() + atoms));
    const CostMatrix c = CostMatrix::evaluate(mu, nu, costs::squared_euclidean);
    PerturbationTriple dir{weights(atoms) - mu.weights(), weights(atoms) - nu.weights(), Matrix(atoms, atoms)};
    for (Eigen::Index e = 0; e < dir.dc.size(); ++e) dir.dc.data()[e] = gauss(rng);
    dir.dmu -= Vector::Constant(atoms, dir.dmu.sum() / atoms);
    dir.dnu -= Vector::Constant(atoms, dir.dnu.sum() / atoms);
    const double ot = solved(mu, nu, c);
    const double deriv = gateaux_derivative(mu, nu, c, dir, cfg.face_tol);
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const double t = ts[k];
      const DiscreteMeasure mu_t = mu.reweighted(mu.weights() + t * dir.dmu);
      const DiscreteMeasure nu_t = nu.reweighted(nu.weights() + t * dir.dnu);
      const CostMatrix c_t(c.values() + t * dir.dc);
      const double ot_t = solved(mu_t, nu_t, c_t);
      errs[i].push_back(std::abs((ot_t - ot) / t - deriv) / (1.0 + std::abs(deriv)));
      bad[i].push_back(!sandwich_bounds(mu, nu, mu_t, nu_t, c, c_t, cfg.face_tol).contains(ot_t - ot));
    }
    const CostMatrix c_shift(c.values() + 0.1 * dir.dc);
    cor[i] = std::abs(solved(mu, nu, c_shift) - ot) > (c_shift.values() - c.values()).cwiseAbs().maxCoeff() + 1e-9;
  });
  for (int i = 0; i < instances; ++i) {
    for (std::size_t k = 0; k < ts.size(); ++k) {
      max_err[k] = std::max(max_err[k], errs[static_cast<std::size_t>(i)][k]);
      outside[k] += bad[static_cast<std::size_t>(i)][k];
    }
    corollary_violations += cor[static_cast<std::size_t>(i)];
  }
  ExperimentReport report = new_report(cfg);
  for (std::size_t k = 0; k < ts.size(); ++k)
    report.rows.push_back({{"t", ts[k]}, {"max_relative_error", max_err[k]}, {"sandwich_violations", outside[k]}});
  report.summary["instances"] = instances;
  report.summary["fixed_measure_violations"] = corollary_violations;
  return report;
}

ExperimentReport run_regelev_probe(const ExperimentConfig& cfg) {
  const Json& a = cfg.application;
  const int atoms = get_or<int>(a, "atoms", 6);
  const double sigma = get_or<double>(a, "sigma", 1.0);
  const double slope = get_or<double>(a, "slope", 1.0);
  const int reps = get_or<int>(a, "reps", 200);
  std::vector<double> rates = {1e2, 1e3, 1e4};
  if (a.contains("rates")) {
    const Vector v = vector_from_json(a.at("rates"), "regelev.rates");
    rates.assign(v.data(), v.data() + v.size());
  }
  std::mt19937_64 rng = substream(derive(cfg.seed, kProbe, 1), 0);
  std::normal_distribution<double> gauss;
  const double spacing = get_or<double>(a, "spacing", 0.0);
  require(spacing >= 0.0, "regelev.spacing must be nonnegative");
  std::vector<Point> xs, ys;
  // With a spacing the rows sit on a fine grid, where the modulus has little slack.
  for (int i = 0; i < atoms; ++i) xs.push_back(make_point({spacing > 0.0 ? spacing * i : gauss(rng)}));
  for (int i = 0; i < atoms; ++i) ys.push_back(make_point({gauss(rng)}));
  const CostMatrix c = CostMatrix::evaluate(xs, ys, costs::euclidean);
  const ElevationSpec spec = ElevationSpec::modulus(ModulusOfContinuity::linear(slope), distance_matrix(xs));
  const auto rows = elevation_convergence_probe(c, sigma, spec, rates, reps, derive(cfg.seed, kProbe, 2), cfg.threads);

  ExperimentReport report = new_report(cfg);
  bool monotone = true;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    report.rows.push_back({{"rate", rows[k].rate}, {"median", rows[k].median}, {"mean", rows[k].mean}, {"max", rows[k].max}});
    if (k > 0 && rows[k].median > rows[k - 1].median) monotone = false;
  }
  report.summary["medians_nonincreasing"] = monotone;
  return report;
}

}  // namespace

ExperimentReport run_application(const ExperimentConfig& cfg) {
  switch (cfg.scenario) {
    case Scenario::sliced: return run_sliced(cfg);
    case Scenario::procrustes: return run_procrustes(cfg);
    case Scenario::sketched: return run_sketched(cfg);
    case Scenario::gof: return run_gof(cfg);
    default: break;
  }
  throw InvalidArgument(std::string("scenario ") + to_string(cfg.scenario) + " is not an application");
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.scenario) {
    case Scenario::wcc_clt: return run_wcc_clt(cfg);
    case Scenario::extremal_clt: return run_extremal_clt(cfg);
    case Scenario::bootstrap_wcc:
    case Scenario::bootstrap_extremal: return run_bootstrap_experiment(cfg);
    case Scenario::stability_probe: return run_stability_probe(cfg);
    case Scenario::regelev_probe: return run_regelev_probe(cfg);
    default: return run_application(cfg);
  }
}

}  // namespace otl
