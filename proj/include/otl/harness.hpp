#pragma once

// Monte Carlo experiment harness: simulates rescaled empirical statistics,
// samples the matching limit laws and reports their bounded Lipschitz and
// Kolmogorov-Smirnov distances. Every random quantity derives from the master
// seed through substreams, so reports do not depend on the worker count.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "otl/applications.hpp"
#include "otl/bootstrap.hpp"
#include "otl/serialize.hpp"

namespace otl {

inline constexpr const char* kLibraryVersion = "0.1.0";

enum class Scenario {
  wcc_clt,
  extremal_clt,
  bootstrap_wcc,
  bootstrap_extremal,
  sliced,
  procrustes,
  sketched,
  gof,
  stability_probe,
  regelev_probe
};
const char* to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);

/// Ground cost of an experiment. `shift_plugin` is the estimated cost
/// c(x, y) = |x - y - theta|^2 with theta_hat = mean(mu_n) - mean(nu_m).
struct CostSpec {
  enum class Kind { squared_euclidean, euclidean, power, matrix, shift_plugin };
  Kind kind = Kind::squared_euclidean;
  double p = 2.0;
  Matrix matrix;  // indexed by the population supports

  static CostSpec from_json(const Json& j);
  bool estimated() const { return kind == Kind::shift_plugin; }
  /// Population cost on (mu, nu); matrix costs are looked up by atom.
  CostMatrix::Function population(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const;
  /// Estimator applied to empirical measures supported inside (mu, nu).
  CostEstimator estimator(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const;
};

/// Parameter grid for the extremal scenarios:
///   shift:    c_theta(x, y) = |x - y - theta|^2 over listed theta vectors
///   matrices: one cost matrix per theta, indexed by the population supports
struct FamilySpec {
  enum class Kind { shift, matrices };
  Kind kind = Kind::shift;
  std::vector<Vector> grid;
  std::vector<Matrix> matrices;
  ExtremalMode mode = ExtremalMode::sup;

  static FamilySpec from_json(const Json& j);
  CostFamily build(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::wcc_clt;
  Json raw;
  std::uint64_t seed = 0;
  int threads = 1;
  std::optional<DiscreteMeasure> mu, nu;
  CostSpec cost;
  std::optional<FamilySpec> family;
  std::vector<std::pair<long, long>> sizes;  // (n, m); m = 0 in one-sample scenarios
  int reps = 200;
  int limit_draws = 10000;
  std::optional<double> face_tol;
  int datasets = 5;
  int replicates = 500;
  std::string k_rule = "n^2/3";  // "n^2/3", "n" or an integer
  bool negative_control = false;
  bool keep_raw = false;
  Json application = Json::object();  // scenario block: "sliced", "gof", ...
  std::string report_path;            // "output": {"report": ..., "raw_csv": ...}
  std::string raw_csv_path;

  /// Schema validation with InvalidArgument on any unknown or malformed key.
  static ExperimentConfig from_json(const Json& j);
};

struct ExperimentReport {
  std::string scenario;
  Json config;
  std::uint64_t seed = 0;
  Json rows = Json::array();
  Json summary = Json::object();
  std::vector<std::string> warnings;
  std::vector<std::pair<std::string, std::vector<double>>> raw;

  Json to_json() const;
  /// Long-format CSV with columns label,index,value.
  void write_raw_csv(std::ostream& out) const;
};

struct LawDistance {
  double d_bl = 0.0;
  double ks = 0.0;
};
LawDistance compare_laws(const std::vector<double>& statistic, const std::vector<double>& limit);

/// Limit model of the plug-in shift cost at ratio lambda: the cost process
/// -2 (x_i - y_j - theta)' Ztheta with Ztheta = sqrt(lambda) X' Zmu -
/// sqrt(1 - lambda) Y' Znu.
GaussianTripleModel shift_plugin_model(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double lambda);

/// Population shift theta = mean(mu) - mean(nu).
Vector mean_shift(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// i.i.d. sample of size n from a finite population.
EmpiricalSample draw_sample(const DiscreteMeasure& mu, long n, std::mt19937_64& rng);

/// Resample size rule: "n^2/3" (default), "n", or a fixed integer.
long resample_size(const std::string& rule, long n);

ExperimentReport run_wcc_clt(const ExperimentConfig& cfg);
ExperimentReport run_extremal_clt(const ExperimentConfig& cfg);
ExperimentReport run_bootstrap_experiment(const ExperimentConfig& cfg);
ExperimentReport run_application(const ExperimentConfig& cfg);
/// Dispatches on cfg.scenario.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

}  // namespace otl
