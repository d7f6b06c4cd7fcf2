#pragma once

// k-out-of-n bootstrap for empirical OT values under estimated costs and for
// the OT process over a cost family, plus one-dimensional distances between
// Monte Carlo laws (bounded Lipschitz and Kolmogorov-Smirnov).

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "otl/measures.hpp"

namespace otl {

/// Sorted finite values, each carrying mass 1/size.
class EmpiricalLaw1D {
 public:
  EmpiricalLaw1D() = default;
  explicit EmpiricalLaw1D(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  const std::vector<double>& values() const { return values_; }
  double mean() const;

 private:
  std::vector<double> values_;
};

/// Cost re-estimated from the (bootstrap) empirical measures. The result must
/// be indexed by mu.support() x nu.support(). Called concurrently from worker
/// threads, so implementations must be reentrant.
using CostEstimator = std::function<CostMatrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu)>;

/// Estimator that ignores the data and evaluates a fixed cost.
CostEstimator fixed_cost_estimator(CostMatrix::Function cost);

/// Plug-in estimator: theta_hat is computed from the empirical measures and
/// the cost c(theta_hat, x, y) is evaluated on their supports.
CostEstimator plugin_cost_estimator(std::function<Vector(const DiscreteMeasure&, const DiscreteMeasure&)> theta_hat,
                                    CostFamily::Function cost);

struct BootstrapConfig {
  long k = 0;  // resample size from sample_x; 0 selects floor(n^(2/3))
  long l = 0;  // resample size from sample_y; 0 derives l = round(k m / n)
  int replicates = 1000;
  std::uint64_t seed = 0;
  int threads = 1;
  CostEstimator cost_estimator;
};

struct BootstrapLaw {
  EmpiricalLaw1D law;
  long k = 0;
  long l = 0;
  int failures = 0;
  std::vector<std::string> warnings;
};

/// Resample sizes (k, l) for sample sizes (n, m) under cfg.
std::pair<long, long> bootstrap_sizes(long n, long m, const BootstrapConfig& cfg);

/// Replicate statistics sqrt(k) (OT(mu*_k, nu*_l, c*) - OT(mu_n, nu_m, c_nm)),
/// where c* and c_nm come from cfg.cost_estimator. A replicate whose
/// estimator throws or whose solve fails is dropped and counted; more than 1%
/// failures raise NumericalFailure.
BootstrapLaw bootstrap_ot_wcc(const EmpiricalSample& sample_x, const EmpiricalSample& sample_y,
                              const BootstrapConfig& cfg);

enum class ProcessMode { process_at_grid, inf, sup };
const char* to_string(ProcessMode mode);

struct BootstrapProcessLaw {
  std::vector<EmpiricalLaw1D> per_theta;  // process_at_grid only
  EmpiricalLaw1D law;                      // inf / sup only
  long k = 0;
  long l = 0;
  int failures = 0;
  std::vector<std::string> warnings;
};

/// Bootstrap of theta -> OT(mu, nu, c_theta) over the family grid, or of its
/// infimum / supremum. cfg.cost_estimator is not used. For inf and sup a
/// warning is recorded when k > n^0.9.
BootstrapProcessLaw bootstrap_ot_process(const EmpiricalSample& sample_x, const EmpiricalSample& sample_y,
                                         const CostFamily& family, ProcessMode mode, const BootstrapConfig& cfg);

/// Exact bounded Lipschitz distance between two empirical laws: the maximum
/// of sum_k f_k (p_k - q_k) over the merged sorted atoms subject to
/// |f_k| <= 1 and |f_{k+1} - f_k| <= x_{k+1} - x_k. Merged supports above
/// `max_atoms` are thinned by uniform subsampling of both laws under `seed`.
double d_bl_1d(const EmpiricalLaw1D& p, const EmpiricalLaw1D& q, std::size_t max_atoms = 40000,
               std::uint64_t seed = 0x64626cULL);

/// Same program for arbitrary signed masses on sorted atoms.
double bl_dual_value(const std::vector<double>& atoms, const std::vector<double>& signed_mass);

/// Two-sample Kolmogorov-Smirnov distance sup_t |F_p(t) - F_q(t)|.
double ks_distance(const EmpiricalLaw1D& p, const EmpiricalLaw1D& q);

}  // namespace otl
