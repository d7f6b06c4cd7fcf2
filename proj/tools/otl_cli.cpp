// Command-line front end for the otl library.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "otl/ctransform.hpp"
#include "otl/harness.hpp"

using namespace otl;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;
  bool threads_set = false;
  std::string out;
  std::string config;
};

struct CostArgs {
  std::string cost = "squared_euclidean";
  std::string matrix_path;

  CostMatrix build(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const {
    if (!matrix_path.empty()) {
      CostMatrix c(read_csv_matrix(matrix_path));
      c.check_shape(mu, nu);
      return c;
    }
    return CostMatrix::evaluate(mu, nu, function());
  }

  CostMatrix::Function function() const {
    if (cost == "squared_euclidean") return costs::squared_euclidean;
    if (cost == "euclidean") return costs::euclidean;
    if (cost.rfind("power:", 0) == 0) {
      double p = 0.0;
      try {
        p = std::stod(cost.substr(6));
      } catch (const std::exception&) {
        throw InvalidArgument("--cost power:<p> needs a number");
      }
      require(p > 0.0, "--cost power:<p> needs p > 0");
      return costs::power(p);
    }
    throw InvalidArgument("--cost must be squared_euclidean, euclidean or power:<p>");
  }
};

void add_cost_options(CLI::App* cmd, CostArgs& args) {
  cmd->add_option("--cost", args.cost, "squared_euclidean | euclidean | power:<p>");
  cmd->add_option("--cost-matrix", args.matrix_path, "CSV cost matrix (rows follow --mu, columns --nu)")
      ->check(CLI::ExistingFile);
}

Vector parse_list(const std::string& text, const std::string& what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      require(item.find_first_not_of(" \t", used) == std::string::npos, "");
    } catch (const std::exception&) {
      throw InvalidArgument(what + ": \"" + item + "\" is not a number");
    }
  }
  require(!values.empty(), what + " is empty");
  return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void emit(const Globals& g, const Json& j) {
  const std::string text = j.dump(2) + "\n";
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out);
  require(static_cast<bool>(f), "cannot write " + g.out);
  f << text;
}

void write_raw(const std::string& path, const std::string& label, const std::vector<double>& values) {
  if (path.empty()) return;
  std::ofstream f(path);
  require(static_cast<bool>(f), "cannot write " + path);
  ExperimentReport r;
  r.raw.push_back({label, values});
  r.write_raw_csv(f);
}

Json warnings_json(const std::vector<std::string>& w) { return Json(w); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal transport under perturbed costs: solver, limit laws, bootstrap and experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Master seed")->each([&](const std::string&) { g.seed_set = true; });
  app.add_option("--threads", g.threads, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->each([&](const std::string&) { g.threads_set = true; });
  app.add_option("--out", g.out, "Write the JSON result here instead of stdout");
  app.add_option("--config", g.config, "Experiment config (JSON)")->check(CLI::ExistingFile);

  // solve
  auto* solve = app.add_subcommand("solve", "Exact OT value, plan and potentials");
  std::string mu_path, nu_path;
  CostArgs solve_cost;
  solve->add_option("--mu", mu_path, "CSV of the first measure")->required()->check(CLI::ExistingFile);
  solve->add_option("--nu", nu_path, "CSV of the second measure")->required()->check(CLI::ExistingFile);
  add_cost_options(solve, solve_cost);

  // ctransform
  auto* ctr = app.add_subcommand("ctransform", "c-transform of a potential");
  std::string f_list, matrix_path;
  bool rows = false, twice = false;
  ctr->add_option("--f", f_list, "Comma-separated potential")->required();
  ctr->add_option("--cost-matrix", matrix_path, "CSV cost matrix")->required()->check(CLI::ExistingFile);
  ctr->add_flag("--rows", rows, "Transform a column potential back to the rows");
  ctr->add_flag("--double", twice, "Return f^cc as well");

  // limit-sample
  auto* lim = app.add_subcommand("limit-sample", "Draws from the limit law of the rescaled OT statistic");
  CostArgs lim_cost;
  long lim_n = 0, lim_m = 0;
  double lim_lambda = 0.5, lim_noise = 0.0;
  int lim_draws = 10000;
  std::string lim_raw;
  lim->add_option("--mu", mu_path)->required()->check(CLI::ExistingFile);
  lim->add_option("--nu", nu_path)->required()->check(CLI::ExistingFile);
  add_cost_options(lim, lim_cost);
  lim->add_option("--n", lim_n, "First sample size (sets lambda = m / (n + m))");
  lim->add_option("--m", lim_m, "Second sample size; omit for the one-sample limit");
  lim->add_option("--lambda", lim_lambda, "Asymptotic ratio when no sizes are given")->check(CLI::Range(0.0, 1.0));
  lim->add_option("--cost-noise", lim_noise, "Standard deviation of independent Gaussian cost noise");
  lim->add_option("--draws", lim_draws)->check(CLI::PositiveNumber);
  lim->add_option("--raw", lim_raw, "CSV file for the raw draws");

  // bootstrap
  auto* boot = app.add_subcommand("bootstrap", "m-out-of-n bootstrap law of the OT statistic");
  CostArgs boot_cost;
  std::string x_path, y_path, boot_raw, boot_mode = "wcc", grid_list;
  long boot_k = 0;
  int boot_b = 1000;
  boot->add_option("--x", x_path, "CSV sample from the first law")->required()->check(CLI::ExistingFile);
  boot->add_option("--y", y_path, "CSV sample from the second law")->required()->check(CLI::ExistingFile);
  boot->add_option("--cost", boot_cost.cost, "squared_euclidean | euclidean | power:<p>");
  boot->add_option("--k", boot_k, "Resample size (default floor(n^(2/3)))");
  boot->add_option("--replicates", boot_b)->check(CLI::PositiveNumber);
  boot->add_option("--mode", boot_mode, "wcc | inf | sup")->check(CLI::IsMember({"wcc", "inf", "sup"}));
  boot->add_option("--shift-grid", grid_list, "Comma-separated shifts theta for c(x, y) = |x - y - theta|^2 (inf/sup)");
  boot->add_option("--raw", boot_raw, "CSV file for the bootstrap draws");

  // sliced
  auto* sl = app.add_subcommand("sliced", "Sliced and max-sliced OT between two samples");
  int directions = 64;
  double sl_p = 2.0;
  bool refine = false;
  sl->add_option("--x", x_path)->required()->check(CLI::ExistingFile);
  sl->add_option("--y", y_path)->required()->check(CLI::ExistingFile);
  sl->add_option("--directions", directions)->check(CLI::PositiveNumber);
  sl->add_option("--p", sl_p)->check(CLI::PositiveNumber);
  sl->add_flag("--refine", refine, "Refine the max-sliced direction locally");

  // procrustes
  auto* pr = app.add_subcommand("procrustes", "OT up to rotations");
  int pr_grid = 0;
  std::string pr_refine = "alternating";
  pr->add_option("--mu", mu_path)->required()->check(CLI::ExistingFile);
  pr->add_option("--nu", nu_path)->required()->check(CLI::ExistingFile);
  pr->add_option("--grid", pr_grid, "Grid size (default 72 angles in 2D, 500 quaternions in 3D)");
  pr->add_option("--refine", pr_refine)->check(CLI::IsMember({"alternating", "grid_only"}));

  // sketched
  auto* sk = app.add_subcommand("sketched", "OT between mixture weights under a matrix of component distances");
  std::string alpha_list, beta_list;
  bool metric = false;
  sk->add_option("--alpha", alpha_list, "Comma-separated weights")->required();
  sk->add_option("--beta", beta_list, "Comma-separated weights")->required();
  sk->add_option("--d", matrix_path, "CSV matrix of component distances")->required()->check(CLI::ExistingFile);
  sk->add_flag("--metric", metric, "Require d to be a pseudo-metric");

  // gof
  auto* gof = app.add_subcommand("gof", "Goodness-of-fit statistic against a location or location-scale family");
  std::string family_kind = "location";
  int gof_draws = 0;
  gof->add_option("--x", x_path, "CSV sample")->required()->check(CLI::ExistingFile);
  gof->add_option("--nu0", nu_path, "CSV of the reference measure")->required()->check(CLI::ExistingFile);
  gof->add_option("--family", family_kind)->check(CLI::IsMember({"location", "location_scale"}));
  gof->add_option("--limit-draws", gof_draws, "Also sample the limit law (location family)");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run a Monte Carlo experiment from --config");
  std::string raw_csv;
  bool validate_only = false;
  exp->add_option("--raw-csv", raw_csv, "CSV of raw draws (implies keep_raw)");
  exp->add_flag("--validate", validate_only, "Check the config and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (solve->parsed()) {
      const DiscreteMeasure mu = read_csv_sample(mu_path).to_measure();
      const DiscreteMeasure nu = read_csv_sample(nu_path).to_measure();
      const OtSolution sol = solve_ot(mu, nu, solve_cost.build(mu, nu));
      if (!sol.ok()) throw NumericalFailure(std::string("solver status ") + to_string(sol.status));
      emit(g, to_json(sol));
    } else if (ctr->parsed()) {
      const CostMatrix c(read_csv_matrix(matrix_path));
      const Vector f = parse_list(f_list, "--f");
      require(f.size() == (rows ? c.cols() : c.rows()), "--f length does not match the cost matrix");
      std::vector<int> argmin;
      const Vector fc = rows ? c_transform_rows(f, c, &argmin) : c_transform(f, c, &argmin);
      Json out = {{"transform", to_json(fc)}, {"argmin", argmin}};
      if (twice) out["double"] = to_json(rows ? c_transform(fc, c) : c_transform_rows(fc, c));
      emit(g, out);
    } else if (lim->parsed()) {
      const DiscreteMeasure mu = read_csv_sample(mu_path).to_measure();
      const DiscreteMeasure nu = read_csv_sample(nu_path).to_measure();
      const CostMatrix c = lim_cost.build(mu, nu);
      SampleRatio ratio = SampleRatio::asymptotic(lim_lambda);
      if (lim_n > 0 && lim_m > 0) ratio = SampleRatio(lim_n, lim_m);
      else if (lim_n > 0) ratio = SampleRatio::one_sample(lim_n);
      require(lim_noise >= 0.0, "--cost-noise must be nonnegative");
      const CostProcess process =
          lim_noise > 0.0 ? CostProcess::independent_entries(Matrix::Constant(c.rows(), c.cols(), lim_noise))
                          : CostProcess::zero();
      LimitOptions opt;
      opt.n_draws = lim_draws;
      opt.seed = g.seed;
      opt.threads = g.threads;
      const LimitSampleSet law = sample_limit_wcc(mu, nu, c, GaussianTripleModel::bridges(mu, nu, process), ratio, opt);
      write_raw(lim_raw, "limit", law.draws);
      emit(g, {{"lambda", ratio.lambda()}, {"draws", lim_draws}, {"seed", g.seed}, {"summary", to_json(law.summary)}});
    } else if (boot->parsed()) {
      const EmpiricalSample x = read_csv_sample(x_path).to_sample();
      const EmpiricalSample y = read_csv_sample(y_path).to_sample();
      BootstrapConfig cfg;
      cfg.k = boot_k;
      cfg.replicates = boot_b;
      cfg.seed = g.seed;
      cfg.threads = g.threads;
      std::vector<double> values;
      Json out;
      if (boot_mode == "wcc") {
        cfg.cost_estimator = fixed_cost_estimator(boot_cost.function());
        const BootstrapLaw law = bootstrap_ot_wcc(x, y, cfg);
        values = law.law.values();
        out = {{"k", law.k}, {"l", law.l}, {"failures", law.failures}, {"warnings", warnings_json(law.warnings)}};
      } else {
        require(!grid_list.empty(), "--shift-grid is required for --mode inf/sup");
        const Vector grid = parse_list(grid_list, "--shift-grid");
        require(x.dim() == 1, "--shift-grid applies to one-dimensional samples");
        std::vector<Vector> thetas;
        for (Eigen::Index k = 0; k < grid.size(); ++k) thetas.push_back(Vector::Constant(1, grid[k]));
        const CostFamily family(
            thetas, [](const Vector& t, const Point& a, const Point& b) { return (a - b - t).squaredNorm(); },
            2.0 * (grid.cwiseAbs().maxCoeff() + 1.0));
        const BootstrapProcessLaw law =
            bootstrap_ot_process(x, y, family, boot_mode == "inf" ? ProcessMode::inf : ProcessMode::sup, cfg);
        values = law.law.values();
        out = {{"k", law.k}, {"l", law.l}, {"failures", law.failures}, {"warnings", warnings_json(law.warnings)}};
      }
      out["replicates"] = boot_b;
      out["seed"] = g.seed;
      out["summary"] = to_json(summarize(values));
      write_raw(boot_raw, "bootstrap", values);
      emit(g, out);
    } else if (sl->parsed()) {
      const EmpiricalSample x = read_csv_sample(x_path).to_sample();
      const EmpiricalSample y = read_csv_sample(y_path).to_sample();
      const SphereGrid grid = SphereGrid::for_dimension(x.dim(), directions, g.seed);
      const SlicedValues v = sliced_ot(x, y, grid, sl_p, g.threads);
      Json out = {{"average", v.average}, {"max", v.max}, {"argmax", to_json(grid.direction(v.argmax))},
                  {"mesh", grid.mesh()}, {"per_direction", v.per_direction}};
      if (refine) {
        const MaxSlicedResult r = max_sliced_refined(x, y, grid, sl_p, g.seed);
        out["max_refined"] = r.value;
        out["max_refined_direction"] = to_json(r.direction);
      }
      emit(g, out);
    } else if (pr->parsed()) {
      const DiscreteMeasure mu = read_csv_sample(mu_path).to_measure();
      const DiscreteMeasure nu = read_csv_sample(nu_path).to_measure();
      require(mu.dim() == nu.dim() && (mu.dim() == 2 || mu.dim() == 3), "procrustes needs 2D or 3D points");
      const int count = pr_grid > 0 ? pr_grid : (mu.dim() == 2 ? 72 : 500);
      const RotationGrid grid = mu.dim() == 2 ? RotationGrid::angles(count) : RotationGrid::quaternion_net(count);
      const ProcrustesResult r = procrustes_ot(
          mu, nu, grid, pr_refine == "alternating" ? ProcrustesRefine::alternating : ProcrustesRefine::grid_only,
          g.threads);
      emit(g, {{"value", r.value}, {"rotation", to_json(r.rotation)}, {"grid_minimum", r.grid_values[r.best_grid_index]},
               {"mesh", grid.mesh()}, {"trace", r.trace}});
    } else if (sk->parsed()) {
      const MixtureSpec spec{parse_list(alpha_list, "--alpha"), parse_list(beta_list, "--beta"),
                             read_csv_matrix(matrix_path), metric};
      const SketchedResult r = sketched_wasserstein(spec);
      emit(g, {{"value", r.value}, {"plan", to_json(r.plan)}});
    } else if (gof->parsed()) {
      const DiscreteMeasure mu_n = read_csv_sample(x_path).to_measure();
      const DiscreteMeasure nu0 = read_csv_sample(nu_path).to_measure();
      const GroupFamily family(
          family_kind == "location" ? GroupFamily::Kind::location : GroupFamily::Kind::location_scale, mu_n.dim());
      const Vector theta = moment_estimate(family, mu_n, nu0);
      Json out = {{"theta", to_json(theta)}, {"statistic", gof_statistic(mu_n, nu0, family, theta)}};
      if (gof_draws > 0) {
        require(family.kind() == GroupFamily::Kind::location, "--limit-draws needs the location family");
        LimitOptions opt;
        opt.n_draws = gof_draws;
        opt.seed = g.seed;
        opt.threads = g.threads;
        out["limit"] = to_json(gof_limit(mu_n, nu0, family, theta, location_moment_model(mu_n), opt).summary);
      }
      emit(g, out);
    } else if (exp->parsed()) {
      require(!g.config.empty(), "experiment needs --config");
      std::ifstream in(g.config);
      Json j = Json::parse(in);
      require(j.is_object(), "config must be a JSON object");
      if (g.seed_set) j["seed"] = g.seed;
      if (g.threads_set) j["threads"] = g.threads;
      if (!raw_csv.empty()) j["keep_raw"] = true;
      ExperimentConfig cfg = ExperimentConfig::from_json(j);
      if (!raw_csv.empty()) cfg.raw_csv_path = raw_csv;
      if (!g.out.empty()) cfg.report_path = g.out;
      if (validate_only) {
        std::cout << "config ok: " << to_string(cfg.scenario) << "\n";
        return 0;
      }
      const ExperimentReport report = run_experiment(cfg);
      Globals target = g;
      target.out = cfg.report_path;
      emit(target, report.to_json());
      if (!cfg.raw_csv_path.empty()) {
        std::ofstream f(cfg.raw_csv_path);
        require(static_cast<bool>(f), "cannot write " + cfg.raw_csv_path);
        report.write_raw_csv(f);
      }
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
