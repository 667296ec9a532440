#include "convint/cli.hpp"

#include "convint/io.hpp"
#include "convint/study.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace convint::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

struct CovariateOptions {
  std::string file;  // empty: the built-in synthetic image
  Eigen::Index nx = 1024;
  Eigen::Index ny = 786;

  void add(CLI::App* app) {
    app->add_option("--covariate", file, "covariate grid file (default: built-in synthetic image)")
        ->check(CLI::ExistingFile);
    app->add_option("--covariate-nx", nx, "synthetic covariate width in pixels")->check(CLI::Range(2, 1 << 14));
    app->add_option("--covariate-ny", ny, "synthetic covariate height in pixels")->check(CLI::Range(2, 1 << 14));
  }

  CovariateGrid load() const {
    if (file.empty()) return synthetic_covariate(nx, ny, default_window());
    Grid g = io::read_grid(file);
    return CovariateGrid(g.values(), g.window());
  }

  json describe() const {
    json j;
    j["source"] = file.empty() ? "synthetic" : file;
    if (file.empty()) {
      j["nx"] = nx;
      j["ny"] = ny;
    }
    return j;
  }
};

struct SimulateArgs {
  std::string scenario = "a";
  std::string beta_file;
  std::string process = "poisson";
  double target_n = 200.0;
  std::size_t m = 1;
  Seed seed = 1;
  std::string out = "simulated";
  ThomasConfig thomas;
  CovariateOptions covariate;
};

struct FitArgs {
  std::string pattern;
  std::size_t k = 112;
  std::string method = "lasso";
  std::vector<double> lambdas;
  Eigen::Index quad_nx = 128;
  Eigen::Index quad_ny = 96;
  Eigen::Index out_nx = 0;  // 0: covariate resolution
  Eigen::Index out_ny = 0;
  bool per_lambda = true;
  std::string out = "fit";
  CovariateOptions covariate;
};

struct PredictArgs {
  std::string beta;
  Eigen::Index nx = 0;
  Eigen::Index ny = 0;
  std::string out = "intensity.grid";
  std::string surface;
  std::string pgm;
  std::string surface_pgm;
  double threshold = 0.0;
  CovariateOptions covariate;
};

struct EvaluateArgs {
  std::string truth;
  std::vector<std::string> estimates;
  std::size_t k = 112;
  std::string scenario = "custom";
  std::string method = "lasso";
  double target_n = 0.0;
  std::string pattern;
  std::vector<std::string> maps;
  double width = 1024.0;
  double height = 786.0;
  std::string out = "evaluation";
};

struct StudyArgs {
  std::string scenario = "a";
  std::string beta_file;
  std::string process = "poisson";
  std::vector<double> targets{200.0, 800.0, 1800.0};
  std::size_t m = 100;
  std::size_t k = 112;
  std::string method = "lasso";
  Seed seed = 1;
  Eigen::Index quad_nx = 128;
  Eigen::Index quad_ny = 96;
  bool no_baseline = false;
  std::string out = "study";
  ThomasConfig thomas;
  CovariateOptions covariate;
};

std::string padded(std::size_t i, std::size_t total) {
  std::size_t width = 3;
  for (std::size_t t = total; t >= 1000; t /= 10) ++width;
  std::ostringstream os;
  os << std::setw(static_cast<int>(width)) << std::setfill('0') << i;
  return os.str();
}

void write_json(const fs::path& path, const json& j) { io::write_text(path, j.dump(2) + "\n"); }

void check_k(std::size_t k) {
  if (k < 1 || k > study_k_values().back())
    throw InvalidArgument("k: must lie in 1.." + std::to_string(study_k_values().back()));
}

BetaSpectrum load_beta(const std::string& file, const std::string& scenario) {
  if (!file.empty()) return BetaSpectrum(io::read_spectrum(file));
  return scenario_beta(scenario_from_string(scenario));
}

std::string scenario_label(const std::string& file, const std::string& scenario) {
  return file.empty() ? to_string(scenario_from_string(scenario)) : "custom";
}

json thomas_json(const ThomasConfig& t) {
  return {{"mean_clusters", t.mean_clusters}, {"offspring_sd", t.offspring_sd}};
}

// simulate -------------------------------------------------------------------

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const Process process = process_from_string(a.process);
  const BetaSpectrum shape = load_beta(a.beta_file, a.scenario);
  const CovariateGrid cov = a.covariate.load();
  const Truth truth = make_truth(shape, cov, a.target_n);
  std::optional<ThomasSimulator> thomas;
  if (process == Process::Thomas) {
    ThomasConfig tc = a.thomas;
    tc.target_count = a.target_n;
    thomas.emplace(truth.intensity, tc);
  }
  const fs::path dir(a.out);
  json files = json::array();
  json counts = json::array();
  double total = 0.0;
  for (std::size_t m = 0; m < a.m; ++m) {
    const Seed seed = replicate_seed(a.seed, m);
    const PointPattern p = thomas ? thomas->simulate(seed) : simulate_poisson(truth.intensity, seed);
    const std::string name = "pattern_" + padded(m, a.m) + ".csv";
    io::write_pattern(dir / name, p);
    files.push_back(name);
    counts.push_back(p.size());
    total += static_cast<double>(p.size());
  }
  io::write_spectrum(dir / "beta.csv", truth.beta);

  json man;
  man["command"] = "simulate";
  man["scenario"] = scenario_label(a.beta_file, a.scenario);
  if (!a.beta_file.empty()) man["beta_file"] = a.beta_file;
  man["process"] = to_string(process);
  man["target_n"] = a.target_n;
  man["m"] = a.m;
  man["seed"] = a.seed;
  man["replicate_seed_rule"] = "seed + m";
  man["covariate"] = a.covariate.describe();
  man["window"] = {cov.window().width, cov.window().height};
  man["beta0"] = truth.beta.zero();
  man["expected_count"] = expected_count(truth.intensity);
  if (thomas) {
    man["thomas"] = thomas_json(thomas->config());
    man["thomas"]["pilot_runs"] = kThomasPilotRuns;
    man["thomas"]["pilot_seed"] = kThomasPilotSeed;
    man["thomas"]["analytic_correction"] = thomas->analytic_correction();
    man["thomas"]["correction"] = thomas->correction();
  }
  man["mean_count"] = total / static_cast<double>(a.m);
  man["counts"] = counts;
  man["files"] = files;
  man["truth"] = "beta.csv";
  write_json(dir / "manifest.json", man);
  out << "wrote " << a.m << " patterns to " << dir.string() << "\n";
  return kExitOk;
}

// fit ------------------------------------------------------------------------

std::string coefficient_csv(const CoefficientVector& c, const FrequencyOrder& order) {
  std::ostringstream os;
  os << "index,kx,ky,part,value_scaled,value_unscaled\n";
  os << "-1,0,0,intercept," << io::format_double(c.intercept) << ',' << io::format_double(c.intercept) << '\n';
  const Eigen::VectorXd raw = c.unscaled();
  const auto K = static_cast<Eigen::Index>(order.size());
  for (Eigen::Index j = 0; j < 2 * K; ++j) {
    const Frequency& f = order[static_cast<std::size_t>(j % K)];
    os << j << ',' << f.kx << ',' << f.ky << ',' << (j < K ? "re" : "im") << ',' << io::format_double(c.psi(j)) << ','
       << io::format_double(raw(j)) << '\n';
  }
  return os.str();
}

std::string path_csv(const FitResult& r) {
  std::ostringstream os;
  os << "lambda,loglik,support,cbic\n";
  for (const auto& p : r.path)
    os << io::format_double(p.lambda) << ',' << io::format_double(p.loglik) << ',' << p.support << ','
       << io::format_double(p.cbic) << '\n';
  return os.str();
}

int cmd_fit(const FitArgs& a, std::ostream& out) {
  check_k(a.k);
  FitSettings settings;
  settings.method = penalty_kind_from_string(a.method);
  if (settings.method == PenaltyKind::None && a.k > kMaxMleFrequencies)
    throw InvalidArgument("k: --method mle supports K <= " + std::to_string(kMaxMleFrequencies));
  if (settings.method == PenaltyKind::None && !a.lambdas.empty())
    throw InvalidArgument("lambda: not used by --method mle");
  settings.quad_nx = a.quad_nx;
  settings.quad_ny = a.quad_ny;
  settings.lambdas = a.lambdas;
  std::sort(settings.lambdas.begin(), settings.lambdas.end(), std::greater<>());

  const CovariateGrid cov = a.covariate.load();
  const PointPattern pattern = io::read_pattern(a.pattern, cov.window());
  const Spectrum z = normalize_covariate(fft2(cov));
  const FrequencyOrder order = spiral_order(a.k);
  const ModelFit fit = fit_model(pattern, z, order, settings);
  const fs::path dir(a.out);

  // Path outputs go first so a failed selection still leaves them on disk.
  if (fit.ridge) io::write_text(dir / "ridge_path.csv", path_csv(*fit.ridge));
  io::write_text(dir / "path.csv", path_csv(fit.result));
  if (a.per_lambda && fit.result.path.size() > 1)
    for (std::size_t i = 0; i < fit.result.path.size(); ++i)
      io::write_text(dir / "coefficients" / ("lambda_" + padded(i, fit.result.path.size()) + ".csv"),
                     coefficient_csv(fit.result.path[i].coef, fit.order));

  const PathPoint& best = fit.result.best();
  if (!best.error.empty()) throw NumericalFailure("selected fit failed: " + best.error);
  io::write_text(dir / "coefficients.csv", coefficient_csv(best.coef, fit.order));
  io::write_spectrum(dir / "beta.csv", fit.beta);
  const Eigen::Index nx = a.out_nx > 0 ? a.out_nx : cov.nx();
  const Eigen::Index ny = a.out_ny > 0 ? a.out_ny : cov.ny();
  io::write_grid(dir / "beta_surface.grid", beta_surface(fit.beta, nx, ny, cov.window(), false));
  const Prediction pred = predict_intensity(fit.beta, z, nx, ny, cov.window());
  io::write_grid(dir / "intensity.grid", pred.map);

  json man;
  man["command"] = "fit";
  man["pattern"] = a.pattern;
  man["n_points"] = pattern.size();
  man["covariate"] = a.covariate.describe();
  man["method"] = to_string(settings.method);
  man["adaptive"] = settings.method != PenaltyKind::None;
  man["k"] = a.k;
  man["k_used"] = fit.order.size();
  json dropped = json::array();
  for (const auto& f : fit.dropped) dropped.push_back({f.kx, f.ky});
  man["dropped_frequencies"] = dropped;
  man["quadrature"] = {a.quad_nx, a.quad_ny};
  man["lambda_grid"] = settings.lambdas.empty() ? "default" : "user";
  man["path_length"] = fit.result.path.size();
  man["selected_index"] = fit.result.selected;
  man["selected_lambda"] = best.lambda;
  man["selected_support"] = best.support;
  man["selected_cbic"] = best.cbic;
  man["loglik"] = best.loglik;
  man["converged"] = fit.converged;
  man["tolerance"] = settings.solver.tolerance;
  man["max_outer_iterations"] = settings.solver.max_outer_iterations;
  man["output_grid"] = {nx, ny};
  man["intensity_clamped"] = pred.clamped;
  write_json(dir / "manifest.json", man);
  out << "selected lambda " << io::format_double(best.lambda) << " with support " << best.support << "\n";
  if (!fit.converged) std::cerr << "warning: some path points hit the iteration limit\n";
  return kExitOk;
}

// predict --------------------------------------------------------------------

int cmd_predict(const PredictArgs& a, std::ostream& out) {
  const CovariateGrid cov = a.covariate.load();
  const BetaSpectrum beta(io::read_spectrum(a.beta));
  const Spectrum z = normalize_covariate(fft2(cov));
  const Eigen::Index nx = a.nx > 0 ? a.nx : cov.nx();
  const Eigen::Index ny = a.ny > 0 ? a.ny : cov.ny();
  const Prediction pred = predict_intensity(beta, z, nx, ny, cov.window());
  io::write_grid(a.out, pred.map);
  if (!a.pgm.empty()) io::write_pgm(a.pgm, pred.map);
  if (!a.surface.empty() || !a.surface_pgm.empty()) {
    Grid surface = beta_surface(beta, nx, ny, cov.window(), false);
    if (a.threshold > 0.0) surface = threshold_surface(surface, a.threshold);
    if (!a.surface.empty()) io::write_grid(a.surface, surface);
    if (!a.surface_pgm.empty()) io::write_pgm(a.surface_pgm, surface);
  }
  out << "expected count " << io::format_double(expected_count(pred.map)) << "\n";
  if (pred.clamped) std::cerr << "warning: log-intensity exceeded " << kMaxLogIntensity << " and was capped\n";
  return kExitOk;
}

// evaluate -------------------------------------------------------------------

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const bool replicate_mode = !a.truth.empty();
  const bool auc_mode = !a.pattern.empty();
  if (!replicate_mode && !auc_mode) throw InvalidArgument("evaluate: give --truth with --estimate, or --pattern with --map");
  const fs::path dir(a.out);
  json man;
  man["command"] = "evaluate";

  if (replicate_mode) {
    if (a.estimates.empty()) throw InvalidArgument("estimate: at least one estimate file is required");
    check_k(a.k);
    const FrequencyOrder order = spiral_order(a.k);
    const BetaSpectrum truth(io::read_spectrum(a.truth));
    std::vector<BetaSpectrum> est;
    std::vector<double> intercepts;
    for (const auto& f : a.estimates) {
      est.emplace_back(io::read_spectrum(f));
      intercepts.push_back(est.back().zero());
    }
    const auto K = static_cast<Eigen::Index>(order.size());
    std::set<Eigen::Index> true_support;
    for (Eigen::Index i = 0; i < K; ++i) {
      const Complex b = truth.at(order[static_cast<std::size_t>(i)]);
      if (b.real() != 0.0) true_support.insert(i);
      if (b.imag() != 0.0) true_support.insert(K + i);
    }
    std::vector<double> tprs, fprs;
    for (const auto& e : est) {
      std::set<Eigen::Index> sel;
      for (Eigen::Index i = 0; i < K; ++i) {
        const Complex b = e.at(order[static_cast<std::size_t>(i)]);
        if (b.real() != 0.0) sel.insert(i);
        if (b.imag() != 0.0) sel.insert(K + i);
      }
      const Rates r = tpr_fpr(sel, true_support, 2 * K);
      if (r.tpr) tprs.push_back(*r.tpr);
      if (r.fpr) fprs.push_back(*r.fpr);
    }
    auto mean = [](const std::vector<double>& v) -> std::optional<double> {
      if (v.empty()) return std::nullopt;
      double s = 0.0;
      for (double x : v) s += x;
      return s / static_cast<double>(v.size());
    };
    ReplicateReport rep;
    rep.scenario = a.scenario;
    rep.process = "given";
    rep.method = a.method;
    rep.k = a.k;
    rep.target_n = a.target_n;
    rep.m = est.size();
    rep.mse = mse_intercept(intercepts, truth.zero());
    rep.imse = imse(est, truth, order);
    rep.tpr = mean(tprs);
    rep.fpr = mean(fprs);
    io::write_text(dir / "report.csv", report_csv_header() + "\n" + report_csv_row(rep) + "\n");
    man["truth"] = a.truth;
    man["estimates"] = a.estimates;
    man["k"] = a.k;
    man["report"] = "report.csv";
    out << report_csv_header() << "\n" << report_csv_row(rep) << "\n";
  }

  if (auc_mode) {
    if (a.maps.empty()) throw InvalidArgument("map: at least one intensity grid is required");
    const Window window(a.width, a.height);
    const PointPattern pattern = io::read_pattern(a.pattern, window);
    std::string table = "map,auc\n";
    for (const auto& m : a.maps) {
      const Grid g = io::read_grid(m);
      if (!(g.window() == window)) throw InvalidArgument("map: window of " + m + " differs from the pattern window");
      const IntensityMap map(g.values().cwiseMax(std::numeric_limits<double>::min()), g.window());
      table += m + ',' + io::format_double(auc(map, pattern)) + '\n';
    }
    io::write_text(dir / "auc.csv", table);
    man["pattern"] = a.pattern;
    man["maps"] = a.maps;
    man["auc"] = "auc.csv";
    out << table;
  }
  write_json(dir / "manifest.json", man);
  return kExitOk;
}

// study ----------------------------------------------------------------------

int cmd_study(const StudyArgs& a, std::size_t jobs, std::ostream& out) {
  StudyConfig c;
  if (!a.beta_file.empty())
    c.custom_beta = BetaSpectrum(io::read_spectrum(a.beta_file));
  else
    c.scenario = scenario_from_string(a.scenario);
  c.process = process_from_string(a.process);
  c.targets = a.targets;
  c.m = a.m;
  c.k = a.k;
  c.fit.method = penalty_kind_from_string(a.method);
  c.fit.quad_nx = a.quad_nx;
  c.fit.quad_ny = a.quad_ny;
  c.seed = a.seed;
  c.cov_nx = a.covariate.nx;
  c.cov_ny = a.covariate.ny;
  c.thomas = a.thomas;
  c.compare_baseline = !a.no_baseline;
  c.jobs = jobs;
  c.validate();

  const StudyResult r = run_study(c, a.covariate.load());
  const fs::path dir(a.out);
  write_study(dir, r);

  json man;
  man["command"] = "study";
  man["scenario"] = scenario_label(a.beta_file, a.scenario);
  if (!a.beta_file.empty()) man["beta_file"] = a.beta_file;
  man["process"] = to_string(c.process);
  man["targets"] = c.targets;
  man["m"] = c.m;
  man["k"] = c.k;
  man["method"] = to_string(c.fit.method);
  man["seed"] = c.seed;
  man["replicate_seed_rule"] = "seed + m";
  man["quadrature"] = {c.fit.quad_nx, c.fit.quad_ny};
  man["covariate"] = a.covariate.describe();
  man["evaluation_grid"] = {c.eval_nx, c.eval_ny};
  man["baseline"] = c.compare_baseline;
  if (c.process == Process::Thomas) man["thomas"] = thomas_json(c.thomas);
  man["outputs"] = {"report.csv", "replicates.csv", "levels.csv"};
  write_json(dir / "manifest.json", man);
  out << report_csv(r);
  return kExitOk;
}

void add_thomas(CLI::App* app, ThomasConfig& t) {
  app->add_option("--clusters", t.mean_clusters, "mean number of Thomas clusters in the window")
      ->check(CLI::PositiveNumber);
  app->add_option("--offspring-sd", t.offspring_sd, "Thomas offspring displacement sd")->check(CLI::PositiveNumber);
}

int classify(const std::exception& e) {
  if (dynamic_cast<const SingularDesign*>(&e) || dynamic_cast<const NonfiniteObjective*>(&e) ||
      dynamic_cast<const NumericalFailure*>(&e) || dynamic_cast<const AllInfiniteWeights*>(&e))
    return kExitNumerical;
  return kExitConfig;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Log-convolution intensity estimation for spatial point patterns", "convint"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value configuration file (command-line flags take precedence)");
  std::size_t jobs = 0;
  app.add_option("--jobs", jobs, "worker threads (default: $CONVINTENSITY_JOBS or 1)")->check(CLI::PositiveNumber);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "simulate point patterns from a scenario");
  s->add_option("--scenario", sim.scenario, "a or b")->check(CLI::IsMember({"a", "b"}));
  s->add_option("--beta-file", sim.beta_file, "custom beta spectrum CSV (replaces --scenario)")
      ->check(CLI::ExistingFile);
  s->add_option("--process", sim.process, "poisson or thomas")->check(CLI::IsMember({"poisson", "thomas"}));
  s->add_option("--target-n", sim.target_n, "expected number of points")->check(CLI::PositiveNumber);
  s->add_option("--m", sim.m, "number of patterns")->check(CLI::PositiveNumber);
  s->add_option("--seed", sim.seed, "base seed; pattern m uses seed + m");
  s->add_option("--out", sim.out, "output directory");
  add_thomas(s, sim.thomas);
  sim.covariate.add(s);

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "fit the log-convolution model to a pattern");
  f->add_option("--pattern", fit.pattern, "pattern CSV")->required()->check(CLI::ExistingFile);
  f->add_option("--k", fit.k, "number of frequencies (spiral order)");
  f->add_option("--method", fit.method, "lasso, ridge or mle")->check(CLI::IsMember({"lasso", "ridge", "mle"}));
  f->add_option("--lambda", fit.lambdas, "explicit lambda values for the final stage")
      ->check(CLI::NonNegativeNumber);
  f->add_option("--quad-nx", fit.quad_nx, "quadrature grid width")->check(CLI::Range(kMinQuadratureGrid, Eigen::Index{1} << 12));
  f->add_option("--quad-ny", fit.quad_ny, "quadrature grid height")->check(CLI::Range(kMinQuadratureGrid, Eigen::Index{1} << 12));
  f->add_option("--grid-nx", fit.out_nx, "output grid width (default: covariate)")->check(CLI::PositiveNumber);
  f->add_option("--grid-ny", fit.out_ny, "output grid height (default: covariate)")->check(CLI::PositiveNumber);
  f->add_flag("!--no-path-coefficients", fit.per_lambda, "skip the per-lambda coefficient files");
  f->add_option("--out", fit.out, "output directory");
  fit.covariate.add(f);

  PredictArgs pr;
  auto* p = app.add_subcommand("predict", "intensity map from a beta spectrum");
  p->add_option("--beta", pr.beta, "beta spectrum CSV")->required()->check(CLI::ExistingFile);
  p->add_option("--nx", pr.nx, "output width (default: covariate)")->check(CLI::PositiveNumber);
  p->add_option("--ny", pr.ny, "output height (default: covariate)")->check(CLI::PositiveNumber);
  p->add_option("--out", pr.out, "intensity grid file");
  p->add_option("--pgm", pr.pgm, "also write the intensity as PGM");
  p->add_option("--surface", pr.surface, "write the beta surface grid");
  p->add_option("--surface-pgm", pr.surface_pgm, "write the beta surface as PGM");
  p->add_option("--threshold", pr.threshold, "keep surface values above this fraction of the max |value|")
      ->check(CLI::Range(0.0, 1.0));
  pr.covariate.add(p);

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "replicate metrics or AUC");
  e->add_option("--truth", ev.truth, "true beta spectrum CSV")->check(CLI::ExistingFile);
  e->add_option("--estimate", ev.estimates, "estimated beta spectrum CSV (repeatable)")->check(CLI::ExistingFile);
  e->add_option("--k", ev.k, "frequencies scored");
  e->add_option("--scenario", ev.scenario, "label for the report");
  e->add_option("--method", ev.method, "label for the report");
  e->add_option("--target-n", ev.target_n, "label for the report");
  e->add_option("--pattern", ev.pattern, "pattern CSV scored by AUC")->check(CLI::ExistingFile);
  e->add_option("--map", ev.maps, "intensity grid (repeatable)")->check(CLI::ExistingFile);
  e->add_option("--width", ev.width, "pattern window width")->check(CLI::PositiveNumber);
  e->add_option("--height", ev.height, "pattern window height")->check(CLI::PositiveNumber);
  e->add_option("--out", ev.out, "output directory");

  StudyArgs st;
  auto* y = app.add_subcommand("study", "replicated simulation study");
  y->add_option("--scenario", st.scenario, "a or b")->check(CLI::IsMember({"a", "b"}));
  y->add_option("--beta-file", st.beta_file, "custom beta spectrum CSV")->check(CLI::ExistingFile);
  y->add_option("--process", st.process, "poisson or thomas")->check(CLI::IsMember({"poisson", "thomas"}));
  y->add_option("--target-n", st.targets, "expected counts (repeatable)")->check(CLI::PositiveNumber);
  y->add_option("--m", st.m, "replicates per level")->check(CLI::PositiveNumber);
  y->add_option("--k", st.k, "number of frequencies");
  y->add_option("--method", st.method, "lasso, ridge or mle")->check(CLI::IsMember({"lasso", "ridge", "mle"}));
  y->add_option("--seed", st.seed, "base seed");
  y->add_option("--quad-nx", st.quad_nx, "quadrature grid width")->check(CLI::Range(kMinQuadratureGrid, Eigen::Index{1} << 12));
  y->add_option("--quad-ny", st.quad_ny, "quadrature grid height")->check(CLI::Range(kMinQuadratureGrid, Eigen::Index{1} << 12));
  y->add_flag("--no-baseline", st.no_baseline, "skip the log-linear AUC baseline");
  y->add_option("--out", st.out, "output directory");
  add_thomas(y, st.thomas);
  st.covariate.add(y);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& pe) {
    err << "error: " << pe.what() << "\n";
    return kExitConfig;
  }

  try {
    if (*s) return cmd_simulate(sim, out);
    if (*f) return cmd_fit(fit, out);
    if (*p) return cmd_predict(pr, out);
    if (*e) return cmd_evaluate(ev, out);
    if (*y) return cmd_study(st, resolve_jobs(jobs), out);
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return classify(ex);
  }
  return kExitConfig;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"convint"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace convint::cli
