#include "convint/study.hpp"

#include "convint/io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <thread>

namespace convint {

Process process_from_string(const std::string& name) {
  if (name == "poisson") return Process::Poisson;
  if (name == "thomas") return Process::Thomas;
  throw InvalidArgument("unknown process '" + name + "' (expected poisson or thomas)");
}

std::string to_string(Process p) { return p == Process::Poisson ? "poisson" : "thomas"; }

Seed holdout_seed(Seed base, std::size_t m) { return derive_seed(replicate_seed(base, m), 1); }

ModelFit fit_model(const PointPattern& pattern, const Spectrum& covariate, const FrequencyOrder& order,
                   const FitSettings& settings) {
  if (settings.method == PenaltyKind::None && order.size() > kMaxMleFrequencies)
    throw InvalidArgument("k: the unpenalized estimator supports K <= " + std::to_string(kMaxMleFrequencies));
  ModelFit out;
  out.method = settings.method;
  std::vector<Frequency> freqs = order.frequencies();
  std::optional<QuadratureScheme> scheme;
  while (!scheme) {
    try {
      scheme.emplace(build_scheme(pattern, covariate, FrequencyOrder(freqs), settings.quad_nx, settings.quad_ny));
    } catch (const DegenerateColumn& e) {
      const auto idx = static_cast<std::size_t>(e.column()) % freqs.size();
      out.dropped.push_back(freqs[idx]);
      freqs.erase(freqs.begin() + static_cast<std::ptrdiff_t>(idx));
      if (freqs.empty()) throw;
    }
  }
  out.order = FrequencyOrder(freqs);

  if (settings.method == PenaltyKind::None) {
    const Fit f = fit_mle(*scheme, settings.solver);
    PathPoint pt;
    pt.coef = f.coef;
    pt.loglik = f.loglik;
    pt.support = support_size(f.coef.psi, PenaltyKind::None, settings.solver.zero_threshold);
    pt.cbic = cbic(f.loglik, pt.support, std::max<Eigen::Index>(1, scheme->data_count()));
    pt.converged = f.converged;
    pt.iterations = f.iterations;
    out.result.kind = PenaltyKind::None;
    out.result.weights = Eigen::VectorXd::Ones(scheme->dim());
    out.result.path.push_back(std::move(pt));
    out.converged = f.converged;
  } else {
    AdaptiveFit a = fit_adaptive(*scheme, settings.method, settings.solver, settings.lambdas);
    out.converged = a.ridge.all_converged() && a.final.all_converged();
    out.ridge = std::move(a.ridge);
    out.result = std::move(a.final);
  }
  out.beta = coeffs_to_beta_spectrum(out.result.best().coef, out.order);
  return out;
}

void StudyConfig::validate() const {
  if (targets.empty()) throw InvalidArgument("target-n: at least one level is required");
  for (double t : targets)
    if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("target-n: must be positive");
  if (m < 1) throw InvalidArgument("m: at least one replicate is required");
  if (k < 1 || k > study_k_values().back())
    throw InvalidArgument("k: outside the supported spiral range");
  if (fit.method == PenaltyKind::None && k > kMaxMleFrequencies)
    throw InvalidArgument("k: the unpenalized estimator supports K <= " + std::to_string(kMaxMleFrequencies));
  if (fit.quad_nx < kMinQuadratureGrid || fit.quad_ny < kMinQuadratureGrid)
    throw InvalidArgument("quadrature: grid must be at least " + std::to_string(kMinQuadratureGrid) + " per side");
  if (cov_nx < 2 || cov_ny < 2) throw InvalidArgument("covariate: grid must be at least 2x2");
  thomas.validate();
}

CovariateGrid study_covariate(const StudyConfig& config) {
  return synthetic_covariate(config.cov_nx, config.cov_ny, default_window());
}

std::size_t resolve_jobs(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CONVINTENSITY_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 1;
}

namespace {

template <class F>
void parallel_for(std::size_t count, std::size_t jobs, F&& body) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < jobs; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  for (auto& t : pool) t.join();
}

Eigen::VectorXd raw_vector(const BetaSpectrum& beta, const FrequencyOrder& order) {
  const auto K = static_cast<Eigen::Index>(order.size());
  Eigen::VectorXd v(2 * K);
  for (Eigen::Index i = 0; i < K; ++i) {
    const Complex b = beta.at(order[static_cast<std::size_t>(i)]);
    v(i) = b.real();
    v(K + i) = b.imag();
  }
  return v;
}

Grid sample_on(const Grid& source, Eigen::Index nx, Eigen::Index ny) {
  Grid out(Eigen::MatrixXd::Zero(nx, ny), source.window());
  Eigen::MatrixXd v(nx, ny);
  for (Eigen::Index j = 0; j < ny; ++j)
    for (Eigen::Index i = 0; i < nx; ++i) {
      const Point c = out.pixel_center(i, j);
      v(i, j) = source.at(c.x, c.y);
    }
  return Grid(std::move(v), source.window());
}

template <class T>
std::optional<double> mean_of(const std::vector<std::optional<T>>& xs) {
  double s = 0.0;
  std::size_t n = 0;
  for (const auto& x : xs)
    if (x) {
      s += *x;
      ++n;
    }
  if (n == 0) return std::nullopt;
  return s / static_cast<double>(n);
}

double median_of(std::vector<double> xs) {
  if (xs.empty()) return std::nan("");
  std::sort(xs.begin(), xs.end());
  const std::size_t h = xs.size() / 2;
  return xs.size() % 2 ? xs[h] : 0.5 * (xs[h - 1] + xs[h]);
}

std::string opt_str(const std::optional<double>& v) { return v ? io::format_double(*v) : std::string("NA"); }

}  // namespace

StudyResult run_study(const StudyConfig& config, const CovariateGrid& covariate) {
  config.validate();
  const FrequencyOrder order = spiral_order(config.k);
  const BetaSpectrum shape = config.custom_beta ? *config.custom_beta : scenario_beta(config.scenario);
  const Grid eval_cov = sample_on(covariate, config.eval_nx, config.eval_ny);
  const Window window = covariate.window();
  const std::size_t jobs = resolve_jobs(config.jobs);

  StudyResult result;
  for (double target : config.targets) {
    Truth truth = make_truth(shape, covariate, target);
    std::optional<ThomasSimulator> thomas;
    if (config.process == Process::Thomas) {
      ThomasConfig tc = config.thomas;
      tc.target_count = target;
      thomas.emplace(truth.intensity, tc);
    }
    auto draw = [&](Seed seed) {
      return thomas ? thomas->simulate(seed) : simulate_poisson(truth.intensity, seed);
    };
    const Eigen::VectorXd psi0 = raw_vector(truth.beta, order);
    std::set<Eigen::Index> true_support;
    for (Eigen::Index i = 0; i < psi0.size(); ++i)
      if (psi0(i) != 0.0) true_support.insert(i);

    std::vector<ReplicateRecord> recs(config.m);
    parallel_for(config.m, jobs, [&](std::size_t m) {
      ReplicateRecord& r = recs[m];
      r.target_n = target;
      r.m = m;
      try {
        const PointPattern pattern = draw(replicate_seed(config.seed, m));
        r.n_points = pattern.size();
        const ModelFit fit = fit_model(pattern, truth.covariate, order, config.fit);
        r.converged = fit.converged;
        r.beta = fit.beta;
        r.intercept = fit.beta.zero();
        const Eigen::VectorXd psi = raw_vector(fit.beta, order);
        r.psi_error = (psi - psi0).norm();
        const Rates rates = tpr_fpr(support_of(psi), true_support, psi.size());
        r.tpr = rates.tpr;
        r.fpr = rates.fpr;
        const PointPattern holdout = draw(holdout_seed(config.seed, m));
        if (!holdout.empty()) {
          const Prediction pred = predict_intensity(fit.beta, truth.covariate, config.eval_nx, config.eval_ny, window);
          r.auc_fit = auc(pred.map, holdout);
          if (config.compare_baseline && !pattern.empty()) {
            const LogLinearFit base =
                fit_loglinear_baseline(pattern, covariate, config.fit.quad_nx, config.fit.quad_ny, config.fit.solver);
            r.auc_baseline = auc(predict_loglinear(base, eval_cov).map, holdout);
          }
        }
      } catch (const std::exception& e) {
        r.error = e.what();
      }
    });

    LevelSummary lv;
    lv.truth_intercept = truth.beta.zero();
    lv.thomas_correction = thomas ? thomas->correction() : 1.0;
    std::vector<double> intercepts;
    std::vector<BetaSpectrum> betas;
    std::vector<double> errors;
    std::vector<std::optional<double>> tprs, fprs, aucs, bases;
    for (const auto& r : recs) {
      if (!r.error.empty()) {
        ++lv.failures;
        continue;
      }
      intercepts.push_back(r.intercept);
      betas.push_back(r.beta);
      errors.push_back(r.psi_error);
      tprs.push_back(r.tpr);
      fprs.push_back(r.fpr);
      aucs.push_back(r.auc_fit);
      bases.push_back(r.auc_baseline);
    }
    ReplicateReport& rep = lv.report;
    rep.scenario = config.custom_beta ? "custom" : to_string(config.scenario);
    rep.process = to_string(config.process);
    rep.method = to_string(config.fit.method);
    rep.k = config.k;
    rep.target_n = target;
    rep.m = intercepts.size();
    if (!intercepts.empty()) {
      BetaSpectrum tb = truth.beta;
      rep.mse = mse_intercept(intercepts, truth.beta.zero());
      rep.imse = imse(betas, tb, order);
      rep.tpr = mean_of(tprs);
      rep.fpr = mean_of(fprs);
      lv.median_psi_error = median_of(errors);
      lv.mean_auc_fit = mean_of(aucs);
      lv.mean_auc_baseline = mean_of(bases);
    } else {
      rep.mse = rep.imse = std::nan("");
      lv.median_psi_error = std::nan("");
    }
    for (auto& r : recs) {
      for (const auto& k : order) r.imse_contribution += kImsePairMultiplicity * std::norm(r.beta.at(k) - truth.beta.at(k));
      result.replicates.push_back(std::move(r));
    }
    result.levels.push_back(std::move(lv));
  }
  return result;
}

std::string replicates_csv(const StudyResult& result) {
  std::ostringstream os;
  os << "target_n,m,n_points,intercept,psi_error,ise,tpr,fpr,auc_fit,auc_baseline,converged,error\n";
  for (const auto& r : result.replicates) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    os << io::format_double(r.target_n) << ',' << r.m << ',' << r.n_points << ',' << io::format_double(r.intercept)
       << ',' << io::format_double(r.psi_error) << ',' << io::format_double(r.imse_contribution) << ','
       << opt_str(r.tpr) << ',' << opt_str(r.fpr) << ',' << opt_str(r.auc_fit) << ',' << opt_str(r.auc_baseline)
       << ',' << (r.converged ? 1 : 0) << ',' << err << '\n';
  }
  return os.str();
}

std::string report_csv(const StudyResult& result) {
  std::string s = report_csv_header() + '\n';
  for (const auto& lv : result.levels) s += report_csv_row(lv.report) + '\n';
  return s;
}

std::string levels_csv(const StudyResult& result) {
  std::ostringstream os;
  os << "target_n,truth_intercept,median_psi_error,mean_auc_fit,mean_auc_baseline,failures,thomas_correction\n";
  for (const auto& lv : result.levels)
    os << io::format_double(lv.report.target_n) << ',' << io::format_double(lv.truth_intercept) << ','
       << io::format_double(lv.median_psi_error) << ',' << opt_str(lv.mean_auc_fit) << ','
       << opt_str(lv.mean_auc_baseline) << ',' << lv.failures << ',' << io::format_double(lv.thomas_correction)
       << '\n';
  return os.str();
}

void write_study(const std::filesystem::path& dir, const StudyResult& result) {
  io::write_text(dir / "report.csv", report_csv(result));
  io::write_text(dir / "replicates.csv", replicates_csv(result));
  io::write_text(dir / "levels.csv", levels_csv(result));
}

}  // namespace convint
