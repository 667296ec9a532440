#include "convint/solver.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>

namespace convint {

std::string to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::None: return "mle";
    case PenaltyKind::Ridge: return "ridge";
    case PenaltyKind::Lasso: return "lasso";
  }
  return "unknown";
}

PenaltyKind penalty_kind_from_string(const std::string& name) {
  if (name == "mle" || name == "none") return PenaltyKind::None;
  if (name == "ridge") return PenaltyKind::Ridge;
  if (name == "lasso") return PenaltyKind::Lasso;
  throw InvalidArgument("unknown method '" + name + "' (expected mle, ridge or lasso)");
}

Penalty Penalty::none(Eigen::Index dim) { return {PenaltyKind::None, Eigen::VectorXd::Ones(dim), 0.0}; }

Penalty Penalty::uniform(PenaltyKind kind, Eigen::Index dim, double lambda) {
  return {kind, Eigen::VectorXd::Ones(dim), lambda};
}

void Penalty::validate(Eigen::Index dim) const {
  if (weights.size() != dim) throw LengthMismatch("penalty weights do not match the number of coefficients");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be finite and >= 0");
  for (Eigen::Index j = 0; j < dim; ++j)
    if (!(weights(j) > 0.0)) throw InvalidArgument("penalty weights must be positive (or +inf)");
}

CoefficientVector CoefficientVector::from_unscaled(double intercept, const Eigen::VectorXd& raw,
                                                   const Eigen::VectorXd& scales) {
  return {intercept, raw.cwiseProduct(scales), scales};
}

namespace {

bool is_fixed(const Penalty& pen, Eigen::Index j) {
  return pen.kind != PenaltyKind::None && std::isinf(pen.weights(j));
}

double penalty_value(const Penalty& pen, const Eigen::VectorXd& psi, double n_points) {
  if (pen.kind == PenaltyKind::None || pen.lambda == 0.0) return 0.0;
  double s = 0.0;
  for (Eigen::Index j = 0; j < psi.size(); ++j) {
    if (std::isinf(pen.weights(j))) continue;
    s += pen.kind == PenaltyKind::Lasso ? pen.weights(j) * std::abs(psi(j)) : 0.5 * pen.weights(j) * psi(j) * psi(j);
  }
  return n_points * pen.lambda * s;
}

// Coordinate descent on  1/2 d'Ad - g'd + sum_j lam_j |b_j + d_j|  (intercept unpenalized).
Eigen::VectorXd lasso_subproblem(const Eigen::MatrixXd& a, const Eigen::VectorXd& g, const Eigen::VectorXd& b,
                                 const Eigen::VectorXd& lam, const std::vector<bool>& fixed,
                                 const SolverOptions& opt) {
  const Eigen::Index p1 = b.size();
  Eigen::VectorXd x = b;
  Eigen::VectorXd ad = Eigen::VectorXd::Zero(p1);  // A (x - b)
  auto update = [&](Eigen::Index j) -> double {
    if (fixed[static_cast<std::size_t>(j)]) return 0.0;
    const double ajj = a(j, j);
    if (!(ajj > 0.0)) return 0.0;
    const double r = g(j) - ad(j) + ajj * (x(j) - b(j));
    const double z = ajj * b(j) + r;
    double nx;
    if (j == 0) {
      nx = z / ajj;
    } else {
      const double t = lam(j);
      // |z| within roundoff of the threshold counts as inside the dead zone.
      if (std::abs(z) <= t * (1.0 + 1e-12))
        nx = 0.0;
      else
        nx = z > 0.0 ? (z - t) / ajj : (z + t) / ajj;
    }
    const double delta = nx - x(j);
    if (delta != 0.0) {
      ad.noalias() += delta * a.col(j);
      x(j) = nx;
    }
    return std::abs(delta) * std::sqrt(ajj);
  };
  // With the active set and signs known the subproblem is a linear system.
  const Eigen::VectorXd ab = a * b;
  auto solve_active = [&]() {
    std::vector<Eigen::Index> act;
    for (Eigen::Index j = 0; j < p1; ++j)
      if (!fixed[static_cast<std::size_t>(j)] && (j == 0 || x(j) != 0.0)) act.push_back(j);
    const auto na = static_cast<Eigen::Index>(act.size());
    Eigen::MatrixXd h(na, na);
    Eigen::VectorXd rhs(na);
    for (Eigen::Index r = 0; r < na; ++r) {
      for (Eigen::Index c = 0; c < na; ++c) h(r, c) = a(act[r], act[c]);
      const Eigen::Index j = act[r];
      rhs(r) = ab(j) + g(j) - (j == 0 ? 0.0 : (x(j) > 0.0 ? lam(j) : -lam(j)));
    }
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    if (llt.info() != Eigen::Success) return;
    const Eigen::VectorXd sol = llt.solve(rhs);
    for (Eigen::Index r = 1; r < na; ++r)
      if ((sol(r) > 0.0) != (x(act[r]) > 0.0) || sol(r) == 0.0) return;
    for (Eigen::Index r = 0; r < na; ++r) x(act[r]) = sol(r);
    ad.noalias() = a * (x - b);
  };
  const double scale_tol = opt.inner_tolerance * std::sqrt(std::max(1.0, a.diagonal().maxCoeff()));
  const double rough_tol = std::max(scale_tol, 1e-6 * std::sqrt(std::max(1.0, a.diagonal().maxCoeff())));
  for (int sweep = 0; sweep < opt.max_inner_sweeps; ++sweep) {
    double full = 0.0;
    for (Eigen::Index j = 0; j < p1; ++j) full = std::max(full, update(j));
    if (full < scale_tol) break;
    // Iterate on the current active set until it settles, then re-check all coordinates.
    for (int inner = 0; inner < opt.max_inner_sweeps; ++inner) {
      double change = update(0);
      for (Eigen::Index j = 1; j < p1; ++j)
        if (x(j) != 0.0) change = std::max(change, update(j));
      if (change < rough_tol) {
        solve_active();
        break;
      }
    }
  }
  return x;
}

}  // namespace

CoefficientVector null_fit(const QuadratureScheme& scheme) {
  CoefficientVector c;
  c.psi = Eigen::VectorXd::Zero(scheme.dim());
  c.scales = scheme.scales();
  c.intercept = scheme.empty_pattern() ? -std::numeric_limits<double>::infinity()
                                       : std::log(static_cast<double>(scheme.data_count()) / scheme.weights().sum());
  return c;
}

double penalized_objective(const QuadratureScheme& scheme, const CoefficientVector& coef, const Penalty& penalty) {
  return log_likelihood(scheme, coef.intercept, coef.psi) -
         penalty_value(penalty, coef.psi, static_cast<double>(scheme.data_count()));
}

Fit fit_penalized(const QuadratureScheme& scheme, const Penalty& penalty, const SolverOptions& opt,
                  const CoefficientVector* start) {
  const Eigen::Index p = scheme.dim();
  penalty.validate(p);
  const double n_points = static_cast<double>(scheme.data_count());
  const bool empty = scheme.empty_pattern();

  std::vector<bool> fixed(static_cast<std::size_t>(p + 1), false);
  for (Eigen::Index j = 0; j < p; ++j) fixed[static_cast<std::size_t>(j + 1)] = is_fixed(penalty, j);

  Eigen::VectorXd b(p + 1);
  if (start) {
    if (start->psi.size() != p) throw LengthMismatch("warm start has the wrong length");
    b(0) = std::isfinite(start->intercept) ? start->intercept : 0.0;
    b.tail(p) = start->psi;
  } else {
    b.setZero();
    if (!empty) b(0) = std::log(n_points / scheme.weights().sum());
  }
  for (Eigen::Index j = 0; j < p; ++j)
    if (fixed[static_cast<std::size_t>(j + 1)]) b(j + 1) = 0.0;

  auto objective_of = [&](const Eigen::VectorXd& coef, Eigen::VectorXd& eta) {
    eta = linear_predictor(scheme, coef(0), coef.tail(p));
    if ((eta.array() > 700.0).any()) return -std::numeric_limits<double>::infinity();
    return log_likelihood_from_eta(scheme, eta) - penalty_value(penalty, coef.tail(p), n_points);
  };

  // Penalty weights in likelihood units.
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(p + 1);
  if (penalty.kind != PenaltyKind::None)
    for (Eigen::Index j = 0; j < p; ++j)
      if (!fixed[static_cast<std::size_t>(j + 1)]) lam(j + 1) = n_points * penalty.lambda * penalty.weights(j);

  Fit fit;
  Eigen::VectorXd eta;
  double obj = objective_of(b, eta);
  if (!std::isfinite(obj)) {
    b.setZero();
    if (!empty) b(0) = std::log(n_points / scheme.weights().sum());
    obj = objective_of(b, eta);
  }
  fit.objective_trace.push_back(obj);

  for (int it = 1; it <= opt.max_outer_iterations; ++it) {
    fit.iterations = it;
    const Eigen::VectorXd v = scheme.weights().cwiseProduct(eta.array().exp().matrix());
    const Eigen::VectorXd g = gradient_from_eta(scheme, eta);
    const Eigen::MatrixXd a = weighted_gram(scheme, v);

    Eigen::VectorXd target;
    if (penalty.kind == PenaltyKind::Lasso && penalty.lambda > 0.0) {
      target = lasso_subproblem(a, g, b, lam, fixed, opt);
    } else {
      // Newton step on the free coordinates: (A + diag(lam)) x = A b + g.
      std::vector<Eigen::Index> free;
      for (Eigen::Index j = 0; j <= p; ++j)
        if (!fixed[static_cast<std::size_t>(j)]) free.push_back(j);
      const auto nf = static_cast<Eigen::Index>(free.size());
      Eigen::MatrixXd h(nf, nf);
      Eigen::VectorXd rhs(nf);
      for (Eigen::Index r = 0; r < nf; ++r) {
        for (Eigen::Index c = 0; c < nf; ++c) h(r, c) = a(free[r], free[c]);
        h(r, r) += penalty.kind == PenaltyKind::Ridge ? lam(free[r]) : 0.0;
        rhs(r) = g(free[r]) + (penalty.kind == PenaltyKind::Ridge ? -lam(free[r]) * b(free[r]) : 0.0);
      }
      Eigen::LLT<Eigen::MatrixXd> llt(h);
      if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-14))
        throw SingularDesign("normal equations are singular; reduce K or add a penalty");
      const Eigen::VectorXd step = llt.solve(rhs);
      target = b;
      for (Eigen::Index r = 0; r < nf; ++r) target(free[r]) += step(r);
    }

    const Eigen::VectorXd dir = target - b;
    double t = 1.0;
    Eigen::VectorXd trial;
    Eigen::VectorXd trial_eta;
    double trial_obj = -std::numeric_limits<double>::infinity();
    const double slack = 1e-12 * std::max(1.0, std::abs(obj));
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
      trial = b + t * dir;
      trial_obj = objective_of(trial, trial_eta);
      if (std::isfinite(trial_obj) && trial_obj >= obj - slack) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!std::isfinite(obj)) throw NonfiniteObjective("objective is not finite at any step length");
      // No ascent along the Newton direction: we are at the optimum up to roundoff.
      fit.converged = dir.cwiseAbs().maxCoeff() < opt.tolerance * 10.0;
      break;
    }
    // Exact intercept given psi never lowers the objective.
    if (!empty) {
      Eigen::VectorXd prof = trial;
      prof(0) = profile_intercept(scheme, trial.tail(p));
      Eigen::VectorXd prof_eta;
      const double prof_obj = objective_of(prof, prof_eta);
      if (std::isfinite(prof_obj) && prof_obj >= trial_obj) {
        trial = std::move(prof);
        trial_eta = std::move(prof_eta);
        trial_obj = prof_obj;
      }
    }
    const double change = (trial - b).cwiseAbs().maxCoeff();
    b = std::move(trial);
    eta = std::move(trial_eta);
    obj = trial_obj;
    fit.objective_trace.push_back(obj);
    if (change < opt.tolerance) {
      fit.converged = !empty;
      break;
    }
  }

  fit.coef.intercept = b(0);
  fit.coef.psi = b.tail(p);
  fit.coef.scales = scheme.scales();
  fit.loglik = log_likelihood_from_eta(scheme, eta);
  fit.objective = obj;
  return fit;
}

Fit fit_mle(const QuadratureScheme& scheme, const SolverOptions& options) {
  if (scheme.dim() > options.max_unpenalized_columns)
    throw InvalidArgument("unpenalized fit is limited to " + std::to_string(options.max_unpenalized_columns) +
                          " columns (K <= " + std::to_string(options.max_unpenalized_columns / 2) + ")");
  return fit_penalized(scheme, Penalty::none(scheme.dim()), options);
}

double kkt_residual(const QuadratureScheme& scheme, const CoefficientVector& coef, const Penalty& penalty) {
  const Eigen::Index p = scheme.dim();
  const double n = std::max<double>(1.0, static_cast<double>(scheme.data_count()));
  const Eigen::VectorXd g = log_likelihood_gradient(scheme, coef.intercept, coef.psi) / n;
  double worst = std::abs(g(0));
  for (Eigen::Index j = 0; j < p; ++j) {
    const double gj = g(j + 1);
    const double psi = coef.psi(j);
    double viol = 0.0;
    if (penalty.kind == PenaltyKind::None || penalty.lambda == 0.0) {
      viol = std::abs(gj);
    } else if (std::isinf(penalty.weights(j))) {
      viol = 0.0;
    } else {
      const double t = penalty.lambda * penalty.weights(j);
      if (penalty.kind == PenaltyKind::Ridge)
        viol = std::abs(gj - t * psi);
      else if (psi == 0.0)
        viol = std::max(0.0, std::abs(gj) - t);
      else
        viol = std::abs(gj - t * (psi > 0 ? 1.0 : -1.0));
    }
    worst = std::max(worst, viol);
  }
  return worst;
}

double lambda_max(const QuadratureScheme& scheme, const Eigen::VectorXd& weights) {
  if (weights.size() != scheme.dim()) throw LengthMismatch("weights do not match the number of coefficients");
  const CoefficientVector null = null_fit(scheme);
  const Eigen::VectorXd g = log_likelihood_gradient(scheme, null.intercept, null.psi);
  const double n = std::max<double>(1.0, static_cast<double>(scheme.data_count()));
  double lmax = 0.0;
  bool any = false;
  for (Eigen::Index j = 0; j < weights.size(); ++j) {
    if (!std::isfinite(weights(j))) continue;
    any = true;
    lmax = std::max(lmax, std::abs(g(j + 1)) / (n * weights(j)));
  }
  if (!any) throw AllInfiniteWeights();
  return lmax;
}

std::vector<double> lambda_grid(const QuadratureScheme& scheme, const Eigen::VectorXd& weights, PenaltyKind kind) {
  double top = lambda_max(scheme, weights);
  if (kind == PenaltyKind::Ridge) top /= kRidgeAlpha;
  if (!(top > 0.0)) throw SingularDesign("null-model gradient vanishes; lambda grid is degenerate");
  std::vector<double> out(kPathLength);
  for (std::size_t k = 0; k < kPathLength; ++k)
    out[k] = top * std::pow(kLambdaMinRatio, static_cast<double>(k) / static_cast<double>(kPathLength - 1));
  out.front() = top;
  return out;
}

double cbic(double loglik, Eigen::Index support, Eigen::Index n_points) {
  if (n_points < 1) throw InvalidArgument("CBIC needs at least one observed point");
  return -2.0 * loglik + static_cast<double>(support) * std::log(static_cast<double>(n_points));
}

Eigen::Index support_size(const Eigen::VectorXd& psi, PenaltyKind kind, double zero_threshold) {
  if (kind == PenaltyKind::Ridge) return (psi.array().abs() > zero_threshold).count();
  return (psi.array() != 0.0).count();
}

bool FitResult::all_converged() const {
  return std::all_of(path.begin(), path.end(), [](const PathPoint& pt) { return pt.converged; });
}

FitResult fit_path(const QuadratureScheme& scheme, PenaltyKind kind, const Eigen::VectorXd& weights,
                   const std::vector<double>& lambdas, const SolverOptions& options) {
  FitResult res;
  res.kind = kind;
  res.weights = weights;
  CoefficientVector warm = null_fit(scheme);
  double best = std::numeric_limits<double>::infinity();
  for (double lambda : lambdas) {
    PathPoint pt;
    pt.lambda = lambda;
    try {
      Fit f = fit_penalized(scheme, Penalty{kind, weights, lambda}, options, &warm);
      pt.coef = f.coef;
      pt.loglik = f.loglik;
      pt.converged = f.converged;
      pt.iterations = f.iterations;
      warm = f.coef;
    } catch (const Error& e) {
      pt.coef = warm;
      pt.loglik = log_likelihood(scheme, warm.intercept, warm.psi);
      pt.error = e.what();
    }
    pt.support = support_size(pt.coef.psi, kind, options.zero_threshold);
    pt.cbic = cbic(pt.loglik, pt.support, std::max<Eigen::Index>(1, scheme.data_count()));
    if (pt.error.empty() && pt.cbic < best) {
      best = pt.cbic;
      res.selected = res.path.size();
    }
    res.path.push_back(std::move(pt));
  }
  return res;
}

AdaptiveFit fit_adaptive(const QuadratureScheme& scheme, PenaltyKind kind, const SolverOptions& options,
                         const std::vector<double>& lambdas) {
  if (kind == PenaltyKind::None) throw InvalidArgument("adaptive fit needs a ridge or lasso penalty");
  const Eigen::Index p = scheme.dim();
  AdaptiveFit out;
  const Eigen::VectorXd unit = Eigen::VectorXd::Ones(p);
  out.ridge = fit_path(scheme, PenaltyKind::Ridge, unit, lambda_grid(scheme, unit, PenaltyKind::Ridge), options);
  const Eigen::VectorXd& pilot = out.ridge.best().coef.psi;
  Eigen::VectorXd w(p);
  for (Eigen::Index j = 0; j < p; ++j)
    w(j) = std::abs(pilot(j)) < options.adaptive_floor ? kInfiniteWeight : 1.0 / std::abs(pilot(j));
  out.final = fit_path(scheme, kind, w, lambdas.empty() ? lambda_grid(scheme, w, kind) : lambdas, options);
  return out;
}

}  // namespace convint
