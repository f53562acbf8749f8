#include "bmr/elbmr.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bmr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log z for z >= eps, quadratically extended below so the dual objective
// is twice differentiable everywhere (Owen's log-star with eps = 1/n)
struct LogStar {
  double eps;

  double value(double z) const {
    if (z >= eps) return std::log(z);
    const double r = z / eps;
    return std::log(eps) - 1.5 + 2.0 * r - 0.5 * r * r;
  }
  double deriv(double z) const {
    if (z >= eps) return 1.0 / z;
    return (2.0 - z / eps) / eps;
  }
  double deriv2(double z) const {
    if (z >= eps) return -1.0 / (z * z);
    return -1.0 / (eps * eps);
  }
};

}  // namespace

Eigen::VectorXd moment_g(const Eigen::VectorXd& x, double y,
                         const Eigen::VectorXd& beta, double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("moment_g: sigma must be > 0");
  if (x.size() != beta.size())
    throw std::invalid_argument("moment_g: x and beta length mismatch");
  const double r = y - x.dot(beta);
  if (std::abs(r) >= sigma) return Eigen::VectorXd::Zero(x.size());
  return r * x;
}

ELSolution el_inner_solve(const Eigen::MatrixXd& G, double tol, int max_iter) {
  const Eigen::Index n = G.rows();
  const Eigen::Index p = G.cols();
  if (n <= p) throw std::invalid_argument("el_inner_solve: needs n > p");

  ELSolution sol;
  sol.lambda = Eigen::VectorXd::Zero(p);

  // necessary sign condition per coordinate: zero must be bracketed unless
  // the whole column is zero
  std::vector<Eigen::Index> active;
  for (Eigen::Index j = 0; j < p; ++j) {
    const double mn = G.col(j).minCoeff();
    const double mx = G.col(j).maxCoeff();
    if (mn == 0.0 && mx == 0.0) continue;
    if (!(mn < 0.0 && mx > 0.0)) {
      sol.feasible = false;
      sol.log_el_ratio = kNegInf;
      return sol;
    }
    active.push_back(j);
  }

  const double eps = 1.0 / static_cast<double>(n);
  const LogStar ls{eps};
  const Eigen::Index pa = static_cast<Eigen::Index>(active.size());

  Eigen::VectorXd lam_a = Eigen::VectorXd::Zero(pa);
  Eigen::MatrixXd Ga(n, pa);
  for (Eigen::Index k = 0; k < pa; ++k) Ga.col(k) = G.col(active[k]);

  auto objective = [&](const Eigen::VectorXd& lam) {
    double f = 0.0;
    const Eigen::VectorXd z = Eigen::VectorXd::Ones(n) + Ga * lam;
    for (Eigen::Index i = 0; i < n; ++i) f += ls.value(z[i]);
    return f;
  };
  auto gradient = [&](const Eigen::VectorXd& lam, Eigen::VectorXd& grad,
                      Eigen::MatrixXd* hess) {
    const Eigen::VectorXd z = Eigen::VectorXd::Ones(n) + Ga * lam;
    grad.setZero(pa);
    if (hess) hess->setZero(pa, pa);
    for (Eigen::Index i = 0; i < n; ++i) {
      grad += ls.deriv(z[i]) * Ga.row(i).transpose();
      if (hess) *hess += ls.deriv2(z[i]) * Ga.row(i).transpose() * Ga.row(i);
    }
  };
  auto newton_step = [&](const Eigen::VectorXd& grad,
                         const Eigen::MatrixXd& hess) {
    Eigen::MatrixXd neg_h = -hess;
    neg_h.diagonal().array() += 1e-12 * (1.0 + neg_h.diagonal().maxCoeff());
    return Eigen::VectorXd(neg_h.ldlt().solve(grad));
  };

  // the objective cannot resolve improvements below its own ulp; past that
  // point plain Newton steps still contract the gradient to rounding noise
  const double grad_floor =
      1e-9 * (1.0 + Ga.cwiseAbs().sum() / static_cast<double>(n));

  double grad_norm = 0.0;
  bool converged = pa == 0;
  double f_prev = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd grad(pa);
  Eigen::MatrixXd hess(pa, pa);
  for (int it = 0; it < max_iter && !converged; ++it) {
    gradient(lam_a, grad, &hess);
    grad_norm = grad.lpNorm<Eigen::Infinity>();
    if (grad_norm <= tol) {
      converged = true;
      break;
    }
    const Eigen::VectorXd step = newton_step(grad, hess);
    const double f0 = objective(lam_a);
    const double slope = grad.dot(step);
    double t = 1.0;
    bool moved = false;
    double f_new = f0;
    for (int h = 0; h < 60; ++h) {
      const Eigen::VectorXd cand = lam_a + t * step;
      f_new = objective(cand);
      if (f_new >= f0 + 1e-4 * t * slope) {
        lam_a = cand;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    const bool stalled = !moved || (f_new == f_prev);
    f_prev = f_new;
    if (stalled) {
      for (int k = 0; k < 4 && grad_norm > tol; ++k) {
        lam_a += newton_step(grad, hess);
        gradient(lam_a, grad, &hess);
        grad_norm = grad.lpNorm<Eigen::Infinity>();
      }
      converged = grad_norm <= std::max(tol, grad_floor);
      break;
    }
  }
  if (!converged)
    throw std::runtime_error(
        "el_inner_solve: Newton did not converge; gradient norm " +
        std::to_string(grad_norm));

  for (Eigen::Index k = 0; k < pa; ++k) sol.lambda[active[k]] = lam_a[k];

  const Eigen::VectorXd z = Eigen::VectorXd::Ones(n) + G * sol.lambda;
  if (z.minCoeff() <= eps * (1.0 + 1e-9)) {
    // optimum pinned against the log-star boundary: the hull condition
    // fails in the strict sense
    sol.feasible = false;
    sol.log_el_ratio = kNegInf;
    return sol;
  }
  sol.feasible = true;
  sol.weights.resize(n);
  double log_ratio = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    sol.weights[i] = 1.0 / (static_cast<double>(n) * z[i]);
    log_ratio -= std::log(z[i]);
  }
  sol.log_el_ratio = log_ratio;
  return sol;
}

double profile_log_el(const Eigen::VectorXd& beta, const Dataset& data,
                      double sigma) {
  const Eigen::Index n = data.n();
  Eigen::MatrixXd G(n, data.p());
  for (Eigen::Index i = 0; i < n; ++i)
    G.row(i) =
        moment_g(data.X.row(i).transpose(), data.y[i], beta, sigma).transpose();
  return el_inner_solve(G).log_el_ratio;
}

Chain fit_elbmr(const Dataset& data, const std::vector<BetaPrior>& prior,
                double sigma, const SamplerConfig& config, Rng& rng) {
  if (!(sigma > 0.0)) throw std::domain_error("fit_elbmr: sigma must be > 0");
  const Eigen::Index p = data.p();
  const Eigen::Index n = data.n();
  if (static_cast<Eigen::Index>(prior.size()) != p)
    throw std::invalid_argument("fit_elbmr: one beta prior per design column");

  const std::size_t min_support =
      (static_cast<std::size_t>(n) + 3) / 4;  // ceil(n/4)

  auto target = [&](const Eigen::VectorXd& beta) {
    Eigen::MatrixXd G(n, p);
    std::size_t support = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::VectorXd g =
          moment_g(data.X.row(i).transpose(), data.y[i], beta, sigma);
      if (!g.isZero(0.0)) ++support;
      G.row(i) = g.transpose();
    }
    if (support < min_support) return kNegInf;
    const ELSolution sol = el_inner_solve(G);
    if (!sol.feasible) return kNegInf;
    return sol.log_el_ratio + log_beta_prior_density(beta, prior);
  };

  SamplerConfig cfg = config;
  if (cfg.init.size() == 0) cfg.init = ols_init(data);
  if (cfg.init.size() != p)
    throw std::invalid_argument("fit_elbmr: init length does not match p");
  if (cfg.initial_scales.size() == 0) {
    const Eigen::VectorXd resid = data.y - data.X * cfg.init;
    const double sd_r = std::max(
        1e-3,
        std::sqrt(resid.squaredNorm() /
                  static_cast<double>(std::max<Eigen::Index>(1, n - p))));
    const Eigen::MatrixXd xtx_inv =
        (data.X.transpose() * data.X)
            .ldlt()
            .solve(Eigen::MatrixXd::Identity(p, p));
    cfg.initial_scales.resize(p);
    for (Eigen::Index j = 0; j < p; ++j)
      cfg.initial_scales[j] =
          std::max(1e-4, sd_r * std::sqrt(std::max(0.0, xtx_inv(j, j))));
  }
  if (!std::isfinite(target(cfg.init)))
    throw std::runtime_error(
        "fit_elbmr: empirical likelihood is infeasible at the initial state; "
        "try a larger sigma");

  Chain chain = run_chain(target, cfg, rng);
  chain.param_names.clear();
  for (Eigen::Index j = 0; j < p; ++j)
    chain.param_names.push_back(data.column_names[static_cast<std::size_t>(j)]);
  return chain;
}

Eigen::MatrixXd el_v11(const Eigen::MatrixXd& G, double* min_eigenvalue) {
  if (G.rows() < 1) throw std::invalid_argument("el_v11: needs n >= 1");
  const Eigen::MatrixXd v11 =
      G.transpose() * G / static_cast<double>(G.rows());
  if (min_eigenvalue) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v11);
    *min_eigenvalue = es.eigenvalues().minCoeff();
  }
  return v11;
}

}  // namespace bmr
