#include "rigcov/interior_point.h"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

namespace rigcov {

std::string to_string(NlpStatus status) {
  switch (status) {
    case NlpStatus::kConverged: return "converged";
    case NlpStatus::kMaxIterations: return "max-iter";
    case NlpStatus::kFailed: return "failed";
  }
  return "unknown";
}

namespace {

double inf_norm(const Eigen::VectorXd& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }

struct Residuals {
  double stationarity = 0.0;
  double feasibility = 0.0;
  double complementarity = 0.0;

  double max() const { return std::max({stationarity, feasibility, complementarity}); }
};

// Largest step in (0, 1] keeping v + a dv >= (1 - tau) v.
double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv, double tau) {
  double alpha = 1.0;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (dv(k) < 0.0) alpha = std::min(alpha, -tau * v(k) / dv(k));
  }
  return alpha;
}

}  // namespace

NlpResult solve_interior_point(const NlpFunctions& nlp, const Eigen::VectorXd& z0,
                               const InteriorPointOptions& options) {
  const Eigen::Index n = z0.size();
  Eigen::VectorXd z = z0;
  Eigen::VectorXd cE = nlp.equality(z);
  Eigen::VectorXd cI = nlp.inequality(z);
  const Eigen::Index me = cE.size();
  const Eigen::Index mi = cI.size();

  double mu = options.mu_init;
  Eigen::VectorXd s = (-cI).cwiseMax(1e-3);
  Eigen::VectorXd lambda = mu * s.cwiseInverse();
  Eigen::VectorXd y = Eigen::VectorXd::Zero(me);
  double nu = 1.0;

  NlpResult result;
  auto residuals = [&](const Eigen::VectorXd& grad, const Eigen::MatrixXd& JE,
                       const Eigen::MatrixXd& JI, double barrier) {
    Residuals r;
    Eigen::VectorXd rd = grad;
    if (me) rd += JE.transpose() * y;
    if (mi) rd += JI.transpose() * lambda;
    // Dual residual scaled down when the multipliers are large.
    const double mult_sum = (me ? y.lpNorm<1>() : 0.0) + (mi ? lambda.lpNorm<1>() : 0.0);
    const double scale = std::max(100.0, mult_sum / std::max<double>(1.0, static_cast<double>(me + mi))) / 100.0;
    r.stationarity = inf_norm(rd) / scale;
    r.feasibility = std::max(inf_norm(cE), mi ? inf_norm(cI + s) : 0.0);
    r.complementarity =
        mi ? inf_norm((lambda.cwiseProduct(s).array() - barrier).matrix()) / scale : 0.0;
    return r;
  };

  auto merit = [&](const Eigen::VectorXd& zz, const Eigen::VectorXd& ss, const Eigen::VectorXd& ce,
                   const Eigen::VectorXd& ci) {
    double value = nlp.objective(zz);
    if (mi) value -= mu * ss.array().log().sum();
    value += nu * (ce.lpNorm<1>() + (mi ? (ci + ss).lpNorm<1>() : 0.0));
    return value;
  };

  for (int iter = 0;; ++iter) {
    const Eigen::VectorXd grad = nlp.gradient(z);
    const Eigen::MatrixXd JE = me ? nlp.equality_jacobian(z) : Eigen::MatrixXd(0, n);
    const Eigen::MatrixXd JI = mi ? nlp.inequality_jacobian(z) : Eigen::MatrixXd(0, n);

    const Residuals full = residuals(grad, JE, JI, 0.0);
    result.iterations = iter;
    result.stationarity = full.stationarity;
    result.primal_infeasibility = full.feasibility;
    result.kkt_residual = std::max({full.stationarity, full.feasibility, full.complementarity});
    if (result.kkt_residual <= options.tolerance) {
      result.status = NlpStatus::kConverged;
      break;
    }
    if (iter >= options.max_iterations) {
      result.status = NlpStatus::kMaxIterations;
      break;
    }
    // Monotone barrier update once the barrier subproblem is solved well enough.
    while (mi && residuals(grad, JE, JI, mu).max() <= 10.0 * mu &&
           mu > options.tolerance / 10.0) {
      mu = std::max(options.tolerance / 10.0, std::min(0.2 * mu, std::pow(mu, 1.5)));
    }

    Eigen::MatrixXd W = nlp.hessian(z);
    if (mi && nlp.inequality_hessian) W += nlp.inequality_hessian(z, lambda);
    Eigen::VectorXd rd = grad;
    if (me) rd += JE.transpose() * y;
    if (mi) rd += JI.transpose() * lambda;

    Eigen::VectorXd sigma, rI, rc;
    Eigen::VectorXd rhs_top = -rd;
    if (mi) {
      sigma = lambda.cwiseQuotient(s);
      rI = cI + s;
      rc = (lambda.cwiseProduct(s).array() - mu).matrix();
      W += JI.transpose() * sigma.asDiagonal() * JI;
      rhs_top -= JI.transpose() * (sigma.cwiseProduct(rI) - rc.cwiseQuotient(s));
    }

    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + me, n + me);
    kkt.topLeftCorner(n, n) = W + options.regularization * Eigen::MatrixXd::Identity(n, n);
    if (me) {
      kkt.topRightCorner(n, me) = JE.transpose();
      kkt.bottomLeftCorner(me, n) = JE;
      kkt.bottomRightCorner(me, me) = -options.regularization * Eigen::MatrixXd::Identity(me, me);
    }
    Eigen::VectorXd rhs(n + me);
    rhs.head(n) = rhs_top;
    if (me) rhs.tail(me) = -cE;
    const Eigen::VectorXd sol = kkt.partialPivLu().solve(rhs);
    if (!sol.allFinite()) {
      result.status = NlpStatus::kFailed;
      break;
    }
    const Eigen::VectorXd dz = sol.head(n);
    const Eigen::VectorXd dy = sol.tail(me);
    Eigen::VectorXd dlambda, ds;
    if (mi) {
      dlambda = sigma.cwiseProduct(JI * dz + rI) - rc.cwiseQuotient(s);
      ds = -(rc + s.cwiseProduct(dlambda)).cwiseQuotient(lambda);
    }

    const double tau = std::max(options.fraction_to_boundary, 1.0 - mu);
    double alpha = mi ? max_step(s, ds, tau) : 1.0;
    const double alpha_dual = mi ? max_step(lambda, dlambda, tau) : 1.0;

    // l1 merit with penalty above the multiplier size.
    const double mult = std::max(me ? inf_norm(y + dy) : 0.0, mi ? inf_norm(lambda + dlambda) : 0.0);
    nu = std::max(nu, mult + 1.0);
    const double infeas = cE.lpNorm<1>() + (mi ? (cI + s).lpNorm<1>() : 0.0);
    double slope = grad.dot(dz) - nu * infeas;
    if (mi) slope -= mu * ds.cwiseQuotient(s).sum();
    const double phi0 = merit(z, s, cE, cI);

    Eigen::VectorXd z_new, s_new, cE_new, cI_new;
    for (int ls = 0; ls < 40; ++ls) {
      z_new = z + alpha * dz;
      s_new = mi ? Eigen::VectorXd(s + alpha * ds) : s;
      cE_new = nlp.equality(z_new);
      cI_new = nlp.inequality(z_new);
      const double phi = merit(z_new, s_new, cE_new, cI_new);
      const double roundoff = 1e-14 * std::max(1.0, std::abs(phi0));
      if (std::isfinite(phi) && phi <= phi0 + 1e-4 * alpha * std::min(slope, 0.0) + roundoff) break;
      alpha *= 0.5;
    }
    z = z_new;
    s = s_new;
    cE = cE_new;
    cI = cI_new;
    if (me) y += alpha * dy;
    if (mi) {
      lambda += alpha_dual * dlambda;
      // Keep the multipliers within a factor of the barrier estimate.
      for (Eigen::Index k = 0; k < mi; ++k) {
        const double target = mu / s(k);
        lambda(k) = std::clamp(lambda(k), target / 1e10, target * 1e10);
      }
      // Slacks never lag behind an already satisfied inequality.
      s = s.cwiseMax(-cI);
    }
  }

  result.z = z;
  result.y = y;
  result.lambda = lambda;
  result.objective = nlp.objective(z);
  return result;
}

}  // namespace rigcov
