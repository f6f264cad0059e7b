#include "rigcov/terminal.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "rigcov/error.h"
#include "rigcov/rng.h"

namespace rigcov {

namespace {

constexpr int kRiccatiMaxIterations = 10000;
constexpr double kDecreaseTolerance = 1e-9;

Eigen::MatrixXd symmetrised(const Eigen::MatrixXd& M) { return 0.5 * (M + M.transpose()); }

Eigen::MatrixXd gain_from(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                          const Eigen::MatrixXd& R, const Eigen::MatrixXd& P) {
  const Eigen::MatrixXd S = R + B.transpose() * P * B;
  return -S.partialPivLu().solve(B.transpose() * P * A);
}

}  // namespace

double spectral_radius(const Eigen::MatrixXd& M) {
  if (M.size() == 0) return 0.0;
  return Eigen::EigenSolver<Eigen::MatrixXd>(M, false).eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::MatrixXd lqr_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                         const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R) {
  const Eigen::Index nx = A.rows();
  if (A.cols() != nx || B.rows() != nx || Q.rows() != nx || Q.cols() != nx ||
      R.rows() != B.cols() || R.cols() != B.cols()) {
    throw Error(ErrorKind::kInvalidInput, "lqr_gain: dimension mismatch");
  }
  if (Eigen::LLT<Eigen::MatrixXd>(symmetrised(R)).info() != Eigen::Success) {
    throw Error(ErrorKind::kInvalidInput, "lqr_gain: R must be positive definite");
  }
  Eigen::MatrixXd P = symmetrised(Q);
  for (int iter = 0; iter < kRiccatiMaxIterations; ++iter) {
    const Eigen::MatrixXd K = gain_from(A, B, R, P);
    const Eigen::MatrixXd next =
        symmetrised(Q + A.transpose() * P * A + A.transpose() * P * B * K);
    const double change = (next - P).lpNorm<Eigen::Infinity>();
    P = next;
    if (!P.allFinite()) break;
    if (change <= 1e-13 * std::max(1.0, P.lpNorm<Eigen::Infinity>())) {
      const Eigen::MatrixXd gain = gain_from(A, B, R, P);
      if (spectral_radius(A + B * gain) >= 1.0) break;
      return gain;
    }
  }
  throw Error(ErrorKind::kNotStabilizable, "Riccati recursion did not converge");
}

Eigen::MatrixXd lyapunov_P(const Eigen::MatrixXd& A_K, const Eigen::MatrixXd& Q_star, double c) {
  const Eigen::Index n = A_K.rows();
  if (A_K.cols() != n || Q_star.rows() != n || Q_star.cols() != n) {
    throw Error(ErrorKind::kInvalidInput, "lyapunov_P: dimension mismatch");
  }
  const double rho = spectral_radius(A_K);
  if (!(c >= 0.0) || !(c < 1.0 - rho * rho)) {
    throw Error(ErrorKind::kInvalidScaling,
                "c = " + std::to_string(c) + " must lie in [0, " +
                    std::to_string(1.0 - rho * rho) + ")");
  }
  const Eigen::MatrixXd At = A_K.transpose();
  // vec(A~^T P A~) = (A~^T kron A~^T) vec(P), with A~ = A_K / sqrt(1 - c).
  Eigen::MatrixXd lhs(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      lhs.block(i * n, j * n, n, n) = At(i, j) * At;
    }
  }
  lhs /= (1.0 - c);
  lhs -= Eigen::MatrixXd::Identity(n * n, n * n);
  const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(Q_star.data(), n * n);
  const Eigen::VectorXd vec = lhs.partialPivLu().solve(rhs);
  return symmetrised(Eigen::Map<const Eigen::MatrixXd>(vec.data(), n, n));
}

double lyapunov_residual(const Eigen::MatrixXd& A_K, const Eigen::MatrixXd& P,
                         const Eigen::MatrixXd& Q_star, double c) {
  const Eigen::MatrixXd At = A_K / std::sqrt(1.0 - c);
  return (At.transpose() * P * At - P + Q_star).lpNorm<Eigen::Infinity>();
}

TerminalSet TerminalSet::recentred(const RobotModel& model, const Eigen::VectorXd& r) const {
  TerminalSet out = *this;
  out.steady = steady_state_from_position(model, r);
  return out;
}

double terminal_decrease_gap(const RobotModel& model, const TerminalSet& ts,
                             const Eigen::VectorXd& x) {
  const Eigen::VectorXd u = ts.control(x);
  const Eigen::VectorXd e = x - ts.steady.x;
  const Eigen::VectorXd v = u - ts.steady.u;
  const double stage = e.dot(ts.Q * e) + v.dot(ts.R * v);
  return ts.level(model.step(x, u)) - ts.level(x) + stage;
}

bool terminal_conditions_hold(const RobotModel& model, const TerminalSet& ts,
                              const Eigen::VectorXd& x) {
  const BoxConstraints& box = model.constraints();
  if (!box.contains_state(x) || !box.contains_input(ts.control(x))) return false;
  return terminal_decrease_gap(model, ts, x) <= kDecreaseTolerance;
}

namespace {

// margin^2 / (a^T P^-1 a) for one row a^T (x - xbar) <= margin.
void tighten(double& bound, const Eigen::VectorXd& a, double margin,
             const Eigen::LLT<Eigen::MatrixXd>& llt) {
  const double spread = a.dot(llt.solve(a));
  if (spread <= 0.0) return;
  if (margin <= 0.0) {
    bound = 0.0;
    return;
  }
  bound = std::min(bound, margin * margin / spread);
}

double box_bound(const RobotModel& model, const TerminalSet& ts,
                 const Eigen::LLT<Eigen::MatrixXd>& llt) {
  const BoxConstraints& box = model.constraints();
  double bound = std::numeric_limits<double>::infinity();
  const Eigen::Index nx = ts.P.rows();
  for (Eigen::Index k = 0; k < nx; ++k) {
    const Eigen::VectorXd a = Eigen::VectorXd::Unit(nx, k);
    if (std::isfinite(box.x_upper(k))) tighten(bound, a, box.x_upper(k) - ts.steady.x(k), llt);
    if (std::isfinite(box.x_lower(k))) tighten(bound, a, ts.steady.x(k) - box.x_lower(k), llt);
  }
  for (Eigen::Index k = 0; k < ts.K.rows(); ++k) {
    const Eigen::VectorXd a = ts.K.row(k).transpose();
    if (std::isfinite(box.u_upper(k))) tighten(bound, a, box.u_upper(k) - ts.steady.u(k), llt);
    if (std::isfinite(box.u_lower(k))) tighten(bound, -a, ts.steady.u(k) - box.u_lower(k), llt);
  }
  return bound;
}

}  // namespace

double size_terminal_set(const RobotModel& model, const TerminalSet& ts,
                         const TerminalOptions& options) {
  const Eigen::Index nx = ts.P.rows();
  Eigen::LLT<Eigen::MatrixXd> llt(ts.P);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::kInvalidInput, "terminal P is not positive definite");
  }
  // Whitened unit directions w map to e = L^-T w with e^T P e = |w|^2.
  std::vector<Eigen::VectorXd> directions;
  Rng rng(options.seed);
  for (Eigen::Index k = 0; k < nx; ++k) {
    directions.push_back(Eigen::VectorXd::Unit(nx, k));
    directions.push_back(-Eigen::VectorXd::Unit(nx, k));
  }
  for (int s = 0; s < options.directions; ++s) {
    Eigen::VectorXd w(nx);
    for (Eigen::Index k = 0; k < nx; ++k) w(k) = rng.normal();
    if (w.norm() > 0.0) directions.push_back(w.normalized());
  }
  const Eigen::MatrixXd Lt = llt.matrixU();
  for (Eigen::VectorXd& w : directions) {
    w = Lt.triangularView<Eigen::Upper>().solve(w);
  }

  auto passes = [&](double zeta) {
    const double radius = std::sqrt(zeta);
    for (const Eigen::VectorXd& e : directions) {
      for (double scale : {1.0, 0.5, 0.25}) {
        if (!terminal_conditions_hold(model, ts, ts.steady.x + scale * radius * e)) return false;
      }
    }
    return true;
  };

  double hi = box_bound(model, ts, llt);
  if (!std::isfinite(hi)) hi = 1e6;
  if (!(hi > 0.0)) throw Error(ErrorKind::kTerminalSetEmpty, "steady state touches a constraint");
  if (passes(hi)) return hi;
  double lo = 0.0;
  for (int iter = 0; iter < options.bisection_iterations; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (passes(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (!(lo > 0.0)) throw Error(ErrorKind::kTerminalSetEmpty, "no positive level passes");
  return lo;
}

bool in_terminal_set(const Eigen::VectorXd& x, const Eigen::VectorXd& rbar,
                     const TerminalSet& ts, const Eigen::MatrixXd& C) {
  if ((rbar - C * ts.steady.x).norm() >= 1e-9) return false;
  return ts.level(x) <= ts.zeta;
}

TerminalSet design_terminal_set(const RobotModel& model, const Eigen::MatrixXd& Q,
                                const Eigen::MatrixXd& R, const Eigen::VectorXd& r,
                                const TerminalOptions& options) {
  if (!(options.c_fraction > 0.0 && options.c_fraction < 1.0)) {
    throw Error(ErrorKind::kInvalidScaling, "c_fraction must lie in (0, 1)");
  }
  TerminalSet ts;
  ts.steady = steady_state_from_position(model, r);
  const Linearization lin = linearize(model, ts.steady.x, ts.steady.u);
  ts.A = lin.A;
  ts.B = lin.B;
  ts.Q = Q;
  ts.R = R;
  ts.K = lqr_gain(lin.A, lin.B, Q, R);
  const Eigen::MatrixXd A_K = lin.A + lin.B * ts.K;
  ts.Q_star = Q + ts.K.transpose() * R * ts.K;
  const double rho = spectral_radius(A_K);
  ts.c = options.c_fraction * (1.0 - rho * rho);
  ts.P = lyapunov_P(A_K, ts.Q_star, ts.c);
  ts.zeta = size_terminal_set(model, ts, options);
  return ts;
}

}  // namespace rigcov
