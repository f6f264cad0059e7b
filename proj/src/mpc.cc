#include "rigcov/mpc.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "rigcov/error.h"

namespace rigcov {

std::string to_string(OcpStatus status) {
  switch (status) {
    case OcpStatus::kSolved: return "solved";
    case OcpStatus::kMaxIterations: return "max-iter";
    case OcpStatus::kInfeasible: return "infeasible";
  }
  return "unknown";
}

namespace {

bool is_psd(const Eigen::MatrixXd& M, double shift) {
  const Eigen::MatrixXd S = 0.5 * (M + M.transpose()) +
                            shift * Eigen::MatrixXd::Identity(M.rows(), M.cols());
  return Eigen::LLT<Eigen::MatrixXd>(S).info() == Eigen::Success;
}

Eigen::Matrix2d projector(const Eigen::Vector2d& g) {
  return Eigen::Matrix2d::Identity() - g * g.transpose();
}

// Positions of the blocks inside z = [u0, x1, u1, x2, ..., u_{N-1}, xN, xbar, ubar].
struct Layout {
  int N, nx, nu;
  int u(int l) const { return l * (nu + nx); }
  int x(int l) const { return (l - 1) * (nu + nx) + nu; }  // l >= 1
  int xbar() const { return N * (nu + nx); }
  int ubar() const { return xbar() + nx; }
  int size() const { return ubar() + nu; }
};

struct QuadraticObjective {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  double constant = 0.0;

  // Adds (M z - b)^T W (M z - b).
  void add(const Eigen::MatrixXd& M, const Eigen::VectorXd& b, const Eigen::MatrixXd& W) {
    const Eigen::MatrixXd MtW = M.transpose() * W;
    H += 2.0 * MtW * M;
    g -= 2.0 * MtW * b;
    constant += b.dot(W * b);
  }
  double value(const Eigen::VectorXd& z) const { return 0.5 * z.dot(H * z) + g.dot(z) + constant; }
};

struct Transcription {
  Layout layout;
  QuadraticObjective objective;
  Eigen::MatrixXd G;  // linear inequalities G z - h <= 0
  Eigen::VectorXd h;
};

void check_problem(const OcpProblem& p) {
  if (!p.model) throw Error(ErrorKind::kInvalidInput, "OCP without a model");
  if (p.model->position_dim() != 2) {
    throw Error(ErrorKind::kUnsupportedDimension, "tracking problem needs planar positions");
  }
  if (p.horizon < 1) throw Error(ErrorKind::kInvalidInput, "horizon must be at least 1");
  const int nx = p.model->state_dim();
  if (p.x0.size() != nx || !p.x0.allFinite()) {
    throw Error(ErrorKind::kInvalidInput, "initial state has wrong size");
  }
  p.weights.validate(nx, p.model->input_dim(), 2);
  if (p.terminal.P.rows() != nx || p.terminal.K.rows() != p.model->input_dim()) {
    throw Error(ErrorKind::kInvalidInput, "terminal ingredients do not match the model");
  }
  for (const auto& b : p.bearings) {
    if (std::abs(b.desired.norm() - 1.0) > 1e-9 || !b.anchor.allFinite()) {
      throw Error(ErrorKind::kInvalidInput, "desired bearings must be unit vectors");
    }
  }
}

Transcription transcribe(const OcpProblem& p) {
  const RobotModel& model = *p.model;
  Transcription t;
  t.layout = Layout{p.horizon, model.state_dim(), model.input_dim()};
  const Layout& L = t.layout;
  const int n = L.size();
  const int nx = L.nx, nu = L.nu;
  const CostWeights& w = p.weights;
  const Eigen::MatrixXd C = model.output_matrix();

  QuadraticObjective& obj = t.objective;
  obj.H = Eigen::MatrixXd::Zero(n, n);
  obj.g = Eigen::VectorXd::Zero(n);

  for (int l = 0; l < L.N; ++l) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nx, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(nx);
    if (l == 0) {
      b = -p.x0;
    } else {
      M.middleCols(L.x(l), nx).setIdentity();
    }
    M.middleCols(L.xbar(), nx) -= Eigen::MatrixXd::Identity(nx, nx);
    obj.add(M, b, w.Q);

    Eigen::MatrixXd Mu = Eigen::MatrixXd::Zero(nu, n);
    Mu.middleCols(L.u(l), nu).setIdentity();
    Mu.middleCols(L.ubar(), nu) -= Eigen::MatrixXd::Identity(nu, nu);
    obj.add(Mu, Eigen::VectorXd::Zero(nu), w.R);
  }
  {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nx, n);
    M.middleCols(L.x(L.N), nx).setIdentity();
    M.middleCols(L.xbar(), nx) -= Eigen::MatrixXd::Identity(nx, nx);
    obj.add(M, Eigen::VectorXd::Zero(nx), p.terminal.P);
  }
  Eigen::MatrixXd Mr = Eigen::MatrixXd::Zero(2, n);
  Mr.middleCols(L.xbar(), nx) = C;
  obj.add(Mr, p.r_ref, w.mu * w.S_r);
  if (w.mu < 1.0 && w.w_b > 0.0) {
    for (const auto& nb : p.bearings) {
      obj.add(Mr, nb.anchor, (1.0 - w.mu) * w.w_b * projector(nb.desired));
    }
  }

  // Linear inequalities: input boxes, interior state boxes, setpoint region.
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  auto add_row = [&](const Eigen::VectorXd& row, double bound) {
    rows.push_back(row);
    rhs.push_back(bound);
  };
  const BoxConstraints& box = model.constraints();
  for (int l = 0; l < L.N; ++l) {
    for (int k = 0; k < nu; ++k) {
      const Eigen::VectorXd e = Eigen::VectorXd::Unit(n, L.u(l) + k);
      if (std::isfinite(box.u_upper(k))) add_row(e, box.u_upper(k));
      if (std::isfinite(box.u_lower(k))) add_row(-e, -box.u_lower(k));
    }
  }
  for (int l = 1; l < L.N; ++l) {
    for (int k = 0; k < nx; ++k) {
      const Eigen::VectorXd e = Eigen::VectorXd::Unit(n, L.x(l) + k);
      if (std::isfinite(box.x_upper(k))) add_row(e, box.x_upper(k));
      if (std::isfinite(box.x_lower(k))) add_row(-e, -box.x_lower(k));
    }
  }
  for (const HalfPlane& hp : p.feasible_setpoints.halfplanes()) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
    row.segment(L.xbar(), nx) = C.transpose() * hp.normal;
    add_row(row, hp.offset);
  }
  t.G.resize(static_cast<Eigen::Index>(rows.size()), n);
  t.h.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    t.G.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
    t.h(static_cast<Eigen::Index>(r)) = rhs[r];
  }
  return t;
}

Eigen::VectorXd pack(const Layout& L, const OcpSolution& s) {
  Eigen::VectorXd z(L.size());
  for (int l = 0; l < L.N; ++l) {
    z.segment(L.u(l), L.nu) = s.u_seq[l];
    z.segment(L.x(l + 1), L.nx) = s.x_seq[l + 1];
  }
  z.segment(L.xbar(), L.nx) = s.xbar;
  z.segment(L.ubar(), L.nu) = s.ubar;
  return z;
}

OcpSolution unpack(const Layout& L, const Eigen::VectorXd& z, const Eigen::VectorXd& x0,
                   const Eigen::MatrixXd& C) {
  OcpSolution s;
  s.x_seq.push_back(x0);
  for (int l = 0; l < L.N; ++l) {
    s.u_seq.push_back(z.segment(L.u(l), L.nu));
    s.x_seq.push_back(z.segment(L.x(l + 1), L.nx));
  }
  s.xbar = z.segment(L.xbar(), L.nx);
  s.ubar = z.segment(L.ubar(), L.nu);
  s.rbar = C * s.xbar;
  return s;
}

}  // namespace

void CostWeights::validate(int nx, int nu, int d) const {
  if (Q.rows() != nx || Q.cols() != nx || R.rows() != nu || R.cols() != nu || S_r.rows() != d ||
      S_r.cols() != d) {
    throw Error(ErrorKind::kInvalidInput, "cost weight dimensions do not match the model");
  }
  if (!is_psd(Q, 1e-12)) throw Error(ErrorKind::kInvalidInput, "Q must be positive semidefinite");
  if (!is_psd(R, 0.0)) throw Error(ErrorKind::kInvalidInput, "R must be positive definite");
  if (!is_psd(S_r, 0.0)) throw Error(ErrorKind::kInvalidInput, "S_r must be positive definite");
  if (!(w_b >= 0.0)) throw Error(ErrorKind::kInvalidInput, "w_b must be non-negative");
  if (!(mu > 0.0 && mu <= 1.0)) throw Error(ErrorKind::kInvalidInput, "mu must lie in (0, 1]");
}

double bearing_cost(const Eigen::Vector2d& rbar, const std::vector<NeighborBearing>& bearings,
                    double w_b) {
  double total = 0.0;
  for (const auto& nb : bearings) {
    total += (projector(nb.desired) * (rbar - nb.anchor)).squaredNorm();
  }
  return w_b * total;
}

double offset_cost(const Eigen::Vector2d& r, const Eigen::Vector2d& r_ref,
                   const std::vector<NeighborBearing>& bearings, const CostWeights& weights) {
  const Eigen::Vector2d e = r_ref - r;
  return weights.mu * e.dot(weights.S_r * e) +
         (1.0 - weights.mu) * bearing_cost(r, bearings, weights.w_b);
}

Eigen::Vector2d offset_optimum(const Eigen::Vector2d& r_ref,
                               const std::vector<NeighborBearing>& bearings,
                               const CostWeights& weights, const ConvexRegion& region) {
  // Cost = r^T H r - 2 b^T r + const.
  Eigen::Matrix2d H = weights.mu * 0.5 * (weights.S_r + weights.S_r.transpose());
  Eigen::Vector2d b = H * r_ref;
  for (const auto& nb : bearings) {
    const Eigen::Matrix2d Pg = projector(nb.desired);
    H += (1.0 - weights.mu) * weights.w_b * Pg;
    b += (1.0 - weights.mu) * weights.w_b * Pg * nb.anchor;
  }
  const Eigen::Vector2d free = H.ldlt().solve(b);
  if (region.contains(free, 0.0)) return free;

  const Polygon& v = region.vertices();
  Eigen::Vector2d best = v.front();
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < v.size(); ++k) {
    const Eigen::Vector2d a = v[k];
    const Eigen::Vector2d d = v[(k + 1) % v.size()] - a;
    const double t = std::clamp((b.dot(d) - d.dot(H * a)) / d.dot(H * d), 0.0, 1.0);
    const Eigen::Vector2d r = a + t * d;
    const double c = offset_cost(r, r_ref, bearings, weights);
    if (c < best_cost) {
      best_cost = c;
      best = r;
    }
  }
  return best;
}

double ocp_cost(const OcpProblem& problem, const std::vector<Eigen::VectorXd>& x_seq,
                const std::vector<Eigen::VectorXd>& u_seq, const Eigen::VectorXd& xbar,
                const Eigen::VectorXd& ubar) {
  const CostWeights& w = problem.weights;
  double total = 0.0;
  for (std::size_t l = 0; l < u_seq.size(); ++l) {
    const Eigen::VectorXd e = x_seq[l] - xbar;
    const Eigen::VectorXd v = u_seq[l] - ubar;
    total += e.dot(w.Q * e) + v.dot(w.R * v);
  }
  const Eigen::VectorXd eN = x_seq.back() - xbar;
  total += eN.dot(problem.terminal.P * eN);
  const Eigen::Vector2d rbar = problem.model->output_matrix() * xbar;
  return total + offset_cost(rbar, problem.r_ref, problem.bearings, w);
}

FeasibilityReport check_feasibility(const OcpProblem& problem, const OcpSolution& s) {
  const RobotModel& model = *problem.model;
  const int N = problem.horizon;
  FeasibilityReport r;
  if (static_cast<int>(s.u_seq.size()) != N || static_cast<int>(s.x_seq.size()) != N + 1) {
    r.dynamics = r.constraints = std::numeric_limits<double>::infinity();
    return r;
  }
  auto dyn = [&r](double v) { r.dynamics = std::max(r.dynamics, v); };
  auto con = [&r](double v) { r.constraints = std::max(r.constraints, v); };
  dyn((s.x_seq[0] - problem.x0).lpNorm<Eigen::Infinity>());
  for (int l = 0; l < N; ++l) {
    dyn((s.x_seq[l + 1] - model.step(s.x_seq[l], s.u_seq[l])).lpNorm<Eigen::Infinity>());
  }
  dyn((s.xbar - model.step(s.xbar, s.ubar)).lpNorm<Eigen::Infinity>());
  const Eigen::Vector2d rbar = model.output_matrix() * s.xbar;
  dyn((rbar - s.rbar).norm());

  const BoxConstraints& box = model.constraints();
  for (int l = 0; l < N; ++l) {
    con((s.u_seq[l] - box.u_upper).maxCoeff());
    con((box.u_lower - s.u_seq[l]).maxCoeff());
  }
  for (int l = 1; l < N; ++l) {
    con((s.x_seq[l] - box.x_upper).maxCoeff());
    con((box.x_lower - s.x_seq[l]).maxCoeff());
  }
  const Eigen::VectorXd eN = s.x_seq[N] - s.xbar;
  con(eN.dot(problem.terminal.P * eN) - problem.terminal.zeta);
  for (const HalfPlane& hp : problem.feasible_setpoints.halfplanes()) {
    con(hp.normal.dot(rbar) - hp.offset);
  }
  return r;
}

OcpSolution cold_start(const OcpProblem& problem) {
  check_problem(problem);
  const RobotModel& model = *problem.model;
  const Eigen::Vector2d p = problem.feasible_setpoints.project(model.position(problem.x0));
  const TerminalSet ts = problem.terminal.recentred(model, p);
  const BoxConstraints& box = model.constraints();
  OcpSolution s;
  s.x_seq.push_back(problem.x0);
  for (int l = 0; l < problem.horizon; ++l) {
    const Eigen::VectorXd u = ts.control(s.x_seq.back()).cwiseMax(box.u_lower).cwiseMin(box.u_upper);
    s.u_seq.push_back(u);
    s.x_seq.push_back(model.step(s.x_seq.back(), u));
  }
  s.xbar = ts.steady.x;
  s.ubar = ts.steady.u;
  s.rbar = model.output_matrix() * s.xbar;
  s.cost = ocp_cost(problem, s.x_seq, s.u_seq, s.xbar, s.ubar);
  s.status = check_feasibility(problem, s).ok() ? OcpStatus::kSolved : OcpStatus::kInfeasible;
  return s;
}

OcpSolution solve_ocp(const OcpProblem& problem, const std::optional<OcpSolution>& warm) {
  check_problem(problem);
  const RobotModel& model = *problem.model;
  const Transcription t = transcribe(problem);
  const Layout L = t.layout;
  const int n = L.size();
  const int nx = L.nx, nu = L.nu;
  const Eigen::MatrixXd C = model.output_matrix();
  const Eigen::MatrixXd& P = problem.terminal.P;
  const double zeta = problem.terminal.zeta;
  const Eigen::Index m_lin = t.G.rows();

  NlpFunctions nlp;
  nlp.objective = [&t](const Eigen::VectorXd& z) { return t.objective.value(z); };
  nlp.gradient = [&t](const Eigen::VectorXd& z) -> Eigen::VectorXd {
    return t.objective.H * z + t.objective.g;
  };
  nlp.hessian = [&t](const Eigen::VectorXd&) -> Eigen::MatrixXd { return t.objective.H; };

  nlp.equality = [&](const Eigen::VectorXd& z) -> Eigen::VectorXd {
    Eigen::VectorXd c((L.N + 1) * nx);
    for (int l = 0; l < L.N; ++l) {
      const Eigen::VectorXd xl = l == 0 ? problem.x0 : Eigen::VectorXd(z.segment(L.x(l), nx));
      c.segment(l * nx, nx) = z.segment(L.x(l + 1), nx) - model.step(xl, z.segment(L.u(l), nu));
    }
    const Eigen::VectorXd xbar = z.segment(L.xbar(), nx);
    c.tail(nx) = xbar - model.step(xbar, z.segment(L.ubar(), nu));
    return c;
  };
  nlp.equality_jacobian = [&](const Eigen::VectorXd& z) -> Eigen::MatrixXd {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero((L.N + 1) * nx, n);
    for (int l = 0; l < L.N; ++l) {
      const Eigen::VectorXd xl = l == 0 ? problem.x0 : Eigen::VectorXd(z.segment(L.x(l), nx));
      const Linearization lin = linearize(model, xl, z.segment(L.u(l), nu));
      J.block(l * nx, L.x(l + 1), nx, nx).setIdentity();
      if (l > 0) J.block(l * nx, L.x(l), nx, nx) = -lin.A;
      J.block(l * nx, L.u(l), nx, nu) = -lin.B;
    }
    const Linearization lin =
        linearize(model, z.segment(L.xbar(), nx), z.segment(L.ubar(), nu));
    J.block(L.N * nx, L.xbar(), nx, nx) = Eigen::MatrixXd::Identity(nx, nx) - lin.A;
    J.block(L.N * nx, L.ubar(), nx, nu) = -lin.B;
    return J;
  };

  nlp.inequality = [&](const Eigen::VectorXd& z) -> Eigen::VectorXd {
    Eigen::VectorXd c(m_lin + 1);
    c.head(m_lin) = t.G * z - t.h;
    const Eigen::VectorXd e = z.segment(L.x(L.N), nx) - z.segment(L.xbar(), nx);
    c(m_lin) = e.dot(P * e) - zeta;
    return c;
  };
  nlp.inequality_jacobian = [&](const Eigen::VectorXd& z) -> Eigen::MatrixXd {
    Eigen::MatrixXd J(m_lin + 1, n);
    J.topRows(m_lin) = t.G;
    J.row(m_lin).setZero();
    const Eigen::VectorXd grad = 2.0 * P * (z.segment(L.x(L.N), nx) - z.segment(L.xbar(), nx));
    J.block(m_lin, L.x(L.N), 1, nx) = grad.transpose();
    J.block(m_lin, L.xbar(), 1, nx) = -grad.transpose();
    return J;
  };
  nlp.inequality_hessian = [&](const Eigen::VectorXd&, const Eigen::VectorXd& lambda) {
    Eigen::MatrixXd Hc = Eigen::MatrixXd::Zero(n, n);
    const Eigen::MatrixXd blk = 2.0 * lambda(m_lin) * P;
    Hc.block(L.x(L.N), L.x(L.N), nx, nx) = blk;
    Hc.block(L.xbar(), L.xbar(), nx, nx) = blk;
    Hc.block(L.x(L.N), L.xbar(), nx, nx) = -blk;
    Hc.block(L.xbar(), L.x(L.N), nx, nx) = -blk;
    return Hc;
  };

  const OcpSolution start = warm ? *warm : cold_start(problem);
  const NlpResult res = solve_interior_point(nlp, pack(L, start), problem.solver);

  OcpSolution s = unpack(L, res.z, problem.x0, C);
  s.cost = ocp_cost(problem, s.x_seq, s.u_seq, s.xbar, s.ubar);
  s.iterations = res.iterations;
  s.kkt_residual = res.kkt_residual;
  if (!check_feasibility(problem, s).ok()) {
    s.status = OcpStatus::kInfeasible;
  } else if (res.status == NlpStatus::kConverged || res.kkt_residual < 1e-6) {
    s.status = OcpStatus::kSolved;
  } else {
    s.status = OcpStatus::kMaxIterations;
  }
  return s;
}

OcpSolution shift_warm_start(const OcpProblem& problem, const OcpSolution& prev,
                             const Eigen::VectorXd& x_next) {
  const RobotModel& model = *problem.model;
  OcpSolution cand;
  cand.u_seq.assign(prev.u_seq.begin() + 1, prev.u_seq.end());
  TerminalSet ts = problem.terminal;
  ts.steady = SteadyState{prev.xbar, prev.ubar, prev.rbar};
  cand.u_seq.push_back(ts.control(prev.x_seq.back()));
  cand.x_seq.push_back(x_next);
  for (const Eigen::VectorXd& u : cand.u_seq) cand.x_seq.push_back(model.step(cand.x_seq.back(), u));
  cand.xbar = prev.xbar;
  cand.ubar = prev.ubar;
  cand.rbar = prev.rbar;

  OcpProblem shifted = problem;
  shifted.x0 = x_next;
  const FeasibilityReport rep = check_feasibility(shifted, cand);
  if (!rep.ok()) {
    throw Error(ErrorKind::kRecursiveFeasibilityViolation,
                "shifted candidate violates constraints by " + std::to_string(rep.constraints) +
                    " (dynamics " + std::to_string(rep.dynamics) + ")");
  }
  cand.cost = ocp_cost(shifted, cand.x_seq, cand.u_seq, cand.xbar, cand.ubar);
  cand.status = OcpStatus::kSolved;
  return cand;
}

std::pair<Eigen::VectorXd, OcpSolution> mpc_step(const OcpProblem& problem,
                                                 const std::optional<OcpSolution>& warm) {
  OcpSolution sol = solve_ocp(problem, warm);
  if (sol.status == OcpStatus::kInfeasible) {
    throw Error(ErrorKind::kInfeasible, "tracking problem failed verification after " +
                                            std::to_string(sol.iterations) + " iterations");
  }
  Eigen::VectorXd u = sol.u_seq.front();
  return {u, std::move(sol)};
}

}  // namespace rigcov
