#include "wavestab/stepping.hpp"

#include <cmath>
#include <cstdlib>

namespace ws {

double select_dt(const OversetGrid1D& grid, const SchemeConfig& cfg) {
  double h_ref = std::numeric_limits<double>::max();
  for (Side s : {Side::Left, Side::Right})
    if (cfg.mode(s) == TimeMode::Explicit) h_ref = std::min(h_ref, grid.grid(s).h);
  if (!(h_ref < std::numeric_limits<double>::max()))
    h_ref = std::getenv("WS_DT_BASE") ? grid.right.h
                                      : std::min(grid.left.h, grid.right.h);
  return cfg.cfl * h_ref / cfg.c;
}

double nu_full(double h, double dt, const SchemeConfig& cfg) {
  if (cfg.dissipation == DissipationMode::None) return 0.0;
  const double lambda = cfg.c * dt / h;
  const DissipationParams d =
      dissipation_coefficient(cfg.p, cfg.n_u, cfg.s_f, {lambda}, cfg.gamma);
  return d.nu_gamma;
}

Eigen::VectorXd solve_implicit(const Eigen::MatrixXd& a, const Eigen::VectorXd& rhs) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  Eigen::VectorXd x = lu.solve(rhs);
  const double rhs_norm = rhs.lpNorm<Eigen::Infinity>();
  const double res = (a * x - rhs).lpNorm<Eigen::Infinity>();
  if (res > 1e-11 * std::max(rhs_norm, 1.0)) {
    const double rcond = lu.rcond();
    throw SteppingError("solve_implicit: residual " + std::to_string(res) +
                        " too large (rcond ~ " + std::to_string(rcond) + ")");
  }
  return x;
}

int OversetStepper::index(Side s, int j) const {
  const ComponentGrid1D& g = grid_.grid(s);
  return (s == Side::Left ? left_offset_ : right_offset_) + (j - g.jmin());
}

OversetStepper::OversetStepper(OversetGrid1D grid, SchemeConfig cfg)
    : grid_(std::move(grid)), cfg_(cfg) {
  if (cfg_.dissipation == DissipationMode::Monolithic)
    throw SteppingError("OversetStepper: monolithic dissipation is a single-grid variant");
  if (cfg_.p != grid_.order)
    throw SteppingError("OversetStepper: scheme order does not match the grid");

  dt_ = select_dt(grid_, cfg_);
  if (std::getenv("WS_NU_BASE")) {
    nu_left_ = nu_right_ = nu_full(grid_.right.h, dt_, cfg_);
  } else if (std::getenv("WS_NU_GLOBAL")) {
    const double h_min = std::min(grid_.left.h, grid_.right.h);
    nu_left_ = nu_right_ = nu_full(h_min, dt_, cfg_);
  } else {
    nu_left_ = nu_full(grid_.left.h, dt_, cfg_);
    nu_right_ = nu_full(grid_.right.h, dt_, cfg_);
  }

  left_offset_ = 0;
  right_offset_ = grid_.left.npts();
  n_total_ = grid_.left.npts() + grid_.right.npts();
  coords_.resize(n_total_);
  active_mask_.assign(n_total_, false);
  for (Side s : {Side::Left, Side::Right}) {
    const ComponentGrid1D& g = grid_.grid(s);
    for (int j = g.jmin(); j <= g.jmax(); ++j) {
      coords_[index(s, j)] = g.x(j);
      active_mask_[index(s, j)] = g.is_active(j);
    }
  }

  // Stage-1/2 system: A_p rows at active points (identity when explicit),
  // Dirichlet, ghost odd symmetry and interpolation rows elsewhere.
  stage_matrix_ = Eigen::MatrixXd::Zero(n_total_, n_total_);
  for (Side s : {Side::Left, Side::Right}) {
    const ComponentGrid1D& g = grid_.grid(s);
    const double a2 = cfg_.alpha2_of(s), a4 = cfg_.alpha4_of(s);
    const Eigen::VectorXd lp = laplacian_stencil(cfg_.p, g.h, cfg_.c);
    const Eigen::VectorXd l2sq = laplacian2_squared_stencil(g.h, cfg_.c);
    const int rl = static_cast<int>(lp.size()) / 2;
    const int rq = static_cast<int>(l2sq.size()) / 2;
    for (int j = g.active_begin(); j < g.active_end(); ++j) {
      const int row = index(s, j);
      stage_matrix_(row, row) += 1.0;
      for (int t = -rl; t <= rl; ++t)
        stage_matrix_(row, index(s, j + t)) -= a2 * dt_ * dt_ * lp[t + rl];
      if (cfg_.p == 4)
        for (int t = -rq; t <= rq; ++t)
          stage_matrix_(row, index(s, j + t)) += a4 * std::pow(dt_, 4) * l2sq[t + rq];
    }
    stage_matrix_(index(s, g.dirichlet_index()), index(s, g.dirichlet_index())) = 1.0;
    for (int j = g.jmin(); j <= g.jmax(); ++j) {
      if (!g.is_ghost(j)) continue;
      const int row = index(s, j);
      stage_matrix_(row, row) = 1.0;
      stage_matrix_(row, index(s, g.ghost_mirror(j))) = 1.0;
    }
  }
  for (const InterpStencil& st : grid_.stencils) {
    const Side donor_side = st.target_side == Side::Left ? Side::Right : Side::Left;
    const int row = index(st.target_side, st.target_index);
    stage_matrix_(row, row) = 1.0;
    for (int j = 0; j < st.weights.size(); ++j)
      stage_matrix_(row, index(donor_side, st.donor_left + j)) = -st.weights[j];
  }
  stage_lu_.compute(stage_matrix_);
}

Eigen::VectorXd OversetStepper::sample(const std::function<double(double)>& f) const {
  Eigen::VectorXd u(n_total_);
  for (int i = 0; i < n_total_; ++i) u[i] = f(coords_[i]);
  return u;
}

void OversetStepper::apply_constraints(Eigen::VectorXd& u) const {
  for (Side s : {Side::Left, Side::Right}) {
    const ComponentGrid1D& g = grid_.grid(s);
    u[index(s, g.dirichlet_index())] = 0.0;
    for (int j = g.jmin(); j <= g.jmax(); ++j)
      if (g.is_ghost(j)) u[index(s, j)] = -u[index(s, g.ghost_mirror(j))];
  }
  for (const InterpStencil& st : grid_.stencils) {
    const Side donor_side = st.target_side == Side::Left ? Side::Right : Side::Left;
    double v = 0.0;
    for (int j = 0; j < st.weights.size(); ++j)
      v += st.weights[j] * u[index(donor_side, st.donor_left + j)];
    u[index(st.target_side, st.target_index)] = v;
  }
}

Eigen::VectorXd OversetStepper::explicit_rhs(const Eigen::VectorXd& u_now,
                                             const Eigen::VectorXd& u_prev) const {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_total_);
  for (Side s : {Side::Left, Side::Right}) {
    const ComponentGrid1D& g = grid_.grid(s);
    const double a2 = cfg_.alpha2_of(s), a4 = cfg_.alpha4_of(s);
    const double b2 = 1.0 - 2.0 * a2;
    const double b4 = a2 - 2.0 * a4 - 1.0 / 12.0;
    const Eigen::VectorXd lp = laplacian_stencil(cfg_.p, g.h, cfg_.c);
    const Eigen::VectorXd l2sq = laplacian2_squared_stencil(g.h, cfg_.c);
    const int rl = static_cast<int>(lp.size()) / 2;
    const int rq = static_cast<int>(l2sq.size()) / 2;
    for (int j = g.active_begin(); j < g.active_end(); ++j) {
      const int row = index(s, j);
      double acc = 2.0 * u_now[row] - u_prev[row];
      for (int t = -rl; t <= rl; ++t) {
        const int col = index(s, j + t);
        acc += dt_ * dt_ * lp[t + rl] * (b2 * u_now[col] + a2 * u_prev[col]);
      }
      if (cfg_.p == 4)
        for (int t = -rq; t <= rq; ++t) {
          const int col = index(s, j + t);
          acc -= std::pow(dt_, 4) * l2sq[t + rq] * (b4 * u_now[col] + a4 * u_prev[col]);
        }
      rhs[row] = acc;
    }
  }
  return rhs;
}

FieldState OversetStepper::first_step(const std::function<double(double)>& u0,
                                      const std::function<double(double)>& u1) const {
  Eigen::VectorXd v0 = sample(u0);
  const Eigen::VectorXd v1 = sample(u1);
  apply_constraints(v0);

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_total_);
  for (Side s : {Side::Left, Side::Right}) {
    const ComponentGrid1D& g = grid_.grid(s);
    const double a2 = cfg_.alpha2_of(s), a4 = cfg_.alpha4_of(s);
    const double b2 = 1.0 - 2.0 * a2;
    const double b4 = a2 - 2.0 * a4 - 1.0 / 12.0;
    const Eigen::VectorXd l2 = laplacian_stencil(2, g.h, cfg_.c);
    const Eigen::VectorXd lp = laplacian_stencil(cfg_.p, g.h, cfg_.c);
    const Eigen::VectorXd l2sq = laplacian2_squared_stencil(g.h, cfg_.c);
    const int r2 = static_cast<int>(l2.size()) / 2;
    const int rl = static_cast<int>(lp.size()) / 2;
    const int rq = static_cast<int>(l2sq.size()) / 2;
    for (int j = g.active_begin(); j < g.active_end(); ++j) {
      const int row = index(s, j);
      double acc = v0[row] + dt_ * v1[row];
      if (cfg_.p == 4) {
        double l2u1 = 0.0;
        for (int t = -r2; t <= r2; ++t) l2u1 += l2[t + r2] * v1[index(s, j + t)];
        acc += std::pow(dt_, 3) / 6.0 * l2u1;
      }
      for (int t = -rl; t <= rl; ++t) {
        const int col = index(s, j + t);
        acc += dt_ * dt_ * lp[t + rl] * (0.5 * b2 * v0[col] - a2 * dt_ * v1[col]);
      }
      if (cfg_.p == 4)
        for (int t = -rq; t <= rq; ++t) {
          const int col = index(s, j + t);
          acc -= std::pow(dt_, 4) * l2sq[t + rq] * (0.5 * b4 * v0[col] - a4 * dt_ * v1[col]);
        }
      rhs[row] = acc;
    }
  }

  FieldState state;
  state.u_now = stage_lu_.solve(rhs);
  apply_constraints(state.u_now);
  state.u_prev = v0;
  state.step = 1;
  state.dt = dt_;
  return state;
}

FieldState OversetStepper::advance(const FieldState& state) const {
  Eigen::VectorXd u = stage_lu_.solve(explicit_rhs(state.u_now, state.u_prev));
  apply_constraints(u);  // solve already satisfies the constraints; tighten roundoff

  if (cfg_.dissipation == DissipationMode::PredictorCorrector &&
      (nu_left_ != 0.0 || nu_right_ != 0.0)) {
    for (int k = 0; k < cfg_.n_u; ++k) {
      const Eigen::VectorXd v = (u - state.u_prev) / (2.0 * dt_);
      Eigen::VectorXd next = u;
      for (Side s : {Side::Left, Side::Right}) {
        const ComponentGrid1D& g = grid_.grid(s);
        const double nu = nu_of(s);
        const Eigen::VectorXd q = dissipation_stencil(cfg_.p, g.h, cfg_.c);
        const int rq = static_cast<int>(q.size()) / 2;
        for (int j = g.active_begin(); j < g.active_end(); ++j) {
          double qv = 0.0;
          for (int t = -rq; t <= rq; ++t) qv += q[t + rq] * v[index(s, j + t)];
          next[index(s, j)] -= nu * dt_ * dt_ * qv;
        }
      }
      apply_constraints(next);
      u = std::move(next);
    }
  }

  FieldState out;
  out.u_prev = state.u_now;
  out.u_now = std::move(u);
  out.step = state.step + 1;
  out.dt = dt_;
  return out;
}

double OversetStepper::active_max_norm(const Eigen::VectorXd& u) const {
  double m = 0.0;
  for (int i = 0; i < n_total_; ++i)
    if (active_mask_[i]) m = std::max(m, std::abs(u[i]));
  return m;
}

PeriodicStepper::PeriodicStepper(int n, double h, const SchemeConfig& cfg, double dt,
                                 double nu_p)
    : n_(n), cfg_(cfg), dt_(dt), nu_(nu_p) {
  const Eigen::MatrixXd i = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd l = periodic_matrix(laplacian_stencil(cfg.p, h, cfg.c), n);
  const Eigen::MatrixXd l2sq = periodic_matrix(laplacian2_squared_stencil(h, cfg.c), n);
  q_mat_ = periodic_matrix(dissipation_stencil(cfg.p, h, cfg.c), n);

  Eigen::MatrixXd a0 = i - cfg.alpha2 * dt * dt * l;
  Eigen::MatrixXd b0 = 2.0 * i + cfg.beta2() * dt * dt * l;
  if (cfg.p == 4) {
    a0 += cfg.alpha4 * std::pow(dt, 4) * l2sq;
    b0 -= cfg.beta4() * std::pow(dt, 4) * l2sq;
  }
  Eigen::MatrixXd c0 = -a0;

  a_mat_ = a0;
  b_mat_ = b0;
  c_mat_ = c0;
  if (cfg.dissipation == DissipationMode::Monolithic) {
    a_mat_ += 0.5 * nu_ * dt * q_mat_;
    c_mat_ += 0.5 * nu_ * dt * q_mat_;
  }
  lu_.compute(a_mat_);
}

Eigen::VectorXd PeriodicStepper::advance(const Eigen::VectorXd& u_now,
                                         const Eigen::VectorXd& u_prev) const {
  Eigen::VectorXd u = lu_.solve(b_mat_ * u_now + c_mat_ * u_prev);
  if (cfg_.dissipation == DissipationMode::PredictorCorrector && nu_ != 0.0) {
    for (int k = 0; k < cfg_.n_u; ++k)
      u -= 0.5 * nu_ * dt_ * (q_mat_ * (u - u_prev));
  }
  return u;
}

std::vector<ConvergenceRecord> run_convergence(int mode, double delta,
                                               const SchemeConfig& cfg, double t_final,
                                               int levels, int n_right_base) {
  std::vector<ConvergenceRecord> out;
  const double omega = 0.5 * cfg.c * mode * M_PI;
  for (int lev = 0; lev < levels; ++lev) {
    const int n_right = n_right_base << lev;
    OversetGrid1D grid = build_overset(delta, n_right, cfg.p);
    OversetStepper stepper(std::move(grid), cfg);
    const int n_steps = std::max(1, static_cast<int>(std::ceil(t_final / stepper.dt())));
    // shrink dt to land on t_final exactly
    SchemeConfig cfl_adj = cfg;
    cfl_adj.cfl = cfg.cfl * (t_final / n_steps) / stepper.dt();
    OversetStepper run(build_overset(delta, n_right, cfg.p), cfl_adj);

    auto u0 = [&](double x) { return mode == 0 ? 0.0 : std::sin(0.5 * mode * M_PI * (x + 1.0)); };
    auto zero = [](double) { return 0.0; };
    FieldState st = run.first_step(u0, zero);
    for (int s = 1; s < n_steps; ++s) st = run.advance(st);

    const double t = n_steps * run.dt();
    double err = 0.0;
    const Eigen::VectorXd exact =
        run.sample([&](double x) { return u0(x) * std::cos(omega * t); });
    err = run.active_max_norm(st.u_now - exact);

    ConvergenceRecord rec;
    rec.level = lev;
    rec.n_right = n_right;
    rec.h_right = 0.5 / n_right;
    rec.dt = run.dt();
    rec.error = err;
    rec.observed_order =
        lev == 0 ? 0.0 : std::log2(out.back().error / std::max(err, 1e-300));
    out.push_back(rec);
  }
  return out;
}

}  // namespace ws
