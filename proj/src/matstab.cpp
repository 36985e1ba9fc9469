#include "wavestab/matstab.hpp"

#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace ws {

const char* to_string(SchemeCase c) {
  switch (c) {
    case SchemeCase::EME: return "EME";
    case SchemeCase::IME: return "IME";
    default: return "SPIE";
  }
}

SchemeConfig make_sweep_config(SchemeCase scheme, int p) {
  SchemeConfig cfg;
  cfg.p = p;
  cfg.dissipation = DissipationMode::PredictorCorrector;
  switch (scheme) {
    case SchemeCase::EME:
      cfg.left_mode = cfg.right_mode = TimeMode::Explicit;
      cfg.cfl = 0.9;
      cfg.n_u = 1;
      cfg.s_f = 0.9;
      break;
    case SchemeCase::IME:
      cfg.left_mode = cfg.right_mode = TimeMode::Implicit;
      cfg.cfl = p == 2 ? 4.0 : 5.0;
      cfg.n_u = p == 2 ? 4 : 5;
      // nu_p scales with 1/CFL, hence the extra corrections; keep the safety
      // factor at 90% of the admissible sigma_{n_u}
      cfg.s_f = cfg.n_u % 2 == 0 ? 1.8 : 0.9;
      break;
    case SchemeCase::SPIE:
      cfg.left_mode = TimeMode::Explicit;
      cfg.right_mode = TimeMode::Implicit;
      cfg.cfl = 0.9;
      cfg.n_u = 1;
      cfg.s_f = 0.9;
      break;
  }
  return cfg;
}

StageMatrices assemble_stages(const OversetGrid1D& grid, const SchemeConfig& cfg) {
  // The stepper owns the index layout and the Q0 structure; rebuild the same
  // rows here as explicit matrices.
  OversetStepper stepper(grid, cfg);
  const int n = stepper.size();
  const double dt = stepper.dt();

  StageMatrices st;
  st.n_u = cfg.dissipation == DissipationMode::PredictorCorrector ? cfg.n_u : 0;
  st.q0 = Eigen::MatrixXd::Zero(n, n);
  st.q1 = Eigen::MatrixXd::Zero(n, n);
  st.q2 = Eigen::MatrixXd::Zero(n, n);
  st.p0 = Eigen::MatrixXd::Zero(n, n);
  st.p1 = Eigen::MatrixXd::Zero(n, n);
  st.p2 = Eigen::MatrixXd::Zero(n, n);

  for (Side s : {Side::Left, Side::Right}) {
    const ComponentGrid1D& g = grid.grid(s);
    const double a2 = cfg.alpha2_of(s), a4 = cfg.alpha4_of(s);
    const double b2 = 1.0 - 2.0 * a2;
    const double b4 = a2 - 2.0 * a4 - 1.0 / 12.0;
    const Eigen::VectorXd lp = laplacian_stencil(cfg.p, g.h, cfg.c);
    const Eigen::VectorXd l2sq = laplacian2_squared_stencil(g.h, cfg.c);
    const Eigen::VectorXd q = dissipation_stencil(cfg.p, g.h, cfg.c);
    const double nu = stepper.nu_of(s);
    const int rl = static_cast<int>(lp.size()) / 2;
    const int rs = static_cast<int>(l2sq.size()) / 2;
    const int rq = static_cast<int>(q.size()) / 2;

    for (int j = g.active_begin(); j < g.active_end(); ++j) {
      const int row = stepper.index(s, j);
      st.active_indices.push_back(row);
      st.q0(row, row) += 1.0;
      st.q1(row, row) += 2.0;
      st.q2(row, row) -= 1.0;
      for (int t = -rl; t <= rl; ++t) {
        const int col = stepper.index(s, j + t);
        st.q0(row, col) -= a2 * dt * dt * lp[t + rl];
        st.q1(row, col) += b2 * dt * dt * lp[t + rl];
        st.q2(row, col) += a2 * dt * dt * lp[t + rl];
      }
      if (cfg.p == 4)
        for (int t = -rs; t <= rs; ++t) {
          const int col = stepper.index(s, j + t);
          st.q0(row, col) += a4 * std::pow(dt, 4) * l2sq[t + rs];
          st.q1(row, col) -= b4 * std::pow(dt, 4) * l2sq[t + rs];
          st.q2(row, col) -= a4 * std::pow(dt, 4) * l2sq[t + rs];
        }
      // Stage 3: U^(k) = U^(k-1) - nu dt^2 Q [(U^(k-1) - U^{n-1}) / (2 dt)]
      st.p0(row, row) = 1.0;
      st.p1(row, row) += 1.0;
      const char* dm = std::getenv("WS_DISS_MODE");
      const int mode = dm ? std::atoi(dm) : 0;
      int e = cfg.p / 2 + 1;
      double nu_row = nu;
      if (mode == 1) {
        int dist = e + 1;
        for (int t = 1; t <= e; ++t)
          if (g.is_interp(j - t) || g.is_interp(j + t)) { dist = t; break; }
        if (dist <= e) {
          e = dist - 1;  // largest exponent whose stencil avoids interp slots
          nu_row = e > 0 ? nu * std::pow(2.0, cfg.p + 2 - 2 * e) : 0.0;
        }
      }
      if (e > 0) {
        Eigen::VectorXd qrow(2 * e + 1);
        if (e == cfg.p / 2 + 1) qrow = q;
        else {
          double binom = 1.0;
          for (int t = -e; t <= e; ++t) {
            qrow[t + e] = ((t % 2 == 0) ? 1.0 : -1.0) * binom * cfg.c / g.h;
            binom = binom * (e - t) / (e + t + 1.0);
          }
        }
        for (int t = -e; t <= e; ++t) {
          if (mode == 2 && g.is_interp(j + t)) continue;
          const int col = stepper.index(s, j + t);
          st.p1(row, col) -= 0.5 * nu_row * dt * qrow[t + e];
          st.p2(row, col) += 0.5 * nu_row * dt * qrow[t + e];
        }
      }
    }

    const int dir = stepper.index(s, g.dirichlet_index());
    st.constraint_indices.push_back(dir);
    st.q0(dir, dir) = 1.0;
    st.p0(dir, dir) = 1.0;
    for (int j = g.jmin(); j <= g.jmax(); ++j) {
      if (!g.is_ghost(j)) continue;
      const int row = stepper.index(s, j);
      st.constraint_indices.push_back(row);
      st.q0(row, row) = 1.0;
      st.q0(row, stepper.index(s, g.ghost_mirror(j))) = 1.0;
      st.p0(row, row) = 1.0;
      st.p0(row, stepper.index(s, g.ghost_mirror(j))) = 1.0;
    }
  }

  for (const InterpStencil& sten : grid.stencils) {
    const Side donor_side = sten.target_side == Side::Left ? Side::Right : Side::Left;
    const int row = stepper.index(sten.target_side, sten.target_index);
    st.constraint_indices.push_back(row);
    st.q0(row, row) = 1.0;
    st.p0(row, row) = 1.0;
    for (int j = 0; j < sten.weights.size(); ++j) {
      const int col = stepper.index(donor_side, sten.donor_left + j);
      if (grid.grid(donor_side).is_interp(sten.donor_left + j))
        throw GridError("assemble_stages: interpolation is not explicit");
      st.q0(row, col) = -sten.weights[j];
      st.p0(row, col) = -sten.weights[j];
    }
  }
  return st;
}

namespace {

// full = E * active on the constraint manifold (Dirichlet zero, odd ghosts,
// explicit interpolation)
Eigen::MatrixXd expansion_matrix(const StageMatrices& st) {
  const int n = static_cast<int>(st.q0.rows());
  const int na = static_cast<int>(st.active_indices.size());
  std::vector<int> active_slot(n, -1);
  for (int i = 0; i < na; ++i) active_slot[st.active_indices[i]] = i;

  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, na);
  for (int i = 0; i < na; ++i) e(st.active_indices[i], i) = 1.0;
  // Constraint rows of Q0 read  u_row + sum_cols q0(row,col) u_col = 0 with a
  // unit diagonal, and every off-diagonal column is active or Dirichlet.
  for (int row : st.constraint_indices) {
    for (int col = 0; col < n; ++col) {
      if (col == row || st.q0(row, col) == 0.0) continue;
      if (active_slot[col] >= 0) e(row, active_slot[col]) = -st.q0(row, col);
    }
  }
  return e;
}

}  // namespace

ThreeLevelUpdate compress(const StageMatrices& st, int n_u) {
  Eigen::PartialPivLU<Eigen::MatrixXd> q0(st.q0);
  ThreeLevelUpdate upd;
  upd.active_indices = st.active_indices;
  upd.t1 = q0.solve(st.q1);
  upd.t2 = q0.solve(st.q2);
  if (n_u > 0) {
    Eigen::PartialPivLU<Eigen::MatrixXd> p0(st.p0);
    const Eigen::MatrixXd k = p0.solve(st.p1);
    const Eigen::MatrixXd m = p0.solve(st.p2);
    Eigen::MatrixXd kn = Eigen::MatrixXd::Identity(k.rows(), k.cols());
    Eigen::MatrixXd geom = Eigen::MatrixXd::Zero(k.rows(), k.cols());
    for (int i = 0; i < n_u; ++i) {
      geom += kn;  // sum_{i<n_u} K^i
      kn = k * kn;
    }
    upd.t1 = kn * upd.t1;
    upd.t2 = kn * upd.t2 + geom * m;
  }

  const Eigen::MatrixXd e = expansion_matrix(st);
  const int na = static_cast<int>(st.active_indices.size());
  Eigen::MatrixXd full1 = upd.t1 * e;
  Eigen::MatrixXd full2 = upd.t2 * e;
  upd.b1.resize(na, na);
  upd.b2.resize(na, na);
  for (int i = 0; i < na; ++i) {
    upd.b1.row(i) = full1.row(st.active_indices[i]);
    upd.b2.row(i) = full2.row(st.active_indices[i]);
  }
  return upd;
}

double verify_compression(const OversetGrid1D& grid, const SchemeConfig& cfg,
                          int n_steps, std::uint64_t seed) {
  OversetStepper stepper(grid, cfg);
  const StageMatrices st = assemble_stages(grid, cfg);
  const ThreeLevelUpdate upd = compress(st, st.n_u);
  const Eigen::MatrixXd e = expansion_matrix(st);
  const int na = static_cast<int>(st.active_indices.size());

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v0(na), v1(na);
  for (int i = 0; i < na; ++i) v0[i] = dist(rng);
  for (int i = 0; i < na; ++i) v1[i] = dist(rng);

  FieldState state;
  state.u_prev = e * v0;
  state.u_now = e * v1;
  state.step = 1;
  state.dt = stepper.dt();

  double max_dev = 0.0;
  for (int s = 0; s < n_steps; ++s) {
    const Eigen::VectorXd v2 = upd.b1 * v1 + upd.b2 * v0;
    state = stepper.advance(state);
    double dev = 0.0, scale = std::max(1.0, v2.lpNorm<Eigen::Infinity>());
    for (int i = 0; i < na; ++i)
      dev = std::max(dev, std::abs(state.u_now[st.active_indices[i]] - v2[i]));
    max_dev = std::max(max_dev, dev / scale);
    v0 = v1;
    v1 = v2;
  }
  return max_dev;
}

SpectrumReport spectrum(const ThreeLevelUpdate& upd, double tol_a) {
  const int n = static_cast<int>(upd.b1.rows());
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  companion.block(0, n, n, n).setIdentity();
  companion.block(n, 0, n, n) = upd.b2;
  companion.block(n, n, n, n) = upd.b1;

  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion);
  if (solver.info() != Eigen::Success)
    throw SteppingError("spectrum: eigensolver failed to converge");

  SpectrumReport rep;
  rep.tol_a = tol_a;
  rep.eigenvalues = solver.eigenvalues();
  const Eigen::MatrixXcd vecs = solver.eigenvectors();
  for (int i = 0; i < 2 * n; ++i) {
    const std::complex<double> a = rep.eigenvalues[i];
    const Eigen::VectorXcd v0 = vecs.col(i).head(n);
    const double vnorm = v0.norm();
    if (vnorm > 1e-14) {
      const Eigen::VectorXcd res =
          a * a * v0 - a * (upd.b1 * v0) - upd.b2 * v0;
      rep.max_residual = std::max(rep.max_residual, res.norm() / vnorm);
    }
    const double mod = std::abs(a);
    rep.max_modulus = std::max(rep.max_modulus, mod);
    if (mod > 1.0 + tol_a) ++rep.unstable_count;
  }
  return rep;
}

SweepSummary run_sweep(const SweepPlan& plan, SchemeCase scheme, const SchemeConfig& cfg,
                       int n_right, double tol_a, int jobs) {
  const int nd = plan.n_delta;
  const int ng = static_cast<int>(plan.gamma_values.size());
  SweepSummary summary;
  summary.cells.resize(static_cast<size_t>(nd) * ng);

  auto worker = [&](int d0, int d1) {
    for (int id = d0; id < d1; ++id) {
      const double t = nd == 1 ? 0.0 : double(id) / (nd - 1);
      const double delta = plan.delta_min + t * (plan.delta_max - plan.delta_min);
      for (int ig = 0; ig < ng; ++ig) {
        SweepResult& cell = summary.cells[static_cast<size_t>(id) * ng + ig];
        cell.scheme = scheme;
        cell.p = cfg.p;
        cell.delta = delta;
        cell.gamma = plan.gamma_values[ig];
        cell.n_u = cfg.n_u;
        cell.s_f = cfg.s_f;
        try {
          const OversetGrid1D grid = build_overset(delta, n_right, cfg.p);
          SchemeConfig cell_cfg = cfg;
          cell_cfg.gamma = cell.gamma;
          const StageMatrices st = assemble_stages(grid, cell_cfg);
          const SpectrumReport rep = spectrum(compress(st, st.n_u), tol_a);
          cell.max_modulus = rep.max_modulus;
          cell.unstable_count = rep.unstable_count;
          cell.stable = rep.unstable_count == 0;
        } catch (const std::exception& ex) {
          cell.error = ex.what();
        }
      }
    }
  };

  jobs = std::max(1, jobs);
  if (jobs == 1) {
    worker(0, nd);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (nd + jobs - 1) / jobs;
    for (int j = 0; j < jobs; ++j) {
      const int d0 = j * chunk, d1 = std::min(nd, d0 + chunk);
      if (d0 < d1) pool.emplace_back(worker, d0, d1);
    }
    for (auto& th : pool) th.join();
  }

  for (int ig = 0; ig < ng; ++ig) {
    int unstable = 0;
    for (int id = 0; id < nd; ++id) {
      const SweepResult& cell = summary.cells[static_cast<size_t>(id) * ng + ig];
      if (!cell.error.empty() || !cell.stable) ++unstable;
    }
    summary.unstable_per_gamma.emplace_back(plan.gamma_values[ig], unstable);
  }
  return summary;
}

}  // namespace ws
