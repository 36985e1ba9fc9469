#ifndef WAVESTAB_MATSTAB_HPP
#define WAVESTAB_MATSTAB_HPP

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wavestab/grid.hpp"
#include "wavestab/stepping.hpp"

namespace ws {

enum class SchemeCase { EME, IME, SPIE };

const char* to_string(SchemeCase c);

/// Paper sweep conventions for a scheme case: time modes, CFL, corrections.
SchemeConfig make_sweep_config(SchemeCase scheme, int p);

/// Stage systems over the full unknown vector (ghost and interpolation slots
/// included): Q0 U^(0) = Q1 U^n + Q2 U^{n-1} for the time step and
/// P0 U^(k) = P1 U^(k-1) + P2 U^{n-1} for each dissipation correction.
struct StageMatrices {
  Eigen::MatrixXd q0, q1, q2;
  Eigen::MatrixXd p0, p1, p2;
  std::vector<int> active_indices;      // global indices of active unknowns
  std::vector<int> constraint_indices;  // everything else
  int n_u = 0;                          // corrections encoded in the P system
};

StageMatrices assemble_stages(const OversetGrid1D& grid, const SchemeConfig& cfg);

/// Full-size update U^{n+1} = T1 U^n + T2 U^{n-1} and its compression to the
/// active unknowns, V^{n+1} = B1 V^n + B2 V^{n-1}.
struct ThreeLevelUpdate {
  Eigen::MatrixXd t1, t2;  // full unknown vector
  Eigen::MatrixXd b1, b2;  // active unknowns only
  std::vector<int> active_indices;
};

ThreeLevelUpdate compress(const StageMatrices& stages, int n_u);

/// Max relative deviation between the time stepper and the B1/B2 recurrence
/// over n_steps from seeded random active data.
double verify_compression(const OversetGrid1D& grid, const SchemeConfig& cfg,
                          int n_steps, std::uint64_t seed = 12345);

struct SpectrumReport {
  Eigen::VectorXcd eigenvalues;
  double max_modulus = 0.0;
  int unstable_count = 0;
  double tol_a = 1e-8;
  double max_residual = 0.0;  // quadratic-pencil residual over all eigenpairs
};

/// Eigenvalues of the companion block matrix [[0, I], [B2, B1]], with the
/// quadratic-pencil residual check (a^2 I - a B1 - B2) v = 0.
SpectrumReport spectrum(const ThreeLevelUpdate& update, double tol_a = 1e-8);

struct SweepResult {
  SchemeCase scheme = SchemeCase::EME;
  int p = 2;
  double delta = 0.0;
  double gamma = 0.0;
  int n_u = 1;
  double s_f = 0.9;
  bool stable = false;
  double max_modulus = 0.0;
  int unstable_count = 0;
  std::string error;  // nonempty when the cell failed
};

struct SweepSummary {
  std::vector<SweepResult> cells;                        // row-major (delta, gamma)
  std::vector<std::pair<double, int>> unstable_per_gamma;  // (gamma, #unstable grids)
};

/// The gamma-delta sweep: for each grid in the plan and each gamma, compress
/// and count eigenvalues beyond 1 + tol_a. Cells are independent and fanned
/// out over `jobs` worker threads.
SweepSummary run_sweep(const SweepPlan& plan, SchemeCase scheme, const SchemeConfig& cfg,
                       int n_right = 10, double tol_a = 1e-8, int jobs = 1);

}  // namespace ws

#endif
