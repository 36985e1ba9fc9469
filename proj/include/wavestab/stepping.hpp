#ifndef WAVESTAB_STEPPING_HPP
#define WAVESTAB_STEPPING_HPP

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "wavestab/grid.hpp"
#include "wavestab/operators.hpp"

namespace ws {

enum class TimeMode { Explicit, Implicit };
enum class DissipationMode { None, Monolithic, PredictorCorrector };

class SteppingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scheme parameters shared by the steppers and the matrix stability analysis.
/// The accuracy constraints are built in: beta2 = 1 - 2*alpha2 and
/// beta4 = alpha2 - 2*alpha4 - 1/12, with the time-symmetric weights
/// gamma2 = alpha2, gamma4 = alpha4.
struct SchemeConfig {
  int p = 2;
  double alpha2 = 0.25;
  double alpha4 = 1.0 / 12.0;
  TimeMode left_mode = TimeMode::Explicit;
  TimeMode right_mode = TimeMode::Explicit;
  DissipationMode dissipation = DissipationMode::None;
  double gamma = 1.0;  // scaled coefficient nu_gamma = gamma * nu_p
  double s_f = 0.9;
  int n_u = 1;
  double c = 1.0;
  double cfl = 0.9;

  double beta2() const { return 1.0 - 2.0 * alpha2; }
  double beta4() const { return alpha2 - 2.0 * alpha4 - 1.0 / 12.0; }
  TimeMode mode(Side s) const { return s == Side::Left ? left_mode : right_mode; }
  double alpha2_of(Side s) const { return mode(s) == TimeMode::Implicit ? alpha2 : 0.0; }
  double alpha4_of(Side s) const { return mode(s) == TimeMode::Implicit ? alpha4 : 0.0; }
  bool any_implicit() const {
    return left_mode == TimeMode::Implicit || right_mode == TimeMode::Implicit;
  }
};

/// Time-step from the CFL policy: the reference spacing is the smallest among
/// explicit grids when any grid is explicit, otherwise the smallest overall.
double select_dt(const OversetGrid1D& grid, const SchemeConfig& cfg);

/// Full (nu_gamma = gamma * nu_p) dissipation coefficient for a grid of
/// spacing h at time-step dt.
double nu_full(double h, double dt, const SchemeConfig& cfg);

/// Dense direct solve with a residual check; throws SteppingError (with a
/// reciprocal condition estimate) when the residual exceeds 1e-11 * |rhs|.
Eigen::VectorXd solve_implicit(const Eigen::MatrixXd& a, const Eigen::VectorXd& rhs);

/// Grid functions at levels n and n-1 over all points of both grids.
/// Global ordering: left grid by ascending index, then right grid by
/// ascending index (ghosts/boundary/interpolation slots included).
struct FieldState {
  Eigen::VectorXd u_now;   // U^n
  Eigen::VectorXd u_prev;  // U^{n-1}
  int step = 0;
  double dt = 0.0;
};

/// SPIE/EME/IME time integrator on a 1D overset grid with homogeneous
/// Dirichlet ends.
class OversetStepper {
 public:
  OversetStepper(OversetGrid1D grid, SchemeConfig cfg);

  const OversetGrid1D& grid() const { return grid_; }
  const SchemeConfig& config() const { return cfg_; }
  double dt() const { return dt_; }
  int size() const { return n_total_; }
  int index(Side s, int j) const;  // global index of grid point (s, j)
  double coord(int global) const { return coords_[global]; }
  bool is_active(int global) const { return active_mask_[global]; }
  double nu_of(Side s) const { return s == Side::Left ? nu_left_ : nu_right_; }

  /// Sample a function at every point of both grids.
  Eigen::VectorXd sample(const std::function<double(double)>& f) const;

  /// Zero the Dirichlet slots, mirror the ghosts, interpolate.
  void apply_constraints(Eigen::VectorXd& u) const;

  /// Initial state (U^1, U^0) from u0, u1 via the first-step scheme: the
  /// A_p-based implicit form per grid, which reduces to the explicit Taylor
  /// start on explicit grids.
  FieldState first_step(const std::function<double(double)>& u0,
                        const std::function<double(double)>& u1) const;

  /// One three-stage step (explicit update, implicit update, n_u dissipation
  /// corrections); constraints re-applied after every stage.
  FieldState advance(const FieldState& state) const;

  /// Max-norm over active points.
  double active_max_norm(const Eigen::VectorXd& u) const;

 private:
  Eigen::VectorXd explicit_rhs(const Eigen::VectorXd& u_now,
                               const Eigen::VectorXd& u_prev) const;

  OversetGrid1D grid_;
  SchemeConfig cfg_;
  double dt_ = 0.0;
  double nu_left_ = 0.0, nu_right_ = 0.0;  // nu_gamma per grid
  int n_total_ = 0;
  int left_offset_ = 0, right_offset_ = 0;
  std::vector<double> coords_;
  std::vector<bool> active_mask_;
  // implicit stage matrix (identity rows on explicit-grid actives)
  Eigen::MatrixXd stage_matrix_;
  Eigen::PartialPivLU<Eigen::MatrixXd> stage_lu_;
};

/// Single-grid periodic stepper used by the von Neumann cross-checks; supports
/// the monolithic-UW widened implicit system and PC corrections.
class PeriodicStepper {
 public:
  PeriodicStepper(int n, double h, const SchemeConfig& cfg, double dt, double nu_p);

  double dt() const { return dt_; }
  /// One step from (u_now, u_prev); returns U^{n+1}.
  Eigen::VectorXd advance(const Eigen::VectorXd& u_now, const Eigen::VectorXd& u_prev) const;

 private:
  int n_;
  SchemeConfig cfg_;
  double dt_, nu_;
  Eigen::MatrixXd a_mat_, b_mat_, c_mat_;  // A U^{n+1} = B U^n + C U^{n-1}
  Eigen::MatrixXd q_mat_;                  // dissipation operator (PC corrections)
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

struct ConvergenceRecord {
  int level = 0;
  int n_right = 0;
  double h_right = 0.0;
  double dt = 0.0;
  double error = 0.0;
  double observed_order = 0.0;  // vs previous level, 0 for the first
};

/// Refinement study against the standing mode
/// u = sin(m*pi*(x+1)/2) * cos(c*m*pi*t/2) on [-1,1].
std::vector<ConvergenceRecord> run_convergence(int mode, double delta,
                                               const SchemeConfig& cfg, double t_final,
                                               int levels, int n_right_base = 10);

}  // namespace ws

#endif
