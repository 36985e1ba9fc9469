#ifndef WAVESTAB_GRID_HPP
#define WAVESTAB_GRID_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace ws {

enum class Side { Left, Right };

inline const char* to_string(Side s) { return s == Side::Left ? "left" : "right"; }

/// One uniform component grid of a 1D overset pair on [-1,1].
///
/// Index layout (by grid index j, coordinates x(j) = x0 + j*h):
///   Left grid : ghosts j=-n_ghost..-1, Dirichlet j=0, active j=1..n_active,
///               interpolation j=n_active+1..n_active+n_ghost.
///   Right grid: interpolation j=-n_ghost..-1, active j=0..n_active-1,
///               Dirichlet j=n_active, ghosts j=n_active+1..n_active+n_ghost.
struct ComponentGrid1D {
  Side side;
  double x0 = 0.0;   // physical coordinate of index j=0
  double h = 0.0;    // uniform spacing
  int n_active = 0;  // N_L or N_R
  int n_ghost = 0;   // p/2 + 1

  double x(int j) const { return x0 + j * h; }

  int jmin() const { return -n_ghost; }
  int jmax() const { return n_active + n_ghost; }
  int npts() const { return jmax() - jmin() + 1; }

  int active_begin() const { return side == Side::Left ? 1 : 0; }
  int active_end() const {  // one past the last active index
    return side == Side::Left ? n_active + 1 : n_active;
  }
  int dirichlet_index() const { return side == Side::Left ? 0 : n_active; }

  bool is_active(int j) const { return j >= active_begin() && j < active_end(); }
  bool is_interp(int j) const {
    return side == Side::Left ? j > n_active : j < 0;
  }
  bool is_ghost(int j) const {
    return side == Side::Left ? j < 0 : j > n_active;
  }
  /// Mirror index for the odd-symmetry ghost condition U_ghost = -U_mirror.
  int ghost_mirror(int j) const {
    return side == Side::Left ? -j : 2 * n_active - j;
  }
};

/// Lagrange interpolation stencil for one interpolation point.
struct InterpStencil {
  Side target_side;         // grid owning the interpolation point
  int target_index;         // grid index of the point
  int donor_left;           // leftmost donor index m_k on the other grid
  Eigen::VectorXd weights;  // p+1 weights, sums to 1
};

/// Two overlapping component grids on [-1,1] with interpolation bookkeeping.
struct OversetGrid1D {
  ComponentGrid1D left;
  ComponentGrid1D right;
  int order = 2;      // p
  double delta = 1.0; // h_L / h_R
  double b_L = 0.0;   // right endpoint of the left domain
  std::vector<InterpStencil> stencils;

  const ComponentGrid1D& grid(Side s) const { return s == Side::Left ? left : right; }
};

struct SweepPlan {
  double delta_min = 0.25;
  double delta_max = 2.0;
  int n_delta = 101;
  std::vector<double> gamma_values;
};

class GridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Weights w_j such that sum_j w_j f(nodes_j) interpolates f at x exactly for
/// polynomials of degree < nodes.size(). Throws GridError on coincident nodes.
Eigen::VectorXd lagrange_weights(const Eigen::VectorXd& nodes, double x);

/// Build the overset grid for spacing ratio delta = h_L/h_R with the right grid
/// fixed on [0.5,1]. N_L is the smallest count giving a positive overlap
/// (b_L > 0.5) with full explicit donor stencils for every interpolation point.
OversetGrid1D build_overset(double delta, int n_right, int order);

/// Grids for n_delta equally spaced ratios on [delta_min, delta_max].
std::vector<OversetGrid1D> enumerate_grids(const SweepPlan& plan, int n_right, int order);

nlohmann::json to_json(const OversetGrid1D& g);

}  // namespace ws

#endif
