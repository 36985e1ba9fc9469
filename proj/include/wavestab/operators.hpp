#ifndef WAVESTAB_OPERATORS_HPP
#define WAVESTAB_OPERATORS_HPP

#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace ws {

class OperatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Taylor coefficients of the compact Laplacian: kappa_0..kappa_3. Only the
// first two are used for p <= 4.
inline constexpr double kKappa[4] = {1.0, -1.0 / 12.0, 1.0 / 90.0, -1.0 / 560.0};

/// Centered per-axis stencil of c^2 * sum_m kappa_m h^{2m} (D+D-)^{m+1},
/// width p+1, divided form (includes 1/h^2 factors).
Eigen::VectorXd laplacian_stencil(int p, double h, double c);

/// Stencil of (L_{2,h})^2, width 5.
Eigen::VectorXd laplacian2_squared_stencil(double h, double c);

/// Upwind dissipation stencil (c/h) * (-Delta+ Delta-)^{p/2+1}, width p+3.
/// Coefficients sum to zero.
Eigen::VectorXd dissipation_stencil(int p, double h, double c);

/// Apply a centered stencil to a periodic grid function.
Eigen::VectorXd apply_periodic(const Eigen::VectorXd& stencil, const Eigen::VectorXd& u);

/// Apply a centered stencil at interior points of a finite grid function;
/// u must carry at least (stencil.size()-1)/2 halo values per side beyond
/// [begin, end). Throws OperatorError otherwise.
void apply_interior(const Eigen::VectorXd& stencil, const Eigen::VectorXd& u,
                    int begin, int end, Eigen::VectorXd& out);

// Periodic convenience wrappers used by the von Neumann consistency checks.
Eigen::VectorXd apply_L(int p, const Eigen::VectorXd& u, double h, double c);
Eigen::VectorXd apply_L2sq(const Eigen::VectorXd& u, double h, double c);
Eigen::VectorXd apply_Q(int p, const Eigen::VectorXd& u, double h, double c);

/// Per-axis application of L_{p,h} on a periodic 2D Cartesian grid
/// (rows vary x, columns vary y).
Eigen::MatrixXd apply_L_2d(int p, const Eigen::MatrixXd& u, double hx, double hy, double c);

/// Dense N x N matrix of a centered stencil on an N-point periodic grid.
Eigen::MatrixXd periodic_matrix(const Eigen::VectorXd& stencil, int n);

/// Upwind dissipation setup: nu_p = s_f / (2^{p+1} sum_d lambda_d) with the
/// strict stability bound sigma_{n_u} / (2^{p+1} sum_d lambda_d).
struct DissipationParams {
  double nu_p = 0.0;
  double gamma = 1.0;
  double nu_gamma = 0.0;  // gamma * nu_p
  int n_u = 1;
  int sigma = 1;          // 2 for n_u even, 1 for n_u odd
  double s_f = 0.0;
  double bound = 0.0;
};

DissipationParams dissipation_coefficient(int p, int n_u, double s_f,
                                          const std::vector<double>& cfl_per_axis,
                                          double gamma = 1.0);

}  // namespace ws

#endif
