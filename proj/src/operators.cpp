#include "wavestab/operators.hpp"

#include <cmath>

namespace ws {

namespace {

// Convolution of two centered odd-length stencils.
Eigen::VectorXd convolve(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(a.size() + b.size() - 1);
  for (Eigen::Index i = 0; i < a.size(); ++i)
    for (Eigen::Index j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Eigen::VectorXd d2_undivided() {
  Eigen::VectorXd s(3);
  s << 1.0, -2.0, 1.0;
  return s;
}

}  // namespace

Eigen::VectorXd laplacian_stencil(int p, double h, double c) {
  if (p != 2 && p != 4) throw OperatorError("laplacian_stencil: p must be 2 or 4");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(p + 1);
  Eigen::VectorXd pow = d2_undivided();  // (Delta+ Delta-)^{m+1}, undivided
  for (int m = 0; m <= p / 2 - 1; ++m) {
    const int off = (p + 1 - pow.size()) / 2;
    acc.segment(off, pow.size()) += kKappa[m] * pow;
    if (m + 1 <= p / 2 - 1) pow = convolve(pow, d2_undivided());
  }
  return acc * (c * c / (h * h));
}

Eigen::VectorXd laplacian2_squared_stencil(double h, double c) {
  const Eigen::VectorXd l2 = laplacian_stencil(2, h, c);
  return convolve(l2, l2);
}

Eigen::VectorXd dissipation_stencil(int p, double h, double c) {
  if (p != 2 && p != 4) throw OperatorError("dissipation_stencil: p must be 2 or 4");
  Eigen::VectorXd pow = d2_undivided();
  for (int m = 1; m < p / 2 + 1; ++m) pow = convolve(pow, d2_undivided());
  const double sign = (p / 2 + 1) % 2 == 0 ? 1.0 : -1.0;  // (-1)^{p/2+1}
  return pow * (sign * c / h);
}

Eigen::VectorXd apply_periodic(const Eigen::VectorXd& stencil, const Eigen::VectorXd& u) {
  const int n = static_cast<int>(u.size());
  const int r = static_cast<int>(stencil.size()) / 2;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j)
    for (int s = -r; s <= r; ++s)
      out[j] += stencil[s + r] * u[((j + s) % n + n) % n];
  return out;
}

void apply_interior(const Eigen::VectorXd& stencil, const Eigen::VectorXd& u,
                    int begin, int end, Eigen::VectorXd& out) {
  const int r = static_cast<int>(stencil.size()) / 2;
  if (begin - r < 0 || end + r > u.size())
    throw OperatorError("apply_interior: halo too small for stencil");
  for (int j = begin; j < end; ++j) {
    double acc = 0.0;
    for (int s = -r; s <= r; ++s) acc += stencil[s + r] * u[j + s];
    out[j] = acc;
  }
}

Eigen::VectorXd apply_L(int p, const Eigen::VectorXd& u, double h, double c) {
  return apply_periodic(laplacian_stencil(p, h, c), u);
}

Eigen::VectorXd apply_L2sq(const Eigen::VectorXd& u, double h, double c) {
  return apply_periodic(laplacian2_squared_stencil(h, c), u);
}

Eigen::VectorXd apply_Q(int p, const Eigen::VectorXd& u, double h, double c) {
  return apply_periodic(dissipation_stencil(p, h, c), u);
}

Eigen::MatrixXd apply_L_2d(int p, const Eigen::MatrixXd& u, double hx, double hy, double c) {
  const Eigen::VectorXd sx = laplacian_stencil(p, hx, c);
  const Eigen::VectorXd sy = laplacian_stencil(p, hy, c);
  Eigen::MatrixXd out(u.rows(), u.cols());
  for (Eigen::Index j = 0; j < u.cols(); ++j)
    out.col(j) = apply_periodic(sx, u.col(j));
  for (Eigen::Index i = 0; i < u.rows(); ++i)
    out.row(i) += apply_periodic(sy, u.row(i).transpose()).transpose();
  return out;
}

Eigen::MatrixXd periodic_matrix(const Eigen::VectorXd& stencil, int n) {
  const int r = static_cast<int>(stencil.size()) / 2;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int s = -r; s <= r; ++s) m(j, ((j + s) % n + n) % n) += stencil[s + r];
  return m;
}

DissipationParams dissipation_coefficient(int p, int n_u, double s_f,
                                          const std::vector<double>& cfl_per_axis,
                                          double gamma) {
  if (n_u < 1) throw OperatorError("dissipation_coefficient: n_u must be >= 1");
  DissipationParams d;
  d.n_u = n_u;
  d.sigma = n_u % 2 == 0 ? 2 : 1;
  d.s_f = s_f;
  d.gamma = gamma;
  if (s_f < 0.0 || s_f >= d.sigma)
    throw OperatorError("dissipation_coefficient: s_f outside [0, sigma_{n_u})");
  double lam_sum = 0.0;
  for (double lam : cfl_per_axis) {
    if (lam <= 0.0) throw OperatorError("dissipation_coefficient: CFL must be positive");
    lam_sum += lam;
  }
  const double denom = std::pow(2.0, p + 1) * lam_sum;
  d.nu_p = s_f / denom;
  d.bound = d.sigma / denom;
  d.nu_gamma = gamma * d.nu_p;
  return d;
}

}  // namespace ws
