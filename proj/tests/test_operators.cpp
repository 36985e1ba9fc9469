#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "wavestab/operators.hpp"

using namespace ws;

TEST_CASE("laplacian stencils") {
  const Eigen::VectorXd s2 = laplacian_stencil(2, 0.5, 2.0);
  REQUIRE(s2.size() == 3);
  CHECK(s2[0] == doctest::Approx(4.0 / 0.25));
  CHECK(s2[1] == doctest::Approx(-8.0 / 0.25));
  CHECK(s2[2] == doctest::Approx(4.0 / 0.25));

  const Eigen::VectorXd s4 = laplacian_stencil(4, 1.0, 1.0);
  REQUIRE(s4.size() == 5);
  CHECK(s4[0] == doctest::Approx(-1.0 / 12.0));
  CHECK(s4[1] == doctest::Approx(4.0 / 3.0));
  CHECK(s4[2] == doctest::Approx(-5.0 / 2.0));
  CHECK(s4[3] == doctest::Approx(4.0 / 3.0));
  CHECK(s4[4] == doctest::Approx(-1.0 / 12.0));
}

TEST_CASE("laplacian of constants and sawtooth mode") {
  const int n = 16;
  Eigen::VectorXd c = Eigen::VectorXd::Constant(n, 3.25);
  CHECK(apply_L(2, c, 0.1, 2.0).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(apply_L(4, c, 0.1, 2.0).lpNorm<Eigen::Infinity>() < 1e-12);
  // scale c^4/h^4 ~ 1e5: constants are annihilated up to roundoff of that size
  CHECK(apply_L2sq(c, 0.1, 2.0).lpNorm<Eigen::Infinity>() < 1e-9);

  // highest mode (-1)^j: eigenvalues -4 (p=2) and -16/3 (p=4) at h=c=1
  Eigen::VectorXd saw(n);
  for (int j = 0; j < n; ++j) saw[j] = (j % 2 == 0) ? 1.0 : -1.0;
  CHECK((apply_L(2, saw, 1.0, 1.0) + 4.0 * saw).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK((apply_L(4, saw, 1.0, 1.0) + (16.0 / 3.0) * saw).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("squared laplacian equals composition") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd u(16);
  for (int j = 0; j < 16; ++j) u[j] = dist(rng);
  const Eigen::VectorXd once = apply_L(2, u, 0.25, 1.5);
  const Eigen::VectorXd twice = apply_L(2, once, 0.25, 1.5);
  CHECK((apply_L2sq(u, 0.25, 1.5) - twice).lpNorm<Eigen::Infinity>() <
        1e-12 * twice.lpNorm<Eigen::Infinity>());

  // cubics are annihilated
  Eigen::VectorXd cubic(16);
  for (int j = 0; j < 16; ++j) {
    const double x = j * 0.1;
    cubic[j] = 1.0 + x - 2.0 * x * x + 0.5 * x * x * x;
  }
  Eigen::VectorXd out(16);
  apply_interior(laplacian2_squared_stencil(0.1, 1.0), cubic, 2, 14, out);
  for (int j = 2; j < 14; ++j) CHECK(std::abs(out[j]) < 1e-7);
}

TEST_CASE("dissipation stencil and kernel") {
  const Eigen::VectorXd q2 = dissipation_stencil(2, 1.0, 1.0);
  REQUIRE(q2.size() == 5);
  CHECK(q2[0] == doctest::Approx(1.0));
  CHECK(q2[1] == doctest::Approx(-4.0));
  CHECK(q2[2] == doctest::Approx(6.0));
  CHECK(q2[3] == doctest::Approx(-4.0));
  CHECK(q2[4] == doctest::Approx(1.0));
  CHECK(std::abs(q2.sum()) < 1e-13);

  const Eigen::VectorXd q4 = dissipation_stencil(4, 0.5, 2.0);
  CHECK(q4.size() == 7);
  CHECK(std::abs(q4.sum()) < 1e-12);

  const int n = 20;
  Eigen::VectorXd lin(n);
  for (int j = 0; j < n; ++j) lin[j] = 2.0 + 0.3 * j;
  // interior only: the linear profile is not periodic
  Eigen::VectorXd out(n);
  apply_interior(q2, lin, 2, n - 2, out);
  for (int j = 2; j < n - 2; ++j) CHECK(std::abs(out[j]) < 1e-12);

  // Kronecker delta reproduces the stencil
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
  delta[10] = 1.0;
  const Eigen::VectorXd qd = apply_Q(2, delta, 1.0, 1.0);
  CHECK(qd[10] == doctest::Approx(6.0));
  CHECK(qd[9] == doctest::Approx(-4.0));
  CHECK(qd[11] == doctest::Approx(-4.0));
  CHECK(qd[8] == doctest::Approx(1.0));
  CHECK(qd[12] == doctest::Approx(1.0));
}

TEST_CASE("halo check") {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(6);
  Eigen::VectorXd out(6);
  CHECK_THROWS_AS(apply_interior(dissipation_stencil(2, 1.0, 1.0), u, 1, 5, out),
                  OperatorError);
}

TEST_CASE("dissipation coefficient") {
  DissipationParams d = dissipation_coefficient(2, 1, 0.9, {0.9});
  CHECK(d.nu_p == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(d.bound == doctest::Approx(1.0 / 7.2).epsilon(1e-14));
  CHECK(d.sigma == 1);

  d = dissipation_coefficient(2, 2, 1.9, {0.9});
  CHECK(d.nu_p == doctest::Approx(1.9 / 7.2).epsilon(1e-12));
  CHECK(d.bound == doctest::Approx(2.0 / 7.2).epsilon(1e-12));
  CHECK(d.sigma == 2);
  CHECK(d.nu_p < d.bound);

  d = dissipation_coefficient(2, 1, 0.0, {0.5});
  CHECK(d.nu_p == 0.0);

  CHECK_THROWS_AS(dissipation_coefficient(2, 1, 1.0, {0.9}), OperatorError);
  CHECK_THROWS_AS(dissipation_coefficient(2, 2, 2.0, {0.9}), OperatorError);

  d = dissipation_coefficient(4, 2, 1.9, {0.4, 0.5}, 0.3);
  CHECK(d.nu_gamma == doctest::Approx(0.3 * d.nu_p).epsilon(1e-14));
  CHECK(d.nu_gamma <= d.nu_p);
  CHECK(d.nu_p < d.bound);
}

TEST_CASE("observed order of accuracy") {
  for (int p : {2, 4}) {
    double prev_err = 0.0, order = 0.0;
    for (int n : {32, 64, 128}) {
      const double h = 1.0 / n;
      Eigen::VectorXd u(n), exact(n);
      for (int j = 0; j < n; ++j) {
        const double x = j * h;
        u[j] = std::sin(2 * M_PI * x);
        exact[j] = -4 * M_PI * M_PI * std::sin(2 * M_PI * x);
      }
      const double err = (apply_L(p, u, h, 1.0) - exact).lpNorm<Eigen::Infinity>();
      if (prev_err > 0.0) order = std::log2(prev_err / err);
      prev_err = err;
    }
    CHECK(order >= p - 0.2);
  }
}

TEST_CASE("dissipation symbol is nonnegative") {
  for (int p : {2, 4}) {
    const Eigen::VectorXd q = dissipation_stencil(p, 1.0, 1.0);
    const int r = static_cast<int>(q.size()) / 2;
    for (int i = 0; i <= 512; ++i) {
      const double theta = M_PI * i / 512;
      std::complex<double> sym = 0.0;
      for (int t = -r; t <= r; ++t)
        sym += q[t + r] * std::exp(std::complex<double>(0.0, t * theta));
      CHECK(std::abs(sym.imag()) < 1e-12);
      CHECK(sym.real() >= -1e-12);
      // closed form (4 sin^2(theta/2))^{p/2+1}
      const double expect = std::pow(4.0 * std::pow(std::sin(0.5 * theta), 2), p / 2 + 1);
      CHECK(sym.real() == doctest::Approx(expect).epsilon(1e-10));
    }
  }
}

TEST_CASE("implicit operators preserve constants") {
  const int n = 12;
  const double dt = 0.3;
  Eigen::MatrixXd a2 = Eigen::MatrixXd::Identity(n, n) -
                       0.25 * dt * dt * periodic_matrix(laplacian_stencil(2, 0.1, 1.0), n);
  Eigen::MatrixXd a4 = Eigen::MatrixXd::Identity(n, n) -
                       0.25 * dt * dt * periodic_matrix(laplacian_stencil(4, 0.1, 1.0), n) +
                       (1.0 / 12.0) * std::pow(dt, 4) *
                           periodic_matrix(laplacian2_squared_stencil(0.1, 1.0), n);
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(n, 2.5);
  CHECK((a2 * c - c).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK((a4 * c - c).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("2d laplacian additivity over axes") {
  const int nx = 8, ny = 8;
  Eigen::MatrixXd u(nx, ny);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) u(i, j) = ((i + j) % 2 == 0) ? 1.0 : -1.0;
  // checkerboard: per-axis sawtooth, eigenvalue -4 per axis at h=c=1
  const Eigen::MatrixXd lu = apply_L_2d(2, u, 1.0, 1.0, 1.0);
  CHECK((lu + 8.0 * u).lpNorm<Eigen::Infinity>() < 1e-12);
}
