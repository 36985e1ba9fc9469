#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "wavestab/stepping.hpp"
#include "wavestab/symbols.hpp"

using namespace ws;

namespace {

SchemeConfig spie2_cfg() {
  SchemeConfig cfg;
  cfg.p = 2;
  cfg.left_mode = TimeMode::Explicit;
  cfg.right_mode = TimeMode::Implicit;
  cfg.dissipation = DissipationMode::PredictorCorrector;
  cfg.gamma = 0.3;
  cfg.n_u = 1;
  cfg.s_f = 0.9;
  cfg.cfl = 0.9;
  return cfg;
}

Eigen::VectorXd random_constrained(const OversetStepper& st, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd u(st.size());
  for (int i = 0; i < st.size(); ++i) u[i] = st.is_active(i) ? dist(rng) : 0.0;
  st.apply_constraints(u);
  return u;
}

}  // namespace

TEST_CASE("dt policy follows the explicit side") {
  const OversetGrid1D g = build_overset(0.5, 10, 2);  // h_L = 0.025, h_R = 0.05
  SchemeConfig cfg = spie2_cfg();
  CHECK(select_dt(g, cfg) == doctest::Approx(0.9 * 0.025));
  cfg.left_mode = TimeMode::Implicit;  // fully implicit: smallest overall
  CHECK(select_dt(g, cfg) == doctest::Approx(0.9 * 0.025));
  cfg.left_mode = cfg.right_mode = TimeMode::Explicit;
  CHECK(select_dt(g, cfg) == doctest::Approx(0.9 * 0.025));
  // explicit side coarser than the implicit one
  const OversetGrid1D g2 = build_overset(2.0, 10, 2);  // h_L = 0.1
  cfg = spie2_cfg();
  CHECK(select_dt(g2, cfg) == doctest::Approx(0.9 * 0.1));
}

TEST_CASE("solve_implicit basics") {
  const Eigen::MatrixXd i = Eigen::MatrixXd::Identity(8, 8);
  Eigen::VectorXd rhs(8);
  rhs.setLinSpaced(8, -1.0, 2.5);
  CHECK((solve_implicit(i, rhs) - rhs).lpNorm<Eigen::Infinity>() == 0.0);

  const int n = 50;
  const double dt = 0.4;
  const Eigen::MatrixXd a2 =
      Eigen::MatrixXd::Identity(n, n) -
      0.25 * dt * dt * periodic_matrix(laplacian_stencil(2, 0.05, 1.0), n);
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(n, 4.0);
  CHECK((solve_implicit(a2, c) - c).lpNorm<Eigen::Infinity>() < 1e-9);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd r(n);
  for (int j = 0; j < n; ++j) r[j] = dist(rng);
  const Eigen::VectorXd x = solve_implicit(a2, r);
  CHECK((a2 * x - r).lpNorm<Eigen::Infinity>() <= 1e-11 * std::max(1.0, r.lpNorm<Eigen::Infinity>()));
}

TEST_CASE("zero data stays zero") {
  OversetStepper st(build_overset(1.0, 10, 2), spie2_cfg());
  auto zero = [](double) { return 0.0; };
  FieldState s = st.first_step(zero, zero);
  CHECK(s.u_now.lpNorm<Eigen::Infinity>() == 0.0);
  s = st.advance(s);
  CHECK(s.u_now.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("constant initial data is reproduced by the first step") {
  // periodic single-grid check: constants are fixed points of A_p and L
  SchemeConfig cfg;
  cfg.p = 2;
  cfg.alpha2 = 0.25;
  cfg.left_mode = cfg.right_mode = TimeMode::Implicit;
  PeriodicStepper st(16, 0.1, cfg, 0.3, 0.0);
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(16, 1.75);
  CHECK((st.advance(c, c) - c).lpNorm<Eigen::Infinity>() < 1e-11);
}

TEST_CASE("all-explicit dissipation-free step equals leapfrog") {
  SchemeConfig cfg = spie2_cfg();
  cfg.left_mode = cfg.right_mode = TimeMode::Explicit;
  cfg.dissipation = DissipationMode::None;
  OversetStepper st(build_overset(1.0, 10, 2), cfg);
  const Eigen::VectorXd u0 = random_constrained(st, 11);
  const Eigen::VectorXd u1 = random_constrained(st, 12);
  FieldState s;
  s.u_prev = u0;
  s.u_now = u1;
  s.step = 1;
  s.dt = st.dt();
  const FieldState s2 = st.advance(s);

  // manual leapfrog on each grid with identical constraint handling
  const OversetGrid1D& g = st.grid();
  Eigen::VectorXd manual = Eigen::VectorXd::Zero(st.size());
  for (Side side : {Side::Left, Side::Right}) {
    const ComponentGrid1D& cg = g.grid(side);
    const Eigen::VectorXd lp = laplacian_stencil(2, cg.h, cfg.c);
    for (int j = cg.active_begin(); j < cg.active_end(); ++j) {
      double acc = 2.0 * u1[st.index(side, j)] - u0[st.index(side, j)];
      for (int t = -1; t <= 1; ++t)
        acc += st.dt() * st.dt() * lp[t + 1] * u1[st.index(side, j + t)];
      manual[st.index(side, j)] = acc;
    }
  }
  st.apply_constraints(manual);
  CHECK(st.active_max_norm(s2.u_now - manual) < 1e-12);
}

TEST_CASE("spie run stays bounded on a stable cell") {
  OversetStepper st(build_overset(0.5, 10, 2), spie2_cfg());
  FieldState s;
  s.u_prev = random_constrained(st, 21);
  s.u_now = random_constrained(st, 22);
  s.step = 1;
  s.dt = st.dt();
  const double init = std::max(st.active_max_norm(s.u_prev), st.active_max_norm(s.u_now));
  for (int n = 0; n < 2000; ++n) s = st.advance(s);
  CHECK(st.active_max_norm(s.u_now) <= 10.0 * init);
}

TEST_CASE("monolithic dissipation off equals plain IME") {
  SchemeConfig cfg;
  cfg.p = 2;
  cfg.left_mode = cfg.right_mode = TimeMode::Implicit;
  cfg.dissipation = DissipationMode::None;
  PeriodicStepper plain(24, 0.1, cfg, 0.35, 0.0);
  cfg.dissipation = DissipationMode::Monolithic;
  PeriodicStepper mono(24, 0.1, cfg, 0.35, 0.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd a(24), b(24);
  for (int j = 0; j < 24; ++j) {
    a[j] = dist(rng);
    b[j] = dist(rng);
  }
  CHECK((plain.advance(a, b) - mono.advance(a, b)).lpNorm<Eigen::Infinity>() < 1e-13);
}

TEST_CASE("monolithic dissipation is stable at large CFL") {
  SchemeConfig cfg;
  cfg.p = 2;
  cfg.alpha2 = 0.25;
  cfg.left_mode = cfg.right_mode = TimeMode::Implicit;
  cfg.dissipation = DissipationMode::Monolithic;
  const double h = 0.1, dt = 10.0 * h;  // CFL 10
  PeriodicStepper st(24, h, cfg, dt, 0.05);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd prev(24), now(24);
  for (int j = 0; j < 24; ++j) {
    prev[j] = dist(rng);
    now[j] = dist(rng);
  }
  const double init = std::max(prev.lpNorm<Eigen::Infinity>(), now.lpNorm<Eigen::Infinity>());
  for (int n = 0; n < 1000; ++n) {
    Eigen::VectorXd next = st.advance(now, prev);
    prev = now;
    now = next;
  }
  // the k=0 mode may drift linearly in time; remove the mean before comparing
  now.array() -= now.mean();
  CHECK(now.lpNorm<Eigen::Infinity>() <= 10.0 * init);
}

TEST_CASE("single mode amplification matches the symbol roots") {
  for (SchemeVariant variant :
       {SchemeVariant::IME2, SchemeVariant::MonolithicUW, SchemeVariant::PredictorCorrectorUW}) {
    SchemeConfig cfg;
    cfg.p = 2;
    cfg.alpha2 = 0.25;
    cfg.left_mode = cfg.right_mode = TimeMode::Implicit;
    cfg.n_u = 2;
    const double nu = variant == SchemeVariant::IME2 ? 0.0 : 0.04;
    cfg.dissipation = variant == SchemeVariant::IME2 ? DissipationMode::None
                      : variant == SchemeVariant::MonolithicUW
                          ? DissipationMode::Monolithic
                          : DissipationMode::PredictorCorrector;
    const int n = 32;
    const double h = 1.0 / n, dt = 2.0 * h;
    PeriodicStepper st(n, h, cfg, dt, nu);

    VonNeumannConfig vc;
    vc.variant = variant;
    vc.p = 2;
    vc.alpha2 = 0.25;
    vc.nu_p = nu;
    vc.n_u = cfg.n_u;
    const int m = 5;
    const double k = 2.0 * M_PI * m;
    const SymbolPoint sp = fourier_symbols({k}, {h}, 1.0, dt, vc);
    const AmpQuad q = amplification(sp, vc);
    const std::complex<double> a = q.root_plus;

    // complex mode stepped as (re, im) pair: U^n = Re/Im(a^n e^{ikx})
    Eigen::VectorXd re_prev(n), im_prev(n), re_now(n), im_now(n);
    for (int j = 0; j < n; ++j) {
      const std::complex<double> e = std::exp(std::complex<double>(0.0, k * j * h));
      const std::complex<double> ae = a * e;
      re_prev[j] = e.real();
      im_prev[j] = e.imag();
      re_now[j] = ae.real();
      im_now[j] = ae.imag();
    }
    const Eigen::VectorXd re_next = st.advance(re_now, re_prev);
    const Eigen::VectorXd im_next = st.advance(im_now, im_prev);
    double dev = 0.0;
    for (int j = 0; j < n; ++j) {
      const std::complex<double> got(re_next[j], im_next[j]);
      const std::complex<double> want =
          a * a * std::exp(std::complex<double>(0.0, k * j * h));
      dev = std::max(dev, std::abs(got - want));
    }
    CHECK(dev < 1e-10);
  }
}

TEST_CASE("predictor-corrector equals its closed form") {
  SchemeConfig cfg;
  cfg.p = 2;
  cfg.alpha2 = 0.25;
  cfg.left_mode = cfg.right_mode = TimeMode::Implicit;
  cfg.dissipation = DissipationMode::PredictorCorrector;
  cfg.n_u = 3;
  const int n = 20;
  const double h = 0.05, dt = 0.1, nu = 0.03;
  PeriodicStepper pc(n, h, cfg, dt, nu);
  cfg.dissipation = DissipationMode::None;
  PeriodicStepper pred(n, h, cfg, dt, 0.0);

  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd prev(n), now(n);
  for (int j = 0; j < n; ++j) {
    prev[j] = dist(rng);
    now[j] = dist(rng);
  }
  const Eigen::VectorXd u0 = pred.advance(now, prev);  // predictor U^(0)
  const Eigen::MatrixXd r = Eigen::MatrixXd::Identity(n, n) -
                            0.5 * nu * dt * periodic_matrix(dissipation_stencil(2, h, 1.0), n);
  Eigen::MatrixXd rn = Eigen::MatrixXd::Identity(n, n);
  for (int k = 0; k < cfg.n_u; ++k) rn = r * rn;
  const Eigen::VectorXd closed =
      rn * u0 + (Eigen::MatrixXd::Identity(n, n) - rn) * prev;
  CHECK((pc.advance(now, prev) - closed).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("time reversal of the dissipation-free scheme") {
  SchemeConfig cfg = spie2_cfg();
  cfg.dissipation = DissipationMode::None;
  OversetStepper st(build_overset(0.8, 10, 2), cfg);
  const Eigen::VectorXd u0 = random_constrained(st, 31);
  const Eigen::VectorXd u1 = random_constrained(st, 32);
  FieldState s;
  s.u_prev = u0;
  s.u_now = u1;
  s.dt = st.dt();
  const int n = 20;
  for (int i = 0; i < n; ++i) s = st.advance(s);
  // symmetric scheme: swapping the two levels runs the recurrence backwards
  FieldState back;
  back.u_prev = s.u_now;
  back.u_now = s.u_prev;
  back.dt = st.dt();
  for (int i = 0; i < n; ++i) back = st.advance(back);
  const double scale = std::max(1.0, st.active_max_norm(u0));
  CHECK(st.active_max_norm(back.u_now - u0) <= 1e-9 * scale);
}

TEST_CASE("per-mode energy conservation, explicit periodic CFL < 1") {
  SchemeConfig cfg;
  cfg.p = 2;
  cfg.alpha2 = 0.0;
  cfg.left_mode = cfg.right_mode = TimeMode::Explicit;
  cfg.dissipation = DissipationMode::None;
  const int n = 32;
  const double h = 1.0 / n, dt = 0.9 * h;
  PeriodicStepper st(n, h, cfg, dt, 0.0);
  const int m = 7;
  const double k = 2.0 * M_PI * m;
  // amplitude of mode m tracked through the discrete Fourier coefficient
  VonNeumannConfig vc;
  vc.variant = SchemeVariant::IME2;
  vc.alpha2 = 0.0;
  const SymbolPoint sp = fourier_symbols({k}, {h}, 1.0, dt, vc);
  const AmpQuad q = amplification(sp, vc);
  const std::complex<double> a = q.root_plus;
  CHECK(std::abs(std::abs(a) - 1.0) < 1e-14);

  Eigen::VectorXd re_prev(n), im_prev(n), re_now(n), im_now(n);
  for (int j = 0; j < n; ++j) {
    const std::complex<double> e = std::exp(std::complex<double>(0.0, k * j * h));
    re_prev[j] = e.real();
    im_prev[j] = e.imag();
    re_now[j] = (a * e).real();
    im_now[j] = (a * e).imag();
  }
  for (int s = 0; s < 1000; ++s) {
    Eigen::VectorXd rn = st.advance(re_now, re_prev);
    Eigen::VectorXd in = st.advance(im_now, im_prev);
    re_prev = re_now;
    im_prev = im_now;
    re_now = rn;
    im_now = in;
  }
  double amp = 0.0;
  for (int j = 0; j < n; ++j)
    amp = std::max(amp, std::hypot(re_now[j], im_now[j]));
  CHECK(amp == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("convergence orders") {
  SchemeConfig cfg = spie2_cfg();
  auto recs = run_convergence(2, 0.8, cfg, 0.6, 3);
  REQUIRE(recs.size() == 3);
  CHECK(recs[2].observed_order >= 1.8);
  CHECK(recs[2].observed_order <= 2.2);

  // m = 0: zero data, zero error
  recs = run_convergence(0, 0.8, cfg, 0.6, 1);
  CHECK(recs[0].error == 0.0);
}

TEST_CASE("stepper rejects mismatched configs") {
  SchemeConfig cfg = spie2_cfg();
  cfg.dissipation = DissipationMode::Monolithic;
  CHECK_THROWS_AS(OversetStepper(build_overset(1.0, 10, 2), cfg), SteppingError);
  cfg = spie2_cfg();
  cfg.p = 4;
  CHECK_THROWS_AS(OversetStepper(build_overset(1.0, 10, 2), cfg), SteppingError);
}
