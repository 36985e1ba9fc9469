#include "wavestab/symbols.hpp"

#include <cmath>

namespace ws {

namespace {

using cplx = std::complex<double>;

void solve_quadratic(AmpQuad& q) {
  // a = b +- sqrt(b^2 - c), complex arithmetic
  const cplx disc = std::sqrt(cplx(q.b * q.b - q.c_coef, 0.0));
  q.root_plus = cplx(q.b, 0.0) + disc;
  q.root_minus = cplx(q.b, 0.0) - disc;
}

double predictor_b(const SymbolPoint& sp, const VonNeumannConfig& cfg) {
  const double z = sp.z;
  if (cfg.p == 2) {
    return (1.0 + (cfg.alpha2 - 0.5) * sp.lambda2_sq * z) /
           (1.0 + cfg.alpha2 * sp.lambda2_sq * z);
  }
  const double l4z = sp.lambda4_sq * z;
  const double l2z2 = sp.lambda2_sq * sp.lambda2_sq * z * z;
  return (1.0 - 0.5 * cfg.beta2() * l4z - 0.5 * cfg.beta4() * l2z2) /
         (1.0 + cfg.alpha2 * l4z + cfg.alpha4 * l2z2);
}

}  // namespace

SymbolPoint fourier_symbols(const std::vector<double>& k, const std::vector<double>& h,
                            double c, double dt, const VonNeumannConfig& cfg) {
  SymbolPoint sp;
  sp.k = k;
  sp.h = h;
  sp.c = c;
  sp.dt = dt;
  sp.z = dt * dt;
  for (size_t d = 0; d < k.size(); ++d) {
    const double sn = 4.0 * std::pow(std::sin(0.5 * k[d] * h[d]), 2);  // undivided
    const double s = sn / (h[d] * h[d]);
    sp.lambda2_sq += c * c * s;
    sp.lambda4_sq += c * c * s * (1.0 + h[d] * h[d] * s / 12.0);
    sp.q_p += (c / h[d]) * std::pow(sn, cfg.p / 2 + 1);
  }
  const double lam_p_sq = cfg.p == 2 ? sp.lambda2_sq : sp.lambda4_sq;
  sp.Lambda_hat = cfg.alpha2 * lam_p_sq * sp.z;
  if (cfg.p == 4)
    sp.Lambda_hat += cfg.alpha4 * sp.lambda2_sq * sp.lambda2_sq * sp.z * sp.z;
  return sp;
}

AmpQuad amplification(const SymbolPoint& sp, const VonNeumannConfig& cfg) {
  AmpQuad q;
  q.scheme = cfg.variant;
  switch (cfg.variant) {
    case SchemeVariant::IME2:
    case SchemeVariant::IME4:
      q.b = predictor_b(sp, cfg);
      q.c_coef = 1.0;
      break;
    case SchemeVariant::MonolithicUW: {
      const double diss = 0.5 * cfg.nu_p * sp.dt * sp.q_p;
      const double denom = 1.0 + sp.Lambda_hat + diss;
      // numerator of the dissipation-free b, scaled by the widened denominator
      const double num = predictor_b(sp, cfg) * (1.0 + sp.Lambda_hat);
      q.b = num / denom;
      q.c_coef = (1.0 + sp.Lambda_hat - diss) / denom;
      break;
    }
    case SchemeVariant::PredictorCorrectorUW: {
      const double r = 1.0 - 0.5 * cfg.nu_p * sp.dt * sp.q_p;
      const double rn = std::pow(r, cfg.n_u);
      q.b = rn * predictor_b(sp, cfg);
      q.c_coef = -1.0 + 2.0 * rn;
      break;
    }
  }
  solve_quadratic(q);
  return q;
}

bool stability_region(int p, double alpha2, double alpha4) {
  // small slack so points exactly on the region boundary are classified as
  // inside despite rounding in the 1/48-style constants
  constexpr double eps = 1e-12;
  if (p == 2) return alpha2 >= 0.25 - eps;
  if (alpha2 < 1.0 / 12.0 - eps) return false;
  double rhs = 0.25 * alpha2 - 1.0 / 48.0;
  if (alpha2 < 0.25) rhs += (8.0 / 9.0) * std::pow(0.25 - alpha2, 2);
  return alpha4 >= rhs - eps;
}

UnconditionalReport verify_unconditional(const VonNeumannConfig& cfg, int n_z, int n_k,
                                         double z_min, double z_max, double tol) {
  UnconditionalReport rep;
  rep.tol = tol;
  for (int iz = 0; iz < n_z; ++iz) {
    const double t = n_z == 1 ? 0.0 : double(iz) / (n_z - 1);
    const double z = z_min * std::pow(z_max / z_min, t);
    const double dt = std::sqrt(z);
    for (int ik = 1; ik <= n_k; ++ik) {
      const double kh = M_PI * ik / n_k;
      const SymbolPoint sp = fourier_symbols({kh}, {1.0}, 1.0, dt, cfg);
      const double mod = amplification(sp, cfg).max_modulus();
      if (mod > rep.max_modulus) {
        rep.max_modulus = mod;
        rep.argmax_kh = kh;
        rep.argmax_z = z;
      }
    }
  }
  rep.passed = rep.max_modulus <= 1.0 + tol;
  return rep;
}

GksProbe gks_check(double lambda, double alpha2, int n_theta) {
  GksProbe probe;
  probe.lambda = lambda;
  probe.alpha2 = alpha2;
  probe.precondition_ok =
      (lambda < 1.0 && alpha2 >= 0.0) || (lambda > 0.0 && alpha2 >= 0.25);

  // Lemma part: |kappa| = 1 forces |a| = 1.
  for (int i = 1; i <= n_theta; ++i) {
    const double theta = 2.0 * M_PI * i / (n_theta + 1);
    const double w = -4.0 * std::pow(std::sin(0.5 * theta), 2);  // kappa - 2 + 1/kappa
    const double b = (1.0 + (0.5 - alpha2) * lambda * lambda * w) /
                     (1.0 - alpha2 * lambda * lambda * w);
    const cplx disc = std::sqrt(cplx(b * b - 1.0, 0.0));
    probe.max_deviation = std::max(probe.max_deviation, std::abs(std::abs(cplx(b, 0.0) + disc) - 1.0));
    probe.max_deviation = std::max(probe.max_deviation, std::abs(std::abs(cplx(b, 0.0) - disc) - 1.0));
  }
  probe.roots_on_unit_circle = probe.max_deviation <= 1e-10;

  // Theorem part: for |a| > 1 the interface determinant kappa_L+ kappa_R+ = 1
  // cannot be satisfied. Left side explicit (alpha2 = 0), right side implicit.
  auto kappa_plus = [&](const cplx& a, double alpha) {
    const cplx weight = alpha * a + (1.0 - 2.0 * alpha) + alpha / a;
    const cplx w = (a - 2.0 + 1.0 / a) / (lambda * lambda * weight);
    const cplx bs = 1.0 + 0.5 * w;
    const cplx disc = std::sqrt(bs * bs - 1.0);
    const cplx k1 = bs + disc, k2 = bs - disc;
    return std::abs(k1) < std::abs(k2) ? k1 : k2;
  };
  probe.no_interface_mode = true;
  for (double rho : {1.0 + 1e-3, 1.05, 1.5, 5.0}) {
    for (int i = 0; i < 64; ++i) {
      const cplx a = std::polar(rho, 2.0 * M_PI * i / 64.0);
      const double prod = std::abs(kappa_plus(a, 0.0) * kappa_plus(a, alpha2));
      probe.max_kappa_product = std::max(probe.max_kappa_product, prod);
      if (prod >= 1.0) probe.no_interface_mode = false;
    }
  }
  return probe;
}

std::vector<SymbolSurfaceRow> symbol_surface(const VonNeumannConfig& cfg, double h, double c,
                                             int n_k, int n_z, double z_min, double z_max) {
  std::vector<SymbolSurfaceRow> rows;
  rows.reserve(static_cast<size_t>(n_k) * n_z);
  for (int iz = 0; iz < n_z; ++iz) {
    const double t = n_z == 1 ? 0.0 : double(iz) / (n_z - 1);
    const double z = z_min * std::pow(z_max / z_min, t);
    const double dt = std::sqrt(z);
    for (int ik = 1; ik <= n_k; ++ik) {
      const double kh = M_PI * ik / n_k;
      const SymbolPoint sp = fourier_symbols({kh / h}, {h}, c, dt, cfg);
      const AmpQuad q = amplification(sp, cfg);
      rows.push_back({kh, z, std::abs(q.root_plus), std::abs(q.root_minus)});
    }
  }
  return rows;
}

}  // namespace ws
