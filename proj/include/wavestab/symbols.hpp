#ifndef WAVESTAB_SYMBOLS_HPP
#define WAVESTAB_SYMBOLS_HPP

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ws {

enum class SchemeVariant { IME2, IME4, MonolithicUW, PredictorCorrectorUW };

/// Parameters of the amplification analysis shared by all variants.
struct VonNeumannConfig {
  SchemeVariant variant = SchemeVariant::IME2;
  int p = 2;
  double alpha2 = 0.25;
  double alpha4 = 1.0 / 12.0;
  double nu_p = 0.0;  // dissipation coefficient (UW variants)
  int n_u = 1;        // corrections (PC variant)

  double beta2() const { return 1.0 - 2.0 * alpha2; }
  double beta4() const { return alpha2 - 2.0 * alpha4 - 1.0 / 12.0; }
};

/// Fourier symbols of the discrete operators at one wavenumber.
struct SymbolPoint {
  std::vector<double> k;  // per-axis wavenumbers
  std::vector<double> h;  // per-axis spacings
  double c = 1.0;
  double dt = 0.0;
  double lambda2_sq = 0.0;  // -symbol of L_{2,h}
  double lambda4_sq = 0.0;  // -symbol of L_{4,h}
  double q_p = 0.0;         // symbol of Q_p (>= 0)
  double Lambda_hat = 0.0;  // alpha2*l4^2*dt^2 + alpha4*l2^4*dt^4
  double z = 0.0;           // dt^2
};

/// Amplification quadratic a^2 - 2 b a + c = 0 and its roots.
struct AmpQuad {
  double b = 1.0;
  double c_coef = 1.0;  // product of roots; 1 for dissipation-free schemes
  std::complex<double> root_plus;
  std::complex<double> root_minus;
  SchemeVariant scheme = SchemeVariant::IME2;

  double max_modulus() const {
    return std::max(std::abs(root_plus), std::abs(root_minus));
  }
};

SymbolPoint fourier_symbols(const std::vector<double>& k, const std::vector<double>& h,
                            double c, double dt, const VonNeumannConfig& cfg);

AmpQuad amplification(const SymbolPoint& sp, const VonNeumannConfig& cfg);

/// Unconditional-stability region of the dissipation-free IME schemes.
bool stability_region(int p, double alpha2, double alpha4 = 0.0);

struct UnconditionalReport {
  double max_modulus = 0.0;
  double argmax_kh = 0.0;
  double argmax_z = 0.0;
  bool passed = false;  // max <= 1 + tol
  double tol = 1e-12;
};

/// Scan max|a| over log-spaced z in [z_min, z_max] and kh over (0, pi].
UnconditionalReport verify_unconditional(const VonNeumannConfig& cfg,
                                         int n_z = 64, int n_k = 256,
                                         double z_min = 1e-4, double z_max = 1e4,
                                         double tol = 1e-12);

/// Normal-mode interface probe for the 1D overset model problem.
struct GksProbe {
  double lambda = 0.0;
  double alpha2 = 0.0;
  bool precondition_ok = false;     // (lambda<1, alpha2>=0) or (alpha2>=1/4)
  double max_deviation = 0.0;       // max ||a|-1| over the theta grid
  bool roots_on_unit_circle = false;
  bool no_interface_mode = false;   // |kappa_L+ kappa_R+| < 1 for sampled |a|>1
  double max_kappa_product = 0.0;
};

GksProbe gks_check(double lambda, double alpha2, int n_theta);

/// (kh, z, |a+|, |a-|) table rows for plotting stability surfaces.
struct SymbolSurfaceRow {
  double kh, z, mod_plus, mod_minus;
};
std::vector<SymbolSurfaceRow> symbol_surface(const VonNeumannConfig& cfg, double h, double c,
                                             int n_k, int n_z, double z_min, double z_max);

}  // namespace ws

#endif
