// wavestab: convergence studies, stability sweeps, symbol/region evaluation,
// GKS probes, and compression verification for overset-grid wave schemes.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wavestab/grid.hpp"
#include "wavestab/matstab.hpp"
#include "wavestab/operators.hpp"
#include "wavestab/stepping.hpp"
#include "wavestab/symbols.hpp"

namespace {

constexpr const char* kVersion = "0.3.0";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct SchemeName {
  ws::SchemeCase scheme;
  int p;
};

SchemeName parse_scheme(const std::string& s) {
  if (s == "EME2") return {ws::SchemeCase::EME, 2};
  if (s == "EME4") return {ws::SchemeCase::EME, 4};
  if (s == "IME2") return {ws::SchemeCase::IME, 2};
  if (s == "IME4") return {ws::SchemeCase::IME, 4};
  if (s == "SPIE2") return {ws::SchemeCase::SPIE, 2};
  if (s == "SPIE4") return {ws::SchemeCase::SPIE, 4};
  throw CLI::ValidationError("--scheme", "expected one of EME2, EME4, IME2, IME4, SPIE2, SPIE4");
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::string token;
  std::istringstream in(s);
  while (std::getline(in, token, ',')) out.push_back(std::stod(token));
  if (out.empty()) throw CLI::ValidationError("list", "empty value list");
  return out;
}

void write_sidecar(const std::string& path, const nlohmann::json& cfg) {
  nlohmann::json j = cfg;
  j["tool"] = "wavestab";
  j["version"] = kVersion;
  std::ofstream f(path);
  f << j.dump(2) << "\n";
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw CLI::ValidationError("--out", "cannot open output file " + path);
  return f;
}

nlohmann::json scheme_json(const ws::SchemeConfig& c) {
  return {{"p", c.p},
          {"alpha2", c.alpha2},
          {"alpha4", c.alpha4},
          {"left_mode", c.left_mode == ws::TimeMode::Implicit ? "implicit" : "explicit"},
          {"right_mode", c.right_mode == ws::TimeMode::Implicit ? "implicit" : "explicit"},
          {"gamma", c.gamma},
          {"s_f", c.s_f},
          {"n_u", c.n_u},
          {"c", c.c},
          {"cfl", c.cfl}};
}

// JSON config file: top-level keys override the same-named flags.
template <class T>
void maybe(const nlohmann::json& j, const char* key, T& var) {
  if (j.contains(key)) var = j.at(key).get<T>();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"overset-grid wave equation stability toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string scheme_name = "EME2";
  std::string out = "";
  std::string config_path;
  std::string gamma_spec;
  double delta = 1.0, delta_min = 0.25, delta_max = 2.0;
  int n_delta = 101, n_right = 10;
  int n_u = -1;       // -1: scheme-case default
  double s_f = -1.0;  // same
  double cfl = -1.0;  // same
  double gamma_scalar = 1.0;
  double tol_a = 1e-8;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  int mode = 2, levels = 3, n_steps = 20;
  double t_final = 0.6;
  double alpha2 = 0.25, alpha4 = 1.0 / 12.0;
  double lambda = 0.9;
  int n_theta = 10000, n_k = 256, n_z = 64;
  double z_min = 1e-4, z_max = 1e4;
  double nu_p = 0.0;
  std::string variant_name = "IME2";
  std::uint64_t seed = 12345;
  if (const char* env = std::getenv("WAVESTAB_SEED")) seed = std::strtoull(env, nullptr, 10);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scheme", scheme_name, "scheme case: EME2|EME4|IME2|IME4|SPIE2|SPIE4");
    sub->add_option("--out", out, "output path prefix (default: subcommand name)");
    sub->add_option("--config", config_path, "JSON config file; keys override flags");
    sub->add_option("--alpha2", alpha2, "implicit weight alpha_2");
    sub->add_option("--alpha4", alpha4, "implicit weight alpha_4 (p=4)");
    sub->add_option("--nu", n_u, "dissipation corrections n_u (default per scheme case)");
    sub->add_option("--sf", s_f, "dissipation safety factor s_f (default per scheme case)");
    sub->add_option("--cfl", cfl, "CFL number (default per scheme case)");
    sub->add_option("--nr", n_right, "right-grid cell count N_R");
    sub->add_option("--seed", seed, "RNG seed (env WAVESTAB_SEED)");
  };

  CLI::App* sweep = app.add_subcommand("sweep", "gamma-delta matrix stability sweep");
  add_common(sweep);
  sweep->add_option("--gamma", gamma_spec, "comma-separated gamma list (default 0,0.1,...,1)");
  sweep->add_option("--delta-min", delta_min, "smallest spacing ratio h_L/h_R");
  sweep->add_option("--delta-max", delta_max, "largest spacing ratio");
  sweep->add_option("--ndelta", n_delta, "number of ratios");
  sweep->add_option("--tol", tol_a, "instability tolerance on |a|");
  sweep->add_option("--jobs", jobs, "worker threads (default: available cores)");

  CLI::App* converge = app.add_subcommand("converge", "refinement study vs standing-mode solution");
  add_common(converge);
  converge->add_option("--mode", mode, "standing-mode number m");
  converge->add_option("--levels", levels, "number of refinement levels");
  converge->add_option("--delta", delta, "spacing ratio h_L/h_R");
  converge->add_option("--tfinal", t_final, "final time");
  converge->add_option("--gamma", gamma_scalar, "dissipation scale");

  CLI::App* symbol = app.add_subcommand("symbol", "amplification surface |a|(kh, z)");
  symbol->add_option("--variant", variant_name, "IME2|IME4|MonolithicUW|PC");
  symbol->add_option("--out", out, "output path prefix");
  symbol->add_option("--alpha2", alpha2, "implicit weight alpha_2");
  symbol->add_option("--alpha4", alpha4, "implicit weight alpha_4");
  symbol->add_option("--nup", nu_p, "dissipation coefficient nu_p");
  symbol->add_option("--nu", n_u, "corrections n_u (PC variant)");
  symbol->add_option("--nk", n_k, "wavenumber samples over (0, pi]");
  symbol->add_option("--nz", n_z, "log-spaced z samples");
  symbol->add_option("--zmin", z_min, "smallest z = dt^2");
  symbol->add_option("--zmax", z_max, "largest z = dt^2");

  CLI::App* region = app.add_subcommand("region", "unconditional-stability region predicate");
  int region_p = 4;
  region->add_option("--p", region_p, "scheme order (2 or 4)");
  region->add_option("--alpha2", alpha2, "implicit weight alpha_2");
  region->add_option("--alpha4", alpha4, "implicit weight alpha_4");
  region->add_option("--out", out, "output path prefix");

  CLI::App* gks = app.add_subcommand("gks", "normal-mode interface probe");
  gks->add_option("--lambda", lambda, "CFL number c dt / h");
  gks->add_option("--alpha2", alpha2, "implicit weight alpha_2");
  gks->add_option("--ntheta", n_theta, "theta grid size for the unit-circle check");
  gks->add_option("--out", out, "output path prefix");

  CLI::App* verify = app.add_subcommand("verify", "stepper vs compressed-recurrence deviation");
  add_common(verify);
  verify->add_option("--delta", delta, "spacing ratio h_L/h_R");
  verify->add_option("--gamma", gamma_scalar, "dissipation scale");
  verify->add_option("--steps", n_steps, "number of steps");

  CLI::App* modes = app.add_subcommand("modes", "eigenvalue scatter for one (delta, gamma)");
  add_common(modes);
  modes->add_option("--delta", delta, "spacing ratio h_L/h_R");
  modes->add_option("--gamma", gamma_scalar, "dissipation scale");
  modes->add_option("--tol", tol_a, "instability tolerance on |a|");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 2;
  }

  try {
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw CLI::ValidationError("--config", "cannot read " + config_path);
      nlohmann::json j = nlohmann::json::parse(f);
      maybe(j, "scheme", scheme_name);
      maybe(j, "out", out);
      maybe(j, "gamma", gamma_spec);
      maybe(j, "delta", delta);
      maybe(j, "delta_min", delta_min);
      maybe(j, "delta_max", delta_max);
      maybe(j, "n_delta", n_delta);
      maybe(j, "nr", n_right);
      maybe(j, "n_u", n_u);
      maybe(j, "s_f", s_f);
      maybe(j, "cfl", cfl);
      maybe(j, "alpha2", alpha2);
      maybe(j, "alpha4", alpha4);
      maybe(j, "tol", tol_a);
      maybe(j, "jobs", jobs);
      maybe(j, "mode", mode);
      maybe(j, "levels", levels);
      maybe(j, "tfinal", t_final);
      maybe(j, "steps", n_steps);
      maybe(j, "seed", seed);
    }

    const SchemeName sn = parse_scheme(scheme_name);
    ws::SchemeConfig cfg = ws::make_sweep_config(sn.scheme, sn.p);
    cfg.alpha2 = alpha2;
    cfg.alpha4 = alpha4;
    if (n_u > 0) {
      cfg.n_u = n_u;
      if (s_f < 0.0) cfg.s_f = 0.95 * (cfg.n_u % 2 == 0 ? 2.0 : 1.0);
    }
    if (s_f >= 0.0) cfg.s_f = s_f;
    if (cfl > 0.0) cfg.cfl = cfl;
    if (n_right < 4) throw CLI::ValidationError("--nr", "N_R must be at least 4");

    if (*sweep) {
      if (out.empty()) out = "sweep";
      ws::SweepPlan plan;
      plan.delta_min = delta_min;
      plan.delta_max = delta_max;
      plan.n_delta = n_delta;
      if (gamma_spec.empty())
        for (int i = 0; i <= 10; ++i) plan.gamma_values.push_back(0.1 * i);
      else
        plan.gamma_values = parse_list(gamma_spec);
      if (plan.n_delta < 1 || plan.delta_min <= 0.0 || plan.delta_max < plan.delta_min)
        throw CLI::ValidationError("--ndelta", "invalid sweep plan");

      const ws::SweepSummary summary =
          ws::run_sweep(plan, sn.scheme, cfg, n_right, tol_a, jobs);

      auto cells = open_csv(out + "_cells.csv");
      cells << "# scheme,p,delta=hL/hR,gamma,n_u,s_f,stable,max|a|,n_eigs_above_1+tol\n";
      cells << "scheme,p,delta,gamma,n_u,s_f,stable,max_modulus,unstable_count\n";
      int failed = 0;
      for (const ws::SweepResult& r : summary.cells) {
        if (!r.error.empty()) ++failed;
        cells << ws::to_string(r.scheme) << ',' << r.p << ',' << fmt(r.delta) << ','
              << fmt(r.gamma) << ',' << r.n_u << ',' << fmt(r.s_f) << ','
              << (r.stable ? 1 : 0) << ',' << fmt(r.max_modulus) << ','
              << r.unstable_count << '\n';
      }
      auto agg = open_csv(out + "_aggregate.csv");
      agg << "# unstable grid count per gamma over " << n_delta << " ratios\n";
      agg << "gamma,n_unstable_grids\n";
      for (const auto& [g, n] : summary.unstable_per_gamma)
        agg << fmt(g) << ',' << n << '\n';
      nlohmann::json side = scheme_json(cfg);
      side["subcommand"] = "sweep";
      side["scheme"] = scheme_name;
      side["delta_min"] = delta_min;
      side["delta_max"] = delta_max;
      side["n_delta"] = n_delta;
      side["n_right"] = n_right;
      side["gamma_values"] = plan.gamma_values;
      side["tol_a"] = tol_a;
      write_sidecar(out + ".json", side);
      for (const auto& [g, n] : summary.unstable_per_gamma)
        std::cout << "gamma " << fmt(g) << ": " << n << " unstable of " << n_delta << "\n";
      if (failed > 0) {
        std::cerr << failed << " sweep cells failed\n";
        return 1;
      }
      return 0;
    }

    if (*converge) {
      if (out.empty()) out = "converge";
      cfg.gamma = gamma_scalar;
      const std::vector<ws::ConvergenceRecord> recs =
          ws::run_convergence(mode, delta, cfg, t_final, levels, n_right);
      auto f = open_csv(out + ".csv");
      f << "# max-norm error at t_final vs the standing-mode exact solution\n";
      f << "level,n_right,h_right,dt,error,observed_order\n";
      bool bad = false;
      for (const ws::ConvergenceRecord& r : recs) {
        f << r.level << ',' << r.n_right << ',' << fmt(r.h_right) << ',' << fmt(r.dt) << ','
          << fmt(r.error) << ',' << fmt(r.observed_order) << '\n';
        std::cout << "level " << r.level << " error " << fmt(r.error) << " order "
                  << fmt(r.observed_order) << "\n";
        if (!std::isfinite(r.error)) bad = true;
      }
      nlohmann::json side = scheme_json(cfg);
      side["subcommand"] = "converge";
      side["scheme"] = scheme_name;
      side["mode"] = mode;
      side["levels"] = levels;
      side["delta"] = delta;
      side["t_final"] = t_final;
      write_sidecar(out + ".json", side);
      return bad ? 1 : 0;
    }

    if (*symbol) {
      if (out.empty()) out = "symbol";
      ws::VonNeumannConfig vc;
      vc.alpha2 = alpha2;
      vc.alpha4 = alpha4;
      vc.nu_p = nu_p;
      vc.n_u = n_u > 0 ? n_u : 1;
      if (variant_name == "IME2") {
        vc.variant = ws::SchemeVariant::IME2;
        vc.p = 2;
      } else if (variant_name == "IME4") {
        vc.variant = ws::SchemeVariant::IME4;
        vc.p = 4;
      } else if (variant_name == "MonolithicUW") {
        vc.variant = ws::SchemeVariant::MonolithicUW;
        vc.p = 2;
      } else if (variant_name == "PC") {
        vc.variant = ws::SchemeVariant::PredictorCorrectorUW;
        vc.p = 2;
      } else {
        throw CLI::ValidationError("--variant", "expected IME2, IME4, MonolithicUW, or PC");
      }
      const auto rows = ws::symbol_surface(vc, 1.0, 1.0, n_k, n_z, z_min, z_max);
      auto f = open_csv(out + ".csv");
      f << "# amplification moduli over kh in (0,pi], z = dt^2 log-spaced\n";
      f << "kh,z,mod_plus,mod_minus\n";
      for (const auto& r : rows)
        f << fmt(r.kh) << ',' << fmt(r.z) << ',' << fmt(r.mod_plus) << ','
          << fmt(r.mod_minus) << '\n';
      write_sidecar(out + ".json",
                    {{"subcommand", "symbol"}, {"variant", variant_name}, {"alpha2", alpha2},
                     {"alpha4", alpha4}, {"nu_p", nu_p}, {"n_u", vc.n_u}, {"n_k", n_k},
                     {"n_z", n_z}, {"z_min", z_min}, {"z_max", z_max}});
      return 0;
    }

    if (*region) {
      if (region_p != 2 && region_p != 4)
        throw CLI::ValidationError("--p", "p must be 2 or 4");
      const bool ok = ws::stability_region(region_p, alpha2, alpha4);
      std::cout << "stable: " << (ok ? "true" : "false") << "\n";
      if (!out.empty()) {
        auto f = open_csv(out + ".csv");
        f << "# unconditional-stability predicate\n";
        f << "p,alpha2,alpha4,stable\n";
        f << region_p << ',' << fmt(alpha2) << ',' << fmt(alpha4) << ',' << (ok ? 1 : 0) << '\n';
        write_sidecar(out + ".json", {{"subcommand", "region"}, {"p", region_p},
                                      {"alpha2", alpha2}, {"alpha4", alpha4}});
      }
      return 0;
    }

    if (*gks) {
      const ws::GksProbe probe = ws::gks_check(lambda, alpha2, n_theta);
      std::cout << "lambda: " << fmt(probe.lambda) << "\n"
                << "alpha2: " << fmt(probe.alpha2) << "\n"
                << "precondition_ok: " << (probe.precondition_ok ? "true" : "false") << "\n"
                << "max ||a|-1| on theta grid: " << fmt(probe.max_deviation) << "\n"
                << "roots_on_unit_circle: " << (probe.roots_on_unit_circle ? "true" : "false")
                << "\n"
                << "max |kappa_L+ kappa_R+| for |a|>1: " << fmt(probe.max_kappa_product) << "\n"
                << "no_interface_mode: " << (probe.no_interface_mode ? "true" : "false") << "\n";
      if (!out.empty())
        write_sidecar(out + ".json",
                      {{"subcommand", "gks"}, {"lambda", lambda}, {"alpha2", alpha2},
                       {"n_theta", n_theta}, {"max_deviation", probe.max_deviation},
                       {"roots_on_unit_circle", probe.roots_on_unit_circle},
                       {"no_interface_mode", probe.no_interface_mode}});
      return probe.roots_on_unit_circle && probe.no_interface_mode ? 0 : 1;
    }

    if (*verify) {
      cfg.gamma = gamma_scalar;
      const ws::OversetGrid1D g = ws::build_overset(delta, n_right, cfg.p);
      const double dev = ws::verify_compression(g, cfg, n_steps, seed);
      std::cout << "max relative deviation over " << n_steps << " steps: " << fmt(dev) << "\n";
      if (!out.empty())
        write_sidecar(out + ".json",
                      {{"subcommand", "verify"}, {"scheme", scheme_name}, {"delta", delta},
                       {"gamma", gamma_scalar}, {"steps", n_steps}, {"seed", seed},
                       {"deviation", dev}});
      return dev <= 1e-10 ? 0 : 1;
    }

    if (*modes) {
      if (out.empty()) out = "modes";
      cfg.gamma = gamma_scalar;
      const ws::OversetGrid1D g = ws::build_overset(delta, n_right, cfg.p);
      const ws::StageMatrices st = ws::assemble_stages(g, cfg);
      const ws::SpectrumReport rep = ws::spectrum(ws::compress(st, st.n_u), tol_a);
      auto f = open_csv(out + ".csv");
      f << "# companion eigenvalues a; stable iff all |a| <= 1 + tol\n";
      f << "re,im,modulus\n";
      for (int i = 0; i < rep.eigenvalues.size(); ++i)
        f << fmt(rep.eigenvalues[i].real()) << ',' << fmt(rep.eigenvalues[i].imag()) << ','
          << fmt(std::abs(rep.eigenvalues[i])) << '\n';
      nlohmann::json side = scheme_json(cfg);
      side["subcommand"] = "modes";
      side["scheme"] = scheme_name;
      side["delta"] = delta;
      side["n_right"] = n_right;
      side["tol_a"] = tol_a;
      side["max_modulus"] = rep.max_modulus;
      side["unstable_count"] = rep.unstable_count;
      write_sidecar(out + ".json", side);
      std::cout << "max |a| = " << fmt(rep.max_modulus) << ", " << rep.unstable_count
                << " eigenvalues above 1 + " << fmt(tol_a) << "\n";
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ws::GridError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
