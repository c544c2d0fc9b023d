// qwalk: command line laboratory for the quasi-periodic coined walk.
// Subcommands cover evolution/transport, Lyapunov exponents, acceleration,
// finite-volume spectra, Green's functions, the duality residual, the
// (lambda1, lambda2) phase diagram, and an invariant self-check.
//
// Exit codes: 0 ok, 2 validation error, 3 numeric guard, 4 invariant failure.

#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qwlab/duality.hpp"
#include "qwlab/dynamics.hpp"
#include "qwlab/lyapunov.hpp"
#include "qwlab/spectrum.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace qwlab;

namespace {

constexpr const char* kVersion = "0.1.0";

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

// options shared by every subcommand
struct CommonOpts {
  double lambda1 = 0.5;
  double lambda2 = 0.5;
  double t = 0.5;
  double phi = golden_mean();
  double theta = 0.137;
  std::uint64_t seed = 0x5eed;
  int jobs = 1;
  std::string out_dir = ".";
};

void add_common_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--lambda1", o.lambda1, "shift coupling, in (0, 1)")
      ->capture_default_str();
  cmd->add_option("--lambda2", o.lambda2, "coin coupling, in (0, 1)")
      ->capture_default_str();
  cmd->add_option("--t", o.t, "coin profile parameter, |t| < 1")
      ->capture_default_str();
  cmd->add_option("--phi", o.phi, "frequency (default golden mean)")
      ->capture_default_str();
  cmd->add_option("--theta", o.theta, "phase offset")->capture_default_str();
  cmd->add_option("--seed", o.seed, "seed for phase sampling")
      ->capture_default_str();
  cmd->add_option("--jobs", o.jobs, "worker threads for grid sweeps")
      ->capture_default_str();
  cmd->add_option("--out", o.out_dir, "output directory")
      ->capture_default_str();
  cmd->set_config("--config", "", "flat key=value file; flags override");
}

ordered_json common_params(const CommonOpts& o) {
  ordered_json j;
  j["lambda1"] = o.lambda1;
  j["lambda2"] = o.lambda2;
  j["t"] = o.t;
  j["phi"] = o.phi;
  j["theta"] = o.theta;
  j["jobs"] = o.jobs;
  return j;
}

std::ofstream open_text(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  f << std::setprecision(17);
  return f;
}

void write_manifest(const CommonOpts& o, const std::string& command,
                    const ordered_json& params,
                    const std::vector<std::string>& outputs, double wall_s) {
  ordered_json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["parameters"] = params;
  m["seed"] = o.seed;
  m["outputs"] = outputs;
  m["wall_time_s"] = wall_s;
  auto f = open_text(fs::path(o.out_dir) / (command + "_manifest.json"));
  f << m.dump(2) << "\n";
}

fs::path prepare_out(const CommonOpts& o) {
  fs::path dir(o.out_dir);
  fs::create_directories(dir);
  return dir;
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::supercritical: return "supercritical";
    case Regime::critical: return "critical";
    case Regime::subcritical: return "subcritical";
    default: return "inconclusive";
  }
}

const char* type_name(SpectralType s) {
  switch (s) {
    case SpectralType::pure_point: return "pp";
    case SpectralType::singular_continuous: return "sc";
    case SpectralType::absolutely_continuous: return "ac";
    default: return "undetermined";
  }
}

// ---- evolve ----

struct EvolveOpts {
  CommonOpts common;
  long steps = 4096;
  int checkpoints = 0;  // 0 = dump the final state instead of the record
  std::string initial = "up";
};

int cmd_evolve(const EvolveOpts& o) {
  auto t0 = clock_type::now();
  WalkParameters p = WalkParameters::make(o.common.lambda1, o.common.lambda2,
                                          o.common.t, o.common.phi,
                                          o.common.theta);
  if (o.initial != "up" && o.initial != "symmetric")
    throw std::invalid_argument("--initial must be 'up' or 'symmetric'");
  InitialSpinor kind =
      (o.initial == "up") ? InitialSpinor::up : InitialSpinor::symmetric;

  fs::path dir = prepare_out(o.common);
  ordered_json params = common_params(o.common);
  params["steps"] = o.steps;
  params["checkpoints"] = o.checkpoints;
  params["initial"] = o.initial;
  std::vector<std::string> outputs;

  if (o.checkpoints > 0) {
    TransportRecord rec = transport(p, o.steps, o.checkpoints, kind);
    auto csv = open_text(dir / "transport.csv");
    csv << "T,M2,return_prob\n";
    for (std::size_t i = 0; i < rec.times.size(); ++i)
      csv << rec.times[i] << "," << rec.second_moment[i] << ","
          << rec.return_prob[i] << "\n";
    ordered_json summary;
    summary["fitted_exponent"] = rec.fitted_exponent;
    summary["fit_residual"] = rec.fit_residual;
    summary["norm_drift"] = rec.norm_drift;
    auto js = open_text(dir / "evolve.json");
    js << summary.dump(2) << "\n";
    outputs = {"transport.csv", "evolve.json"};
    std::cout << "fitted_exponent " << rec.fitted_exponent << " norm_drift "
              << rec.norm_drift << "\n";
  } else {
    const long pad = o.steps + 2;
    StateVector psi = evolve(p, o.steps, initial_state(kind, -pad, pad));
    auto csv = open_text(dir / "state.csv");
    csv << "n,re_plus,im_plus,re_minus,im_minus\n";
    for (long n = psi.nmin; n <= psi.nmax(); ++n) {
      const cplx up = psi.plus[n - psi.nmin], dn = psi.minus[n - psi.nmin];
      csv << n << "," << up.real() << "," << up.imag() << "," << dn.real()
          << "," << dn.imag() << "\n";
    }
    outputs = {"state.csv"};
    std::cout << "norm " << psi.norm() << " after " << o.steps << " steps\n";
  }
  write_manifest(o.common, "evolve", params, outputs, seconds_since(t0));
  return 0;
}

// ---- lyapunov ----

struct LyapunovOpts {
  CommonOpts common;
  double z_arg = 1.234;
  double eps = 0.0;
  long steps = 200000;
  int phases = 8;
};

int cmd_lyapunov(const LyapunovOpts& o) {
  auto t0 = clock_type::now();
  WalkParameters p = WalkParameters::make(o.common.lambda1, o.common.lambda2,
                                          o.common.t, o.common.phi,
                                          o.common.theta);
  LyapunovBudget budget{o.steps, o.phases, o.common.seed};
  LyapunovEstimate le =
      estimate_le(CocycleMapSpec::two_step(p, std::polar(1.0, o.z_arg)),
                  o.eps, budget);
  const double closed = closed_form_le(p);

  fs::path dir = prepare_out(o.common);
  ordered_json params = common_params(o.common);
  params["z_arg"] = o.z_arg;
  params["eps"] = o.eps;
  params["steps"] = o.steps;
  params["phases"] = o.phases;

  ordered_json out;
  out["le"] = le.value;
  out["std_error"] = le.std_error;
  out["n_steps"] = le.n_steps;
  out["n_phases"] = le.n_phases;
  out["eps"] = le.eps;
  out["excluded_steps"] = le.excluded_steps;
  out["noisy"] = le.noisy;
  out["closed_form_le"] = closed;
  out["abs_diff_to_closed"] = std::abs(le.value - closed);
  auto js = open_text(dir / "lyapunov.json");
  js << out.dump(2) << "\n";
  write_manifest(o.common, "lyapunov", params, {"lyapunov.json"},
                 seconds_since(t0));
  std::cout << "le " << le.value << " closed_form " << closed << "\n";
  return 0;
}

// ---- accel ----

struct AccelOpts {
  CommonOpts common;
  double z_arg = 1.234;
  double eps = 0.01;       // center of the finite difference
  double eps_step = 0.005;
  long steps = 50000;
  int phases = 8;
};

int cmd_accel(const AccelOpts& o) {
  auto t0 = clock_type::now();
  WalkParameters p = WalkParameters::make(o.common.lambda1, o.common.lambda2,
                                          o.common.t, o.common.phi,
                                          o.common.theta);
  LyapunovBudget budget{o.steps, o.phases, o.common.seed};
  AccelerationEstimate acc = estimate_acceleration(
      CocycleMapSpec::numerator(p, std::polar(1.0, o.z_arg)), o.eps,
      o.eps_step, budget);

  fs::path dir = prepare_out(o.common);
  ordered_json params = common_params(o.common);
  params["z_arg"] = o.z_arg;
  params["eps"] = o.eps;
  params["eps_step"] = o.eps_step;
  params["steps"] = o.steps;
  params["phases"] = o.phases;

  ordered_json out;
  out["omega"] = acc.omega;
  out["eps_center"] = acc.eps_center;
  out["eps_step"] = acc.eps_step;
  out["residual_to_int"] = acc.residual_to_int;
  auto js = open_text(dir / "accel.json");
  js << out.dump(2) << "\n";
  write_manifest(o.common, "accel", params, {"accel.json"},
                 seconds_since(t0));
  std::cout << "omega " << acc.omega << " residual_to_int "
            << acc.residual_to_int << "\n";
  return 0;
}

// ---- spectrum ----

struct SpectrumOpts {
  CommonOpts common;
  long window = 256;
  bool select = false;
  int n_pick = 3;
};

int cmd_spectrum(const SpectrumOpts& o) {
  auto t0 = clock_type::now();
  WalkParameters p = WalkParameters::make(o.common.lambda1, o.common.lambda2,
                                          o.common.t, o.common.phi,
                                          o.common.theta);
  if (o.window < 4) throw std::invalid_argument("--window must be >= 4");

  fs::path dir = prepare_out(o.common);
  ordered_json params = common_params(o.common);
  params["window"] = o.window;
  params["select"] = o.select;
  params["n_pick"] = o.n_pick;
  std::vector<std::string> outputs;

  Interval cmv{-o.window / 2, -o.window / 2 + o.window - 1};
  CoefficientSequence coeffs =
      generate_coefficients(p, {cmv.a - 1, cmv.b + 1});
  BandedUnitary op = assemble(coeffs, cmv, Boundary::closed());
  std::vector<cplx> spec = finite_volume_spectrum(op);
  auto csv = open_text(dir / "spectrum.csv");
  csv << "k,arg,re,im\n";
  for (std::size_t k = 0; k < spec.size(); ++k)
    csv << k << "," << std::arg(spec[k]) << "," << spec[k].real() << ","
        << spec[k].imag() << "\n";
  outputs.push_back("spectrum.csv");

  if (o.select) {
    SelectOptions sel;
    sel.size = o.window;
    sel.n_pick = o.n_pick;
    SpectralSelection s = select_spectral_z(p, sel);
    ordered_json out;
    out["n_base"] = s.base.size();
    out["n_stable"] = s.stable.size();
    out["picks"] = ordered_json::array();
    for (cplx z : s.picks) {
      ordered_json zj;
      zj["arg"] = std::arg(z);
      zj["re"] = z.real();
      zj["im"] = z.imag();
      out["picks"].push_back(zj);
    }
    auto js = open_text(dir / "selection.json");
    js << out.dump(2) << "\n";
    outputs.push_back("selection.json");
  }
  write_manifest(o.common, "spectrum", params, outputs, seconds_since(t0));
  std::cout << spec.size() << " eigenvalues\n";
  return 0;
}

// ---- green ----

struct GreenOpts {
  CommonOpts common;
  double z_arg = 1.234;
  long window = 32;
};

int cmd_green(const GreenOpts& o) {
  auto t0 = clock_type::now();
  WalkParameters p = WalkParameters::make(o.common.lambda1, o.common.lambda2,
                                          o.common.t, o.common.phi,
                                          o.common.theta);
  if (o.window < 4 || o.window > 64)
    throw std::invalid_argument("--window must be in [4, 64]");
  const cplx z = std::polar(1.0, o.z_arg);

  Interval cmv{-o.window / 2, -o.window / 2 + o.window - 1};
  CoefficientSequence coeffs = gauged_coefficients(p, {cmv.a - 1, cmv.b + 1});
  BandedUnitary op = assemble(coeffs, cmv, Boundary::closed());

  ScaledComplex direct = char_poly_direct(op, cmv, z);
  ScaledComplex product = char_poly_product(op, cmv, z);
  GreenFrame frame = green_function(op, z);

  fs::path dir = prepare_out(o.common);
  ordered_json params = common_params(o.common);
  params["z_arg"] = o.z_arg;
  params["window"] = o.window;

  auto csv = open_text(dir / "green.csv");
  csv << "u,v,abs_inverse,abs_cramer\n";
  for (long u = cmv.a; u <= cmv.b; ++u)
    for (long v = cmv.a; v <= cmv.b; ++v)
      csv << u << "," << v << ","
          << std::abs(frame.G(u - cmv.a, v - cmv.a)) << ","
          << green_abs_cramer(op, cmv, z, u, v) << "\n";

  ordered_json out;
  out["char_direct_log_abs"] = direct.log_abs();
  out["char_product_log_abs"] = product.log_abs();
  out["char_rel_diff"] =
      std::abs(direct.mantissa * std::exp(direct.log_scale - product.log_scale)
               - product.mantissa) /
      std::abs(product.mantissa);
  auto js = open_text(dir / "green.json");
  js << out.dump(2) << "\n";
  write_manifest(o.common, "green", params, {"green.csv", "green.json"},
                 seconds_since(t0));
  std::cout << "char poly rel diff " << out["char_rel_diff"].get<double>()
            << "\n";
  return 0;
}

// ---- duality ----

struct DualityOpts {
  CommonOpts common;
  long size = 1024;
  int pairs = 8;
  int n_xi = 32;
};

int cmd_duality(const DualityOpts& o) {
  auto t0 = clock_type::now();
  WalkParameters p = WalkParameters::make(o.common.lambda1, o.common.lambda2,
                                          o.common.t, o.common.phi,
                                          o.common.theta);
  DualityReport rep = duality_residual(p, o.size, o.pairs, o.n_xi);

  fs::path dir = prepare_out(o.common);
  ordered_json params = common_params(o.common);
  params["size"] = o.size;
  params["pairs"] = o.pairs;
  params["n_xi"] = o.n_xi;

  ordered_json out;
  out["median_residual"] = rep.median_residual;
  out["max_residual"] = rep.max_residual;
  out["excluded_xi"] = rep.excluded_xi;
  out["n_xi"] = rep.n_xi;
  out["pairs"] = ordered_json::array();
  for (const DualityPairReport& pr : rep.pairs) {
    ordered_json pj;
    pj["eigenvalue_arg"] = std::arg(pr.eigenvalue);
    pj["source_residual"] = pr.source_residual;
    pj["interior_mass"] = pr.interior_mass;
    pj["low_interior_mass"] = pr.low_interior_mass;
    pj["median_residual"] = pr.median_residual;
    pj["max_residual"] = pr.max_residual;
    out["pairs"].push_back(pj);
  }
  auto js = open_text(dir / "duality.json");
  js << out.dump(2) << "\n";
  write_manifest(o.common, "duality", params, {"duality.json"},
                 seconds_since(t0));
  std::cout << "median residual " << rep.median_residual << " over "
            << rep.pairs.size() << " pairs\n";
  return 0;
}

// ---- phase-diagram ----

struct PhaseDiagramOpts {
  CommonOpts common;
  int grid = 21;
  bool quick = false;
  long steps = 0;  // 0 = regime default (2e5 full, 2e4 quick)
};

struct CellResult {
  double l1 = 0.0, l2 = 0.0;
  CellReport rep;
  SpectralType predicted = SpectralType::undetermined;
  bool match = false;
};

int cmd_phase_diagram(const PhaseDiagramOpts& o) {
  auto t0 = clock_type::now();
  if (o.grid < 2 || o.grid > 64)
    throw std::invalid_argument("--grid must be in [2, 64]");
  WalkParameters::make(0.5, 0.5, o.common.t, o.common.phi, o.common.theta);

  const long steps = (o.steps > 0) ? o.steps : (o.quick ? 20000L : 200000L);
  const long select_size = o.quick ? 192 : 256;
  const int n = o.grid;
  const int cells = n * n;
  std::vector<CellResult> results(cells);

  auto run_cell = [&](int idx) {
    const int i = idx / n, j = idx % n;
    CellResult& r = results[idx];
    r.l1 = static_cast<double>(i + 1) / (n + 1);
    r.l2 = static_cast<double>(j + 1) / (n + 1);
    WalkParameters p = WalkParameters::make(r.l1, r.l2, o.common.t,
                                            o.common.phi, o.common.theta);
    SelectOptions sel;
    sel.size = select_size;
    SpectralSelection s = select_spectral_z(p, sel);
    std::vector<cplx> zs = s.picks;
    if (zs.empty()) {
      // no candidate survived both filters; fall back to spread-out base
      // eigenvalues so the cell still gets a (lower-confidence) verdict
      for (std::size_t k = 0; k < s.base.size() && zs.size() < 3;
           k += std::max<std::size_t>(1, s.base.size() / 3))
        zs.push_back(s.base[k]);
    }
    ClassifyBudget budget;
    budget.le_steps = steps;
    budget.accel_steps = std::max(steps / 4, 5000L);
    budget.seed = SplitMix64::child(o.common.seed, idx).next();
    r.rep = classify_cell(p, zs, budget);
    r.predicted = predicted_type(p);
    r.match = (r.rep.predicted == r.predicted);
  };

  const int workers = std::clamp(o.common.jobs, 1, cells);
  if (workers == 1) {
    for (int idx = 0; idx < cells; ++idx) run_cell(idx);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int idx = next.fetch_add(1); idx < cells;
             idx = next.fetch_add(1))
          run_cell(idx);
      });
    for (std::thread& th : pool) th.join();
  }

  fs::path dir = prepare_out(o.common);
  ordered_json params = common_params(o.common);
  params["grid"] = o.grid;
  params["quick"] = o.quick;
  params["steps"] = steps;
  params["select_size"] = select_size;

  auto csv = open_text(dir / "phase_diagram.csv");
  csv << "lambda1,lambda2,le_min,le_err,omega,z_arg,regime,predicted,match\n";
  for (const CellResult& r : results) {
    const RegimeReport& best = r.rep.per_z[r.rep.argmin];
    csv << r.l1 << "," << r.l2 << "," << r.rep.le_min << "," << best.le_err
        << "," << r.rep.omega << "," << std::arg(best.z) << ","
        << regime_name(r.rep.regime) << "," << type_name(r.predicted) << ","
        << (r.match ? 1 : 0) << "\n";
  }

  // summary: agreement away from the diagonal and threshold boundaries,
  // and the majority verdict on the high-coupling corner
  const double thr = std::abs(1.0 - o.common.t * o.common.t) /
                     (1.0 + o.common.t * o.common.t);
  int off_total = 0, off_match = 0, corner_total = 0, corner_critical = 0;
  for (const CellResult& r : results) {
    const bool boundary = std::abs(r.l1 - r.l2) < 0.05 ||
                          std::abs(r.l1 - thr) < 0.05 ||
                          std::abs(r.l2 - thr) < 0.05;
    if (!boundary) {
      ++off_total;
      off_match += r.match ? 1 : 0;
    }
    if (r.l1 >= thr && r.l2 >= thr) {
      ++corner_total;
      corner_critical += (r.rep.regime == Regime::critical) ? 1 : 0;
    }
  }
  ordered_json summary;
  summary["cells"] = cells;
  summary["off_boundary_cells"] = off_total;
  summary["off_boundary_match_fraction"] =
      off_total ? static_cast<double>(off_match) / off_total : 0.0;
  summary["corner_cells"] = corner_total;
  summary["corner_critical_fraction"] =
      corner_total ? static_cast<double>(corner_critical) / corner_total
                   : 0.0;
  summary["wall_time_s"] = seconds_since(t0);
  auto js = open_text(dir / "phase_diagram.json");
  js << summary.dump(2) << "\n";

  write_manifest(o.common, "phase_diagram", params,
                 {"phase_diagram.csv", "phase_diagram.json"},
                 seconds_since(t0));
  std::cout << "off-boundary match "
            << summary["off_boundary_match_fraction"].get<double>()
            << ", corner critical "
            << summary["corner_critical_fraction"].get<double>() << ", "
            << seconds_since(t0) << " s\n";
  return 0;
}

// ---- verify ----

struct VerifyOpts {
  CommonOpts common;
  bool quick = false;
};

struct CheckRunner {
  bool all_ok = true;
  void check(const std::string& name, double value, double bound) {
    const bool ok = value < bound;
    all_ok = all_ok && ok;
    std::cout << (ok ? "ok   " : "FAIL ") << name << "  (" << std::scientific
              << std::setprecision(3) << value << " vs " << bound << ")\n"
              << std::defaultfloat;
  }
  void check_true(const std::string& name, bool ok) {
    all_ok = all_ok && ok;
    std::cout << (ok ? "ok   " : "FAIL ") << name << "\n";
  }
};

int cmd_verify(const VerifyOpts& o) {
  auto t0 = clock_type::now();
  CheckRunner run;
  WalkParameters p = WalkParameters::make(0.6, 0.8, 0.5, golden_mean(), 0.137);
  SplitMix64 rng(o.common.seed);

  {  // closed truncations are unitary
    Interval cmv{-32, 31};
    BandedUnitary op = assemble(generate_coefficients(p, {-33, 32}), cmv,
                                Boundary::closed());
    Eigen::MatrixXcd E = truncate(op);
    run.check("unitarity of the closed truncation",
              (E.adjoint() * E - Eigen::MatrixXcd::Identity(64, 64)).norm(),
              1e-10);
    double worst = 0.0;
    for (long d = 0; d < 64; ++d) {
      const long j = cmv.a + d;
      worst = std::max(worst,
                       std::abs(E(d, d) + std::conj(op.coeffs.alpha(j)) *
                                              op.coeffs.alpha(j - 1)));
    }
    run.check("diagonal identity of the two-factor product", worst, 1e-12);
  }
  {  // componentwise walk equals the factored route
    StateVector psi = StateVector::zeros(-24, 24);
    for (long n = -10; n <= 10; ++n) {
      psi.plus[n + 24] = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
      psi.minus[n + 24] = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
    }
    CoinTable coins = make_coin_table(p, -24, 24);
    StateVector a = walk_apply(p, coins, psi);
    StateVector b = walk_apply_factored(p, psi);
    double diff = 0.0;
    for (long i = 0; i < a.size(); ++i)
      diff = std::max({diff, std::abs(a.plus[i] - b.plus[i]),
                       std::abs(a.minus[i] - b.minus[i])});
    run.check("componentwise walk vs factored route", diff, 1e-12);
  }
  {  // gauge leaves the spectrum alone
    Interval cmv{1, 64};
    BandedUnitary op = assemble(generate_coefficients(p, {0, 65}), cmv,
                                Boundary::closed());
    BandedUnitary gauged = gauge_to_ecmv(op).first;
    run.check("gauge-invariant spectrum (Hausdorff)",
              hausdorff_distance(finite_volume_spectrum(op),
                                 finite_volume_spectrum(gauged)),
              1e-10);
  }
  {  // Szego steps land in SU(1,1); the two-step product relative to norm.
    // The absolute bound needs a nonsingular coin (the step norm grows like
    // 1/rho and the residual like its square).
    WalkParameters pn =
        WalkParameters::make(0.6, 0.3, 0.5, golden_mean(), 0.137);
    double worst_step = 0.0, worst_two = 0.0;
    const Eigen::Matrix2cd J = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
    for (int i = 0; i < 20; ++i) {
      const cplx z = std::polar(1.0, 2 * kPi * rng.uniform());
      const cplx g = sample_g(pn, {rng.uniform(), 0.0});
      const double rho = std::sqrt(std::max(0.0, 1.0 - std::norm(g)));
      for (const Cocycle2x2& s : {szego_step(pn.lambda1p, pn.lambda1, z),
                                  szego_step(g, rho, z)})
        worst_step = std::max(worst_step,
                              (s.m.adjoint() * J * s.m - J).norm());
      Cocycle2x2 m = evaluate(CocycleMapSpec::two_step(p, z),
                              {rng.uniform(), 0.0});
      worst_two = std::max(worst_two,
                           (m.m.adjoint() * J * m.m - J).norm() /
                               (1.0 + m.m.squaredNorm()));
    }
    run.check("Szego steps in SU(1,1)", worst_step, 1e-12);
    run.check("two-step product J-unitary (norm-relative)", worst_two, 1e-12);
  }
  {  // sampling pair normalization on the real torus
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      ComplexPhasePoint w{rng.uniform(), 0.0};
      worst = std::max(worst, std::abs(std::norm(sample_f(p, w)) +
                                       std::norm(sample_g(p, w)) - 1.0));
    }
    run.check("|f|^2 + |g|^2 = 1 on the torus", worst, 1e-12);
  }
  {  // mixing constants and duality round trip
    auto [a, b] = mixing_constants(p);
    run.check("mixing constants a^2 + b^2 = 1", std::abs(a * a + b * b - 1.0),
              1e-15);
    StateVector psi = StateVector::zeros(-16, 15);
    for (long n = -12; n <= 11; ++n) {
      psi.plus[n + 16] = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
      psi.minus[n + 16] = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
    }
    StateVector back = dual_round_trip(psi, p, 32);
    double diff = 0.0;
    for (long i = 0; i < psi.size(); ++i)
      diff = std::max({diff, std::abs(back.plus[i] - psi.plus[i]),
                       std::abs(back.minus[i] - psi.minus[i])});
    run.check("duality round trip on short support", diff, 1e-10);
    run.check("grid Parseval mass",
              std::abs(parseval_mass(psi, p) - psi.norm() * psi.norm()),
              1e-10);
  }
  {  // light cone and unitarity along a trajectory
    const long T = 64, pad = T + 2;
    StateVector psi = evolve(p, T, initial_state(InitialSpinor::up, -pad, pad));
    double outside = 0.0;
    for (long n = psi.nmin; n <= psi.nmax(); ++n)
      if (n < -T || n > T)
        outside += std::abs(psi.plus[n - psi.nmin]) +
                   std::abs(psi.minus[n - psi.nmin]);
    run.check_true("light cone exact at T = 64", outside == 0.0);
    run.check("norm drift after 64 steps", std::abs(psi.norm() - 1.0), 1e-12);
  }
  {  // two characteristic-polynomial routes agree
    Interval cmv{1, 40};
    BandedUnitary op = assemble(gauged_coefficients(p, {0, 41}), cmv,
                                Boundary::closed());
    const cplx z = std::polar(1.0, 1.234);
    ScaledComplex d = char_poly_direct(op, cmv, z);
    ScaledComplex q = char_poly_product(op, cmv, z);
    run.check("characteristic polynomial, two routes",
              std::abs(d.mantissa * std::exp(d.log_scale - q.log_scale) -
                       q.mantissa) /
                  std::abs(q.mantissa),
              1e-8);
  }

  if (!o.quick) {
    {  // Jensen quadrature vs closed form
      JensenResult jr = jensen_integral_f(p, 0.05);
      run.check("Jensen integral vs closed form", jr.abs_diff, 1e-8);
    }
    {  // Green's function, Cramer route vs dense inverse
      Interval cmv{1, 32};
      BandedUnitary op = assemble(gauged_coefficients(p, {0, 33}), cmv,
                                  Boundary::closed());
      const cplx z = std::polar(1.0, 0.456);
      GreenFrame frame = green_function(op, z);
      double worst = 0.0;
      for (long u : {2L, 9L, 17L, 30L})
        for (long v : {3L, 12L, 25L}) {
          const double inv = std::abs(frame.G(u - cmv.a, v - cmv.a));
          const double cr = green_abs_cramer(op, cmv, z, u, v);
          worst = std::max(worst, std::abs(inv - cr) / std::max(inv, 1e-300));
        }
      run.check("Green Cramer route vs inverse", worst, 1e-8);
    }
    {  // alternating reflection and evenness
      run.check("alternating-reflection spectral distance",
                reflection_spectrum_distance(p, 16), 1e-10);
      run.check("evenness residual at conjugate boundary phases",
                evenness_residual(p, 6, std::polar(1.0, 0.7), cplx(0.6, 0.8),
                                  cplx(0.6, -0.8)),
                1e-8);
      run.check("Fourier band bound",
                fourier_out_of_band(p, 6, std::polar(1.0, 0.7)), 1e-8);
    }
    {  // monotone rotation on the critical line
      WalkParameters pc =
          WalkParameters::make(0.45, 0.45, 0.5, golden_mean(), 0.137);
      double worst = -1e9;
      for (int i = 0; i < 100; ++i) {
        const double ang = 2 * kPi * rng.uniform();
        const Eigen::Vector2d v(std::cos(ang), std::sin(ang));
        std::vector<double> d = monotonicity_probe(
            pc, rng.uniform(), v, {2 * kPi * rng.uniform()});
        worst = std::max(worst, d[0]);
      }
      run.check("monotone phase rotation on the critical line", worst, 0.0);
    }
    {  // duality residual at modest size
      WalkParameters pl =
          WalkParameters::make(0.3, 0.7, 0.0, golden_mean(), 0.137);
      DualityReport rep = duality_residual(pl, 256, 4);
      run.check("duality residual at size 256", rep.median_residual, 1e-2);
    }
  }

  std::cout << (run.all_ok ? "verify: all checks passed"
                           : "verify: FAILURES above")
            << " (" << seconds_since(t0) << " s)\n";
  return run.all_ok ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quasi-periodic coined walk laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  EvolveOpts ev;
  CLI::App* evolve_cmd =
      app.add_subcommand("evolve", "evolve a wavepacket; optional transport "
                                   "record at log-spaced checkpoints");
  add_common_flags(evolve_cmd, ev.common);
  evolve_cmd->add_option("--steps", ev.steps, "number of walk steps")
      ->capture_default_str();
  evolve_cmd
      ->add_option("--checkpoints", ev.checkpoints,
                   "log-spaced checkpoint count (0 = dump final state)")
      ->capture_default_str();
  evolve_cmd->add_option("--initial", ev.initial, "up | symmetric")
      ->capture_default_str();

  LyapunovOpts ly;
  CLI::App* lyap_cmd = app.add_subcommand(
      "lyapunov", "Birkhoff Lyapunov exponent of the two-step cocycle");
  add_common_flags(lyap_cmd, ly.common);
  lyap_cmd->add_option("--z-arg", ly.z_arg, "argument of the spectral point")
      ->capture_default_str();
  lyap_cmd->add_option("--eps", ly.eps, "imaginary phase offset")
      ->capture_default_str();
  lyap_cmd->add_option("--steps", ly.steps, "orbit length")
      ->capture_default_str();
  lyap_cmd->add_option("--phases", ly.phases, "number of sampled phases")
      ->capture_default_str();

  AccelOpts ac;
  CLI::App* accel_cmd = app.add_subcommand(
      "accel", "acceleration (slope of the exponent in the phase strip)");
  add_common_flags(accel_cmd, ac.common);
  accel_cmd->add_option("--z-arg", ac.z_arg, "argument of the spectral point")
      ->capture_default_str();
  accel_cmd->add_option("--eps", ac.eps, "finite-difference center")
      ->capture_default_str();
  accel_cmd->add_option("--eps-step", ac.eps_step, "finite-difference step")
      ->capture_default_str();
  accel_cmd->add_option("--steps", ac.steps, "orbit length")
      ->capture_default_str();
  accel_cmd->add_option("--phases", ac.phases, "number of sampled phases")
      ->capture_default_str();

  SpectrumOpts sp;
  CLI::App* spec_cmd = app.add_subcommand(
      "spectrum", "finite-volume spectrum of the closed truncation");
  add_common_flags(spec_cmd, sp.common);
  spec_cmd->add_option("--window", sp.window, "truncation size")
      ->capture_default_str();
  spec_cmd->add_flag("--select", sp.select,
                     "also emit stability-filtered spectral points");
  spec_cmd->add_option("--n-pick", sp.n_pick, "points to select")
      ->capture_default_str();

  GreenOpts gr;
  CLI::App* green_cmd = app.add_subcommand(
      "green", "Green's function and characteristic polynomial routes");
  add_common_flags(green_cmd, gr.common);
  green_cmd->add_option("--z-arg", gr.z_arg, "argument of the spectral point")
      ->capture_default_str();
  green_cmd->add_option("--window", gr.window, "truncation size (<= 64)")
      ->capture_default_str();

  DualityOpts du;
  CLI::App* dual_cmd = app.add_subcommand(
      "duality", "coupling-exchange residual on truncation eigenpairs");
  add_common_flags(dual_cmd, du.common);
  dual_cmd->add_option("--size", du.size, "CMV truncation size")
      ->capture_default_str();
  dual_cmd->add_option("--pairs", du.pairs, "eigenpairs to test")
      ->capture_default_str();
  dual_cmd->add_option("--xi", du.n_xi, "dual phase grid points")
      ->capture_default_str();

  PhaseDiagramOpts pd;
  CLI::App* pd_cmd = app.add_subcommand(
      "phase-diagram", "classify a (lambda1, lambda2) grid at fixed t");
  add_common_flags(pd_cmd, pd.common);
  pd_cmd->add_option("--grid", pd.grid, "grid points per axis")
      ->capture_default_str();
  pd_cmd->add_flag("--quick", pd.quick, "reduced budgets");
  pd_cmd->add_option("--steps", pd.steps, "orbit length override")
      ->capture_default_str();

  VerifyOpts vf;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "run the invariant self-check suite");
  add_common_flags(verify_cmd, vf.common);
  verify_cmd->add_flag("--quick", vf.quick, "fast tier only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (evolve_cmd->parsed()) return cmd_evolve(ev);
    if (lyap_cmd->parsed()) return cmd_lyapunov(ly);
    if (accel_cmd->parsed()) return cmd_accel(ac);
    if (spec_cmd->parsed()) return cmd_spectrum(sp);
    if (green_cmd->parsed()) return cmd_green(gr);
    if (dual_cmd->parsed()) return cmd_duality(du);
    if (pd_cmd->parsed()) return cmd_phase_diagram(pd);
    if (verify_cmd->parsed()) return cmd_verify(vf);
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "numeric guard: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
