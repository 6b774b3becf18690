#pragma once

// Scenario runner: reads a flat config, runs one scenario, writes CSV files
// into an output directory and returns a summary plus an exit status
// (0 success, 1 criterion failure). Errors propagate as exceptions.

#include <malab/acceptance.hpp>
#include <malab/barrier.hpp>
#include <malab/config.hpp>
#include <malab/csv.hpp>
#include <malab/envelope.hpp>
#include <malab/geometry.hpp>
#include <malab/oracles.hpp>
#include <malab/regularity.hpp>
#include <malab/solver.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace malab {

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"solve",           "envelope",        "homogeneous",
                                              "barrier-certify", "exponent-fit",    "appendix-verify",
                                              "doubling-check",  "angle-check",     "acceptance"};
  return names;
}

struct ExperimentConfig {
  std::string scenario;
  // domain
  std::string domain = "strip";  // strip | disk
  int k = 4;
  double beta = -1.0;  // negative: beta = k
  double leading = 1.0;
  std::vector<double> remainder;  // coefficients of x1^{k+1}, x1^{k+2}, ...
  double half_width = 1.0;
  double height = 1.0;
  double radius = 1.0;
  // data
  std::string case_id;       // closed-form case supplying the trace / obstacle
  std::vector<double> phi;   // polynomial trace in x1 when no case is named
  double f = 1.0;            // constant right-hand side
  CaseParameters case_parameters;
  // resolutions
  int resolution = 64;
  int samples = 10000;
  int interior_samples = 2000;
  double grading = 1.2;
  int trials = 1000;
  // barrier
  double f0 = 1.0;
  double q = 9.0 / 8.0;
  double m_scale = 1.0;
  std::vector<double> z1{0.0, 0.1, 0.3};
  int barrier_resolution = 200;
  // exponent fit
  std::string mode = "value";
  std::vector<double> direction;  // empty: full fan
  std::vector<double> x0{0.0, 0.0};
  // appendix
  std::vector<double> ks{2, 4, 6, 8, 10};
  std::uint64_t seed = 1;

  static const std::set<std::string>& keys() {
    static const std::set<std::string> k{"scenario", "domain", "k", "beta", "leading", "remainder", "half_width",
                                         "height", "radius", "case", "phi", "f", "alpha", "delta", "sigma", "log_cap",
                                         "p2_beta", "resolution", "samples", "interior_samples", "grading", "trials",
                                         "f0", "q", "m_scale", "z1", "barrier_resolution", "mode", "direction", "x0",
                                         "ks", "seed"};
    return k;
  }

  static ExperimentConfig from(const Config& c) {
    c.require_known(keys());
    ExperimentConfig e;
    e.scenario = c.get("scenario", "");
    e.domain = c.get("domain", e.domain);
    e.k = static_cast<int>(c.get_int("k", e.k));
    e.beta = c.get_double("beta", e.beta);
    e.leading = c.get_double("leading", e.leading);
    e.remainder = c.get_list("remainder", e.remainder);
    e.half_width = c.get_double("half_width", e.half_width);
    e.height = c.get_double("height", e.height);
    e.radius = c.get_double("radius", e.radius);
    e.case_id = c.get("case", "");
    e.phi = c.get_list("phi", e.phi);
    e.f = c.get_double("f", e.f);
    e.case_parameters.alpha = c.get_double("alpha", e.case_parameters.alpha);
    e.case_parameters.delta = c.get_double("delta", e.case_parameters.delta);
    e.case_parameters.sigma = c.get_double("sigma", e.case_parameters.sigma);
    e.case_parameters.log_cap = c.get_double("log_cap", e.case_parameters.log_cap);
    e.case_parameters.p2_beta = c.get_double("p2_beta", e.case_parameters.p2_beta);
    e.resolution = static_cast<int>(c.get_int("resolution", e.resolution));
    e.samples = static_cast<int>(c.get_int("samples", e.samples));
    e.interior_samples = static_cast<int>(c.get_int("interior_samples", e.interior_samples));
    e.grading = c.get_double("grading", e.grading);
    e.trials = static_cast<int>(c.get_int("trials", e.trials));
    e.f0 = c.get_double("f0", e.f0);
    e.q = c.get_double("q", e.q);
    e.m_scale = c.get_double("m_scale", e.m_scale);
    e.z1 = c.get_list("z1", e.z1);
    e.barrier_resolution = static_cast<int>(c.get_int("barrier_resolution", e.barrier_resolution));
    e.mode = c.get("mode", e.mode);
    e.direction = c.get_list("direction", e.direction);
    e.x0 = c.get_list("x0", e.x0);
    e.ks = c.get_list("ks", e.ks);
    e.seed = static_cast<std::uint64_t>(c.get_int("seed", static_cast<long>(e.seed)));
    // data-driven scenarios default to the power-strip closed form
    if (e.case_id.empty() && e.phi.empty() && !c.has("domain") &&
        (e.scenario == "envelope" || e.scenario == "homogeneous" || e.scenario == "exponent-fit"))
      e.case_id = "power-strip";
    e.validate();
    return e;
  }

  void validate() const {
    if (std::find(scenario_names().begin(), scenario_names().end(), scenario) == scenario_names().end())
      throw ParameterError("unknown scenario: " + (scenario.empty() ? std::string("<none>") : scenario));
    if (domain != "strip" && domain != "disk") throw ParameterError("domain must be strip or disk");
    if (!case_id.empty()) find_case(case_id, case_parameters);
    if (resolution < 8) throw ParameterError("resolution must be >= 8");
    if (samples < 16) throw ParameterError("samples must be >= 16");
    if (interior_samples < 0) throw ParameterError("interior_samples must be >= 0");
    if (trials < 1) throw ParameterError("trials must be >= 1");
    if (barrier_resolution < 4) throw ParameterError("barrier_resolution must be >= 4");
    if (mode != "value" && mode != "gradient") throw ParameterError("mode must be value or gradient");
    if (!direction.empty() && direction.size() != 2) throw ParameterError("direction needs two components");
    if (x0.size() != 2) throw ParameterError("x0 needs two components");
  }

  BoundaryProfile profile() const {
    std::vector<PowerTerm> terms;
    for (std::size_t i = 0; i < remainder.size(); ++i)
      if (remainder[i] != 0.0) terms.push_back({remainder[i], static_cast<double>(k + 1 + i), (k + 1 + i) % 2 == 1, 0.0});
    return BoundaryProfile::degenerate(k, beta < 0 ? k : beta, leading, PowerSum(terms), half_width);
  }

  Domain2D make_domain() const {
    if (!case_id.empty()) return find_case(case_id, case_parameters).domain;
    if (domain == "disk") return Domain2D::disk({0.0, 0.0}, radius);
    return Domain2D::strip(profile(), height);
  }

  /// Boundary data / obstacle as a function on the plane: the named case's
  /// exact u, else the x1-polynomial phi, else zero.
  std::function<double(const Point2&)> data() const {
    if (!case_id.empty()) return find_case(case_id, case_parameters).u;
    if (!phi.empty()) {
      const PowerSum p = PowerSum::polynomial(phi);
      return [p](const Point2& x) { return p(x.x); };
    }
    return [](const Point2&) { return 0.0; };
  }
};

struct RunResult {
  int status = 0;
  std::string summary;
  std::vector<std::string> files;
};

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& dir, const std::string& name, RunResult& rr) {
  std::ofstream os(dir / name, std::ios::binary);
  if (!os) throw ParameterError("cannot write " + (dir / name).string());
  rr.files.push_back(name);
  return os;
}

inline std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace detail

inline RunResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  RunResult rr;
  std::ostringstream sum;
  sum << "scenario: " << cfg.scenario << "\n";
  const std::string& s = cfg.scenario;

  if (s == "solve") {
    const Domain2D dom = cfg.make_domain();
    FieldSpec field;
    const double fc = cfg.f;
    field.f = [fc](const Point2&) { return fc; };
    field.f0 = fc;
    SolverOptions opt;
    opt.resolution = cfg.resolution;
    SolveReport rep;
    const auto u = solve(dom, field, cfg.data(), opt, &rep);
    auto os = detail::open_output(out_dir, "solution.csv", rr);
    u.write_csv(os);
    sum << "anchor: Dirichlet problem det D^2 u = f with constant f\n";
    sum << "unknowns: " << u.unknowns() << "  sweeps: " << rep.sweeps << "  residual: " << detail::num(rep.residual)
        << "  min second difference: " << detail::num(rep.min_second_difference) << "\n";
    if (cfg.domain == "disk" && cfg.case_id.empty() && cfg.phi.empty()) {
      double err = 0;
      for (int k : u.interior_nodes()) {
        const Point2 x = u.node(k);
        err = std::max(err, std::abs(u.node_value(k) - 0.5 * fc * (dot(x, x) - cfg.radius * cfg.radius)));
      }
      sum << "max error vs (f/2)(|x|^2 - r^2): " << detail::num(err) << "\n";
    }
  } else if (s == "envelope" || s == "homogeneous") {
    const Domain2D dom = cfg.make_domain();
    const auto w = cfg.data();
    const bool homo = s == "homogeneous";
    const auto u = homo ? homogeneous_solution(dom, w, cfg.samples, cfg.grading)
                        : convex_envelope(dom, w, cfg.interior_samples, cfg.samples, cfg.grading);
    auto off = detail::open_output(out_dir, homo ? "homogeneous.off" : "envelope.off", rr);
    u.write_off(off);
    const auto probes = interior_grid(dom, 2500);
    auto os = detail::open_output(out_dir, homo ? "homogeneous.csv" : "envelope.csv", rr);
    CsvWriter csv(os, {"x1", "x2", "u", "data", "difference"});
    double diff = 0.0;
    for (const auto& p : probes) {
      const double d = u(p) - w(p);
      diff = std::max(diff, std::abs(d));
      csv.row({p.x, p.y, u(p), w(p), d});
    }
    sum << "anchor: " << (homo ? "homogeneous solution as the sup of affine minorants of the boundary data"
                               : "convex envelope of the obstacle")
        << "\n";
    sum << "faces: " << u.faces().size() << "  gradient sup: " << detail::num(gradient_sup(u)) << "\n";
    sum << "max |u - data| at " << probes.size() << " interior probes: " << detail::num(diff) << "\n";
  } else if (s == "barrier-certify") {
    BarrierSpec b = default_parameters(cfg.k, cfg.f0, 0.0, cfg.q);
    b.M *= cfg.m_scale;
    sum << "anchor: boundary barrier with selected Q, h, M (k=" << cfg.k << ")\n";
    sum << "parameters: q=" << detail::num(b.q) << " Q=" << detail::num(b.Q) << " h=" << detail::num(b.h)
        << (b.h == 1.0 / 256.0 ? " (1/256)" : "") << " M=" << detail::num(b.M)
        << (b.det_condition_vacuous ? "  [f0 = 0: determinant condition vacuous]" : "") << "\n";
    const auto profile = cfg.profile();
    bool all = true;
    auto os = detail::open_output(out_dir, "certification.csv", rr);
    CsvWriter csv(os, {"z1", "h", "interior_samples", "boundary_samples", "min_det_minus_f0", "max_boundary_w", "pass"});
    for (double z : cfg.z1) {
      const auto rt = transformed_profile(profile, z);
      // the layer must stay inside the transformed window
      BarrierSpec bz = default_parameters(cfg.k, cfg.f0, 0.0, cfg.q, admissible_height(rt));
      bz.M *= cfg.m_scale;
      const auto rep = certify(bz, rt, cfg.barrier_resolution);
      all = all && rep.pass();
      csv.row({z, bz.h, static_cast<long>(rep.interior_samples), static_cast<long>(rep.boundary_samples),
               rep.min_det_margin, rep.max_boundary_value, std::string(rep.pass() ? "pass" : "fail")});
      sum << "z1=" << detail::num(z) << ": " << (rep.pass() ? "pass" : "fail")
          << "  min(det - f0)=" << detail::num(rep.min_det_margin)
          << "  max w on boundary=" << detail::num(rep.max_boundary_value) << "\n";
    }
    sum << "certification: " << (all ? "pass" : "fail") << "\n";
    rr.status = all ? 0 : 1;
  } else if (s == "exponent-fit") {
    const Domain2D dom = cfg.make_domain();
    const auto u = homogeneous_solution(dom, cfg.data(), cfg.samples, cfg.grading);
    std::optional<Vec2> dir;
    if (!cfg.direction.empty()) dir = Vec2{cfg.direction[0], cfg.direction[1]};
    const auto fit = holder_fit(view(u, dom), {cfg.x0[0], cfg.x0[1]},
                                cfg.mode == "value" ? FitMode::Value : FitMode::Gradient, dir);
    auto os = detail::open_output(out_dir, "fits.csv", rr);
    write_fit_csv(os, {fit});
    auto rs = detail::open_output(out_dir, "fit_radii.csv", rr);
    CsvWriter csv(rs, {"radius", "sup"});
    for (std::size_t i = 0; i < fit.radii.size(); ++i) csv.row({fit.radii[i], fit.sups[i]});
    sum << "anchor: value growth sup(u - l) ~ C r^(1+alpha) at the flat point"
        << (cfg.case_id.empty() ? "" : " (case " + cfg.case_id + ")") << "\n";
    sum << "fitted alpha: " << (fit.sentinel ? std::string("+inf (u equals its support plane)") : detail::num(fit.alpha))
        << "  C: " << detail::num(fit.constant) << "  R^2: " << detail::num(fit.r2)
        << (fit.inconclusive ? "  [inconclusive]" : "") << (fit.lipschitz_failure ? "  [not Lipschitz]" : "") << "\n";
  } else if (s == "appendix-verify") {
    auto os = detail::open_output(out_dir, "appendix.csv", rr);
    CsvWriter csv(os, {"k", "C", "C_prime", "argmin", "argmax", "asymptotic", "expected_asymptotic", "Q_C", "Q_C_prime",
                       "reflection_mismatches"});
    sum << "anchor: sandwich constants C_k (t^(k-2)+1) <= P_k(t) <= C_k' (t^(k-2)+1)\n";
    bool ok = true;
    for (double kd : cfg.ks) {
      const int k = static_cast<int>(kd);
      const auto p = sandwich_constants(k);
      const auto q = q_sandwich_constants(k);
      const auto refl = reflection_check(k, 10000, cfg.seed);
      ok = ok && p.lower > 0.0 && refl.mismatches == 0;
      csv.row({static_cast<long>(k), p.lower, p.upper, p.argmin, p.argmax, p.asymptotic, p.expected_asymptotic, q.lower,
               q.upper, static_cast<long>(refl.mismatches)});
      sum << "k=" << k << ": C" << k << " = " << detail::num(p.lower) << "  C" << k << "' = " << detail::num(p.upper)
          << "  Q-reflection mismatches: " << refl.mismatches << "\n";
    }
    rr.status = ok ? 0 : 1;
  } else if (s == "doubling-check") {
    const Domain2D dom = cfg.make_domain();
    FieldSpec field;
    if (!cfg.case_id.empty() || !cfg.phi.empty()) {
      // density given through the data channel, taken in absolute value
      const auto g = cfg.data();
      field.f = [g](const Point2& x) { return std::abs(g(x)); };
    } else {
      const double fc = cfg.f;
      field.f = [fc](const Point2&) { return fc; };
    }
    const auto est = doubling_estimate(field, dom, cfg.trials, cfg.seed);
    auto os = detail::open_output(out_dir, "doubling.csv", rr);
    CsvWriter csv(os, {"trials", "min_ratio", "max_ratio", "failure"});
    csv.row({static_cast<long>(est.trials), est.min_ratio, est.max_ratio, static_cast<long>(est.failure)});
    sum << "anchor: doubling condition int_D f <= C_b int_(D/2) f over random convex subsets\n";
    sum << "C_b estimate: " << (est.failure ? std::string("inf (a half set carried no mass)") : detail::num(est.max_ratio))
        << "  min ratio: " << detail::num(est.min_ratio) << "  trials: " << est.trials << "\n";
  } else if (s == "angle-check") {
    const auto profile = cfg.profile();
    std::vector<double> heights;
    for (int i = 0; i <= 16; ++i) heights.push_back(std::pow(10.0, -6.0 + 4.0 * i / 16));
    auto os = detail::open_output(out_dir, "angle.csv", rr);
    CsvWriter csv(os, {"z1", "y2", "p1", "p2", "theta", "ratio", "above"});
    sum << "anchor: angle between boundary tangent and p - (0, y2), normalised by y2^((k-1)/k)\n";
    for (double z : cfg.z1) {
      const auto rep = angle_bound_check(profile, z, heights);
      for (const auto& a : rep.samples)
        csv.row({z, a.height, a.p.x, a.p.y, a.theta, a.ratio, static_cast<long>(a.above)});
      sum << "z1=" << detail::num(z) << ": min ratio " << detail::num(rep.min_ratio) << "  above branch "
          << detail::num(rep.min_ratio_above) << "\n";
    }
  } else if (s == "acceptance") {
    AcceptanceOptions opt;
    opt.seed = cfg.seed;
    opt.barrier_m_scale = cfg.m_scale;
    const auto rows = acceptance_suite(opt);
    auto os = detail::open_output(out_dir, "acceptance.csv", rr);
    CsvWriter csv(os, {"id", "name", "measured", "tolerance", "verdict", "detail"});
    int failed = 0;
    for (const auto& r : rows) {
      csv.row({static_cast<long>(r.id), r.name, r.measured, r.tolerance, std::string(r.pass ? "pass" : "fail"), r.detail});
      sum << ledger_line(r) << "\n";
      if (!r.pass) ++failed;
    }
    sum << (rows.size() - failed) << " of " << rows.size() << " criteria passed\n";
    rr.status = failed ? 1 : 0;
  }
  rr.summary = sum.str();
  auto os = detail::open_output(out_dir, "summary.txt", rr);
  os << rr.summary;
  return rr;
}

}  // namespace malab
