#pragma once

// Command-line front end: simulate, compare, kostin and transform-check.
//
// Every option may also come from a flat JSON file given with --config (keys
// are the long option names without dashes) or from a --preset. Precedence is
// preset < config < command line.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pinney/pinney.hpp"

namespace pinney::cli {

inline constexpr const char* kSchemaVersion = "1";

enum ExitCode : int { kOk = 0, kValidation = 1, kNumerical = 2, kCollapse = 3 };

using Json = nlohmann::ordered_json;

/// Frequency, damping and inverse-cubic coefficient shared by the Pinney commands.
struct PhysicsOptions {
  std::string omega = "constant";
  double omega0 = 1.0;
  double gamma = 0.7;
  double k = 1.0;
  double eps = 0.0;

  PinneyParams params() const {
    PinneyParams p{eps, k, profile_from_name(omega, omega0, gamma)};
    p.validate();
    return p;
  }
};

/// Initial data either as (x0, v0) or as an asymptotic orbit (A0, t0, phi).
struct InitialOptions {
  double x0 = 0.0, v0 = 0.0;
  double A0 = 0.0, t0 = 0.0, phi = 0.0;
  CLI::Option* x0_opt = nullptr;
  CLI::Option* v0_opt = nullptr;
  CLI::Option* A0_opt = nullptr;

  bool has_orbit() const { return A0_opt->count() > 0; }

  AsymptoticSolution orbit(const PinneyParams& p) const {
    require(has_orbit(), ErrorCode::InvalidArgument, "missing required key --A0");
    AsymptoticSolution sol{p, A0, t0, phi};
    sol.validate();
    return sol;
  }

  State<2> state(const PinneyParams& p) const {
    if (x0_opt->count() > 0 || v0_opt->count() > 0) {
      require(x0_opt->count() > 0, ErrorCode::InvalidArgument, "missing required key --x0");
      require(v0_opt->count() > 0, ErrorCode::InvalidArgument, "missing required key --v0");
      return {x0, v0};
    }
    require(has_orbit(), ErrorCode::InvalidArgument, "missing required key --x0 (or --A0)");
    const auto start = eval_x0(orbit(p), 0.0);
    return {start.x, start.v};
  }
};

struct OutputOptions {
  std::string out_dir = ".";
  std::string scenario;

  std::filesystem::path path(const std::string& suffix) const {
    std::filesystem::create_directories(out_dir);
    return std::filesystem::path(out_dir) / (scenario + suffix);
  }
};

namespace detail {

inline void add_physics(CLI::App* app, PhysicsOptions& o) {
  app->add_option("--omega", o.omega, "constant|decaying|growing|oscillating|tabulated:<path>");
  app->add_option("--omega0", o.omega0, "Omega(0)")->required();
  app->add_option("--gamma", o.gamma, "oscillating-profile modulation depth");
  app->add_option("--k", o.k, "inverse-cubic coefficient")->required();
  app->add_option("--eps", o.eps, "damping and slowness parameter")->required();
}

inline void add_initial(CLI::App* app, InitialOptions& o) {
  o.x0_opt = app->add_option("--x0", o.x0, "initial position");
  o.v0_opt = app->add_option("--v0", o.v0, "initial velocity");
  o.A0_opt = app->add_option("--A0", o.A0, "asymptotic amplitude");
  app->add_option("--t0", o.t0, "asymptotic phase origin");
  app->add_option("--phi", o.phi, "asymptotic phase offset");
}

inline void add_output(CLI::App* app, OutputOptions& o) {
  app->add_option("--out-dir", o.out_dir, "directory for output files");
  app->add_option("--scenario", o.scenario, "file-name stem for outputs");
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p, std::ios::binary);
  require(static_cast<bool>(os), ErrorCode::InvalidArgument, "cannot write '" + p.string() + "'");
  return os;
}

inline void emit_json(const Json& j, const std::filesystem::path& p, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  open_out(p) << text;
  out << text;
}

inline Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

/// Values of a flat JSON object rendered as `--key=value` arguments.
inline std::vector<std::string> config_arguments(const Json& cfg, CLI::App* sub) {
  require(cfg.is_object(), ErrorCode::InvalidArgument, "config must be a flat JSON object");
  std::vector<std::string> out;
  for (const auto& [key, value] : cfg.items()) {
    if (key == "preset" || key == "config") continue;
    require(sub->get_option_no_throw("--" + key) != nullptr, ErrorCode::InvalidArgument,
            "unknown config key '" + key + "' for " + sub->get_name());
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_boolean()) {
      text = value.get<bool>() ? "true" : "false";
    } else if (value.is_number()) {
      text = value.is_number_float() ? format_double(value.get<double>()) : value.dump();
    } else if (value.is_array()) {
      for (const auto& item : value) {
        require(item.is_number(), ErrorCode::InvalidArgument, "config key '" + key + "' must hold numbers");
        if (!text.empty()) text += ',';
        text += item.is_number_float() ? format_double(item.get<double>()) : item.dump();
      }
    } else {
      fail(ErrorCode::InvalidArgument, "config key '" + key + "' must be a scalar or a list of numbers");
    }
    out.push_back("--" + key + "=" + text);
  }
  return out;
}

/// Parameter sets of the three slowly varying oscillator figures.
inline std::vector<std::string> preset_arguments(const std::string& name, const std::string& command) {
  std::string profile;
  if (name == "fig1") {
    profile = "constant";
  } else if (name == "fig2") {
    profile = "decaying";
  } else if (name == "fig3") {
    profile = "growing";
  } else {
    fail(ErrorCode::InvalidArgument, "unknown preset '" + name + "' (expected fig1, fig2 or fig3)");
  }
  require(command != "kostin", ErrorCode::InvalidArgument, "kostin takes no preset; its defaults are the reference run");
  std::vector<std::string> out = {"--omega=" + profile, "--omega0=1", "--k=1", "--eps=0.1",
                                  "--A0=2", "--t0=0", "--phi=0", "--scenario=" + name};
  // transform-check picks its own span per transform.
  if (command != "transform-check") out.push_back("--t-end=50");
  return out;
}

/// Pull `--name value` or `--name=value` out of the raw arguments.
inline std::optional<std::string> find_value(const std::vector<std::string>& args, const std::string& name) {
  std::optional<std::string> found;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == name && i + 1 < args.size()) {
      found = args[i + 1];
    } else if (args[i].rfind(name + "=", 0) == 0) {
      found = args[i].substr(name.size() + 1);
    }
  }
  return found;
}

inline std::string status_name(IntegrationStatus s) { return std::string(to_string(s)); }

}  // namespace detail

// ---------------------------------------------------------------------------

struct SimulateCommand {
  PhysicsOptions physics;
  InitialOptions initial;
  OutputOptions output{".", "simulate"};
  std::string equation = "pinney";
  double t_end = 50.0;
  std::size_t samples = 2001;
  double tol = 1e-10;
  double collapse_threshold = kDefaultCollapseThreshold;

  void attach(CLI::App* app) {
    detail::add_physics(app, physics);
    detail::add_initial(app, initial);
    detail::add_output(app, output);
    app->add_option("--equation", equation, "pinney (damped Pinney) or classical (damped linear oscillator)")
        ->check(CLI::IsMember({"pinney", "classical"}));
    app->add_option("--t-end", t_end, "final time");
    app->add_option("--samples", samples, "number of uniform output samples");
    app->add_option("--tol", tol, "absolute and relative integrator tolerance");
    app->add_option("--collapse-threshold", collapse_threshold, "|x| at which a collapse is declared");
  }

  int run(std::ostream& out) const {
    const auto p = physics.params();
    const auto y0 = initial.state(p);
    require(t_end > 0.0, ErrorCode::InvalidArgument, "t-end must be positive");
    IntegratorOptions opts;
    opts.tol = {tol, tol};
    Trajectory traj;
    const auto times = uniform_times(0.0, t_end, samples);
    if (equation == "classical") {
      traj = integrate(classical_field(p), y0, 0.0, t_end, times, opts);
    } else {
      opts.collapse_threshold = collapse_threshold;
      traj = integrate(damped_pinney_field(p), y0, 0.0, t_end, times, opts);
    }
    {
      auto os = detail::open_out(output.path("_trajectory.csv"));
      write_trajectory_csv(os, traj);
    }
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["scenario"] = output.scenario;
    j["equation"] = equation;
    j["omega"] = physics.omega;
    j["omega0"] = physics.omega0;
    j["k"] = p.k;
    j["eps"] = p.eps;
    j["x0"] = y0[0];
    j["v0"] = y0[1];
    j["t_end"] = t_end;
    j["status"] = detail::status_name(traj.status);
    j["t_star"] = detail::optional_number(traj.t_star);
    j["rows"] = traj.samples.size();
    j["steps"] = traj.stats.steps;
    j["rejected_steps"] = traj.stats.rejected;
    detail::emit_json(j, output.path("_summary.json"), out);
    if (traj.status == IntegrationStatus::StepFailure) return kNumerical;
    if (traj.status == IntegrationStatus::CollapseDetected && p.k > 0.0) return kCollapse;
    return kOk;
  }
};

struct CompareCommand {
  PhysicsOptions physics;
  InitialOptions initial;
  OutputOptions output{".", "compare"};
  double t_end = 50.0;
  std::size_t samples = 2000;
  bool envelope = false;
  std::vector<double> eps_list;

  void attach(CLI::App* app) {
    detail::add_physics(app, physics);
    detail::add_initial(app, initial);
    detail::add_output(app, output);
    app->add_option("--t-end", t_end, "final time");
    app->add_option("--samples", samples, "number of uniform comparison samples");
    app->add_flag("--envelope", envelope, "also write the numeric envelope midline");
    app->add_option("--eps-list", eps_list, "increasing eps values for a convergence study")->delimiter(',');
  }

  int run(std::ostream& out) const {
    const auto sol = initial.orbit(physics.params());
    auto report = compare(sol, t_end, samples);
    std::optional<ConvergenceStudy> study;
    if (!eps_list.empty()) {
      study = convergence_study(sol, eps_list, t_end, samples);
      const auto at = [&](double eps) -> std::optional<double> {
        for (const auto& p : study->points) {
          if (p.eps == eps) return p.max_abs_err;
        }
        return std::nullopt;
      };
      const auto e1 = at(sol.params.eps), e2 = at(0.5 * sol.params.eps);
      if (e1 && e2) report.convergence_ratio = *e1 / *e2;
    }
    {
      auto os = detail::open_out(output.path("_pairs.csv"));
      os << "t,x_numeric,x_asymptotic,abs_err\n";
      for (const auto& s : report.pairs) write_csv_row(os, {s.t, s.x_numeric, s.x_asymptotic, s.abs_err});
    }
    if (envelope) {
      require(!report.envelope_midline.empty(), ErrorCode::TooFewExtrema, "trajectory has too few extrema for an envelope");
      auto os = detail::open_out(output.path("_midline.csv"));
      os << "t,midline,fixed_point\n";
      for (const auto& m : report.envelope_midline) write_csv_row(os, {m.t, m.value, fixed_point(sol.params, m.t)});
    }
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["scenario"] = output.scenario;
    j["omega"] = physics.omega;
    j["eps"] = report.eps;
    j["max_abs_err"] = report.max_abs_err;
    j["rms_err"] = report.rms_err;
    j["sample_count"] = report.sample_count;
    j["midline_points"] = report.envelope_midline.size();
    if (report.convergence_ratio) j["convergence_ratio"] = *report.convergence_ratio;
    if (study) {
      Json pts = Json::array();
      for (const auto& p : study->points) pts.push_back({{"eps", p.eps}, {"max_abs_err", p.max_abs_err}});
      j["convergence"] = pts;
      j["fitted_order"] = detail::optional_number(study->fitted_order);
      j["breakdown_threshold"] = study->breakdown_threshold;
      j["breakdown_eps"] = detail::optional_number(study->breakdown_eps);
    }
    detail::emit_json(j, output.path("_compare.json"), out);
    return kOk;
  }
};

struct KostinCommand {
  std::string omega = "oscillating";
  double omega0 = 1.0, gamma = 0.7, hbar = 1.0, mass = 1.0, eps = 0.1;
  double A0 = 4.0, t0 = 0.0, phi = 0.0, qcl0 = 1.0, qcl_dot0 = 0.0;
  double x0 = 0.0, xdot0 = 0.0;
  CLI::Option* x0_opt = nullptr;
  CLI::Option* xdot0_opt = nullptr;
  std::string mode = "asymptotic";
  double t_end = 60.0;
  std::size_t samples = 400;
  std::size_t q_points = 400;
  double q_min = 0.0, q_max = 0.0;
  CLI::Option* q_min_opt = nullptr;
  CLI::Option* q_max_opt = nullptr;
  double velocity_q = 0.0;
  OutputOptions output{".", "kostin"};

  void attach(CLI::App* app) {
    app->add_option("--omega", omega, "frequency profile name");
    app->add_option("--omega0", omega0, "Omega(0)");
    app->add_option("--gamma", gamma, "oscillating-profile modulation depth");
    app->add_option("--hbar", hbar, "Planck constant");
    app->add_option("--mass", mass, "particle mass");
    app->add_option("--eps", eps, "friction / slowness parameter");
    app->add_option("--A0", A0, "asymptotic width amplitude");
    app->add_option("--t0", t0, "asymptotic phase origin");
    app->add_option("--phi", phi, "asymptotic phase offset");
    app->add_option("--qcl0", qcl0, "initial packet centre");
    app->add_option("--qcl-dot0", qcl_dot0, "initial packet centre velocity");
    x0_opt = app->add_option("--x0", x0, "initial width (overrides the orbit)");
    xdot0_opt = app->add_option("--xdot0", xdot0, "initial width rate");
    app->add_option("--mode", mode, "asymptotic, numeric or both")->check(CLI::IsMember({"asymptotic", "numeric", "both"}));
    app->add_option("--t-end", t_end, "final time");
    app->add_option("--samples", samples, "number of time samples");
    app->add_option("--q-points", q_points, "number of q grid points");
    q_min_opt = app->add_option("--q-min", q_min, "lower end of the q grid");
    q_max_opt = app->add_option("--q-max", q_max, "upper end of the q grid");
    app->add_option("--velocity-q", velocity_q, "position of the velocity probe");
    detail::add_output(app, output);
  }

  KostinParams params() const {
    KostinParams p;
    p.hbar = hbar;
    p.mass = mass;
    p.eps = eps;
    p.profile = profile_from_name(omega, omega0, gamma);
    p.q_cl_init = {qcl0, qcl_dot0};
    if (x0_opt->count() > 0 || xdot0_opt->count() > 0) {
      require(x0_opt->count() > 0, ErrorCode::InvalidArgument, "missing required key --x0");
      p.width_init = WidthState{x0, xdot0};
    } else {
      p.width_init = WidthOrbit{A0, t0, phi};
    }
    p.validate();
    return p;
  }

  int run(std::ostream& out) const {
    const auto p = params();
    require(t_end > 0.0, ErrorCode::InvalidArgument, "t-end must be positive");
    const auto primary_mode = mode == "numeric" ? KostinMode::Numeric : KostinMode::Asymptotic;
    const auto series = evolve_kostin(p, t_end, primary_mode, samples);
    if (series.status == IntegrationStatus::StepFailure) fail(ErrorCode::StepFailure, "kostin run failed to advance");
    if (series.status == IntegrationStatus::CollapseDetected) fail(ErrorCode::UnexpectedCollapse, "packet width collapsed");
    std::optional<KostinSeries> numeric;
    if (mode == "both") {
      numeric = evolve_kostin(p, t_end, KostinMode::Numeric, samples);
      if (numeric->status != IntegrationStatus::Completed) {
        fail(numeric->status == IntegrationStatus::StepFailure ? ErrorCode::StepFailure : ErrorCode::UnexpectedCollapse,
             "numeric width run did not complete");
      }
    }
    std::vector<double> q;
    if (q_min_opt->count() > 0 || q_max_opt->count() > 0) {
      require(q_min_opt->count() > 0 && q_max_opt->count() > 0 && q_max > q_min, ErrorCode::InvalidArgument,
              "--q-min and --q-max must both be given with q-min < q-max");
      q = uniform_times(q_min, q_max, q_points);
    } else {
      q = default_q_grid(series, q_points);
    }
    const auto fields = build_fields(series, q);

    {
      auto os = detail::open_out(output.path("_width.csv"));
      if (numeric) {
        os << "t,x_asymptotic,xdot_asymptotic,x_numeric,xdot_numeric,q_cl,q_cl_dot\n";
        for (std::size_t i = 0; i < series.samples.size(); ++i) {
          const auto& a = series.samples[i];
          const auto& b = numeric->samples[i];
          write_csv_row(os, {a.t, a.x, a.xdot, b.x, b.xdot, a.q_cl, a.q_cl_dot});
        }
      } else {
        os << "t,x,xdot,q_cl,q_cl_dot\n";
        for (const auto& s : series.samples) write_csv_row(os, {s.t, s.x, s.xdot, s.q_cl, s.q_cl_dot});
      }
    }
    {
      auto os = detail::open_out(output.path("_fields.csv"));
      os << "t,q,n,u\n";
      for (std::size_t it = 0; it < fields.t.size(); ++it) {
        for (std::size_t iq = 0; iq < fields.q.size(); ++iq) {
          const auto idx = fields.index(it, iq);
          write_csv_row(os, {fields.t[it], fields.q[iq], fields.n[idx], fields.u[idx]});
        }
      }
    }
    {
      const auto u = velocity_at(series, velocity_q);
      auto os = detail::open_out(output.path("_velocity.csv"));
      os << "t,u\n";
      for (std::size_t i = 0; i < u.size(); ++i) write_csv_row(os, {series.samples[i].t, u[i]});
    }

    double worst_norm = 0.0;
    const double h = fields.q[1] - fields.q[0];
    for (std::size_t it = 0; it < fields.t.size(); ++it) {
      double sum = 0.0;
      for (std::size_t iq = 0; iq < fields.q.size(); ++iq) {
        sum += (iq == 0 || iq + 1 == fields.q.size() ? 0.5 : 1.0) * fields.n[fields.index(it, iq)];
      }
      worst_norm = std::max(worst_norm, std::abs(sum * h - 1.0));
    }
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["scenario"] = output.scenario;
    j["mode"] = mode;
    j["samples"] = samples;
    j["q_points"] = fields.q.size();
    j["q_range"] = {fields.q.front(), fields.q.back()};
    j["max_normalization_error"] = worst_norm;
    j["continuity_residual"] = continuity_residual(fields);
    if (numeric) {
      double diff = 0.0;
      for (std::size_t i = 0; i < series.samples.size(); ++i) {
        diff = std::max(diff, std::abs(series.samples[i].x - numeric->samples[i].x));
      }
      j["max_width_difference"] = diff;
    }
    detail::emit_json(j, output.path("_summary.json"), out);
    return kOk;
  }
};

struct TransformCommand {
  PhysicsOptions physics;
  InitialOptions initial;
  OutputOptions output{".", "transform"};
  std::string transform;
  std::size_t samples = 0;
  std::size_t refine = 1;
  double t_end = 0.0;
  CLI::Option* t_end_opt = nullptr;
  double W = 0.0;
  double rho0 = 1.0;
  double rho_dot0 = 0.0;
  CLI::Option* rho_dot0_opt = nullptr;

  void attach(CLI::App* app) {
    detail::add_physics(app, physics);
    detail::add_initial(app, initial);
    detail::add_output(app, output);
    app->add_option("--transform", transform, "e3, emden-fowler, abel or mass")->required();
    app->add_option("--samples", samples, "grid size (default depends on the transform)");
    app->add_option("--refine", refine, "also evaluate on a grid this many times finer");
    t_end_opt = app->add_option("--t-end", t_end, "final time (default depends on the transform)");
    app->add_option("--W", W, "constant W of the quasi-invariance map");
    app->add_option("--rho0", rho0, "rho(0) of the quasi-invariance map");
    rho_dot0_opt = app->add_option("--rho-dot0", rho_dot0, "rho'(0) of the quasi-invariance map (default -eps)");
  }

  struct Setup {
    std::size_t samples;
    double t_end;
  };

  Setup defaults(const PinneyParams& p, const State<2>& y0) const {
    Setup s{1000, 1.0};
    if (transform == "e3") {
      s = {10000, 1.2};
    } else if (transform == "emden-fowler") {
      s = {1000, 1.5};
    } else if (transform == "mass") {
      s = {1000, 10.0};
    } else if (transform == "abel") {
      // Stop just short of the first turning point.
      const auto probe = integrate(damped_pinney_field(p), y0, 0.0, 100.0, uniform_times(0.0, 100.0, 20001));
      double turn = 100.0;
      for (std::size_t i = 1; i < probe.samples.size(); ++i) {
        if (probe.samples[i].v * probe.samples[0].v <= 0.0 && probe.samples[0].v != 0.0) {
          turn = probe.samples[i].t;
          break;
        }
      }
      s = {1000, 0.99 * turn};
    } else {
      fail(ErrorCode::InvalidArgument, "unknown transform '" + transform + "' (expected e3, emden-fowler, abel or mass)");
    }
    if (samples > 0) s.samples = samples;
    if (t_end_opt->count() > 0) s.t_end = t_end;
    require(s.t_end > 0.0, ErrorCode::InvalidArgument, "t-end must be positive");
    return s;
  }

  double residual(const PinneyParams& p, const State<2>& y0, const Setup& s, std::size_t n) const {
    const auto times = uniform_times(0.0, s.t_end, n);
    IntegratorOptions opts;
    opts.tol = {1e-13, 1e-13};
    if (transform == "e3" || transform == "emden-fowler") {
      const State<2> r0{rho0, rho_dot0_opt->count() > 0 ? rho_dot0 : -p.eps};
      const auto map = build_quasi_invariance(p, r0, transform == "e3" ? W : 0.0, s.t_end);
      if (transform == "e3") {
        return transform_residual_e3(map, integrate(damped_pinney_field(p), y0, 0.0, s.t_end, times, opts));
      }
      require(p.profile.kind() == ProfileKind::Constant, ErrorCode::InvalidArgument,
              "the Emden-Fowler closed form needs a constant frequency");
      double worst = 0.0;
      for (double t : times) {
        const auto ef = emden_fowler_mu(map, t);
        worst = std::max(worst, std::abs(ef.mu - emden_fowler_mu_closed_form(p.k, p.eps, p.profile.omega0(), ef.T)));
      }
      return worst;
    }
    if (transform == "abel") {
      return abel_residual(p, integrate(damped_pinney_field(p), y0, 0.0, s.t_end, times, opts));
    }
    const MassPinneySystem sys{p.k, p.profile, p.eps, SmoothFunction::exponential(1.0, 2.0 * p.eps)};
    const auto traj = integrate(mass_pinney_field(sys), y0, 0.0, s.t_end, times, opts);
    require(traj.status == IntegrationStatus::Completed, ErrorCode::StepFailure, "mass-Pinney run did not complete");
    return mass_pinney_to_standard(sys, SmoothFunction::constant(1.0), traj);
  }

  int run(std::ostream& out) const {
    const auto p = physics.params();
    const auto y0 = initial.state(p);
    const auto s = defaults(p, y0);
    require(refine >= 1, ErrorCode::InvalidArgument, "refine must be at least 1");
    const double r = residual(p, y0, s, s.samples);
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["transform"] = transform;
    j["grid_size"] = s.samples;
    j["t_end"] = s.t_end;
    j["max_residual"] = r;
    if (refine > 1) {
      const double fine = residual(p, y0, s, s.samples * refine);
      j["refined_grid_size"] = s.samples * refine;
      j["refined_residual"] = fine;
      j["refinement_ratio"] = fine > 0.0 ? Json(r / fine) : Json(nullptr);
    }
    detail::emit_json(j, output.path("_" + transform + ".json"), out);
    return kOk;
  }
};

// ---------------------------------------------------------------------------

inline int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::StepFailure: return kNumerical;
    case ErrorCode::UnexpectedCollapse: return kCollapse;
    default: return kValidation;
  }
}

/// Run the CLI on `args` (without the program name).
inline int run(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Damped Pinney equation: simulation, asymptotics and figure data"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  SimulateCommand simulate;
  CompareCommand cmp;
  KostinCommand kostin;
  TransformCommand transform;
  std::string config_path, preset;
  struct Sub {
    CLI::App* app;
    std::function<int(std::ostream&)> run;
  };
  std::vector<Sub> subs;
  auto add = [&](const char* name, const char* help, auto& cmd) {
    auto* sub = app.add_subcommand(name, help);
    cmd.attach(sub);
    sub->add_option("--config", config_path, "flat JSON file of option values");
    if (std::string(name) != "kostin") sub->add_option("--preset", preset, "fig1, fig2 or fig3");
    subs.push_back({sub, [&cmd](std::ostream& o) { return cmd.run(o); }});
  };
  add("simulate", "integrate the damped Pinney (or classical) equation", simulate);
  add("compare", "compare the zeroth-order asymptotic solution with integration", cmp);
  add("kostin", "Gaussian packet of the Kostin equation: width, density, velocity", kostin);
  add("transform-check", "residuals of the equation transformations", transform);

  try {
    std::vector<std::string> full;
    if (!args.empty()) {
      CLI::App* sub = nullptr;
      for (const auto& s : subs) {
        if (s.app->get_name() == args[0]) sub = s.app;
      }
      full.push_back(args[0]);
      if (sub != nullptr) {
        std::vector<std::string> rest(args.begin() + 1, args.end());
        std::optional<Json> cfg;
        if (auto path = detail::find_value(rest, "--config")) {
          std::ifstream in(*path);
          require(static_cast<bool>(in), ErrorCode::InvalidArgument, "cannot open config '" + *path + "'");
          try {
            cfg = Json::parse(in);
          } catch (const Json::parse_error&) {
            fail(ErrorCode::InvalidArgument, "config '" + *path + "' is not valid JSON");
          }
        }
        auto chosen = detail::find_value(rest, "--preset");
        if (!chosen && cfg && cfg->contains("preset")) {
          require((*cfg)["preset"].is_string(), ErrorCode::InvalidArgument, "config key 'preset' must be a string");
          chosen = (*cfg)["preset"].get<std::string>();
        }
        if (chosen) {
          for (auto& a : detail::preset_arguments(*chosen, args[0])) full.push_back(std::move(a));
        }
        if (cfg) {
          for (auto& a : detail::config_arguments(*cfg, sub)) full.push_back(std::move(a));
        }
        full.insert(full.end(), rest.begin(), rest.end());
      } else {
        full.insert(full.end(), args.begin() + 1, args.end());
      }
    }
    std::reverse(full.begin(), full.end());
    app.parse(full);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }

  try {
    for (const auto& s : subs) {
      if (s.app->parsed()) return s.run(out);
    }
    return kValidation;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }
}

}  // namespace pinney::cli
