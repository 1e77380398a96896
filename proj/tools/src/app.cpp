#include "pv5cli/app.hpp"

#include <algorithm>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "pv5/errors.hpp"
#include "pv5/ladder.hpp"
#include "pv5/ode.hpp"
#include "pv5/orthopoly.hpp"
#include "pv5/parallel.hpp"
#include "pv5/quadrature.hpp"
#include "pv5/verify.hpp"
#include "pv5cli/report.hpp"

namespace pv5::cli {

namespace {

// Configuration problems; reported with exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Setup {
  ModelParams base;  // t = 0; alpha and k2 at full precision
  PrecisionContext ctx;
  std::vector<Real> ts;
};

Real parse_real(const std::string& text, const char* what) {
  try {
    return Real(std::string_view(text));
  } catch (const std::exception&) {
    throw UsageError(std::string(what) + ": not a number: " + text);
  }
}

std::vector<Real> make_grid(const RunConfig& c) {
  if (c.t) return {parse_real(*c.t, "--t")};
  const TGrid& g = c.grid;
  if (g.count < 1) throw UsageError("--t-count must be at least 1");
  if (g.spacing != "linear" && g.spacing != "log") {
    throw UsageError("--t-spacing must be linear or log");
  }
  const Real start = parse_real(g.start, "--t-start");
  const Real stop = parse_real(g.stop, "--t-stop");
  if (sign(start) < 0) throw UsageError("--t-start must be >= 0");
  if (stop < start) throw UsageError("--t-stop must be >= --t-start");
  const bool log_spaced = g.spacing == "log";
  if (log_spaced && !(sign(start) > 0)) {
    throw UsageError("log spacing needs --t-start > 0");
  }
  std::vector<Real> ts;
  if (g.count == 1) return {start};
  const Real ratio = log_spaced ? log(stop / start) : stop - start;
  for (int i = 0; i < g.count; ++i) {
    const Real f = Real(i) / (g.count - 1);
    ts.push_back(log_spaced ? start * exp(f * ratio) : start + f * ratio);
  }
  ts.back() = stop;
  return ts;
}

Setup make_setup(const RunConfig& c) {
  if (c.n_max < 0) throw UsageError("--n-max must be >= 0");
  Setup s;
  try {
    s.base = validate(c.alpha, c.k2, "0", c.bits, std::max(1, c.n_max));
    PrecisionScope scope(c.bits);
    s.ctx = c.rel_tol ? make_context(c.bits,
                                     parse_real(*c.rel_tol, "--rel-tol"),
                                     c.max_level)
                      : make_context(c.bits, c.max_level);
    s.ts = make_grid(c);
    for (const Real& t : s.ts) {
      (void)validate(s.base.alpha, s.base.k2, t, c.bits, s.base.n_max);
    }
  } catch (const Error& e) {
    if (is_numerical_failure(e.code())) throw;
    throw UsageError(e.what());
  }
  return s;
}

ModelParams at_t(const Setup& s, const Real& t) {
  return validate(s.base.alpha, s.base.k2, t, s.base.precision_bits,
                  s.base.n_max);
}

std::vector<IdentityId> suite_ids(const std::string& suite) {
  if (suite == "required") return ids_for_tier(Tier::Required);
  if (suite == "diagnostic") return ids_for_tier(Tier::Diagnostic);
  if (suite == "all") return ids_for_tier(std::nullopt);
  throw UsageError("--suite must be required, diagnostic or all");
}

void require_alpha_positive(const Setup& s, const std::string& command) {
  if (!s.base.ladder_eligible()) {
    throw UsageError(command + " needs alpha > 0");
  }
}

void require_k2_nonzero(const Setup& s, const std::string& command) {
  if (iszero(s.base.k2)) {
    throw UsageError(command + " divides by k^2 and needs k2 != 0");
  }
}

std::string str(const Real& x) { return x.to_string(); }

std::string opt_str(const std::optional<Real>& x) {
  return x ? x->to_string() : std::string();
}

Json params_json(const RunConfig& c, const Setup& s,
                 const std::vector<Real>& z_samples) {
  Json p = Json::object();
  p["alpha"] = str(s.base.alpha);
  p["k2"] = str(s.base.k2);
  p["t"] = c.t ? Json(str(s.ts.front())) : Json(nullptr);
  if (c.t) {
    p["t_grid"] = nullptr;
  } else {
    Json g = Json::object();
    g["start"] = c.grid.start;
    g["stop"] = c.grid.stop;
    g["count"] = c.grid.count;
    g["spacing"] = c.grid.spacing;
    p["t_grid"] = std::move(g);
  }
  Json ts = Json::array();
  for (const Real& t : s.ts) ts.push_back(str(t));
  p["t_values"] = std::move(ts);
  p["n_max"] = c.n_max;
  p["bits"] = c.bits;
  p["rel_tol"] = str(s.ctx.rel_tol);
  p["max_level"] = c.max_level;
  p["suite"] = c.suite;
  p["seed"] = c.seed;
  Json zs = Json::array();
  for (const Real& z : z_samples) zs.push_back(str(z));
  p["z_samples"] = std::move(zs);
  p["ode_tol"] = c.ode_tol;
  p["system"] = c.system;
  return p;
}

// One job per t, run in parallel, rows concatenated in t order.
template <class F>
std::vector<std::vector<std::string>> rows_per_t(const Setup& s, F&& make) {
  std::vector<std::vector<std::vector<std::string>>> parts(s.ts.size());
  parallel_for(s.ts.size(), [&](std::size_t i) {
    PrecisionScope scope(s.ctx.bits);
    parts[i] = make(at_t(s, s.ts[i]));
  });
  std::vector<std::vector<std::string>> rows;
  for (auto& part : parts) {
    for (auto& row : part) rows.push_back(std::move(row));
  }
  return rows;
}

struct Outcome {
  std::vector<IdentityReport> checks;
  Table table;
  std::vector<Real> z_samples;
  int exit_code = kExitOk;
};

Outcome run_moments(const RunConfig& c, const Setup& s) {
  Outcome o;
  o.table.columns = {"t", "j", "mu_j"};
  o.table.rows = rows_per_t(s, [&](const ModelParams& p) {
    std::vector<std::vector<std::string>> rows;
    for (int j = 0; j <= c.n_max; ++j) {
      rows.push_back({str(p.t), std::to_string(j), str(moment(j, p, s.ctx))});
    }
    return rows;
  });
  return o;
}

Outcome run_recurrence(const RunConfig& c, const Setup& s) {
  Outcome o;
  o.table.columns = {"t", "n", "h_n", "beta_n", "p_n"};
  o.table.rows = rows_per_t(s, [&](const ModelParams& p) {
    const OrthoState st = build_ortho(p, s.ctx);
    std::vector<std::vector<std::string>> rows;
    for (int n = 0; n <= c.n_max; ++n) {
      const auto un = static_cast<std::size_t>(n);
      rows.push_back({str(p.t), std::to_string(n), str(st.h[un]),
                      str(st.beta[un]), str(st.p_sub[un])});
    }
    return rows;
  });
  return o;
}

Outcome run_ladder(const RunConfig& c, const Setup& s) {
  require_alpha_positive(s, "ladder");
  Outcome o;
  o.table.columns = {"t", "n", "R_n", "r_n", "a_n", "b_n"};
  o.table.rows = rows_per_t(s, [&](const ModelParams& p) {
    const OrthoState st = build_ortho(p, s.ctx);
    const LadderState lad = compute_ladder(st);
    std::vector<std::vector<std::string>> rows;
    for (int n = 0; n <= c.n_max; ++n) {
      const auto un = static_cast<std::size_t>(n);
      rows.push_back({str(p.t), std::to_string(n), str(lad.R[un]),
                      str(lad.r[un]), str(lad.a[un]), str(lad.b[un])});
    }
    return rows;
  });
  return o;
}

void add_check_rows(Outcome& o) {
  o.table.columns = {"id", "tier", "n", "t", "z", "residual",
                     "residual_half_step", "pass", "status", "message"};
  for (const auto& r : o.checks) {
    o.table.rows.push_back(
        {std::string(to_string(r.id)), std::string(to_string(r.tier)),
         std::to_string(r.n), str(r.t), opt_str(r.z), str(r.residual),
         opt_str(r.residual_half_step),
         r.pass ? (*r.pass ? "true" : "false") : "",
         std::string(to_string(r.status)), r.message});
  }
}

int checks_exit_code(const std::vector<IdentityReport>& checks,
                     bool required_only) {
  bool failed = false;
  for (const auto& r : checks) {
    const bool counts = !required_only || r.tier == Tier::Required;
    if (!counts) continue;
    if (r.status == CheckStatus::Error && r.error &&
        is_numerical_failure(*r.error)) {
      return kExitNumerical;
    }
    if (r.tier == Tier::Required && r.status != CheckStatus::Skipped &&
        !r.pass.value_or(false)) {
      failed = true;
    }
  }
  return failed ? kExitRequiredFailed : kExitOk;
}

Outcome run_verify(const RunConfig& c, const Setup& s) {
  require_alpha_positive(s, "verify");
  SuiteSpec spec;
  spec.ids = suite_ids(c.suite);
  if (iszero(s.base.k2)) {
    std::string names;
    for (IdentityId id : spec.ids) {
      if (info(id).needs_k2) names += (names.empty() ? "" : ", ") +
                                      std::string(to_string(id));
    }
    if (!names.empty()) {
      throw UsageError("k2 = 0 is singular for " + names);
    }
  }
  for (int n = 0; n <= c.n_max; ++n) spec.n_set.push_back(n);
  spec.t_grid = s.ts;
  Outcome o;
  o.z_samples = sample_z(s.base, c.seed);
  spec.z_samples = o.z_samples;
  o.checks = check_suite(s.base, s.ctx, spec);
  add_check_rows(o);
  o.exit_code = checks_exit_code(o.checks, true);
  return o;
}

Outcome run_pv_residual(const RunConfig& c, const Setup& s) {
  require_alpha_positive(s, "pv-residual");
  require_k2_nonzero(s, "pv-residual");
  const int n_top = std::max(1, c.n_max);
  ModelParams p = s.base;
  p.n_max = n_top + 1;
  Workspace ws(p, s.ctx);
  std::vector<std::pair<int, std::size_t>> jobs;
  for (int n = 1; n <= n_top; ++n) {
    for (std::size_t i = 0; i < s.ts.size(); ++i) jobs.emplace_back(n, i);
  }
  Outcome o;
  o.checks.resize(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t j) {
    o.checks[j] =
        check(IdentityId::PV_PHI, ws, jobs[j].first, s.ts[jobs[j].second]);
  });
  o.table.columns = {"t", "n", "phi_n", "residual", "status"};
  PrecisionScope scope(s.ctx.bits);
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const auto& r = o.checks[j];
    std::string phi;
    if (r.status == CheckStatus::Ok) {
      const auto point = ws.at(r.t);
      const Real m = 2 * r.n + 2 * s.base.alpha + 1;
      phi = str((point->ladder.R[static_cast<std::size_t>(r.n)] + m) / m);
    }
    o.table.rows.push_back({str(r.t), std::to_string(r.n), phi,
                            str(r.residual),
                            std::string(to_string(r.status))});
  }
  o.exit_code = checks_exit_code(o.checks, false);
  return o;
}

// Phi'' from the trajectory's own Phi' by second-order differences, set
// against the Painleve V right-hand side.
Real trajectory_pv_residual(const Trajectory& traj, const Real& t) {
  const ModelParams& p = traj.params;
  const Real m = 2 * traj.n + 2 * p.alpha + 1;
  auto phi_and_slope = [&](const Real& s) -> State2 {
    const State2 y = traj.at(s);
    if (traj.system == OdeSystem::PainleveV) return y;
    const State2 dy = riccati_rhs(p, traj.n, s, y);
    return {(y[0] + m) / m, dy[0] / m};
  };
  const Real span = traj.t_end() - traj.t_begin();
  const Real h = min(1e-4_r * max(t, Real(1)), span / 4);
  Real d2;
  if (t - h < traj.t_begin()) {
    d2 = (-3 * phi_and_slope(t)[1] + 4 * phi_and_slope(t + h)[1] -
          phi_and_slope(t + 2 * h)[1]) /
         (2 * h);
  } else if (t + h > traj.t_end()) {
    d2 = (3 * phi_and_slope(t)[1] - 4 * phi_and_slope(t - h)[1] +
          phi_and_slope(t - 2 * h)[1]) /
         (2 * h);
  } else {
    d2 = (phi_and_slope(t + h)[1] - phi_and_slope(t - h)[1]) / (2 * h);
  }
  const State2 y = phi_and_slope(t);
  const Real rhs = pv_rhs(p, traj.n, t, y)[1];
  return abs(d2 - rhs) / (1 + max(abs(d2), abs(rhs)));
}

Outcome run_ode(const RunConfig& c, const Setup& s, std::ostream& err) {
  require_alpha_positive(s, "ode");
  require_k2_nonzero(s, "ode");
  if (c.system != "riccati" && c.system != "pv") {
    throw UsageError("--system must be riccati or pv");
  }
  if (s.ts.size() < 2 || !(s.ts.front() < s.ts.back())) {
    throw UsageError("ode needs a t grid with --t-stop > --t-start");
  }
  if (!(sign(s.ts.front()) > 0)) throw UsageError("ode needs t > 0");
  PrecisionScope scope(s.ctx.bits);
  const Real tol = parse_real(c.ode_tol, "--ode-tol");
  if (!(sign(tol) > 0)) throw UsageError("--ode-tol must be > 0");
  const int n = c.n_max;
  const ModelParams p0 = at_t(s, s.ts.front());

  Trajectory traj;
  Outcome o;
  try {
    if (c.system == "riccati") {
      traj = integrate_riccati(p0, n, s.ts.front(), s.ts.back(),
                               riccati_initial(p0, s.ctx, n, s.ts.front()),
                               tol);
    } else {
      traj = integrate_pv(p0, n, s.ts.front(), s.ts.back(),
                          pv_initial(p0, s.ctx, n, s.ts.front()), tol);
    }
  } catch (const IntegrationHalted& e) {
    err << "pv5lab: " << e.what() << "\n";
    traj = e.partial();
    o.exit_code = kExitNumerical;
  }

  std::vector<Real> ts;
  for (const Real& t : s.ts) {
    if (t <= traj.t_end()) ts.push_back(t);
  }
  const Real m = 2 * n + 2 * s.base.alpha + 1;
  std::vector<std::vector<std::string>> rows(ts.size());
  parallel_for(ts.size(), [&](std::size_t i) {
    PrecisionScope inner(s.ctx.bits);
    ModelParams p = at_t(s, ts[i]);
    p.n_max = std::max(1, n);
    const OrthoState st = build_ortho(p, s.ctx);
    const State2 y = traj.at(ts[i]);
    std::string R, r, phi;
    if (traj.system == OdeSystem::Riccati) {
      R = str(y[0]);
      r = str(y[1]);
      phi = str((y[0] + m) / m);
    } else {
      // R from Phi, r from the R' equation.
      const Real Rv = m * y[0] - m;
      const Real dR = m * y[1];
      const Real& K = p.k2;
      const Real& t = ts[i];
      const Real cc = 2 * (K * (n + p.alpha + 1) + t);
      R = str(Rv);
      r = str((cc * Rv + K * square(Rv) + 2 * m * t - 2 * K * t * dR) /
              (2 * (m + Rv)));
      phi = str(y[0]);
    }
    std::string pv;
    if (traj.t_points.size() > 1) pv = str(trajectory_pv_residual(traj, ts[i]));
    rows[i] = {str(ts[i]), R, r,
               n >= 1 ? str(st.beta[static_cast<std::size_t>(n)]) : "0",
               phi, pv};
  });
  o.table.columns = {"t", "R_n", "r_n", "beta_n", "phi_n", "pv_residual"};
  o.table.rows = std::move(rows);
  return o;
}

}  // namespace

int run(const RunConfig& config, std::ostream& err) {
  try {
    const Setup setup = make_setup(config);
    PrecisionScope scope(config.bits);
    Outcome o;
    const std::string& cmd = config.command;
    if (cmd == "moments") {
      o = run_moments(config, setup);
    } else if (cmd == "recurrence") {
      o = run_recurrence(config, setup);
    } else if (cmd == "ladder") {
      o = run_ladder(config, setup);
    } else if (cmd == "verify") {
      o = run_verify(config, setup);
    } else if (cmd == "ode") {
      o = run_ode(config, setup, err);
    } else if (cmd == "pv-residual") {
      o = run_pv_residual(config, setup);
    } else {
      throw UsageError("unknown subcommand '" + cmd + "'");
    }
    const Json report =
        make_report(cmd, params_json(config, setup, o.z_samples), o.checks,
                    summarize(o.checks), o.table, utc_timestamp());
    emit_report(report, config.out_json);
    if (config.out_csv) write_csv(o.table, *config.out_csv);
    if (o.exit_code == kExitRequiredFailed) {
      err << "pv5lab: a REQUIRED check failed\n";
    }
    return o.exit_code;
  } catch (const UsageError& e) {
    err << "pv5lab: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "pv5lab: " << e.what() << "\n";
    return is_numerical_failure(e.code()) ? kExitNumerical : kExitUsage;
  } catch (const std::exception& e) {
    err << "pv5lab: " << e.what() << "\n";
    return kExitNumerical;
  }
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Ladder operators and Painleve V for a singularly perturbed "
               "Jacobi weight"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--alpha", cfg.alpha, "Jacobi exponent, alpha >= 0")
        ->capture_default_str();
    sub->add_option("--k2", cfg.k2, "k^2, any sign")->capture_default_str();
    sub->add_option("--t", cfg.t, "single deformation time (overrides grid)");
    sub->add_option("--t-start", cfg.grid.start)->capture_default_str();
    sub->add_option("--t-stop", cfg.grid.stop)->capture_default_str();
    sub->add_option("--t-count", cfg.grid.count)->capture_default_str();
    sub->add_option("--t-spacing", cfg.grid.spacing)
        ->check(CLI::IsMember({"linear", "log"}))
        ->capture_default_str();
    sub->add_option("--n-max", cfg.n_max)->capture_default_str();
    sub->add_option("--bits", cfg.bits, "working precision in bits")
        ->capture_default_str();
    sub->add_option("--rel-tol", cfg.rel_tol, "quadrature tolerance");
    sub->add_option("--max-level", cfg.max_level, "quadrature level cap")
        ->capture_default_str();
    sub->add_option("--out-json", cfg.out_json, "report path, - for stdout")
        ->capture_default_str();
    sub->add_option("--out-csv", cfg.out_csv, "table path");
    sub->add_option("--seed", cfg.seed, "z-sample seed")
        ->capture_default_str();
  };

  struct Command {
    const char* name;
    const char* help;
  };
  const Command commands[] = {
      {"moments", "moments mu_j of the weight"},
      {"recurrence", "h_n, beta_n and p(n) by the Stieltjes procedure"},
      {"ladder", "R_n, r_n, a_n, b_n"},
      {"verify", "identity checks"},
      {"ode", "Riccati or Painleve V trajectory from quadrature data"},
      {"pv-residual", "Painleve V residual of Phi_n along the t grid"},
  };
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_common(sub);
    if (std::string_view(c.name) == "verify") {
      sub->add_option("--suite", cfg.suite)
          ->check(CLI::IsMember({"required", "diagnostic", "all"}))
          ->capture_default_str();
    }
    if (std::string_view(c.name) == "ode") {
      sub->add_option("--ode-tol", cfg.ode_tol)->capture_default_str();
      sub->add_option("--system", cfg.system)
          ->check(CLI::IsMember({"riccati", "pv"}))
          ->capture_default_str();
    }
    sub->callback([&cfg, name = std::string(c.name)] { cfg.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  return run(cfg, std::cerr);
}

}  // namespace pv5::cli
