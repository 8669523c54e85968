#pragma once

// solve / verify / demo drivers: grid evaluation, CSV and JSON emission.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gbdt/bispectral.hpp"
#include "gbdt/cli/config.hpp"
#include "gbdt/cli/demos.hpp"
#include "gbdt/rational.hpp"
#include "gbdt/three_wave.hpp"
#include "gbdt/verification.hpp"

namespace gbdt::cli {

/// Shortest round-trip decimal form.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json error_record(const Error& e) {
  return {{"error", {{"kind", to_string(e.kind())}, {"message", e.what()}}}};
}

struct Context {
  RunConfig config;
  SeedSpec spec;
  GBDTParams params;
  PropagateOptions opts;
  StencilDomain domain;
};

inline Context make_context(RunConfig cfg, bool allow_negative = false) {
  if (allow_negative) cfg.allow_negative_domain = true;
  SeedSpec spec = make_seed_spec(cfg);
  const auto violations = validate_seed(spec);
  if (!violations.empty()) fail(ErrorKind::InvalidArgument, "invalid seed: " + violations.front());
  GBDTParams params = make_params(cfg);
  require_admissible(params, spec, cfg.tolerances.exact);

  PropagateOptions opts;
  opts.method = cfg.method.kind == "rk4" ? Method::rk4 : Method::exact;
  opts.h = cfg.method.h;
  opts.allow_negative = cfg.allow_negative_domain;
  opts.identity_tol = cfg.tolerances.exact;
  opts.condition_limit = cfg.tolerances.condition_limit;
  check_domain(cfg.grid.x0, cfg.grid.t0, opts);

  StencilDomain dom;
  if (!cfg.allow_negative_domain) dom = {0.0, 0.0};
  return {std::move(cfg), std::move(spec), std::move(params), opts, dom};
}

struct NodeResult {
  double x = 0.0;
  double t = 0.0;
  GBDTState state;
  std::optional<CMatrix> rho;  // empty at a pole
};

struct Pole {
  double x = 0.0;
  double t = 0.0;
  std::string reason;
};

struct Evaluation {
  std::vector<NodeResult> nodes;  // t-major
  std::vector<Pole> poles;
  std::vector<std::string> warnings;
  double max_drift = 0.0;
  double mean_drift = 0.0;
  double max_symmetry = 0.0;
  double max_local_error = 0.0;
};

inline Evaluation evaluate_grid(const Context& ctx) {
  const auto& g = ctx.config.grid;
  std::vector<double> xs, ts;
  for (int i = 0; i < g.nx; ++i) xs.push_back(g.x(i));
  for (int j = 0; j < g.nt; ++j) ts.push_back(g.t(j));
  const auto states = propagate_grid(ctx.params, ctx.spec, xs, ts, ctx.opts);

  Evaluation ev;
  double drift_sum = 0.0;
  for (const auto& st : states) {
    NodeResult node{st.x, st.t, st, std::nullopt};
    const double drift = identity_drift(st, ctx.params, ctx.spec);
    ev.max_drift = std::max(ev.max_drift, drift);
    drift_sum += drift;
    ev.max_local_error = std::max(ev.max_local_error, st.local_error);
    try {
      node.rho = rho_tilde_raw(st, ctx.spec, ctx.config.tolerances.condition_limit);
      const double sym = symmetry_check(*node.rho, ctx.spec.B());
      ev.max_symmetry = std::max(ev.max_symmetry, sym);
      if (sym > ctx.config.tolerances.symmetry)
        ev.warnings.push_back("symmetry defect " + format_double(sym) + " at x=" +
                              format_double(st.x) + ", t=" + format_double(st.t));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularMatrix) throw;
      ev.poles.push_back({st.x, st.t, e.what()});
    }
    ev.nodes.push_back(std::move(node));
  }
  ev.mean_drift = states.empty() ? 0.0 : drift_sum / static_cast<double>(states.size());
  return ev;
}

inline bool three_wave_applicable(const SeedSpec& spec) {
  if (spec.m() != 3) return false;
  const auto& d = spec.d();
  return (spec.b().array() == 1.0).all() && d(0) > d(1) && d(1) > d(2);
}

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::InvalidConfig, "cannot write " + path.string());
  out << text;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline void append_complex(std::string& row, Complex c) {
  row += ',';
  row += format_double(c.real());
  row += ',';
  row += format_double(c.imag());
}

}  // namespace detail

struct SolveOutcome {
  Evaluation eval;
  std::vector<std::string> files;
};

inline SolveOutcome run_solve(const Context& ctx, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  SolveOutcome out;
  out.eval = evaluate_grid(ctx);
  const auto& ev = out.eval;
  const auto m = ctx.spec.m();
  const auto& cfg = ctx.config;

  if (cfg.output.wants("csv")) {
    std::string csv = "x,t";
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index k = 0; k < m; ++k) {
        const std::string idx = std::to_string(i + 1) + "_" + std::to_string(k + 1);
        csv += ",Re_rho_" + idx + ",Im_rho_" + idx;
      }
    if (cfg.dirac)
      for (int i = 0; i < cfg.dirac->m1; ++i)
        for (int k = 0; k < cfg.dirac->m2; ++k) {
          const std::string idx = std::to_string(i + 1) + "_" + std::to_string(k + 1);
          csv += ",Re_v_" + idx + ",Im_v_" + idx;
        }
    csv += '\n';
    const DiracKind kind = cfg.dirac && cfg.dirac->kind == "selfadjoint" ? DiracKind::selfadjoint
                                                                         : DiracKind::skewselfadjoint;
    for (const auto& node : ev.nodes) {
      if (!node.rho) continue;
      std::string row = format_double(node.x) + "," + format_double(node.t);
      for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index k = 0; k < m; ++k) detail::append_complex(row, (*node.rho)(i, k));
      if (cfg.dirac) {
        const CMatrix v = dirac_view(*node.rho, ctx.spec, cfg.dirac->m1, cfg.dirac->m2, kind);
        for (Eigen::Index i = 0; i < v.rows(); ++i)
          for (Eigen::Index k = 0; k < v.cols(); ++k) detail::append_complex(row, v(i, k));
      }
      csv += row + '\n';
    }
    detail::write_text(out_dir / "rho_tilde.csv", csv);
    out.files.push_back("rho_tilde.csv");
  }

  Json three_wave_info = nullptr;
  if (three_wave_applicable(ctx.spec)) {
    const auto coeffs = three_wave_coefficients(ctx.spec.d(), ctx.spec.dhat());
    const bool real = real_reduction_check(ctx.params, ctx.spec).empty();
    double max_imag = 0.0;
    std::string csv = "x,t,Re_phi1,Im_phi1,Re_phi2,Im_phi2,Re_phi3,Im_phi3";
    if (real) csv += ",phireal1,phireal2,phireal3";
    csv += '\n';
    for (const auto& node : ev.nodes) {
      if (!node.rho) continue;
      const auto phi = three_wave_fields(*node.rho, ctx.spec.d());
      std::string row = format_double(node.x) + "," + format_double(node.t);
      for (Complex v : phi) detail::append_complex(row, v);
      if (real)
        for (Complex v : phi) {
          const Complex r = -kI * v;
          max_imag = std::max(max_imag, std::abs(r.imag()));
          row += ',' + format_double(r.real());
        }
      csv += row + '\n';
    }
    if (cfg.output.wants("csv")) {
      detail::write_text(out_dir / "fields_3wave.csv", csv);
      out.files.push_back("fields_3wave.csv");
    }
    three_wave_info = {{"psi", coeffs.psi},
                       {"eps", coeffs.eps},
                       {"real_mode", real},
                       {"max_abs_imag_real_fields", real ? Json(max_imag) : Json(nullptr)}};
  }

  if (cfg.output.wants("json")) {
    Json run;
    run["config"] = to_json(cfg);
    run["nodes"] = ev.nodes.size();
    run["drift"] = {{"max", ev.max_drift}, {"mean", ev.mean_drift}};
    run["max_symmetry_defect"] = ev.max_symmetry;
    run["rk4_max_local_error"] = ev.max_local_error;
    Json poles = Json::array();
    for (const auto& p : ev.poles) poles.push_back({{"x", p.x}, {"t", p.t}, {"reason", p.reason}});
    run["poles"] = poles;
    run["warnings"] = ev.warnings;
    if (!three_wave_info.is_null()) run["three_wave"] = three_wave_info;
    run["files"] = out.files;
    detail::write_text(out_dir / "run.json", detail::dump(run));
    out.files.push_back("run.json");
  }
  return out;
}

struct VerifyOptions {
  std::optional<double> h;
  bool refine = false;
};

struct VerifyOutcome {
  std::vector<ResidualReport> reports;
  bool all_pass = true;
};

namespace detail {

/// Up to `per_axis` evenly spread indices of 0..n-1.
inline std::vector<int> spread(int n, int per_axis) {
  std::set<int> idx;
  const int k = std::min(n, per_axis);
  for (int i = 0; i < k; ++i)
    idx.insert(k == 1 ? 0 : static_cast<int>(std::lround(static_cast<double>(i) * (n - 1) / (k - 1))));
  return {idx.begin(), idx.end()};
}

inline ResidualReport failed_report(const std::string& name, const Error& e) {
  ResidualReport r{name, ""};
  r.max_residual = std::numeric_limits<double>::infinity();
  r.details = std::string("error: ") + e.what();
  r.pass = false;
  return r;
}

template <class Fn>
ResidualReport guarded(const std::string& name, const Fn& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    return failed_report(name, e);
  }
}

inline std::string order_note(const ResidualReport& r) {
  if (!r.refined_residual) return {};
  if (!r.convergence_order) return "residual at round-off level; no order estimate";
  return "order " + format_double(std::round(*r.convergence_order * 1000.0) / 1000.0);
}

}  // namespace detail

inline Json report_json(const ResidualReport& r) {
  Json j;
  j["name"] = r.name;
  j["grid"] = r.grid;
  j["max_residual"] = number_or_null(r.max_residual);
  j["convergence_order"] = r.convergence_order ? number_or_null(*r.convergence_order) : Json(nullptr);
  if (r.refined_residual) j["refined_residual"] = number_or_null(*r.refined_residual);
  j["tolerance"] = r.tolerance;
  j["h"] = r.h;
  j["pass"] = r.pass;
  j["details"] = r.details;
  for (const auto& [key, values] : r.extras) j[key] = values;
  return j;
}

inline VerifyOutcome run_verify(const Context& ctx, const Evaluation& ev, const VerifyOptions& vo) {
  const auto& cfg = ctx.config;
  const auto& tol = cfg.tolerances;
  const auto& spec = ctx.spec;
  const auto& p = ctx.params;
  const auto& opts = ctx.opts;
  const double h = vo.h.value_or(tol.fd_step);
  if (!(h > 0.0)) fail(ErrorKind::InvalidArgument, "finite-difference step must be positive");
  const double fd_tol = tol.fd_at(h);
  const CMatrix d = spec.D(), dh = spec.Dhat();
  std::vector<Complex> zs = cfg.z_samples;
  if (zs.empty()) zs = {Complex{0.4, 0.1}};

  // verification samples: a sub-lattice of the non-pole grid nodes
  std::vector<SamplePoint> samples;
  std::vector<GBDTState> sample_states;
  const auto ix = detail::spread(cfg.grid.nx, 5);
  const auto it = detail::spread(cfg.grid.nt, 5);
  for (int j : it)
    for (int i : ix) {
      const auto& node = ev.nodes[static_cast<std::size_t>(j) * cfg.grid.nx + i];
      if (!node.rho) continue;
      samples.push_back({node.x, node.t});
      sample_states.push_back(node.state);
    }
  const std::string sample_label = std::to_string(samples.size()) + " grid nodes";
  std::vector<double> sample_ts, sample_xs;
  for (int j : it) sample_ts.push_back(cfg.grid.t(j));
  for (int i : ix) sample_xs.push_back(cfg.grid.x(i));

  const RhoField rho = [&](double x, double t) {
    return rho_tilde_raw(propagate(p, spec, x, t, opts), spec, tol.condition_limit);
  };

  VerifyOutcome out;
  auto add = [&](ResidualReport r) {
    if (r.details.empty()) r.details = detail::order_note(r);
    out.all_pass = out.all_pass && r.pass;
    out.reports.push_back(std::move(r));
  };

  add(detail::guarded("identity_drift", [&] {
    ResidualReport r{"identity_drift", std::to_string(ev.nodes.size()) + " grid nodes"};
    r.max_residual = ev.max_drift;
    r.tolerance = opts.method == Method::exact ? tol.exact : tol.rk4;
    r.judge();
    return r;
  }));

  add(detail::guarded("nwave", [&] {
    return refine_report("nwave", sample_label, fd_tol, h, [&](double step) {
      return nwave_residual_at(rho, samples, d, dh, step, ctx.domain);
    }, vo.refine);
  }));

  add(detail::guarded("zero_curvature", [&] {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    auto r = refine_report("zero_curvature", sample_label, fd_tol, h, [&](double step) {
      double worst = 0.0;
      for (Complex z : zs) {
        const double v = zero_curvature_residual_at(rho, samples, d, dh, z, step, ctx.domain);
        if (step == h) {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        worst = std::max(worst, v);
      }
      return worst;
    }, vo.refine);
    r.details = "spread across z samples " + format_double(hi - lo);
    const auto note = detail::order_note(r);
    if (!note.empty()) r.details += "; " + note;
    return r;
  }));

  add(detail::guarded("darboux_ode", [&] {
    return refine_report("darboux_ode", sample_label, fd_tol, h, [&](double step) {
      double worst = 0.0;
      for (double t : sample_ts)
        for (Complex z : zs)
          worst = std::max(worst, darboux_ode_residual_at(p, spec, sample_xs, t, z, step, opts, ctx.domain));
      return worst;
    }, vo.refine);
  }));

  {
    auto [c1, c2] = conservation_residual(p, spec, sample_states, tol.conservation);
    add(std::move(c1));
    add(std::move(c2));
  }

  MixedPartialResidual mp_h, mp_h2;
  bool mixed_ok = true;
  try {
    mp_h = mixed_partial_at(p, spec, samples, h, opts, ctx.domain);
    if (vo.refine) mp_h2 = mixed_partial_at(p, spec, samples, 0.5 * h, opts, ctx.domain);
  } catch (const Error& e) {
    mixed_ok = false;
    add(detail::failed_report("mixed_partial_pi", e));
    add(detail::failed_report("mixed_partial_s", e));
  }
  if (mixed_ok) {
    for (const auto& [name, coarse, fine] :
         {std::tuple{"mixed_partial_pi", mp_h.pi, mp_h2.pi}, std::tuple{"mixed_partial_s", mp_h.s, mp_h2.s}}) {
      ResidualReport r{name, sample_label};
      r.h = h;
      r.tolerance = fd_tol;
      r.max_residual = coarse;
      if (vo.refine) {
        r.refined_residual = fine;
        const double order = convergence_order(coarse, fine);
        if (std::isfinite(order)) r.convergence_order = order;
      }
      r.judge();
      add(std::move(r));
    }
  }

  add(detail::guarded("j_unitarity", [&] {
    ResidualReport worst{"j_unitarity", sample_label + " x " + std::to_string(zs.size()) + " z-samples"};
    worst.tolerance = tol.unitarity;
    for (const auto& st : sample_states) {
      const auto r = j_unitarity(p, st, spec, zs, tol.unitarity, tol.condition_limit);
      worst.max_residual = std::max(worst.max_residual, r.max_residual);
    }
    worst.judge();
    return worst;
  }));

  add(detail::guarded("symmetry", [&] {
    ResidualReport r{"symmetry", std::to_string(ev.nodes.size() - ev.poles.size()) + " grid nodes"};
    r.max_residual = ev.max_symmetry;
    r.tolerance = tol.symmetry;
    r.judge();
    return r;
  }));

  const Complex lambda = cfg.lambda ? Complex{*cfg.lambda, 0.0} : p.A.trace() / static_cast<double>(p.n());
  if (spec.is_zero_seed() && has_singleton_spectrum(p.A, lambda)) {
    add(detail::guarded("bispectral", [&] {
      const auto op = bispectral_operator(static_cast<int>(p.n()), lambda);
      ResidualReport r{"bispectral", sample_label + " x " + std::to_string(zs.size()) + " z-samples"};
      r.tolerance = tol.bispectral;
      for (const auto& st : sample_states)
        r.max_residual = std::max(r.max_residual, bispectral_residual(op, p, spec, st, zs));
      r.extras.push_back({"coefficients", op.c});
      r.extras.push_back({"lambda", {lambda.real(), lambda.imag()}});
      r.judge();
      return r;
    }));
  }

  if (three_wave_applicable(spec)) {
    const bool real = real_reduction_check(p, spec).empty();
    add(detail::guarded("three_wave", [&] {
      auto r = refine_report("three_wave", sample_label + " (5x5 patches)", fd_tol, h, [&](double step) {
        const auto res = three_wave_patch_residual(rho, spec, samples, step, ctx.domain, real);
        return std::max({res[0], res[1], res[2]});
      }, vo.refine);
      const auto coeffs = three_wave_coefficients(spec.d(), spec.dhat());
      r.extras.push_back({"psi", {coeffs.psi.begin(), coeffs.psi.end()}});
      r.extras.push_back({"eps", {coeffs.eps}});
      r.details = std::string(real ? "real resonance form" : "complex form");
      const auto note = detail::order_note(r);
      if (!note.empty()) r.details += "; " + note;
      return r;
    }));
  }
  return out;
}

inline void write_verify(const VerifyOutcome& v, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  Json j;
  j["all_pass"] = v.all_pass;
  Json reports = Json::array();
  for (const auto& r : v.reports) reports.push_back(report_json(r));
  j["reports"] = reports;
  detail::write_text(out_dir / "verify.json", detail::dump(j));
}

/// Materializes a built-in configuration, runs solve and verify (with
/// refinement) into `out_dir`. Returns true when every report passes.
inline bool run_demo(const std::string& name, const std::filesystem::path& out_dir) {
  const Context ctx = make_context(demo_config(name));
  std::filesystem::create_directories(out_dir);
  detail::write_text(out_dir / "config.json", detail::dump(to_json(ctx.config)));
  const auto solved = run_solve(ctx, out_dir);
  const auto verified = run_verify(ctx, solved.eval, VerifyOptions{std::nullopt, true});
  write_verify(verified, out_dir);
  return verified.all_pass;
}

}  // namespace gbdt::cli
