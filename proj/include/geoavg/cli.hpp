#pragma once

// Command implementations behind the geoavg tool. Each command computes
// everything first, then writes its files from one thread.

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "geoavg/closeness.hpp"
#include "geoavg/io.hpp"
#include "geoavg/stability.hpp"
#include "geoavg/systems.hpp"

namespace geoavg::cli {

enum ExitCode : int {
  kOk = 0,
  kVerdictFailure = 2,
  kInconclusive = 3,
  kConfigError = 4,
  kEscape = 5,
};

struct RunConfig {
  std::string system = "so3";
  std::vector<double> epsilons;
  std::optional<double> t0;
  std::optional<double> horizon;
  std::optional<double> horizon_constant;
  std::optional<double> step;
  int nodes = kDefaultQuadratureNodes;
  int samples = 0;  // 0: command default
  std::string out = "out";
  std::uint64_t seed = 0;
  bool strict = false;
  bool long_horizon = false;
  std::vector<double> center;
  std::vector<double> radii;
  std::optional<double> probe_horizon;
  bool parallel = true;

  void validate(bool sweep) const {
    if (horizon && horizon_constant) throw ConfigError(0, "horizon", "give only one of --horizon / --horizon-constant");
    if (!horizon && !horizon_constant) throw ConfigError(0, "horizon", "one of --horizon / --horizon-constant is required");
    if (horizon && !(*horizon >= 0.0)) throw ConfigError(0, "horizon", "must be >= 0");
    if (horizon_constant && !(*horizon_constant > 0.0)) throw ConfigError(0, "horizon-constant", "must be > 0");
    if (epsilons.empty()) throw ConfigError(0, "epsilon", "at least one --epsilon is required");
    for (double e : epsilons) {
      if (sweep ? !(e > 0.0) : !(e >= 0.0)) throw ConfigError(0, "epsilon", sweep ? "must be > 0" : "must be >= 0");
      if (!sweep && e == 0.0 && horizon_constant) throw ConfigError(0, "epsilon", "eps = 0 needs an explicit --horizon");
    }
    if (step && !(*step > 0.0)) throw ConfigError(0, "step", "must be > 0");
    if (nodes < 2 || nodes % 2) throw ConfigError(0, "nodes", "must be an even integer >= 2");
    if (samples < 0 || samples == 1) throw ConfigError(0, "samples", "must be >= 2");
  }

  double span(double eps) const { return horizon ? *horizon : *horizon_constant / eps; }
};

namespace detail {

inline std::filesystem::path prepare_out(const RunConfig& rc) {
  std::filesystem::path p(rc.out);
  std::filesystem::create_directories(p);
  return p;
}

inline void write(const std::filesystem::path& p, const std::string& s) { io::write_file(p.string(), s); }

inline std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

inline GeodesicSolverConfig geodesic_cfg(const RunConfig& rc) {
  GeodesicSolverConfig g;
  g.seed = rc.seed;
  return g;
}

inline TimeVaryingField averaged_of(const SystemBundle& b, int nodes) {
  if (!b.period) throw ConfigError(0, "period", "system '" + b.name + "' has no period; averaging needs one");
  return average_field(b.nominal, *b.period, nodes).as_field();
}

inline ChartPoint center_of(const SystemBundle& b, const RunConfig& rc) {
  if (!rc.center.empty()) {
    SystemDefinition d = b.definition;
    return geoavg::detail::state_point(*b.manifold, d, rc.center, "center");
  }
  if (!b.center) throw ConfigError(0, "center", "system '" + b.name + "' has no center; pass --center");
  return *b.center;
}

}  // namespace detail

/// nominal.csv, averaged.csv, distance.csv, trajectories.svg, summary.json
inline int cmd_simulate(const RunConfig& rc, std::ostream& log = std::cout) {
  rc.validate(false);
  const SystemBundle b = resolve_system(rc.system);
  const ManifoldSpec& M = *b.manifold;
  const double eps = rc.epsilons.front();
  const double t0 = rc.t0.value_or(b.t0);
  const double t1 = t0 + rc.span(eps);
  const double step = rc.step.value_or(default_step(b.period));
  const TimeVaryingField fhat = detail::averaged_of(b, rc.nodes);
  const auto times = uniform_times(t0, t1, rc.samples ? rc.samples : 401);
  const auto out = detail::prepare_out(rc);
  Trajectory nom, avg;
  try {
    nom = flow_at(M, scaled(b.nominal, eps), t0, b.x0, times, step);
    avg = flow_at(M, scaled(fhat, eps), t0, b.x0, times, step);
  } catch (const EscapeError& e) {
    log << "escape: " << e.what() << " (last valid t = " << io::num(e.last_time()) << ", chart " << e.last_valid().chart
        << ")\n";
    return kEscape;
  }
  std::vector<double> d;
  bool upper = false;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto r = distance_detailed(M, nom.samples[i].point, avg.samples[i].point, detail::geodesic_cfg(rc));
    d.push_back(r.value);
    upper = upper || r.upper_bound;
  }
  std::ostringstream a, c, dist, svg;
  io::write_trajectory_csv(a, M, nom);
  io::write_trajectory_csv(c, M, avg);
  io::write_series_csv(dist, "t,distance", times, d);
  io::Series sn = io::project(M, nom), sa = io::project(M, avg);
  sn.label = "nominal";
  sa.label = "averaged";
  sa.dashed = true;
  sa.colour = "#d62728";
  io::write_svg_plot(svg, {b.name + ", eps = " + io::num(eps), M.dim == 1 ? "t" : "u", M.dim == 1 ? "x" : "v", false,
                           false, M.dim > 1},
                     {sn, sa});
  detail::write(out / "nominal.csv", a.str());
  detail::write(out / "averaged.csv", c.str());
  detail::write(out / "distance.csv", dist.str());
  detail::write(out / "trajectories.svg", svg.str());
  const auto sup = std::max_element(d.begin(), d.end());
  nlohmann::ordered_json j{{"command", "simulate"},
                           {"system", b.name},
                           {"epsilon", eps},
                           {"t0", t0},
                           {"t1", t1},
                           {"step", step},
                           {"samples", times.size()},
                           {"sup_distance", *sup},
                           {"argmax_t", times[sup - d.begin()]},
                           {"distance_upper_bound", upper},
                           {"notes", b.notes}};
  detail::write(out / "summary.json", detail::dump(j));
  log << "simulate " << b.name << " eps=" << io::num(eps) << " t=[" << io::num(t0) << ", " << io::num(t1)
      << "] sup d = " << io::num(*sup) << "\n";
  return kOk;
}

/// sweep.csv, summary.json, sweep.svg
inline int cmd_sweep(const RunConfig& rc, std::ostream& log = std::cout) {
  RunConfig r = rc;
  if (r.horizon) throw ConfigError(0, "horizon", "sweeps take --horizon-constant (horizon = c/eps)");
  r.validate(true);
  const SystemBundle b = resolve_system(r.system);
  if (!b.period) throw ConfigError(0, "period", "system '" + b.name + "' has no period");
  SweepConfig sc;
  sc.epsilons = r.epsilons;
  sc.horizon_constant = *r.horizon_constant;
  sc.x0 = b.x0;
  sc.t0 = r.t0.value_or(b.t0);
  sc.step = r.step;
  if (r.samples) sc.n_samples = r.samples;
  sc.quadrature_nodes = r.nodes;
  sc.parallel = r.parallel;
  sc.distance = detail::geodesic_cfg(r);
  ClosenessReport rep;
  if (r.long_horizon) {
    LongHorizonConfig lc;
    lc.sweep = sc;
    if (!r.radii.empty()) lc.probe_radii = r.radii;
    if (r.probe_horizon) lc.probe_horizon = *r.probe_horizon;
    rep = long_horizon_sweep(*b.manifold, b.nominal, *b.period, detail::center_of(b, r), lc);
  } else {
    rep = epsilon_sweep(*b.manifold, b.nominal, *b.period, sc);
  }
  rep.system = b.name;
  const auto out = detail::prepare_out(r);
  std::ostringstream csv, svg;
  io::write_report_csv(csv, rep);
  io::write_loglog_svg(svg, rep);
  auto j = io::report_json(rep);
  j["horizon_constant"] = sc.horizon_constant;
  j["command"] = "sweep";
  detail::write(out / "sweep.csv", csv.str());
  detail::write(out / "sweep.svg", svg.str());
  detail::write(out / "summary.json", detail::dump(j));
  log << rep.kind << " " << b.name << ": " << to_string(rep.verdict) << " (" << rep.verdict_reason << ")\n";
  bool escaped = false;
  for (const auto& e : rep.records) escaped = escaped || e.escaped;
  if (!r.strict) return kOk;
  switch (rep.verdict) {
    case Verdict::Pass: return escaped ? kEscape : kOk;
    case Verdict::Fail: return escaped ? kEscape : kVerdictFailure;
    default: return kInconclusive;
  }
}

/// bound.csv, summary.json
inline int cmd_bound(const RunConfig& rc, std::ostream& log = std::cout) {
  rc.validate(false);
  const SystemBundle b = resolve_system(rc.system);
  const double eps = rc.epsilons.front();
  const double t0 = rc.t0.value_or(b.t0);
  const double t1 = t0 + rc.span(eps);
  const double step = rc.step.value_or(default_step(b.period));
  const TimeVaryingField fhat = detail::averaged_of(b, rc.nodes);
  Theorem3Verdict v;
  try {
    v = verify_theorem3(*b.manifold, scaled(b.nominal, eps), scaled(fhat, eps), b.x0, t0, t1, step,
                        rc.samples ? rc.samples : 200, detail::geodesic_cfg(rc));
  } catch (const EscapeError& e) {
    log << "escape: " << e.what() << "\n";
    return kEscape;
  }
  const auto out = detail::prepare_out(rc);
  std::ostringstream csv;
  io::write_bound_csv(csv, v);
  auto j = io::bound_json(v);
  j["command"] = "bound";
  j["system"] = b.name;
  j["epsilon"] = eps;
  j["t0"] = t0;
  j["t1"] = t1;
  detail::write(out / "bound.csv", csv.str());
  detail::write(out / "summary.json", detail::dump(j));
  log << "bound " << b.name << ": " << to_string(v.verdict) << " K=" << io::num(v.constants.K)
      << " C1=" << io::num(v.constants.C1) << " C2=" << io::num(v.constants.C2) << "\n";
  if (v.verdict == Verdict::Inconclusive) return kInconclusive;
  if (v.verdict == Verdict::Fail && rc.strict) return kVerdictFailure;
  return kOk;
}

/// Stability probe of the (pre-eps) averaged field plus a Lie-derivative
/// scan of v = |x - center|^2 / 2 in chart coordinates.
/// probe.json, lyapunov.csv
inline int cmd_probe(const RunConfig& rc, std::ostream& log = std::cout) {
  if (rc.nodes < 2 || rc.nodes % 2) throw ConfigError(0, "nodes", "must be an even integer >= 2");
  const SystemBundle b = resolve_system(rc.system);
  const ManifoldSpec& M = *b.manifold;
  const TimeVaryingField fhat = detail::averaged_of(b, rc.nodes);
  const ChartPoint c = detail::center_of(b, rc);
  const Vec fc = fhat.eval(c, 0.0);
  const double fn = std::sqrt(std::max(0.0, fc.dot(metric_at(M, c) * fc)));
  if (!(fn < 1e-10)) {
    log << "probe: center is not an equilibrium of the averaged field (|f_hat(center)|_g = " << io::num(fn)
        << ")\n";
    return kConfigError;
  }
  const std::vector<double> radii = rc.radii.empty() ? std::vector<double>{0.25, 0.75} : rc.radii;
  const double horizon = rc.probe_horizon.value_or(20.0);
  StabilityProbeOptions po;
  po.geodesic = detail::geodesic_cfg(rc);
  if (rc.samples) po.samples = rc.samples;
  if (rc.step) po.step = *rc.step;
  const StabilityResult s = stability_probe(M, fhat, c, radii, horizon, po);

  LyapunovProbe lp;
  lp.center = c;
  lp.v = [x0 = c.coords](const Vec& x) { return 0.5 * (x - x0).squaredNorm(); };
  lp.gradient = [x0 = c.coords](const Vec& x) -> Vec { return x - x0; };
  std::vector<double> scan_r;
  for (double r : radii) {
    for (int k = 1; k <= 4; ++k) scan_r.push_back(r * k / 4.0);
  }
  std::vector<LyapunovScanSample> scan;
  bool lie_negative = true;
  if (!M.group) {
    scan = lyapunov_scan(lp, fhat, scan_r);
    for (const auto& smp : scan) lie_negative = lie_negative && smp.lie_derivative < 0.0;
  }
  const auto out = detail::prepare_out(rc);
  auto j = io::stability_json(s);
  nlohmann::ordered_json top{{"command", "probe"},
                             {"system", b.name},
                             {"center", std::vector<double>(c.coords.data(), c.coords.data() + c.coords.size())},
                             {"center_chart", c.chart},
                             {"radii", radii},
                             {"horizon", horizon}};
  top["stability"] = j;
  if (!scan.empty()) top["lyapunov_negative_on_scan"] = lie_negative;
  detail::write(out / "probe.json", detail::dump(top));
  if (!scan.empty()) {
    std::ostringstream csv;
    csv << "chart_id";
    for (int i = 1; i <= M.dim; ++i) csv << ",x_" << i;
    csv << ",v,lie_derivative\n";
    for (const auto& smp : scan) {
      csv << smp.point.chart;
      for (int i = 0; i < M.dim; ++i) csv << "," << io::num(smp.point.coords[i]);
      csv << "," << io::num(smp.value) << "," << io::num(smp.lie_derivative) << "\n";
    }
    detail::write(out / "lyapunov.csv", csv.str());
  }
  log << "probe " << b.name << ": " << to_string(s.classification);
  if (s.classification == StabilityClass::Exponential) log << " lambda=" << io::num(s.lambda) << " k=" << io::num(s.k);
  log << "\n";
  if (s.classification == StabilityClass::Inconclusive) return kInconclusive;
  return kOk;
}

/// Writes a builtin's system-definition file.
inline int cmd_export(const std::string& name, const std::string& path, std::ostream& log = std::cout) {
  const SystemBundle b = resolve_system(name);
  io::write_file(path, serialize_system_definition(b.definition));
  log << "wrote " << path << "\n";
  return kOk;
}

}  // namespace geoavg::cli
