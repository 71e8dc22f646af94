#pragma once

// CSV, SVG and JSON writers. Numbers are printed with %.17g so reruns are
// byte-identical and values round-trip.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "geoavg/closeness.hpp"
#include "geoavg/field.hpp"
#include "geoavg/stability.hpp"

namespace geoavg::io {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// `t,chart_id,x_1..x_n[,embed_1..embed_m]`
inline void write_trajectory_csv(std::ostream& o, const ManifoldSpec& M, const Trajectory& tr) {
  o << "t,chart_id";
  for (int i = 1; i <= M.dim; ++i) o << ",x_" << i;
  const int m = M.embedding ? M.embedding->ambient_dim : 0;
  for (int k = 1; k <= m; ++k) o << ",embed_" << k;
  o << "\n";
  for (const auto& s : tr.samples) {
    o << num(s.t) << "," << s.point.chart;
    for (int i = 0; i < M.dim; ++i) o << "," << num(s.point.coords[i]);
    if (m) {
      const Vec y = M.embedding->map(s.point);
      for (int k = 0; k < m; ++k) o << "," << num(y[k]);
    }
    o << "\n";
  }
}

inline void write_series_csv(std::ostream& o, const std::string& header, const std::vector<double>& t,
                             const std::vector<double>& v) {
  o << header << "\n";
  for (std::size_t i = 0; i < t.size(); ++i) o << num(t[i]) << "," << num(v[i]) << "\n";
}

/// `epsilon,sup_distance,argmax_t,slope_contrib`
inline void write_report_csv(std::ostream& o, const ClosenessReport& r) {
  o << "epsilon,sup_distance,argmax_t,slope_contrib\n";
  for (const auto& e : r.records) {
    o << num(e.epsilon) << "," << (e.ok ? num(e.sup_distance) : std::string("nan")) << "," << num(e.argmax_t)
      << "," << num(e.slope_contrib) << "\n";
  }
}

/// `t,distance,bound,margin`
inline void write_bound_csv(std::ostream& o, const Theorem3Verdict& v) {
  o << "t,distance,bound,margin\n";
  for (const auto& s : v.samples) {
    o << num(s.t) << "," << num(s.distance) << "," << num(s.bound) << "," << num(s.margin) << "\n";
  }
}

inline nlohmann::ordered_json stability_json(const StabilityResult& s) {
  nlohmann::ordered_json j;
  j["classification"] = to_string(s.classification);
  j["lambda"] = s.lambda;
  j["k"] = s.k;
  j["note"] = s.note;
  auto& runs = j["runs"] = nlohmann::ordered_json::array();
  for (const auto& r : s.runs) {
    runs.push_back({{"radius", r.radius},
                    {"direction", std::vector<double>(r.direction.data(), r.direction.data() + r.direction.size())},
                    {"rate_first", r.rate_first},
                    {"rate_second", r.rate_second},
                    {"tail_rate", r.tail_rate},
                    {"final_ratio", r.final_ratio},
                    {"exponential", r.exponential},
                    {"decaying", r.decaying}});
  }
  return j;
}

inline nlohmann::ordered_json report_json(const ClosenessReport& r) {
  nlohmann::ordered_json j;
  j["kind"] = r.kind;
  j["system"] = r.system;
  j["verdict"] = to_string(r.verdict);
  j["verdict_reason"] = r.verdict_reason;
  j["slope_status"] = r.slope_status;
  j["slope"] = r.slope ? nlohmann::ordered_json(*r.slope) : nlohmann::ordered_json(nullptr);
  j["slope_window"] = {r.slope_lo, r.slope_hi};
  auto& recs = j["records"] = nlohmann::ordered_json::array();
  for (const auto& e : r.records) {
    nlohmann::ordered_json x{{"epsilon", e.epsilon},       {"horizon", e.horizon},
                             {"sup_distance", e.sup_distance}, {"argmax_t", e.argmax_t},
                             {"samples", e.samples},       {"ok", e.ok},
                             {"upper_bound", e.upper_bound}, {"slope_contrib", e.slope_contrib}};
    if (e.short_sup_distance) x["short_horizon_sup_distance"] = *e.short_sup_distance;
    if (!e.error.empty()) x["error"] = e.error;
    if (e.escaped) x["escaped"] = true;
    recs.push_back(std::move(x));
  }
  auto& c = j["constants"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.constants) c[k] = v;
  if (r.stability) j["stability"] = stability_json(*r.stability);
  j["notes"] = r.notes;
  return j;
}

inline nlohmann::ordered_json bound_json(const Theorem3Verdict& v) {
  nlohmann::ordered_json j;
  j["verdict"] = to_string(v.verdict);
  j["K"] = v.constants.K;
  j["C1"] = v.constants.C1;
  j["C2"] = v.constants.C2;
  j["rate"] = v.constants.rate();
  j["domain"] = v.constants.domain_descriptor;
  j["min_margin"] = std::isfinite(v.min_margin) ? nlohmann::ordered_json(v.min_margin) : nlohmann::ordered_json(nullptr);
  j["samples"] = v.samples.size();
  j["note"] = v.note;
  return j;
}

// ---------------------------------------------------------------------------
// SVG

struct Series {
  std::vector<double> x, y;
  std::string colour = "#1f77b4";
  bool dashed = false;
  bool markers = false;
  std::string label;
};

struct PlotSpec {
  std::string title, xlabel, ylabel;
  bool logx = false, logy = false;
  bool equal_aspect = false;
};

inline void write_svg_plot(std::ostream& o, const PlotSpec& spec, const std::vector<Series>& series) {
  const double W = 640, H = 480, L = 70, Rm = 20, Tm = 40, B = 55;
  auto tx = [&](double v) { return spec.logx ? std::log10(v) : v; };
  auto ty = [&](double v) { return spec.logy ? std::log10(v) : v; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double a = tx(s.x[i]), b = ty(s.y[i]);
      if (!std::isfinite(a) || !std::isfinite(b)) continue;
      x0 = std::min(x0, a), x1 = std::max(x1, a), y0 = std::min(y0, b), y1 = std::max(y1, b);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const double pw = W - L - Rm, ph = H - Tm - B;
  double sx = pw / (x1 - x0), sy = ph / (y1 - y0);
  if (spec.equal_aspect) sx = sy = std::min(sx, sy);
  auto px = [&](double a) { return L + (a - x0) * sx; };
  auto py = [&](double b) { return H - B - (b - y0) * sy; };

  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << " " << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
    << spec.title << "</text>\n";
  o << "<rect x=\"" << L << "\" y=\"" << Tm << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"#444\"/>\n";
  char buf[64];
  for (int k = 0; k <= 4; ++k) {
    const double a = x0 + (x1 - x0) * k / 4, b = y0 + (y1 - y0) * k / 4;
    std::snprintf(buf, sizeof buf, "%.3g", spec.logx ? std::pow(10.0, a) : a);
    o << "<text x=\"" << px(a) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"11\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.3g", spec.logy ? std::pow(10.0, b) : b);
    o << "<text x=\"" << L - 6 << "\" y=\"" << py(b) + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
      << "font-size=\"11\">" << buf << "</text>\n";
  }
  o << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
    << "font-size=\"13\">" << spec.xlabel << "</text>\n";
  o << "<text x=\"16\" y=\"" << Tm + ph / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
    << "transform=\"rotate(-90 16 " << Tm + ph / 2 << ")\">" << spec.ylabel << "</text>\n";
  int li = 0;
  for (const auto& s : series) {
    std::ostringstream pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double a = tx(s.x[i]), b = ty(s.y[i]);
      if (!std::isfinite(a) || !std::isfinite(b)) continue;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(a), py(b));
      pts << buf;
      if (s.markers) {
        std::snprintf(buf, sizeof buf, "%.2f", px(a));
        o << "<circle cx=\"" << buf;
        std::snprintf(buf, sizeof buf, "%.2f", py(b));
        o << "\" cy=\"" << buf << "\" r=\"3.5\" fill=\"" << s.colour << "\"/>\n";
      }
    }
    if (!s.markers) {
      o << "<polyline fill=\"none\" stroke=\"" << s.colour << "\" stroke-width=\"1.5\""
        << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"" << pts.str() << "\"/>\n";
    }
    if (!s.label.empty()) {
      const double ly = Tm + 16 + 16 * li++;
      o << "<line x1=\"" << L + pw - 150 << "\" y1=\"" << ly - 4 << "\" x2=\"" << L + pw - 125 << "\" y2=\"" << ly - 4
        << "\" stroke=\"" << s.colour << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "")
        << "/>\n";
      o << "<text x=\"" << L + pw - 120 << "\" y=\"" << ly << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << s.label << "</text>\n";
    }
  }
  o << "</svg>\n";
}

/// 2-D view of trajectories: oblique projection of the embedding when there
/// is one with >= 2 coordinates, chart coordinates otherwise, x(t) for 1-D.
inline Series project(const ManifoldSpec& M, const Trajectory& tr) {
  Series s;
  for (const auto& smp : tr.samples) {
    if (M.dim == 1 && (!M.embedding || M.embedding->ambient_dim < 2)) {
      s.x.push_back(smp.t);
      s.y.push_back(smp.point.coords[0]);
      continue;
    }
    Vec y = (M.embedding && M.embedding->ambient_dim >= 2) ? M.embedding->map(smp.point) : smp.point.coords;
    double a = y[0], b = y[1];
    if (y.size() >= 3) {
      a += 0.45 * y[2];
      b += 0.3 * y[2];
    }
    s.x.push_back(a);
    s.y.push_back(b);
  }
  return s;
}

inline void write_loglog_svg(std::ostream& o, const ClosenessReport& r) {
  Series pts;
  pts.markers = true;
  pts.label = "D(eps)";
  std::vector<double> ex, dy;
  for (const auto& e : r.records) {
    if (e.ok && e.sup_distance > 0) {
      pts.x.push_back(e.epsilon);
      pts.y.push_back(e.sup_distance);
    }
  }
  std::vector<Series> all{pts};
  if (r.slope && pts.x.size() >= 2) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < pts.x.size(); ++i) mx += std::log(pts.x[i]), my += std::log(pts.y[i]);
    mx /= pts.x.size();
    my /= pts.x.size();
    Series fit;
    fit.colour = "#d62728";
    fit.dashed = true;
    char buf[48];
    std::snprintf(buf, sizeof buf, "fit, slope %.3f", *r.slope);
    fit.label = buf;
    const double lo = *std::min_element(pts.x.begin(), pts.x.end());
    const double hi = *std::max_element(pts.x.begin(), pts.x.end());
    for (double e : {lo, hi}) {
      fit.x.push_back(e);
      fit.y.push_back(std::exp(my + *r.slope * (std::log(e) - mx)));
    }
    all.push_back(fit);
  }
  write_svg_plot(o, {"sup distance vs epsilon (" + r.system + ")", "epsilon", "D(eps)", true, true, false}, all);
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << content;
}

}  // namespace geoavg::io
