#pragma once

// System-definition files: INI-style sections with `key = value` lines.
//
//   [system]    name, period, t0, x0, center, note
//   [manifold]  kind (euclidean | torus | so3 | chart), dimension, R, r,
//               domain_lo, domain_hi, metric_i_j, embed_k
//   [field]     f_1..f_n   (u_1..u_3 on so3: coefficients of e1, e2, e3)
//   [averaged]  same keys as [field], printed_<key>, note
//
// Lists are comma separated. '#' starts a comment line. For so3, x0 and
// center are the 9 matrix entries, row-major.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "geoavg/expr.hpp"
#include "geoavg/manifolds.hpp"
#include "geoavg/system.hpp"

namespace geoavg {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s, int line, const std::string& key) {
  const std::string v = trim(s);
  if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
  if (v == "-inf") return -std::numeric_limits<double>::infinity();
  // Allow constant expressions such as 2*pi.
  try {
    const Expr e = Expr::parse(v, 0);
    if (e.uses_time()) throw ConfigError(line, key, "constant expected, found a time-dependent expression");
    const double d = e(Vec(), 0.0);
    if (!std::isfinite(d)) throw ConfigError(line, key, "value is not finite");
    return d;
  } catch (const ExprError& ex) {
    throw ConfigError(line, key, std::string("bad number: ") + ex.what());
  }
}

inline std::vector<double> parse_list(const std::string& s, int line, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item, line, key));
  if (out.empty()) throw ConfigError(line, key, "empty list");
  return out;
}

inline std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt_double(v[i]);
  return s;
}

struct Entry {
  std::string value;
  int line;
};
using Section = std::map<std::string, Entry>;

}  // namespace detail

inline SystemDefinition parse_system_definition(const std::string& text) {
  using detail::Entry;
  std::map<std::string, detail::Section> sec;
  std::map<std::string, int> sec_line;
  std::string current;
  std::istringstream in(text);
  std::string raw;
  int ln = 0;
  const std::set<std::string> known{"system", "manifold", "field", "averaged"};
  while (std::getline(in, raw)) {
    ++ln;
    const std::string s = detail::trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(ln, "", "unterminated section header");
      current = detail::trim(s.substr(1, s.size() - 2));
      if (!known.count(current)) throw ConfigError(ln, current, "unknown section");
      if (sec_line.count(current)) throw ConfigError(ln, current, "duplicate section");
      sec_line[current] = ln;
      sec[current];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(ln, "", "expected 'key = value'");
    if (current.empty()) throw ConfigError(ln, "", "key outside of any section");
    const std::string key = detail::trim(s.substr(0, eq));
    if (key.empty()) throw ConfigError(ln, "", "empty key");
    auto& S = sec[current];
    if (key == "note" && S.count("note")) {
      S["note"].value += "\n" + detail::trim(s.substr(eq + 1));
      continue;
    }
    if (!S.emplace(key, Entry{detail::trim(s.substr(eq + 1)), ln}).second) {
      throw ConfigError(ln, key, "duplicate key");
    }
  }

  SystemDefinition d;
  std::map<std::string, std::set<std::string>> used;
  auto get = [&](const std::string& section, const std::string& key) -> const Entry* {
    auto it = sec.find(section);
    if (it == sec.end()) return nullptr;
    auto jt = it->second.find(key);
    if (jt == it->second.end()) return nullptr;
    used[section].insert(key);
    return &jt->second;
  };
  auto need = [&](const std::string& section, const std::string& key) -> const Entry& {
    const Entry* e = get(section, key);
    if (!e) {
      const int where = sec_line.count(section) ? sec_line[section] : 0;
      throw ConfigError(where, section + "." + key, "missing required key");
    }
    return *e;
  };

  for (const char* s : {"system", "manifold", "field"}) {
    if (!sec.count(s)) throw ConfigError(0, s, "missing section");
  }

  d.name = need("system", "name").value;
  if (auto e = get("system", "period")) {
    d.period = detail::parse_double(e->value, e->line, "period");
    if (!(*d.period > 0.0)) throw ConfigError(e->line, "period", "must be > 0");
  }
  if (auto e = get("system", "t0")) d.t0 = detail::parse_double(e->value, e->line, "t0");
  if (auto e = get("system", "center")) d.center = detail::parse_list(e->value, e->line, "center");
  if (auto e = get("system", "note")) {
    std::stringstream ss(e->value);
    std::string l;
    while (std::getline(ss, l)) d.notes.push_back(l);
  }

  const Entry& kind = need("manifold", "kind");
  d.kind = kind.value;
  if (d.kind != "euclidean" && d.kind != "torus" && d.kind != "so3" && d.kind != "chart") {
    throw ConfigError(kind.line, "kind", "unknown manifold kind '" + d.kind + "'");
  }
  if (d.kind == "torus") {
    d.dimension = 2;
    if (auto e = get("manifold", "R")) d.R = detail::parse_double(e->value, e->line, "R");
    if (auto e = get("manifold", "r")) d.r = detail::parse_double(e->value, e->line, "r");
    if (!(d.r > 0.0) || !(d.R > d.r)) throw ConfigError(kind.line, "R", "torus needs R > r > 0");
  } else if (d.kind == "so3") {
    d.dimension = 3;
  } else {
    const Entry& dim = need("manifold", "dimension");
    const double n = detail::parse_double(dim.value, dim.line, "dimension");
    if (n < 1 || n > 16 || n != std::floor(n)) throw ConfigError(dim.line, "dimension", "must be an integer in 1..16");
    d.dimension = static_cast<int>(n);
  }
  if (auto e = get("manifold", "dimension")) {
    if (detail::parse_double(e->value, e->line, "dimension") != d.dimension) {
      throw ConfigError(e->line, "dimension", "does not match manifold kind");
    }
  }
  const int n = d.dimension;
  if (d.kind == "chart") {
    const Entry& lo = need("manifold", "domain_lo");
    const Entry& hi = need("manifold", "domain_hi");
    d.domain_lo = detail::parse_list(lo.value, lo.line, "domain_lo");
    d.domain_hi = detail::parse_list(hi.value, hi.line, "domain_hi");
    if (static_cast<int>(d.domain_lo.size()) != n) throw ConfigError(lo.line, "domain_lo", "length must equal dimension");
    if (static_cast<int>(d.domain_hi.size()) != n) throw ConfigError(hi.line, "domain_hi", "length must equal dimension");
    for (int i = 0; i < n; ++i) {
      if (!(d.domain_lo[i] < d.domain_hi[i])) throw ConfigError(lo.line, "domain_lo", "empty domain box");
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const std::string key = "metric_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
        const Entry& e = need("manifold", key);
        d.metric.push_back(e.value);
      }
    }
    for (int k = 1;; ++k) {
      const Entry* e = get("manifold", "embed_" + std::to_string(k));
      if (!e) break;
      d.embed.push_back(e->value);
    }
  }

  const std::string fkey = d.kind == "so3" ? "u_" : "f_";
  const int arity = d.field_arity();
  for (int i = 1; i <= arity; ++i) d.field.push_back(need("field", fkey + std::to_string(i)).value);
  if (sec.count("averaged")) {
    for (int i = 1; i <= arity; ++i) {
      const std::string key = fkey + std::to_string(i);
      if (auto e = get("averaged", key)) d.averaged.push_back(e->value);
      if (auto e = get("averaged", "printed_" + key)) d.printed_averaged.push_back(e->value);
    }
    if (!d.averaged.empty() && static_cast<int>(d.averaged.size()) != arity) {
      throw ConfigError(sec_line["averaged"], "averaged", "needs all " + std::to_string(arity) + " components");
    }
    if (!d.printed_averaged.empty() && static_cast<int>(d.printed_averaged.size()) != arity) {
      throw ConfigError(sec_line["averaged"], "averaged", "printed version needs all components");
    }
    if (auto e = get("averaged", "note")) d.averaged_note = e->value;
  }

  const int state = d.kind == "so3" ? 9 : n;
  const Entry& x0 = need("system", "x0");
  d.x0 = detail::parse_list(x0.value, x0.line, "x0");
  if (static_cast<int>(d.x0.size()) != state) {
    throw ConfigError(x0.line, "x0", "expected " + std::to_string(state) + " values");
  }
  if (!d.center.empty() && static_cast<int>(d.center.size()) != state) {
    throw ConfigError(get("system", "center")->line, "center", "expected " + std::to_string(state) + " values");
  }

  for (const auto& [name, S] : sec) {
    for (const auto& [key, e] : S) {
      if (!used[name].count(key)) throw ConfigError(e.line, key, "unknown key in [" + name + "]");
    }
  }
  return d;
}

inline std::string serialize_system_definition(const SystemDefinition& d) {
  std::ostringstream o;
  o << "[system]\n";
  o << "name = " << d.name << "\n";
  if (d.period) o << "period = " << detail::fmt_double(*d.period) << "\n";
  o << "t0 = " << detail::fmt_double(d.t0) << "\n";
  o << "x0 = " << detail::join(d.x0) << "\n";
  if (!d.center.empty()) o << "center = " << detail::join(d.center) << "\n";
  for (const auto& n : d.notes) o << "note = " << n << "\n";
  o << "\n[manifold]\n";
  o << "kind = " << d.kind << "\n";
  if (d.kind == "torus") {
    o << "R = " << detail::fmt_double(d.R) << "\n";
    o << "r = " << detail::fmt_double(d.r) << "\n";
  } else if (d.kind != "so3") {
    o << "dimension = " << d.dimension << "\n";
  }
  if (d.kind == "chart") {
    o << "domain_lo = " << detail::join(d.domain_lo) << "\n";
    o << "domain_hi = " << detail::join(d.domain_hi) << "\n";
    for (int i = 0; i < d.dimension; ++i) {
      for (int j = 0; j < d.dimension; ++j) {
        o << "metric_" << i + 1 << "_" << j + 1 << " = " << d.metric[i * d.dimension + j] << "\n";
      }
    }
    for (std::size_t k = 0; k < d.embed.size(); ++k) o << "embed_" << k + 1 << " = " << d.embed[k] << "\n";
  }
  const std::string fkey = d.kind == "so3" ? "u_" : "f_";
  o << "\n[field]\n";
  for (std::size_t i = 0; i < d.field.size(); ++i) o << fkey << i + 1 << " = " << d.field[i] << "\n";
  if (!d.averaged.empty() || !d.printed_averaged.empty()) {
    o << "\n[averaged]\n";
    for (std::size_t i = 0; i < d.averaged.size(); ++i) o << fkey << i + 1 << " = " << d.averaged[i] << "\n";
    for (std::size_t i = 0; i < d.printed_averaged.size(); ++i) {
      o << "printed_" << fkey << i + 1 << " = " << d.printed_averaged[i] << "\n";
    }
    if (!d.averaged_note.empty()) o << "note = " << d.averaged_note << "\n";
  }
  return o.str();
}

namespace detail {

inline std::vector<Expr> compile_all(const std::vector<std::string>& src, int vars, const std::string& what) {
  std::vector<Expr> out;
  for (std::size_t i = 0; i < src.size(); ++i) {
    try {
      out.push_back(Expr::parse(src[i], vars));
    } catch (const ExprError& e) {
      throw ConfigError(0, what + "_" + std::to_string(i + 1), e.what());
    }
  }
  return out;
}

inline ManifoldPtr chart_manifold(const SystemDefinition& d) {
  const int n = d.dimension;
  const auto g = compile_all(d.metric, n, "metric");
  for (const auto& e : g) {
    if (e.uses_time()) throw ConfigError(0, "metric", "metric may not depend on t");
  }
  const auto emb = compile_all(d.embed, n, "embed");
  auto M = std::make_shared<ManifoldSpec>();
  M->name = d.name + "-chart";
  M->dim = n;
  Vec lo = Eigen::Map<const Vec>(d.domain_lo.data(), n);
  Vec hi = Eigen::Map<const Vec>(d.domain_hi.data(), n);
  M->charts.push_back({"chart", {lo, hi}});
  M->transition = [](const std::string&, const std::string&, const Vec& x) -> std::optional<Vec> { return x; };
  M->metric.eval = [g, n](const std::string&, const Vec& x) -> Mat {
    Mat G(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) G(i, j) = g[i * n + j](x, 0.0);
    }
    return G;
  };
  if (!emb.empty()) {
    M->embedding = Embedding{static_cast<int>(emb.size()), 1.0, [emb](const ChartPoint& p) -> Vec {
                               Vec y(emb.size());
                               for (std::size_t k = 0; k < emb.size(); ++k) y[k] = emb[k](p.coords, 0.0);
                               return y;
                             }};
  }
  M->periods = Vec::Zero(n);
  return M;
}

inline std::string home_chart(const SystemDefinition& d) {
  if (d.kind == "torus") return "main";
  if (d.kind == "chart") return "chart";
  return "cartesian";
}

inline ChartPoint state_point(const ManifoldSpec& M, const SystemDefinition& d, const std::vector<double>& v,
                              const std::string& what) {
  if (d.kind == "so3") {
    Mat X = Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(v.data());
    if (rot::orthogonality_defect(X) > 1e-9 || std::abs(X.determinant() - 1.0) > 1e-9) {
      throw ConfigError(0, what, "not a rotation matrix");
    }
    return M.group->from_matrix(X);
  }
  Vec x = Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
  const std::string home = home_chart(d);
  if (d.kind == "torus") {
    for (int a = 0; a < 2; ++a) x[a] = wrap_to(x[a], -std::numbers::pi);
  }
  if (!find_chart(M, home).domain.contains(x)) throw ConfigError(0, what, "outside the chart domain");
  return ChartPoint{home, x};
}

}  // namespace detail

inline TimeVaryingField field_from_expressions(const ManifoldPtr& M, const SystemDefinition& d,
                                               const std::vector<std::string>& src, const std::string& label,
                                               bool force_autonomous = false) {
  if (d.kind == "so3") {
    const auto u = detail::compile_all(src, 0, "u");
    bool autonomous = true;
    for (const auto& e : u) autonomous = autonomous && !e.uses_time();
    autonomous = autonomous || force_autonomous;
    return left_invariant_field(
        M,
        [u](double t) -> Mat {
          const Vec none;
          return Mat(rot::hat({u[0](none, t), u[1](none, t), u[2](none, t)}));
        },
        label, d.period, autonomous);
  }
  const auto f = detail::compile_all(src, d.dimension, "f");
  bool autonomous = true;
  for (const auto& e : f) autonomous = autonomous && !e.uses_time();
  autonomous = autonomous || force_autonomous;
  return chart_field(
      M, detail::home_chart(d),
      [f](const Vec& x, double t) -> Vec {
        Vec y(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) y[i] = f[i](x, t);
        return y;
      },
      label, d.period, autonomous);
}

/// Manifold for a definition (fields not included).
inline ManifoldPtr manifold_from_definition(const SystemDefinition& d) {
  if (d.kind == "torus") return torus(d.R, d.r);
  if (d.kind == "so3") return so3();
  if (d.kind == "euclidean") return euclidean(d.dimension);
  return detail::chart_manifold(d);
}

inline SystemBundle build_system(const SystemDefinition& d) {
  SystemBundle b;
  b.name = d.name;
  b.definition = d;
  b.manifold = manifold_from_definition(d);
  b.period = d.period;
  b.nominal = field_from_expressions(b.manifold, d, d.field, d.name);
  if (!d.averaged.empty()) b.reference_averaged = field_from_expressions(b.manifold, d, d.averaged, "ref-avg(" + d.name + ")", true);
  if (!d.printed_averaged.empty()) {
    b.printed_averaged = field_from_expressions(b.manifold, d, d.printed_averaged, "printed-avg(" + d.name + ")", true);
  }
  b.x0 = detail::state_point(*b.manifold, d, d.x0, "x0");
  b.t0 = d.t0;
  if (!d.center.empty()) b.center = detail::state_point(*b.manifold, d, d.center, "center");
  b.notes = d.notes;
  if (!d.averaged_note.empty()) b.notes.push_back(d.averaged_note);
  return b;
}

inline SystemBundle load_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "system", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return build_system(parse_system_definition(ss.str()));
}

}  // namespace geoavg
