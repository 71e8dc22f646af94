#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geoavg/field.hpp"

namespace geoavg {

/// Plain-text description of a system; what the config file holds.
struct SystemDefinition {
  std::string name;
  std::optional<double> period;
  double t0 = 0.0;
  std::vector<double> x0;
  std::vector<double> center;
  std::vector<std::string> notes;

  // [manifold]
  std::string kind = "euclidean";  // euclidean | torus | so3 | chart
  int dimension = 0;
  double R = 1.0, r = 0.5;  // torus radii
  std::vector<double> domain_lo, domain_hi;
  std::vector<std::string> metric;  // row-major n*n, kind = chart
  std::vector<std::string> embed;   // kind = chart, optional

  // [field] f_i, or u_i (coefficients of e1, e2, e3) for so3
  std::vector<std::string> field;

  // [averaged]
  std::vector<std::string> averaged;
  std::vector<std::string> printed_averaged;
  std::string averaged_note;

  int field_arity() const { return kind == "so3" ? 3 : dimension; }
};

/// Ready-to-run system. `nominal` is the pre-eps field.
struct SystemBundle {
  std::string name;
  ManifoldPtr manifold;
  TimeVaryingField nominal;
  std::optional<double> period;
  std::optional<TimeVaryingField> reference_averaged;
  std::optional<TimeVaryingField> printed_averaged;
  ChartPoint x0;
  double t0 = 0.0;
  std::optional<ChartPoint> center;
  std::vector<std::string> notes;
  SystemDefinition definition;
};

}  // namespace geoavg
