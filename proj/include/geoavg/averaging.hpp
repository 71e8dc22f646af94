#pragma once

// Time average of a T-periodic field at frozen x, by composite Simpson
// quadrature in the chart of the query point.

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "geoavg/field.hpp"
#include "geoavg/flows.hpp"

namespace geoavg {

inline constexpr int kDefaultQuadratureNodes = 256;

/// Memo of averaged vectors keyed by (chart, coords rounded to 1e-12).
/// Same key always maps to the same value, so racing inserts are harmless.
class AverageCache {
 public:
  using Key = std::pair<std::string, std::vector<long long>>;

  static std::optional<Key> key_of(const ChartPoint& p) {
    Key k{p.chart, {}};
    k.second.reserve(static_cast<std::size_t>(p.coords.size()));
    for (Eigen::Index i = 0; i < p.coords.size(); ++i) {
      if (!(std::abs(p.coords[i]) < 1e6)) return std::nullopt;
      k.second.push_back(std::llround(p.coords[i] * 1e12));
    }
    return k;
  }

  std::optional<Vec> find(const Key& k) const {
    std::shared_lock lock(mu_);
    auto it = map_.find(k);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }

  void insert(Key k, Vec v) {
    std::unique_lock lock(mu_);
    map_.emplace(std::move(k), std::move(v));
  }

  std::size_t size() const {
    std::shared_lock lock(mu_);
    return map_.size();
  }

 private:
  mutable std::shared_mutex mu_;
  std::map<Key, Vec> map_;
};

struct AveragedField {
  TimeVaryingField base;
  double period = 0.0;
  int quadrature_order = kDefaultQuadratureNodes;
  std::shared_ptr<AverageCache> cache;

  /// Composite Simpson weights over `quadrature_order` panels of [0, T],
  /// normalised by 1/T.
  template <class F>
  auto simpson(F&& sample) const {
    const int n = quadrature_order;
    const double h = period / n;
    auto acc = sample(0.0);
    acc += sample(period);
    for (int k = 1; k < n; ++k) acc += ((k % 2) ? 4.0 : 2.0) * sample(k * h);
    return decltype(acc)(acc / (3.0 * n));
  }

  Vec eval(const ChartPoint& p) const {
    if (base.autonomous) return base.eval(p, 0.0);
    std::optional<AverageCache::Key> key;
    if (cache) {
      key = AverageCache::key_of(p);
      if (key) {
        if (auto hit = cache->find(*key)) return *hit;
      }
    }
    Vec v = simpson([&](double s) -> Vec { return base.eval(p, s); });
    if (cache && key) cache->insert(std::move(*key), v);
    return v;
  }

  Mat body(const Mat& X) const {
    if (base.autonomous) return base.body(X, 0.0);
    return simpson([&](double s) -> Mat { return base.body(X, s); });
  }

  TimeVaryingField as_field() const {
    auto self = std::make_shared<const AveragedField>(*this);
    TimeVaryingField f;
    f.label = "avg(" + base.label + ")";
    f.period = period;
    f.autonomous = true;
    f.eval = [self](const ChartPoint& p, double) { return self->eval(p); };
    if (base.body) f.body = [self](const Mat& X, double) { return self->body(X); };
    return f;
  }
};

/// f_hat(x) = (1/T) int_0^T f(x, s) ds. `nodes` is the (even) panel count.
inline AveragedField average_field(const TimeVaryingField& f, double T, int nodes = kDefaultQuadratureNodes,
                                   bool memo = false) {
  if (!f.period) throw ContractViolation("average_field: field '" + f.label + "' has no period");
  if (!(T > 0.0)) throw ContractViolation("average_field: period must be > 0");
  if (nodes < 2 || nodes % 2 != 0) {
    throw ContractViolation("average_field: Simpson needs an even node count >= 2");
  }
  AveragedField a;
  a.base = f;
  a.period = T;
  a.quadrature_order = nodes;
  if (memo) a.cache = std::make_shared<AverageCache>();
  return a;
}

inline Trajectory averaged_flow(const ManifoldSpec& M, const TimeVaryingField& f, double T, int nodes,
                                double t0, double t1, const ChartPoint& x0, double step) {
  return flow(M, average_field(f, T, nodes).as_field(), t0, t1, x0, step);
}

}  // namespace geoavg
