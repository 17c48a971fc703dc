#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gsp/error.hpp"
#include "gsp/graph.hpp"

namespace gsp {

enum class StatKind { EMS, KULLDORFF, EBP, TOY_QUADRATIC };

inline const char* to_string(StatKind k) {
  switch (k) {
    case StatKind::EMS: return "ems";
    case StatKind::KULLDORFF: return "kulldorff";
    case StatKind::EBP: return "ebp";
    case StatKind::TOY_QUADRATIC: return "toy";
  }
  return "?";
}

/// Scan statistic in minimization form f(x) = -stat(x) + x'x/2.
///
/// EMS:        stat = (c'x)^2 / (1'x)
/// Kulldorff:  stat = C(x) log(C(x)/B(x)) + (C - C(x)) log((C - C(x))/(B - B(x))) - C log(C/B)
/// EBP:        stat = C(x) log(C(x)/B(x)) + B(x) - C(x)
/// Toy:        f = -w'x + x'x/2
/// where C(x) = c'x, B(x) = b'x and C, B are the totals over all nodes.
class ScanObjective {
 public:
  static constexpr double kDenominatorGuard = 1e-12;
  static constexpr double kLogFloor = 1e-12;
  static constexpr double kSingularMass = 1e-9;

  static ScanObjective ems(NodeVector counts) {
    check_finite(counts, "EMS counts");
    for (double c : counts)
      if (std::abs(c) >= 1.0)
        throw InputError("EMS counts must be normalized so that |c_i| < 1");
    return ScanObjective(StatKind::EMS, std::move(counts), {}, {});
  }
  static ScanObjective kulldorff(NodeVector counts, NodeVector baselines) {
    check_poisson(counts, baselines);
    return ScanObjective(StatKind::KULLDORFF, std::move(counts), std::move(baselines), {});
  }
  static ScanObjective ebp(NodeVector counts, NodeVector baselines) {
    check_poisson(counts, baselines);
    return ScanObjective(StatKind::EBP, std::move(counts), std::move(baselines), {});
  }
  static ScanObjective toy_quadratic(NodeVector weights) {
    check_finite(weights, "weights");
    return ScanObjective(StatKind::TOY_QUADRATIC, {}, {}, std::move(weights));
  }

  StatKind kind() const { return kind_; }
  std::size_t size() const { return kind_ == StatKind::TOY_QUADRATIC ? w_.size() : c_.size(); }
  const NodeVector& counts() const { return c_; }
  const NodeVector& baselines() const { return b_; }
  const NodeVector& weights() const { return w_; }

  double value(std::span<const double> x) const {
    check_size(x);
    return value_impl(Identity{}, x);
  }
  NodeVector gradient(std::span<const double> x) const {
    check_size(x);
    NodeVector g(x.size());
    gradient_impl(Identity{}, x, g);
    return g;
  }
  /// The raw scan score stat(x) (for the toy objective, w'x).
  double statistic(std::span<const double> x) const {
    check_size(x);
    Sums s = sums(Identity{}, x);
    if (kind_ == StatKind::TOY_QUADRATIC) return s.cx;
    if (s.l1 < kSingularMass) return 0.0;
    return stat_from(s);
  }

  /// Value and gradient of the objective restricted to the coordinates in
  /// `idx`; xs holds the values on those coordinates, all others are zero.
  double value_on(std::span<const int> idx, std::span<const double> xs) const {
    return value_impl(Indexed{idx}, xs);
  }
  void gradient_on(std::span<const int> idx, std::span<const double> xs,
                   std::span<double> out) const {
    gradient_impl(Indexed{idx}, xs, out);
  }

 private:
  struct Identity {
    std::size_t operator()(std::size_t i) const { return i; }
  };
  struct Indexed {
    std::span<const int> idx;
    std::size_t operator()(std::size_t i) const { return static_cast<std::size_t>(idx[i]); }
  };
  struct Sums {
    double cx = 0.0;  // c'x (w'x for the toy objective)
    double bx = 0.0;
    double ones = 0.0;
    double sq = 0.0;
    double l1 = 0.0;
  };

  ScanObjective(StatKind kind, NodeVector c, NodeVector b, NodeVector w)
      : kind_(kind), c_(std::move(c)), b_(std::move(b)), w_(std::move(w)) {
    total_c_ = std::accumulate(c_.begin(), c_.end(), 0.0);
    total_b_ = std::accumulate(b_.begin(), b_.end(), 0.0);
  }

  static void check_finite(const NodeVector& v, const char* what) {
    for (double x : v)
      if (!std::isfinite(x)) throw InputError(std::string(what) + " must be finite");
  }
  static void check_poisson(const NodeVector& c, const NodeVector& b) {
    if (c.size() != b.size()) throw InputError("counts and baselines differ in length");
    check_finite(c, "counts");
    check_finite(b, "baselines");
    for (std::size_t i = 0; i < c.size(); ++i)
      if (c[i] < 0.0 || b[i] < 0.0)
        throw InputError("counts and baselines must be nonnegative (node " + std::to_string(i) + ")");
  }
  void check_size(std::span<const double> x) const {
    if (x.size() != size())
      throw InputError("objective expects a vector of length " + std::to_string(size()) +
                       ", got " + std::to_string(x.size()));
  }

  static double safe_log(double q) { return std::log(std::max(q, kLogFloor)); }

  template <class Map>
  Sums sums(Map map, std::span<const double> xs) const {
    Sums s;
    const NodeVector& lin = kind_ == StatKind::TOY_QUADRATIC ? w_ : c_;
    const bool poisson = kind_ == StatKind::KULLDORFF || kind_ == StatKind::EBP;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double x = xs[i];
      const std::size_t node = map(i);
      s.cx += lin[node] * x;
      if (poisson) s.bx += b_[node] * x;
      s.ones += x;
      s.sq += x * x;
      s.l1 += std::abs(x);
    }
    return s;
  }

  double stat_from(const Sums& s) const {
    const double eps = kDenominatorGuard;
    switch (kind_) {
      case StatKind::EMS: return s.cx * s.cx / (s.ones + eps);
      case StatKind::KULLDORFF: {
        const double q1 = s.cx / (s.bx + eps);
        const double q3 = (total_c_ - s.cx) / (total_b_ - s.bx + eps);
        const double q = total_c_ / (total_b_ + eps);
        return s.cx * safe_log(q1) + (total_c_ - s.cx) * safe_log(q3) - total_c_ * safe_log(q);
      }
      case StatKind::EBP: return s.cx * safe_log(s.cx / (s.bx + eps)) + s.bx - s.cx;
      case StatKind::TOY_QUADRATIC: return s.cx;
    }
    return 0.0;
  }

  template <class Map>
  double value_impl(Map map, std::span<const double> xs) const {
    Sums s = sums(map, xs);
    double f;
    if (kind_ == StatKind::TOY_QUADRATIC)
      f = -s.cx + 0.5 * s.sq;
    else if (s.l1 < kSingularMass)
      f = 0.0;
    else
      f = -stat_from(s) + 0.5 * s.sq;
    if (!std::isfinite(f))
      throw NumericError(std::string(to_string(kind_)) + " objective is not finite (c'x=" +
                         std::to_string(s.cx) + ", 1'x=" + std::to_string(s.ones) + ")");
    return f;
  }

  template <class Map>
  void gradient_impl(Map map, std::span<const double> xs, std::span<double> out) const {
    Sums s = sums(map, xs);
    const double eps = kDenominatorGuard;
    if (kind_ == StatKind::TOY_QUADRATIC) {
      for (std::size_t i = 0; i < xs.size(); ++i) out[i] = xs[i] - w_[map(i)];
      return;
    }
    if (s.l1 < kSingularMass) {
      for (std::size_t i = 0; i < xs.size(); ++i) out[i] = -c_[map(i)];
      return;
    }
    switch (kind_) {
      case StatKind::EMS: {
        const double d = s.ones + eps;
        const double r = s.cx / d;
        for (std::size_t i = 0; i < xs.size(); ++i)
          out[i] = -2.0 * c_[map(i)] * r + r * r + xs[i];
        break;
      }
      case StatKind::KULLDORFF: {
        const double q1 = s.cx / (s.bx + eps);
        const double q3 = (total_c_ - s.cx) / (total_b_ - s.bx + eps);
        const double l1 = safe_log(q1), l3 = safe_log(q3);
        // The q*b terms only appear where the logarithm is not clamped.
        const double r1 = q1 > kLogFloor ? q1 : 0.0;
        const double r3 = q3 > kLogFloor ? q3 : 0.0;
        const double k1 = q1 > kLogFloor ? 1.0 : 0.0;
        const double k3 = q3 > kLogFloor ? 1.0 : 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
          const double c = c_[map(i)], b = b_[map(i)];
          const double ds = c * l1 + k1 * c - r1 * b - c * l3 - k3 * c + r3 * b;
          out[i] = -ds + xs[i];
        }
        break;
      }
      case StatKind::EBP: {
        const double q = s.cx / (s.bx + eps);
        const double l = safe_log(q);
        const double r = q > kLogFloor ? q : 0.0;
        const double kq = q > kLogFloor ? 1.0 : 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
          const double c = c_[map(i)], b = b_[map(i)];
          const double ds = c * l + kq * c - r * b + b - c;
          out[i] = -ds + xs[i];
        }
        break;
      }
      case StatKind::TOY_QUADRATIC: break;
    }
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (!std::isfinite(out[i]))
        throw NumericError(std::string(to_string(kind_)) + " gradient is not finite at coordinate " +
                           std::to_string(map(i)));
  }

  StatKind kind_;
  NodeVector c_, b_, w_;
  double total_c_ = 0.0, total_b_ = 0.0;
};

inline double objective_value(const ScanObjective& obj, std::span<const double> x) {
  return obj.value(x);
}
inline NodeVector objective_gradient(const ScanObjective& obj, std::span<const double> x) {
  return obj.gradient(x);
}

/// Z-scores `raw` (population standard deviation) and rescales so the largest
/// magnitude is 0.99. Constant input maps to all zeros.
inline NodeVector normalize_counts_ems(std::span<const double> raw) {
  NodeVector out(raw.size(), 0.0);
  if (raw.empty()) return out;
  const double n = static_cast<double>(raw.size());
  const double mean = std::accumulate(raw.begin(), raw.end(), 0.0) / n;
  double var = 0.0;
  for (double r : raw) var += (r - mean) * (r - mean);
  var /= n;
  if (!(var > 0.0)) return out;
  const double sd = std::sqrt(var);
  double peak = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out[i] = (raw[i] - mean) / sd;
    peak = std::max(peak, std::abs(out[i]));
  }
  if (!(peak > 0.0)) return NodeVector(raw.size(), 0.0);
  for (double& v : out) v *= 0.99 / peak;
  return out;
}

/// Largest count, floored at zero; the c-hat of the EMS curvature bound.
inline double ems_c_hat(std::span<const double> counts) {
  double m = 0.0;
  for (double c : counts) m = std::max(m, c);
  return m;
}

/// delta = sqrt(1 - 2 xi (1 - c_hat^2) + xi^2) on 0 < xi < 2(1 - c_hat^2), 0 <= c_hat < 1.
inline double wrsc_delta_ems(double xi, double c_hat) {
  if (!(c_hat >= 0.0 && c_hat < 1.0))
    throw InputError("c_hat must lie in [0, 1), got " + std::to_string(c_hat));
  const double a = 1.0 - c_hat * c_hat;
  if (!(xi > 0.0 && xi < 2.0 * a))
    throw InputError("xi must lie in (0, 2(1 - c_hat^2)) = (0, " + std::to_string(2.0 * a) +
                     "), got " + std::to_string(xi));
  return std::sqrt(std::max(0.0, 1.0 - 2.0 * xi * a + xi * xi));
}

}  // namespace gsp
