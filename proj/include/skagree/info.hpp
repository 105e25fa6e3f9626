#pragma once

// Entropies, mutual informations, Rényi divergences, Chernoff information and
// total variation. Everything is in nats; +infinity is a legal result, NaN is
// never returned.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "skagree/error.hpp"
#include "skagree/pmf.hpp"

namespace skagree {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kLn2 = std::numbers::ln2;

inline double nats_to_bits(double nats) { return nats / kLn2; }
inline double bits_to_nats(double bits) { return bits * kLn2; }

namespace detail {

inline void check_pmf(std::span<const double> p) {
  if (p.empty()) throw Error(ErrorCode::InvalidPmf, "empty pmf");
  double total = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0) throw Error(ErrorCode::InvalidPmf, "pmf entry is negative or not finite");
    total += v;
  }
  if (std::abs(total - 1.0) > kRenormalizeTolerance) throw Error(ErrorCode::InvalidPmf, "pmf does not sum to one");
}

inline void check_pair(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(ErrorCode::AlphabetMismatch, "pmfs have different lengths");
  check_pmf(p);
  check_pmf(q);
}

// p log(p/q) - p + q, which is nonnegative termwise and sums to KL(p||q) when
// both arguments are pmfs. Evaluated without cancellation when p ≈ q.
inline double kl_term(double p, double q) {
  if (p <= 0.0) return q;
  if (q <= 0.0) return kInf;
  const double r = (p - q) / q;
  if (std::abs(r) < 1e-3) {
    // (1+r)log(1+r) - r = r^2/2 - r^3/6 + r^4/12 - r^5/20 + ...
    const double r2 = r * r;
    return q * r2 * (0.5 - r / 6.0 + r2 / 12.0 - r2 * r / 20.0 + r2 * r2 / 30.0);
  }
  return p * std::log(p / q) - p + q;
}

inline double log_sum_exp(const std::vector<double>& logs) {
  if (logs.empty()) return -kInf;
  const double m = *std::max_element(logs.begin(), logs.end());
  if (m == -kInf) return -kInf;
  double s = 0.0;
  for (double v : logs) s += std::exp(v - m);
  return m + std::log(s);
}

}  // namespace detail

inline double entropy(std::span<const double> p) {
  detail::check_pmf(p);
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return std::max(h, 0.0);
}

inline double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::OutOfRange, "binary entropy argument outside [0,1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log(p) - (1.0 - p) * std::log1p(-p);
}

inline double kl_divergence(std::span<const double> p, std::span<const double> q) {
  detail::check_pair(p, q);
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) d += detail::kl_term(p[i], q[i]);
  return d;
}

/// I(X;Y) for a matrix of nonnegative weights; the weights are normalized
/// first, so an unnormalized slice of a larger joint can be passed in.
inline double mutual_information(const Matrix& weights) {
  const double total = weights.sum();
  if (!(total > 0.0)) return 0.0;
  const Eigen::VectorXd px = weights.rowwise().sum() / total;
  const Eigen::RowVectorXd py = weights.colwise().sum() / total;
  double info = 0.0;
  for (Eigen::Index x = 0; x < weights.rows(); ++x)
    for (Eigen::Index y = 0; y < weights.cols(); ++y) info += detail::kl_term(weights(x, y) / total, px(x) * py(y));
  return info;
}

inline double mutual_information(const JointPmf& p) { return mutual_information(p.probs()); }

/// I(X;Y|Z) under p_XY p_{Z|XY}, by enumerating z.
inline double conditional_mutual_information(const Source& source) {
  const JointPmf& p = source.joint();
  const Channel ch = source.eve_channel();
  double info = 0.0;
  Matrix slice(static_cast<Eigen::Index>(p.x_size()), static_cast<Eigen::Index>(p.y_size()));
  for (std::size_t z = 0; z < ch.output_size(); ++z) {
    for (std::size_t x = 0; x < p.x_size(); ++x)
      for (std::size_t y = 0; y < p.y_size(); ++y)
        slice(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = p(x, y) * ch(source.pair_index(x, y), z);
    const double pz = slice.sum();
    if (pz > 0.0) info += pz * mutual_information(slice);
  }
  return info;
}

/// Rényi divergence of order alpha in [0, inf]; alpha = 1 is KL and
/// alpha = inf is log max p/q.
inline double renyi_divergence(std::span<const double> p, std::span<const double> q, double alpha) {
  detail::check_pair(p, q);
  if (std::isnan(alpha) || alpha < 0.0) throw Error(ErrorCode::InvalidAlpha, "order must lie in [0, inf]");
  if (alpha == 1.0) return kl_divergence(p, q);
  if (std::isinf(alpha)) {
    double best = -kInf;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] <= 0.0) continue;
      if (q[i] <= 0.0) return kInf;
      best = std::max(best, std::log(p[i]) - std::log(q[i]));
    }
    return std::max(best, 0.0);
  }
  std::vector<double> logs;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) {
      if (alpha > 1.0) return kInf;
      continue;
    }
    logs.push_back(alpha * std::log(p[i]) + (1.0 - alpha) * std::log(q[i]));
  }
  const double lse = detail::log_sum_exp(logs);
  if (lse == -kInf) return kInf;  // alpha < 1 with disjoint supports
  return std::max(lse / (alpha - 1.0), 0.0);
}

inline double renyi_divergence(const JointPmf& p, const JointPmf& q, double alpha) {
  check_same_alphabets(p, q);
  const Eigen::VectorXd pv = p.probs().reshaped<Eigen::RowMajor>();
  const Eigen::VectorXd qv = q.probs().reshaped<Eigen::RowMajor>();
  return renyi_divergence(std::span<const double>(pv.data(), static_cast<std::size_t>(pv.size())),
                          std::span<const double>(qv.data(), static_cast<std::size_t>(qv.size())), alpha);
}

struct ChernoffResult {
  double value = 0.0;  // nats, possibly +inf
  double alpha = 0.5;  // minimizer of log sum p^a q^(1-a)
};

/// Golden-section minimizer of a convex function on [lo, hi].
template <typename F>
double golden_section_minimize(F&& f, double lo, double hi, double tolerance) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tolerance) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// Chernoff information -log min_a sum p^a q^(1-a), the sum running over the
/// common support. Disjoint supports give +inf.
inline ChernoffResult chernoff_information_detail(std::span<const double> p, std::span<const double> q) {
  detail::check_pair(p, q);
  std::vector<double> lp, lq;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0 && q[i] > 0.0) {
      lp.push_back(std::log(p[i]));
      lq.push_back(std::log(q[i]));
    }
  if (lp.empty()) return {kInf, 0.5};
  std::vector<double> scratch(lp.size());
  auto objective = [&](double a) {
    for (std::size_t i = 0; i < lp.size(); ++i) scratch[i] = a * lp[i] + (1.0 - a) * lq[i];
    return detail::log_sum_exp(scratch);
  };
  double best_alpha = golden_section_minimize(objective, 0.0, 1.0, 1e-12);
  double best = objective(best_alpha);
  for (double edge : {0.0, 1.0}) {
    const double v = objective(edge);
    if (v < best) {
      best = v;
      best_alpha = edge;
    }
  }
  return {std::max(-best, 0.0), best_alpha};
}

inline double chernoff_information(std::span<const double> p, std::span<const double> q) {
  return chernoff_information_detail(p, q).value;
}

inline double tv_distance(std::span<const double> p, std::span<const double> q) {
  detail::check_pair(p, q);
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return std::min(0.5 * s, 1.0);
}

}  // namespace skagree
