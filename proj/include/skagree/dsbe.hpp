#pragma once

// Doubly symmetric binary source with an erasure eavesdropper, DSBE(p, eps):
// closed-form thresholds, rate bounds, and the curve family over eps.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "skagree/error.hpp"
#include "skagree/feasibility.hpp"
#include "skagree/info.hpp"
#include "skagree/optimize.hpp"
#include "skagree/pmf.hpp"
#include "skagree/thresholds.hpp"

namespace skagree {

namespace detail {

inline void check_crossover(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::OutOfRange, "crossover probability outside [0,1]");
}

inline void check_erasure(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw Error(ErrorCode::EpsilonOutOfRange, "erasure probability outside [0,1]");
}

inline double binary_entropy_bits(double p) { return nats_to_bits(binary_entropy(p)); }

}  // namespace detail

/// p and 1 - p describe the same source up to relabelling Y; this returns the
/// representative in [0, 0.5].
inline double canonical_crossover(double p) {
  detail::check_crossover(p);
  return std::min(p, 1.0 - p);
}

/// [[(1-p)/2, p/2], [p/2, (1-p)/2]].
inline JointPmf dsbe_pmf(double p) {
  detail::check_crossover(p);
  Matrix m(2, 2);
  m << (1.0 - p) / 2.0, p / 2.0, p / 2.0, (1.0 - p) / 2.0;
  return validate_joint(m, {"0", "1"}, {"0", "1"});
}

inline Source dsbe_source(double p, double eps) { return build_erasure_source(dsbe_pmf(p), eps); }

/// p_{Y|X} of the source, a BSC(p).
inline Channel bsc(double p) {
  detail::check_crossover(p);
  Matrix m(2, 2);
  m << 1.0 - p, p, p, 1.0 - p;
  return validate_channel(m, {"0", "1"}, {"0", "1"});
}

struct DsbeThresholds {
  double eps2 = 0.0;    // min(p,1-p)/max(p,1-p), as computed by epsilon2()
  double oneway = 0.0;  // 4p(1-p)
};

inline DsbeThresholds dsbe_thresholds(double p) {
  detail::check_crossover(p);
  return {epsilon2(dsbe_pmf(p)).value, 4.0 * p * (1.0 - p)};
}

/// Rate of N-fold repetition advantage distillation, in bits:
/// ((p^N + q^N)/N) max(0, eps^N - h(p^N/(p^N + q^N))), q = 1 - p.
inline double repetition_rate(double p, double eps, unsigned n) {
  detail::check_crossover(p);
  detail::check_erasure(eps);
  if (n == 0) throw Error(ErrorCode::OutOfRange, "N must be at least 1");
  const double pn = std::pow(p, n), qn = std::pow(1.0 - p, n);
  const double agree = pn + qn;
  const double bracket = std::pow(eps, n) - detail::binary_entropy_bits(pn / agree);
  return agree / static_cast<double>(n) * std::max(0.0, bracket);
}

/// I(X;Y|J) in nats for the channel Z -> J that sends a revealed (0,0) to
/// J = 0 and a revealed (1,1) to J = 1, each with probability theta, and
/// everything else to J = e. theta = 1 is the deterministic map.
inline double dsbe_i_xy_given_j(double p, double eps, double theta) {
  detail::check_erasure(eps);
  if (!(theta >= 0.0 && theta <= 1.0)) throw Error(ErrorCode::OutOfRange, "theta outside [0,1]");
  const JointPmf pxy = dsbe_pmf(p);
  const Source source = build_erasure_source(pxy, eps);
  const Channel z = source.eve_channel();
  // J alphabet {0, 1, e}; Z alphabet {e, (0,0), (0,1), (1,0), (1,1)}.
  Matrix j_given_z = Matrix::Zero(5, 3);
  j_given_z(0, 2) = 1.0;
  j_given_z(1, 0) = theta;
  j_given_z(1, 2) = 1.0 - theta;
  j_given_z(2, 2) = 1.0;
  j_given_z(3, 2) = 1.0;
  j_given_z(4, 1) = theta;
  j_given_z(4, 2) = 1.0 - theta;
  double info = 0.0;
  for (Eigen::Index j = 0; j < 3; ++j) {
    Matrix slice = Matrix::Zero(2, 2);
    for (std::size_t x = 0; x < 2; ++x)
      for (std::size_t y = 0; y < 2; ++y)
        for (std::size_t zi = 0; zi < z.output_size(); ++zi)
          slice(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) +=
              pxy(x, y) * z(source.pair_index(x, y), zi) * j_given_z(static_cast<Eigen::Index>(zi), j);
    const double pj = slice.sum();
    if (pj > 0.0) info += pj * mutual_information(slice);
  }
  return info;
}

/// Values below this many nats are treated as rounding noise and reported as 0.
inline constexpr double kRateNoiseFloor = 1e-14;

/// Upper bound I(X;Y|J) on the intrinsic information, in bits, minimized over
/// the theta family above. The minimizing theta is (1 - eps2)/(1 - eps)
/// clipped to 1, which makes the J = e slice independent whenever eps <= eps2.
inline double b0_sub(double p, double eps) {
  detail::check_erasure(eps);
  const double pc = canonical_crossover(p);
  const double e2 = dsbe_thresholds(pc).eps2;
  const double theta = eps < 1.0 ? std::min(1.0, (1.0 - e2) / (1.0 - eps)) : 1.0;
  const double v = dsbe_i_xy_given_j(pc, eps, theta);
  return v < kRateNoiseFloor ? 0.0 : nats_to_bits(v);
}

namespace detail {

// Objective I(U;Y|V) - (1-eps) I(U;X|V) in nats for uniform X, Y = BSC(p)(X),
// binary V and U. theta = logits of p(V=0|x) (2) and p(U=0|v,x) (4).
inline double s_ow_objective(const std::vector<double>& theta, double p, double eps) {
  auto sig = [](double t) { return 1.0 / (1.0 + std::exp(-t)); };
  double total = 0.0;
  for (int v = 0; v < 2; ++v) {
    std::array<double, 2> pxv{};
    for (int x = 0; x < 2; ++x) {
      const double pv0 = sig(theta[static_cast<std::size_t>(x)]);
      pxv[static_cast<std::size_t>(x)] = 0.5 * (v == 0 ? pv0 : 1.0 - pv0);
    }
    const double pv = pxv[0] + pxv[1];
    if (pv <= 0.0) continue;
    Matrix ux(2, 2), uy = Matrix::Zero(2, 2);
    for (int x = 0; x < 2; ++x) {
      const double pu0 = sig(theta[static_cast<std::size_t>(2 + 2 * v + x)]);
      ux(0, x) = pxv[static_cast<std::size_t>(x)] / pv * pu0;
      ux(1, x) = pxv[static_cast<std::size_t>(x)] / pv * (1.0 - pu0);
    }
    for (int u = 0; u < 2; ++u)
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) uy(u, y) += ux(u, x) * (x == y ? 1.0 - p : p);
    total += pv * (mutual_information(uy) - (1.0 - eps) * mutual_information(ux));
  }
  return total;
}

}  // namespace detail

/// Search-based lower bound on the one-way key capacity of DSBE(p, eps), in
/// bits: max over binary V, U with V - U - X - YZ of I(U;Y|V) - I(U;Z|V),
/// where I(U;Z|V) = (1-eps) I(U;X|V). Multi-start Nelder-Mead in logit
/// coordinates, including starts with U a weakly informative copy of X.
inline double s_ow_lower_bound(double p, double eps, int random_starts = 4, std::uint64_t seed = 0x50f) {
  detail::check_crossover(p);
  detail::check_erasure(eps);
  auto objective = [&](const std::vector<double>& t) { return -detail::s_ow_objective(t, p, eps); };
  auto logit = [](double q) { return std::log(q / (1.0 - q)); };
  NelderMeadOptions opt;
  opt.initial_step = 0.3;
  opt.f_tolerance = 1e-15;
  opt.max_iterations = 1500;

  std::vector<std::vector<double>> starts;
  for (double d : {0.45, 0.3, 0.15, 0.05, 0.015}) {
    const double hi = logit(0.5 + d), lo = logit(0.5 - d);
    starts.push_back({0.0, 0.0, hi, lo, hi, lo});
    starts.push_back({logit(0.7), logit(0.3), hi, lo, lo, hi});
  }
  for (int s = 0; s < random_starts; ++s) {
    auto rng = start_engine(seed, static_cast<std::uint64_t>(s));
    std::vector<double> t(6);
    for (double& v : t) v = 6.0 * unit_uniform(rng) - 3.0;
    starts.push_back(t);
  }
  double best = 0.0;
  for (const auto& s : starts) {
    best = std::max(best, -objective(s));
    best = std::max(best, -nelder_mead(objective, s, opt).value);
  }
  return best < 1e-12 ? 0.0 : nats_to_bits(best);
}

struct CurvePoint {
  double epsilon = 0.0;
  double i_xy_given_z = 0.0;  // bits
  double b0_sub = 0.0;        // bits
  double s_ow_lb = 0.0;       // bits
  std::vector<double> r_n;    // bits, r_n[i] is R_{i+2}
};

/// Curves over eps for DSBE(p): eps I(X;Y), the intrinsic-information bound,
/// the one-way lower bound and repetition rates R_2 .. R_{n_max}. Points are
/// computed in parallel and returned in grid order.
inline std::vector<CurvePoint> emit_curves(double p, const std::vector<double>& eps_grid, unsigned n_max = 6,
                                           unsigned workers = 0) {
  detail::check_crossover(p);
  for (double e : eps_grid) detail::check_erasure(e);
  if (n_max < 2) throw Error(ErrorCode::OutOfRange, "n_max must be at least 2");
  const double info = mutual_information(dsbe_pmf(p));
  std::vector<CurvePoint> out(eps_grid.size());
  auto compute = [&](std::size_t i) {
    const double e = eps_grid[i];
    CurvePoint c;
    c.epsilon = e;
    c.i_xy_given_z = nats_to_bits(e * info);
    c.b0_sub = b0_sub(p, e);
    c.s_ow_lb = s_ow_lower_bound(p, e);
    for (unsigned n = 2; n <= n_max; ++n) c.r_n.push_back(repetition_rate(p, e, n));
    out[i] = std::move(c);
  };
  if (workers == 0) workers = default_worker_count();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, eps_grid.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < eps_grid.size(); ++i) compute(i);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < eps_grid.size(); i += workers) compute(i);
      });
    for (auto& t : pool) t.join();
  }
  return out;
}

/// `steps` evenly spaced points from lo to hi inclusive.
inline std::vector<double> linear_grid(double lo, double hi, std::size_t steps) {
  if (steps == 0) throw Error(ErrorCode::OutOfRange, "steps must be at least 1");
  if (steps == 1) return {lo};
  std::vector<double> g(steps);
  for (std::size_t i = 0; i < steps; ++i)
    g[i] = i + 1 == steps ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
  return g;
}

}  // namespace skagree
