#pragma once

// Erasure-probability thresholds of a joint pmf: the path minima epsilon1 and
// epsilon2, a certified lower bound on epsilon3, and the one-way and L-bar
// vanishing thresholds.
//
// All routines work on the sub-pmf of symbols with positive marginals and
// report witnesses in the original indexing.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "skagree/correlation.hpp"
#include "skagree/info.hpp"
#include "skagree/optimize.hpp"
#include "skagree/pmf.hpp"

namespace skagree {

/// Alternating sequence (x1,y1,...,xk,yk) of distinct row and column indices.
struct Path {
  std::vector<std::size_t> xs;
  std::vector<std::size_t> ys;

  std::size_t length() const { return xs.size(); }
  bool operator==(const Path&) const = default;
};

inline void check_path(const JointPmf& p, const Path& path) {
  if (path.xs.empty() || path.xs.size() != path.ys.size())
    throw Error(ErrorCode::InvalidPath, "path needs k >= 1 x and y indices");
  std::vector<bool> used_x(p.x_size(), false), used_y(p.y_size(), false);
  for (std::size_t i = 0; i < path.length(); ++i) {
    const std::size_t x = path.xs[i], y = path.ys[i];
    if (x >= p.x_size() || y >= p.y_size()) throw Error(ErrorCode::InvalidPath, "index outside the alphabet");
    if (used_x[x] || used_y[y]) throw Error(ErrorCode::InvalidPath, "path repeats a symbol");
    used_x[x] = used_y[y] = true;
  }
}

/// Geometric-mean cross ratio assigned to a path. Zero cells follow
/// 0/0 := 1 and c/0 := inf.
inline double path_value(const JointPmf& p, const Path& path) {
  check_path(p, path);
  const std::size_t k = path.length();
  double num = 0.0, den = 0.0;
  bool num_zero = false, den_zero = false;
  auto take = [](double v, double& acc, bool& zero) {
    if (v <= 0.0)
      zero = true;
    else
      acc += std::log(v);
  };
  for (std::size_t i = 0; i < k; ++i) {
    take(p(path.xs[i], path.ys[i]), num, num_zero);
    take(p(path.xs[i], path.ys[(i + k - 1) % k]), den, den_zero);
  }
  if (num_zero && den_zero) return 1.0;
  if (num_zero) return 0.0;
  if (den_zero) return kInf;
  return std::exp((num - den) / static_cast<double>(k));
}

namespace detail {

// Rows and columns with positive marginal mass.
struct Support {
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
  Matrix probs;  // restricted, still sums to one
};

inline Support positive_support(const JointPmf& p) {
  Support s;
  const auto px = p.x_marginal();
  const auto py = p.y_marginal();
  for (std::size_t x = 0; x < p.x_size(); ++x)
    if (px[x] > 0.0) s.rows.push_back(x);
  for (std::size_t y = 0; y < p.y_size(); ++y)
    if (py[y] > 0.0) s.cols.push_back(y);
  s.probs.resize(static_cast<Eigen::Index>(s.rows.size()), static_cast<Eigen::Index>(s.cols.size()));
  for (std::size_t i = 0; i < s.rows.size(); ++i)
    for (std::size_t j = 0; j < s.cols.size(); ++j)
      s.probs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = p(s.rows[i], s.cols[j]);
  return s;
}

inline double falling_factorial(std::size_t n, std::size_t k) {
  double v = 1.0;
  for (std::size_t i = 0; i < k; ++i) v *= static_cast<double>(n - i);
  return v;
}

}  // namespace detail

inline constexpr std::size_t kMaxPathAlphabet = 8;
inline constexpr double kMaxPathCount = 1e9;

/// Number of paths visited by the enumeration (rotations removed).
inline double path_enumeration_size(std::size_t nx, std::size_t ny) {
  double total = 0.0;
  for (std::size_t k = 1; k <= std::min(nx, ny); ++k)
    total += detail::falling_factorial(nx, k) * detail::falling_factorial(ny, k) / static_cast<double>(k);
  return total;
}

struct Epsilon1Result {
  double value = 1.0;
  Path witness;
};

/// epsilon1 by exhaustive depth-first enumeration of paths. Each cyclic path
/// is visited once, starting from its smallest x index.
inline Epsilon1Result epsilon1_paths(const JointPmf& p) {
  const auto s = detail::positive_support(p);
  const std::size_t nx = s.rows.size(), ny = s.cols.size();
  if (std::min(nx, ny) > kMaxPathAlphabet || path_enumeration_size(nx, ny) > kMaxPathCount)
    throw Error(ErrorCode::AlphabetTooLarge,
                "path enumeration over a " + std::to_string(nx) + "x" + std::to_string(ny) +
                    " support is too large; use epsilon1_lp");

  // log p with -inf for zero cells
  Matrix lg(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(ny));
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) {
      const double v = s.probs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      lg(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v > 0.0 ? std::log(v) : -kInf;
    }
  auto L = [&](std::size_t i, std::size_t j) { return lg(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)); };

  // Running state: finite parts of log numerator/denominator and zero counts.
  struct Acc {
    double num = 0.0, den = 0.0;
    int num_zero = 0, den_zero = 0;
  };
  auto add = [](double v, double& acc, int& zeros) {
    if (v == -kInf)
      ++zeros;
    else
      acc += v;
  };

  // Compare values in log space: -inf for zero, +inf for infinity.
  double best_log = kInf;
  Path best;
  std::vector<std::size_t> xs, ys;
  std::vector<bool> used_x(nx, false), used_y(ny, false);
  bool done = false;

  auto close = [&](const Acc& acc) {
    const std::size_t k = xs.size();
    Acc full = acc;
    add(L(xs.front(), ys.back()), full.den, full.den_zero);
    double v;
    if (full.num_zero > 0 && full.den_zero > 0)
      v = 0.0;
    else if (full.num_zero > 0)
      v = -kInf;
    else if (full.den_zero > 0)
      v = kInf;
    else
      v = (full.num - full.den) / static_cast<double>(k);
    if (v < best_log || best.xs.empty()) {
      best_log = v;
      best.xs = xs;
      best.ys = ys;
      if (v == -kInf) done = true;
    }
  };

  auto dfs = [&](auto&& self, Acc acc) -> void {
    if (done) return;
    // xs has one more entry than ys: choose the next y.
    const std::size_t x_last = xs.back();
    for (std::size_t y = 0; y < ny && !done; ++y) {
      if (used_y[y]) continue;
      Acc with_y = acc;
      add(L(x_last, y), with_y.num, with_y.num_zero);
      used_y[y] = true;
      ys.push_back(y);
      close(with_y);
      for (std::size_t x = xs.front() + 1; x < nx && !done; ++x) {
        if (used_x[x]) continue;
        Acc with_x = with_y;
        add(L(x, y), with_x.den, with_x.den_zero);
        used_x[x] = true;
        xs.push_back(x);
        self(self, with_x);
        xs.pop_back();
        used_x[x] = false;
      }
      ys.pop_back();
      used_y[y] = false;
    }
  };

  for (std::size_t x1 = 0; x1 < nx && !done; ++x1) {
    used_x[x1] = true;
    xs.push_back(x1);
    dfs(dfs, Acc{});
    xs.pop_back();
    used_x[x1] = false;
  }

  Epsilon1Result out;
  out.value = best_log == -kInf ? 0.0 : std::exp(best_log);
  for (std::size_t i = 0; i < best.xs.size(); ++i) {
    out.witness.xs.push_back(s.rows[best.xs[i]]);
    out.witness.ys.push_back(s.cols[best.ys[i]]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Difference-constraint LP

namespace detail {

// Decides whether there are m(x), n(y) with
//   lower(x,y) <= m(x) + n(y) <= upper(x,y)
// over the cells where `active` holds, via Bellman-Ford on the constraint
// graph with n' = -n. On success fills m and n.
inline bool difference_feasible(const Matrix& lower, const Matrix& upper, const std::vector<std::vector<bool>>& active,
                                std::vector<double>& m, std::vector<double>& n) {
  const std::size_t nx = static_cast<std::size_t>(upper.rows()), ny = static_cast<std::size_t>(upper.cols());
  const std::size_t v = nx + ny;
  struct Edge {
    std::size_t from, to;
    double w;
  };
  std::vector<Edge> edges;
  edges.reserve(2 * nx * ny);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      if (!active[x][y]) continue;
      const auto xi = static_cast<Eigen::Index>(x), yi = static_cast<Eigen::Index>(y);
      edges.push_back({nx + y, x, upper(xi, yi)});   // m(x) - n'(y) <= upper
      edges.push_back({x, nx + y, -lower(xi, yi)});  // n'(y) - m(x) <= -lower
    }
  std::vector<double> dist(v, 0.0);
  for (std::size_t pass = 0; pass < v; ++pass) {
    bool changed = false;
    for (const auto& e : edges) {
      const double cand = dist[e.from] + e.w;
      if (cand < dist[e.to]) {
        dist[e.to] = cand;
        changed = true;
      }
    }
    if (!changed) {
      m.assign(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(nx));
      n.resize(ny);
      for (std::size_t y = 0; y < ny; ++y) n[y] = -dist[nx + y];
      return true;
    }
  }
  return false;
}

// Largest t such that some rank-one u(x)v(y) satisfies
//   t * p(x,y) <= u(x) v(y) <= cap(x,y)
// on the full-support cells of p. Works in logs and bisects on log t.
struct RankOneFit {
  double log_t = -kInf;
  std::vector<double> m, n;  // log u, log v
};

inline RankOneFit best_rank_one_under(const Matrix& log_p, const Matrix& log_cap, double tolerance) {
  const std::size_t nx = static_cast<std::size_t>(log_p.rows()), ny = static_cast<std::size_t>(log_p.cols());
  std::vector<std::vector<bool>> active(nx, std::vector<bool>(ny, true));
  // u v = min cap is feasible for t = min cap / max p.
  double lo = log_cap.minCoeff() - log_p.maxCoeff() - 1e-9;
  double hi = (log_cap - log_p).minCoeff();
  RankOneFit fit;
  std::vector<double> m, n;
  auto feasible = [&](double log_t) {
    const Matrix lower = log_p.array() + log_t;
    return difference_feasible(lower, log_cap, active, m, n);
  };
  if (feasible(hi)) {
    fit.log_t = hi;
    fit.m = m;
    fit.n = n;
    return fit;
  }
  while (!feasible(lo)) lo -= std::max(1.0, hi - lo);
  fit.log_t = lo;
  fit.m = m;
  fit.n = n;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      lo = mid;
      fit.log_t = mid;
      fit.m = m;
      fit.n = n;
    } else {
      hi = mid;
    }
  }
  return fit;
}

}  // namespace detail

struct Epsilon1LpResult {
  double value = 1.0;
  double a_star = 0.0;    // -log value
  std::vector<double> m;  // potentials over the original X (0 off support)
  std::vector<double> n;  // potentials over the original Y
};

/// epsilon1 as exp(-A*) with A* the optimum of
///   minimize A  s.t.  m(x) + n(y) <= log p(x,y) <= m(x) + n(y) + A,
/// found by bisection on A with Bellman-Ford feasibility checks.
inline Epsilon1LpResult epsilon1_lp(const JointPmf& p, double tolerance = 1e-11) {
  const auto s = detail::positive_support(p);
  Epsilon1LpResult out;
  out.m.assign(p.x_size(), 0.0);
  out.n.assign(p.y_size(), 0.0);
  if ((s.probs.array() <= 0.0).any()) {
    out.value = 0.0;
    out.a_star = kInf;
    return out;
  }
  const Matrix L = s.probs.array().log();
  const std::size_t nx = s.rows.size(), ny = s.cols.size();
  std::vector<std::vector<bool>> active(nx, std::vector<bool>(ny, true));
  std::vector<double> m, n;
  auto feasible = [&](double a) {
    const Matrix lower = L.array() - a;
    return detail::difference_feasible(lower, L, active, m, n);
  };
  double lo = 0.0, hi = L.maxCoeff() - L.minCoeff();
  std::vector<double> best_m, best_n;
  if (feasible(lo)) {
    hi = lo;
    best_m = m;
    best_n = n;
  } else {
    feasible(hi);
    best_m = m;
    best_n = n;
    while (hi - lo > tolerance) {
      const double mid = 0.5 * (lo + hi);
      if (feasible(mid)) {
        hi = mid;
        best_m = m;
        best_n = n;
      } else {
        lo = mid;
      }
    }
  }
  out.a_star = hi;
  out.value = std::exp(-hi);
  for (std::size_t i = 0; i < nx; ++i) out.m[s.rows[i]] = best_m[i];
  for (std::size_t j = 0; j < ny; ++j) out.n[s.cols[j]] = best_n[j];
  return out;
}

struct Epsilon2Result {
  double value = 1.0;
  // (x1, x2, y1, y2); empty when no length-four path exists
  std::vector<std::size_t> witness;
};

inline Epsilon2Result epsilon2(const JointPmf& p) {
  const auto s = detail::positive_support(p);
  Epsilon2Result out;
  for (std::size_t x1 : s.rows)
    for (std::size_t x2 : s.rows) {
      if (x1 == x2) continue;
      for (std::size_t y1 : s.cols)
        for (std::size_t y2 : s.cols) {
          if (y1 == y2) continue;
          const double v = path_value(p, Path{{x1, x2}, {y1, y2}});
          if (out.witness.empty() || v < out.value) {
            out.value = std::min(v, 1.0);
            out.witness = {x1, x2, y1, y2};
          }
        }
    }
  return out;
}

// ---------------------------------------------------------------------------
// epsilon3

/// A feasible point of the epsilon3 max-min problem: layers delta_t with
/// sum_t delta_t = 1 cellwise and each p * delta_t of rank one.
struct Epsilon3Certificate {
  double value = 0.0;
  std::vector<Matrix> layers;  // |X| x |Y| each
};

/// Recomputes sum_t min_{p>0} delta_t after checking feasibility; nullopt if
/// the layers are not a valid certificate.
inline std::optional<double> verify_epsilon3_certificate(const JointPmf& p, const std::vector<Matrix>& layers,
                                                         double tolerance = 1e-8) {
  if (layers.empty()) return std::nullopt;
  const auto nx = static_cast<Eigen::Index>(p.x_size()), ny = static_cast<Eigen::Index>(p.y_size());
  Matrix total = Matrix::Zero(nx, ny);
  double value = 0.0;
  for (const auto& d : layers) {
    if (d.rows() != nx || d.cols() != ny) return std::nullopt;
    if ((d.array() < -tolerance).any()) return std::nullopt;
    total += d;
    const Matrix weighted = p.probs().cwiseProduct(d);
    if (weighted.norm() > 0.0) {
      Eigen::JacobiSVD<Matrix> svd(weighted);
      const auto& sv = svd.singularValues();
      if (sv.size() > 1 && sv(1) > tolerance * std::max(sv(0), 1.0)) return std::nullopt;
    }
    double layer_min = kInf;
    for (Eigen::Index x = 0; x < nx; ++x)
      for (Eigen::Index y = 0; y < ny; ++y)
        if (p.probs()(x, y) > 0.0) layer_min = std::min(layer_min, d(x, y));
    value += std::max(layer_min, 0.0);
  }
  for (Eigen::Index x = 0; x < nx; ++x)
    for (Eigen::Index y = 0; y < ny; ++y)
      if (std::abs(total(x, y) - 1.0) > tolerance) return std::nullopt;
  return value;
}

namespace detail {

// Appends one indicator layer per support cell carrying what is left of the
// unit budget there; these layers have a zero minimum unless p is a point mass.
inline void close_with_indicators(const JointPmf& p, const Matrix& used, std::vector<Matrix>& layers) {
  const auto nx = static_cast<Eigen::Index>(p.x_size()), ny = static_cast<Eigen::Index>(p.y_size());
  for (Eigen::Index x = 0; x < nx; ++x)
    for (Eigen::Index y = 0; y < ny; ++y) {
      const double rest = 1.0 - used(x, y);
      if (std::abs(rest) == 0.0) continue;
      Matrix d = Matrix::Zero(nx, ny);
      d(x, y) = rest;
      layers.push_back(std::move(d));
    }
}

}  // namespace detail

/// Lower bound on epsilon3. The first layer is the rank-one matrix that
/// certifies epsilon1; the remaining mass goes into single-cell layers. A
/// small greedy search then tries to split the budget across several
/// rank-one layers. Every candidate is checked with
/// verify_epsilon3_certificate before it is accepted.
inline Epsilon3Certificate epsilon3_lower_bound(const JointPmf& p) {
  const auto nx = static_cast<Eigen::Index>(p.x_size()), ny = static_cast<Eigen::Index>(p.y_size());
  Epsilon3Certificate best;
  {
    std::vector<Matrix> layers;
    detail::close_with_indicators(p, Matrix::Zero(nx, ny), layers);
    best.layers = layers;
    best.value = verify_epsilon3_certificate(p, layers).value_or(0.0);
  }
  const auto s = detail::positive_support(p);
  if ((s.probs.array() <= 0.0).any()) return best;

  const Matrix log_p = s.probs.array().log();
  auto embed = [&](const Matrix& local) {
    Matrix full = Matrix::Zero(nx, ny);
    for (std::size_t i = 0; i < s.rows.size(); ++i)
      for (std::size_t j = 0; j < s.cols.size(); ++j)
        full(static_cast<Eigen::Index>(s.rows[i]), static_cast<Eigen::Index>(s.cols[j])) =
            local(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return full;
  };

  auto consider = [&](const std::vector<Matrix>& local_layers) {
    std::vector<Matrix> layers;
    Matrix used = Matrix::Zero(nx, ny);
    for (const auto& l : local_layers) {
      layers.push_back(embed(l));
      used += layers.back();
    }
    detail::close_with_indicators(p, used, layers);
    if (auto v = verify_epsilon3_certificate(p, layers); v && *v > best.value) {
      best.value = *v;
      best.layers = std::move(layers);
    }
  };

  // Layer from the epsilon1 potentials: delta = exp(m + n - log p) in [eps1, 1].
  const auto lp = epsilon1_lp(p);
  {
    Matrix d(log_p.rows(), log_p.cols());
    for (std::size_t i = 0; i < s.rows.size(); ++i)
      for (std::size_t j = 0; j < s.cols.size(); ++j)
        d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::min(
            1.0, std::exp(lp.m[s.rows[i]] + lp.n[s.cols[j]] - log_p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
    consider({d});
  }

  // Greedy splits: layer t takes a fraction of the best rank-one fit under the
  // remaining mass.
  const std::vector<double> scales{1.0, 0.75, 0.5, 0.25};
  auto search = [&](auto&& self, const Matrix& remaining, std::vector<Matrix>& chosen, int depth) -> void {
    if (depth == 0) return;
    if ((remaining.array() <= 0.0).any()) return;
    const Matrix log_cap = remaining.array().log();
    const auto fit = detail::best_rank_one_under(log_p, log_cap, 1e-10);
    if (fit.log_t == -kInf || fit.m.empty()) return;
    Matrix uv(log_p.rows(), log_p.cols());
    for (Eigen::Index i = 0; i < uv.rows(); ++i)
      for (Eigen::Index j = 0; j < uv.cols(); ++j)
        uv(i, j) = std::min(std::exp(fit.m[static_cast<std::size_t>(i)] + fit.n[static_cast<std::size_t>(j)]), remaining(i, j));
    for (double scale : scales) {
      const Matrix layer_mass = scale * uv;
      chosen.push_back(layer_mass.cwiseQuotient(s.probs));
      consider(chosen);
      self(self, remaining - layer_mass, chosen, depth - 1);
      chosen.pop_back();
    }
  };
  std::vector<Matrix> chosen;
  search(search, s.probs, chosen, 3);
  return best;
}

// ---------------------------------------------------------------------------
// One-way and L-bar thresholds

inline double oneway_zero_threshold(const Channel& channel) { return std::clamp(1.0 - eta(channel).eta, 0.0, 1.0); }

struct LbarThreshold {
  double value = 1.0;           // 1 - max rho_m^2 found
  double max_rho_squared = 0.0;
  std::vector<double> a, b;     // maximizing weights, q ∝ a(x) b(y) p(x,y)
  bool heuristic = true;        // the maximization is a local search
};

/// 1 - max over q ⪯ p of rho_m(q)^2, with q ∝ a(x) b(y) p(x,y). Multi-start
/// Nelder-Mead over log a, log b on the full alphabets and on every 2x2
/// restriction, topped up with random starts to at least `min_starts`.
inline LbarThreshold lbar_zero_threshold(const JointPmf& p, int min_starts = 64, std::uint64_t seed = 0x1bad) {
  const std::size_t nx = p.x_size(), ny = p.y_size();
  LbarThreshold best;
  best.a.assign(nx, 1.0);
  best.b.assign(ny, 1.0);

  auto rho_sq = [&](const std::vector<double>& a, const std::vector<double>& b) {
    Matrix w(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(ny));
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y) w(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = a[x] * b[y] * p(x, y);
    const double r = maximal_correlation(w);
    return r * r;
  };
  auto consider = [&](const std::vector<double>& a, const std::vector<double>& b) {
    const double v = rho_sq(a, b);
    if (v > best.max_rho_squared) {
      best.max_rho_squared = v;
      best.a = a;
      best.b = b;
    }
  };

  auto search = [&](const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols,
                    const std::vector<double>& start) {
    auto unpack = [&](const std::vector<double>& theta, std::vector<double>& a, std::vector<double>& b) {
      a.assign(nx, 0.0);
      b.assign(ny, 0.0);
      for (std::size_t i = 0; i < rows.size(); ++i) a[rows[i]] = std::exp(std::clamp(theta[i], -60.0, 60.0));
      for (std::size_t j = 0; j < cols.size(); ++j)
        b[cols[j]] = std::exp(std::clamp(theta[rows.size() + j], -60.0, 60.0));
    };
    std::vector<double> a, b;
    auto objective = [&](const std::vector<double>& theta) {
      unpack(theta, a, b);
      return -rho_sq(a, b);
    };
    NelderMeadOptions opt;
    opt.f_tolerance = 1e-14;
    opt.max_iterations = 4000;
    const auto result = nelder_mead(objective, start, opt);
    unpack(start, a, b);
    consider(a, b);
    unpack(result.x, a, b);
    consider(a, b);
  };

  std::vector<std::size_t> all_rows(nx), all_cols(ny);
  for (std::size_t i = 0; i < nx; ++i) all_rows[i] = i;
  for (std::size_t j = 0; j < ny; ++j) all_cols[j] = j;

  int starts = 0;
  search(all_rows, all_cols, std::vector<double>(nx + ny, 0.0));
  ++starts;
  for (std::size_t x1 = 0; x1 < nx; ++x1)
    for (std::size_t x2 = x1 + 1; x2 < nx; ++x2)
      for (std::size_t y1 = 0; y1 < ny; ++y1)
        for (std::size_t y2 = y1 + 1; y2 < ny; ++y2) {
          search({x1, x2}, {y1, y2}, std::vector<double>(4, 0.0));
          ++starts;
        }
  for (std::uint64_t k = 0; starts < min_starts; ++k, ++starts) {
    auto rng = start_engine(seed, k);
    std::vector<double> theta(nx + ny);
    for (double& t : theta) t = 4.0 * (unit_uniform(rng) - 0.5);
    search(all_rows, all_cols, theta);
  }
  best.value = std::clamp(1.0 - best.max_rho_squared, 0.0, 1.0);
  return best;
}

// ---------------------------------------------------------------------------
// Report

enum class Verdict { CapacityZero, CapacityPositive, Indeterminate };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::CapacityZero: return "zero";
    case Verdict::CapacityPositive: return "positive";
    case Verdict::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

struct ThresholdReport {
  double epsilon = 0.0;
  double epsilon1 = 1.0;
  double epsilon2 = 1.0;
  double epsilon3_lb = 0.0;
  double oneway_threshold = 1.0;
  double lbar_threshold = 1.0;
  bool lbar_heuristic = true;
  Verdict verdict = Verdict::Indeterminate;
  std::optional<Path> witness_path;      // absent when epsilon1 came from the LP
  std::vector<std::size_t> witness_pair; // (x1, x2, y1, y2)
  bool binary_alphabet = false;          // forces epsilon1 == epsilon2
};

inline ThresholdReport threshold_report(const Source& source) {
  if (!source.is_erasure()) throw Error(ErrorCode::NotErasureSource, "thresholds are defined for erasure sources");
  const JointPmf& p = source.joint();
  ThresholdReport r;
  r.epsilon = source.epsilon();

  const auto e2 = epsilon2(p);
  r.epsilon2 = e2.value;
  r.witness_pair = e2.witness;

  const auto s = detail::positive_support(p);
  const std::size_t nx = s.rows.size(), ny = s.cols.size();
  if (std::min(nx, ny) <= kMaxPathAlphabet && path_enumeration_size(nx, ny) <= kMaxPathCount) {
    const auto e1 = epsilon1_paths(p);
    r.epsilon1 = e1.value;
    r.witness_path = e1.witness;
  } else {
    r.epsilon1 = epsilon1_lp(p).value;
  }
  r.binary_alphabet = std::min(nx, ny) <= 2;
  // Paths of length <= 4 are a subset of all paths; the binary case has no others.
  if (r.binary_alphabet)
    r.epsilon1 = r.epsilon2;
  else
    r.epsilon1 = std::min(r.epsilon1, r.epsilon2);

  r.epsilon3_lb = epsilon3_lower_bound(p).value;
  r.oneway_threshold = oneway_zero_threshold(conditional_y_given_x(p));
  const auto lbar = lbar_zero_threshold(p);
  r.lbar_threshold = lbar.value;
  r.lbar_heuristic = lbar.heuristic;

  if (r.epsilon <= r.epsilon1)
    r.verdict = Verdict::CapacityZero;
  else if (r.epsilon > r.epsilon2)
    r.verdict = Verdict::CapacityPositive;
  else
    r.verdict = Verdict::Indeterminate;
  return r;
}

}  // namespace skagree
