#pragma once

// Maximal correlation, the strong data processing envelope eta, the J_alpha
// family, Doeblin's coefficient and the erasure degradation construction.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/SVD>

#include "skagree/info.hpp"
#include "skagree/optimize.hpp"
#include "skagree/pmf.hpp"

namespace skagree {

/// Second singular value of p(x,y)/sqrt(p(x)p(y)) over the support. Accepts
/// unnormalized weights.
inline double maximal_correlation(const Matrix& weights) {
  const double total = weights.sum();
  if (!(total > 0.0)) return 0.0;
  const Eigen::VectorXd px = weights.rowwise().sum() / total;
  const Eigen::RowVectorXd py = weights.colwise().sum() / total;
  std::vector<Eigen::Index> rows, cols;
  for (Eigen::Index x = 0; x < weights.rows(); ++x)
    if (px(x) > 0.0) rows.push_back(x);
  for (Eigen::Index y = 0; y < weights.cols(); ++y)
    if (py(y) > 0.0) cols.push_back(y);
  if (rows.size() < 2 || cols.size() < 2) return 0.0;

  Matrix q(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          weights(rows[i], cols[j]) / total / std::sqrt(px(rows[i]) * py(cols[j]));
  Eigen::JacobiSVD<Matrix> svd(q);
  const auto& s = svd.singularValues();
  return std::clamp(s(1), 0.0, 1.0);
}

inline double maximal_correlation(const JointPmf& p) { return maximal_correlation(p.probs()); }

struct CorrelationReport {
  double rho_m = 0.0;
  double eta = 0.0;
  std::vector<double> input_pmf_at_max;
};

namespace detail {

inline double rho_squared_for_input(const std::vector<double>& input, const Channel& channel) {
  Matrix w(static_cast<Eigen::Index>(channel.input_size()), static_cast<Eigen::Index>(channel.output_size()));
  for (std::size_t x = 0; x < channel.input_size(); ++x)
    for (std::size_t y = 0; y < channel.output_size(); ++y)
      w(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = input[x] * channel(x, y);
  const double r = maximal_correlation(w);
  return r * r;
}

// Embeds a pmf over `support` into the full alphabet.
inline std::vector<double> embed(const std::vector<double>& local, const std::vector<std::size_t>& support,
                                 std::size_t n) {
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < support.size(); ++i) out[support[i]] = local[i];
  return out;
}

}  // namespace detail

/// eta(p_{Y|X}) = max over input pmfs of rho_m^2. The search runs Nelder-Mead
/// in softmax coordinates from the uniform input, from every two-point
/// support, and from random interior points until at least `min_starts`
/// searches have run; the result is a lower bound on the true maximum.
inline CorrelationReport eta(const Channel& channel, int min_starts = 32, std::uint64_t seed = 0x5eed) {
  const std::size_t n = channel.input_size();
  CorrelationReport best;
  best.input_pmf_at_max.assign(n, 1.0 / static_cast<double>(n));
  if (n < 2) return best;

  auto consider = [&](const std::vector<double>& input) {
    const double v = detail::rho_squared_for_input(input, channel);
    if (v > best.eta) {
      best.eta = v;
      best.input_pmf_at_max = input;
    }
  };

  auto search = [&](const std::vector<std::size_t>& support, const std::vector<double>& start) {
    auto objective = [&](const std::vector<double>& theta) {
      return -detail::rho_squared_for_input(detail::embed(softmax(theta), support, n), channel);
    };
    NelderMeadOptions opt;
    opt.f_tolerance = 1e-14;
    const auto result = nelder_mead(objective, log_coordinates(start), opt);
    consider(detail::embed(softmax(result.x), support, n));
    consider(detail::embed(start, support, n));
  };

  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  int starts = 0;
  search(all, std::vector<double>(n, 1.0 / static_cast<double>(n)));
  ++starts;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++starts) search({i, j}, {0.5, 0.5});
  for (std::uint64_t k = 0; starts < min_starts; ++k, ++starts) {
    auto rng = start_engine(seed, k);
    search(all, random_simplex_point(rng, n));
  }
  best.rho_m = std::sqrt(best.eta);
  return best;
}

// ---------------------------------------------------------------------------
// J_alpha

/// J_alpha(X;Y) = D_alpha(p(x1,y1)p(x2,y2) || p(x1,y2)p(x2,y1)).
inline double j_alpha(const JointPmf& p, double alpha) {
  if (std::isnan(alpha) || !(alpha > 0.0)) throw Error(ErrorCode::InvalidAlpha, "J_alpha needs alpha in (0, inf]");
  const std::size_t nx = p.x_size(), ny = p.y_size();
  std::vector<double> q, r;
  q.reserve(nx * nx * ny * ny);
  r.reserve(nx * nx * ny * ny);
  for (std::size_t x1 = 0; x1 < nx; ++x1)
    for (std::size_t y1 = 0; y1 < ny; ++y1)
      for (std::size_t x2 = 0; x2 < nx; ++x2)
        for (std::size_t y2 = 0; y2 < ny; ++y2) {
          q.push_back(p(x1, y1) * p(x2, y2));
          r.push_back(p(x1, y2) * p(x2, y1));
        }
  return renyi_divergence(q, r, alpha);
}

/// log of the largest cross ratio p(x1,y1)p(x2,y2) / (p(x1,y2)p(x2,y1)) over
/// symbols with positive marginals.
inline double j_infinity(const JointPmf& p) {
  const auto px = p.x_marginal();
  const auto py = p.y_marginal();
  double best = 0.0;
  for (std::size_t x1 = 0; x1 < p.x_size(); ++x1)
    for (std::size_t x2 = 0; x2 < p.x_size(); ++x2) {
      if (x1 == x2 || px[x1] <= 0.0 || px[x2] <= 0.0) continue;
      for (std::size_t y1 = 0; y1 < p.y_size(); ++y1)
        for (std::size_t y2 = 0; y2 < p.y_size(); ++y2) {
          if (y1 == y2 || py[y1] <= 0.0 || py[y2] <= 0.0) continue;
          const double num = p(x1, y1) * p(x2, y2);
          const double den = p(x1, y2) * p(x2, y1);
          if (num <= 0.0) continue;
          if (den <= 0.0) return kInf;
          best = std::max(best, std::log(p(x1, y1)) + std::log(p(x2, y2)) - std::log(p(x1, y2)) - std::log(p(x2, y1)));
        }
    }
  return best;
}

/// n J_inf(p_{Y|X}, X): the exponent in the lower bound on the product of the
/// two "uncertainties" of any decoder using the channel n times.
inline double uncertainty_product_bound(const Channel& channel, unsigned n) {
  if (n == 0) throw Error(ErrorCode::OutOfRange, "block length must be positive");
  const std::vector<double> uniform(channel.input_size(), 1.0 / static_cast<double>(channel.input_size()));
  const double j = j_infinity(joint_from_channel(uniform, channel));
  return j == 0.0 ? 0.0 : static_cast<double>(n) * j;
}

/// Smallest log of the uncertainty product over message pairs m1 != m2 for an
/// empirical p_{M̂|M}; the bound says this is >= -exponent.
inline double min_log_uncertainty_product(const Channel& decoder) {
  if (decoder.input_size() != decoder.output_size())
    throw Error(ErrorCode::DimensionMismatch, "decoder statistics must be square");
  const std::size_t m = decoder.input_size();
  auto lg = [](double v) { return v > 0.0 ? std::log(v) : -kInf; };
  double worst = kInf;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      if (a == b) continue;
      const double num = lg(decoder(a, b)) + lg(decoder(b, a));
      const double den = lg(decoder(a, a)) + lg(decoder(b, b));
      double v;
      if (num == -kInf && den == -kInf)
        v = 0.0;
      else if (den == -kInf)
        v = kInf;
      else
        v = num - den;
      worst = std::min(worst, v);
    }
  return worst;
}

inline bool uncertainty_product_holds(const Channel& decoder, const Channel& channel, unsigned n,
                                      double slack = 1e-12) {
  const double exponent = uncertainty_product_bound(channel, n);
  return min_log_uncertainty_product(decoder) >= -exponent - slack;
}

// ---------------------------------------------------------------------------
// Doeblin coefficient and erasure degradation

inline double doeblin_coefficient(const Channel& channel) {
  double total = 0.0;
  for (std::size_t r = 0; r < channel.output_size(); ++r) {
    double m = kInf;
    for (std::size_t a = 0; a < channel.input_size(); ++a) m = std::min(m, channel(a, r));
    total += m;
  }
  return total;
}

struct DegradationChannel {
  Channel channel;              // p_{R|B}; rows are the inputs of q followed by "e"
  std::vector<double> lambda;   // per output r
};

/// Builds p_{R|B} with B the output of an erasure channel on A, such that
/// sum_b p(a,b) p(r|b) = p_A(a) q(r|a). Returns nullopt when Doeblin's
/// coefficient of q is below epsilon, in which case no such channel exists.
inline std::optional<DegradationChannel> erasure_degradation_channel(const Channel& q, double epsilon,
                                                                     std::vector<double> reference = {}) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw Error(ErrorCode::EpsilonOutOfRange, "epsilon not in [0,1]");
  const std::size_t na = q.input_size(), nr = q.output_size();
  if (reference.empty()) reference.assign(na, 1.0 / static_cast<double>(na));
  if (reference.size() != na) throw Error(ErrorCode::DimensionMismatch, "reference pmf size");
  for (double v : reference)
    if (!(v > 0.0)) throw Error(ErrorCode::InvalidPmf, "reference pmf must be strictly positive");

  if (doeblin_coefficient(q) < epsilon) return std::nullopt;

  std::vector<double> q_r(nr, 0.0), column_min(nr, kInf);
  for (std::size_t r = 0; r < nr; ++r)
    for (std::size_t a = 0; a < na; ++a) {
      q_r[r] += reference[a] * q(a, r);
      column_min[r] = std::min(column_min[r], q(a, r));
    }

  // Greedy fill of c(r) = q_R(r) lambda(r) <= min_a q(r|a) until it sums to epsilon.
  std::vector<double> c(nr, 0.0), lambda(nr, 0.0);
  double remaining = epsilon;
  for (std::size_t r = 0; r < nr && remaining > 0.0; ++r) {
    c[r] = std::min(column_min[r], remaining);
    remaining -= c[r];
    if (q_r[r] > 0.0) lambda[r] = c[r] / q_r[r];
  }

  Matrix m(static_cast<Eigen::Index>(na + 1), static_cast<Eigen::Index>(nr));
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t r = 0; r < nr; ++r)
      m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(r)) =
          epsilon < 1.0 ? std::max(q(a, r) - c[r], 0.0) / (1.0 - epsilon) : q(a, r);
  const auto e_row = static_cast<Eigen::Index>(na);
  for (std::size_t r = 0; r < nr; ++r)
    m(e_row, static_cast<Eigen::Index>(r)) = epsilon > 0.0 ? c[r] / epsilon : 1.0 / static_cast<double>(nr);

  Labels inputs = q.input_alphabet();
  inputs.push_back("e");
  return DegradationChannel{validate_channel(m, inputs, q.output_alphabet()), lambda};
}

/// sum_b p(a,b) p(r|b) for the erasure channel with parameter epsilon feeding
/// `degradation`, as a |A| x |R| matrix.
inline Matrix degraded_marginal(const Channel& degradation, const std::vector<double>& reference, double epsilon) {
  const std::size_t na = reference.size(), nr = degradation.output_size();
  Matrix out(static_cast<Eigen::Index>(na), static_cast<Eigen::Index>(nr));
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t r = 0; r < nr; ++r)
      out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(r)) =
          reference[a] * (epsilon * degradation(na, r) + (1.0 - epsilon) * degradation(a, r));
  return out;
}

}  // namespace skagree
