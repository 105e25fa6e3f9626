#pragma once

// Single-letter and block feasibility tests for positive key capacity, and the
// swap construction evaluated in closed form, by enumeration, and by Monte
// Carlo simulation.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "skagree/error.hpp"
#include "skagree/info.hpp"
#include "skagree/optimize.hpp"
#include "skagree/pmf.hpp"

namespace skagree {

/// (3 - sqrt 5)/8, the advantage-gap constant of the block feasibility
/// criterion. Exposed for reference only.
inline const double kDeltaConstant = (3.0 - std::sqrt(5.0)) / 8.0;

inline constexpr double kMaxEnumeration = 1e7;

struct FeasibilityVerdict {
  bool positive = false;
  std::optional<std::array<std::size_t, 4>> witness;  // (x1, x2, y1, y2)
  double lhs_chernoff = kInf;                         // nats
  double rhs_half_log_ratio = 0.0;                    // nats
};

/// ½ log(p11 p22 / (p12 p21)) with 0/0 := 1 and the obvious infinities.
inline double half_log_cross_ratio(double p11, double p22, double p12, double p21) {
  const bool num_zero = p11 <= 0.0 || p22 <= 0.0;
  const bool den_zero = p12 <= 0.0 || p21 <= 0.0;
  if (num_zero && den_zero) return 0.0;
  if (num_zero) return -kInf;
  if (den_zero) return kInf;
  return 0.5 * (std::log(p11) + std::log(p22) - std::log(p12) - std::log(p21));
}

namespace detail {

// Larger is closer to (or past) a strict witness.
inline double verdict_margin(double lhs, double rhs) {
  const double m = rhs - lhs;
  return std::isnan(m) ? -kInf : m;
}

}  // namespace detail

/// Searches ordered (x1,x2,y1,y2) with x1 != x2, y1 != y2 for
/// C(p_Z|x1y1 || p_Z|x2y2) < ½ log(p11 p22 / (p12 p21)). Returns the first
/// strict witness; without one, reports the sides of the closest pair.
inline FeasibilityVerdict corollary1_test(const Source& source) {
  const JointPmf& p = source.joint();
  const Channel ch = source.eve_channel();
  FeasibilityVerdict best;
  double best_margin = -kInf;
  bool any = false;
  for (std::size_t x1 = 0; x1 < p.x_size(); ++x1)
    for (std::size_t x2 = 0; x2 < p.x_size(); ++x2) {
      if (x1 == x2) continue;
      for (std::size_t y1 = 0; y1 < p.y_size(); ++y1)
        for (std::size_t y2 = 0; y2 < p.y_size(); ++y2) {
          if (y1 == y2) continue;
          const double rhs = half_log_cross_ratio(p(x1, y1), p(x2, y2), p(x1, y2), p(x2, y1));
          const auto r1 = ch.row(source.pair_index(x1, y1));
          const auto r2 = ch.row(source.pair_index(x2, y2));
          const double lhs = chernoff_information(r1, r2);
          const double margin = detail::verdict_margin(lhs, rhs);
          if (lhs < rhs) return {true, std::array<std::size_t, 4>{x1, x2, y1, y2}, lhs, rhs};
          if (!any || margin > best_margin) {
            any = true;
            best_margin = margin;
            best.lhs_chernoff = lhs;
            best.rhs_half_log_ratio = rhs;
          }
        }
    }
  return best;
}

using SymbolString = std::vector<std::size_t>;
using StringSet = std::vector<SymbolString>;

namespace detail {

inline void check_string_sets(const StringSet& s1, const StringSet& s2, std::size_t n, std::size_t alphabet,
                              const char* what) {
  if (s1.empty() || s2.empty()) throw Error(ErrorCode::EmptySet, std::string(what) + " set is empty");
  for (const auto* set : {&s1, &s2})
    for (const auto& s : *set) {
      if (s.size() != n) throw Error(ErrorCode::InvalidInstance, std::string(what) + " string has the wrong length");
      for (std::size_t v : s)
        if (v >= alphabet) throw Error(ErrorCode::InvalidInstance, std::string(what) + " string has an unknown symbol");
    }
  for (const auto& a : s1)
    if (std::find(s2.begin(), s2.end(), a) != s2.end())
      throw Error(ErrorCode::SetsNotDisjoint, std::string(what) + " sets intersect");
}

inline double block_probability(const JointPmf& p, const SymbolString& a, const SymbolString& b) {
  double prob = 1.0;
  for (std::size_t k = 0; k < a.size(); ++k) prob *= p(a[k], b[k]);
  return prob;
}

inline double set_probability(const JointPmf& p, const StringSet& as, const StringSet& bs) {
  double total = 0.0;
  for (const auto& a : as)
    for (const auto& b : bs) total += block_probability(p, a, b);
  return total;
}

// Conditional law of Z^n given X^n in as, Y^n in bs, over the whole of Z^n in
// lexicographic order.
inline std::vector<double> general_block_law(const Source& source, const Channel& ch, const StringSet& as,
                                             const StringSet& bs, std::size_t n, double mass) {
  const JointPmf& p = source.joint();
  const std::size_t zs = ch.output_size();
  std::size_t total = 1;
  for (std::size_t k = 0; k < n; ++k) total *= zs;
  std::vector<double> law(total, 0.0);
  std::vector<std::size_t> z(n, 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    double v = 0.0;
    for (const auto& a : as)
      for (const auto& b : bs) {
        double w = block_probability(p, a, b) / mass;
        for (std::size_t k = 0; k < n && w > 0.0; ++k) w *= ch(source.pair_index(a[k], b[k]), z[k]);
        v += w;
      }
    law[idx] = v;
    for (std::size_t k = n; k-- > 0;) {
      if (++z[k] < zs) break;
      z[k] = 0;
    }
  }
  return law;
}

using RevealKey = std::vector<std::size_t>;

// For each erasure pattern, the conditional mass of every revealed content.
inline std::vector<std::map<RevealKey, double>> erasure_block_law(const Source& source, const StringSet& as,
                                                                   const StringSet& bs, std::size_t n, double mass) {
  const JointPmf& p = source.joint();
  const std::size_t patterns = std::size_t{1} << n;
  std::vector<std::map<RevealKey, double>> law(patterns);
  for (std::size_t mask = 0; mask < patterns; ++mask)
    for (const auto& a : as)
      for (const auto& b : bs) {
        const double w = block_probability(p, a, b) / mass;
        if (w <= 0.0) continue;
        RevealKey key;
        for (std::size_t k = 0; k < n; ++k)
          if (mask >> k & 1U) key.push_back(source.pair_index(a[k], b[k]));
        law[mask][key] += w;
      }
  return law;
}

}  // namespace detail

/// Block version of the single-letter test: compares the Chernoff information
/// of p(z^n | X^n in A1, Y^n in B1) and p(z^n | X^n in A2, Y^n in B2) with
/// ½ log(P11 P22 / (P12 P21)), Pij = P(X^n in Ai, Y^n in Bj).
inline FeasibilityVerdict set_test(const Source& source, const StringSet& a1, const StringSet& a2, const StringSet& b1,
                                   const StringSet& b2, std::size_t n) {
  const JointPmf& p = source.joint();
  if (n == 0) throw Error(ErrorCode::InvalidInstance, "block length must be positive");
  detail::check_string_sets(a1, a2, n, p.x_size(), "x");
  detail::check_string_sets(b1, b2, n, p.y_size(), "y");

  const double p11 = detail::set_probability(p, a1, b1);
  const double p22 = detail::set_probability(p, a2, b2);
  const double p12 = detail::set_probability(p, a1, b2);
  const double p21 = detail::set_probability(p, a2, b1);

  FeasibilityVerdict out;
  out.rhs_half_log_ratio = half_log_cross_ratio(p11, p22, p12, p21);

  const double strings = static_cast<double>(a1.size() * b1.size() + a2.size() * b2.size());
  if (source.is_erasure()) {
    if (n >= 63 || std::ldexp(strings, static_cast<int>(n)) > kMaxEnumeration)
      throw Error(ErrorCode::EnumerationTooLarge, "erasure patterns times strings exceed 1e7");
  } else {
    if (std::pow(static_cast<double>(source.z_size()), static_cast<double>(n)) * strings > kMaxEnumeration)
      throw Error(ErrorCode::EnumerationTooLarge, "|Z|^n times strings exceeds 1e7");
  }
  if (p11 <= 0.0 || p22 <= 0.0) {
    out.lhs_chernoff = kInf;
    return out;
  }

  std::vector<double> q1, q2;
  if (source.is_erasure()) {
    const double eps = source.epsilon();
    const auto l1 = detail::erasure_block_law(source, a1, b1, n, p11);
    const auto l2 = detail::erasure_block_law(source, a2, b2, n, p22);
    for (std::size_t mask = 0; mask < l1.size(); ++mask) {
      const int revealed = std::popcount(mask);
      const double weight = std::pow(eps, static_cast<double>(static_cast<int>(n) - revealed)) *
                            std::pow(1.0 - eps, static_cast<double>(revealed));
      std::map<detail::RevealKey, std::array<double, 2>> merged;
      for (const auto& [key, v] : l1[mask]) merged[key][0] += v;
      for (const auto& [key, v] : l2[mask]) merged[key][1] += v;
      for (const auto& [key, v] : merged) {
        q1.push_back(weight * v[0]);
        q2.push_back(weight * v[1]);
      }
    }
  } else {
    const Channel ch = source.eve_channel();
    q1 = detail::general_block_law(source, ch, a1, b1, n, p11);
    q2 = detail::general_block_law(source, ch, a2, b2, n, p22);
  }
  out.lhs_chernoff = chernoff_information(q1, q2);
  out.positive = out.lhs_chernoff < out.rhs_half_log_ratio;
  return out;
}

// ---------------------------------------------------------------------------
// Swap construction

/// Block length n (even) with strings x1 = (x1^{n/2} x2^{n/2}),
/// x2 = (x2^{n/2} x1^{n/2}) and likewise for y.
struct SwapInstance {
  Source source;
  std::size_t x1 = 0, y1 = 0, x2 = 1, y2 = 1;
  std::size_t n = 2;
  double p11 = 0.0, p12 = 0.0, p21 = 0.0, p22 = 0.0;  // pij = p(x_i, y_j)
  double half_log_ratio = 0.0;                       // ½ log(p11 p22 / (p12 p21))
};

inline SwapInstance make_swap_instance(const Source& source, std::size_t x1, std::size_t y1, std::size_t x2,
                                       std::size_t y2, std::size_t n) {
  const JointPmf& p = source.joint();
  if (x1 >= p.x_size() || x2 >= p.x_size() || y1 >= p.y_size() || y2 >= p.y_size())
    throw Error(ErrorCode::InvalidInstance, "symbol index out of range");
  if (x1 == x2 || y1 == y2) throw Error(ErrorCode::PairsCollide, "swap symbols must differ in each coordinate");
  if (n == 0 || n % 2 != 0) throw Error(ErrorCode::InvalidInstance, "block length must be positive and even");
  SwapInstance inst{source, x1, y1, x2, y2, n, p(x1, y1), p(x1, y2), p(x2, y1), p(x2, y2), 0.0};
  inst.half_log_ratio = half_log_cross_ratio(inst.p11, inst.p22, inst.p12, inst.p21);
  return inst;
}

struct SwapStrings {
  SymbolString x1, x2, y1, y2;
};

inline SwapStrings swap_strings(const SwapInstance& inst) {
  const std::size_t h = inst.n / 2;
  SwapStrings s;
  auto fill = [h](std::size_t first, std::size_t second) {
    SymbolString out(2 * h, first);
    std::fill(out.begin() + static_cast<std::ptrdiff_t>(h), out.end(), second);
    return out;
  };
  s.x1 = fill(inst.x1, inst.x2);
  s.x2 = fill(inst.x2, inst.x1);
  s.y1 = fill(inst.y1, inst.y2);
  s.y2 = fill(inst.y2, inst.y1);
  return s;
}

namespace detail {

// log(p11^{n/2} p22^{n/2}) and log(p12^{n/2} p21^{n/2}).
inline std::array<double, 2> swap_log_masses(const SwapInstance& inst) {
  const double h = static_cast<double>(inst.n) / 2.0;
  auto lg = [](double v) { return v > 0.0 ? std::log(v) : -kInf; };
  return {h * (lg(inst.p11) + lg(inst.p22)), h * (lg(inst.p12) + lg(inst.p21))};
}

}  // namespace detail

/// P(diagonal | accepted) = p11^{n/2}p22^{n/2} / (p11^{n/2}p22^{n/2} + p12^{n/2}p21^{n/2}).
inline double tilde_p(const SwapInstance& inst) {
  const auto [la, lb] = detail::swap_log_masses(inst);
  if (la == -kInf && lb == -kInf) return 0.5;
  if (la == -kInf) return 0.0;
  if (lb == -kInf) return 1.0;
  return 1.0 / (1.0 + std::exp(lb - la));
}

/// P(X^n in {x1,x2}, Y^n in {y1,y2}) = 2(p11^{n/2}p22^{n/2} + p12^{n/2}p21^{n/2}).
inline double swap_acceptance_probability(const SwapInstance& inst) {
  const auto [la, lb] = detail::swap_log_masses(inst);
  return 2.0 * (std::exp(la) + std::exp(lb));
}

/// H(X^n,Y^n|Z^n,acc) - 2h(p̃) for an erasure eavesdropper, where
/// H(X^n,Y^n|Z^n,acc) = eps^n (ln 2 + h(p̃)).
inline double swap_advantage_lb(const SwapInstance& inst) {
  const double eps = inst.source.epsilon();
  const double t = tilde_p(inst);
  const double h = binary_entropy(t);
  return std::pow(eps, static_cast<double>(inst.n)) * (kLn2 + h) - 2.0 * h;
}

/// Smallest even n <= n_max with a positive swap advantage.
inline std::optional<std::size_t> first_positive_swap_length(const Source& source, std::size_t x1, std::size_t y1,
                                                             std::size_t x2, std::size_t y2, std::size_t n_max = 200) {
  for (std::size_t n = 2; n <= n_max; n += 2)
    if (swap_advantage_lb(make_swap_instance(source, x1, y1, x2, y2, n)) > 0.0) return n;
  return std::nullopt;
}

/// Eve's MAP error between the two equiprobable diagonal hypotheses, ties
/// counted as ½: ½ Σ_z min(p(z|x1,y1), p(z|x2,y2)).
inline double swap_eve_error_exact(const SwapInstance& inst) {
  if (inst.source.is_erasure()) return 0.5 * std::pow(inst.source.epsilon(), static_cast<double>(inst.n));
  const Channel ch = inst.source.eve_channel();
  const auto s = swap_strings(inst);
  const std::size_t zs = ch.output_size();
  if (std::pow(static_cast<double>(zs), static_cast<double>(inst.n)) > kMaxEnumeration)
    throw Error(ErrorCode::EnumerationTooLarge, "|Z|^n exceeds 1e7");
  // Both laws are products, so walk Z^n with running prefix products.
  std::vector<double> pre1(inst.n + 1, 1.0), pre2(inst.n + 1, 1.0);
  std::vector<std::size_t> z(inst.n, 0);
  double total = 0.0;
  std::size_t valid = 0;  // prefix length with up-to-date products
  while (true) {
    for (std::size_t k = valid; k < inst.n; ++k) {
      pre1[k + 1] = pre1[k] * ch(inst.source.pair_index(s.x1[k], s.y1[k]), z[k]);
      pre2[k + 1] = pre2[k] * ch(inst.source.pair_index(s.x2[k], s.y2[k]), z[k]);
    }
    total += std::min(pre1[inst.n], pre2[inst.n]);
    std::size_t k = inst.n;
    while (k > 0) {
      --k;
      if (++z[k] < zs) break;
      z[k] = 0;
      if (k == 0) return 0.5 * total;
    }
    valid = k;
  }
}

struct MonteCarloStats {
  std::uint64_t blocks = 0;
  std::uint64_t accepted = 0;
  std::uint64_t diagonal = 0;    // accepted with matching indices
  std::uint64_t eve_errors = 0;  // among diagonal blocks
  double acceptance_rate = 0.0;
  double empirical_tilde_p = 0.0;
  double empirical_eve_error = 0.0;
  double acceptance_probability = 0.0;  // closed forms
  double tilde_p = 0.0;
  double eve_error = 0.0;
};

inline constexpr std::uint64_t kMonteCarloChunk = 1U << 16;

/// Worker count: SKAGREE_THREADS if set and positive, else hardware threads.
inline unsigned default_worker_count() {
  unsigned hw = std::max(1U, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SKAGREE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) hw = std::min(hw, static_cast<unsigned>(v));
  }
  return hw;
}

namespace detail {

struct ChunkCounts {
  std::uint64_t accepted = 0, diagonal = 0, eve_errors = 0;
};

// One chunk of blocks from its own stream. Alice keeps a block only when X^n
// is x1 or x2, Bob when Y^n is y1 or y2; on diagonal blocks Eve decides
// between the two hypotheses by likelihood, ties going to (x1, y1).
inline ChunkCounts run_chunk(const SwapInstance& inst, const SwapStrings& s, const std::vector<double>& cumulative,
                             const Channel& ch, std::uint64_t count, std::uint64_t seed, std::uint64_t chunk) {
  auto rng = start_engine(seed, chunk);
  const JointPmf& p = inst.source.joint();
  const std::size_t ny = p.y_size();
  const std::size_t n = inst.n;
  const bool erasure = inst.source.is_erasure();
  const double eps = erasure ? inst.source.epsilon() : 0.0;
  std::vector<std::size_t> xs(n), ys(n);
  ChunkCounts out;
  for (std::uint64_t b = 0; b < count; ++b) {
    bool ax1 = true, ax2 = true, by1 = true, by2 = true;
    std::size_t k = 0;
    for (; k < n; ++k) {
      const double u = unit_uniform(rng);
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      if (it == cumulative.end()) --it;
      const auto cell = static_cast<std::size_t>(it - cumulative.begin());
      xs[k] = cell / ny;
      ys[k] = cell % ny;
      ax1 = ax1 && xs[k] == s.x1[k];
      ax2 = ax2 && xs[k] == s.x2[k];
      by1 = by1 && ys[k] == s.y1[k];
      by2 = by2 && ys[k] == s.y2[k];
      if ((!ax1 && !ax2) || (!by1 && !by2)) break;
    }
    if (k < n) continue;
    ++out.accepted;
    const bool d11 = ax1 && by1, d22 = ax2 && by2;
    if (!d11 && !d22) continue;
    ++out.diagonal;
    bool decide22 = false;
    if (erasure) {
      // Any revealed coordinate identifies the hypothesis.
      bool revealed = false;
      for (std::size_t j = 0; j < n; ++j)
        if (!(unit_uniform(rng) < eps)) revealed = true;
      decide22 = revealed && d22;
    } else {
      double l11 = 0.0, l22 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t row = inst.source.pair_index(xs[j], ys[j]);
        const double u = unit_uniform(rng);
        double acc = 0.0;
        std::size_t z = 0;
        for (; z + 1 < ch.output_size(); ++z) {
          acc += ch(row, z);
          if (u < acc) break;
        }
        const double q11 = ch(inst.source.pair_index(s.x1[j], s.y1[j]), z);
        const double q22 = ch(inst.source.pair_index(s.x2[j], s.y2[j]), z);
        l11 += q11 > 0.0 ? std::log(q11) : -kInf;
        l22 += q22 > 0.0 ? std::log(q22) : -kInf;
      }
      decide22 = l22 > l11;
    }
    if (decide22 != d22) ++out.eve_errors;
  }
  return out;
}

}  // namespace detail

/// Simulates `blocks` i.i.d. length-n blocks of the swap protocol. Blocks are
/// split into fixed chunks, each with a stream derived from (seed, chunk), so
/// the result does not depend on the number of workers.
inline MonteCarloStats monte_carlo_protocol(const SwapInstance& inst, std::uint64_t blocks, std::uint64_t seed,
                                            unsigned workers = 0) {
  if (blocks == 0) throw Error(ErrorCode::OutOfRange, "blocks must be at least 1");
  const JointPmf& p = inst.source.joint();
  std::vector<double> cumulative;
  double acc = 0.0;
  for (std::size_t x = 0; x < p.x_size(); ++x)
    for (std::size_t y = 0; y < p.y_size(); ++y) cumulative.push_back(acc += p(x, y));
  const Channel ch = inst.source.eve_channel();
  const SwapStrings s = swap_strings(inst);

  const std::uint64_t chunks = (blocks + kMonteCarloChunk - 1) / kMonteCarloChunk;
  std::vector<detail::ChunkCounts> results(chunks);
  if (workers == 0) workers = default_worker_count();
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, chunks));
  auto work = [&](unsigned w) {
    for (std::uint64_t c = w; c < chunks; c += workers) {
      const std::uint64_t count = std::min(kMonteCarloChunk, blocks - c * kMonteCarloChunk);
      results[c] = detail::run_chunk(inst, s, cumulative, ch, count, seed, c);
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }

  MonteCarloStats out;
  out.blocks = blocks;
  for (const auto& r : results) {
    out.accepted += r.accepted;
    out.diagonal += r.diagonal;
    out.eve_errors += r.eve_errors;
  }
  out.acceptance_rate = static_cast<double>(out.accepted) / static_cast<double>(blocks);
  out.empirical_tilde_p = out.accepted ? static_cast<double>(out.diagonal) / static_cast<double>(out.accepted) : 0.0;
  out.empirical_eve_error =
      out.diagonal ? static_cast<double>(out.eve_errors) / static_cast<double>(out.diagonal) : 0.0;
  out.acceptance_probability = swap_acceptance_probability(inst);
  out.tilde_p = tilde_p(inst);
  out.eve_error = swap_eve_error_exact(inst);
  return out;
}

}  // namespace skagree
