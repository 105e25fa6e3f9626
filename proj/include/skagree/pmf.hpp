#pragma once

// Finite joint distributions, channels, sources with an eavesdropper, and the
// q ⪯ p relation together with the acceptance channels that let Alice and Bob
// simulate q from i.i.d. copies of p.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "skagree/error.hpp"

namespace skagree {

using Labels = std::vector<std::string>;
using Matrix = Eigen::MatrixXd;

inline constexpr double kSumTolerance = 1e-12;
inline constexpr double kRenormalizeTolerance = 1e-9;
// Sums this close to one are left untouched so exact inputs stay bit-exact.
inline constexpr double kExactSumSlack = 1e-15;

inline Labels default_labels(std::size_t n) {
  Labels out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i));
  return out;
}

namespace detail {

inline void check_labels(const Labels& labels, const char* what) {
  if (labels.empty()) throw Error(ErrorCode::DimensionMismatch, std::string(what) + " is empty");
  std::set<std::string> seen(labels.begin(), labels.end());
  if (seen.size() != labels.size())
    throw Error(ErrorCode::DuplicateLabel, std::string(what) + " has duplicate labels");
}

inline Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw Error(ErrorCode::DimensionMismatch, "matrix has no rows");
  const std::size_t cols = rows.front().size();
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw Error(ErrorCode::DimensionMismatch, "matrix is not rectangular");
    for (std::size_t j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

inline void check_entries(const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidPmf, "non-finite entry");
      if (v < 0.0) throw Error(ErrorCode::NegativeEntry, "entry (" + std::to_string(i) + "," + std::to_string(j) + ") is negative");
    }
}

}  // namespace detail

/// Joint pmf p_XY over labelled alphabets. Rows index X, columns index Y.
class JointPmf {
 public:
  JointPmf() = default;

  const Labels& x_alphabet() const { return x_labels_; }
  const Labels& y_alphabet() const { return y_labels_; }
  const Matrix& probs() const { return probs_; }
  std::size_t x_size() const { return x_labels_.size(); }
  std::size_t y_size() const { return y_labels_.size(); }

  double operator()(std::size_t x, std::size_t y) const {
    return probs_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
  }

  std::vector<double> x_marginal() const {
    std::vector<double> out(x_size(), 0.0);
    for (std::size_t x = 0; x < x_size(); ++x)
      for (std::size_t y = 0; y < y_size(); ++y) out[x] += (*this)(x, y);
    return out;
  }

  std::vector<double> y_marginal() const {
    std::vector<double> out(y_size(), 0.0);
    for (std::size_t x = 0; x < x_size(); ++x)
      for (std::size_t y = 0; y < y_size(); ++y) out[y] += (*this)(x, y);
    return out;
  }

  bool has_zero_cell() const { return (probs_.array() <= 0.0).any(); }

  JointPmf transpose() const {
    JointPmf out;
    out.x_labels_ = y_labels_;
    out.y_labels_ = x_labels_;
    out.probs_ = probs_.transpose();
    return out;
  }

  friend JointPmf validate_joint(const Matrix& matrix, Labels x_labels, Labels y_labels);

 private:
  Labels x_labels_;
  Labels y_labels_;
  Matrix probs_;
};

/// Checks a raw matrix and returns it as a JointPmf. Sums within 1e-9 of one
/// are renormalized; anything further off is rejected.
inline JointPmf validate_joint(const Matrix& matrix, Labels x_labels, Labels y_labels) {
  detail::check_labels(x_labels, "x alphabet");
  detail::check_labels(y_labels, "y alphabet");
  if (static_cast<std::size_t>(matrix.rows()) != x_labels.size() ||
      static_cast<std::size_t>(matrix.cols()) != y_labels.size())
    throw Error(ErrorCode::DimensionMismatch, "matrix shape does not match alphabet sizes");
  detail::check_entries(matrix);
  const double total = matrix.sum();
  if (std::abs(total - 1.0) > kRenormalizeTolerance)
    throw Error(ErrorCode::NotNormalized, "entries sum to " + std::to_string(total));
  JointPmf out;
  out.x_labels_ = std::move(x_labels);
  out.y_labels_ = std::move(y_labels);
  out.probs_ = std::abs(total - 1.0) > kExactSumSlack ? Matrix(matrix / total) : matrix;
  return out;
}

inline JointPmf validate_joint(const std::vector<std::vector<double>>& rows, Labels x_labels, Labels y_labels) {
  return validate_joint(detail::to_matrix(rows), std::move(x_labels), std::move(y_labels));
}

inline JointPmf validate_joint(const std::vector<std::vector<double>>& rows) {
  const Matrix m = detail::to_matrix(rows);
  return validate_joint(m, default_labels(static_cast<std::size_t>(m.rows())),
                        default_labels(static_cast<std::size_t>(m.cols())));
}

/// Conditional pmf with one row per input symbol.
class Channel {
 public:
  Channel() = default;

  const Labels& input_alphabet() const { return in_labels_; }
  const Labels& output_alphabet() const { return out_labels_; }
  const Matrix& probs() const { return probs_; }
  std::size_t input_size() const { return in_labels_.size(); }
  std::size_t output_size() const { return out_labels_.size(); }

  double operator()(std::size_t in, std::size_t out) const {
    return probs_(static_cast<Eigen::Index>(in), static_cast<Eigen::Index>(out));
  }

  std::vector<double> row(std::size_t in) const {
    std::vector<double> out(output_size());
    for (std::size_t j = 0; j < output_size(); ++j) out[j] = (*this)(in, j);
    return out;
  }

  friend Channel validate_channel(const Matrix& matrix, Labels in_labels, Labels out_labels);

 private:
  Labels in_labels_;
  Labels out_labels_;
  Matrix probs_;
};

inline Channel validate_channel(const Matrix& matrix, Labels in_labels, Labels out_labels) {
  detail::check_labels(in_labels, "channel input alphabet");
  detail::check_labels(out_labels, "channel output alphabet");
  if (static_cast<std::size_t>(matrix.rows()) != in_labels.size() ||
      static_cast<std::size_t>(matrix.cols()) != out_labels.size())
    throw Error(ErrorCode::DimensionMismatch, "channel shape does not match alphabet sizes");
  detail::check_entries(matrix);
  Channel out;
  out.probs_ = matrix;
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    const double total = matrix.row(i).sum();
    if (std::abs(total - 1.0) > kRenormalizeTolerance)
      throw Error(ErrorCode::NotNormalized, "channel row " + std::to_string(i) + " sums to " + std::to_string(total));
    if (std::abs(total - 1.0) > kExactSumSlack) out.probs_.row(i) /= total;
  }
  out.in_labels_ = std::move(in_labels);
  out.out_labels_ = std::move(out_labels);
  return out;
}

inline Channel validate_channel(const std::vector<std::vector<double>>& rows) {
  const Matrix m = detail::to_matrix(rows);
  return validate_channel(m, default_labels(static_cast<std::size_t>(m.rows())),
                          default_labels(static_cast<std::size_t>(m.cols())));
}

/// Joint pmf p_X(x) p_{Y|X}(y|x).
inline JointPmf joint_from_channel(const std::vector<double>& input, const Channel& channel) {
  if (input.size() != channel.input_size()) throw Error(ErrorCode::DimensionMismatch, "input pmf size");
  Matrix m(static_cast<Eigen::Index>(channel.input_size()), static_cast<Eigen::Index>(channel.output_size()));
  for (std::size_t x = 0; x < channel.input_size(); ++x)
    for (std::size_t y = 0; y < channel.output_size(); ++y)
      m(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = input[x] * channel(x, y);
  return validate_joint(m, channel.input_alphabet(), channel.output_alphabet());
}

/// p_{Y|X}; rows of X with zero mass become uniform.
inline Channel conditional_y_given_x(const JointPmf& joint) {
  Matrix m = joint.probs();
  for (Eigen::Index x = 0; x < m.rows(); ++x) {
    const double total = m.row(x).sum();
    if (total > 0.0)
      m.row(x) /= total;
    else
      m.row(x).setConstant(1.0 / static_cast<double>(m.cols()));
  }
  return validate_channel(m, joint.x_alphabet(), joint.y_alphabet());
}

struct ErasureEve {
  double epsilon = 0.0;
};

struct GeneralEve {
  Channel channel;  // inputs are (x,y) pairs, x-major
};

/// p_XY together with the eavesdropper's channel p_{Z|XY}.
class Source {
 public:
  Source(JointPmf joint, ErasureEve eve) : joint_(std::move(joint)), eve_(eve) {}
  Source(JointPmf joint, GeneralEve eve) : joint_(std::move(joint)), eve_(std::move(eve)) {
    const auto& ch = std::get<GeneralEve>(eve_).channel;
    if (ch.input_size() != joint_.x_size() * joint_.y_size())
      throw Error(ErrorCode::DimensionMismatch, "eavesdropper channel needs one row per (x,y) pair");
  }

  const JointPmf& joint() const { return joint_; }
  bool is_erasure() const { return std::holds_alternative<ErasureEve>(eve_); }

  double epsilon() const {
    if (!is_erasure()) throw Error(ErrorCode::NotErasureSource, "source has a general eavesdropper");
    return std::get<ErasureEve>(eve_).epsilon;
  }

  std::size_t z_size() const {
    return is_erasure() ? 1 + joint_.x_size() * joint_.y_size() : std::get<GeneralEve>(eve_).channel.output_size();
  }

  std::size_t pair_index(std::size_t x, std::size_t y) const { return x * joint_.y_size() + y; }

  /// p_{Z|XY} as an explicit channel. For erasure sources the output alphabet
  /// is {e} followed by the pairs in x-major order.
  Channel eve_channel() const {
    if (!is_erasure()) return std::get<GeneralEve>(eve_).channel;
    const double eps = epsilon();
    const std::size_t pairs = joint_.x_size() * joint_.y_size();
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(pairs), static_cast<Eigen::Index>(pairs + 1));
    Labels in_labels, out_labels{"e"};
    for (std::size_t x = 0; x < joint_.x_size(); ++x)
      for (std::size_t y = 0; y < joint_.y_size(); ++y) {
        const auto label = "(" + joint_.x_alphabet()[x] + "," + joint_.y_alphabet()[y] + ")";
        in_labels.push_back(label);
        out_labels.push_back(label);
        const auto row = static_cast<Eigen::Index>(pair_index(x, y));
        m(row, 0) = eps;
        m(row, row + 1) = 1.0 - eps;
      }
    return validate_channel(m, in_labels, out_labels);
  }

  /// p(x,y,z) flattened as [(x*|Y|+y)*|Z| + z].
  std::vector<double> joint_xyz() const {
    const Channel ch = eve_channel();
    const std::size_t zs = ch.output_size();
    std::vector<double> out(joint_.x_size() * joint_.y_size() * zs);
    for (std::size_t x = 0; x < joint_.x_size(); ++x)
      for (std::size_t y = 0; y < joint_.y_size(); ++y)
        for (std::size_t z = 0; z < zs; ++z) out[pair_index(x, y) * zs + z] = joint_(x, y) * ch(pair_index(x, y), z);
    return out;
  }

 private:
  JointPmf joint_;
  std::variant<ErasureEve, GeneralEve> eve_;
};

inline Source build_erasure_source(JointPmf joint, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw Error(ErrorCode::EpsilonOutOfRange, "erasure probability " + std::to_string(epsilon) + " not in [0,1]");
  return Source(std::move(joint), ErasureEve{epsilon});
}

// ---------------------------------------------------------------------------
// q ⪯ p

struct PreceqWitness {
  std::vector<double> a;  // over X
  std::vector<double> b;  // over Y
};

inline void check_same_alphabets(const JointPmf& q, const JointPmf& p) {
  if (q.x_alphabet() != p.x_alphabet() || q.y_alphabet() != p.y_alphabet())
    throw Error(ErrorCode::AlphabetMismatch, "pmfs are over different alphabets");
}

/// Finds nonnegative a, b with q(x,y) = a(x) b(y) p(x,y), or nullopt if none
/// exists. log(q/p) is split into alpha(x) + beta(y) by BFS over each
/// connected component of the bipartite support graph, anchoring alpha = 0 at
/// the first row reached.
inline std::optional<PreceqWitness> preceq_check(const JointPmf& q, const JointPmf& p, double tolerance = 1e-10) {
  check_same_alphabets(q, p);
  const std::size_t nx = p.x_size(), ny = p.y_size();

  std::vector<bool> row_on(nx, false), col_on(ny, false);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y)
      if (q(x, y) > 0.0) {
        if (p(x, y) <= 0.0) return std::nullopt;
        row_on[x] = true;
        col_on[y] = true;
      }
  // Inside the active rectangle every cell of supp(p) must carry mass in q.
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y)
      if (row_on[x] && col_on[y] && p(x, y) > 0.0 && q(x, y) <= 0.0) return std::nullopt;

  std::vector<double> alpha(nx, 0.0), beta(ny, 0.0);
  std::vector<bool> seen_x(nx, false), seen_y(ny, false);
  for (std::size_t root = 0; root < nx; ++root) {
    if (!row_on[root] || seen_x[root]) continue;
    seen_x[root] = true;
    // Node ids: x in [0, nx), y as nx + y.
    std::queue<std::size_t> frontier;
    frontier.push(root);
    while (!frontier.empty()) {
      const std::size_t node = frontier.front();
      frontier.pop();
      if (node < nx) {
        const std::size_t x = node;
        for (std::size_t y = 0; y < ny; ++y) {
          if (!col_on[y] || q(x, y) <= 0.0) continue;
          const double target = std::log(q(x, y)) - std::log(p(x, y));
          if (!seen_y[y]) {
            seen_y[y] = true;
            beta[y] = target - alpha[x];
            frontier.push(nx + y);
          }
        }
      } else {
        const std::size_t y = node - nx;
        for (std::size_t x = 0; x < nx; ++x) {
          if (!row_on[x] || q(x, y) <= 0.0) continue;
          const double target = std::log(q(x, y)) - std::log(p(x, y));
          if (!seen_x[x]) {
            seen_x[x] = true;
            alpha[x] = target - beta[y];
            frontier.push(x);
          }
        }
      }
    }
  }

  PreceqWitness w{std::vector<double>(nx, 0.0), std::vector<double>(ny, 0.0)};
  for (std::size_t x = 0; x < nx; ++x)
    if (row_on[x]) w.a[x] = std::exp(alpha[x]);
  for (std::size_t y = 0; y < ny; ++y)
    if (col_on[y]) w.b[y] = std::exp(beta[y]);

  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y)
      if (std::abs(w.a[x] * w.b[y] * p(x, y) - q(x, y)) > tolerance) return std::nullopt;
  return w;
}

/// Local acceptance rules: Alice keeps index i with probability a(x)/max a,
/// Bob with probability b(y)/max b. Conditioned on both keeping, (X,Y,Z) is
/// distributed as q_XY p_{Z|XY}.
struct SimulationChannels {
  std::vector<double> accept_x;  // p_{X'|X}(0|x)
  std::vector<double> accept_y;  // p_{Y'|Y}(0|y)
  double acceptance_probability = 0.0;
};

inline SimulationChannels preceq_simulation_channels(const Source& source, const PreceqWitness& witness) {
  const JointPmf& p = source.joint();
  if (witness.a.size() != p.x_size() || witness.b.size() != p.y_size())
    throw Error(ErrorCode::DimensionMismatch, "witness does not match the source alphabets");
  const double a_max = *std::max_element(witness.a.begin(), witness.a.end());
  const double b_max = *std::max_element(witness.b.begin(), witness.b.end());
  if (!(a_max > 0.0) || !(b_max > 0.0)) throw Error(ErrorCode::DegenerateWitness, "max a(x) or max b(y) is zero");
  for (double v : witness.a)
    if (v < 0.0) throw Error(ErrorCode::DegenerateWitness, "negative a(x)");
  for (double v : witness.b)
    if (v < 0.0) throw Error(ErrorCode::DegenerateWitness, "negative b(y)");

  SimulationChannels out;
  out.accept_x.reserve(witness.a.size());
  out.accept_y.reserve(witness.b.size());
  for (double v : witness.a) out.accept_x.push_back(v / a_max);
  for (double v : witness.b) out.accept_y.push_back(v / b_max);
  out.acceptance_probability = 1.0 / (a_max * b_max);
  return out;
}

}  // namespace skagree
