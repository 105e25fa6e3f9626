#pragma once

// JSON input schema for sources and JSON/CSV serialization of results.
//
// Input:
//   {"x_alphabet": [...], "y_alphabet": [...], "p_xy": [[...], ...],
//    "eve": {"type": "erasure", "epsilon": e}
//         | {"type": "general", "z_alphabet": [...], "p_z_given_xy": [[...], ...]}}
// Rows of p_z_given_xy are indexed by (x, y) pairs in x-major order. The
// alphabets may be omitted, in which case labels "0", "1", ... are used.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "skagree/dsbe.hpp"
#include "skagree/error.hpp"
#include "skagree/feasibility.hpp"
#include "skagree/pmf.hpp"
#include "skagree/thresholds.hpp"

namespace skagree {

using Json = nlohmann::ordered_json;

enum class Units { Bits, Nats };

inline const char* to_string(Units u) { return u == Units::Bits ? "bits" : "nats"; }

inline double in_units(double nats, Units u) { return u == Units::Bits ? nats_to_bits(nats) : nats; }

/// Nine significant digits; infinities as "inf" / "-inf".
inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

/// A JSON number rounded to nine significant digits, or the string "inf".
inline Json json_number(double v) {
  if (!std::isfinite(v)) return format_number(v);
  return std::stod(format_number(v));
}

// ---------------------------------------------------------------------------
// Parsing

struct ParsedInput {
  JointPmf joint;
  std::optional<Source> source;  // present when "eve" is given
};

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

inline Labels parse_labels(const Json& j, const char* key, std::size_t expected) {
  if (!j.contains(key)) return default_labels(expected);
  const Json& a = j.at(key);
  if (!a.is_array()) parse_fail(std::string(key) + " must be an array");
  Labels out;
  for (const auto& v : a) out.push_back(v.is_string() ? v.get<std::string>() : v.dump());
  return out;
}

inline std::vector<std::vector<double>> parse_rows(const Json& j, const char* key) {
  if (!j.contains(key)) parse_fail(std::string("missing field ") + key);
  const Json& a = j.at(key);
  if (!a.is_array() || a.empty()) parse_fail(std::string(key) + " must be a non-empty array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& r : a) {
    if (!r.is_array()) parse_fail(std::string(key) + " rows must be arrays");
    std::vector<double> row;
    for (const auto& v : r) {
      if (!v.is_number()) parse_fail(std::string(key) + " entries must be numbers");
      row.push_back(v.get<double>());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

inline ParsedInput parse_input(const Json& j) {
  if (!j.is_object()) detail::parse_fail("input must be a JSON object");
  const auto rows = detail::parse_rows(j, "p_xy");
  const Matrix m = detail::to_matrix(rows);
  ParsedInput out{validate_joint(m, detail::parse_labels(j, "x_alphabet", static_cast<std::size_t>(m.rows())),
                                 detail::parse_labels(j, "y_alphabet", static_cast<std::size_t>(m.cols()))),
                  std::nullopt};
  if (!j.contains("eve")) return out;
  const Json& eve = j.at("eve");
  if (!eve.is_object() || !eve.contains("type") || !eve.at("type").is_string())
    detail::parse_fail("eve must be an object with a string \"type\"");
  const auto type = eve.at("type").get<std::string>();
  if (type == "erasure") {
    if (!eve.contains("epsilon") || !eve.at("epsilon").is_number()) detail::parse_fail("erasure eve needs a numeric epsilon");
    out.source = build_erasure_source(out.joint, eve.at("epsilon").get<double>());
  } else if (type == "general") {
    const Matrix zm = detail::to_matrix(detail::parse_rows(eve, "p_z_given_xy"));
    Labels in_labels;
    for (const auto& x : out.joint.x_alphabet())
      for (const auto& y : out.joint.y_alphabet()) in_labels.push_back("(" + x + "," + y + ")");
    if (static_cast<std::size_t>(zm.rows()) != in_labels.size())
      throw Error(ErrorCode::DimensionMismatch, "p_z_given_xy needs one row per (x,y) pair");
    Channel ch = validate_channel(zm, in_labels, detail::parse_labels(eve, "z_alphabet", static_cast<std::size_t>(zm.cols())));
    out.source = Source(out.joint, GeneralEve{std::move(ch)});
  } else {
    detail::parse_fail("unknown eve type \"" + type + "\"");
  }
  return out;
}

inline ParsedInput parse_input_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    detail::parse_fail(e.what());
  }
  try {
    return parse_input(j);
  } catch (const nlohmann::json::exception& e) {
    detail::parse_fail(e.what());
  }
}

inline ParsedInput parse_input_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) detail::parse_fail("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_input_text(ss.str());
}

/// Index of `label` in `alphabet`.
inline std::size_t label_index(const Labels& alphabet, const std::string& label) {
  for (std::size_t i = 0; i < alphabet.size(); ++i)
    if (alphabet[i] == label) return i;
  throw Error(ErrorCode::InvalidInstance, "unknown symbol \"" + label + "\"");
}

// ---------------------------------------------------------------------------
// Serialization

inline Json to_json(const ThresholdReport& r, const JointPmf& p) {
  Json out;
  out["epsilon1"] = json_number(r.epsilon1);
  out["epsilon2"] = json_number(r.epsilon2);
  out["epsilon3_lb"] = json_number(r.epsilon3_lb);
  out["oneway_threshold"] = json_number(r.oneway_threshold);
  out["lbar_threshold"] = json_number(r.lbar_threshold);
  out["verdict"] = to_string(r.verdict);
  if (r.witness_path) {
    Json xs = Json::array(), ys = Json::array();
    for (auto x : r.witness_path->xs) xs.push_back(p.x_alphabet()[x]);
    for (auto y : r.witness_path->ys) ys.push_back(p.y_alphabet()[y]);
    out["witness_path"] = {{"xs", xs}, {"ys", ys}};
  } else {
    out["witness_path"] = nullptr;
  }
  if (r.witness_pair.size() == 4) {
    const auto& w = r.witness_pair;
    out["witness_pair"] = {p.x_alphabet()[w[0]], p.x_alphabet()[w[1]], p.y_alphabet()[w[2]], p.y_alphabet()[w[3]]};
  } else {
    out["witness_pair"] = nullptr;
  }
  return out;
}

inline Json to_json(const FeasibilityVerdict& v, const JointPmf& p, Units units) {
  Json out;
  out["positive"] = v.positive;
  if (v.witness) {
    const auto& w = *v.witness;
    out["witness"] = {p.x_alphabet()[w[0]], p.x_alphabet()[w[1]], p.y_alphabet()[w[2]], p.y_alphabet()[w[3]]};
  } else {
    out["witness"] = nullptr;
  }
  out["lhs_chernoff"] = json_number(in_units(v.lhs_chernoff, units));
  out["rhs_half_log_ratio"] = json_number(in_units(v.rhs_half_log_ratio, units));
  return out;
}

inline Json to_json(const MonteCarloStats& s) {
  Json out;
  out["blocks"] = s.blocks;
  out["accepted"] = s.accepted;
  out["diagonal"] = s.diagonal;
  out["eve_errors"] = s.eve_errors;
  out["acceptance_rate"] = json_number(s.acceptance_rate);
  out["empirical_tilde_p"] = json_number(s.empirical_tilde_p);
  out["empirical_eve_error"] = json_number(s.empirical_eve_error);
  out["acceptance_probability"] = json_number(s.acceptance_probability);
  out["tilde_p"] = json_number(s.tilde_p);
  out["eve_error"] = json_number(s.eve_error);
  return out;
}

/// CSV with header epsilon,i_xy_given_z,b0_sub,s_ow,r_2,...,r_N. Curve values
/// are computed in bits and converted when nats are requested.
inline void write_curves_csv(std::ostream& os, const std::vector<CurvePoint>& points, unsigned n_max, Units units) {
  auto conv = [units](double bits) { return units == Units::Bits ? bits : bits_to_nats(bits); };
  os << "epsilon,i_xy_given_z,b0_sub,s_ow";
  for (unsigned n = 2; n <= n_max; ++n) os << ",r_" << n;
  os << '\n';
  for (const auto& c : points) {
    os << format_number(c.epsilon) << ',' << format_number(conv(c.i_xy_given_z)) << ','
       << format_number(conv(c.b0_sub)) << ',' << format_number(conv(c.s_ow_lb));
    for (double r : c.r_n) os << ',' << format_number(conv(r));
    os << '\n';
  }
}

}  // namespace skagree
