// skagree: secret-key agreement feasibility tools.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "skagree/skagree.hpp"

namespace {

using namespace skagree;

constexpr int kExitValidation = 2;
constexpr int kExitGuard = 3;

Units parse_units(const std::string& s) { return s == "nats" ? Units::Nats : Units::Bits; }

Json header(const char* command, Units units) {
  Json out;
  out["command"] = command;
  out["units"] = to_string(units);
  return out;
}

void emit(const Json& j, const std::string& out_path) {
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw Error(ErrorCode::InvalidInstance, "cannot write " + out_path);
  f << text;
}

const Source& require_source(const ParsedInput& in) {
  if (!in.source) throw Error(ErrorCode::ParseError, "input has no \"eve\" field");
  return *in.source;
}

struct PairArg {
  std::size_t x1, y1, x2, y2;
};

PairArg parse_pairs(const std::string& text, const JointPmf& p) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
  if (parts.size() != 4) throw Error(ErrorCode::InvalidInstance, "--pairs expects x1,y1,x2,y2");
  return {label_index(p.x_alphabet(), parts[0]), label_index(p.y_alphabet(), parts[1]),
          label_index(p.x_alphabet(), parts[2]), label_index(p.y_alphabet(), parts[3])};
}

Json labelled_pair(const JointPmf& p, const PairArg& a) {
  return {p.x_alphabet()[a.x1], p.y_alphabet()[a.y1], p.x_alphabet()[a.x2], p.y_alphabet()[a.y2]};
}

int run_thresholds(const std::string& input, Units units, const std::string& out) {
  const auto in = parse_input_file(input);
  const Source& source = require_source(in);
  const auto report = threshold_report(source);
  Json j = header("thresholds", units);
  j["epsilon"] = json_number(report.epsilon);
  j["report"] = to_json(report, in.joint);
  j["notes"] = {{"lbar_threshold_heuristic", report.lbar_heuristic},
                {"epsilon3_is_lower_bound", true},
                {"binary_alphabet_forces_epsilon1_eq_epsilon2", report.binary_alphabet}};
  emit(j, out);
  return 0;
}

int run_feasibility(const std::string& input, Units units, const std::string& pairs, std::size_t n,
                    const std::string& out) {
  const auto in = parse_input_file(input);
  const Source& source = require_source(in);
  Json j = header("feasibility", units);
  j["corollary1"] = to_json(corollary1_test(source), in.joint, units);
  if (!pairs.empty()) {
    const auto a = parse_pairs(pairs, in.joint);
    const auto inst = make_swap_instance(source, a.x1, a.y1, a.x2, a.y2, n);
    const auto s = swap_strings(inst);
    const auto v = set_test(source, {s.x1}, {s.x2}, {s.y1}, {s.y2}, n);
    Json swap;
    swap["pairs"] = labelled_pair(in.joint, a);
    swap["n"] = n;
    swap["set_test"] = to_json(v, in.joint, units);
    swap["tilde_p"] = json_number(tilde_p(inst));
    if (source.is_erasure()) swap["advantage_lb"] = json_number(in_units(swap_advantage_lb(inst), units));
    j["swap"] = swap;
  }
  emit(j, out);
  return 0;
}

int run_dsbe(double p, double eps_min, double eps_max, std::size_t steps, unsigned n_max, Units units,
             const std::string& out) {
  const auto points = emit_curves(p, linear_grid(eps_min, eps_max, steps), n_max);
  if (out.empty()) {
    write_curves_csv(std::cout, points, n_max, units);
  } else {
    std::ofstream f(out);
    if (!f) throw Error(ErrorCode::InvalidInstance, "cannot write " + out);
    write_curves_csv(f, points, n_max, units);
  }
  return 0;
}

int run_simulate(const std::string& input, Units units, const std::string& pairs, std::size_t n,
                 std::uint64_t blocks, std::uint64_t seed, const std::string& out) {
  const auto in = parse_input_file(input);
  const Source& source = require_source(in);
  const auto a = parse_pairs(pairs, in.joint);
  const auto inst = make_swap_instance(source, a.x1, a.y1, a.x2, a.y2, n);
  Json j = header("simulate", units);
  j["pairs"] = labelled_pair(in.joint, a);
  j["n"] = n;
  j["seed"] = seed;
  j["statistics"] = to_json(monte_carlo_protocol(inst, blocks, seed));
  emit(j, out);
  return 0;
}

int run_measure(const std::string& input, Units units, const std::string& out) {
  const auto in = parse_input_file(input);
  const JointPmf& p = in.joint;
  const auto px = p.x_marginal(), py = p.y_marginal();
  const Eigen::VectorXd flat = p.probs().reshaped<Eigen::RowMajor>();
  Json m;
  m["h_x"] = json_number(in_units(entropy(px), units));
  m["h_y"] = json_number(in_units(entropy(py), units));
  m["h_xy"] = json_number(in_units(entropy(std::span<const double>(flat.data(), static_cast<std::size_t>(flat.size()))), units));
  m["i_xy"] = json_number(in_units(mutual_information(p), units));
  m["rho_m"] = json_number(maximal_correlation(p));
  m["eta_y_given_x"] = json_number(eta(conditional_y_given_x(p)).eta);
  m["j_infinity"] = json_number(in_units(j_infinity(p), units));
  m["epsilon2"] = json_number(epsilon2(p).value);
  if (in.source) {
    m["i_xy_given_z"] = json_number(in_units(conditional_mutual_information(*in.source), units));
    m["doeblin_eve"] = json_number(doeblin_coefficient(in.source->eve_channel()));
  }
  Json j = header("measure", units);
  j["measures"] = m;
  emit(j, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secret-key agreement feasibility tools"};
  app.require_subcommand(1);
  std::string units_text = "bits";
  app.add_option("--units", units_text, "Output units for information quantities")
      ->check(CLI::IsMember({"bits", "nats"}))
      ->capture_default_str();

  std::string input, out, pairs;
  std::size_t n = 2, steps = 200;
  std::uint64_t blocks = 100000, seed = 0;
  double p = 0.0, eps_min = 0.0, eps_max = 1.0;
  unsigned n_max = 6;

  auto* thr = app.add_subcommand("thresholds", "Erasure-source thresholds and verdict");
  thr->add_option("--input", input, "Source JSON")->required();
  thr->add_option("--out", out, "Write output here instead of stdout");

  auto* fea = app.add_subcommand("feasibility", "Single-letter and swap-block feasibility tests");
  fea->add_option("--input", input, "Source JSON")->required();
  fea->add_option("--pairs", pairs, "Swap symbols x1,y1,x2,y2 (labels)");
  fea->add_option("--n", n, "Even block length for the swap test")->capture_default_str();
  fea->add_option("--out", out, "Write output here instead of stdout");

  auto* dsb = app.add_subcommand("dsbe", "DSBE(p, eps) curve family as CSV");
  dsb->add_option("--p", p, "Crossover probability")->required();
  dsb->add_option("--eps-min", eps_min)->capture_default_str();
  dsb->add_option("--eps-max", eps_max)->capture_default_str();
  dsb->add_option("--steps", steps, "Number of grid points")->capture_default_str();
  dsb->add_option("--n-max", n_max, "Largest repetition length")->capture_default_str();
  dsb->add_option("--out", out, "Write CSV here instead of stdout");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo run of the swap protocol");
  sim->add_option("--input", input, "Source JSON")->required();
  sim->add_option("--pairs", pairs, "Swap symbols x1,y1,x2,y2 (labels)")->required();
  sim->add_option("--n", n, "Even block length")->capture_default_str();
  sim->add_option("--blocks", blocks, "Number of blocks")->capture_default_str();
  sim->add_option("--seed", seed, "Random seed")->required();
  sim->add_option("--out", out, "Write output here instead of stdout");

  auto* mea = app.add_subcommand("measure", "Information and correlation measures of the input");
  mea->add_option("--input", input, "Source JSON")->required();
  mea->add_option("--out", out, "Write output here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  const Units units = parse_units(units_text);
  try {
    if (*thr) return run_thresholds(input, units, out);
    if (*fea) return run_feasibility(input, units, pairs, n, out);
    if (*dsb) return run_dsbe(p, eps_min, eps_max, steps, n_max, units, out);
    if (*sim) return run_simulate(input, units, pairs, n, blocks, seed, out);
    if (*mea) return run_measure(input, units, out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_computational_guard(e.code()) ? kExitGuard : kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
