// Command-line front end: solves scenarios given as JSON and runs the
// built-in demonstrations.
//
// Exit codes: 0 success, 1 a demo did not reproduce its expected outcome,
// 2 invalid input, 3 solver failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "choimarg/classical_cmp.hpp"
#include "choimarg/errors.hpp"
#include "choimarg/json_io.hpp"
#include "choimarg/known_solutions.hpp"
#include "choimarg/witness_tasks.hpp"

using namespace choimarg;

namespace {

constexpr int kDemoFailed = 1;
constexpr int kInvalid = 2;
constexpr int kSolverFailed = 3;

struct Settings {
  double tol_gap = SolverOptions{}.tol_gap;
  double tol_feas = SolverOptions{}.tol_feas;
  int max_iter = SolverOptions{}.max_iter;
  std::string format = "json";
  std::string out;
  bool dual = false;
  double epsilon = 0.0;
  std::string input;
  std::string target;
  std::string demo;
};

CmpOptions cmp_options(const Settings& s) {
  CmpOptions o;
  o.solver.tol_gap = s.tol_gap;
  o.solver.tol_feas = s.tol_feas;
  o.solver.max_iter = s.max_iter;
  if (const char* env = std::getenv("CHOIMARG_MAX_DIM")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v <= 0)
      throw InvalidScenario("CHOIMARG_MAX_DIM must be a positive integer");
    o.max_dim = static_cast<std::size_t>(v);
  }
  return o;
}

std::string scalar_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// Scalars and short scalar lists print in full; nested data is summarized.
void write_text(std::ostream& os, const Json& j, const std::string& indent = "") {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const Json& v = it.value();
    if (v.is_primitive()) {
      os << indent << it.key() << ": " << scalar_text(v) << '\n';
    } else if (v.is_array() && !v.empty() && v.front().is_object() && it.key() == "checks") {
      for (const auto& c : v)
        os << indent << (c.at("pass").get<bool>() ? "[ok]   " : "[FAIL] ")
           << c.at("name").get<std::string>() << " = " << scalar_text(c.at("value")) << "  ("
           << c.at("expect").get<std::string>() << ")\n";
    } else if (v.is_array() && std::all_of(v.begin(), v.end(),
                                           [](const Json& e) { return e.is_primitive(); })) {
      os << indent << it.key() << ": " << v.dump() << '\n';
    } else if (v.is_object() && v.size() <= 8 &&
               std::all_of(v.begin(), v.end(), [](const Json& e) { return e.is_primitive(); })) {
      os << indent << it.key() << ":\n";
      write_text(os, v, indent + "  ");
    } else {
      os << indent << it.key() << ": <" << v.size() << " entries, use --format json>\n";
    }
  }
}

void emit(const Settings& s, const Json& j) {
  std::ostringstream buf;
  if (s.format == "text")
    write_text(buf, j);
  else
    buf << j.dump(2) << '\n';
  if (s.out.empty()) {
    std::cout << buf.str();
    return;
  }
  std::ofstream f(s.out);
  if (!f) throw Error("cannot open '" + s.out + "' for writing");
  f << buf.str();
}

const char* verdict(bool compatible) { return compatible ? "compatible" : "incompatible"; }

Json cmd_solve(const Settings& s) {
  const CmpOptions opts = cmp_options(s);
  const MarginalScenario sc = scenario_from_json(read_json_file(s.input), opts.tol);
  const RobustnessReport rep = robustness(sc, opts);
  Json j{{"command", "solve"}, {"verdict", verdict(rep.R >= 1.0 - 1e-5)}};
  j.update(to_json(rep));
  j["local_compatibility"] = local_compatibility_check(sc, opts.tol).compatible();
  return j;
}

Json cmd_witness(const Settings& s) {
  const CmpOptions opts = cmp_options(s);
  const MarginalScenario sc = scenario_from_json(read_json_file(s.input), opts.tol);
  Json j{{"command", "witness"}};
  j.update(to_json(channel_form_witness(sc, opts)));
  return j;
}

Json cmd_discriminate(const Settings& s) {
  const CmpOptions opts = cmp_options(s);
  const MarginalScenario sc = scenario_from_json(read_json_file(s.input), opts.tol);
  TaskOptions topts;
  if (s.epsilon > 0.0) topts.epsilon = s.epsilon;
  Json j{{"command", "discriminate"}};
  try {
    const ChannelWitness w = channel_form_witness(sc, opts);
    const DiscriminationTask task = build_discrimination_task(sc, w, topts, opts);
    const double p = success_probability(task, sc.channels());
    const double pc = compatible_success_max(task, sc, opts);
    j["advantage"] = true;
    j["success_probability"] = rounded(p);
    j["compatible_max"] = rounded(pc);
    j["advantage_gap"] = rounded(p - pc);
    j["task"] = to_json(task);
  } catch (const NoAdvantagePossible& e) {
    j["advantage"] = false;
    j["reason"] = e.what();
  }
  return j;
}

Json cmd_classical(const Settings& s) {
  const CmpOptions opts = cmp_options(s);
  const ClassicalScenario sc =
      classical_scenario_from_json(read_json_file(s.input), opts.tol.tol_eq);
  const double r = classical_robustness(sc, opts.solver);
  const bool local = classical_local_compatibility(sc, opts.tol.tol_eq).compatible();
  return Json{{"command", "classical"},
              {"robustness", rounded(r)},
              {"verdict", verdict(r >= 1.0 - 1e-5)},
              {"local_compatibility", local}};
}

Json cmd_export_sdpa(const Settings& s) {
  const CmpOptions opts = cmp_options(s);
  const MarginalScenario sc = scenario_from_json(read_json_file(s.input), opts.tol);
  const ConicProgram prog = s.dual ? build_dual(sc, opts) : build_primal(sc, opts);
  export_sdpa(prog, s.target);
  return Json{{"command", "export-sdpa"},
              {"program", s.dual ? "dual" : "primal"},
              {"file", s.target},
              {"constraints", prog.constraints.size()},
              {"blocks", prog.blocks.size()}};
}

// ---- demos ---------------------------------------------------------------

class Checks {
 public:
  void add(const std::string& name, double value, bool pass, const std::string& expect) {
    list_.push_back(Json{{"name", name}, {"value", rounded(value)}, {"expect", expect},
                         {"pass", pass}});
    ok_ = ok_ && pass;
  }
  bool ok() const { return ok_; }
  Json json() const { return list_; }

 private:
  Json list_ = Json::array();
  bool ok_ = true;
};

MarginalScenario abc_scenario(std::vector<QuantumChannel> chans) {
  return {LabeledSpace{{"A", 2}, {"B", 2}, {"C", 2}},
          LabeledSpace{{"A'", 2}, {"B'", 2}, {"C'", 2}}, std::move(chans)};
}

void demo_mpair(Checks& c, const CmpOptions& opts) {
  const MarginalScenario sc =
      abc_scenario({cnot_ancilla_channel("A"), cnot_ancilla_channel("C")});
  const RobustnessReport rep = robustness(sc, opts);
  c.add("R", rep.R, std::abs(rep.R - 0.75) <= 1e-4, "0.75 +- 1e-4");
  const double res = primal_residuals(sc, cnot_pair_global_choi(), 0.75).worst();
  c.add("closed-form global Choi residual", res, res <= 1e-9, "<= 1e-9 at lambda = 0.75");
  std::vector<QuantumChannel> mixed;
  for (const std::string x : {"A", "C"})
    mixed.push_back(mix(cnot_ancilla_channel(x), cnot_pair_noise_channel(x), 0.75));
  const double rm = robustness(sc.with_channels(mixed), opts).R;
  c.add("R after closed-form noise", rm, rm >= 1.0 - 1e-4, "1 +- 1e-4");
}

void demo_swap(Checks& c, const CmpOptions& opts) {
  const MarginalScenario sc =
      abc_scenario({swap_prepare_channel("A"), swap_prepare_channel("C")});
  const bool local = local_compatibility_check(sc, opts.tol).compatible();
  c.add("locally compatible", local ? 1.0 : 0.0, local, "1");
  const RobustnessReport rep = robustness(sc, opts);
  c.add("R", rep.R, rep.R < 1.0 - 1e-3, "< 1 - 1e-3");
  const WitnessCertificate cert = verify_witness(sc, rep.dual_witness, opts);
  c.add("witness margin", cert.margin, cert.margin >= 1e-4, ">= 1e-4");
}

void demo_ghz_product(Checks& c, const CmpOptions& opts) {
  CVector phi = CVector::Zero(8);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);  // |0>_X (|00> + |11>)_BB' / sqrt 2
  const MarginalScenario sc =
      abc_scenario({ghz_marginal_channel(phi, "A"), ghz_marginal_channel(phi, "C")});
  const double r = robustness(sc, opts).R;
  c.add("R", r, std::abs(r - 1.0) <= 1e-4, "1 +- 1e-4");
}

void demo_prbox(Checks& c, const CmpOptions& opts) {
  const ClassicalScenario sc = pr_box_scenario();
  const bool local = classical_local_compatibility(sc, opts.tol.tol_eq).compatible();
  c.add("pairwise compatible", local ? 1.0 : 0.0, local, "1");
  const double r = classical_robustness(sc, opts.solver);
  c.add("classical robustness", r, r < 1.0 - 1e-3, "< 1 - 1e-3 (incompatible)");
}

void demo_isotropic(Checks& c, const CmpOptions& opts) {
  for (const double p : {0.6, 0.75}) {
    const double r =
        robustness(extendibility_scenario(isotropic_w_channel(p, "X"), "X", "X'", 2), opts).R;
    if (p < 2.0 / 3.0)
      c.add("R at p = 0.6", r, std::abs(r - 1.0) <= 1e-4, "1 +- 1e-4 (2-extendible)");
    else
      c.add("R at p = 0.75", r, r < 1.0 - 1e-3, "< 1 - 1e-3 (not 2-extendible)");
  }
}

void demo_no_broadcast(Checks& c, const CmpOptions& opts) {
  const LabeledSpace in{{"S'", 2}};
  const MarginalScenario sc = broadcast_scenario(
      {identity_channel(in, LabeledSpace{{"A", 2}}), identity_channel(in, LabeledSpace{{"B", 2}})});
  const RobustnessReport rep = robustness(sc, opts);
  c.add("R", rep.R, rep.R < 1.0 - 1e-3, "< 1 - 1e-3");
  const WitnessCertificate cert = verify_witness(sc, rep.dual_witness, opts);
  c.add("witness margin", cert.margin, cert.margin > 0.0, "> 0");
}

const std::map<std::string, std::function<void(Checks&, const CmpOptions&)>>& demos() {
  static const std::map<std::string, std::function<void(Checks&, const CmpOptions&)>> table{
      {"mpair", demo_mpair},       {"swap", demo_swap},
      {"ghz-product", demo_ghz_product}, {"prbox", demo_prbox},
      {"isotropic", demo_isotropic}, {"no-broadcast", demo_no_broadcast}};
  return table;
}

int cmd_demo(const Settings& s) {
  Checks checks;
  demos().at(s.demo)(checks, cmp_options(s));
  emit(s, Json{{"command", "demo"}, {"demo", s.demo}, {"pass", checks.ok()},
               {"checks", checks.json()}});
  if (!checks.ok()) {
    std::cerr << "demo '" << s.demo << "' did not reproduce its expected outcome\n";
    return kDemoFailed;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Settings s;
  CLI::App app{"Channel marginal problems: compatibility, robustness and witnesses"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--tol-gap", s.tol_gap, "Relative duality-gap tolerance")
      ->check(CLI::PositiveNumber);
  app.add_option("--tol-feas", s.tol_feas, "Relative feasibility tolerance")
      ->check(CLI::PositiveNumber);
  app.add_option("--max-iter", s.max_iter, "Interior-point iteration limit")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", s.format, "Output format")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--out", s.out, "Write the report to this file instead of stdout");

  auto* solve_cmd = app.add_subcommand("solve", "Robustness of a scenario");
  solve_cmd->add_option("scenario", s.input, "Scenario JSON")->required();
  auto* witness_cmd = app.add_subcommand("witness", "Channel-form incompatibility witness");
  witness_cmd->add_option("scenario", s.input, "Scenario JSON")->required();
  auto* disc_cmd = app.add_subcommand("discriminate", "Discrimination task with an advantage");
  disc_cmd->add_option("scenario", s.input, "Scenario JSON")->required();
  disc_cmd->add_option("--epsilon", s.epsilon, "Weight of the padding state, in (0, 1)")
      ->check(CLI::Range(0.0, 1.0));
  auto* classical_cmd = app.add_subcommand("classical", "Robustness of a classical scenario");
  classical_cmd->add_option("scenario", s.input, "Classical scenario JSON")->required();
  auto* export_cmd = app.add_subcommand("export-sdpa", "Write the robustness program as SDPA");
  export_cmd->add_option("scenario", s.input, "Scenario JSON")->required();
  export_cmd->add_option("output", s.target, "Output .dat-s file")->required();
  export_cmd->add_flag("--dual", s.dual, "Export the dual program instead");
  auto* demo_cmd = app.add_subcommand("demo", "Run a built-in example and check its outcome");
  std::vector<std::string> names;
  for (const auto& [name, fn] : demos()) names.push_back(name);
  demo_cmd->add_option("name", s.demo, "Demo name")->required()->check(CLI::IsMember(names));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInvalid;
  }

  try {
    if (*demo_cmd) return cmd_demo(s);
    Json report;
    if (*solve_cmd) report = cmd_solve(s);
    if (*witness_cmd) report = cmd_witness(s);
    if (*disc_cmd) report = cmd_discriminate(s);
    if (*classical_cmd) report = cmd_classical(s);
    if (*export_cmd) report = cmd_export_sdpa(s);
    emit(s, report);
    return 0;
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverFailed;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
}
