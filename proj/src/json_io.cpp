#include "choimarg/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "choimarg/errors.hpp"

namespace choimarg {

namespace {

Json real_rows(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(rounded(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json complex_matrix(const CMatrix& m) {
  return Json{{"re", real_rows(m.real())}, {"im", real_rows(m.imag())}};
}

Eigen::MatrixXd rows_from(const Json& j) {
  const auto nr = static_cast<Eigen::Index>(j.size());
  const auto nc = nr ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
  Eigen::MatrixXd m(nr, nc);
  for (Eigen::Index r = 0; r < nr; ++r) {
    const Json& row = j.at(r);
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != nc)
      throw ShapeError("matrix rows have different lengths");
    for (Eigen::Index c = 0; c < nc; ++c) m(r, c) = row.at(c).get<double>();
  }
  return m;
}

CMatrix complex_from(const Json& j) {
  const Eigen::MatrixXd re = rows_from(j.at("re"));
  const Eigen::MatrixXd im = j.contains("im") ? rows_from(j.at("im"))
                                              : Eigen::MatrixXd::Zero(re.rows(), re.cols());
  if (re.rows() != im.rows() || re.cols() != im.cols())
    throw ShapeError("real and imaginary parts differ in shape");
  CMatrix m(re.rows(), re.cols());
  m.real() = re;
  m.imag() = im;
  return m;
}

std::vector<std::string> labels_from(const Json& j) {
  return j.get<std::vector<std::string>>();
}

// Runs a reader, turning JSON access errors into a validation error.
template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidScenario(std::string("malformed ") + what + ": " + e.what());
  }
}

void check_pair_labels(const Json& pair, const std::vector<std::string>& out,
                       const std::vector<std::string>& in, std::size_t k) {
  auto as_set = [](const std::vector<std::string>& v) {
    return std::set<std::string>(v.begin(), v.end());
  };
  if (as_set(labels_from(pair.at("out"))) != as_set(out) ||
      as_set(labels_from(pair.at("in"))) != as_set(in))
    throw InvalidScenario("pair " + std::to_string(k) + " labels do not match its channel");
}

}  // namespace

double rounded(double v) {
  if (v == 0.0 || !std::isfinite(v)) return v == 0.0 ? 0.0 : v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

Json to_json(const LabeledSpace& s) {
  Json out = Json::array();
  for (const auto& f : s.factors()) out.push_back(Json::array({f.label, f.dim}));
  return out;
}

Json to_json(const LabeledOperator& op) {
  Json j{{"space", to_json(op.row_space())}};
  if (!op.is_square()) j["cols"] = to_json(op.col_space());
  const Json m = complex_matrix(op.matrix());
  j["re"] = m["re"];
  j["im"] = m["im"];
  return j;
}

Json to_json(const QuantumChannel& ch) {
  return Json{{"in", to_json(ch.in_space())},
              {"out", to_json(ch.out_space())},
              {"choi", complex_matrix(ch.choi().matrix())}};
}

Json to_json(const MarginalScenario& sc) {
  Json pairs = Json::array();
  for (std::size_t k = 0; k < sc.size(); ++k)
    pairs.push_back(Json{{"out", sc.pairs()[k].out_labels},
                         {"in", sc.pairs()[k].in_labels},
                         {"channel", to_json(sc.channels()[k])}});
  return Json{{"global_out", to_json(sc.global_out())},
              {"global_in", to_json(sc.global_in())},
              {"pairs", pairs}};
}

Json to_json(const StochasticChannel& ch) {
  return Json{{"in", to_json(ch.in_space())},
              {"out", to_json(ch.out_space())},
              {"p", real_rows(ch.matrix())}};
}

Json to_json(const ClassicalScenario& sc) {
  Json pairs = Json::array();
  for (std::size_t k = 0; k < sc.size(); ++k)
    pairs.push_back(Json{{"out", sc.pairs()[k].out_labels},
                         {"in", sc.pairs()[k].in_labels},
                         {"channel", to_json(sc.channels()[k])}});
  return Json{{"global_out", to_json(sc.global_out())},
              {"global_in", to_json(sc.global_in())},
              {"pairs", pairs}};
}

Json to_json(const RobustnessReport& rep) {
  Json noise = Json::array();
  for (const auto& ch : rep.noise_channels) noise.push_back(to_json(ch));
  Json witness = Json::array();
  for (const auto& op : rep.dual_witness) witness.push_back(to_json(op));
  return Json{{"R", rounded(rep.R)},
              {"gap", rounded(rep.primal_dual_gap)},
              {"iterations", rep.solution.iterations},
              {"noise", noise},
              {"witness", witness},
              {"global_choi", to_json(rep.global_choi)}};
}

Json to_json(const ChannelWitness& w) {
  Json terms = Json::array();
  for (const auto& pair : w.terms) {
    Json list = Json::array();
    for (const auto& t : pair)
      list.push_back(Json{{"effect", complex_matrix(t.effect)}, {"state", complex_matrix(t.state)}});
    terms.push_back(std::move(list));
  }
  return Json{{"null", w.null()},
              {"lhs", rounded(w.lhs)},
              {"rhs", rounded(w.rhs)},
              {"margin", rounded(w.margin())},
              {"length", w.length},
              {"bound", w.bound},
              {"within_bound", w.within_bound},
              {"terms", terms}};
}

Json to_json(const DiscriminationTask& task) {
  Json pairs = Json::array();
  for (const auto& pt : task.pairs) {
    Json q = Json::array();
    for (double v : pt.q) q.push_back(rounded(v));
    Json states = Json::array();
    for (const auto& s : pt.states) states.push_back(complex_matrix(s));
    Json povm = Json::array();
    for (const auto& m : pt.povm) povm.push_back(complex_matrix(m));
    pairs.push_back(Json{{"in", to_json(pt.in_space)},
                         {"out", to_json(pt.out_space)},
                         {"q", q},
                         {"states", states},
                         {"povm", povm}});
  }
  Json p = Json::array();
  for (double v : task.p) p.push_back(rounded(v));
  return Json{{"epsilon", rounded(task.epsilon)},
              {"strictly_positive", task.strictly_positive()},
              {"p", p},
              {"pairs", pairs}};
}

LabeledSpace space_from_json(const Json& j) {
  return guarded("space", [&] {
    std::vector<Factor> fs;
    for (const auto& f : j) {
      if (!f.is_array() || f.size() != 2) throw ShapeError("a factor is written [label, dim]");
      const long long dim = f.at(1).get<long long>();
      if (dim <= 0) throw ShapeError("factor dimensions must be positive");
      fs.push_back({f.at(0).get<std::string>(), static_cast<std::size_t>(dim)});
    }
    return LabeledSpace(fs);
  });
}

LabeledOperator operator_from_json(const Json& j) {
  return guarded("operator", [&] {
    const LabeledSpace rows = space_from_json(j.at("space"));
    const LabeledSpace cols = j.contains("cols") ? space_from_json(j.at("cols")) : rows;
    return LabeledOperator(rows, cols, complex_from(j));
  });
}

QuantumChannel channel_from_json(const Json& j, const ToleranceConfig& tol) {
  return guarded("channel", [&] {
    return QuantumChannel(space_from_json(j.at("in")), space_from_json(j.at("out")),
                          complex_from(j.at("choi")), tol);
  });
}

MarginalScenario scenario_from_json(const Json& j, const ToleranceConfig& tol) {
  return guarded("scenario", [&] {
    std::vector<QuantumChannel> chans;
    const Json& pairs = j.at("pairs");
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      chans.push_back(channel_from_json(pairs[k].at("channel"), tol));
      check_pair_labels(pairs[k], chans.back().out_space().labels(),
                        chans.back().in_space().labels(), k);
    }
    return MarginalScenario(space_from_json(j.at("global_out")),
                            space_from_json(j.at("global_in")), std::move(chans));
  });
}

StochasticChannel stochastic_from_json(const Json& j, double tol_eq) {
  return guarded("stochastic channel", [&] {
    return StochasticChannel(space_from_json(j.at("in")), space_from_json(j.at("out")),
                             rows_from(j.at("p")), tol_eq);
  });
}

ClassicalScenario classical_scenario_from_json(const Json& j, double tol_eq) {
  return guarded("classical scenario", [&] {
    std::vector<StochasticChannel> chans;
    const Json& pairs = j.at("pairs");
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      chans.push_back(stochastic_from_json(pairs[k].at("channel"), tol_eq));
      check_pair_labels(pairs[k], chans.back().out_space().labels(),
                        chans.back().in_space().labels(), k);
    }
    return ClassicalScenario(space_from_json(j.at("global_out")),
                             space_from_json(j.at("global_in")), std::move(chans));
  });
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t upto = std::min(e.byte, text.size());
    const auto line = 1 + static_cast<std::size_t>(
                              std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
    throw ParseError(e.what(), line);
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_json(buf.str());
}

}  // namespace choimarg
