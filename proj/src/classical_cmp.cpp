#include "choimarg/classical_cmp.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "choimarg/errors.hpp"

namespace choimarg {

namespace {

// Symbol assigned to each label of one or more alphabets.
using Assignment = std::map<std::string, std::size_t>;

void assign(const LabeledSpace& s, std::size_t idx, Assignment& a) {
  const auto& fs = s.factors();
  for (std::size_t k = fs.size(); k-- > 0;) {
    a[fs[k].label] = idx % fs[k].dim;
    idx /= fs[k].dim;
  }
}

std::size_t index_of(const LabeledSpace& s, const Assignment& a) {
  std::size_t idx = 0;
  for (const auto& f : s.factors()) idx = idx * f.dim + a.at(f.label);
  return idx;
}

std::vector<std::string> shared(const std::vector<std::string>& a,
                                const std::vector<std::string>& b) {
  std::vector<std::string> out;
  for (const auto& l : a)
    if (std::find(b.begin(), b.end(), l) != b.end()) out.push_back(l);
  return out;
}

LabeledSpace checked_select(const LabeledSpace& s, const std::vector<std::string>& labels) {
  for (const auto& l : labels)
    if (!s.contains(l)) throw LabelMismatch("label '" + l + "' not in the channel's alphabets");
  return s.select(labels);
}

}  // namespace

OutputInputPair pair_of(const StochasticChannel& ch) {
  return {ch.out_space().labels(), ch.in_space().labels()};
}

ClassicalMarginal classical_marginal(const StochasticChannel& p, const OutputInputPair& pair,
                                     double tol_eq) {
  const LabeledSpace x = checked_select(p.out_space(), pair.out_labels);
  const LabeledSpace xp = checked_select(p.in_space(), pair.in_labels);
  const LabeledSpace r = p.in_space().without(pair.in_labels);
  const auto dx = static_cast<Eigen::Index>(x.dim());
  const auto dxp = static_cast<Eigen::Index>(xp.dim());
  const auto dr = static_cast<Eigen::Index>(r.dim());

  // q.col(x' * d_r + r) holds P(x | x', r).
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(dx, dxp * dr);
  Assignment a;
  for (std::size_t si = 0; si < p.in_space().dim(); ++si) {
    assign(p.in_space(), si, a);
    const auto col = static_cast<Eigen::Index>(index_of(xp, a) * r.dim() + index_of(r, a));
    for (std::size_t so = 0; so < p.out_space().dim(); ++so) {
      assign(p.out_space(), so, a);
      q(static_cast<Eigen::Index>(index_of(x, a)), col) +=
          p.matrix()(static_cast<Eigen::Index>(so), static_cast<Eigen::Index>(si));
    }
  }
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(dx, dxp);
  for (Eigen::Index c = 0; c < dxp; ++c)
    mean.col(c) = q.middleCols(c * dr, dr).rowwise().mean();
  ClassicalMarginal out;
  for (Eigen::Index c = 0; c < dxp; ++c)
    out.residual = std::max(
        out.residual, (q.middleCols(c * dr, dr).colwise() - mean.col(c)).cwiseAbs().maxCoeff());
  if (out.residual <= tol_eq) out.channel = StochasticChannel(xp, x, mean, tol_eq);
  return out;
}

ClassicalScenario::ClassicalScenario(LabeledSpace global_out, LabeledSpace global_in,
                                     std::vector<StochasticChannel> channels)
    : out_(std::move(global_out)), in_(std::move(global_in)), channels_(std::move(channels)) {
  for (const auto& f : out_.factors())
    if (in_.contains(f.label))
      throw InvalidScenario("label '" + f.label + "' appears as both output and input");
  for (std::size_t k = 0; k < channels_.size(); ++k) {
    auto check = [&](const LabeledSpace& local, const LabeledSpace& global) {
      for (const auto& f : local.factors())
        if (!global.contains(f.label) || global.dim_of(f.label) != f.dim)
          throw InvalidScenario("channel " + std::to_string(k) + " does not fit alphabet '" +
                                f.label + "'");
    };
    check(channels_[k].out_space(), out_);
    check(channels_[k].in_space(), in_);
    OutputInputPair p = pair_of(channels_[k]);
    for (const auto& q : pairs_)
      if (q.same_as(p)) throw InvalidScenario("output-input pair repeated in scenario");
    pairs_.push_back(std::move(p));
  }
}

StochasticChannel compose_chain(const StochasticChannel& first, const StochasticChannel& second,
                                double tol_eq) {
  const OutputInputPair common{shared(first.out_space().labels(), second.out_space().labels()),
                               shared(first.in_space().labels(), second.in_space().labels())};
  const ClassicalMarginal m1 = classical_marginal(first, common, tol_eq);
  const ClassicalMarginal m2 = classical_marginal(second, common, tol_eq);
  if (!m1.well_defined() || !m2.well_defined())
    throw LocallyIncompatible("shared marginal is not well defined");
  const double diff = (m1.channel->matrix() - m2.channel->matrix()).cwiseAbs().maxCoeff();
  if (diff > tol_eq)
    throw LocallyIncompatible("shared marginals differ by " + std::to_string(diff));

  const LabeledSpace out = first.out_space().concat(second.out_space().without(common.out_labels));
  const LabeledSpace in = first.in_space().concat(second.in_space().without(common.in_labels));
  const StochasticChannel& mid = *m1.channel;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(out.dim()),
                                            static_cast<Eigen::Index>(in.dim()));
  Assignment a;
  for (std::size_t si = 0; si < in.dim(); ++si) {
    assign(in, si, a);
    for (std::size_t so = 0; so < out.dim(); ++so) {
      assign(out, so, a);
      const double pb = mid.matrix()(static_cast<Eigen::Index>(index_of(mid.out_space(), a)),
                                     static_cast<Eigen::Index>(index_of(mid.in_space(), a)));
      if (pb <= 0.0) continue;
      const double p1 = first.matrix()(static_cast<Eigen::Index>(index_of(first.out_space(), a)),
                                       static_cast<Eigen::Index>(index_of(first.in_space(), a)));
      const double p2 =
          second.matrix()(static_cast<Eigen::Index>(index_of(second.out_space(), a)),
                          static_cast<Eigen::Index>(index_of(second.in_space(), a)));
      g(static_cast<Eigen::Index>(so), static_cast<Eigen::Index>(si)) = p1 * p2 / pb;
    }
  }
  for (Eigen::Index c = 0; c < g.cols(); ++c) {
    const double sum = g.col(c).sum();
    if (sum < 1.0)
      g(0, c) += 1.0 - sum;
    else
      g.col(c) /= sum;
  }
  return {in, out, g, tol_eq};
}

LocalCompatibilityReport classical_local_compatibility(const ClassicalScenario& sc,
                                                       double tol_eq) {
  LocalCompatibilityReport report;
  const auto& chans = sc.channels();
  for (std::size_t i = 0; i < chans.size(); ++i)
    for (std::size_t j = i + 1; j < chans.size(); ++j) {
      const auto& pi = sc.pairs()[i];
      const auto& pj = sc.pairs()[j];
      const OutputInputPair overlap{shared(pi.out_labels, pj.out_labels),
                                    shared(pi.in_labels, pj.in_labels)};
      if (overlap.out_labels.empty() && overlap.in_labels.empty()) continue;
      const ClassicalMarginal a = classical_marginal(chans[i], overlap, tol_eq);
      const ClassicalMarginal b = classical_marginal(chans[j], overlap, tol_eq);
      if (!a.well_defined() || !b.well_defined()) {
        report.failures.push_back(
            {i, j, std::max(a.residual, b.residual), "overlap marginal is not well defined"});
        continue;
      }
      const double diff = (a.channel->matrix() - b.channel->matrix()).cwiseAbs().maxCoeff();
      if (diff > tol_eq) report.failures.push_back({i, j, diff, "overlap marginals differ"});
    }
  return report;
}

ConicProgram build_classical_lp(const ClassicalScenario& sc) {
  const std::size_t ds = sc.global_out().dim();
  const std::size_t dsp = sc.global_in().dim();
  const int lambda = static_cast<int>(ds * dsp);
  int next = lambda + 2;

  // Global table entry G(s | s') sits at s * d_S' + s'.
  std::vector<Assignment> outs(ds), ins(dsp);
  for (std::size_t s = 0; s < ds; ++s) assign(sc.global_out(), s, outs[s]);
  for (std::size_t s = 0; s < dsp; ++s) assign(sc.global_in(), s, ins[s]);

  std::vector<Constraint> cons;
  for (std::size_t sp = 0; sp < dsp; ++sp) {
    Constraint c{{}, 1.0};
    for (std::size_t s = 0; s < ds; ++s) {
      const int v = static_cast<int>(s * dsp + sp);
      c.entries.push_back({0, v, v, 1.0});
    }
    cons.push_back(std::move(c));
  }
  for (std::size_t k = 0; k < sc.size(); ++k) {
    const OutputInputPair& pair = sc.pairs()[k];
    const LabeledSpace x = sc.global_out().select(pair.out_labels);
    const LabeledSpace xp = sc.global_in().select(pair.in_labels);
    const LabeledSpace r = sc.global_in().without(pair.in_labels);
    // Global input index for every (x', r).
    std::vector<std::vector<std::size_t>> input(xp.dim(), std::vector<std::size_t>(r.dim()));
    for (std::size_t sp = 0; sp < dsp; ++sp)
      input[index_of(xp, ins[sp])][index_of(r, ins[sp])] = sp;
    std::vector<std::size_t> out_x(ds);
    for (std::size_t s = 0; s < ds; ++s) out_x[s] = index_of(x, outs[s]);

    const Eigen::MatrixXd& target = sc.channels()[k].matrix();
    for (std::size_t xi = 0; xi < x.dim(); ++xi)
      for (std::size_t xpi = 0; xpi < xp.dim(); ++xpi) {
        const std::size_t base = input[xpi][0];
        // The marginal must not depend on the inputs outside X'.
        for (std::size_t ri = 1; ri < r.dim(); ++ri) {
          Constraint c{{}, 0.0};
          for (std::size_t s = 0; s < ds; ++s) {
            if (out_x[s] != xi) continue;
            const int v = static_cast<int>(s * dsp + input[xpi][ri]);
            const int w = static_cast<int>(s * dsp + base);
            c.entries.push_back({0, v, v, 1.0});
            c.entries.push_back({0, w, w, -1.0});
          }
          cons.push_back(std::move(c));
        }
        // marginal - lambda * target - slack = 0
        Constraint c{{}, 0.0};
        for (std::size_t s = 0; s < ds; ++s)
          if (out_x[s] == xi) {
            const int v = static_cast<int>(s * dsp + base);
            c.entries.push_back({0, v, v, 1.0});
          }
        const double t = target(static_cast<Eigen::Index>(xi), static_cast<Eigen::Index>(xpi));
        if (t != 0.0) c.entries.push_back({0, lambda, lambda, -t});
        c.entries.push_back({0, next, next, -1.0});
        ++next;
        cons.push_back(std::move(c));
      }
  }
  cons.push_back({{{0, lambda, lambda, 1.0}, {0, lambda + 1, lambda + 1, 1.0}}, 1.0});

  ConicProgram prog;
  prog.add_block("lp", next, BlockKind::Diagonal);
  prog.objective.push_back({0, lambda, lambda, 1.0});
  for (auto& c : cons) prog.add_constraint(std::move(c.entries), c.rhs);
  return prog;
}

double classical_robustness(const ClassicalScenario& sc, const SolverOptions& opts) {
  const ConicProgram prog = build_classical_lp(sc);
  const ConicSolution sol = solve(prog, opts);
  if (sol.status != SolveStatus::Optimal)
    throw SolverFailure(std::string("linear program stopped with status ") +
                        status_name(sol.status));
  const auto lambda = static_cast<Eigen::Index>(sc.global_out().dim() * sc.global_in().dim());
  return std::clamp(sol.x[0](lambda, 0), 0.0, 1.0);
}

StochasticChannel pr_box(const std::string& a, const std::string& b, const std::string& x,
                         const std::string& y) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(4, 4);
  for (int xi = 0; xi < 2; ++xi)
    for (int yi = 0; yi < 2; ++yi)
      for (int ai = 0; ai < 2; ++ai)
        for (int bi = 0; bi < 2; ++bi)
          if ((ai ^ bi) == (xi & yi)) p(ai * 2 + bi, xi * 2 + yi) = 0.5;
  return {LabeledSpace{{x, 2}, {y, 2}}, LabeledSpace{{a, 2}, {b, 2}}, p};
}

ClassicalScenario pr_box_scenario() {
  return {LabeledSpace{{"A", 2}, {"B", 2}, {"C", 2}},
          LabeledSpace{{"X", 2}, {"Y", 2}, {"Z", 2}},
          {pr_box("A", "B", "X", "Y"), pr_box("A", "C", "X", "Z"), pr_box("B", "C", "Y", "Z")}};
}

QuantumChannel embed_classical(const StochasticChannel& p) {
  const auto dout = static_cast<Eigen::Index>(p.out_space().dim());
  const auto din = static_cast<Eigen::Index>(p.in_space().dim());
  CMatrix choi = CMatrix::Zero(dout * din, dout * din);
  for (Eigen::Index s = 0; s < dout; ++s)
    for (Eigen::Index sp = 0; sp < din; ++sp)
      choi(s * din + sp, s * din + sp) = p.matrix()(s, sp) / static_cast<double>(din);
  ToleranceConfig tol;
  tol.tol_eq = 1e-6;
  return {p.in_space(), p.out_space(), choi, tol};
}

MarginalScenario embed_scenario(const ClassicalScenario& sc) {
  std::vector<QuantumChannel> chans;
  for (const auto& ch : sc.channels()) chans.push_back(embed_classical(ch));
  return {sc.global_out(), sc.global_in(), std::move(chans)};
}

}  // namespace choimarg
