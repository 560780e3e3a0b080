#include "choimarg/cmp_sdp.hpp"

#include <algorithm>
#include <cmath>

#include "choimarg/errors.hpp"
#include "operator_basis.hpp"

namespace choimarg {

namespace {

std::vector<std::string> joined(const std::vector<std::string>& a,
                                const std::vector<std::string>& b) {
  std::vector<std::string> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

LabeledSpace global_space(const MarginalScenario& sc) {
  return sc.global_out().concat(sc.global_in());
}

void check_capacity(const MarginalScenario& sc, const CmpOptions& opts) {
  const std::size_t d = global_space(sc).dim();
  if (d > opts.max_dim)
    throw CapacityExceeded("global Choi dimension " + std::to_string(d) + " exceeds the limit " +
                           std::to_string(opts.max_dim));
}

std::vector<ComplexEntry> negated(std::vector<ComplexEntry> v) {
  for (auto& e : v) e.value = -e.value;
  return v;
}

double real_trace(const std::vector<ComplexEntry>& op) {
  double t = 0.0;
  for (const auto& e : op)
    if (e.row == e.col) t += e.value.real();
  return t;
}

// tr(G M) for a sparse G and a dense M on the same index set.
double pair_trace(const std::vector<ComplexEntry>& g, const CMatrix& m) {
  cplx acc = 0.0;
  for (const auto& e : g) acc += e.value * m(e.col, e.row);
  return acc.real();
}

std::vector<Entry> realified(int block, int d, const std::vector<ComplexEntry>& op) {
  std::vector<Entry> out;
  append_realified(out, block, d, op);
  return out;
}

// The factorization constraints of one pair: F (x) I_{S\X} for F spanning
// L0(X) (x) L(X') (x) L0(S'\X'). The part with I_X is implied by the
// normalization of tr_S rho and is left out.
std::vector<std::vector<ComplexEntry>> factorization_family(const MarginalScenario& sc,
                                                            const OutputInputPair& p,
                                                            const LabeledSpace& full) {
  const std::vector<std::string> rest = sc.global_in().without(p.in_labels).labels();
  const std::vector<std::string> labels = joined(joined(p.out_labels, p.in_labels), rest);
  std::vector<std::vector<ComplexEntry>> out;
  for (const auto& f : hermitian_basis(full, {{p.out_labels, true}, {p.in_labels, false},
                                              {rest, true}}))
    out.push_back(embed_entries(full, labels, f));
  return out;
}

enum class Mode { Robustness, WitnessMax };

ConicProgram build(const MarginalScenario& sc, const CmpOptions& opts, Mode mode,
                   const std::vector<CMatrix>* witness, PrimalLayout* layout) {
  check_capacity(sc, opts);
  const LabeledSpace full = global_space(sc);
  const int d = static_cast<int>(full.dim());
  const std::vector<std::string> in_labels = sc.global_in().labels();
  const double d_in = static_cast<double>(sc.global_in().dim());

  ConicProgram prog;
  PrimalLayout lay;
  lay.rho = prog.add_block("rho", 2 * d);
  if (mode == Mode::Robustness) {
    for (std::size_t k = 0; k < sc.size(); ++k) {
      const auto& ch = sc.channels()[k];
      lay.slack.push_back(prog.add_block("W" + std::to_string(k),
                                         2 * static_cast<int>(ch.choi().row_space().dim())));
    }
    lay.lambda = prog.add_block("lambda", 2, BlockKind::Diagonal);
    prog.objective.push_back({lay.lambda, 0, 0, 1.0});
  } else {
    lay.lambda = -1;
    for (std::size_t k = 0; k < sc.size(); ++k) {
      const auto& p = sc.pairs()[k];
      std::vector<ComplexEntry> h;
      const CMatrix& m = (*witness)[k];
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r)
          if (m(r, c) != cplx(0.0))
            h.push_back({static_cast<int>(r), static_cast<int>(c), m(r, c)});
      append_realified(prog.objective, lay.rho, d,
                       embed_entries(full, joined(p.out_labels, p.in_labels), h));
    }
  }

  // tr_S rho = I / d_S'
  for (const auto& k : hermitian_basis(full, {{in_labels, false}}))
    prog.add_constraint(realified(lay.rho, d, embed_entries(full, in_labels, k)),
                        real_trace(k) / d_in);

  for (std::size_t k = 0; k < sc.size(); ++k) {
    const auto& p = sc.pairs()[k];
    const std::vector<std::string> labels = joined(p.out_labels, p.in_labels);
    if (mode == Mode::Robustness) {
      // tr_{SS'\XX'} rho - lambda E - W = 0
      const CMatrix& e = sc.channels()[k].choi().matrix();
      const int dp = static_cast<int>(e.rows());
      for (const auto& g : hermitian_basis(full, {{labels, false}})) {
        std::vector<Entry> row = realified(lay.rho, d, embed_entries(full, labels, g));
        const double te = pair_trace(g, e);
        if (te != 0.0) row.push_back({lay.lambda, 0, 0, -te});
        append_realified(row, lay.slack[k], dp, negated(g));
        prog.add_constraint(std::move(row), 0.0);
      }
    }
    for (const auto& f : factorization_family(sc, p, full))
      prog.add_constraint(realified(lay.rho, d, f), 0.0);
  }

  if (mode == Mode::Robustness)
    prog.add_constraint({{lay.lambda, 0, 0, 1.0}, {lay.lambda, 1, 1, 1.0}}, 1.0);
  if (layout) *layout = lay;
  return prog;
}

// Witness operators reordered to the pair labels, validated.
std::vector<CMatrix> aligned_witness(const MarginalScenario& sc,
                                     const std::vector<LabeledOperator>& h, double tol_psd) {
  if (h.size() != sc.size())
    throw InvalidWitness("expected " + std::to_string(sc.size()) + " witness operators, got " +
                         std::to_string(h.size()));
  std::vector<CMatrix> out;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const auto& p = sc.pairs()[k];
    const LabeledSpace expect = sc.channels()[k].choi().row_space();
    if (!h[k].is_square() || !h[k].row_space().same_factors(expect))
      throw InvalidWitness("witness " + std::to_string(k) + " does not act on its pair's systems");
    const CMatrix m = permute_factors(h[k], joined(p.out_labels, p.in_labels)).matrix();
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + m.cwiseAbs().maxCoeff()))
      throw InvalidWitness("witness " + std::to_string(k) + " is not Hermitian");
    if (min_eigenvalue(m) < -tol_psd * (1.0 + m.cwiseAbs().maxCoeff()))
      throw InvalidWitness("witness " + std::to_string(k) + " is not positive semidefinite");
    out.push_back(hermitian_part(m));
  }
  return out;
}

ConicSolution checked_solve(const ConicProgram& prog, const SolverOptions& opts) {
  ConicSolution sol = solve(prog, opts);
  if (sol.status != SolveStatus::Optimal)
    throw SolverFailure(std::string("conic solver stopped with status ") +
                        status_name(sol.status) + " (gap " + std::to_string(sol.gap) + ")");
  return sol;
}

}  // namespace

ConicProgram build_primal(const MarginalScenario& scenario, const CmpOptions& opts,
                          PrimalLayout* layout) {
  return build(scenario, opts, Mode::Robustness, nullptr, layout);
}

ConicProgram build_dual(const MarginalScenario& sc, const CmpOptions& opts) {
  check_capacity(sc, opts);
  const LabeledSpace full = global_space(sc);
  const int d = static_cast<int>(full.dim());
  const std::vector<std::string> in_labels = sc.global_in().labels();
  const double d_in = static_cast<double>(sc.global_in().dim());

  ConicProgram prog;
  const int lmi = prog.add_block("lmi", 2 * d);
  std::vector<int> zblock;
  for (std::size_t k = 0; k < sc.size(); ++k) {
    const auto& p = sc.pairs()[k];
    const int dz = static_cast<int>(full.select(p.out_labels).dim() * sc.global_in().dim());
    zblock.push_back(prog.add_block("Z" + std::to_string(k), 2 * dz));
  }
  const int lp = prog.add_block("z", 2, BlockKind::Diagonal);
  // Second diagonal entry: z + sum_p tr(Z_p (E_p (x) I/d)) - 1 >= 0.
  prog.objective.push_back({lp, 1, 1, 1.0});

  // H_S' enters as I_S (x) H_S' with objective tr(H_S') / d_S'.
  for (const auto& k : hermitian_basis(full, {{in_labels, false}}))
    prog.add_constraint(realified(lmi, d, embed_entries(full, in_labels, k)),
                        real_trace(k) / d_in);

  for (std::size_t k = 0; k < sc.size(); ++k) {
    const auto& p = sc.pairs()[k];
    // H - tr_{S'\X'}(H) (x) I/d keeps exactly the L(X) (x) L(X') (x) L0(S'\X')
    // component of H; its I_X part merges into H_S'.
    for (const auto& f : factorization_family(sc, p, full))
      prog.add_constraint(realified(lmi, d, f), 0.0);

    const std::vector<std::string> rest = sc.global_in().without(p.in_labels).labels();
    const std::vector<std::string> labels = joined(joined(p.out_labels, p.in_labels), rest);
    const LabeledSpace local = full.select(labels);
    const CMatrix ei =
        embed(sc.channels()[k].choi(), local).matrix() / static_cast<double>(
                                                              full.select(rest).dim());
    const int dz = static_cast<int>(local.dim());
    for (const auto& g : hermitian_basis(full, {{labels, false}})) {
      std::vector<Entry> row = realified(lmi, d, negated(embed_entries(full, labels, g)));
      append_realified(row, zblock[k], dz, g);
      const double te = pair_trace(g, ei);
      if (te != 0.0) row.push_back({lp, 1, 1, te});
      prog.add_constraint(std::move(row), 0.0);
    }
  }
  prog.add_constraint({{lp, 0, 0, 1.0}, {lp, 1, 1, 1.0}}, 1.0);
  return prog;
}

RobustnessReport robustness(const MarginalScenario& sc, const CmpOptions& opts) {
  PrimalLayout lay;
  const ConicProgram prog = build_primal(sc, opts, &lay);
  RobustnessReport rep;
  rep.solution = checked_solve(prog, opts.solver);
  const ConicSolution& sol = rep.solution;
  rep.R = std::clamp(sol.x[lay.lambda](0, 0), 0.0, 1.0);
  rep.primal_dual_gap = sol.gap;
  rep.global_choi = LabeledOperator(global_space(sc), complex_from_realified(sol.x[lay.rho]));

  // The slack W = L - R E is (1 - R) N; reading N off W keeps it positive.
  ToleranceConfig noise_tol = opts.tol;
  noise_tol.tol_eq = std::max(noise_tol.tol_eq, 1e-6);
  for (std::size_t k = 0; k < sc.size(); ++k) {
    const QuantumChannel& ch = sc.channels()[k];
    if (rep.R >= 1.0 - 1e-5) {
      rep.noise_channels.push_back(completely_depolarizing(ch.in_space(), ch.out_space()));
    } else {
      CMatrix w = complex_from_realified(sol.x[lay.slack[k]]) / (1.0 - rep.R);
      rep.noise_channels.emplace_back(ch.in_space(), ch.out_space(), w, noise_tol);
    }
    rep.dual_witness.emplace_back(ch.choi().row_space(),
                                  2.0 * complex_from_realified(sol.z[lay.slack[k]]));
  }
  return rep;
}

bool is_compatible(const MarginalScenario& scenario, double tol, const CmpOptions& opts) {
  return robustness(scenario, opts).R >= 1.0 - tol;
}

std::optional<QuantumChannel> feasibility_global(const MarginalScenario& sc, double tol,
                                                 const CmpOptions& opts) {
  const RobustnessReport rep = robustness(sc, opts);
  if (rep.R < 1.0 - tol) return std::nullopt;
  return QuantumChannel(sc.global_in(), sc.global_out(), rep.global_choi.matrix(), opts.tol);
}

double dual_robustness(const MarginalScenario& scenario, const CmpOptions& opts) {
  return checked_solve(build_dual(scenario, opts), opts.solver).dual_objective;
}

double witness_max_over_compatible(const MarginalScenario& sc,
                                   const std::vector<LabeledOperator>& h,
                                   const CmpOptions& opts) {
  const std::vector<CMatrix> aligned = aligned_witness(sc, h, opts.tol.tol_psd);
  const ConicProgram prog = build(sc, opts, Mode::WitnessMax, &aligned, nullptr);
  return checked_solve(prog, opts.solver).primal_objective;
}

double witness_value(const MarginalScenario& sc, const std::vector<LabeledOperator>& h) {
  if (h.size() != sc.size()) throw InvalidWitness("one witness operator per pair is required");
  double total = 0.0;
  for (std::size_t k = 0; k < sc.size(); ++k) {
    const auto& p = sc.pairs()[k];
    const CMatrix m = permute_factors(h[k], joined(p.out_labels, p.in_labels)).matrix();
    total += (m.cwiseProduct(sc.channels()[k].choi().matrix().transpose())).sum().real();
  }
  return total;
}

WitnessCertificate verify_witness(const MarginalScenario& sc,
                                  const std::vector<LabeledOperator>& h, const CmpOptions& opts) {
  WitnessCertificate cert;
  cert.operators = h;
  cert.compatible_max = witness_max_over_compatible(sc, h, opts);
  cert.value_on_input = witness_value(sc, h);
  cert.margin = cert.value_on_input - cert.compatible_max;
  return cert;
}

double PrimalResiduals::worst() const {
  double w = std::max(positivity, normalization);
  for (double v : factorization) w = std::max(w, v);
  for (double v : dominance) w = std::max(w, v);
  return w;
}

PrimalResiduals primal_residuals(const MarginalScenario& sc, const LabeledOperator& rho,
                                 double lambda) {
  if (!rho.is_square() || !rho.row_space().same_factors(global_space(sc)))
    throw LabelMismatch("state does not live on the scenario's global systems");
  PrimalResiduals res;
  res.positivity = std::max(0.0, -min_eigenvalue(rho));
  const std::vector<std::string> in_labels = sc.global_in().labels();
  res.normalization = (reduce_to(rho, in_labels).matrix() -
                       maximally_mixed(sc.global_in().dim()))
                          .cwiseAbs()
                          .maxCoeff();
  for (std::size_t k = 0; k < sc.size(); ++k) {
    const auto& p = sc.pairs()[k];
    const LabeledSpace rest = sc.global_in().without(p.in_labels);
    const double dr = static_cast<double>(rest.dim());
    const LabeledOperator t =
        reduce_to(rho, joined(joined(p.out_labels, p.in_labels), rest.labels()));
    const LabeledOperator l = reduce_to(rho, joined(p.out_labels, p.in_labels));
    const LabeledOperator fact = embed(l * cplx(1.0 / dr), t.row_space());
    res.factorization.push_back((t.matrix() - fact.matrix()).cwiseAbs().maxCoeff());
    const LabeledOperator target =
        embed(sc.channels()[k].choi() * cplx(lambda / dr), t.row_space());
    res.dominance.push_back(std::max(0.0, -min_eigenvalue((t - target).matrix())));
  }
  return res;
}

}  // namespace choimarg
