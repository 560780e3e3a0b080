#include "choimarg/witness_tasks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <unsupported/Eigen/KroneckerProduct>

#include "choimarg/errors.hpp"

namespace choimarg {

namespace {

CMatrix projector_of(const CVector& v) { return v * v.adjoint(); }

CMatrix zero_state(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  CMatrix s = CMatrix::Zero(n, n);
  s(0, 0) = 1.0;
  return s;
}

double max_eigenvalue(const CMatrix& m) {
  return Eigen::SelfAdjointEigenSolver<CMatrix>(hermitian_part(m), Eigen::EigenvaluesOnly)
      .eigenvalues()
      .maxCoeff();
}

double effect_on(const CMatrix& effect, const QuantumChannel& ch, const CMatrix& state) {
  const LabeledOperator out = apply(ch, LabeledOperator(ch.in_space(), state));
  return (effect * out.matrix()).trace().real();
}

void check_fits(const PairTask& pair, const QuantumChannel& ch) {
  if (!ch.in_space().same_factors(pair.in_space) || !ch.out_space().same_factors(pair.out_space))
    throw LabelMismatch("channel does not act on the task's systems");
}

}  // namespace

LabeledOperator ProductDecomposition::reconstruct() const {
  const auto n = static_cast<Eigen::Index>(out_space.dim() * in_space.dim());
  CMatrix sum = CMatrix::Zero(n, n);
  for (const auto& t : terms) sum += Eigen::kroneckerProduct(t.effect, t.state.transpose()).eval();
  return {out_space.concat(in_space), sum};
}

std::vector<CMatrix> informationally_complete_states(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  std::vector<CMatrix> out;
  for (Eigen::Index k = 0; k < n; ++k) out.push_back(projector_of(CVector::Unit(n, k)));
  const double r = 1.0 / std::sqrt(2.0);
  for (const cplx phase : {cplx(1.0, 0.0), cplx(0.0, 1.0)})
    for (Eigen::Index k = 0; k < n; ++k)
      for (Eigen::Index l = k + 1; l < n; ++l) {
        CVector v = CVector::Zero(n);
        v(k) = r;
        v(l) = phase * r;
        out.push_back(projector_of(v));
      }
  return out;
}

ProductDecomposition product_decompose(const LabeledOperator& h,
                                       const std::vector<std::string>& in_labels) {
  if (!h.is_square()) throw ShapeError("product_decompose needs a square operator");
  if (!is_hermitian(h, 1e-9 * (1.0 + h.matrix().cwiseAbs().maxCoeff())))
    throw ShapeError("product_decompose needs a Hermitian operator");
  ProductDecomposition dec;
  dec.in_space = h.row_space().select(in_labels);
  dec.out_space = h.row_space().without(in_labels);
  std::vector<std::string> order = dec.out_space.labels();
  order.insert(order.end(), in_labels.begin(), in_labels.end());
  const CMatrix m = permute_factors(h, order).matrix();

  const auto dx = static_cast<Eigen::Index>(dec.out_space.dim());
  const auto dp = static_cast<Eigen::Index>(dec.in_space.dim());
  const std::vector<CMatrix> states = informationally_complete_states(dec.in_space.dim());

  // Column j of t holds rho_j^T flattened over (a, b); column (x, y) of
  // blocks holds the entries H_(xa, yb).
  CMatrix t(dp * dp, dp * dp);
  for (Eigen::Index j = 0; j < dp * dp; ++j)
    for (Eigen::Index a = 0; a < dp; ++a)
      for (Eigen::Index b = 0; b < dp; ++b) t(a * dp + b, j) = states[j](b, a);
  CMatrix blocks(dp * dp, dx * dx);
  for (Eigen::Index x = 0; x < dx; ++x)
    for (Eigen::Index y = 0; y < dx; ++y)
      for (Eigen::Index a = 0; a < dp; ++a)
        for (Eigen::Index b = 0; b < dp; ++b)
          blocks(a * dp + b, x * dx + y) = m(x * dp + a, y * dp + b);

  const Eigen::FullPivLU<CMatrix> lu(t);
  if (lu.rank() < dp * dp) throw DecompositionFailure("input state set is not a basis");
  const CMatrix coeff = lu.solve(blocks) / static_cast<double>(dp);

  for (Eigen::Index j = 0; j < dp * dp; ++j) {
    CMatrix e(dx, dx);
    for (Eigen::Index x = 0; x < dx; ++x)
      for (Eigen::Index y = 0; y < dx; ++y) e(x, y) = coeff(j, x * dx + y);
    dec.terms.push_back({hermitian_part(e), states[j]});
  }
  dec.residual =
      (dec.reconstruct().matrix() - m / static_cast<double>(dp)).cwiseAbs().maxCoeff();
  if (dec.residual > 1e-8 * std::max(1.0, m.cwiseAbs().maxCoeff()))
    throw DecompositionFailure("reconstruction residual " + std::to_string(dec.residual));
  return dec;
}

double evaluate_terms(const std::vector<ProductTerm>& terms, const QuantumChannel& channel) {
  double total = 0.0;
  for (const auto& t : terms) total += effect_on(t.effect, channel, t.state);
  return total;
}

LabeledOperator reassemble(const std::vector<ProductTerm>& terms, const QuantumChannel& shape) {
  const auto n = static_cast<Eigen::Index>(shape.d_out() * shape.d_in());
  CMatrix sum = CMatrix::Zero(n, n);
  for (const auto& t : terms) sum += Eigen::kroneckerProduct(t.effect, t.state.transpose()).eval();
  return {shape.choi().row_space(), sum * static_cast<double>(shape.d_in())};
}

double hermitian_max_over_compatible(const MarginalScenario& sc,
                                     const std::vector<LabeledOperator>& h,
                                     const CmpOptions& opts) {
  // Every Choi state has unit trace, so adding c I to H_p adds exactly c.
  std::vector<LabeledOperator> shifted;
  double total_shift = 0.0;
  for (const auto& op : h) {
    const double c = std::max(0.0, -min_eigenvalue(hermitian_part(op.matrix())));
    total_shift += c;
    shifted.push_back(op + LabeledOperator::identity(op.row_space()) * cplx(c));
  }
  return witness_max_over_compatible(sc, shifted, opts) - total_shift;
}

ChannelWitness channel_form_witness(const MarginalScenario& sc, const CmpOptions& opts,
                                    double compat_tol) {
  ChannelWitness w;
  std::size_t dmax = 1;
  for (const auto& ch : sc.channels()) dmax = std::max({dmax, ch.d_out(), ch.d_in()});
  w.bound = dmax * dmax + 3;

  const RobustnessReport rep = robustness(sc, opts);
  if (rep.R >= 1.0 - compat_tol) return w;

  std::size_t longest = 0;
  for (std::size_t k = 0; k < sc.size(); ++k) {
    const QuantumChannel& ch = sc.channels()[k];
    ProductDecomposition dec = product_decompose(rep.dual_witness[k], ch.in_space().labels());
    longest = std::max(longest, dec.terms.size());
    w.terms.push_back(std::move(dec.terms));
  }
  w.within_bound = longest <= w.bound;
  w.length = w.within_bound ? w.bound : longest;
  for (std::size_t k = 0; k < sc.size(); ++k) {
    const QuantumChannel& ch = sc.channels()[k];
    const auto dx = static_cast<Eigen::Index>(ch.d_out());
    w.terms[k].resize(w.length, ProductTerm{CMatrix::Zero(dx, dx), zero_state(ch.d_in())});
  }

  std::vector<LabeledOperator> choi_level;
  for (std::size_t k = 0; k < sc.size(); ++k) {
    w.lhs += evaluate_terms(w.terms[k], sc.channels()[k]);
    choi_level.push_back(reassemble(w.terms[k], sc.channels()[k]));
  }
  w.rhs = hermitian_max_over_compatible(sc, choi_level, opts);
  if (!(w.margin() > 0.0))
    throw InvalidWitness("decomposed witness does not separate the channels (margin " +
                         std::to_string(w.margin()) + ")");
  return w;
}

void DiscriminationTask::validate(double tol) const {
  if (p.size() != pairs.size()) throw InvalidScenario("one pair probability per pair is required");
  const double psum = std::accumulate(p.begin(), p.end(), 0.0);
  if (std::abs(psum - 1.0) > tol || std::any_of(p.begin(), p.end(), [&](double v) {
        return v < -tol;
      }))
    throw InvalidScenario("pair probabilities must form a distribution");
  ToleranceConfig state_tol;
  state_tol.tol_herm = state_tol.tol_psd = state_tol.tol_trace = tol;
  for (const auto& pt : pairs) {
    if (pt.q.size() != pt.states.size() || pt.q.size() != pt.povm.size())
      throw InvalidScenario("ensemble and POVM lengths differ");
    const double qsum = std::accumulate(pt.q.begin(), pt.q.end(), 0.0);
    if (std::abs(qsum - 1.0) > tol ||
        std::any_of(pt.q.begin(), pt.q.end(), [&](double v) { return v < -tol; }))
      throw InvalidScenario("ensemble weights must form a distribution");
    const auto din = static_cast<Eigen::Index>(pt.in_space.dim());
    const auto dout = static_cast<Eigen::Index>(pt.out_space.dim());
    CMatrix total = CMatrix::Zero(dout, dout);
    for (std::size_t i = 0; i < pt.q.size(); ++i) {
      if (pt.states[i].rows() != din || pt.states[i].cols() != din ||
          !is_state(LabeledOperator(pt.in_space, pt.states[i]), state_tol))
        throw InvalidScenario("ensemble member is not a state on the pair's input");
      if (pt.povm[i].rows() != dout || pt.povm[i].cols() != dout ||
          min_eigenvalue(hermitian_part(pt.povm[i])) < -tol)
        throw InvalidScenario("POVM element is not positive on the pair's output");
      total += pt.povm[i];
    }
    if ((total - CMatrix::Identity(dout, dout)).cwiseAbs().maxCoeff() > tol)
      throw InvalidScenario("POVM elements do not sum to the identity");
  }
}

bool DiscriminationTask::strictly_positive(double tol) const {
  if (std::any_of(p.begin(), p.end(), [&](double v) { return v <= tol; })) return false;
  for (const auto& pt : pairs) {
    if (std::any_of(pt.q.begin(), pt.q.end(), [&](double v) { return v <= tol; })) return false;
    for (const auto& m : pt.povm)
      if (min_eigenvalue(hermitian_part(m)) <= tol) return false;
  }
  return true;
}

DiscriminationTask build_discrimination_task(const MarginalScenario& sc,
                                             const ChannelWitness& witness,
                                             const TaskOptions& task_opts,
                                             const CmpOptions& opts) {
  if (witness.null() || !(witness.margin() > 0.0))
    throw NoAdvantagePossible("no separating witness; the channels may be compatible");
  if (witness.terms.size() != sc.size())
    throw LabelMismatch("witness and scenario have different numbers of pairs");
  const std::size_t n = witness.length;
  const double nd = static_cast<double>(n);
  const double npairs = static_cast<double>(sc.size());

  // Shift every effect to be positive definite, then scale so that each
  // pair's effects sum strictly below the identity.
  std::vector<std::vector<CMatrix>> z(sc.size());
  double largest = 0.0;
  for (std::size_t k = 0; k < sc.size(); ++k) {
    const auto dx = static_cast<Eigen::Index>(sc.channels()[k].d_out());
    CMatrix sum = CMatrix::Zero(dx, dx);
    for (const auto& t : witness.terms[k]) {
      const double shift = -min_eigenvalue(hermitian_part(t.effect)) + task_opts.delta_pos;
      z[k].push_back(hermitian_part(t.effect) + shift * CMatrix::Identity(dx, dx));
      sum += z[k].back();
    }
    largest = std::max(largest, max_eigenvalue(sum));
  }
  const double kappa = (1.0 - task_opts.delta_pos) / largest;
  for (auto& zs : z)
    for (auto& m : zs) m *= kappa;

  // P~ collects the first N outcomes; Gamma is the part multiplied by eps.
  std::vector<std::vector<ProductTerm>> ptilde(sc.size());
  std::vector<std::vector<ProductTerm>> gamma(sc.size());
  std::vector<CMatrix> rest(sc.size());
  std::vector<CMatrix> eta(sc.size());
  for (std::size_t k = 0; k < sc.size(); ++k) {
    const QuantumChannel& ch = sc.channels()[k];
    const auto dx = static_cast<Eigen::Index>(ch.d_out());
    rest[k] = CMatrix::Identity(dx, dx);
    eta[k] = maximally_mixed(ch.d_in());
    for (std::size_t i = 0; i < n; ++i) {
      const CMatrix& rho = witness.terms[k][i].state;
      ptilde[k].push_back({z[k][i] / (nd * npairs), rho});
      gamma[k].push_back({-z[k][i] / (nd * npairs), rho});
      rest[k] -= z[k][i];
    }
    gamma[k].push_back({rest[k] / npairs, eta[k]});
  }

  auto value_and_max = [&](const std::vector<std::vector<ProductTerm>>& terms) {
    double value = 0.0;
    std::vector<LabeledOperator> ops;
    for (std::size_t k = 0; k < sc.size(); ++k) {
      value += evaluate_terms(terms[k], sc.channels()[k]);
      ops.push_back(reassemble(terms[k], sc.channels()[k]));
    }
    return std::pair{value, hermitian_max_over_compatible(sc, ops, opts)};
  };
  const auto [pt_value, pt_max] = value_and_max(ptilde);
  const double delta = pt_value - pt_max;
  if (!(delta > 0.0))
    throw NoAdvantagePossible("shifted witness lost its margin (" + std::to_string(delta) + ")");
  const auto [g_value, g_max] = value_and_max(gamma);
  const double delta_prime = g_max - g_value;

  double eps = delta_prime > 0.0 ? std::min(delta / delta_prime, 1.0) / 2.0 : 0.5;
  if (task_opts.epsilon) {
    eps = *task_opts.epsilon;
    if (!(eps > 0.0 && eps < 1.0)) throw Error("epsilon must lie strictly between 0 and 1");
  }

  DiscriminationTask task;
  task.epsilon = eps;
  task.p.assign(sc.size(), 1.0 / npairs);
  for (std::size_t k = 0; k < sc.size(); ++k) {
    const QuantumChannel& ch = sc.channels()[k];
    PairTask pt;
    pt.out_space = ch.out_space();
    pt.in_space = ch.in_space();
    for (std::size_t i = 0; i < n; ++i) {
      pt.q.push_back((1.0 - eps) / nd);
      pt.states.push_back(witness.terms[k][i].state);
      pt.povm.push_back(z[k][i]);
    }
    pt.q.push_back(eps);
    pt.states.push_back(eta[k]);
    pt.povm.push_back(rest[k]);
    task.pairs.push_back(std::move(pt));
  }
  return task;
}

double success_probability(const DiscriminationTask& task,
                           const std::vector<QuantumChannel>& channels) {
  if (channels.size() != task.pairs.size())
    throw LabelMismatch("one channel per task pair is required");
  double total = 0.0;
  for (std::size_t k = 0; k < channels.size(); ++k) {
    const PairTask& pt = task.pairs[k];
    check_fits(pt, channels[k]);
    for (std::size_t i = 0; i < pt.q.size(); ++i)
      total += task.p[k] * pt.q[i] * effect_on(pt.povm[i], channels[k], pt.states[i]);
  }
  return total;
}

double compatible_success_max(const DiscriminationTask& task, const MarginalScenario& sc,
                              const CmpOptions& opts) {
  if (sc.size() != task.pairs.size())
    throw LabelMismatch("task and scenario have different numbers of pairs");
  std::vector<LabeledOperator> ops;
  for (std::size_t k = 0; k < sc.size(); ++k) {
    const PairTask& pt = task.pairs[k];
    check_fits(pt, sc.channels()[k]);
    std::vector<ProductTerm> terms;
    for (std::size_t i = 0; i < pt.q.size(); ++i)
      terms.push_back({task.p[k] * pt.q[i] * pt.povm[i], pt.states[i]});
    ops.push_back(reassemble(terms, sc.channels()[k]));
  }
  return witness_max_over_compatible(sc, ops, opts);
}

}  // namespace choimarg
