#include "choimarg/channels.hpp"

#include <cmath>
#include <unsupported/Eigen/KroneckerProduct>

#include "choimarg/errors.hpp"

namespace choimarg {

namespace {

LabeledSpace qubits(std::initializer_list<std::string> labels) {
  std::vector<Factor> fs;
  for (const auto& l : labels) fs.push_back({l, 2});
  return LabeledSpace(std::move(fs));
}

CMatrix projector(const CVector& v) { return v * v.adjoint(); }

CVector basis_vector(Eigen::Index dim, Eigen::Index k) {
  CVector v = CVector::Zero(dim);
  v(k) = 1.0;
  return v;
}

// Assembles a Choi matrix given as an operator on some ordering of the
// channel's factors and validates it.
QuantumChannel from_labeled(const LabeledOperator& op, const LabeledSpace& in,
                            const LabeledSpace& out) {
  std::vector<std::string> order = out.labels();
  for (const auto& l : in.labels()) order.push_back(l);
  return {in, out, permute_factors(op, order).matrix()};
}

}  // namespace

double channel_residual(const LabeledSpace& in_space, const LabeledSpace& out_space,
                        const CMatrix& choi) {
  const LabeledSpace joint = out_space.concat(in_space);
  const LabeledOperator j(joint, hermitian_part(choi));
  const double neg = std::max(0.0, -min_eigenvalue(j.matrix()));
  const LabeledOperator marg = reduce_to(j, in_space.labels());
  const double tp = (marg.matrix() - maximally_mixed(in_space.dim())).cwiseAbs().maxCoeff();
  return std::max(neg, tp);
}

QuantumChannel::QuantumChannel(LabeledSpace in_space, LabeledSpace out_space, CMatrix choi,
                               const ToleranceConfig& tol)
    : in_(std::move(in_space)), out_(std::move(out_space)) {
  choi_ = LabeledOperator(out_.concat(in_), std::move(choi));
  const CMatrix& m = choi_.matrix();
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol.tol_herm)
    throw InvalidChannel("Choi matrix is not Hermitian");
  if (min_eigenvalue(m) < -tol.tol_psd)
    throw InvalidChannel("Choi matrix is not positive semidefinite (min eigenvalue " +
                         std::to_string(min_eigenvalue(m)) + ")");
  const CMatrix marg = reduce_to(choi_, in_.labels()).matrix();
  const double err = (marg - maximally_mixed(in_.dim())).cwiseAbs().maxCoeff();
  if (err > tol.tol_eq)
    throw InvalidChannel("input marginal of the Choi matrix differs from I/d by " +
                         std::to_string(err));
}

QuantumChannel choi_from_kraus(const std::vector<CMatrix>& kraus, const LabeledSpace& in_space,
                               const LabeledSpace& out_space, const ToleranceConfig& tol) {
  const auto din = static_cast<Eigen::Index>(in_space.dim());
  const auto dout = static_cast<Eigen::Index>(out_space.dim());
  if (kraus.empty()) throw InvalidChannel("empty Kraus set");
  CMatrix completeness = CMatrix::Zero(din, din);
  CMatrix choi = CMatrix::Zero(dout * din, dout * din);
  for (const auto& k : kraus) {
    if (k.rows() != dout || k.cols() != din) throw ShapeError("Kraus operator has wrong shape");
    completeness += k.adjoint() * k;
    // (K (x) I)|Psi+> has amplitude K(o, i)/sqrt(d) at index (o, i).
    CVector v(dout * din);
    for (Eigen::Index o = 0; o < dout; ++o)
      for (Eigen::Index i = 0; i < din; ++i) v(o * din + i) = k(o, i);
    choi += v * v.adjoint();
  }
  const double err = (completeness - CMatrix::Identity(din, din)).cwiseAbs().maxCoeff();
  if (err > tol.tol_eq) throw InvalidChannel("Kraus operators are not trace preserving");
  return {in_space, out_space, choi / static_cast<double>(din), tol};
}

LabeledOperator apply_partial(const QuantumChannel& ch, const LabeledOperator& rho) {
  if (!rho.is_square()) throw ShapeError("apply: input operator is not square");
  const LabeledSpace& space = rho.row_space();
  for (const auto& f : ch.in_space().factors()) {
    if (!space.contains(f.label))
      throw LabelMismatch("input is missing channel input '" + f.label + "'");
    if (space.dim_of(f.label) != f.dim)
      throw LabelMismatch("input factor '" + f.label + "' has the wrong dimension");
  }
  const LabeledSpace rest = space.without(ch.in_space().labels());
  std::vector<std::string> order = ch.in_space().labels();
  for (const auto& l : rest.labels()) order.push_back(l);
  const CMatrix r = permute_factors(rho, order).matrix();

  // result = d_in sum_{i,i'} J[(.,i),(.,i')] (x) rho[(i,.),(i',.)]
  const auto din = static_cast<Eigen::Index>(ch.d_in());
  const auto dout = static_cast<Eigen::Index>(ch.d_out());
  const auto dr = static_cast<Eigen::Index>(rest.dim());
  const CMatrix& j = ch.choi().matrix();
  CMatrix out = CMatrix::Zero(dout * dr, dout * dr);
  CMatrix jblock(dout, dout);
  for (Eigen::Index i = 0; i < din; ++i) {
    for (Eigen::Index ip = 0; ip < din; ++ip) {
      for (Eigen::Index o = 0; o < dout; ++o)
        for (Eigen::Index op = 0; op < dout; ++op) jblock(o, op) = j(o * din + i, op * din + ip);
      const auto rblock = r.block(i * dr, ip * dr, dr, dr);
      for (Eigen::Index o = 0; o < dout; ++o)
        for (Eigen::Index op = 0; op < dout; ++op)
          out.block(o * dr, op * dr, dr, dr) += jblock(o, op) * rblock;
    }
  }
  out *= static_cast<double>(din);
  return {ch.out_space().concat(rest), std::move(out)};
}

LabeledOperator apply(const QuantumChannel& ch, const LabeledOperator& rho) {
  if (!rho.row_space().same_factors(ch.in_space()))
    throw LabelMismatch("state space does not match the channel input");
  return apply_partial(ch, rho);
}

QuantumChannel identity_channel(const LabeledSpace& in_space, const LabeledSpace& out_space) {
  if (in_space.num_factors() != out_space.num_factors())
    throw LabelMismatch("identity channel needs matching factor lists");
  for (std::size_t k = 0; k < in_space.num_factors(); ++k)
    if (in_space.factors()[k].dim != out_space.factors()[k].dim)
      throw LabelMismatch("identity channel needs matching factor dimensions");
  const auto d = static_cast<Eigen::Index>(in_space.dim());
  CVector v = CVector::Zero(d * d);
  for (Eigen::Index i = 0; i < d; ++i) v(i * d + i) = 1.0;
  return {in_space, out_space, projector(v) / static_cast<double>(d)};
}

QuantumChannel completely_depolarizing(const LabeledSpace& in_space,
                                       const LabeledSpace& out_space) {
  const auto d = static_cast<Eigen::Index>(in_space.dim() * out_space.dim());
  return {in_space, out_space, CMatrix::Identity(d, d) / static_cast<double>(d)};
}

QuantumChannel constant_channel(const LabeledOperator& sigma, const LabeledSpace& in_space) {
  const auto din = static_cast<Eigen::Index>(in_space.dim());
  CMatrix choi = Eigen::kroneckerProduct(sigma.matrix(), CMatrix::Identity(din, din)).eval();
  return {in_space, sigma.row_space(), choi / static_cast<double>(din)};
}

QuantumChannel depolarizing(const LabeledSpace& in_space, const LabeledSpace& out_space,
                            double p) {
  return mix(identity_channel(in_space, out_space), completely_depolarizing(in_space, out_space),
             p);
}

QuantumChannel mix(const QuantumChannel& a, const QuantumChannel& b, double p) {
  if (!(a.in_space() == b.in_space() && a.out_space() == b.out_space()))
    throw LabelMismatch("cannot mix channels on different spaces");
  return {a.in_space(), a.out_space(), p * a.choi().matrix() + (1.0 - p) * b.choi().matrix()};
}

QuantumChannel relabel(const QuantumChannel& ch,
                       const std::vector<std::pair<std::string, std::string>>& rename) {
  auto convert = [&](const LabeledSpace& space) {
    std::vector<Factor> fs = space.factors();
    for (auto& f : fs)
      for (const auto& [from, to] : rename)
        if (f.label == from) {
          f.label = to;
          break;
        }
    return LabeledSpace(std::move(fs));
  };
  return {convert(ch.in_space()), convert(ch.out_space()), ch.choi().matrix()};
}

QuantumChannel cnot_ancilla_channel(const std::string& x_label) {
  const std::string xp = x_label + "'";
  CVector ghz = CVector::Zero(8);
  ghz(0) = ghz(7) = 1.0 / std::sqrt(2.0);
  const LabeledOperator op = kron_compose(LabeledOperator(qubits({x_label, "B", "B'"}), projector(ghz)),
                                          LabeledOperator(qubits({xp}), maximally_mixed(2)));
  return from_labeled(op, qubits({xp, "B'"}), qubits({x_label, "B"}));
}

QuantumChannel swap_prepare_channel(const std::string& x_label) {
  const std::string xp = x_label + "'";
  CVector psi = CVector::Zero(4);
  psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
  const LabeledOperator op = kron_compose(
      kron_compose(LabeledOperator(qubits({x_label, "B'"}), projector(psi)),
                   LabeledOperator(qubits({"B"}), projector(basis_vector(2, 0)))),
      LabeledOperator(qubits({xp}), maximally_mixed(2)));
  return from_labeled(op, qubits({xp, "B'"}), qubits({x_label, "B"}));
}

QuantumChannel ghz_marginal_channel(const CVector& phi, const std::string& x_label) {
  if (phi.size() != 8) throw ShapeError("phi must be a three-qubit vector");
  if (std::abs(phi.norm() - 1.0) > 1e-9) throw InvalidChannel("phi is not normalized");
  const LabeledOperator state(qubits({x_label, "B", "B'"}), projector(phi));
  const CMatrix marg = reduce_to(state, {"B'"}).matrix();
  if ((marg - maximally_mixed(2)).cwiseAbs().maxCoeff() > ToleranceConfig{}.tol_eq)
    throw InvalidChannel("phi does not have a maximally mixed B' marginal");
  const std::string xp = x_label + "'";
  const LabeledOperator op = kron_compose(state, LabeledOperator(qubits({xp}), maximally_mixed(2)));
  return from_labeled(op, qubits({xp, "B'"}), qubits({x_label, "B"}));
}

QuantumChannel w_channel(const CMatrix& omega, const CMatrix& sigma, const std::string& x_label) {
  if (omega.rows() != 4 || omega.cols() != 4 || sigma.rows() != 2 || sigma.cols() != 2)
    throw ShapeError("w_channel expects a two-qubit omega and a qubit sigma");
  const LabeledOperator om(qubits({x_label, "B'"}), omega);
  const ToleranceConfig tol;
  if (!is_state(om, tol) || !is_state(LabeledOperator(qubits({"B"}), sigma), tol))
    throw InvalidChannel("omega and sigma must be states");
  if ((reduce_to(om, {"B'"}).matrix() - maximally_mixed(2)).cwiseAbs().maxCoeff() > tol.tol_eq)
    throw InvalidChannel("omega does not have a maximally mixed B' marginal");
  const std::string xp = x_label + "'";
  const LabeledOperator op =
      kron_compose(kron_compose(LabeledOperator(qubits({"B"}), sigma), om),
                   LabeledOperator(qubits({xp}), maximally_mixed(2)));
  return from_labeled(op, qubits({xp, "B'"}), qubits({x_label, "B"}));
}

QuantumChannel isotropic_w_channel(double p, const std::string& x_label) {
  if (p < 0.0 || p > 1.0) throw InvalidChannel("isotropic weight must lie in [0, 1]");
  CVector psi = CVector::Zero(4);
  psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
  const CMatrix omega = p * projector(psi) + (1.0 - p) * maximally_mixed(4);
  return w_channel(omega, projector(basis_vector(2, 0)), x_label);
}

QuantumChannel cloning_channel() {
  // Isometry columns in the (A, C, M) basis, index a*4 + c*2 + m.
  const double a = std::sqrt(2.0 / 3.0);
  const double b = std::sqrt(1.0 / 6.0);
  CMatrix v = CMatrix::Zero(8, 2);
  v(1, 0) = a;
  v(4, 0) = -b;
  v(2, 0) = -b;
  v(6, 1) = -a;
  v(5, 1) = b;
  v(3, 1) = b;
  std::vector<CMatrix> kraus;
  for (Eigen::Index m = 0; m < 2; ++m) {
    CMatrix k(4, 2);
    for (Eigen::Index ac = 0; ac < 4; ++ac) k.row(ac) = v.row(ac * 2 + m);
    kraus.push_back(k);
  }
  return choi_from_kraus(kraus, qubits({"X"}), qubits({"A", "C"}));
}

QuantumChannel qc_channel_from_povm(const std::vector<CMatrix>& povm,
                                    const LabeledSpace& in_space, const std::string& out_label,
                                    const ToleranceConfig& tol) {
  if (povm.empty()) throw InvalidChannel("empty POVM");
  const auto d = static_cast<Eigen::Index>(in_space.dim());
  const auto n = static_cast<Eigen::Index>(povm.size());
  CMatrix total = CMatrix::Zero(d, d);
  CMatrix choi = CMatrix::Zero(n * d, n * d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const CMatrix& m = povm[i];
    if (m.rows() != d || m.cols() != d) throw ShapeError("POVM element has wrong shape");
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol.tol_herm || min_eigenvalue(m) < -tol.tol_psd)
      throw InvalidChannel("POVM element is not positive semidefinite");
    total += m;
    choi.block(i * d, i * d, d, d) = m.transpose() / static_cast<double>(d);
  }
  if ((total - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > tol.tol_eq)
    throw InvalidChannel("POVM elements do not sum to the identity");
  return {in_space, LabeledSpace{{out_label, povm.size()}}, choi, tol};
}

StochasticChannel::StochasticChannel(LabeledSpace in, LabeledSpace out, Eigen::MatrixXd p,
                                     double tol_eq)
    : in_(std::move(in)), out_(std::move(out)), p_(std::move(p)) {
  if (static_cast<std::size_t>(p_.rows()) != out_.dim() ||
      static_cast<std::size_t>(p_.cols()) != in_.dim())
    throw ShapeError("stochastic matrix shape does not match the alphabets");
  if (p_.size() > 0 && (p_.minCoeff() < -tol_eq || p_.maxCoeff() > 1.0 + tol_eq))
    throw InvalidChannel("probabilities must lie in [0, 1]");
  for (Eigen::Index c = 0; c < p_.cols(); ++c)
    if (std::abs(p_.col(c).sum() - 1.0) > tol_eq)
      throw InvalidChannel("column " + std::to_string(c) + " does not sum to 1");
}

}  // namespace choimarg
