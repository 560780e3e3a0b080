#include <doctest.h>

#include "choimarg/channels.hpp"
#include "choimarg/errors.hpp"
#include "choimarg/marginals.hpp"
#include "support.hpp"

using namespace choimarg;
namespace ts = testsupport;

namespace {

LabeledSpace qubits(std::initializer_list<const char*> labels) {
  std::vector<Factor> fs;
  for (const char* l : labels) fs.push_back({l, 2});
  return LabeledSpace(fs);
}

CMatrix pauli(int k) {
  CMatrix m(2, 2);
  const cplx i(0.0, 1.0);
  if (k == 0) m << 1, 0, 0, 1;
  if (k == 1) m << 0, 1, 1, 0;
  if (k == 2) m << 0, -i, i, 0;
  if (k == 3) m << 1, 0, 0, -1;
  return m;
}

CMatrix psi_plus() {
  CMatrix m = CMatrix::Zero(4, 4);
  m(0, 0) = m(0, 3) = m(3, 0) = m(3, 3) = 0.5;
  return m;
}

double input_marginal_error(const QuantumChannel& ch) {
  const int dout = static_cast<int>(ch.d_out());
  const int din = static_cast<int>(ch.d_in());
  const CMatrix red = ts::partial_trace(ch.choi().matrix(), {dout, din}, {false, true});
  return ts::max_abs(red - CMatrix::Identity(din, din) / din);
}

// |a, b> -> |a xor b, b> on (A, B): B controls, A is the target.
CMatrix cnot_b_controls_a() {
  CMatrix u = CMatrix::Zero(4, 4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) u(((a ^ b) << 1) | b, (a << 1) | b) = 1.0;
  return u;
}

}  // namespace

TEST_CASE("choi_from_kraus on elementary channels") {
  const auto in = qubits({"X'"});
  const auto out = qubits({"X"});
  const auto id = choi_from_kraus({CMatrix::Identity(2, 2)}, in, out);
  CHECK(ts::max_abs(id.choi().matrix() - psi_plus()) < 1e-15);

  const auto prep0 = choi_from_kraus({ts::ket_bra(2, 0, 0), ts::ket_bra(2, 0, 1)}, in, out);
  CHECK(ts::max_abs(prep0.choi().matrix() - ts::kron(ts::ket_bra(2, 0, 0), CMatrix::Identity(2, 2) / 2.0)) <
        1e-15);

  const auto flip = choi_from_kraus({pauli(1)}, in, out);
  const CMatrix u = ts::kron(pauli(1), CMatrix::Identity(2, 2));
  CHECK(ts::max_abs(flip.choi().matrix() - u * psi_plus() * u.adjoint()) < 1e-15);
}

TEST_CASE("Choi round trip on random Kraus channels") {
  ts::Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const int din = 2 + trial % 2;
    const int dout = 2 + (trial / 2) % 3;
    const auto ks = rng.kraus(din, dout, 1 + trial % 4);
    const LabeledSpace in{{"I", static_cast<std::size_t>(din)}};
    const LabeledSpace out{{"O", static_cast<std::size_t>(dout)}};
    const auto ch = choi_from_kraus(ks, in, out);
    CHECK(ts::max_abs(ch.choi().matrix() - ts::choi_of_kraus(ks)) < 1e-12);
    const CMatrix rho = rng.state(din);
    CHECK(ts::max_abs(apply(ch, LabeledOperator(in, rho)).matrix() - ts::apply_kraus(ks, rho)) < 1e-10);
  }
}

TEST_CASE("apply handles inputs listed in another factor order") {
  ts::Rng rng(32);
  const auto ks = rng.kraus(4, 2, 3);
  const auto in = LabeledSpace{{"P", 2}, {"Q", 2}};
  const auto ch = choi_from_kraus(ks, in, LabeledSpace{{"O", 2}});
  const CMatrix rho = rng.state(4);
  const auto swapped = LabeledOperator(LabeledSpace{{"Q", 2}, {"P", 2}}, ts::permute(rho, {2, 2}, {1, 0}));
  CHECK(ts::max_abs(apply(ch, swapped).matrix() - ts::apply_kraus(ks, rho)) < 1e-10);
}

TEST_CASE("apply_partial acts as E (x) id") {
  ts::Rng rng(33);
  const auto ks = rng.kraus(2, 3, 2);
  const auto ch = choi_from_kraus(ks, qubits({"X'"}), LabeledSpace{{"X", 3}});
  const CMatrix rho = rng.state(4);
  const auto out = apply_partial(ch, LabeledOperator(qubits({"X'", "R"}), rho));
  CHECK(out.row_space().labels() == std::vector<std::string>{"X", "R"});
  std::vector<CMatrix> ext;
  for (const auto& k : ks) ext.push_back(ts::kron(k, CMatrix::Identity(2, 2)));
  CHECK(ts::max_abs(out.matrix() - ts::apply_kraus(ext, rho)) < 1e-12);
}

TEST_CASE("identity, preparation and depolarizing channels") {
  ts::Rng rng(34);
  const auto in = qubits({"X'"});
  const auto out = qubits({"X"});
  const CMatrix rho = rng.state(2);
  CHECK(ts::max_abs(apply(identity_channel(in, out), LabeledOperator(in, rho)).matrix() - rho) < 1e-14);
  const auto prep = constant_channel(LabeledOperator(out, ts::ket_bra(2, 0, 0)), in);
  CHECK(ts::max_abs(apply(prep, LabeledOperator(in, rho)).matrix() - ts::ket_bra(2, 0, 0)) < 1e-14);

  for (double p : {0.0, 0.5, 1.0}) {
    std::vector<CMatrix> ks{std::sqrt(p + (1.0 - p) / 4.0) * pauli(0)};
    for (int k = 1; k < 4; ++k) ks.push_back(std::sqrt((1.0 - p) / 4.0) * pauli(k));
    const auto dep = depolarizing(in, out, p);
    const CMatrix zero = ts::ket_bra(2, 0, 0);
    const CMatrix got = apply(dep, LabeledOperator(in, zero)).matrix();
    CHECK(ts::max_abs(got - ts::apply_kraus(ks, zero)) < 1e-14);
    CHECK(ts::max_abs(got - (p * zero + (1.0 - p) * CMatrix::Identity(2, 2) / 2.0)) < 1e-14);
  }
}

TEST_CASE("validation rejects non-positive or non-normalized Choi matrices") {
  const auto in = qubits({"X'"});
  const auto out = qubits({"X"});
  CHECK_NOTHROW(QuantumChannel(in, out, psi_plus()));
  CHECK_THROWS_AS(QuantumChannel(in, out, psi_plus() * 1.01), InvalidChannel);
  CMatrix nonpsd = CMatrix::Identity(4, 4) / 4.0;
  nonpsd(0, 3) = nonpsd(3, 0) = 0.3;
  CHECK_THROWS_AS(QuantumChannel(in, out, nonpsd), InvalidChannel);
  CHECK_THROWS_AS(QuantumChannel(in, out, CMatrix::Identity(3, 3)), ShapeError);
  CHECK_THROWS_AS(QuantumChannel(in, in, CMatrix::Identity(4, 4) / 4.0), LabelCollision);
  // within tolerance
  CHECK_NOTHROW(QuantumChannel(in, out, psi_plus() + 1e-11 * CMatrix::Identity(4, 4)));
}

TEST_CASE("named constructors satisfy the input-marginal condition") {
  CVector ghz = CVector::Zero(8);
  ghz(0) = ghz(7) = 1.0 / std::sqrt(2.0);
  const std::vector<QuantumChannel> chans{
      cnot_ancilla_channel("A"), swap_prepare_channel("C"), ghz_marginal_channel(ghz, "A"),
      isotropic_w_channel(0.4, "X"), cloning_channel(),
      completely_depolarizing(qubits({"X'"}), LabeledSpace{{"X", 3}}),
      depolarizing(qubits({"X'"}), qubits({"X"}), 0.3)};
  for (const auto& ch : chans) {
    CHECK(input_marginal_error(ch) < 1e-10);
    CHECK(min_eigenvalue(ch.choi().matrix()) > -1e-10);
  }
}

TEST_CASE("CNOT-ancilla channel") {
  const auto m = cnot_ancilla_channel("A");
  CHECK(m.out_space().labels() == std::vector<std::string>{"A", "B"});
  CHECK(m.in_space().labels() == std::vector<std::string>{"A'", "B'"});

  // GHZ on (A, B, B') times I/2 on A', rearranged to (A, B, A', B')
  CVector ghz = CVector::Zero(8);
  ghz(0) = ghz(7) = 1.0 / std::sqrt(2.0);
  const CMatrix abb = ghz * ghz.adjoint();
  const CMatrix expect = ts::permute(ts::kron(abb, CMatrix::Identity(2, 2) / 2.0), {2, 2, 2, 2}, {0, 1, 3, 2});
  CHECK(ts::max_abs(m.choi().matrix() - expect) < 1e-15);

  ts::Rng rng(35);
  const CMatrix u = cnot_b_controls_a();
  for (int trial = 0; trial < 5; ++trial) {
    const CMatrix rho = rng.state(4);
    const CMatrix rho_b = ts::partial_trace(rho, {2, 2}, {false, true});
    const CMatrix sim = u * ts::kron(ts::ket_bra(2, 0, 0), rho_b) * u.adjoint();
    CHECK(ts::max_abs(apply(m, LabeledOperator(m.in_space(), rho)).matrix() - sim) < 1e-12);
  }
  const auto in00 = LabeledOperator(m.in_space(), ts::kron(rng.state(2), ts::ket_bra(2, 0, 0)));
  CHECK(ts::max_abs(apply(m, in00).matrix() - ts::ket_bra(4, 0, 0)) < 1e-12);

  // the B|B' marginals of the A and C versions coincide
  const auto mb = marginal_channel(m, {{"B"}, {"B'"}});
  const auto mc = marginal_channel(cnot_ancilla_channel("C"), {{"B"}, {"B'"}});
  REQUIRE(mb.well_defined());
  REQUIRE(mc.well_defined());
  CHECK(ts::max_abs(mb.channel->choi().matrix() - mc.channel->choi().matrix()) < 1e-14);
}

TEST_CASE("SWAP-prepare channel") {
  const auto k = swap_prepare_channel("A");
  ts::Rng rng(36);
  for (int trial = 0; trial < 5; ++trial) {
    const CMatrix rho = rng.state(4);
    const CMatrix rho_b = ts::partial_trace(rho, {2, 2}, {false, true});
    const CMatrix expect = ts::kron(rho_b, ts::ket_bra(2, 0, 0));
    CHECK(ts::max_abs(apply(k, LabeledOperator(k.in_space(), rho)).matrix() - expect) < 1e-12);
  }
  const auto kb = marginal_channel(k, {{"B"}, {"B'"}});
  REQUIRE(kb.well_defined());
  const CMatrix rho = rng.state(2);
  CHECK(ts::max_abs(apply(*kb.channel, LabeledOperator(qubits({"B'"}), rho)).matrix() -
                    ts::ket_bra(2, 0, 0)) < 1e-12);
  // the isotropic family at p = 1 is this channel
  CHECK(ts::max_abs(isotropic_w_channel(1.0, "A").choi().matrix() - k.choi().matrix()) < 1e-14);
}

TEST_CASE("universal cloner gives clones of fidelity 5/6") {
  const auto cl = cloning_channel();
  CHECK(cl.out_space().labels() == std::vector<std::string>{"A", "C"});
  // symmetric projector on two qubits
  CMatrix sw = CMatrix::Zero(4, 4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) sw(b * 2 + a, a * 2 + b) = 1.0;
  const CMatrix psym = (CMatrix::Identity(4, 4) + sw) / 2.0;
  ts::Rng rng(37);
  for (int trial = 0; trial < 6; ++trial) {
    CVector v = trial == 0 ? CVector(CVector::Unit(2, 0)) : CVector(rng.gaussian(2, 1));
    v.normalize();
    const CMatrix psi = v * v.adjoint();
    const CMatrix out = apply(cl, LabeledOperator(qubits({"X"}), psi)).matrix();
    const CMatrix expect = (2.0 / 3.0) * psym * ts::kron(psi, CMatrix::Identity(2, 2)) * psym;
    CHECK(ts::max_abs(out - expect) < 1e-12);
    for (bool keep_a : {true, false}) {
      const CMatrix clone = ts::partial_trace(out, {2, 2}, {keep_a, !keep_a});
      CHECK(std::abs((v.adjoint() * clone * v)(0, 0).real() - 5.0 / 6.0) < 1e-12);
    }
  }
}

TEST_CASE("measure-and-prepare channels from POVMs") {
  ts::Rng rng(38);
  const auto in = qubits({"X'"});
  const CMatrix rho = rng.state(2);
  const auto deph = qc_channel_from_povm({ts::ket_bra(2, 0, 0), ts::ket_bra(2, 1, 1)}, in, "X");
  CHECK(ts::max_abs(apply(deph, LabeledOperator(in, rho)).matrix() -
                    CMatrix(rho.diagonal().asDiagonal())) < 1e-14);
  const CMatrix half = CMatrix::Identity(2, 2) / 2.0;
  const auto flat = qc_channel_from_povm({half, half}, in, "X");
  CHECK(ts::max_abs(apply(flat, LabeledOperator(in, rho)).matrix() - half) < 1e-14);
  CHECK_THROWS_AS(qc_channel_from_povm({half, half * 0.5}, in, "X"), InvalidChannel);
}

TEST_CASE("mix and relabel") {
  const auto in = qubits({"X'"});
  const auto out = qubits({"X"});
  const auto a = identity_channel(in, out);
  const auto b = completely_depolarizing(in, out);
  const auto m = mix(a, b, 0.25);
  CHECK(ts::max_abs(m.choi().matrix() - (0.25 * a.choi().matrix() + 0.75 * b.choi().matrix())) < 1e-15);
  CHECK_THROWS_AS(mix(a, identity_channel(in, qubits({"Y"})), 0.5), LabelMismatch);
  const auto r = relabel(a, {{"X", "Y"}});
  CHECK(r.out_space().labels() == std::vector<std::string>{"Y"});
  CHECK(r.in_space().labels() == std::vector<std::string>{"X'"});
}

TEST_CASE("stochastic channels validate their columns") {
  const LabeledSpace x{{"X", 2}};
  const LabeledSpace a{{"A", 2}};
  Eigen::MatrixXd p(2, 2);
  p << 0.3, 1.0, 0.7, 0.0;
  CHECK_NOTHROW(StochasticChannel(x, a, p));
  p(0, 0) = 0.4;
  CHECK_THROWS_AS(StochasticChannel(x, a, p), InvalidChannel);
  p << -0.1, 1.0, 1.1, 0.0;
  CHECK_THROWS_AS(StochasticChannel(x, a, p), InvalidChannel);
}
