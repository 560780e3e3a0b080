#include <doctest.h>

#include "choimarg/errors.hpp"
#include "choimarg/marginals.hpp"
#include "support.hpp"

using namespace choimarg;
namespace ts = testsupport;

namespace {

const LabeledSpace kIn{{"A'", 2}, {"B'", 2}};
const LabeledSpace kOut{{"A", 2}, {"B", 2}};

std::vector<CMatrix> product_kraus(const std::vector<CMatrix>& a, const std::vector<CMatrix>& b) {
  std::vector<CMatrix> ks;
  for (const auto& x : a)
    for (const auto& y : b) ks.push_back(ts::kron(x, y));
  return ks;
}

// A channel A'B' -> AB that cannot signal from B' to A: F maps A' to A and a
// memory R, then E maps R and B' to B. Also returns Kraus operators of the
// induced A|A' channel.
struct SemiCausal {
  std::vector<CMatrix> global;
  std::vector<CMatrix> a_part;
};

SemiCausal semi_causal(ts::Rng& rng, int dr) {
  const auto f = rng.kraus(2, 2 * dr, 2);
  const auto e = rng.kraus(dr * 2, 2, dr + 1);
  SemiCausal sc;
  for (const auto& fi : f) {
    for (const auto& ej : e)
      sc.global.push_back(ts::kron(CMatrix::Identity(2, 2), ej) * ts::kron(fi, CMatrix::Identity(2, 2)));
    for (int r = 0; r < dr; ++r) {
      CMatrix bra = CMatrix::Zero(1, dr);
      bra(0, r) = 1.0;
      sc.a_part.push_back(ts::kron(CMatrix::Identity(2, 2), bra) * fi);
    }
  }
  return sc;
}

QuantumChannel prep(const std::string& out, const std::string& in, int k) {
  return constant_channel(LabeledOperator(LabeledSpace{{out, 2}}, ts::ket_bra(2, k, k)),
                          LabeledSpace{{in, 2}});
}

}  // namespace

TEST_CASE("marginal of a product channel is its factor") {
  ts::Rng rng(41);
  const auto ka = rng.kraus(2, 2, 2);
  const auto kb = rng.kraus(2, 2, 3);
  const auto global = choi_from_kraus(product_kraus(ka, kb), kIn, kOut);
  const auto m = marginal_channel(global, {{"A"}, {"A'"}});
  REQUIRE(m.well_defined());
  CHECK(m.residual < 1e-12);
  CHECK(ts::max_abs(m.channel->choi().matrix() - ts::choi_of_kraus(ka)) < 1e-12);
  CHECK(m.channel->out_space().labels() == std::vector<std::string>{"A"});

  const auto full = marginal_channel(global, {{"A", "B"}, {"A'", "B'"}});
  REQUIRE(full.well_defined());
  CHECK(ts::max_abs(full.channel->choi().matrix() - global.choi().matrix()) < 1e-14);
}

TEST_CASE("SWAP signals, so its one-party marginal is not defined") {
  CMatrix swap = CMatrix::Zero(4, 4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) swap(b * 2 + a, a * 2 + b) = 1.0;
  const auto global = choi_from_kraus({swap}, kIn, kOut);
  const auto m = marginal_channel(global, {{"A"}, {"A'"}});
  CHECK_FALSE(m.well_defined());
  // T = tr_B J = |Psi+><Psi+|_{A B'} / 2 (x) I_{A'}/2 in oracle terms
  const CMatrix j = global.choi().matrix();
  const CMatrix t = ts::partial_trace(j, {2, 2, 2, 2}, {true, false, true, true});
  const CMatrix tx = ts::partial_trace(t, {2, 2, 2}, {true, true, false});
  const CMatrix fact = ts::kron(tx, CMatrix::Identity(2, 2) / 2.0);
  CHECK(std::abs(m.residual - (t - fact).norm()) < 1e-12);
  CHECK(m.residual > m.threshold);
  CHECK_FALSE(is_no_signaling(global, {{"A"}, {"A'"}}));
  CHECK_THROWS_AS(marginal_channel(global, {{"Z"}, {"A'"}}), LabelMismatch);
}

TEST_CASE("marginal existence matches no-signaling and recovers the A part") {
  ts::Rng rng(42);
  for (int trial = 0; trial < 40; ++trial) {
    const bool causal = trial % 2 == 0;
    std::vector<CMatrix> global_k;
    std::vector<CMatrix> a_part;
    if (causal) {
      auto sc = semi_causal(rng, 1 + trial % 3);
      global_k = sc.global;
      a_part = sc.a_part;
    } else {
      global_k = rng.kraus(4, 4, 2);
    }
    const auto global = choi_from_kraus(global_k, kIn, kOut);
    const OutputInputPair pair{{"A"}, {"A'"}};
    const auto m = marginal_channel(global, pair);
    CHECK(m.well_defined() == is_no_signaling(global, pair));
    CHECK(m.well_defined() == causal);
    if (causal && m.well_defined()) {
      CHECK(ts::max_abs(m.channel->choi().matrix() - ts::choi_of_kraus(a_part)) < 1e-10);
      // defining property on random inputs
      const CMatrix rho = rng.state(4);
      const CMatrix lhs = ts::apply_kraus(a_part, ts::partial_trace(rho, {2, 2}, {true, false}));
      const CMatrix rhs = ts::partial_trace(ts::apply_kraus(global_k, rho), {2, 2}, {true, false});
      CHECK(ts::max_abs(lhs - rhs) < 1e-10);
    }
    CHECK(std::abs(signaling_residual(global, pair) - m.residual) < 1e-15);
  }
}

TEST_CASE("local compatibility of known pairs") {
  const LabeledSpace out{{"A", 2}, {"B", 2}, {"C", 2}};
  const LabeledSpace in{{"A'", 2}, {"B'", 2}, {"C'", 2}};
  CHECK(local_compatibility_check({out, in, {cnot_ancilla_channel("A"), cnot_ancilla_channel("C")}})
            .compatible());
  CHECK(local_compatibility_check({out, in, {swap_prepare_channel("A"), swap_prepare_channel("C")}})
            .compatible());

  // |0> on B against |1> on B (with an identity on C)
  const auto bc = choi_from_kraus({ts::kron(ts::ket_bra(2, 1, 0), CMatrix::Identity(2, 2)),
                                   ts::kron(ts::ket_bra(2, 1, 1), CMatrix::Identity(2, 2))},
                                  LabeledSpace{{"B'", 2}, {"C'", 2}}, LabeledSpace{{"B", 2}, {"C", 2}});
  const MarginalScenario clash(out.without({"A"}), in.without({"A'"}), {prep("B", "B'", 0), bc});
  const auto rep = local_compatibility_check(clash);
  REQUIRE(rep.failures.size() == 1);
  CHECK(std::abs(rep.failures[0].residual - 1.0) < 1e-12);
}

TEST_CASE("marginals of a semi-causal global channel are locally compatible") {
  ts::Rng rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    // both A|A' and AB|A'B' are well defined for a semi-causal channel
    const auto global = choi_from_kraus(semi_causal(rng, 2).global, kIn, kOut);
    const auto a = marginal_channel(global, {{"A"}, {"A'"}});
    REQUIRE(a.well_defined());
    const MarginalScenario sc(kOut, kIn, {*a.channel, global});
    CHECK(local_compatibility_check(sc).compatible());
  }
}

TEST_CASE("scenario validation") {
  const auto a = prep("A", "A'", 0);
  CHECK_THROWS_AS(MarginalScenario(LabeledSpace{{"B", 2}}, LabeledSpace{{"A'", 2}}, {a}), InvalidScenario);
  CHECK_THROWS_AS(MarginalScenario(LabeledSpace{{"A", 3}}, LabeledSpace{{"A'", 2}}, {a}), InvalidScenario);
  CHECK_THROWS_AS(MarginalScenario(LabeledSpace{{"A", 2}}, LabeledSpace{{"A'", 2}}, {a, a}), InvalidScenario);
  CHECK_NOTHROW(MarginalScenario(LabeledSpace{{"A", 2}}, LabeledSpace{{"A'", 2}}, {a}));
}

TEST_CASE("broadcast and extendibility scenario shapes") {
  const LabeledSpace in{{"S'", 2}};
  const auto sc = broadcast_scenario({identity_channel(in, LabeledSpace{{"A", 2}}),
                                      identity_channel(in, LabeledSpace{{"B", 2}})});
  CHECK(sc.global_in().labels() == std::vector<std::string>{"S'"});
  CHECK(sc.global_out().labels() == std::vector<std::string>{"A", "B"});
  CHECK_THROWS_AS(broadcast_scenario({identity_channel(in, LabeledSpace{{"A", 2}}),
                                      identity_channel(LabeledSpace{{"T'", 2}}, LabeledSpace{{"B", 2}})}),
                  InvalidScenario);

  const auto ext = extendibility_scenario(isotropic_w_channel(0.5, "X"), "X", "X'", 3);
  CHECK(ext.size() == 3);
  CHECK(ext.global_out().labels() == std::vector<std::string>{"B", "X_1", "X_2", "X_3"});
  CHECK(ext.global_in().labels() == std::vector<std::string>{"B'", "X'_1", "X'_2", "X'_3"});
  CHECK(local_compatibility_check(ext).compatible());
  CHECK_THROWS_AS(extendibility_scenario(isotropic_w_channel(0.5, "X"), "X", "X'", 1), InvalidScenario);
}
