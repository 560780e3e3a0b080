#include <doctest.h>

#include "choimarg/cmp_sdp.hpp"
#include "choimarg/errors.hpp"
#include "support.hpp"

using namespace choimarg;
namespace ts = testsupport;

namespace {

const LabeledSpace kS{{"A", 2}, {"B", 2}};
const LabeledSpace kSp{{"A'", 2}, {"B'", 2}};

std::vector<std::string> choi_labels(const QuantumChannel& ch) {
  auto l = ch.out_space().labels();
  for (const auto& s : ch.in_space().labels()) l.push_back(s);
  return l;
}

MarginalScenario identity_broadcast() {
  const LabeledSpace in{{"S'", 2}};
  return broadcast_scenario(
      {identity_channel(in, LabeledSpace{{"A", 2}}), identity_channel(in, LabeledSpace{{"B", 2}})});
}

// Broadcast of the Z and X measurements on one qubit.
MarginalScenario mub_broadcast() {
  const LabeledSpace in{{"S'", 2}};
  CMatrix plus = CMatrix::Constant(2, 2, 0.5);
  CMatrix minus = -plus;
  minus(0, 0) = minus(1, 1) = 0.5;
  return broadcast_scenario(
      {qc_channel_from_povm({ts::ket_bra(2, 0, 0), ts::ket_bra(2, 1, 1)}, in, "A"),
       qc_channel_from_povm({plus, minus}, in, "B")});
}

QuantumChannel random_channel(ts::Rng& rng, const LabeledSpace& in, const LabeledSpace& out, int rank) {
  return choi_from_kraus(rng.kraus(static_cast<Eigen::Index>(in.dim()),
                                   static_cast<Eigen::Index>(out.dim()), rank),
                         in, out);
}

}  // namespace

TEST_CASE("a single full pair is always compatible") {
  ts::Rng rng(61);
  const MarginalScenario sc(kS, kSp, {random_channel(rng, kSp, kS, 3)});
  const auto rep = robustness(sc);
  CHECK(std::abs(rep.R - 1.0) < 1e-6);
  CHECK(std::abs(dual_robustness(sc) - 1.0) < 1e-6);
}

TEST_CASE("non-overlapping pairs are compatible and the product channel is a solution") {
  ts::Rng rng(62);
  const auto a = random_channel(rng, LabeledSpace{{"A'", 2}}, LabeledSpace{{"A", 2}}, 2);
  const auto b = random_channel(rng, LabeledSpace{{"B'", 2}}, LabeledSpace{{"B", 2}}, 2);
  const MarginalScenario sc(kS, kSp, {a, b});
  CHECK(std::abs(robustness(sc).R - 1.0) < 1e-6);
  CHECK(is_compatible(sc));
  const auto g = feasibility_global(sc);
  REQUIRE(g.has_value());
  const double tol = 10.0 * ToleranceConfig{}.tol_eq;
  for (std::size_t k = 0; k < sc.size(); ++k) {
    const auto m = marginal_channel(*g, sc.pairs()[k]);
    REQUIRE(m.well_defined());
    const auto want = permute_factors(sc.channels()[k].choi(), choi_labels(*m.channel));
    CHECK(ts::max_abs(m.channel->choi().matrix() - want.matrix()) < tol);
  }
}

TEST_CASE("global solutions reproduce the marginals of a semi-causal scenario") {
  ts::Rng rng(63);
  // A|A' and AB|A'B' taken from a channel built in product form, so both are
  // marginals of it and the scenario is compatible.
  const auto a = random_channel(rng, LabeledSpace{{"A'", 2}}, LabeledSpace{{"A", 2}}, 2);
  const auto b = random_channel(rng, LabeledSpace{{"B'", 2}}, LabeledSpace{{"B", 2}}, 2);
  const MarginalScenario prod(kS, kSp, {a, b});
  const auto glob = feasibility_global(prod);
  REQUIRE(glob.has_value());
  const MarginalScenario sc(kS, kSp, {a, *glob});
  const auto g = feasibility_global(sc);
  REQUIRE(g.has_value());
  const double tol = 10.0 * ToleranceConfig{}.tol_eq;
  for (std::size_t k = 0; k < sc.size(); ++k) {
    const auto m = marginal_channel(*g, sc.pairs()[k]);
    REQUIRE(m.well_defined());
    const auto want = permute_factors(sc.channels()[k].choi(), choi_labels(*m.channel));
    CHECK(ts::max_abs(m.channel->choi().matrix() - want.matrix()) < tol);
  }
}

TEST_CASE("broadcast of constant channels is compatible") {
  ts::Rng rng(64);
  const LabeledSpace in{{"S'", 2}};
  const auto sc = broadcast_scenario(
      {constant_channel(LabeledOperator(LabeledSpace{{"A", 2}}, rng.state(2)), in),
       constant_channel(LabeledOperator(LabeledSpace{{"B", 2}}, rng.state(2)), in)});
  CHECK(std::abs(robustness(sc).R - 1.0) < 1e-6);
}

TEST_CASE("no-broadcasting and incompatible measurements") {
  for (const auto& sc : {identity_broadcast(), mub_broadcast()}) {
    const auto rep = robustness(sc);
    CHECK(rep.R < 1.0 - 1e-3);
    CHECK(std::abs(rep.R - dual_robustness(sc)) <= 1e-6);
    CHECK(rep.primal_dual_gap <= 1e-6);
    const auto cert = verify_witness(sc, rep.dual_witness);
    CHECK(cert.valid());
    CHECK(cert.margin > 1e-4);
  }
}

TEST_CASE("optimal marginals split into the target and a noise channel") {
  for (const auto& sc : {identity_broadcast(), mub_broadcast()}) {
    const auto rep = robustness(sc);
    REQUIRE(rep.noise_channels.size() == sc.size());
    for (std::size_t k = 0; k < sc.size(); ++k) {
      const auto& ch = sc.channels()[k];
      const auto red = reduce_to(rep.global_choi, choi_labels(ch));
      const auto noise = permute_factors(rep.noise_channels[k].choi(), choi_labels(ch));
      const CMatrix mix = rep.R * ch.choi().matrix() + (1.0 - rep.R) * noise.matrix();
      CHECK(ts::max_abs(red.matrix() - mix) <= 1e-6);
    }
    // the global state is feasible at the reported lambda
    CHECK(primal_residuals(sc, rep.global_choi, rep.R).worst() <= 1e-6);
  }
}

TEST_CASE("robustness does not decrease under depolarizing noise") {
  for (const auto& sc : {identity_broadcast(), mub_broadcast()}) {
    const double r0 = robustness(sc).R;
    for (double p : {0.25, 0.5, 0.75}) {
      std::vector<QuantumChannel> noisy;
      for (const auto& ch : sc.channels())
        noisy.push_back(mix(ch, completely_depolarizing(ch.in_space(), ch.out_space()), p));
      CHECK(robustness(sc.with_channels(noisy)).R >= r0 - 1e-6);
    }
  }
}

TEST_CASE("witness checks on trivial operators") {
  const auto sc = identity_broadcast();
  std::vector<LabeledOperator> ids, zeros;
  for (const auto& ch : sc.channels()) {
    const auto space = ch.out_space().concat(ch.in_space());
    ids.push_back(LabeledOperator::identity(space));
    zeros.push_back(LabeledOperator::zero(space));
  }
  CHECK(std::abs(witness_max_over_compatible(sc, ids) - 2.0) < 1e-6);
  CHECK(std::abs(witness_value(sc, ids) - 2.0) < 1e-12);
  CHECK(std::abs(verify_witness(sc, zeros).margin) < 1e-7);

  std::vector<LabeledOperator> bad = ids;
  bad[0] = bad[0] * cplx(-1.0);
  CHECK_THROWS_AS(witness_max_over_compatible(sc, bad), InvalidWitness);
}

TEST_CASE("a compatible scenario admits no separating positive witness") {
  ts::Rng rng(65);
  const auto a = random_channel(rng, LabeledSpace{{"A'", 2}}, LabeledSpace{{"A", 2}}, 2);
  const auto b = random_channel(rng, LabeledSpace{{"B'", 2}}, LabeledSpace{{"B", 2}}, 2);
  const MarginalScenario sc(kS, kSp, {a, b});
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<LabeledOperator> h;
    for (const auto& ch : sc.channels()) {
      const CMatrix g = rng.gaussian(4, 4);
      h.emplace_back(ch.out_space().concat(ch.in_space()), g * g.adjoint());
    }
    CHECK(verify_witness(sc, h).margin <= 1e-6);
  }
}

TEST_CASE("CNOT-ancilla witness from the scaled Choi states") {
  const MarginalScenario sc({{"A", 2}, {"B", 2}, {"C", 2}}, {{"A'", 2}, {"B'", 2}, {"C'", 2}},
                            {cnot_ancilla_channel("A"), cnot_ancilla_channel("C")});
  std::vector<LabeledOperator> h;
  for (const auto& ch : sc.channels()) h.push_back(ch.choi() * cplx(2.0));
  CHECK(std::abs(witness_value(sc, h) - 2.0) < 1e-12);
  CHECK(witness_max_over_compatible(sc, h) < 2.0 - 1e-3);
}

TEST_CASE("block size cap") {
  CmpOptions opts;
  opts.max_dim = 8;
  CHECK_THROWS_AS(build_primal(MarginalScenario(kS, kSp, {identity_channel(kSp, kS)}), opts),
                  CapacityExceeded);
}
