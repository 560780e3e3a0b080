#include "choimarg/marginals.hpp"

#include <algorithm>
#include <set>

#include "choimarg/errors.hpp"

namespace choimarg {

namespace {

std::set<std::string> as_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

void check_labels(const std::vector<std::string>& labels, const LabeledSpace& space,
                  const char* side) {
  for (const auto& l : labels)
    if (!space.contains(l))
      throw LabelMismatch(std::string(side) + " label '" + l + "' is not in the global space");
}

std::vector<std::string> intersect(const std::vector<std::string>& a,
                                   const std::vector<std::string>& b) {
  std::vector<std::string> out;
  for (const auto& l : a)
    if (std::find(b.begin(), b.end(), l) != b.end()) out.push_back(l);
  return out;
}

struct Reduced {
  LabeledOperator t;     // tr_{S\X} J on X, X', R
  LabeledOperator fact;  // tr_R(T) (x) I_R / d_R on the same space
  std::vector<std::string> kept;
};

Reduced reduce(const QuantumChannel& global, const OutputInputPair& pair) {
  check_labels(pair.out_labels, global.out_space(), "output");
  check_labels(pair.in_labels, global.in_space(), "input");
  const LabeledSpace rest = global.in_space().without(pair.in_labels);
  std::vector<std::string> kept = pair.out_labels;
  kept.insert(kept.end(), pair.in_labels.begin(), pair.in_labels.end());
  std::vector<std::string> order = kept;
  for (const auto& l : rest.labels()) order.push_back(l);
  LabeledOperator t = reduce_to(global.choi(), order);
  LabeledOperator marg = reduce_to(t, kept);
  LabeledOperator fact =
      embed(marg * cplx(1.0 / static_cast<double>(rest.dim())), t.row_space());
  return {std::move(t), std::move(fact), std::move(kept)};
}

}  // namespace

bool OutputInputPair::same_as(const OutputInputPair& other) const {
  return as_set(out_labels) == as_set(other.out_labels) &&
         as_set(in_labels) == as_set(other.in_labels);
}

OutputInputPair pair_of(const QuantumChannel& ch) {
  return {ch.out_space().labels(), ch.in_space().labels()};
}

double signaling_residual(const QuantumChannel& global, const OutputInputPair& pair) {
  const Reduced r = reduce(global, pair);
  return (r.t.matrix() - r.fact.matrix()).norm();
}

MarginalOutcome marginal_channel(const QuantumChannel& global, const OutputInputPair& pair,
                                 const ToleranceConfig& tol) {
  const Reduced r = reduce(global, pair);
  MarginalOutcome outcome;
  outcome.residual = (r.t.matrix() - r.fact.matrix()).norm();
  outcome.threshold = tol.tol_eq * static_cast<double>(r.t.row_space().dim());
  if (outcome.residual > outcome.threshold) return outcome;
  const CMatrix choi = reduce_to(r.t, r.kept).matrix();
  outcome.channel.emplace(global.in_space().select(pair.in_labels),
                          global.out_space().select(pair.out_labels), choi, tol);
  return outcome;
}

bool is_no_signaling(const QuantumChannel& global, const OutputInputPair& pair,
                     const ToleranceConfig& tol) {
  const Reduced r = reduce(global, pair);
  return (r.t.matrix() - r.fact.matrix()).norm() <=
         tol.tol_eq * static_cast<double>(r.t.row_space().dim());
}

MarginalScenario::MarginalScenario(LabeledSpace global_out, LabeledSpace global_in,
                                   std::vector<QuantumChannel> channels)
    : out_(std::move(global_out)), in_(std::move(global_in)), channels_(std::move(channels)) {
  for (const auto& f : out_.factors())
    if (in_.contains(f.label))
      throw InvalidScenario("label '" + f.label + "' appears as both output and input");
  for (std::size_t k = 0; k < channels_.size(); ++k) {
    const QuantumChannel& ch = channels_[k];
    auto check = [&](const LabeledSpace& local, const LabeledSpace& global) {
      for (const auto& f : local.factors()) {
        if (!global.contains(f.label))
          throw InvalidScenario("channel " + std::to_string(k) + " uses unknown label '" +
                                f.label + "'");
        if (global.dim_of(f.label) != f.dim)
          throw InvalidScenario("channel " + std::to_string(k) + " has the wrong dimension for '" +
                                f.label + "'");
      }
    };
    check(ch.out_space(), out_);
    check(ch.in_space(), in_);
    if (ch.out_space().empty() && ch.in_space().empty())
      throw InvalidScenario("channel " + std::to_string(k) + " has no factors");
    OutputInputPair p = pair_of(ch);
    for (const auto& q : pairs_)
      if (q.same_as(p)) throw InvalidScenario("output-input pair repeated in scenario");
    pairs_.push_back(std::move(p));
  }
}

MarginalScenario MarginalScenario::with_channels(std::vector<QuantumChannel> channels) const {
  if (channels.size() != channels_.size())
    throw InvalidScenario("replacement channel count differs");
  for (std::size_t k = 0; k < channels.size(); ++k)
    if (!pair_of(channels[k]).same_as(pairs_[k]))
      throw InvalidScenario("replacement channel " + std::to_string(k) + " has another pair");
  return {out_, in_, std::move(channels)};
}

LocalCompatibilityReport local_compatibility_check(const MarginalScenario& scenario,
                                                   const ToleranceConfig& tol) {
  LocalCompatibilityReport report;
  const auto& chans = scenario.channels();
  for (std::size_t i = 0; i < chans.size(); ++i) {
    for (std::size_t j = i + 1; j < chans.size(); ++j) {
      const auto& pi = scenario.pairs()[i];
      const auto& pj = scenario.pairs()[j];
      const OutputInputPair overlap{intersect(pi.out_labels, pj.out_labels),
                                    intersect(pi.in_labels, pj.in_labels)};
      if (overlap.out_labels.empty() && overlap.in_labels.empty()) continue;
      const MarginalOutcome a = marginal_channel(chans[i], overlap, tol);
      const MarginalOutcome b = marginal_channel(chans[j], overlap, tol);
      if (!a.well_defined() || !b.well_defined()) {
        const double res = std::max(a.well_defined() ? 0.0 : a.residual,
                                    b.well_defined() ? 0.0 : b.residual);
        report.failures.push_back({i, j, res, "overlap marginal is not well defined"});
        continue;
      }
      // Both reductions list the overlap in pair i's order, so the Chois align.
      const double dist = trace_distance(a.channel->choi().matrix(), b.channel->choi().matrix());
      if (dist > tol.tol_eq)
        report.failures.push_back({i, j, dist, "overlap marginals differ"});
    }
  }
  return report;
}

MarginalScenario broadcast_scenario(const std::vector<QuantumChannel>& channels) {
  if (channels.empty()) throw InvalidScenario("broadcast scenario needs at least one channel");
  const LabeledSpace& in = channels.front().in_space();
  LabeledSpace out;
  for (const auto& ch : channels) {
    if (!ch.in_space().same_factors(in))
      throw InvalidScenario("broadcast channels must share the same input space");
    try {
      out = out.concat(ch.out_space());
    } catch (const LabelCollision& e) {
      throw InvalidScenario(std::string("broadcast outputs overlap: ") + e.what());
    }
  }
  return {out, in, channels};
}

MarginalScenario extendibility_scenario(const QuantumChannel& ch, const std::string& copy_out,
                                        const std::string& copy_in, std::size_t k) {
  if (k < 2) throw InvalidScenario("extendibility needs at least two copies");
  if (!ch.out_space().contains(copy_out) || !ch.in_space().contains(copy_in))
    throw InvalidScenario("copied factors must belong to the channel");
  std::vector<QuantumChannel> copies;
  std::vector<Factor> out = ch.out_space().without({copy_out}).factors();
  std::vector<Factor> in = ch.in_space().without({copy_in}).factors();
  for (std::size_t i = 1; i <= k; ++i) {
    const std::string so = copy_out + "_" + std::to_string(i);
    const std::string si = copy_in + "_" + std::to_string(i);
    copies.push_back(relabel(ch, {{copy_out, so}, {copy_in, si}}));
    out.push_back({so, ch.out_space().dim_of(copy_out)});
    in.push_back({si, ch.in_space().dim_of(copy_in)});
  }
  return {LabeledSpace(std::move(out)), LabeledSpace(std::move(in)), std::move(copies)};
}

}  // namespace choimarg
