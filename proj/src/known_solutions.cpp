#include "choimarg/known_solutions.hpp"

#include <utility>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

namespace choimarg {

namespace {

int bits(const char* s) {
  int v = 0;
  for (; *s; ++s) v = 2 * v + (*s - '0');
  return v;
}

LabeledSpace qubits(const std::vector<std::string>& labels) {
  std::vector<Factor> fs;
  for (const auto& l : labels) fs.push_back({l, 2});
  return LabeledSpace(fs);
}

struct Term {
  const char* ket;
  const char* bra;
  double value;
};

CMatrix from_terms(int n, const std::vector<Term>& terms) {
  CMatrix m = CMatrix::Zero(n, n);
  for (const auto& t : terms) m(bits(t.ket), bits(t.bra)) += t.value;
  return m;
}

}  // namespace

LabeledOperator cnot_pair_global_choi() {
  const double w = 1.0 / 12.0;
  const CMatrix core = from_terms(16, {{"0000", "0000", 4 * w}, {"0001", "0001", w},
                                       {"0001", "0010", w},     {"0010", "0001", w},
                                       {"0010", "0010", w},     {"1111", "1111", 4 * w},
                                       {"1101", "1101", w},     {"1101", "1110", w},
                                       {"1110", "1101", w},     {"1110", "1110", w},
                                       {"0000", "1101", 2 * w}, {"0000", "1110", 2 * w},
                                       {"0001", "1111", 2 * w}, {"0010", "1111", 2 * w},
                                       {"1101", "0000", 2 * w}, {"1110", "0000", 2 * w},
                                       {"1111", "0001", 2 * w}, {"1111", "0010", 2 * w}});
  const CMatrix full = Eigen::kroneckerProduct(core, CMatrix::Identity(4, 4) / 4.0).eval();
  return {qubits({"B", "B'", "A", "C", "A'", "C'"}), full};
}

QuantumChannel cnot_pair_noise_channel(const std::string& x_label) {
  const double third = 1.0 / 3.0;
  const double sixth = 1.0 / 6.0;
  const CMatrix core = from_terms(8, {{"001", "001", third},
                                      {"110", "110", third},
                                      {"000", "000", sixth},
                                      {"000", "111", -sixth},
                                      {"111", "000", -sixth},
                                      {"111", "111", sixth}});
  const std::string xp = x_label + "'";
  const LabeledOperator choi(qubits({xp, "B", "B'", x_label}),
                             Eigen::kroneckerProduct(CMatrix::Identity(2, 2) / 2.0, core).eval());
  const LabeledOperator ordered = permute_factors(choi, {x_label, "B", xp, "B'"});
  return {qubits({xp, "B'"}), qubits({x_label, "B"}), ordered.matrix()};
}

}  // namespace choimarg
