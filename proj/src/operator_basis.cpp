#include "operator_basis.hpp"

namespace choimarg {

namespace {

struct Unit {
  int row;
  int col;
  double value;
};

// One factor's basis element. `dir` is 0 for diagonal elements and +1 / -1
// for the matrix units above / below the diagonal.
struct Element {
  std::vector<Unit> units;
  int dir = 0;
  bool identity = false;
};

// Full: all matrix units. Traceless groups use {I} plus the traceless
// units E_kl (k != l) and E_kk - E_{k+1,k+1}; products with at least one
// non-identity factor then span the traceless part of the group.
std::vector<Element> factor_elements(int d, bool traceless) {
  std::vector<Element> out;
  if (traceless) {
    Element id;
    id.identity = true;
    for (int k = 0; k < d; ++k) id.units.push_back({k, k, 1.0});
    out.push_back(id);
    for (int k = 0; k + 1 < d; ++k) out.push_back({{{k, k, 1.0}, {k + 1, k + 1, -1.0}}, 0, false});
  } else {
    for (int k = 0; k < d; ++k) out.push_back({{{k, k, 1.0}}, 0, false});
  }
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l)
      if (k != l) out.push_back({{{k, l, 1.0}}, k < l ? 1 : -1, false});
  return out;
}

}  // namespace

std::vector<std::vector<ComplexEntry>> hermitian_basis(const LabeledSpace& space,
                                                       const std::vector<OperatorGroup>& groups) {
  std::vector<std::vector<Element>> elems;
  std::vector<int> group_of;
  std::vector<int> dims;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].traceless && groups[g].labels.empty()) return {};
    for (const auto& l : groups[g].labels) {
      const int d = static_cast<int>(space.dim_of(l));
      elems.push_back(factor_elements(d, groups[g].traceless));
      group_of.push_back(static_cast<int>(g));
      dims.push_back(d);
    }
  }
  const std::size_t nf = elems.size();
  std::vector<int> stride(nf, 1);
  for (int f = static_cast<int>(nf) - 2; f >= 0; --f) stride[f] = stride[f + 1] * dims[f + 1];

  std::vector<std::vector<ComplexEntry>> out;
  std::vector<std::size_t> pick(nf, 0);
  while (true) {
    // A traceless group needs at least one non-identity factor.
    bool keep = true;
    for (std::size_t g = 0; g < groups.size() && keep; ++g) {
      if (!groups[g].traceless) continue;
      bool all_id = true;
      for (std::size_t f = 0; f < nf; ++f)
        if (group_of[f] == static_cast<int>(g) && !elems[f][pick[f]].identity) all_id = false;
      keep = !all_id;
    }
    // Of G and G^dagger only the one whose first off-diagonal factor is
    // above the diagonal is kept; it yields the real and imaginary parts.
    int first_dir = 0;
    for (std::size_t f = 0; f < nf && first_dir == 0; ++f) first_dir = elems[f][pick[f]].dir;
    if (keep && first_dir >= 0) {
      std::vector<ComplexEntry> g{{0, 0, 1.0}};
      for (std::size_t f = 0; f < nf; ++f) {
        std::vector<ComplexEntry> next;
        for (const auto& a : g)
          for (const auto& u : elems[f][pick[f]].units)
            next.push_back({a.row + u.row * stride[f], a.col + u.col * stride[f], a.value * u.value});
        g = std::move(next);
      }
      if (first_dir == 0) {
        out.push_back(std::move(g));
      } else {
        std::vector<ComplexEntry> re;
        std::vector<ComplexEntry> im;
        for (const auto& e : g) {
          re.push_back({e.row, e.col, 0.5 * e.value});
          re.push_back({e.col, e.row, 0.5 * std::conj(e.value)});
          im.push_back({e.row, e.col, cplx(0.0, -0.5) * e.value});
          im.push_back({e.col, e.row, cplx(0.0, 0.5) * std::conj(e.value)});
        }
        out.push_back(std::move(re));
        out.push_back(std::move(im));
      }
    }
    std::size_t f = nf;
    while (f > 0) {
      --f;
      if (++pick[f] < elems[f].size()) break;
      pick[f] = 0;
      if (f == 0) return out;
    }
    if (nf == 0) return out;
  }
}

std::vector<ComplexEntry> embed_entries(const LabeledSpace& full,
                                        const std::vector<std::string>& labels,
                                        const std::vector<ComplexEntry>& op) {
  const FactorOffsets off = factor_offsets(full, labels);
  std::vector<ComplexEntry> out;
  out.reserve(op.size() * off.rest.size());
  for (const auto& e : op)
    for (const auto t : off.rest)
      out.push_back({static_cast<int>(off.selected[e.row] + t),
                     static_cast<int>(off.selected[e.col] + t), e.value});
  return out;
}

}  // namespace choimarg
