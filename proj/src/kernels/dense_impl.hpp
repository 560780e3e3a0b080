// Dense kernels built on Eigen. Included once per instruction set by the
// dense_*.cpp files, each of which defines CHOIMARG_DENSE_NS first.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <utility>

namespace choimarg::kernels::CHOIMARG_DENSE_NS {

namespace {
using Mat = Eigen::Map<Eigen::MatrixXd>;
using CMat = Eigen::Map<const Eigen::MatrixXd>;
}  // namespace

void gemm(int m, int n, int k, const double* a, const double* b, double* c) {
  Mat cm(c, m, n);
  if (k == 0) {
    cm.setZero();
    return;
  }
  cm.noalias() = CMat(a, m, k) * CMat(b, k, n);
}

bool cholesky(int n, double* a) {
  Mat am(a, n, n);
  Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(am);
  return llt.info() == Eigen::Success;
}

void cholesky_solve(int n, const double* l, double* b) {
  const CMat lm(l, n, n);
  Mat bm(b, n, 1);
  lm.triangularView<Eigen::Lower>().solveInPlace(bm);
  lm.triangularView<Eigen::Lower>().transpose().solveInPlace(bm);
}

// Panels of nb pivots: within a panel the pivot column is brought up to
// date with a matrix-vector product and only the diagonal is tracked for
// the remaining rows; the trailing block is updated once per panel.
int pivoted_cholesky(int n, double* a, double tol, int* piv) {
  constexpr int nb = 64;
  Mat am(a, n, n);
  for (int i = 0; i < n; ++i) piv[i] = i;
  Eigen::VectorXd d(n);
  for (int k0 = 0; k0 < n; k0 += nb) {
    const int kend = std::min(n, k0 + nb);
    for (int i = k0; i < n; ++i) d(i) = am(i, i);
    for (int k = k0; k < kend; ++k) {
      Eigen::Index best = 0;
      const double pivot = d.tail(n - k).maxCoeff(&best);
      if (!(pivot > tol)) return k;
      const int p = k + static_cast<int>(best);
      if (p != k) {
        // Symmetric interchange of k and p acting on the lower triangle.
        am.row(k).head(k).swap(am.row(p).head(k));
        std::swap(am(k, k), am(p, p));
        for (int j = k + 1; j < p; ++j) std::swap(am(j, k), am(p, j));
        am.col(k).tail(n - p - 1).swap(am.col(p).tail(n - p - 1));
        std::swap(d(k), d(p));
        std::swap(piv[k], piv[p]);
      }
      const double lkk = std::sqrt(pivot);
      am(k, k) = lkk;
      const int rest = n - k - 1;
      if (rest == 0) continue;
      auto col = am.col(k).tail(rest);
      if (k > k0)
        col.noalias() -=
            am.block(k + 1, k0, rest, k - k0) * am.row(k).segment(k0, k - k0).transpose();
      col /= lkk;
      d.tail(rest) -= col.cwiseAbs2();
    }
    const int rest = n - kend;
    if (rest > 0)
      am.bottomRightCorner(rest, rest).selfadjointView<Eigen::Lower>().rankUpdate(
          am.block(kend, k0, rest, kend - k0), -1.0);
  }
  return n;
}

}  // namespace choimarg::kernels::CHOIMARG_DENSE_NS
