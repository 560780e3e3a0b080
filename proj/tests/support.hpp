#pragma once

// Random generators and loop-level reference implementations shared by the
// tests. Nothing here calls into the library's tensor code, so results can
// be compared against it.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace testsupport {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double normal() { return normal_(gen_); }
  double uniform() { return uniform_(gen_); }
  int below(int n) { return std::uniform_int_distribution<int>(0, n - 1)(gen_); }

  CMatrix gaussian(Eigen::Index rows, Eigen::Index cols) {
    CMatrix m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
      for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = cplx(normal(), normal());
    return m;
  }

  CMatrix hermitian(Eigen::Index d) {
    const CMatrix g = gaussian(d, d);
    return (g + g.adjoint()) / 2.0;
  }

  /// Full-rank density matrix.
  CMatrix state(Eigen::Index d) {
    const CMatrix g = gaussian(d, d);
    CMatrix rho = g * g.adjoint();
    return rho / rho.trace().real();
  }

  /// Kraus operators of a random channel d_in -> d_out with `rank` terms,
  /// read off a random isometry.
  std::vector<CMatrix> kraus(Eigen::Index d_in, Eigen::Index d_out, Eigen::Index rank) {
    const CMatrix g = gaussian(rank * d_out, d_in);
    const CMatrix q = Eigen::HouseholderQR<CMatrix>(g).householderQ() *
                      CMatrix::Identity(rank * d_out, d_in);
    std::vector<CMatrix> ks;
    for (Eigen::Index j = 0; j < rank; ++j) ks.push_back(q.middleRows(j * d_out, d_out));
    return ks;
  }

  /// Column-stochastic d_out x d_in matrix with strictly positive entries.
  Eigen::MatrixXd stochastic(Eigen::Index d_out, Eigen::Index d_in) {
    Eigen::MatrixXd p(d_out, d_in);
    for (Eigen::Index c = 0; c < d_in; ++c) {
      for (Eigen::Index r = 0; r < d_out; ++r) p(r, c) = 0.05 + uniform();
      p.col(c) /= p.col(c).sum();
    }
    return p;
  }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

inline CMatrix apply_kraus(const std::vector<CMatrix>& ks, const CMatrix& rho) {
  CMatrix out = CMatrix::Zero(ks.front().rows(), ks.front().rows());
  for (const auto& k : ks) out += k * rho * k.adjoint();
  return out;
}

/// sum_k (K (x) I)|Psi+><Psi+|(K (x) I)^dag on out (x) in, unit trace.
inline CMatrix choi_of_kraus(const std::vector<CMatrix>& ks) {
  const Eigen::Index din = ks.front().cols();
  const Eigen::Index dout = ks.front().rows();
  CMatrix j = CMatrix::Zero(dout * din, dout * din);
  for (const auto& k : ks)
    for (Eigen::Index a = 0; a < din; ++a)
      for (Eigen::Index b = 0; b < din; ++b)
        for (Eigen::Index r = 0; r < dout; ++r)
          for (Eigen::Index s = 0; s < dout; ++s)
            j(r * din + a, s * din + b) += k(r, a) * std::conj(k(s, b));
  return j / static_cast<double>(din);
}

/// Digits of a linear index, leftmost factor most significant.
inline std::vector<int> digits(Eigen::Index idx, const std::vector<int>& dims) {
  std::vector<int> d(dims.size());
  for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
    d[k] = static_cast<int>(idx % dims[k]);
    idx /= dims[k];
  }
  return d;
}

/// Traces out every factor whose `keep` flag is false, by brute force over
/// all index pairs.
inline CMatrix partial_trace(const CMatrix& m, const std::vector<int>& dims,
                             const std::vector<bool>& keep) {
  std::vector<int> kept_dims;
  for (std::size_t k = 0; k < dims.size(); ++k)
    if (keep[k]) kept_dims.push_back(dims[k]);
  Eigen::Index dk = 1;
  for (int d : kept_dims) dk *= d;
  CMatrix out = CMatrix::Zero(dk, dk);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const auto di = digits(i, dims);
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const auto dj = digits(j, dims);
      bool diag = true;
      Eigen::Index ri = 0, rj = 0;
      for (std::size_t k = 0; k < dims.size(); ++k) {
        if (keep[k]) {
          ri = ri * dims[k] + di[k];
          rj = rj * dims[k] + dj[k];
        } else if (di[k] != dj[k]) {
          diag = false;
          break;
        }
      }
      if (diag) out(ri, rj) += m(i, j);
    }
  }
  return out;
}

/// Reorders the factors of a square matrix: new factor k is old factor perm[k].
inline CMatrix permute(const CMatrix& m, const std::vector<int>& dims, const std::vector<int>& perm) {
  std::vector<int> nd;
  for (int p : perm) nd.push_back(dims[p]);
  auto map = [&](Eigen::Index i) {
    const auto d = digits(i, dims);
    Eigen::Index r = 0;
    for (std::size_t k = 0; k < perm.size(); ++k) r = r * nd[k] + d[perm[k]];
    return r;
  };
  CMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(map(i), map(j)) = m(i, j);
  return out;
}

inline CMatrix ket_bra(Eigen::Index d, Eigen::Index i, Eigen::Index j) {
  CMatrix m = CMatrix::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

inline double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testsupport
