#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <unordered_map>

#include "choimarg/conic.hpp"
#include "choimarg/errors.hpp"
#include "choimarg/kernels.hpp"

namespace choimarg {

int ConicProgram::add_block(std::string name, int size, BlockKind kind) {
  if (size <= 0) throw ShapeError("block size must be positive");
  blocks.push_back({std::move(name), size, kind});
  return static_cast<int>(blocks.size()) - 1;
}

int ConicProgram::add_constraint(std::vector<Entry> entries, double rhs) {
  constraints.push_back({std::move(entries), rhs});
  return static_cast<int>(constraints.size()) - 1;
}

namespace {

void normalize_entries(std::vector<Entry>& entries) {
  for (auto& e : entries)
    if (e.row > e.col) std::swap(e.row, e.col);
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.block, a.row, a.col) < std::tie(b.block, b.row, b.col);
  });
  std::vector<Entry> merged;
  merged.reserve(entries.size());
  for (const auto& e : entries) {
    if (!merged.empty() && merged.back().block == e.block && merged.back().row == e.row &&
        merged.back().col == e.col)
      merged.back().value += e.value;
    else
      merged.push_back(e);
  }
  std::erase_if(merged, [](const Entry& e) { return e.value == 0.0; });
  entries = std::move(merged);
}

}  // namespace

void ConicProgram::normalize() {
  normalize_entries(objective);
  for (auto& c : constraints) normalize_entries(c.entries);
}

void ConicProgram::validate() const {
  auto check = [&](const std::vector<Entry>& entries, const std::string& where) {
    for (const auto& e : entries) {
      if (e.block < 0 || e.block >= static_cast<int>(blocks.size()))
        throw ShapeError(where + ": block index out of range");
      const Block& b = blocks[e.block];
      if (e.row < 0 || e.col < 0 || e.row >= b.size || e.col >= b.size)
        throw ShapeError(where + ": entry outside block '" + b.name + "'");
      if (b.kind == BlockKind::Diagonal && e.row != e.col)
        throw ShapeError(where + ": off-diagonal entry in diagonal block '" + b.name + "'");
      if (!std::isfinite(e.value)) throw ShapeError(where + ": non-finite coefficient");
    }
  };
  check(objective, "objective");
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    check(constraints[i].entries, "constraint " + std::to_string(i));
    if (!std::isfinite(constraints[i].rhs))
      throw ShapeError("constraint " + std::to_string(i) + ": non-finite right-hand side");
  }
}

int ConicProgram::total_size() const {
  int n = 0;
  for (const auto& b : blocks) n += b.size;
  return n;
}

void append_realified(std::vector<Entry>& out, int block, int d,
                      const std::vector<ComplexEntry>& hermitian) {
  for (const auto& h : hermitian) {
    const double re = 0.5 * h.value.real();
    const double im = 0.5 * h.value.imag();
    if (h.row <= h.col && re != 0.0) {
      out.push_back({block, h.row, h.col, re});
      out.push_back({block, d + h.row, d + h.col, re});
    }
    if (im != 0.0) out.push_back({block, h.row, d + h.col, -im});
  }
}

void append_realified(std::vector<Entry>& out, int block, const Eigen::MatrixXcd& hermitian,
                      double drop) {
  const int d = static_cast<int>(hermitian.rows());
  std::vector<ComplexEntry> nz;
  for (int c = 0; c < d; ++c)
    for (int r = 0; r < d; ++r)
      if (std::abs(hermitian(r, c)) > drop) nz.push_back({r, c, hermitian(r, c)});
  append_realified(out, block, d, nz);
}

Eigen::MatrixXcd complex_from_realified(const Eigen::MatrixXd& x) {
  const Eigen::Index d = x.rows() / 2;
  Eigen::MatrixXcd out(d, d);
  out.real() = 0.5 * (x.topLeftCorner(d, d) + x.bottomRightCorner(d, d));
  out.imag() = 0.5 * (x.bottomLeftCorner(d, d) - x.topRightCorner(d, d));
  return 0.5 * (out + out.adjoint());
}

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "optimal";
    case SolveStatus::MaxIterations:
      return "max_iterations";
    case SolveStatus::NumericalFailure:
      return "numerical_failure";
  }
  return "unknown";
}

double evaluate(const std::vector<Entry>& entries, const std::vector<Eigen::MatrixXd>& x) {
  double acc = 0.0;
  for (const auto& e : entries) {
    const Eigen::MatrixXd& m = x.at(e.block);
    if (m.cols() == 1)
      acc += e.value * m(e.row, 0);
    else
      acc += e.row == e.col ? e.value * m(e.row, e.col)
                            : e.value * (m(e.row, e.col) + m(e.col, e.row));
  }
  return acc;
}

namespace {

using Blocks = std::vector<Eigen::MatrixXd>;

// One constraint restricted to one block, in the forms the solver needs:
// raw entries for building sum y_i A_i, a gather list for <A_i, G>, and for
// PSD blocks the dense restriction to the touched indices.
struct Part {
  int block = 0;
  std::vector<Entry> entries;
  std::vector<double> w;
  std::vector<std::int32_t> idx;
  std::vector<int> support;
  Eigen::MatrixXd local;
};

struct Row {
  std::vector<Part> parts;
  double b = 0.0;
};

struct Model {
  std::vector<Block> blocks;
  std::vector<Row> rows;
  Blocks c;
  // Per block: (row, part) pairs in increasing row order.
  std::vector<std::vector<std::pair<int, int>>> on_block;
  // Per diagonal block and column: (row, coefficient).
  std::vector<std::vector<std::vector<std::pair<int, double>>>> diag_cols;
  int degree = 0;
};

bool is_diag(const Block& b) { return b.kind == BlockKind::Diagonal; }

Part make_part(int block, const Block& spec, std::vector<Entry> entries) {
  Part p;
  p.block = block;
  p.entries = std::move(entries);
  const int n = spec.size;
  if (is_diag(spec)) {
    for (const auto& e : p.entries) {
      p.w.push_back(e.value);
      p.idx.push_back(e.row);
    }
    return p;
  }
  for (const auto& e : p.entries) {
    if (e.row == e.col) {
      p.w.push_back(e.value);
      p.idx.push_back(e.row + e.row * n);
    } else {
      p.w.push_back(e.value);
      p.idx.push_back(e.row + e.col * n);
      p.w.push_back(e.value);
      p.idx.push_back(e.col + e.row * n);
    }
    p.support.push_back(e.row);
    p.support.push_back(e.col);
  }
  std::sort(p.support.begin(), p.support.end());
  p.support.erase(std::unique(p.support.begin(), p.support.end()), p.support.end());
  const auto s = static_cast<Eigen::Index>(p.support.size());
  p.local = Eigen::MatrixXd::Zero(s, s);
  auto pos = [&](int k) {
    return std::lower_bound(p.support.begin(), p.support.end(), k) - p.support.begin();
  };
  for (const auto& e : p.entries) {
    const auto a = pos(e.row);
    const auto b = pos(e.col);
    p.local(a, b) += e.value;
    if (a != b) p.local(b, a) += e.value;
  }
  return p;
}

void scale_part(Part& p, double f) {
  for (auto& e : p.entries) e.value *= f;
  for (auto& v : p.w) v *= f;
  p.local *= f;
}

Row make_row(const ConicProgram& prog, const Constraint& c) {
  Row row;
  row.b = c.rhs;
  std::size_t k = 0;
  while (k < c.entries.size()) {
    const int block = c.entries[k].block;
    std::vector<Entry> chunk;
    while (k < c.entries.size() && c.entries[k].block == block) chunk.push_back(c.entries[k++]);
    row.parts.push_back(make_part(block, prog.blocks[block], std::move(chunk)));
  }
  return row;
}

Blocks zero_blocks(const std::vector<Block>& blocks) {
  Blocks out;
  for (const auto& b : blocks)
    out.push_back(is_diag(b) ? Eigen::MatrixXd::Zero(b.size, 1)
                             : Eigen::MatrixXd::Zero(b.size, b.size));
  return out;
}

void add_entries(Blocks& out, const std::vector<Entry>& entries, double scale) {
  for (const auto& e : entries) {
    Eigen::MatrixXd& m = out[e.block];
    if (m.cols() == 1) {
      m(e.row, 0) += scale * e.value;
    } else {
      m(e.row, e.col) += scale * e.value;
      if (e.row != e.col) m(e.col, e.row) += scale * e.value;
    }
  }
}

double apply_row(const Row& row, const Blocks& x) {
  double acc = 0.0;
  for (const auto& p : row.parts) acc += kernels::gather_dot(p.w, p.idx, x[p.block].data());
  return acc;
}

double inner(const Blocks& a, const Blocks& b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k].cwiseProduct(b[k]).sum();
  return acc;
}

double frob(const Blocks& a) { return std::sqrt(inner(a, a)); }

double row_norm(const Row& row) {
  double acc = 0.0;
  for (const auto& p : row.parts)
    for (const auto& e : p.entries) acc += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
  return std::sqrt(acc);
}

struct Presolved {
  std::vector<int> kept;     // indices into the original rows
  std::vector<double> scale; // multiplier applied to each kept row
  int dropped = 0;
};

// Drops constraints that are linear combinations of others (pivoted Cholesky
// of the Gram matrix of unit-normalized rows) and checks the dropped
// right-hand sides for consistency.
Presolved presolve(const std::vector<Row>& rows, double rank_tol) {
  const int m = static_cast<int>(rows.size());
  Presolved out;
  std::vector<double> norms(m);
  std::vector<int> live;
  for (int i = 0; i < m; ++i) {
    norms[i] = row_norm(rows[i]);
    if (norms[i] == 0.0) {
      if (std::abs(rows[i].b) > 1e-12)
        throw InfeasibleLinearSystem("constraint " + std::to_string(i) +
                                     " has no coefficients but a nonzero right-hand side");
      ++out.dropped;
    } else {
      live.push_back(i);
    }
  }
  const int n = static_cast<int>(live.size());
  if (n == 0) return out;

  std::unordered_map<std::int64_t, int> key_index;
  std::vector<Eigen::Triplet<double>> trips;
  for (int r = 0; r < n; ++r) {
    const Row& row = rows[live[r]];
    for (const auto& p : row.parts)
      for (const auto& e : p.entries) {
        const std::int64_t key = (static_cast<std::int64_t>(e.block) << 42) |
                                 (static_cast<std::int64_t>(e.row) << 21) | e.col;
        auto [it, fresh] = key_index.try_emplace(key, static_cast<int>(key_index.size()));
        const double f = e.row == e.col ? 1.0 : std::sqrt(2.0);
        trips.emplace_back(r, it->second, f * e.value / norms[live[r]]);
      }
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> a(n, static_cast<Eigen::Index>(key_index.size()));
  a.setFromTriplets(trips.begin(), trips.end());
  Eigen::MatrixXd gram = Eigen::MatrixXd(a * a.transpose());

  std::vector<int> piv(n);
  const int rank = kernels::pivoted_cholesky(n, gram.data(), rank_tol, piv.data());

  Eigen::VectorXd bk(rank);
  for (int k = 0; k < rank; ++k) {
    const int i = live[piv[k]];
    bk(k) = rows[i].b / norms[i];
  }
  if (rank < n) {
    // Rows past the rank satisfy A_R ~= L21 L11^{-1} A_K; check b likewise.
    const auto l11 = gram.topLeftCorner(rank, rank).triangularView<Eigen::Lower>();
    const Eigen::VectorXd t = l11.solve(bk);
    const Eigen::VectorXd pred = gram.bottomLeftCorner(n - rank, rank) * t;
    for (int k = rank; k < n; ++k) {
      const int i = live[piv[k]];
      const double bi = rows[i].b / norms[i];
      if (std::abs(bi - pred(k - rank)) > 1e-7 * (1.0 + std::abs(bi) + bk.cwiseAbs().maxCoeff()))
        throw InfeasibleLinearSystem("constraint " + std::to_string(i) +
                                     " contradicts the others it depends on");
    }
  }
  std::vector<int> order(piv.begin(), piv.begin() + rank);
  std::sort(order.begin(), order.end());
  for (int k : order) {
    const int i = live[k];
    out.kept.push_back(i);
    out.scale.push_back(1.0 / norms[i]);
  }
  out.dropped += n - rank;
  return out;
}

Model build_model(const ConicProgram& prog, const std::vector<Row>& all, const Presolved& pre) {
  Model m;
  m.blocks = prog.blocks;
  m.c = zero_blocks(prog.blocks);
  add_entries(m.c, prog.objective, 1.0);
  for (std::size_t k = 0; k < pre.kept.size(); ++k) {
    Row row = all[pre.kept[k]];
    for (auto& p : row.parts) scale_part(p, pre.scale[k]);
    row.b *= pre.scale[k];
    m.rows.push_back(std::move(row));
  }
  m.on_block.resize(prog.blocks.size());
  m.diag_cols.resize(prog.blocks.size());
  for (std::size_t b = 0; b < prog.blocks.size(); ++b) {
    if (is_diag(prog.blocks[b])) m.diag_cols[b].resize(prog.blocks[b].size);
    m.degree += prog.blocks[b].size;
  }
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    for (std::size_t p = 0; p < m.rows[i].parts.size(); ++p) {
      const Part& part = m.rows[i].parts[p];
      m.on_block[part.block].emplace_back(static_cast<int>(i), static_cast<int>(p));
      if (is_diag(prog.blocks[part.block]))
        for (const auto& e : part.entries)
          m.diag_cols[part.block][e.row].emplace_back(static_cast<int>(i), e.value);
    }
  }
  return m;
}

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& a) { return 0.5 * (a + a.transpose()); }

// Largest alpha with x + alpha * dx still positive semidefinite (infinity if unbounded).
double max_step(const Eigen::MatrixXd& x, const Eigen::MatrixXd& dx) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (x.cols() == 1) {
    double step = inf;
    for (Eigen::Index k = 0; k < x.rows(); ++k)
      if (dx(k, 0) < 0.0) step = std::min(step, -x(k, 0) / dx(k, 0));
    return step;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(x);
  Eigen::MatrixXd w;
  if (llt.info() == Eigen::Success) {
    const auto l = llt.matrixL();
    w = l.solve(dx);
    w = l.solve(w.transpose().eval());
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
    const Eigen::VectorXd s =
        es.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    w = s.asDiagonal() * es.eigenvectors().transpose() * dx * es.eigenvectors() * s.asDiagonal();
  }
  const double lmin =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(symmetrize(w), Eigen::EigenvaluesOnly)
          .eigenvalues()(0);
  return lmin < 0.0 ? -1.0 / lmin : inf;
}

void gemm(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Eigen::MatrixXd& c) {
  c.resize(a.rows(), b.cols());
  kernels::gemm(static_cast<int>(a.rows()), static_cast<int>(b.cols()),
                static_cast<int>(a.cols()), a.data(), b.data(), c.data());
}

class Schur {
 public:
  explicit Schur(const Model& m) : model_(m), n_(static_cast<int>(m.rows.size())) {}

  // M_ij = sum_k <A_i, X A_j Z^{-1}> on PSD blocks and a_i' diag(x/z) a_j on
  // diagonal blocks; only the lower triangle is formed.
  void form(const Blocks& x, const Blocks& zinv) {
    mat_.setZero(n_, n_);
    for (std::size_t k = 0; k < model_.blocks.size(); ++k) {
      const auto& list = model_.on_block[k];
      if (is_diag(model_.blocks[k])) {
        const Eigen::VectorXd d = x[k].col(0).cwiseProduct(zinv[k].col(0));
        for (std::size_t c = 0; c < model_.diag_cols[k].size(); ++c) {
          const auto& col = model_.diag_cols[k][c];
          for (std::size_t p = 0; p < col.size(); ++p)
            for (std::size_t q = 0; q <= p; ++q)
              mat_(col[p].first, col[q].first) += col[p].second * col[q].second * d(c);
        }
        continue;
      }
      const Eigen::MatrixXd& xk = x[k];
      const Eigen::MatrixXd& zk = zinv[k];
      const Eigen::Index n = xk.rows();
      Eigen::MatrixXd g(n, n);
      for (std::size_t jj = 0; jj < list.size(); ++jj) {
        const auto [j, pj] = list[jj];
        const Part& part = model_.rows[j].parts[pj];
        const auto s = static_cast<Eigen::Index>(part.support.size());
        Eigen::MatrixXd xs(n, s);
        Eigen::MatrixXd zs(s, n);
        for (Eigen::Index t = 0; t < s; ++t) {
          xs.col(t) = xk.col(part.support[t]);
          zs.row(t) = zk.row(part.support[t]);
        }
        const Eigen::MatrixXd p = xs * part.local;
        gemm(p, zs, g);
        for (std::size_t ii = jj; ii < list.size(); ++ii) {
          const auto [i, pi] = list[ii];
          const Part& other = model_.rows[i].parts[pi];
          mat_(i, j) += kernels::gather_dot(other.w, other.idx, g.data());
        }
      }
    }
  }

  bool factor() {
    const double maxdiag = n_ > 0 ? mat_.diagonal().cwiseAbs().maxCoeff() : 0.0;
    double shift = 0.0;
    for (int attempt = 0; attempt < 6; ++attempt) {
      fac_ = mat_;
      if (shift > 0.0) fac_.diagonal().array() += shift;
      if (n_ == 0 || kernels::cholesky(n_, fac_.data())) return true;
      shift = shift == 0.0 ? 1e-14 * (1.0 + maxdiag) : shift * 100.0;
    }
    return false;
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd out = rhs;
    if (n_ == 0) return out;
    kernels::cholesky_solve(n_, fac_.data(), out.data());
    return out;
  }

 private:
  const Model& model_;
  int n_;
  Eigen::MatrixXd mat_;
  Eigen::MatrixXd fac_;
};

struct Direction {
  Blocks dx;
  Blocks dz;
  Eigen::VectorXd dy;
};

class Engine {
 public:
  Engine(const Model& m, const SolverOptions& opts) : m_(m), opts_(opts), schur_(m) {}

  ConicSolution run(const ConicProgram& prog, const std::vector<Row>& all,
                    const Presolved& pre) {
    const int nrows = static_cast<int>(m_.rows.size());
    Eigen::VectorXd b(nrows);
    for (int i = 0; i < nrows; ++i) b(i) = m_.rows[i].b;
    const double bnorm = b.norm();
    const double cnorm = frob(m_.c);
    Eigen::VectorXd ball(static_cast<Eigen::Index>(all.size()));
    for (std::size_t i = 0; i < all.size(); ++i) ball(i) = all[i].b;
    const double ballnorm = ball.norm();

    x_ = zero_blocks(m_.blocks);
    z_ = zero_blocks(m_.blocks);
    y_ = Eigen::VectorXd::Zero(nrows);
    const double xi = 10.0 * (1.0 + bnorm);
    const double eta = 10.0 * (1.0 + cnorm);
    for (std::size_t k = 0; k < m_.blocks.size(); ++k) {
      if (is_diag(m_.blocks[k])) {
        x_[k].setConstant(xi);
        z_[k].setConstant(eta);
      } else {
        x_[k].diagonal().setConstant(xi);
        z_[k].diagonal().setConstant(eta);
      }
    }

    ConicSolution sol;
    sol.status = SolveStatus::MaxIterations;
    int stalls = 0;
    for (int iter = 0;; ++iter) {
      // Residuals and convergence measures.
      Eigen::VectorXd rp(nrows);
      for (int i = 0; i < nrows; ++i) rp(i) = b(i) - apply_row(m_.rows[i], x_);
      Blocks rd = adjoint(y_);
      for (std::size_t k = 0; k < rd.size(); ++k) rd[k] -= z_[k] + m_.c[k];
      Eigen::VectorXd rall(static_cast<Eigen::Index>(all.size()));
      for (std::size_t i = 0; i < all.size(); ++i) rall(i) = all[i].b - apply_row(all[i], x_);
      const double pobj = inner(m_.c, x_);
      const double dobj = b.dot(y_);
      sol.primal_objective = pobj;
      sol.dual_objective = dobj;
      sol.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));
      sol.primal_infeasibility = rall.norm() / (1.0 + ballnorm);
      sol.dual_infeasibility = frob(rd) / (1.0 + cnorm);
      sol.iterations = iter;
      const double mu = inner(x_, z_) / m_.degree;
      sol.history.push_back(
          {pobj, dobj, sol.primal_infeasibility, sol.dual_infeasibility, mu});
      if (opts_.verbose)
        std::fprintf(stderr, "%3d  p=% .10e  d=% .10e  gap=%.2e  pinf=%.2e  dinf=%.2e  mu=%.2e\n",
                     iter, pobj, dobj, sol.gap, sol.primal_infeasibility, sol.dual_infeasibility,
                     mu);
      if (!std::isfinite(mu) || !std::isfinite(pobj) || !std::isfinite(dobj)) {
        sol.status = SolveStatus::NumericalFailure;
        break;
      }
      if (sol.gap <= opts_.tol_gap && sol.primal_infeasibility <= opts_.tol_feas &&
          sol.dual_infeasibility <= opts_.tol_feas) {
        sol.status = SolveStatus::Optimal;
        break;
      }
      if (iter >= opts_.max_iter) break;

      if (!invert_z()) {
        if (opts_.verbose) std::fprintf(stderr, "dual slack lost definiteness\n");
        sol.status = SolveStatus::NumericalFailure;
        break;
      }
      schur_.form(x_, zinv_);
      if (!schur_.factor()) {
        if (opts_.verbose) std::fprintf(stderr, "Schur complement is not positive definite\n");
        sol.status = SolveStatus::NumericalFailure;
        break;
      }

      // Predictor (affine scaling) direction.
      const Direction aff = direction(rp, rd, 0.0, nullptr);
      const double ap_aff = std::min(1.0, step_length(x_, aff.dx));
      const double ad_aff = std::min(1.0, step_length(z_, aff.dz));
      double mu_aff = 0.0;
      for (std::size_t k = 0; k < x_.size(); ++k)
        mu_aff += (x_[k] + ap_aff * aff.dx[k]).cwiseProduct(z_[k] + ad_aff * aff.dz[k]).sum();
      mu_aff /= m_.degree;
      const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

      // Corrector with the second-order term dX_aff dZ_aff.
      const Direction dir = direction(rp, rd, sigma * mu, &aff);
      const double gamma = 0.95;
      const double ap = std::min(1.0, gamma * step_length(x_, dir.dx));
      const double ad = std::min(1.0, gamma * step_length(z_, dir.dz));
      for (std::size_t k = 0; k < x_.size(); ++k) {
        x_[k] += ap * dir.dx[k];
        z_[k] += ad * dir.dz[k];
      }
      y_ += ad * dir.dy;
      stalls = (ap < 1e-8 && ad < 1e-8) ? stalls + 1 : 0;
      if (stalls >= 3) {
        if (opts_.verbose) std::fprintf(stderr, "step lengths stalled\n");
        sol.status = SolveStatus::NumericalFailure;
        break;
      }
    }

    sol.x = x_;
    sol.z = z_;
    sol.y.assign(all.size(), 0.0);
    for (std::size_t k = 0; k < pre.kept.size(); ++k) sol.y[pre.kept[k]] = y_(k) * pre.scale[k];
    sol.dropped_constraints = pre.dropped;
    (void)prog;
    return sol;
  }

 private:
  Blocks adjoint(const Eigen::VectorXd& y) const {
    Blocks out = zero_blocks(m_.blocks);
    for (std::size_t i = 0; i < m_.rows.size(); ++i)
      if (y(i) != 0.0)
        for (const auto& p : m_.rows[i].parts) add_entries(out, p.entries, y(i));
    return out;
  }

  bool invert_z() {
    zinv_.resize(z_.size());
    for (std::size_t k = 0; k < z_.size(); ++k) {
      if (z_[k].cols() == 1) {
        if ((z_[k].array() <= 0.0).any()) return false;
        zinv_[k] = z_[k].cwiseInverse();
        continue;
      }
      Eigen::LLT<Eigen::MatrixXd> llt(z_[k]);
      if (llt.info() != Eigen::Success) return false;
      zinv_[k] = symmetrize(llt.solve(Eigen::MatrixXd::Identity(z_[k].rows(), z_[k].cols())));
    }
    return true;
  }

  static double step_length(const Blocks& x, const Blocks& dx) {
    double step = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < x.size(); ++k) step = std::min(step, max_step(x[k], dx[k]));
    return step;
  }

  // Solves the HKM Newton system with target sigma*mu and, when `aff` is
  // given, the Mehrotra second-order correction.
  Direction direction(const Eigen::VectorXd& rp, const Blocks& rd, double target,
                      const Direction* aff) const {
    const std::size_t nb = m_.blocks.size();
    Blocks r(nb);
    for (std::size_t k = 0; k < nb; ++k) {
      if (x_[k].cols() == 1) {
        Eigen::ArrayXd t = Eigen::ArrayXd::Constant(x_[k].rows(), target);
        if (aff) t -= aff->dx[k].array() * aff->dz[k].array();
        r[k] = (t * zinv_[k].array() - x_[k].array() -
                x_[k].array() * rd[k].array() * zinv_[k].array())
                   .matrix();
      } else {
        Eigen::MatrixXd t = target * Eigen::MatrixXd::Identity(x_[k].rows(), x_[k].cols());
        if (aff) t -= aff->dx[k] * aff->dz[k];
        r[k] = t * zinv_[k] - x_[k] - x_[k] * rd[k] * zinv_[k];
      }
    }
    const auto nrows = static_cast<Eigen::Index>(m_.rows.size());
    Eigen::VectorXd rhs(nrows);
    for (Eigen::Index i = 0; i < nrows; ++i) rhs(i) = apply_row(m_.rows[i], r) - rp(i);

    Direction d;
    d.dy = schur_.solve(rhs);
    d.dz = adjoint(d.dy);
    d.dx.resize(nb);
    for (std::size_t k = 0; k < nb; ++k) {
      d.dz[k] += rd[k];
      if (x_[k].cols() == 1)
        d.dx[k] = (r[k].array() - x_[k].array() * (d.dz[k].array() - rd[k].array()) *
                                      zinv_[k].array())
                      .matrix();
      else
        d.dx[k] = symmetrize(r[k] - x_[k] * (d.dz[k] - rd[k]) * zinv_[k]);
    }
    return d;
  }

  const Model& m_;
  const SolverOptions& opts_;
  Schur schur_;
  Blocks x_;
  Blocks z_;
  Blocks zinv_;
  Eigen::VectorXd y_;
};

}  // namespace

ConicSolution solve(const ConicProgram& input, const SolverOptions& opts) {
  ConicProgram prog = input;
  prog.validate();
  prog.normalize();
  std::vector<Row> all;
  all.reserve(prog.constraints.size());
  for (const auto& c : prog.constraints) all.push_back(make_row(prog, c));
  const Presolved pre = presolve(all, opts.rank_tol);
  const Model model = build_model(prog, all, pre);
  Engine engine(model, opts);
  return engine.run(prog, all, pre);
}

}  // namespace choimarg
