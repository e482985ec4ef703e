#ifndef SOSMOM_SDP_HPP
#define SOSMOM_SDP_HPP

// Dense primal-dual interior-point solver for block-diagonal SDPs in the form
//
//   maximize <C, X>  s.t.  <A_i, X> = a_i,  X = diag(X_1, ..., X_p) psd
//   minimize a'y     s.t.  S = sum_i y_i A_i - C psd
//
// Search direction is HKM with a Mehrotra predictor-corrector step.

#include "sosmom/core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace sosmom::sdp {

/// One upper-triangle entry (row <= col) of a symmetric block matrix, 0-based.
struct Entry {
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Symmetric block-diagonal matrix given by its upper-triangle entries.
/// An off-diagonal entry (r, c, v) stands for v at both (r, c) and (c, r).
struct SparseSym {
  std::vector<Entry> entries;

  void add(int block, int row, int col, double value) {
    if (row > col) std::swap(row, col);
    entries.push_back({block, row, col, value});
  }

  /// Merges duplicate positions and drops zeros; ordering becomes canonical.
  void compress() {
    std::map<std::tuple<int, int, int>, double> acc;
    for (const auto& e : entries) acc[{e.block, e.row, e.col}] += e.value;
    entries.clear();
    for (const auto& [key, v] : acc) {
      if (v != 0.0) entries.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), v});
    }
  }

  bool empty() const { return entries.empty(); }
};

using BlockMatrix = std::vector<Matrix>;

struct Problem {
  std::vector<int> block_sizes;
  SparseSym objective;
  std::vector<SparseSym> constraints;
  Vector rhs;

  int num_constraints() const { return static_cast<int>(constraints.size()); }

  void validate() const {
    if (block_sizes.empty()) throw InvalidArgument("sdp: no blocks");
    for (int s : block_sizes) {
      if (s <= 0) throw InvalidArgument("sdp: block sizes must be positive");
    }
    if (rhs.size() != num_constraints()) {
      throw InvalidArgument("sdp: rhs has " + std::to_string(rhs.size()) + " entries for " +
                            std::to_string(num_constraints()) + " constraints");
    }
    auto check = [&](const SparseSym& m, const std::string& name) {
      for (const auto& e : m.entries) {
        if (e.block < 0 || e.block >= static_cast<int>(block_sizes.size())) {
          throw InvalidArgument("sdp: " + name + " references block " + std::to_string(e.block));
        }
        const int n = block_sizes[e.block];
        if (e.row < 0 || e.col < 0 || e.row >= n || e.col >= n) {
          throw InvalidArgument("sdp: " + name + " entry (" + std::to_string(e.row) + "," +
                                std::to_string(e.col) + ") outside block of size " + std::to_string(n));
        }
        if (!std::isfinite(e.value)) throw InvalidArgument("sdp: non-finite coefficient in " + name);
      }
    };
    check(objective, "objective");
    for (int i = 0; i < num_constraints(); ++i) check(constraints[i], "constraint " + std::to_string(i + 1));
  }
};

enum class Status { optimal, max_iter, infeasible_suspected, numerical_failure };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::max_iter: return "max_iter";
    case Status::infeasible_suspected: return "infeasible_suspected";
    case Status::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

struct Options {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  int max_iter = 200;
  bool verbose = false;
  double step_fraction = 0.98;
  // Consecutive iterations with growing complementarity before giving up.
  int divergence_window = 30;
  // Looser tolerance an iterate must meet to be reported as optimal when the
  // tight targets above stall (typical on degenerate optima with no interior).
  double accept_tol = 1e-6;
  int stall_window = 8;
};

struct IterateInfo {
  double primal_objective;
  double dual_objective;
  double primal_infeasibility;
  double dual_infeasibility;
  double mu;
};

struct Solution {
  BlockMatrix X;
  BlockMatrix S;
  Vector y;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double relative_gap = std::numeric_limits<double>::infinity();
  double primal_residual = std::numeric_limits<double>::infinity();  // ||A(X) - a||_inf
  double dual_residual = std::numeric_limits<double>::infinity();    // ||A*(y) - S - C||_inf
  Status status = Status::numerical_failure;
  int iterations = 0;
  std::vector<int> kept_constraints;  // indices surviving the rank pruning
  std::vector<IterateInfo> history;

  double objective() const { return primal_objective; }
  bool ok() const { return status == Status::optimal; }
};

namespace detail {

// Directional form of a sparse symmetric matrix: off-diagonal entries are
// split into (r, c) and (c, r) so that tr(A W) = sum v * W(c, r).
struct DirEntry {
  int block;
  int row;
  int col;
  double value;
};

inline std::vector<DirEntry> directional(const SparseSym& m) {
  std::vector<DirEntry> out;
  out.reserve(2 * m.entries.size());
  for (const auto& e : m.entries) {
    out.push_back({e.block, e.row, e.col, e.value});
    if (e.row != e.col) out.push_back({e.block, e.col, e.row, e.value});
  }
  std::sort(out.begin(), out.end(), [](const DirEntry& a, const DirEntry& b) {
    return std::tie(a.block, a.row, a.col) < std::tie(b.block, b.row, b.col);
  });
  return out;
}

inline BlockMatrix zeros(const std::vector<int>& sizes) {
  BlockMatrix out;
  out.reserve(sizes.size());
  for (int s : sizes) out.push_back(Matrix::Zero(s, s));
  return out;
}

inline BlockMatrix identity(const std::vector<int>& sizes, double scale) {
  BlockMatrix out;
  out.reserve(sizes.size());
  for (int s : sizes) out.push_back(scale * Matrix::Identity(s, s));
  return out;
}

inline void add_dense(BlockMatrix& out, const SparseSym& m, double scale) {
  for (const auto& e : m.entries) {
    out[e.block](e.row, e.col) += scale * e.value;
    if (e.row != e.col) out[e.block](e.col, e.row) += scale * e.value;
  }
}

inline double inner(const std::vector<DirEntry>& a, const BlockMatrix& w) {
  double s = 0.0;
  for (const auto& e : a) s += e.value * w[e.block](e.col, e.row);
  return s;
}

inline double inner(const BlockMatrix& a, const BlockMatrix& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i].cwiseProduct(b[i]).sum();
  return s;
}

inline double max_abs(const BlockMatrix& a) {
  double m = 0.0;
  for (const auto& b : a) {
    if (b.size() > 0) m = std::max(m, b.cwiseAbs().maxCoeff());
  }
  return m;
}

inline double min_eigenvalue(const BlockMatrix& a) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& b : a) m = std::min(m, lambda_min(b));
  return m;
}

// Largest step in (0, 1] keeping X + alpha dX positive definite, scaled by frac.
inline bool max_step(const BlockMatrix& x, const BlockMatrix& dx, double frac, double& alpha) {
  double lam = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].rows() == 1) {
      if (dx[i](0, 0) < 0.0) lam = std::min(lam, dx[i](0, 0) / x[i](0, 0));
      continue;
    }
    Eigen::LLT<Matrix> llt(x[i]);
    if (llt.info() != Eigen::Success) return false;
    Matrix t = llt.matrixL().solve(dx[i]);
    t = llt.matrixL().solve(t.transpose()).transpose();
    lam = std::min(lam, lambda_min(t));
  }
  alpha = (lam < 0.0) ? std::min(1.0, -frac / lam) : 1.0;
  return true;
}

// Drops constraints that are linearly dependent on earlier ones. Returns the kept
// indices; sets `consistent` false when a dropped row has an incompatible rhs.
inline std::vector<int> prune_dependent(const std::vector<std::vector<DirEntry>>& a, const Vector& rhs,
                                        bool& consistent) {
  const int m = static_cast<int>(a.size());
  // Gram matrix via position buckets.
  std::unordered_map<std::uint64_t, std::vector<std::pair<int, double>>> by_pos;
  auto key = [](const DirEntry& e) {
    return (static_cast<std::uint64_t>(e.block) << 42) | (static_cast<std::uint64_t>(e.row) << 21) |
           static_cast<std::uint64_t>(e.col);
  };
  for (int i = 0; i < m; ++i) {
    for (const auto& e : a[i]) by_pos[key(e)].push_back({i, e.value});
  }
  Matrix gram = Matrix::Zero(m, m);
  for (const auto& [k, list] : by_pos) {
    for (const auto& [i, vi] : list) {
      for (const auto& [j, vj] : list) gram(i, j) += vi * vj;
    }
  }

  consistent = true;
  std::vector<int> kept;
  Matrix lower(m, m);  // Cholesky factor of gram over kept rows, built row by row
  int r = 0;
  constexpr double kRankTol = 1e-10;
  for (int j = 0; j < m; ++j) {
    const double gjj = gram(j, j);
    if (gjj <= 0.0) {
      if (std::abs(rhs(j)) > 1e-9) consistent = false;
      continue;
    }
    Vector w(r);
    for (int p = 0; p < r; ++p) {
      double s = gram(kept[p], j);
      for (int q = 0; q < p; ++q) s -= lower(p, q) * w(q);
      w(p) = s / lower(p, p);
    }
    const double resid = gjj - w.squaredNorm();
    if (resid <= kRankTol * gjj) {
      // rhs must follow the same combination: c = L^{-T} w.
      Vector c(r);
      for (int p = r - 1; p >= 0; --p) {
        double s = w(p);
        for (int q = p + 1; q < r; ++q) s -= lower(q, p) * c(q);
        c(p) = s / lower(p, p);
      }
      double predicted = 0.0;
      for (int p = 0; p < r; ++p) predicted += c(p) * rhs(kept[p]);
      if (std::abs(predicted - rhs(j)) > 1e-7 * (1.0 + std::abs(rhs(j)))) consistent = false;
      continue;
    }
    for (int q = 0; q < r; ++q) lower(r, q) = w(q);
    lower(r, r) = std::sqrt(resid);
    kept.push_back(j);
    ++r;
  }
  return kept;
}

}  // namespace detail

/// Solves `problem`. Never throws on numerical trouble; inspect `status`.
/// Throws InvalidArgument on structural errors.
inline Solution solve(const Problem& problem, const Options& opts = {}) {
  problem.validate();
  const auto& sizes = problem.block_sizes;
  const int m_all = problem.num_constraints();

  std::vector<std::vector<detail::DirEntry>> dir_all(m_all);
  for (int i = 0; i < m_all; ++i) dir_all[i] = detail::directional(problem.constraints[i]);

  Solution sol;
  bool consistent = true;
  sol.kept_constraints = detail::prune_dependent(dir_all, problem.rhs, consistent);
  const int m = static_cast<int>(sol.kept_constraints.size());
  std::vector<std::vector<detail::DirEntry>> A(m);
  Vector a(m);
  for (int i = 0; i < m; ++i) {
    A[i] = dir_all[sol.kept_constraints[i]];
    a(i) = problem.rhs(sol.kept_constraints[i]);
  }

  BlockMatrix C = detail::zeros(sizes);
  detail::add_dense(C, problem.objective, 1.0);

  int n_total = 0;
  for (int s : sizes) n_total += s;

  const double a_inf = m > 0 ? a.cwiseAbs().maxCoeff() : 0.0;
  const double c_inf = detail::max_abs(C);
  const double tau = 1.0 + a_inf + c_inf;

  BlockMatrix X = detail::identity(sizes, tau);
  BlockMatrix S = detail::identity(sizes, tau);
  Vector y = Vector::Zero(m);

  sol.status = Status::max_iter;
  if (!consistent) sol.status = Status::infeasible_suspected;

  auto apply_A = [&](const BlockMatrix& w) {
    Vector out(m);
    for (int i = 0; i < m; ++i) out(i) = detail::inner(A[i], w);
    return out;
  };
  auto apply_At = [&](const Vector& v) {
    BlockMatrix out = detail::zeros(sizes);
    for (int i = 0; i < m; ++i) {
      for (const auto& e : A[i]) out[e.block](e.row, e.col) += v(i) * e.value;
    }
    return out;
  };
  auto record = [&](double mu) {
    sol.primal_objective = detail::inner(C, X);
    sol.dual_objective = a.dot(y);
    const Vector rp = a - apply_A(X);
    BlockMatrix rd = apply_At(y);
    for (std::size_t b = 0; b < rd.size(); ++b) rd[b] -= S[b] + C[b];
    sol.primal_residual = m > 0 ? rp.cwiseAbs().maxCoeff() : 0.0;
    sol.dual_residual = detail::max_abs(rd);
    sol.relative_gap = std::abs(sol.primal_objective - sol.dual_objective) /
                       (1.0 + std::abs(sol.primal_objective) + std::abs(sol.dual_objective));
    sol.history.push_back({sol.primal_objective, sol.dual_objective, sol.primal_residual / (1.0 + a_inf),
                           sol.dual_residual / (1.0 + c_inf), mu});
  };

  int growing = 0;
  double prev_mu = std::numeric_limits<double>::infinity();

  struct Saved {
    BlockMatrix X, S;
    Vector y;
    double merit = std::numeric_limits<double>::infinity();
    int iter = -1;
  } best;

  for (int iter = 0; iter <= opts.max_iter && sol.status != Status::infeasible_suspected; ++iter) {
    const double mu = detail::inner(X, S) / n_total;
    record(mu);
    sol.iterations = iter;
    const double pinf = sol.primal_residual / (1.0 + a_inf);
    const double dinf = sol.dual_residual / (1.0 + c_inf);
    const double comp = detail::inner(X, S) /
                        (1.0 + std::abs(sol.primal_objective) + std::abs(sol.dual_objective));
    if (opts.verbose) {
      std::clog << std::setw(4) << iter << std::scientific << std::setprecision(3) << "  pobj "
                << sol.primal_objective << "  dobj " << sol.dual_objective << "  pinf " << pinf << "  dinf "
                << dinf << "  mu " << mu << '\n';
    }
    if (pinf <= opts.feas_tol && dinf <= opts.feas_tol && sol.relative_gap <= opts.gap_tol &&
        comp <= opts.gap_tol) {
      sol.status = Status::optimal;
      break;
    }
    const double merit = std::max({pinf, dinf, sol.relative_gap, comp});
    if (merit <= opts.accept_tol && merit < best.merit) best = {X, S, y, merit, iter};
    if (best.iter >= 0 && (merit > 100.0 * best.merit || iter - best.iter >= opts.stall_window)) break;
    if (iter == opts.max_iter) break;

    growing = (mu > prev_mu) ? growing + 1 : 0;
    prev_mu = mu;
    if (growing >= opts.divergence_window || !std::isfinite(mu) || y.cwiseAbs().maxCoeff() > 1e14 ||
        detail::max_abs(X) > 1e14) {
      sol.status = Status::infeasible_suspected;
      break;
    }

    // S^{-1}, residuals
    BlockMatrix Sinv(sizes.size());
    bool chol_ok = true;
    for (std::size_t b = 0; b < sizes.size(); ++b) {
      Eigen::LLT<Matrix> llt(S[b]);
      if (llt.info() != Eigen::Success) {
        chol_ok = false;
        break;
      }
      Sinv[b] = llt.solve(Matrix::Identity(sizes[b], sizes[b]));
      Sinv[b] = symmetrize(Sinv[b]);
    }
    if (!chol_ok) {
      sol.status = Status::numerical_failure;
      break;
    }
    const Vector rp = a - apply_A(X);
    BlockMatrix Rd = C;  // C - A*(y) + S
    {
      BlockMatrix aty = apply_At(y);
      for (std::size_t b = 0; b < Rd.size(); ++b) Rd[b] += S[b] - aty[b];
    }

    // Schur complement M_ij = tr(A_i X A_j S^{-1}).
    Matrix M = Matrix::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) {
        double s = 0.0;
        for (const auto& ei : A[i]) {
          const Matrix& Xb = X[ei.block];
          const Matrix& Sb = Sinv[ei.block];
          for (const auto& ej : A[j]) {
            if (ej.block != ei.block) continue;
            s += ei.value * ej.value * Xb(ei.col, ej.row) * Sb(ej.col, ei.row);
          }
        }
        M(i, j) = s;
        M(j, i) = s;
      }
    }
    Eigen::LLT<Matrix> schur(M);
    if (schur.info() != Eigen::Success) {
      // Tiny regularization before declaring failure.
      M.diagonal().array() += 1e-14 * (1.0 + M.diagonal().cwiseAbs().maxCoeff());
      schur.compute(M);
      if (schur.info() != Eigen::Success) {
        sol.status = Status::numerical_failure;
        break;
      }
    }

    // Direction for given sigma*mu and optional second-order correction.
    auto direction = [&](double target, const BlockMatrix* corr, BlockMatrix& dX, Vector& dy, BlockMatrix& dS) {
      BlockMatrix w(sizes.size());
      for (std::size_t b = 0; b < sizes.size(); ++b) {
        w[b] = target * Sinv[b] - X[b] + symmetrize(X[b] * Rd[b] * Sinv[b]);
        if (corr) w[b] -= (*corr)[b];
      }
      const Vector rhs = apply_A(w) - rp;
      dy = schur.solve(rhs);
      dy += schur.solve(rhs - M * dy);  // one step of iterative refinement
      dS = apply_At(dy);
      for (std::size_t b = 0; b < sizes.size(); ++b) dS[b] -= Rd[b];
      dX.resize(sizes.size());
      for (std::size_t b = 0; b < sizes.size(); ++b) {
        dX[b] = target * Sinv[b] - X[b] - symmetrize(X[b] * dS[b] * Sinv[b]);
        if (corr) dX[b] -= (*corr)[b];
      }
    };

    BlockMatrix dXa, dSa;
    Vector dya;
    direction(0.0, nullptr, dXa, dya, dSa);
    double ap = 1.0, ad = 1.0;
    if (!detail::max_step(X, dXa, 1.0, ap) || !detail::max_step(S, dSa, 1.0, ad)) {
      sol.status = Status::numerical_failure;
      break;
    }
    double mu_aff = 0.0;
    for (std::size_t b = 0; b < sizes.size(); ++b) {
      mu_aff += (X[b] + ap * dXa[b]).cwiseProduct(S[b] + ad * dSa[b]).sum();
    }
    mu_aff /= n_total;
    double sigma = std::pow(std::max(0.0, mu_aff) / mu, 3.0);
    sigma = std::clamp(sigma, 0.0, 1.0);

    BlockMatrix corr(sizes.size());
    for (std::size_t b = 0; b < sizes.size(); ++b) corr[b] = symmetrize(dXa[b] * dSa[b] * Sinv[b]);
    BlockMatrix dX, dS;
    Vector dy;
    direction(sigma * mu, &corr, dX, dy, dS);
    if (!detail::max_step(X, dX, opts.step_fraction, ap) || !detail::max_step(S, dS, opts.step_fraction, ad)) {
      sol.status = Status::numerical_failure;
      break;
    }
    for (std::size_t b = 0; b < sizes.size(); ++b) {
      X[b] = symmetrize(X[b] + ap * dX[b]);
      S[b] = symmetrize(S[b] + ad * dS[b]);
    }
    y += ad * dy;
  }

  if (sol.status != Status::optimal && best.iter >= 0) {
    X = std::move(best.X);
    S = std::move(best.S);
    y = std::move(best.y);
    sol.status = Status::optimal;
    sol.iterations = best.iter;
    record(detail::inner(X, S) / n_total);
  }
  sol.X = std::move(X);
  sol.S = std::move(S);
  // Report y against the original constraint numbering.
  sol.y = Vector::Zero(m_all);
  for (int i = 0; i < m; ++i) sol.y(sol.kept_constraints[i]) = y(i);
  // Residuals against every original row, including pruned ones.
  {
    double worst = 0.0;
    for (int i = 0; i < m_all; ++i) {
      worst = std::max(worst, std::abs(problem.rhs(i) - detail::inner(dir_all[i], sol.X)));
    }
    sol.primal_residual = worst;
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Text formats.
//
// Problem file:
//   line 1: nblocks
//   line 2: block sizes
//   line 3: nconstraints m
//   line 4: m right-hand-side constants
//   then one "constraint block row col value" line per upper-triangle entry,
//   1-based block/row/col, constraint 0 being the objective C.
// Lines starting with '#' are comments.

namespace detail {

inline std::string fmt17(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline bool next_content_line(std::istream& in, std::string& line, int& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    return true;
  }
  return false;
}

}  // namespace detail

inline void write_problem(std::ostream& out, const Problem& p) {
  out << "# sosmom sdp problem v1\n";
  out << p.block_sizes.size() << '\n';
  for (std::size_t i = 0; i < p.block_sizes.size(); ++i) out << (i ? " " : "") << p.block_sizes[i];
  out << '\n' << p.num_constraints() << '\n';
  for (int i = 0; i < p.num_constraints(); ++i) out << (i ? " " : "") << detail::fmt17(p.rhs(i));
  out << '\n';
  auto dump = [&](int idx, const SparseSym& m) {
    for (const auto& e : m.entries) {
      out << idx << ' ' << e.block + 1 << ' ' << e.row + 1 << ' ' << e.col + 1 << ' ' << detail::fmt17(e.value)
          << '\n';
    }
  };
  dump(0, p.objective);
  for (int i = 0; i < p.num_constraints(); ++i) dump(i + 1, p.constraints[i]);
}

inline Problem read_problem(std::istream& in) {
  Problem p;
  std::string line;
  int lineno = 0;
  if (!detail::next_content_line(in, line, lineno)) throw ParseError("missing header", lineno + 1);
  int nblocks = 0;
  {
    std::istringstream is(line);
    if (!(is >> nblocks) || nblocks <= 0) throw ParseError("bad block count", lineno);
  }
  if (!detail::next_content_line(in, line, lineno)) throw ParseError("missing block sizes", lineno + 1);
  {
    std::istringstream is(line);
    for (int b = 0; b < nblocks; ++b) {
      int s = 0;
      if (!(is >> s) || s <= 0) throw ParseError("bad block size", lineno);
      p.block_sizes.push_back(s);
    }
  }
  if (!detail::next_content_line(in, line, lineno)) throw ParseError("missing constraint count", lineno + 1);
  int m = 0;
  {
    std::istringstream is(line);
    if (!(is >> m) || m < 0) throw ParseError("bad constraint count", lineno);
  }
  p.rhs = Vector::Zero(m);
  p.constraints.assign(m, {});
  if (m > 0) {
    if (!detail::next_content_line(in, line, lineno)) throw ParseError("missing rhs line", lineno + 1);
    std::istringstream is(line);
    for (int i = 0; i < m; ++i) {
      if (!(is >> p.rhs(i))) throw ParseError("rhs line has fewer than " + std::to_string(m) + " values", lineno);
    }
  }
  while (detail::next_content_line(in, line, lineno)) {
    std::istringstream is(line);
    int idx, b, r, c;
    double v;
    if (!(is >> idx >> b >> r >> c >> v)) throw ParseError("expected 'constraint block row col value'", lineno);
    if (idx < 0 || idx > m) throw ParseError("constraint index out of range", lineno);
    if (b < 1 || b > nblocks) throw ParseError("block index out of range", lineno);
    if (r < 1 || c < 1 || r > p.block_sizes[b - 1] || c > p.block_sizes[b - 1]) {
      throw ParseError("entry outside block", lineno);
    }
    SparseSym& target = idx == 0 ? p.objective : p.constraints[idx - 1];
    target.add(b - 1, r - 1, c - 1, v);
  }
  return p;
}

inline void write_solution(std::ostream& out, const Solution& s) {
  out << "status " << to_string(s.status) << '\n';
  out << "primal_objective " << detail::fmt17(s.primal_objective) << '\n';
  out << "dual_objective " << detail::fmt17(s.dual_objective) << '\n';
  out << "relative_gap " << detail::fmt17(s.relative_gap) << '\n';
  out << "primal_residual " << detail::fmt17(s.primal_residual) << '\n';
  out << "iterations " << s.iterations << '\n';
  out << "y";
  for (int i = 0; i < s.y.size(); ++i) out << ' ' << detail::fmt17(s.y(i));
  out << '\n';
  auto blocks = [&](const char* name, const BlockMatrix& bm) {
    for (std::size_t b = 0; b < bm.size(); ++b) {
      out << name << " block " << b + 1 << ' ' << bm[b].rows() << '\n';
      for (int r = 0; r < bm[b].rows(); ++r) {
        for (int c = 0; c < bm[b].cols(); ++c) out << (c ? " " : "") << detail::fmt17(bm[b](r, c));
        out << '\n';
      }
    }
  };
  blocks("X", s.X);
  blocks("S", s.S);
}

}  // namespace sosmom::sdp

#endif  // SOSMOM_SDP_HPP
