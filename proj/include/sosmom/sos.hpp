#ifndef SOSMOM_SOS_HPP
#define SOSMOM_SOS_HPP

// Degree-4 pseudoexpectation programs over variables (u_1..u_d, b_1..b_k).
//
// Variables are numbered 0..d-1 for u and d..d+k-1 for b. A program is compiled
// to an SDP whose first block is the moment matrix indexed by a degree-2
// monomial basis; inequality constraints get their own 1x1 slack blocks.

#include "sosmom/core.hpp"
#include "sosmom/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace sosmom {

class CompileError : public Error {
 public:
  using Error::Error;
};

/// A monomial: sorted list of variable indices with repetition.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<int> vars) : vars_(std::move(vars)) { std::sort(vars_.begin(), vars_.end()); }

  static Monomial one() { return {}; }
  static Monomial var(int i) { return Monomial({i}); }

  int degree() const { return static_cast<int>(vars_.size()); }
  const std::vector<int>& vars() const { return vars_; }

  Monomial operator*(const Monomial& o) const {
    std::vector<int> v;
    v.reserve(vars_.size() + o.vars_.size());
    std::merge(vars_.begin(), vars_.end(), o.vars_.begin(), o.vars_.end(), std::back_inserter(v));
    Monomial m;
    m.vars_ = std::move(v);
    return m;
  }

  // Graded order: lower degree first, then lexicographic.
  friend bool operator<(const Monomial& a, const Monomial& b) {
    if (a.vars_.size() != b.vars_.size()) return a.vars_.size() < b.vars_.size();
    return a.vars_ < b.vars_;
  }
  friend bool operator==(const Monomial& a, const Monomial& b) { return a.vars_ == b.vars_; }

  /// Human-readable name; `d` separates u from b variables.
  std::string name(int d) const {
    if (vars_.empty()) return "1";
    std::string out;
    std::size_t i = 0;
    while (i < vars_.size()) {
      std::size_t j = i;
      while (j < vars_.size() && vars_[j] == vars_[i]) ++j;
      if (!out.empty()) out += "*";
      const int v = vars_[i];
      out += v < d ? "u" + std::to_string(v + 1) : "b" + std::to_string(v - d + 1);
      if (j - i > 1) out += "^" + std::to_string(j - i);
      i = j;
    }
    return out;
  }

 private:
  std::vector<int> vars_;
};

/// Sparse polynomial with real coefficients. Zero terms are never stored.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(double c) {  // NOLINT: implicit constant promotion is convenient
    if (c != 0.0) terms_[Monomial::one()] = c;
  }
  Polynomial(const Monomial& m, double c = 1.0) {
    if (c != 0.0) terms_[m] = c;
  }

  static Polynomial var(int i) { return Polynomial(Monomial::var(i)); }

  const std::map<Monomial, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
  }

  void add_term(const Monomial& m, double c) {
    if (c == 0.0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  Polynomial& operator+=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  Polynomial& operator*=(double s) {
    if (s == 0.0) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(Polynomial a) { return a *= -1.0; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial out;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
    return out;
  }

 private:
  std::map<Monomial, double> terms_;
};

/// Variable naming for a program with d sphere variables and k indicators.
struct Vars {
  int d = 0;
  int k = 0;
  Polynomial u(int i) const { return Polynomial::var(i); }
  Polynomial b(int j) const { return Polynomial::var(d + j); }

  /// sum_i u_i^2
  Polynomial norm_sq() const {
    Polynomial p;
    for (int i = 0; i < d; ++i) p.add_term(Monomial({i, i}), 1.0);
    return p;
  }
  /// u' M u for symmetric M
  Polynomial quadform(const Matrix& m) const {
    Polynomial p;
    for (int i = 0; i < d; ++i) {
      p.add_term(Monomial({i, i}), m(i, i));
      for (int l = i + 1; l < d; ++l) p.add_term(Monomial({i, l}), m(i, l) + m(l, i));
    }
    return p;
  }
  /// <w, u>
  Polynomial linear(const Vector& w) const {
    Polynomial p;
    for (int i = 0; i < d; ++i) p.add_term(Monomial::var(i), w(i));
    return p;
  }
};

enum class BasisMode { partial, full };

class MonomialBasis {
 public:
  MonomialBasis(int d, int k, BasisMode mode) : d_(d), k_(k), mode_(mode) {
    if (d < 1) throw InvalidArgument("basis: d must be positive");
    if (k < 0) throw InvalidArgument("basis: k must be nonnegative");
    push(Monomial::one());
    for (int v = 0; v < d + k; ++v) push(Monomial::var(v));
    const int quad_vars = mode == BasisMode::partial ? d : d + k;
    for (int i = 0; i < quad_vars; ++i)
      for (int l = i; l < quad_vars; ++l) push(Monomial({i, l}));
  }

  int d() const { return d_; }
  int k() const { return k_; }
  BasisMode mode() const { return mode_; }
  int size() const { return static_cast<int>(entries_.size()); }
  const Monomial& operator[](int i) const { return entries_[i]; }
  const std::vector<Monomial>& entries() const { return entries_; }

  /// Position of m, or -1.
  int index_of(const Monomial& m) const {
    auto it = index_.find(m);
    return it == index_.end() ? -1 : it->second;
  }

 private:
  void push(const Monomial& m) {
    index_.emplace(m, static_cast<int>(entries_.size()));
    entries_.push_back(m);
  }

  int d_, k_;
  BasisMode mode_;
  std::vector<Monomial> entries_;
  std::map<Monomial, int> index_;
};

inline MonomialBasis build_basis(int d, int k, BasisMode mode) { return MonomialBasis(d, k, mode); }

/// An SDP together with the map from monomials to moment-matrix positions.
struct CompiledProgram {
  MonomialBasis basis;
  sdp::Problem problem;
  std::map<Monomial, std::pair<int, int>> layout;  // representative (row <= col)
  int num_inequalities = 0;
  int num_equality_rows = 0;
};

namespace detail {

inline void add_moment(sdp::SparseSym& out, std::pair<int, int> pos, double coef) {
  // <A, X> with an off-diagonal (p,q) entry counts X[p,q] twice.
  out.add(0, pos.first, pos.second, pos.first == pos.second ? coef : 0.5 * coef);
}

// Returns false if a monomial of p has no position.
inline bool linear_form(const std::map<Monomial, std::pair<int, int>>& layout, const Polynomial& p,
                        sdp::SparseSym& out, const Monomial** missing = nullptr) {
  for (const auto& [m, c] : p.terms()) {
    auto it = layout.find(m);
    if (it == layout.end()) {
      if (missing) *missing = &m;
      return false;
    }
    add_moment(out, it->second, c);
  }
  out.compress();
  return true;
}

}  // namespace detail

/// Compiles: maximize pE[objective] s.t. pE[g q] = 0 for each equality g and
/// basis monomial q with g*q representable, pE[h] >= 0 for each inequality h,
/// pE[1] = 1 and moment matrix psd.
inline CompiledProgram compile_program(const Polynomial& objective, const std::vector<Polynomial>& equalities,
                                       const std::vector<Polynomial>& inequalities, const MonomialBasis& basis) {
  CompiledProgram cp{basis, {}, {}, 0, 0};
  const int n = basis.size();
  const int d = basis.d();
  auto& prob = cp.problem;
  prob.block_sizes.push_back(n);
  for (std::size_t j = 0; j < inequalities.size(); ++j) prob.block_sizes.push_back(1);

  std::vector<double> rhs;
  // Each monomial is read from its most balanced position (degrees of the two basis
  // factors closest), so low-degree moments come from the psd sub-blocks.
  for (int p = 0; p < n; ++p) {
    for (int q = p; q < n; ++q) {
      const Monomial m = basis[p] * basis[q];
      auto [it, inserted] = cp.layout.try_emplace(m, std::make_pair(p, q));
      if (inserted) continue;
      const auto& [p0, q0] = it->second;
      if (std::abs(basis[p].degree() - basis[q].degree()) < std::abs(basis[p0].degree() - basis[q0].degree())) {
        it->second = {p, q};
      }
    }
  }
  // Moment consistency: every pair with the same product shares one value.
  for (int p = 0; p < n; ++p) {
    for (int q = p; q < n; ++q) {
      const auto it = cp.layout.find(basis[p] * basis[q]);
      if (it->second == std::make_pair(p, q)) continue;
      sdp::SparseSym row;
      detail::add_moment(row, {p, q}, 1.0);
      detail::add_moment(row, it->second, -1.0);
      prob.constraints.push_back(std::move(row));
      rhs.push_back(0.0);
    }
  }
  {
    sdp::SparseSym row;
    row.add(0, 0, 0, 1.0);
    prob.constraints.push_back(std::move(row));
    rhs.push_back(1.0);
  }
  for (const auto& g : equalities) {
    for (int q = 0; q < n; ++q) {
      const Polynomial gq = g * Polynomial(basis[q]);
      if (gq.degree() > 4) continue;
      sdp::SparseSym row;
      if (!detail::linear_form(cp.layout, gq, row)) continue;
      if (row.empty()) continue;
      prob.constraints.push_back(std::move(row));
      rhs.push_back(0.0);
      ++cp.num_equality_rows;
    }
  }
  for (std::size_t j = 0; j < inequalities.size(); ++j) {
    sdp::SparseSym row;
    const Monomial* missing = nullptr;
    if (!detail::linear_form(cp.layout, inequalities[j], row, &missing)) {
      throw CompileError("inequality " + std::to_string(j + 1) + " uses unrepresentable term " + missing->name(d));
    }
    // pE[h] - s = 0 with s >= 0 in its own block
    row.add(static_cast<int>(j + 1), 0, 0, -1.0);
    // The constant part of h moves into the moment (0,0) entry, already handled by
    // the layout since the monomial 1 maps to X[0,0].
    prob.constraints.push_back(std::move(row));
    rhs.push_back(0.0);
    ++cp.num_inequalities;
  }
  {
    const Monomial* missing = nullptr;
    if (!detail::linear_form(cp.layout, objective, prob.objective, &missing)) {
      throw CompileError("objective uses unrepresentable term " + missing->name(d));
    }
  }
  prob.rhs = Eigen::Map<Vector>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  return cp;
}

struct PseudoExpectation {
  int d = 0;
  int k = 0;
  std::map<Monomial, double> moments;
  Matrix moment_matrix;
  sdp::Status status = sdp::Status::numerical_failure;
  double relative_gap = 0.0;
  double primal_residual = 0.0;
  double value = 0.0;  // objective at the solution

  bool ok() const { return status == sdp::Status::optimal; }
};

struct ProgramResult {
  double value = 0.0;
  PseudoExpectation pe;
};

inline PseudoExpectation extract_pe(const CompiledProgram& cp, const sdp::Solution& sol) {
  PseudoExpectation pe;
  pe.d = cp.basis.d();
  pe.k = cp.basis.k();
  pe.moment_matrix = sol.X.empty() ? Matrix() : sol.X[0];
  pe.status = sol.status;
  pe.relative_gap = sol.relative_gap;
  pe.primal_residual = sol.primal_residual;
  pe.value = sol.primal_objective;
  if (!sol.X.empty()) {
    for (const auto& [m, pos] : cp.layout) pe.moments[m] = sol.X[0](pos.first, pos.second);
  }
  return pe;
}

inline ProgramResult solve_program(const CompiledProgram& cp, const sdp::Options& opts = {}) {
  const sdp::Solution sol = sdp::solve(cp.problem, opts);
  ProgramResult r;
  r.pe = extract_pe(cp, sol);
  r.value = sol.primal_objective;
  return r;
}

inline ProgramResult solve_program(const Polynomial& objective, const std::vector<Polynomial>& equalities,
                                   const std::vector<Polynomial>& inequalities, const MonomialBasis& basis,
                                   const sdp::Options& opts = {}) {
  return solve_program(compile_program(objective, equalities, inequalities, basis), opts);
}

/// Linear combination of stored moments.
inline double pe_eval(const PseudoExpectation& pe, const Polynomial& p) {
  double s = 0.0;
  for (const auto& [m, c] : p.terms()) {
    auto it = pe.moments.find(m);
    if (it == pe.moments.end()) throw Error("pe_eval: missing moment " + m.name(pe.d));
    s += c * it->second;
  }
  return s;
}

/// d x d matrix of pE[u_i u_j].
inline Matrix pe_extract_uu(const PseudoExpectation& pe) {
  Matrix g(pe.d, pe.d);
  for (int i = 0; i < pe.d; ++i)
    for (int j = i; j < pe.d; ++j) g(i, j) = g(j, i) = pe_eval(pe, Polynomial(Monomial({i, j})));
  return g;
}

/// d-vector of pE[u_i].
inline Vector pe_extract_u(const PseudoExpectation& pe) {
  Vector v(pe.d);
  for (int i = 0; i < pe.d; ++i) v(i) = pe_eval(pe, Polynomial::var(i));
  return v;
}

/// Maximum of pE sum_i <u, M_i u> over pseudoexpectations on the unit sphere.
inline ProgramResult max_pe_quadform(const std::vector<Matrix>& mats, BasisMode mode = BasisMode::partial,
                                     const sdp::Options& opts = {}) {
  if (mats.empty()) throw InvalidArgument("max_pe_quadform: no matrices");
  const int d = static_cast<int>(mats.front().rows());
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& m : mats) {
    if (m.rows() != d || m.cols() != d) throw InvalidArgument("max_pe_quadform: dimension mismatch");
    sum += m;
  }
  const Vars v{d, 0};
  const MonomialBasis basis(d, 0, mode);
  ProgramResult r = solve_program(v.quadform(symmetrize(sum)), {v.norm_sq() - 1.0}, {}, basis, opts);
  if (!r.pe.ok()) {
    throw Error(std::string("max_pe_quadform: solver status ") + sdp::to_string(r.pe.status));
  }
  return r;
}

/// Right-hand side of the SoS matrix Bernstein bound.
inline double sos_bernstein_bound(double R, double sigma, int k, double d, int r) {
  if (R < 0.0 || sigma < 0.0) throw InvalidArgument("sos_bernstein_bound: R and sigma must be nonnegative");
  const double l = std::numbers::ln2 + r * std::log(d);
  return 2.0 * l / 3.0 * R + 2.0 * std::sqrt(2.0 * k * l) * sigma;
}

}  // namespace sosmom

#endif  // SOSMOM_SOS_HPP
