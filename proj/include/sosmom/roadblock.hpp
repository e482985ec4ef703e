#ifndef SOSMOM_ROADBLOCK_HPP
#define SOSMOM_ROADBLOCK_HPP

// Single-spike block mixtures: generator, subset spectral test, SoS test and the
// Hermite moment computations behind the low-degree analysis.

#include "sosmom/core.hpp"
#include "sosmom/sos.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace sosmom {

enum class SpikeLabel { null, planted };

inline const char* to_string(SpikeLabel l) { return l == SpikeLabel::null ? "null" : "planted"; }

inline SpikeLabel parse_spike_label(const std::string& s) {
  if (s == "null") return SpikeLabel::null;
  if (s == "planted") return SpikeLabel::planted;
  throw InvalidArgument("unknown case '" + s + "' (expected null or planted)");
}

struct SpikeHidden {
  Vector x;  // entries +-1/sqrt(d)
  Vector s;  // block signs +-1
};

/// d blocks of m samples each; rows i*m .. (i+1)*m - 1 form block i.
struct BlockMixtureInstance {
  Matrix Y;
  SpikeLabel label = SpikeLabel::null;
  std::optional<SpikeHidden> hidden;
  double lambda = 0.0;
  int d = 0;
  int m = 0;
  std::uint64_t seed = 0;

  /// Second moment of block i.
  Matrix block_moment(int i) const {
    const auto blk = Y.middleRows(static_cast<Eigen::Index>(i) * m, m);
    return symmetrize(blk.transpose() * blk / static_cast<double>(m));
  }
};

inline BlockMixtureInstance gen_block_mixture(int d, int m, double lambda, SpikeLabel label, std::uint64_t seed) {
  if (d < 1 || m < 1) throw InvalidArgument("d and m must be positive");
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be nonnegative");
  if (!(lambda < 1.0)) throw InvalidArgument("lambda must be below 1 (covariance Id - lambda xx' must stay PSD)");
  BlockMixtureInstance inst;
  inst.label = label;
  inst.lambda = lambda;
  inst.d = d;
  inst.m = m;
  inst.seed = seed;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  inst.Y.resize(static_cast<Eigen::Index>(m) * d, d);
  for (Eigen::Index i = 0; i < inst.Y.rows(); ++i)
    for (int j = 0; j < d; ++j) inst.Y(i, j) = g(rng);
  if (label == SpikeLabel::null) return inst;

  std::bernoulli_distribution coin(0.5);
  SpikeHidden h;
  h.x.resize(d);
  h.s.resize(d);
  for (int j = 0; j < d; ++j) h.x(j) = (coin(rng) ? 1.0 : -1.0) / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < d; ++i) h.s(i) = coin(rng) ? 1.0 : -1.0;
  // y = g + c <g, x> x has covariance Id + ((1 + c)^2 - 1) xx'
  for (int i = 0; i < d; ++i) {
    const double c = std::sqrt(1.0 + h.s(i) * lambda) - 1.0;
    auto blk = inst.Y.middleRows(static_cast<Eigen::Index>(i) * m, m);
    const Vector proj = blk * h.x;
    blk += c * proj * h.x.transpose();
  }
  inst.hidden = h;
  return inst;
}

inline constexpr int kMaxSpectralDim = 16;

/// Planted iff some block subset S with |S| >= d/4 has
/// lambda_max(sum_{i in S} (Sigma_i - Id)) > lambda |S| / 2.
inline SpikeLabel subset_spectral_test(const BlockMixtureInstance& inst, double lambda) {
  const int d = inst.d;
  if (d > kMaxSpectralDim) {
    throw InvalidArgument("subset_spectral_test enumerates 2^d subsets; d = " + std::to_string(d) + " exceeds " +
                          std::to_string(kMaxSpectralDim));
  }
  std::vector<Matrix> dev;
  for (int i = 0; i < d; ++i) dev.push_back(inst.block_moment(i) - Matrix::Identity(d, d));
  const double min_size = d / 4.0;
  for (std::uint32_t mask = 1; mask < (1u << d); ++mask) {
    const int size = __builtin_popcount(mask);
    if (size < min_size) continue;
    Matrix sum = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i)
      if (mask & (1u << i)) sum += dev[i];
    if (lambda_max(sum) > lambda * size / 2.0) return SpikeLabel::planted;
  }
  return SpikeLabel::null;
}

/// max pE sum_i b_i <Sigma_i - Id, uu'> subject to b_i^2 = b_i, ||u||^2 = 1.
inline ProgramResult sos_spike_value(const BlockMixtureInstance& inst, BasisMode mode = BasisMode::partial,
                                     const sdp::Options& opts = {}) {
  const int d = inst.d;
  const Vars v{d, d};
  Polynomial objective;
  std::vector<Polynomial> eqs{v.norm_sq() - 1.0};
  for (int i = 0; i < d; ++i) {
    objective += v.b(i) * v.quadform(inst.block_moment(i) - Matrix::Identity(d, d));
    eqs.push_back(v.b(i) * v.b(i) - v.b(i));
  }
  auto res = solve_program(objective, eqs, {}, MonomialBasis(d, d, mode), opts);
  if (!res.pe.ok()) throw Error(std::string("sos_spike_test: solver status ") + sdp::to_string(res.pe.status));
  return res;
}

inline SpikeLabel sos_spike_test(const BlockMixtureInstance& inst, double lambda, BasisMode mode = BasisMode::partial,
                                 const sdp::Options& opts = {}) {
  return sos_spike_value(inst, mode, opts).value >= lambda * inst.d / 4.0 ? SpikeLabel::planted : SpikeLabel::null;
}

/// Sparse multi-index: variable -> positive power.
using HermiteIndex = std::map<int, int>;

inline int total_degree(const HermiteIndex& a) {
  int t = 0;
  for (const auto& [v, p] : a) {
    if (p < 1) throw InvalidArgument("multi-index entries must be positive");
    t += p;
  }
  return t;
}

inline double double_factorial_odd(int n) {
  double r = 1.0;
  for (int i = n; i > 1; i -= 2) r *= i;
  return r;
}

/// Probabilists' Hermite polynomial He_n(z).
inline double hermite_poly(int n, double z) {
  if (n == 0) return 1.0;
  double prev = 1.0, cur = z;
  for (int j = 1; j < n; ++j) {
    const double next = z * cur - j * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// prod_v He_{alpha_v}(y_v).
inline double hermite_eval(const HermiteIndex& a, const Vector& y) {
  double r = 1.0;
  for (const auto& [v, p] : a) r *= hermite_poly(p, y(v));
  return r;
}

/// E H_alpha(y) for y ~ N(0, Id + lambda xx').
inline double hermite_single_moment(const HermiteIndex& alpha, double lambda, const Vector& x) {
  if (std::abs(lambda) * x.squaredNorm() > 1.0 + 1e-12) throw InvalidArgument("need |lambda| ||x||^2 <= 1");
  const int t = total_degree(alpha);
  if (t % 2) return 0.0;
  double mono = 1.0;
  for (const auto& [v, p] : alpha) {
    if (v < 0 || v >= x.size()) throw InvalidArgument("multi-index coordinate out of range");
    mono *= std::pow(x(v), p);
  }
  return double_factorial_odd(t - 1) * std::pow(lambda, t / 2) * mono;
}

/// Variable index of coordinate c of sample j (sample-major, matching the rows of Y).
inline int planted_var(int sample, int coord, int d) { return sample * d + coord; }

/// E over (x, s, y) of H_alpha(y) for the planted block mixture, alpha indexed by planted_var.
inline double hermite_planted_moment(const HermiteIndex& alpha, double lambda, int d, int m) {
  const int samples = d * m;
  std::vector<int> per_sample(samples, 0), per_row(d, 0), per_block(d, 0);
  int t = 0;
  for (const auto& [v, p] : alpha) {
    if (v < 0 || v >= samples * d) throw InvalidArgument("multi-index variable out of range");
    if (p < 1) throw InvalidArgument("multi-index entries must be positive");
    per_sample[v / d] += p;
    per_row[v % d] += p;
    per_block[(v / d) / m] += p;
    t += p;
  }
  for (int b : per_block)
    if (b % 4) return 0.0;
  for (int s : per_sample)
    if (s % 2) return 0.0;
  for (int r : per_row)
    if (r % 2) return 0.0;
  double prod = 1.0;
  for (int s : per_sample) prod *= double_factorial_odd(s - 1);
  return std::pow(lambda / d, t / 2) * prod;
}

inline constexpr double kMaxLowDegreeIndices = 1e7;

/// Number of multi-indices of total degree <= t over n variables, C(n + t, t).
inline double multi_index_count(int n, int t) {
  return std::exp(std::lgamma(n + t + 1.0) - std::lgamma(t + 1.0) - std::lgamma(n + 1.0));
}

/// sum over |alpha| <= t of (E H_alpha(y))^2 under the planted distribution, constant term included.
inline double low_degree_norm(int t, double lambda, int d, int m) {
  if (t < 0) throw InvalidArgument("degree must be nonnegative");
  if (d < 1 || m < 1) throw InvalidArgument("d and m must be positive");
  const int n = d * d * m;
  if (multi_index_count(n, t) > kMaxLowDegreeIndices) {
    throw InvalidArgument("low_degree_norm: search space exceeds 1e7 multi-indices, use smaller t, d or m");
  }
  double total = 1.0;
  HermiteIndex alpha;
  // exhaustive recursion over variables in increasing order
  auto rec = [&](auto&& self, int next, int remaining) -> void {
    if (!alpha.empty()) {
      const double e = hermite_planted_moment(alpha, lambda, d, m);
      total += e * e;
    }
    for (int v = next; v < n; ++v) {
      for (int p = 1; p <= remaining; ++p) {
        alpha[v] = p;
        self(self, v + 1, remaining - p);
      }
      alpha.erase(v);
    }
  };
  rec(rec, 0, t);
  return total;
}

}  // namespace sosmom

#endif  // SOSMOM_ROADBLOCK_HPP
