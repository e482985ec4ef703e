#ifndef SOSMOM_COV_HPP
#define SOSMOM_COV_HPP

// Median-of-means covariance estimation by gradient descent on certified distances.

#include "sosmom/core.hpp"
#include "sosmom/sampler.hpp"
#include "sosmom/sos.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace sosmom {

enum class Sign { pos, neg };

inline const char* to_string(Sign s) { return s == Sign::pos ? "pos" : "neg"; }

/// Bucket count ceil(3 log2(1/delta)).
inline int buckets_for_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  return std::max(1, static_cast<int>(std::ceil(3.0 * std::log2(1.0 / delta))));
}

struct CovConfig {
  int k = 10;
  double alpha = std::numeric_limits<double>::infinity();
  double epsilon = 1e-3;
  int nit = -1;             // -1: ceil(16 d ln(max(1, d_0 / epsilon)))
  double r_min = 1e-4;
  double r_max = 0.0;       // 0: max_i ||Z_i - x||_2
  double r_step = 1.01;
  double accept = 0.999;
  double certify = 0.001;
  double step_divisor = 4.0;
  BasisMode basis = BasisMode::partial;
  sdp::Options solver;

  void validate() const {
    if (k < 1) throw InvalidArgument("k must be positive");
    if (!(0.0 < certify && certify < accept && accept <= 1.0)) {
      throw InvalidArgument("thresholds must satisfy 0 < certify < accept <= 1");
    }
    if (!(r_min > 0.0)) throw InvalidArgument("r_min must be positive");
    if (!(r_step > 1.0)) throw InvalidArgument("r_step must exceed 1");
    if (nit < -1) throw InvalidArgument("nit must be nonnegative or -1");
    if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
    if (!(step_divisor > 0.0)) throw InvalidArgument("step_divisor must be positive");
  }
};

struct CertResult {
  double value = 0.0;
  PseudoExpectation pe;
  Sign sign = Sign::pos;
  double r = 0.0;

  bool solved() const { return pe.ok(); }
};

/// Maximize pE sum b_i s.t. b_i^2 = b_i, ||u||^2 = 1, pE[+-b_i <Z_i - x, uu'>] >= r pE[b_i].
inline CertResult test_cov_value(const std::vector<Matrix>& Z, const Matrix& x, double r, Sign sign,
                                 BasisMode mode = BasisMode::partial, const sdp::Options& opts = {}) {
  if (Z.empty()) throw InvalidArgument("test_cov_value: no buckets");
  const int d = static_cast<int>(x.rows());
  const int k = static_cast<int>(Z.size());
  for (const auto& z : Z) {
    if (z.rows() != d || z.cols() != d) throw InvalidArgument("test_cov_value: dimension mismatch");
  }
  const Vars v{d, k};
  const double s = sign == Sign::pos ? 1.0 : -1.0;
  Polynomial objective;
  std::vector<Polynomial> eqs{v.norm_sq() - 1.0};
  std::vector<Polynomial> ineqs;
  for (int i = 0; i < k; ++i) {
    objective += v.b(i);
    eqs.push_back(v.b(i) * v.b(i) - v.b(i));
    ineqs.push_back(v.b(i) * v.quadform(s * (Z[i] - x)) - r * v.b(i));
  }
  const auto res = solve_program(objective, eqs, ineqs, MonomialBasis(d, k, mode), opts);
  CertResult out;
  out.value = res.value;
  out.pe = res.pe;
  out.sign = sign;
  out.r = r;
  return out;
}

inline CertResult test_cov_value(const BucketSummary& Z, const Matrix& x, double r, Sign sign,
                                 BasisMode mode = BasisMode::partial, const sdp::Options& opts = {}) {
  return test_cov_value(Z.Z, x, r, sign, mode, opts);
}

/// True when both signed programs stay below certify * k at radius r.
inline bool certify_cov(const std::vector<Matrix>& Z, const Matrix& x, double r, const CovConfig& cfg) {
  const double cap = cfg.certify * static_cast<double>(Z.size());
  for (Sign s : {Sign::pos, Sign::neg}) {
    const auto c = test_cov_value(Z, x, r, s, cfg.basis, cfg.solver);
    if (!c.solved() || c.value >= cap) return false;
  }
  return true;
}

struct DistResult {
  double r = 0.0;
  std::optional<CertResult> winner;  // program reaching accept * k at r
  int probes = 0;
  int grid_index = -1;               // -1 when nothing was accepted
};

namespace detail {

class RadiusGrid {
 public:
  RadiusGrid(double r_min, double r_max, double step) : r_min_(r_min), r_max_(r_max), step_(step) {
    count_ = 1;
    if (r_max > r_min) {
      count_ = 1 + static_cast<int>(std::ceil(std::log(r_max / r_min) / std::log(step) - 1e-12));
    }
  }
  int size() const { return count_; }
  double operator[](int j) const {
    if (j == count_ - 1 && r_max_ > r_min_) return r_max_;
    return r_min_ * std::pow(step_, j);
  }

 private:
  double r_min_, r_max_, step_;
  int count_;
};

}  // namespace detail

/// Largest grid radius at which one of the signed programs reaches accept * k.
/// `hint` is a grid index to start the bracketing search from.
inline DistResult dist_est(const std::vector<Matrix>& Z, const Matrix& x, const CovConfig& cfg, int hint = -1) {
  cfg.validate();
  const int k = static_cast<int>(Z.size());
  double r_max = cfg.r_max;
  if (r_max <= 0.0) {
    for (const auto& z : Z) r_max = std::max(r_max, sym_op_norm(z - x));
  }
  const detail::RadiusGrid grid(cfg.r_min, r_max, cfg.r_step);
  const double need = cfg.accept * k - 1e-7;

  DistResult out;
  std::vector<std::optional<CertResult>> cache(grid.size());
  std::vector<int> known(grid.size(), 0);  // 1 accepted, -1 rejected
  auto accepted = [&](int j) {
    if (known[j] != 0) return known[j] > 0;
    ++out.probes;
    bool ok = false;
    for (Sign s : {Sign::pos, Sign::neg}) {
      auto c = test_cov_value(Z, x, grid[j], s, cfg.basis, cfg.solver);
      if (!c.solved()) {
        log(LogLevel::warn, std::string("dist_est: probe at r=") + std::to_string(grid[j]) + " sign " +
                                to_string(s) + " returned " + sdp::to_string(c.pe.status));
        continue;
      }
      if (c.value >= need) {
        cache[j] = std::move(c);
        ok = true;
        break;
      }
    }
    known[j] = ok ? 1 : -1;
    return ok;
  };

  // Bracket [lo accepted, hi rejected] with virtual ends -1 and size().
  int lo = -1, hi = grid.size();
  const int start = std::clamp(hint, 0, grid.size() - 1);
  if (hint >= 0) {
    if (accepted(start)) {
      lo = start;
      for (int stride = 1; lo + stride < grid.size(); stride *= 2) {
        if (accepted(lo + stride)) {
          lo += stride;
        } else {
          hi = lo + stride;
          break;
        }
      }
    } else {
      hi = start;
      for (int stride = 1; hi - stride >= 0; stride *= 2) {
        if (!accepted(hi - stride)) {
          hi -= stride;
        } else {
          lo = hi - stride;
          break;
        }
      }
    }
  }
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    if (accepted(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.grid_index = lo;
  if (lo < 0) {
    out.r = cfg.r_min;
  } else {
    out.r = grid[lo];
    out.winner = cache[lo];
  }
  return out;
}

inline DistResult dist_est(const BucketSummary& Z, const Matrix& x, const CovConfig& cfg) {
  return dist_est(Z.Z, x, cfg);
}

/// Signed gradient pE[uu'] from a distance estimate's winning program.
inline Matrix gradient_from(const DistResult& dr) {
  if (!dr.winner) throw Error("no gradient available");
  Matrix g = pe_extract_uu(dr.winner->pe);
  return dr.winner->sign == Sign::pos ? g : Matrix(-g);
}

inline Matrix grad_est(const std::vector<Matrix>& Z, const Matrix& x, const CovConfig& cfg) {
  return gradient_from(dist_est(Z, x, cfg));
}

inline Matrix grad_est(const BucketSummary& Z, const Matrix& x, const CovConfig& cfg) {
  return grad_est(Z.Z, x, cfg);
}

struct TraceEntry {
  int t = 0;
  double d_t = 0.0;
  Matrix sigma;
};

struct CovResult {
  Matrix sigma_hat;
  double d_star = 0.0;
  int iterations = 0;
  int nit = 0;
  std::vector<TraceEntry> trace;
};

inline int default_nit(int d, double d0, double epsilon) {
  const double v = std::ceil(16.0 * d * std::log(std::max(1.0, d0 / epsilon)));
  return static_cast<int>(std::min(v, 1e6));
}

/// Descent from Sigma_0 = 0 on bucketed second moments; returns the iterate with the
/// smallest estimated distance.
inline CovResult estimate_covariance(const std::vector<Matrix>& Z, const CovConfig& cfg) {
  cfg.validate();
  if (Z.empty()) throw InvalidArgument("estimate_covariance: no buckets");
  const int d = static_cast<int>(Z.front().rows());
  CovResult out;
  Matrix x = Matrix::Zero(d, d);
  DistResult dr = dist_est(Z, x, cfg);
  out.nit = cfg.nit >= 0 ? cfg.nit : default_nit(d, dr.r, cfg.epsilon);
  out.sigma_hat = x;
  out.d_star = dr.r;
  out.trace.push_back({0, dr.r, x});
  for (int t = 0; t < out.nit; ++t) {
    if (dr.r <= cfg.epsilon || !dr.winner) break;
    const Matrix g = gradient_from(dr);
    x = symmetrize(x + (dr.r / cfg.step_divisor) * g);
    dr = dist_est(Z, x, cfg, dr.grid_index);
    out.iterations = t + 1;
    out.trace.push_back({t + 1, dr.r, x});
    if (dr.r < out.d_star) {
      out.d_star = dr.r;
      out.sigma_hat = x;
    }
  }
  return out;
}

/// Truncation level from trace and spectral norm estimated on a held-out sample.
inline double split_truncation_alpha(const Dataset& held_out, int n, int k, double L) {
  if (held_out.n() < 1) throw InvalidArgument("held-out sample is empty");
  const Matrix s = symmetrize(held_out.samples.transpose() * held_out.samples / static_cast<double>(held_out.n()));
  const double tr = s.trace(), op = sym_op_norm(s);
  if (!(tr > 0.0)) return std::numeric_limits<double>::infinity();
  return compute_truncation_alpha(tr, op, L, n, k);
}

inline CovResult estimate_covariance(const Dataset& data, const CovConfig& cfg) {
  const BucketSummary b = make_buckets(data, cfg.k, cfg.alpha);
  return estimate_covariance(b.Z, cfg);
}

}  // namespace sosmom

#endif  // SOSMOM_COV_HPP
