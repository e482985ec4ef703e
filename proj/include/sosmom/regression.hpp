#ifndef SOSMOM_REGRESSION_HPP
#define SOSMOM_REGRESSION_HPP

// Heavy-tailed linear regression by certified descent from the least-squares fit.

#include "sosmom/core.hpp"
#include "sosmom/cov.hpp"
#include "sosmom/sos.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace sosmom {

struct RegConfig {
  int k = 10;
  double delta = 1e-3;
  double r = 0.0;            // 0: sqrt((d + ln(1/delta)) / n)
  double feasible = 0.998;
  double certify_cap = 0.1;
  double noise_cap = 0.001;
  double c_up = 1.01;
  double c_low = 0.99;
  double contraction = 0.999;
  double c_cert = 10.0;
  double c0 = 3.0;           // truncation alpha = c0 sqrt(d)
  double loss_margin = 0.97;
  int s_probes = 40;
  int max_steps = 10000;
  BasisMode basis = BasisMode::partial;
  sdp::Options solver;

  static RegConfig for_delta(double delta) {
    RegConfig c;
    c.delta = delta;
    c.k = buckets_for_delta(delta);
    return c;
  }

  void validate() const {
    if (k < 1) throw InvalidArgument("k must be positive");
    if (!(0.0 < certify_cap && certify_cap < feasible && feasible <= 1.0)) {
      throw InvalidArgument("thresholds must satisfy 0 < certify_cap < feasible <= 1");
    }
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
    if (s_probes < 2) throw InvalidArgument("s_probes must be at least 2");
  }
};

/// Pairs (X_i, Y_i) with the truncated copies and per-bucket statistics.
class RegDataset {
 public:
  RegDataset(Matrix X, Vector Y, int k, double alpha) : X_(std::move(X)), Y_(std::move(Y)), k_(k), alpha_(alpha) {
    if (X_.rows() != Y_.size()) throw InvalidArgument("X and Y have different sample counts");
    if (X_.rows() < 1 || X_.cols() < 1) throw InvalidArgument("empty regression data");
    if (k < 1) throw InvalidArgument("bucket count must be positive");
    if (k > X_.rows()) throw InvalidArgument("too many buckets");
    Xt_ = X_;
    Yt_ = Y_;
    if (!std::isinf(alpha)) {
      for (Eigen::Index i = 0; i < X_.rows(); ++i) {
        if (X_.row(i).norm() > alpha) {
          Xt_.row(i).setZero();
          Yt_(i) = 0.0;
        }
      }
    }
    const int m = n() / k;
    for (int i = 0; i < k; ++i) {
      const auto xb = Xt_.middleRows(static_cast<Eigen::Index>(i) * m, m);
      const auto yb = Yt_.segment(static_cast<Eigen::Index>(i) * m, m);
      sigma_.push_back(symmetrize(xb.transpose() * xb / static_cast<double>(m)));
      xy_.push_back(xb.transpose() * yb / static_cast<double>(m));
      yy_.push_back(yb.squaredNorm() / m);
    }
  }

  /// Uses alpha = c0 sqrt(d).
  static RegDataset with_default_alpha(Matrix X, Vector Y, int k, double c0 = 3.0) {
    const double alpha = c0 * std::sqrt(static_cast<double>(X.cols()));
    return RegDataset(std::move(X), std::move(Y), k, alpha);
  }

  int n() const { return static_cast<int>(X_.rows()); }
  int d() const { return static_cast<int>(X_.cols()); }
  int k() const { return k_; }
  double alpha() const { return alpha_; }
  const Matrix& X() const { return X_; }
  const Vector& Y() const { return Y_; }
  const Matrix& X_truncated() const { return Xt_; }
  const Vector& Y_truncated() const { return Yt_; }

  /// E_{B_i} X X'
  const Matrix& bucket_sigma(int i) const { return sigma_[i]; }
  /// E_{B_i} X Y
  const Vector& bucket_xy(int i) const { return xy_[i]; }
  /// E_{B_i} Y^2
  double bucket_yy(int i) const { return yy_[i]; }

  /// <Y - g, f>_i = f' c_i
  Vector correlation(int i, const Vector& g) const { return xy_[i] - sigma_[i] * g; }

  /// L_i(g) = E_{B_i} (g'X - Y)^2
  double loss(int i, const Vector& g) const { return g.dot(sigma_[i] * g) - 2.0 * g.dot(xy_[i]) + yy_[i]; }

 private:
  Matrix X_, Xt_;
  Vector Y_, Yt_;
  int k_;
  double alpha_;
  std::vector<Matrix> sigma_;
  std::vector<Vector> xy_;
  std::vector<double> yy_;
};

inline double default_radius(int d, int n, double delta) {
  return std::sqrt((d + std::log(1.0 / delta)) / static_cast<double>(n));
}

/// Least-squares fit via the pseudoinverse (minimum-norm solution).
inline Vector ols_init(const Matrix& X, const Vector& Y) {
  if (X.rows() != Y.size()) throw InvalidArgument("X and Y have different sample counts");
  if (X.isZero(0.0)) return Vector::Zero(X.cols());
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(X);
  return cod.solve(Y);
}

inline Vector ols_init(const RegDataset& data) { return ols_init(data.X(), data.Y()); }

/// Maximize pE sum b_i s.t. b_i^2 = b_i, ||f||^2 = 1, pE[b_i <Y - g, f>_i] >= r pE[b_i].
inline ProgramResult noise_sdp_value(const RegDataset& data, const Vector& g, double r,
                                     BasisMode mode = BasisMode::partial, const sdp::Options& opts = {}) {
  const int d = data.d(), k = data.k();
  if (g.size() != d) throw InvalidArgument("noise_sdp_value: g has wrong dimension");
  const Vars v{d, k};
  Polynomial objective;
  std::vector<Polynomial> eqs{v.norm_sq() - 1.0};
  std::vector<Polynomial> ineqs;
  for (int i = 0; i < k; ++i) {
    objective += v.b(i);
    eqs.push_back(v.b(i) * v.b(i) - v.b(i));
    ineqs.push_back(v.b(i) * v.linear(data.correlation(i, g)) - r * v.b(i));
  }
  return solve_program(objective, eqs, ineqs, MonomialBasis(d, k, mode), opts);
}

enum class NormSide { upper, lower };

/// Maximize pE sum b_i ||f||^2 s.t. pE ||f||^4 <= 1, b_i^2 = b_i and
/// pE b_i ||f||_i^2 >= c pE b_i ||f||^2 (upper) or <= (lower).
inline ProgramResult norm_sdp_value(const RegDataset& data, NormSide side, double c,
                                    BasisMode mode = BasisMode::partial, const sdp::Options& opts = {}) {
  if (!(c > 0.0)) throw InvalidArgument("norm_sdp_value: c must be positive");
  const int d = data.d(), k = data.k();
  const Vars v{d, k};
  const Polynomial nsq = v.norm_sq();
  Polynomial objective;
  std::vector<Polynomial> eqs;
  std::vector<Polynomial> ineqs{1.0 - nsq * nsq};
  for (int i = 0; i < k; ++i) {
    objective += v.b(i) * nsq;
    eqs.push_back(v.b(i) * v.b(i) - v.b(i));
    const Polynomial gap = v.b(i) * v.quadform(data.bucket_sigma(i)) - c * v.b(i) * nsq;
    ineqs.push_back(side == NormSide::upper ? gap : -gap);
  }
  return solve_program(objective, eqs, ineqs, MonomialBasis(d, k, mode), opts);
}

inline double regression_radius(const RegDataset& data, const RegConfig& cfg) {
  return cfg.r > 0.0 ? cfg.r : default_radius(data.d(), data.n(), cfg.delta);
}

/// True when the noise program at radius c_cert * r stays below certify_cap * k.
inline bool certify_done(const RegDataset& data, const Vector& g, const RegConfig& cfg, double radius = -1.0) {
  const double rho = radius > 0.0 ? radius : cfg.c_cert * regression_radius(data, cfg);
  const auto res = noise_sdp_value(data, g, rho, cfg.basis, cfg.solver);
  if (!res.pe.ok()) {
    log(LogLevel::warn, std::string("certify_done: solver status ") + sdp::to_string(res.pe.status));
    return false;
  }
  return res.value < cfg.certify_cap * data.k();
}

/// Feasibility program for one step length s: maximize pE sum b_i subject to
/// b_i^2 = b_i, ||f - g||^2 = s^2, pE b_i (L_i(g) - margin s^2 - L_i(f)) >= 0.
/// Solved in the variable w = (f - g) / s on the unit sphere, where the bucket
/// constraint reads pE b_i (2 <w, c_i> - s (w' S_i w + margin)) >= 0.
/// Returns the program in w; the step is g + s pE[w].
inline ProgramResult descent_probe(const RegDataset& data, const Vector& g, double s, const RegConfig& cfg) {
  if (!(s > 0.0)) throw InvalidArgument("descent_probe: s must be positive");
  const int d = data.d(), k = data.k();
  const Vars v{d, k};
  Polynomial objective;
  std::vector<Polynomial> eqs{v.norm_sq() - 1.0};
  std::vector<Polynomial> ineqs;
  for (int i = 0; i < k; ++i) {
    objective += v.b(i);
    eqs.push_back(v.b(i) * v.b(i) - v.b(i));
    const Polynomial gain = 2.0 * v.linear(data.correlation(i, g)) - s * v.quadform(data.bucket_sigma(i)) -
                            s * cfg.loss_margin * v.norm_sq();
    ineqs.push_back(v.b(i) * gain);
  }
  return solve_program(objective, eqs, ineqs, MonomialBasis(d, k, cfg.basis), cfg.solver);
}

struct DescentStep {
  bool certified = false;
  Vector next;
  double s = 0.0;
  int probes = 0;
};

class DescentStalled : public Error {
 public:
  using Error::Error;
};

/// One step: CERTIFY, or the first moment of the program at the largest feasible s.
inline DescentStep descent_step(const RegDataset& data, const Vector& g, const RegConfig& cfg) {
  cfg.validate();
  DescentStep out;
  if (certify_done(data, g, cfg)) {
    out.certified = true;
    out.next = g;
    return out;
  }
  const double r = regression_radius(data, cfg);
  const double y_scale = std::sqrt(data.Y().squaredNorm() / data.n());
  const double hi_bound = std::max(1.1 * (g.norm() + y_scale), 2.0 * r);
  const double need = cfg.feasible * data.k() - 1e-7;

  std::optional<ProgramResult> best;
  double best_s = 0.0;
  auto feasible = [&](double s) {
    ++out.probes;
    auto res = descent_probe(data, g, s, cfg);
    if (!res.pe.ok() || res.value < need) return false;
    best = std::move(res);
    best_s = s;
    return true;
  };

  // Geometric bisection for the largest feasible s in [r, hi_bound].
  double lo = r, hi = hi_bound;
  if (feasible(hi)) {
    lo = hi;
  } else if (feasible(lo)) {
    while (out.probes < cfg.s_probes) {
      const double mid = std::sqrt(lo * hi);
      if (feasible(mid)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
  }
  if (!best) {
    throw DescentStalled("descent stalled: no feasible step length in [" + std::to_string(r) + ", " +
                         std::to_string(hi_bound) + "] after " + std::to_string(out.probes) + " probes");
  }
  out.s = best_s;
  out.next = g + best_s * pe_extract_u(best->pe);
  return out;
}

struct RegResult {
  Vector f_hat;
  int steps = 0;
  bool certified = false;
  bool stalled = false;
  Vector ols;
  std::string message;
};

inline int regression_step_budget(double initial_distance, double r, const RegConfig& cfg) {
  if (!(initial_distance > r)) return 1;
  const double steps = 2.0 * std::ceil(std::log(initial_distance / r) / std::log(1.0 / cfg.contraction));
  return static_cast<int>(std::min<double>(steps, cfg.max_steps));
}

inline RegResult estimate_regression(const RegDataset& data, const RegConfig& cfg) {
  cfg.validate();
  RegResult out;
  out.ols = ols_init(data);
  Vector g = out.ols;
  const double r = regression_radius(data, cfg);
  const double y_scale = std::sqrt(data.Y().squaredNorm() / data.n());
  const int budget = regression_step_budget(g.norm() + y_scale, r, cfg);
  for (int step = 0; step < budget; ++step) {
    try {
      const DescentStep ds = descent_step(data, g, cfg);
      if (ds.certified) {
        out.certified = true;
        break;
      }
      g = ds.next;
      out.steps = step + 1;
    } catch (const DescentStalled& e) {
      out.stalled = true;
      out.message = e.what();
      break;
    }
  }
  out.f_hat = g;
  return out;
}

}  // namespace sosmom

#endif  // SOSMOM_REGRESSION_HPP
