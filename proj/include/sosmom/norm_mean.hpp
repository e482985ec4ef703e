#ifndef SOSMOM_NORM_MEAN_HPP
#define SOSMOM_NORM_MEAN_HPP

// Mean estimation in a general norm through (r, p)-central points of bucket means.

#include "sosmom/core.hpp"
#include "sosmom/sampler.hpp"

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sosmom {

/// Halfspace {u : <normal, u> <= offset}.
struct Halfspace {
  Vector normal;
  double offset = 0.0;
};

/// Norm described through a separation oracle for its dual unit ball B*.
class NormOracle {
 public:
  virtual ~NormOracle() = default;
  virtual std::string name() const = 0;
  /// Empty when w lies in B*, otherwise a halfspace containing B* but not w.
  virtual std::optional<Halfspace> separation(const Vector& w) const = 0;
  /// Upper bound on sup over B* of the Euclidean norm.
  virtual double norm_equiv_R(int d) const = 0;
  /// Upper bound on the Euclidean norm of primal unit vectors.
  virtual double primal_to_l2(int d) const = 0;
  virtual double primal_norm(const Vector& x) const = 0;
};

class L2Norm : public NormOracle {
 public:
  std::string name() const override { return "l2"; }
  std::optional<Halfspace> separation(const Vector& w) const override {
    const double n = w.norm();
    if (n <= 1.0) return std::nullopt;
    return Halfspace{w / n, 1.0};
  }
  double norm_equiv_R(int) const override { return 1.0; }
  double primal_to_l2(int) const override { return 1.0; }
  double primal_norm(const Vector& x) const override { return x.norm(); }
};

class L1Norm : public NormOracle {
 public:
  std::string name() const override { return "l1"; }
  std::optional<Halfspace> separation(const Vector& w) const override {
    Eigen::Index j = 0;
    const double m = w.cwiseAbs().maxCoeff(&j);
    if (m <= 1.0) return std::nullopt;
    Vector a = Vector::Zero(w.size());
    a(j) = w(j) > 0 ? 1.0 : -1.0;
    return Halfspace{a, 1.0};
  }
  double norm_equiv_R(int d) const override { return std::sqrt(static_cast<double>(d)); }
  double primal_to_l2(int) const override { return 1.0; }
  double primal_norm(const Vector& x) const override { return x.lpNorm<1>(); }
};

class LinfNorm : public NormOracle {
 public:
  std::string name() const override { return "linf"; }
  std::optional<Halfspace> separation(const Vector& w) const override {
    if (w.lpNorm<1>() <= 1.0) return std::nullopt;
    Vector a(w.size());
    for (Eigen::Index j = 0; j < w.size(); ++j) a(j) = w(j) > 0 ? 1.0 : (w(j) < 0 ? -1.0 : 0.0);
    return Halfspace{a, 1.0};
  }
  double norm_equiv_R(int) const override { return 1.0; }
  double primal_to_l2(int d) const override { return std::sqrt(static_cast<double>(d)); }
  double primal_norm(const Vector& x) const override { return x.lpNorm<Eigen::Infinity>(); }
};

inline std::unique_ptr<NormOracle> make_norm_oracle(const std::string& name) {
  if (name == "l2") return std::make_unique<L2Norm>();
  if (name == "l1") return std::make_unique<L1Norm>();
  if (name == "linf") return std::make_unique<LinfNorm>();
  throw InvalidArgument("unknown norm '" + name + "' (expected l2, l1 or linf)");
}

struct CentralQuery {
  std::vector<Vector> Z;
  double r = 0.0;
  double p = 0.1;

  int k() const { return static_cast<int>(Z.size()); }
  int d() const { return Z.empty() ? 0 : static_cast<int>(Z.front().size()); }
  int violators() const { return static_cast<int>(std::floor(p * k())) + 1; }

  void validate() const {
    if (Z.empty()) throw InvalidArgument("central query needs at least one point");
    for (const auto& z : Z)
      if (z.size() != Z.front().size()) throw InvalidArgument("central query points differ in dimension");
    if (!(r >= 0.0)) throw InvalidArgument("radius must be nonnegative");
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("p must lie in [0, 1]");
  }
};

inline constexpr int kMaxCentralBuckets = 24;

inline void check_enumeration_guard(int k) {
  if (k > kMaxCentralBuckets) {
    throw InvalidArgument("central-point search enumerates 2^k subsets; k = " + std::to_string(k) +
                          " exceeds " + std::to_string(kMaxCentralBuckets) + ", use fewer buckets");
  }
}

/// Per-bucket sample means over contiguous buckets of size floor(n/k).
inline std::vector<Vector> bucket_means(const Dataset& data, int k) {
  if (k < 1) throw InvalidArgument("bucket count must be positive");
  if (k > data.n()) throw InvalidArgument("too many buckets");
  const int m = data.n() / k;
  std::vector<Vector> out;
  out.reserve(k);
  for (int i = 0; i < k; ++i) {
    out.push_back(data.samples.middleRows(static_cast<Eigen::Index>(i) * m, m).colwise().mean().transpose());
  }
  return out;
}

namespace detail {

// Deep-cut ellipsoid {c + P^{1/2} v : |v| <= 1}; in one dimension an exact interval.
class Ellipsoid {
 public:
  Ellipsoid(const Vector& center, double radius)
      : c_(center), P_(Matrix::Identity(center.size(), center.size()) * radius * radius) {
    d_ = static_cast<int>(center.size());
    log_vol_ = d_ * std::log(radius);
    lo_ = center.size() ? center(0) - radius : 0.0;
    hi_ = center.size() ? center(0) + radius : 0.0;
  }

  const Vector& center() const { return c_; }
  /// log of the volume relative to the unit ball.
  double log_volume() const { return log_vol_; }

  /// Intersect with {u : <a, u> <= b}; returns false once the set is empty.
  bool cut(const Vector& a, double b) {
    if (d_ == 1) {
      const double s = a(0);
      if (s == 0.0) return b >= 0.0;
      if (s > 0) {
        hi_ = std::min(hi_, b / s);
      } else {
        lo_ = std::max(lo_, b / s);
      }
      if (lo_ > hi_) return false;
      c_(0) = 0.5 * (lo_ + hi_);
      const double w = 0.5 * (hi_ - lo_);
      P_(0, 0) = w * w;
      log_vol_ = w > 0 ? std::log(w) : -std::numeric_limits<double>::infinity();
      return true;
    }
    const Vector Pa = P_ * a;
    const double q = a.dot(Pa);
    if (!(q > 0.0)) return b >= a.dot(c_);
    const double sq = std::sqrt(q);
    const double alpha = (a.dot(c_) - b) / sq;
    if (alpha >= 1.0) return false;
    if (alpha <= -1.0 / d_) return true;  // cut misses the ellipsoid
    const double dd = d_;
    const double tau = (1.0 + dd * alpha) / (dd + 1.0);
    const double sigma = 2.0 * (1.0 + dd * alpha) / ((dd + 1.0) * (1.0 + alpha));
    const double delta = dd * dd * (1.0 - alpha * alpha) / (dd * dd - 1.0);
    c_ -= (tau / sq) * Pa;
    P_ = delta * (P_ - (sigma / q) * Pa * Pa.transpose());
    P_ = symmetrize(P_);
    log_vol_ += 0.5 * (dd * std::log(delta) + std::log1p(-sigma));
    return true;
  }

 private:
  Vector c_;
  Matrix P_;
  int d_ = 0;
  double log_vol_ = 0.0;
  double lo_ = 0.0, hi_ = 0.0;
};

inline double relative_emptiness_tol() { return 1e-9; }

/// Finds u in B* with <a_i, u> > r for every row a_i, or reports emptiness once the
/// localizing ellipsoid is smaller than a ball of radius 1e-9 R.
inline std::optional<Vector> find_in_dual_slab(const std::vector<Vector>& A, double r, const NormOracle& oracle,
                                               int d) {
  const double R = oracle.norm_equiv_R(d);
  Ellipsoid e(Vector::Zero(d), R);
  const double stop = d * std::log(relative_emptiness_tol() * R);
  const int max_iter = 50 + 4 * (d + 1) * (d + 1) * 25;
  for (int it = 0; it < max_iter; ++it) {
    if (e.log_volume() < stop) return std::nullopt;
    const Vector& u = e.center();
    if (auto h = oracle.separation(u)) {
      if (!e.cut(h->normal, h->offset)) return std::nullopt;
      continue;
    }
    bool violated = false;
    for (const auto& a : A) {
      if (!(a.dot(u) > r)) {
        if (!e.cut(-a, -r)) return std::nullopt;
        violated = true;
        break;
      }
    }
    if (!violated) return u;
  }
  return std::nullopt;
}

template <class F>
bool for_each_subset(int k, int s, F&& f) {
  std::vector<int> idx(s);
  for (int i = 0; i < s; ++i) idx[i] = i;
  if (s > k) return false;
  while (true) {
    if (f(idx)) return true;
    int i = s - 1;
    while (i >= 0 && idx[i] == k - s + i) --i;
    if (i < 0) return false;
    ++idx[i];
    for (int j = i + 1; j < s; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

struct CentralCheck {
  bool central = true;
  Vector u;             // witness direction in B* when not central
  std::vector<int> T;   // indices with <Z_i - x, u> > r
};

/// Decides whether x is (r, p)-central: no subset T of floor(pk) + 1 buckets admits a
/// u in B* with <Z_i - x, u> > r for all i in T.
inline CentralCheck is_central(const CentralQuery& q, const Vector& x, const NormOracle& oracle) {
  q.validate();
  check_enumeration_guard(q.k());
  if (x.size() != q.d()) throw InvalidArgument("is_central: point has wrong dimension");
  CentralCheck out;
  const int s = q.violators();
  std::vector<Vector> A(s);
  detail::for_each_subset(q.k(), s, [&](const std::vector<int>& T) {
    for (int i = 0; i < s; ++i) A[i] = q.Z[T[i]] - x;
    if (auto u = detail::find_in_dual_slab(A, q.r, oracle, q.d())) {
      out.central = false;
      out.u = *u;
      out.T = T;
      return true;
    }
    return false;
  });
  return out;
}

/// Largest number of buckets deviating from x by more than r in one direction of B*.
inline int gen_tst_value(const std::vector<Vector>& Z, const Vector& x, double r, const NormOracle& oracle) {
  CentralQuery q{Z, r, 0.0};
  q.validate();
  check_enumeration_guard(q.k());
  if (x.size() != q.d()) throw InvalidArgument("gen_tst_value: point has wrong dimension");
  std::vector<Vector> A;
  for (int s = q.k(); s >= 1; --s) {
    A.resize(s);
    const bool hit = detail::for_each_subset(q.k(), s, [&](const std::vector<int>& T) {
      for (int i = 0; i < s; ++i) A[i] = Z[T[i]] - x;
      return detail::find_in_dual_slab(A, r, oracle, q.d()).has_value();
    });
    if (hit) return s;
  }
  return 0;
}

/// Center and radius of a ball enclosing all points (Badoiu-Clarkson iterations).
inline std::pair<Vector, double> enclosing_ball(const std::vector<Vector>& Z) {
  Vector c = Z.front();
  for (int t = 1; t <= 200; ++t) {
    std::size_t far = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < Z.size(); ++i) {
      const double dist = (Z[i] - c).norm();
      if (dist > best) best = dist, far = i;
    }
    c += (Z[far] - c) / (t + 1.0);
  }
  double rad = 0.0;
  for (const auto& z : Z) rad = std::max(rad, (z - c).norm());
  return {c, rad};
}

/// Ellipsoid search over the (convex) central set; empty once the localizer is smaller
/// than a Euclidean ball of radius r / 100.
inline std::optional<Vector> find_central_point(const CentralQuery& q, const NormOracle& oracle) {
  q.validate();
  check_enumeration_guard(q.k());
  const int d = q.d();
  auto [c0, rad] = enclosing_ball(q.Z);
  if (rad == 0.0 && is_central(q, c0, oracle).central) return c0;
  const double R0 = rad + q.r * oracle.primal_to_l2(d);
  if (q.r <= 0.0) {
    // only a common point can be central at radius zero
    return is_central(q, c0, oracle).central ? std::optional<Vector>(c0) : std::nullopt;
  }
  detail::Ellipsoid e(c0, R0);
  const double stop = d * std::log(q.r / 100.0);
  for (int it = 0; it < 100000; ++it) {
    const Vector x = e.center();
    const auto chk = is_central(q, x, oracle);
    if (chk.central) return x;
    if (e.log_volume() < stop) return std::nullopt;
    double lo = std::numeric_limits<double>::infinity();
    for (int i : chk.T) lo = std::min(lo, q.Z[i].dot(chk.u));
    // every central y keeps <y, u> >= min_T <Z_i, u> - r
    if (!e.cut(-chk.u, q.r - lo)) return std::nullopt;
  }
  return std::nullopt;
}

struct MeanConfig {
  double delta = 0.01;
  double p = 0.1;
  double c_buckets = 3.0;
  int max_halvings = 60;

  int buckets() const {
    return std::max(1, static_cast<int>(std::ceil(c_buckets * std::log(1.0 / delta))));
  }
};

struct MeanResult {
  Vector mu;
  double r = 0.0;
  int k = 0;
  int probes = 0;
};

/// Halves r from d * max ||Z_i - Z_j||_2 while a central point exists; returns the
/// central point at the smallest feasible radius.
inline MeanResult estimate_mean_norm(const Dataset& data, const MeanConfig& cfg, const NormOracle& oracle) {
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  if (data.n() < 64 && cfg.delta <= std::ldexp(1.0, -data.n())) {
    throw InvalidArgument("delta must exceed 2^-n");
  }
  MeanResult out;
  out.k = cfg.buckets();
  const auto Z = bucket_means(data, out.k);
  check_enumeration_guard(out.k);
  double spread = 0.0;
  for (std::size_t i = 0; i < Z.size(); ++i)
    for (std::size_t j = i + 1; j < Z.size(); ++j) spread = std::max(spread, (Z[i] - Z[j]).norm());
  CentralQuery q{Z, data.d() * spread, cfg.p};
  if (spread == 0.0) {
    out.mu = Z.front();
    return out;
  }
  std::optional<Vector> best;
  for (int h = 0; h <= cfg.max_halvings; ++h) {
    ++out.probes;
    auto x = find_central_point(q, oracle);
    if (!x) break;
    best = x;
    out.r = q.r;
    q.r *= 0.5;
  }
  if (!best) throw Error("no central point found at the initial radius");
  out.mu = *best;
  return out;
}

}  // namespace sosmom

#endif  // SOSMOM_NORM_MEAN_HPP
