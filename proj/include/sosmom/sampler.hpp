#ifndef SOSMOM_SAMPLER_HPP
#define SOSMOM_SAMPLER_HPP

// Heavy-tailed sample generators, norm truncation and bucketed second moments.

#include "sosmom/core.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace sosmom {

enum class DistKind { gaussian, product_t, product_rademacher, lognormal_product, pareto, point_mass };

inline const char* to_string(DistKind k) {
  switch (k) {
    case DistKind::gaussian: return "gaussian";
    case DistKind::product_t: return "product_t";
    case DistKind::product_rademacher: return "product_rademacher";
    case DistKind::lognormal_product: return "lognormal_product";
    case DistKind::pareto: return "pareto";
    case DistKind::point_mass: return "point_mass";
  }
  return "unknown";
}

inline DistKind parse_dist_kind(const std::string& s) {
  if (s == "gaussian") return DistKind::gaussian;
  if (s == "product_t" || s == "t") return DistKind::product_t;
  if (s == "product_rademacher" || s == "rademacher") return DistKind::product_rademacher;
  if (s == "lognormal_product" || s == "lognormal") return DistKind::lognormal_product;
  if (s == "pareto") return DistKind::pareto;
  if (s == "point_mass") return DistKind::point_mass;
  throw InvalidArgument("unknown distribution '" + s + "'");
}

/// Distribution description. Base coordinates are independent, mean zero and unit
/// variance; samples are transform * base. Pareto and lognormal coordinates are
/// made mean zero (centring and pair-differencing respectively).
struct DistSpec {
  DistKind kind = DistKind::gaussian;
  int d = 1;
  double nu = 9.0;           // product_t degrees of freedom
  double shape = 2.5;        // pareto tail index
  double log_sigma = 0.5;    // lognormal log-scale
  Vector point;              // point_mass location
  std::optional<Matrix> transform;

  /// Builds a spec whose covariance is `sigma` via a symmetric square root.
  void set_covariance(const Matrix& sigma) {
    if (sigma.rows() != d || sigma.cols() != d) throw InvalidArgument("covariance has wrong dimension");
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + sigma.cwiseAbs().maxCoeff())) {
      throw InvalidArgument("covariance target is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(sigma));
    if (es.eigenvalues().minCoeff() < -1e-12 * (1.0 + es.eigenvalues().cwiseAbs().maxCoeff())) {
      throw InvalidArgument("covariance target is not positive semidefinite");
    }
    const Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    transform = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
  }

  void validate() const {
    if (d < 1) throw InvalidArgument("dimension must be positive");
    if (kind == DistKind::product_t && !(nu > 8.0)) {
      throw InvalidArgument("product_t needs nu > 8 for eight finite moments");
    }
    if (kind == DistKind::pareto && !(shape > 2.0)) throw InvalidArgument("pareto needs tail index > 2");
    if (kind == DistKind::lognormal_product && !(log_sigma > 0.0)) {
      throw InvalidArgument("lognormal needs positive log-scale");
    }
    if (kind == DistKind::point_mass && point.size() != d) throw InvalidArgument("point_mass location has wrong size");
    if (transform && (transform->rows() != d || transform->cols() != d)) {
      throw InvalidArgument("transform must be d x d");
    }
  }

  /// Population second moment: A A' (or A v v' A' for a point mass).
  Matrix sigma() const {
    validate();
    const Matrix a = transform ? *transform : Matrix::Identity(d, d);
    if (kind == DistKind::point_mass) {
      const Vector v = a * point;
      return v * v.transpose();
    }
    return a * a.transpose();
  }
};

namespace detail {

inline double double_factorial(int n) {
  double r = 1.0;
  for (int i = n; i > 1; i -= 2) r *= i;
  return r;
}

// E T^{2j} for Student t with nu degrees of freedom, nu > 2j.
inline double t_even_moment(double nu, int j) {
  return std::pow(nu, j) * std::exp(std::lgamma(j + 0.5) + std::lgamma(nu / 2.0 - j) - std::lgamma(0.5) -
                                    std::lgamma(nu / 2.0));
}

// E (A - B)^p for iid lognormal(0, s^2).
inline double lognormal_diff_moment(double s, int p) {
  double total = 0.0;
  for (int j = 0; j <= p; ++j) {
    const double binom = std::exp(std::lgamma(p + 1.0) - std::lgamma(j + 1.0) - std::lgamma(p - j + 1.0));
    const double ea = std::exp(0.5 * j * j * s * s), eb = std::exp(0.5 * (p - j) * (p - j) * s * s);
    total += ((j % 2) ? -1.0 : 1.0) * binom * ea * eb;
  }
  return total;
}

}  // namespace detail

/// Eighth-to-second moment ratio of one base coordinate, m8 / m2^4.
inline double coordinate_kurtosis8(const DistSpec& spec) {
  switch (spec.kind) {
    case DistKind::gaussian: return 105.0;
    case DistKind::product_t: {
      const double m2 = detail::t_even_moment(spec.nu, 1);
      return detail::t_even_moment(spec.nu, 4) / std::pow(m2, 4);
    }
    case DistKind::product_rademacher: return 1.0;
    case DistKind::lognormal_product: {
      const double m2 = detail::lognormal_diff_moment(spec.log_sigma, 2);
      return detail::lognormal_diff_moment(spec.log_sigma, 8) / std::pow(m2, 4);
    }
    case DistKind::pareto: return std::numeric_limits<double>::infinity();
    case DistKind::point_mass: return 1.0;
  }
  return std::numeric_limits<double>::infinity();
}

/// Hypercontractivity constant L with E<X,u>^8 <= L^2 (E<X,u>^2)^4. For products of
/// independent coordinates the Gaussian value 105 is the floor.
inline double nice_constant(const DistSpec& spec) {
  if (spec.kind == DistKind::point_mass) return 1.0;
  return std::sqrt(std::max(coordinate_kurtosis8(spec), 105.0));
}

struct Dataset {
  Matrix samples;
  std::uint64_t seed = 0;
  std::optional<DistSpec> spec;

  int n() const { return static_cast<int>(samples.rows()); }
  int d() const { return static_cast<int>(samples.cols()); }
};

inline Dataset sample_dist(const DistSpec& spec, int n, std::uint64_t seed) {
  spec.validate();
  if (n < 1) throw InvalidArgument("sample count must be positive");
  const int d = spec.d;
  std::mt19937_64 rng(seed);
  Matrix base(n, d);
  switch (spec.kind) {
    case DistKind::gaussian: {
      std::normal_distribution<double> g;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) base(i, j) = g(rng);
      break;
    }
    case DistKind::product_t: {
      std::student_t_distribution<double> t(spec.nu);
      const double scale = std::sqrt((spec.nu - 2.0) / spec.nu);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) base(i, j) = scale * t(rng);
      break;
    }
    case DistKind::product_rademacher: {
      std::bernoulli_distribution coin(0.5);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) base(i, j) = coin(rng) ? 1.0 : -1.0;
      break;
    }
    case DistKind::lognormal_product: {
      std::lognormal_distribution<double> ln(0.0, spec.log_sigma);
      const double sd = std::sqrt(detail::lognormal_diff_moment(spec.log_sigma, 2));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) {
          const double a = ln(rng), b = ln(rng);
          base(i, j) = (a - b) / sd;
        }
      break;
    }
    case DistKind::pareto: {
      // Pareto(shape, scale 1), centred and scaled to unit variance.
      const double a = spec.shape;
      const double mean = a / (a - 1.0);
      const double sd = std::sqrt(a / ((a - 1.0) * (a - 1.0) * (a - 2.0)));
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) {
          const double x = std::pow(1.0 - u(rng), -1.0 / a);
          base(i, j) = (x - mean) / sd;
        }
      break;
    }
    case DistKind::point_mass:
      base = spec.point.transpose().replicate(n, 1);
      break;
  }
  Dataset out;
  out.samples = spec.transform ? Matrix(base * spec.transform->transpose()) : base;
  out.seed = seed;
  out.spec = spec;
  return out;
}

/// Zeroes rows whose Euclidean norm exceeds alpha; alpha = +inf keeps everything.
inline Dataset truncate_samples(const Dataset& data, double alpha) {
  if (!(alpha > 0.0)) throw InvalidArgument("truncation radius must be positive");
  Dataset out = data;
  if (std::isinf(alpha)) return out;
  for (int i = 0; i < out.n(); ++i) {
    if (out.samples.row(i).norm() > alpha) out.samples.row(i).setZero();
  }
  return out;
}

struct BucketSummary {
  std::vector<Matrix> Z;
  int k = 0;
  int m = 0;
  double alpha = std::numeric_limits<double>::infinity();

  int d() const { return Z.empty() ? 0 : static_cast<int>(Z.front().rows()); }
};

/// Contiguous buckets of size floor(n/k); the tail remainder is dropped.
inline BucketSummary make_buckets(const Dataset& data, int k, double alpha) {
  if (k < 1) throw InvalidArgument("bucket count must be positive");
  if (k > data.n()) throw InvalidArgument("too many buckets");
  const Dataset t = truncate_samples(data, alpha);
  BucketSummary out;
  out.k = k;
  out.m = t.n() / k;
  out.alpha = alpha;
  out.Z.reserve(k);
  for (int i = 0; i < k; ++i) {
    const auto block = t.samples.middleRows(static_cast<Eigen::Index>(i) * out.m, out.m);
    Matrix z = block.transpose() * block / static_cast<double>(out.m);
    out.Z.push_back(symmetrize(z));
  }
  return out;
}

/// alpha = (L * opNorm * n / (trSigma * sqrt(k)))^{1/4} * sqrt(trSigma)
inline double compute_truncation_alpha(double tr_sigma, double op_norm, double L, int n, int k) {
  if (!(tr_sigma > 0.0) || !(op_norm > 0.0) || !(L > 0.0) || n < 1 || k < 1) {
    throw InvalidArgument("truncation parameters must be positive");
  }
  return std::pow(L * op_norm * n / (tr_sigma * std::sqrt(static_cast<double>(k))), 0.25) * std::sqrt(tr_sigma);
}

}  // namespace sosmom

#endif  // SOSMOM_SAMPLER_HPP
