#ifndef SOSMOM_HARNESS_HPP
#define SOSMOM_HARNESS_HPP

// Tail-probability benchmarks comparing classical and median-of-means estimators.

#include "sosmom/core.hpp"
#include "sosmom/cov.hpp"
#include "sosmom/norm_mean.hpp"
#include "sosmom/regression.hpp"
#include "sosmom/sampler.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace sosmom {

/// Median of k contiguous bucket means; the lower median for even k.
inline double median_of_means_1d(const std::vector<double>& samples, int k) {
  const int n = static_cast<int>(samples.size());
  if (k < 1) throw InvalidArgument("bucket count must be positive");
  if (k > n) throw InvalidArgument("too many buckets");
  const int m = n / k;
  std::vector<double> means(k);
  for (int i = 0; i < k; ++i) {
    double s = 0.0;
    for (int j = i * m; j < (i + 1) * m; ++j) s += samples[j];
    means[i] = s / m;
  }
  const auto mid = means.begin() + (k - 1) / 2;
  std::nth_element(means.begin(), mid, means.end());
  return *mid;
}

inline double median_of_means_1d(const Vector& samples, int k) {
  return median_of_means_1d(std::vector<double>(samples.data(), samples.data() + samples.size()), k);
}

/// Bucket count ceil(3 ln(1/delta)) used by the general-norm estimator.
inline int mean_buckets_for_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  return std::max(1, static_cast<int>(std::ceil(3.0 * std::log(1.0 / delta))));
}

enum class BenchTask { mean1d, cov, regress, mean_norm };

inline const char* to_string(BenchTask t) {
  switch (t) {
    case BenchTask::mean1d: return "mean1d";
    case BenchTask::cov: return "cov";
    case BenchTask::regress: return "regress";
    case BenchTask::mean_norm: return "mean_norm";
  }
  return "unknown";
}

inline BenchTask parse_bench_task(const std::string& s) {
  if (s == "mean1d") return BenchTask::mean1d;
  if (s == "cov") return BenchTask::cov;
  if (s == "regress") return BenchTask::regress;
  if (s == "mean_norm") return BenchTask::mean_norm;
  throw InvalidArgument("unknown task '" + s + "'");
}

/// Estimator names accepted for each task; the first is the classical baseline.
inline std::vector<std::string> bench_estimators(BenchTask t) {
  switch (t) {
    case BenchTask::mean1d: return {"empirical_mean", "median_of_means"};
    case BenchTask::cov: return {"empirical", "sos_mom"};
    case BenchTask::regress: return {"ols", "sos_mom"};
    case BenchTask::mean_norm: return {"empirical_mean", "central_point"};
  }
  return {};
}

struct BenchConfig {
  BenchTask task = BenchTask::mean1d;
  DistSpec dist;
  int n = 1000;
  std::vector<double> deltas{0.01};
  int trials = 100;
  std::uint64_t seed = 1;
  std::vector<std::string> estimators;  // empty: every estimator of the task
  double noise = 1.0;                   // regression noise level
  std::string norm = "l2";              // mean_norm target norm

  std::vector<std::string> resolved_estimators() const {
    return estimators.empty() ? bench_estimators(task) : estimators;
  }

  void validate() const {
    dist.validate();
    if (trials < 1) throw InvalidArgument("trials must be positive");
    if (n < 1) throw InvalidArgument("n must be positive");
    if (deltas.empty()) throw InvalidArgument("delta grid is empty");
    for (double d : deltas)
      if (!(d > 0.0 && d < 1.0)) throw InvalidArgument("delta values must lie in (0, 1)");
    const auto known = bench_estimators(task);
    for (const auto& e : resolved_estimators()) {
      if (std::find(known.begin(), known.end(), e) == known.end()) {
        throw InvalidArgument("estimator '" + e + "' is not available for task " + to_string(task));
      }
    }
    if (task == BenchTask::mean1d && dist.d != 1) throw InvalidArgument("mean1d needs a one-dimensional distribution");
  }
};

struct BenchRow {
  std::string task;
  std::string estimator;
  double delta = 0.0;
  int n = 0;
  int d = 0;
  double quantile_error = 0.0;
  double mean_error = 0.0;
  int trials = 0;
  int failures = 0;
  double runtime_ms = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
};

/// Order statistic ceil((1 - delta) * count) of the errors (1-based, clamped).
inline double tail_quantile(std::vector<double> errors, double delta) {
  if (errors.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(errors.begin(), errors.end());
  const double c = (1.0 - delta) * static_cast<double>(errors.size());
  // guard against (1 - delta) * count landing a hair above an integer
  long idx = static_cast<long>(std::ceil(c - 1e-9));
  idx = std::clamp<long>(idx, 1, static_cast<long>(errors.size()));
  return errors[idx - 1];
}

namespace detail {

inline Vector true_mean(const DistSpec& s) {
  if (s.kind != DistKind::point_mass) return Vector::Zero(s.d);
  return s.transform ? Vector(*s.transform * s.point) : s.point;
}

inline Vector bench_fstar(int d) { return Vector::Ones(d) / std::sqrt(static_cast<double>(d)); }

// One trial's error for every (delta, estimator) pair, in row order.
inline std::vector<std::optional<double>> run_trial(const BenchConfig& cfg, std::uint64_t seed,
                                                    const std::vector<std::string>& ests,
                                                    std::vector<double>& elapsed_ms) {
  const Dataset data = sample_dist(cfg.dist, cfg.n, seed);
  const int d = cfg.dist.d;
  Vector Y;
  if (cfg.task == BenchTask::regress) {
    std::mt19937_64 rng(derive_seed(seed, 1));
    std::normal_distribution<double> g;
    Y = data.samples * bench_fstar(d);
    for (int i = 0; i < cfg.n; ++i) Y(i) += cfg.noise * g(rng);
  }
  std::vector<std::optional<double>> out;
  std::size_t slot = 0;
  for (double delta : cfg.deltas) {
    for (const auto& e : ests) {
      const auto t0 = std::chrono::steady_clock::now();
      std::optional<double> err;
      try {
        switch (cfg.task) {
          case BenchTask::mean1d: {
            const Vector x = data.samples.col(0);
            const double mu = true_mean(cfg.dist)(0);
            const double est = e == "empirical_mean" ? x.mean() : median_of_means_1d(x, buckets_for_delta(delta));
            err = std::abs(est - mu);
            break;
          }
          case BenchTask::cov: {
            const Matrix truth = cfg.dist.sigma();
            Matrix est;
            if (e == "empirical") {
              est = symmetrize(data.samples.transpose() * data.samples / static_cast<double>(cfg.n));
            } else {
              CovConfig cc;
              cc.k = buckets_for_delta(delta);
              est = estimate_covariance(data, cc).sigma_hat;
            }
            err = sym_op_norm(est - truth);
            break;
          }
          case BenchTask::regress: {
            Vector est;
            if (e == "ols") {
              est = ols_init(data.samples, Y);
            } else {
              const RegConfig rc = RegConfig::for_delta(delta);
              est = estimate_regression(RegDataset::with_default_alpha(data.samples, Y, rc.k), rc).f_hat;
            }
            err = (est - bench_fstar(d)).norm();
            break;
          }
          case BenchTask::mean_norm: {
            const auto oracle = make_norm_oracle(cfg.norm);
            const Vector mu = true_mean(cfg.dist);
            Vector est;
            if (e == "empirical_mean") {
              est = data.samples.colwise().mean().transpose();
            } else {
              MeanConfig mc;
              mc.delta = delta;
              est = estimate_mean_norm(data, mc, *oracle).mu;
            }
            err = oracle->primal_norm(est - mu);
            break;
          }
        }
      } catch (const Error& ex) {
        log(LogLevel::warn, std::string("benchmark estimator ") + e + " failed: " + ex.what());
      }
      elapsed_ms[slot++] += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      out.push_back(err);
    }
  }
  return out;
}

}  // namespace detail

/// Trial t draws its data with derive_seed(cfg.seed, t); every estimator and delta
/// sees the same draws. Failed estimator runs are counted, not fatal.
inline BenchReport run_tail_benchmark(const BenchConfig& cfg) {
  cfg.validate();
  const auto ests = cfg.resolved_estimators();
  const std::size_t slots = cfg.deltas.size() * ests.size();
  std::vector<std::vector<double>> errors(slots);
  std::vector<int> failures(slots, 0);
  std::vector<double> elapsed(slots, 0.0);
  for (int t = 0; t < cfg.trials; ++t) {
    const auto res = detail::run_trial(cfg, derive_seed(cfg.seed, static_cast<std::uint64_t>(t)), ests, elapsed);
    for (std::size_t s = 0; s < slots; ++s) {
      if (res[s]) {
        errors[s].push_back(*res[s]);
      } else {
        ++failures[s];
      }
    }
  }
  BenchReport rep;
  std::size_t s = 0;
  for (double delta : cfg.deltas) {
    for (const auto& e : ests) {
      BenchRow row;
      row.task = to_string(cfg.task);
      row.estimator = e;
      row.delta = delta;
      row.n = cfg.n;
      row.d = cfg.dist.d;
      row.trials = cfg.trials;
      row.failures = failures[s];
      row.quantile_error = tail_quantile(errors[s], delta);
      double sum = 0.0;
      for (double x : errors[s]) sum += x;
      row.mean_error = errors[s].empty() ? std::numeric_limits<double>::quiet_NaN() : sum / errors[s].size();
      row.runtime_ms = elapsed[s];
      rep.rows.push_back(row);
      ++s;
    }
  }
  return rep;
}

inline constexpr const char* kBenchCsvHeader = "# sosmom-bench-csv v1";

/// Deterministic CSV; timings go to the run summary instead.
inline void write_bench_csv(std::ostream& out, const BenchReport& rep) {
  out << kBenchCsvHeader << '\n';
  out << "task,estimator,delta,n,d,quantile_error,mean_error,trials,failures\n";
  out << std::setprecision(17);
  for (const auto& r : rep.rows) {
    out << r.task << ',' << r.estimator << ',' << r.delta << ',' << r.n << ',' << r.d << ',' << r.quantile_error << ','
        << r.mean_error << ',' << r.trials << ',' << r.failures << '\n';
  }
}

inline void write_bench_summary(std::ostream& out, const BenchConfig& cfg, const BenchReport& rep) {
  out << "task: " << to_string(cfg.task) << '\n';
  out << "dist: " << to_string(cfg.dist.kind) << '\n';
  out << "n: " << cfg.n << '\n' << "d: " << cfg.dist.d << '\n';
  out << "trials: " << cfg.trials << '\n' << "seed: " << cfg.seed << '\n';
  out << std::setprecision(6);
  for (const auto& r : rep.rows) {
    out << "row: estimator=" << r.estimator << " delta=" << r.delta << " quantile_error=" << r.quantile_error
        << " mean_error=" << r.mean_error << " failures=" << r.failures << " runtime_ms=" << r.runtime_ms << '\n';
  }
}

}  // namespace sosmom

#endif  // SOSMOM_HARNESS_HPP
