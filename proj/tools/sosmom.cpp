// Command-line entry point dispatching to every module.

#include "sosmom/config.hpp"
#include "sosmom/cov.hpp"
#include "sosmom/harness.hpp"
#include "sosmom/io.hpp"
#include "sosmom/norm_mean.hpp"
#include "sosmom/regression.hpp"
#include "sosmom/roadblock.hpp"
#include "sosmom/sdp.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

using namespace sosmom;
using json = nlohmann::json;

namespace {

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

// Writes to --out, or stdout when it is empty or "-".
void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw Error("cannot open '" + out + "' for writing");
  f << text;
  if (!f) throw Error("write to '" + out + "' failed");
}

BasisMode parse_basis(const std::string& s) {
  if (s == "partial") return BasisMode::partial;
  if (s == "full") return BasisMode::full;
  throw InvalidArgument("unknown basis '" + s + "'");
}

struct Globals {
  std::uint64_t seed = 1;
  std::string out;
  std::string config;
  bool verbose = false;
};

struct GenOpts {
  std::string dist = "gaussian";
  int d = 2;
  int n = 1000;
  double nu = 9.0;
  double shape = 2.5;
  double log_sigma = 0.5;
  std::vector<double> point;
  bool response = false;
  double noise = 1.0;
};

DistSpec make_spec(const GenOpts& g) {
  DistSpec s;
  s.kind = parse_dist_kind(g.dist);
  s.d = g.d;
  s.nu = g.nu;
  s.shape = g.shape;
  s.log_sigma = g.log_sigma;
  if (s.kind == DistKind::point_mass) {
    s.point = g.point.empty() ? Vector::Ones(g.d) : Vector(Eigen::Map<const Vector>(g.point.data(), g.point.size()));
  }
  return s;
}

void run_gen(const Globals& gl, const GenOpts& g) {
  const Dataset data = sample_dist(make_spec(g), g.n, gl.seed);
  std::ostringstream os;
  if (!g.response) {
    write_dataset(os, data);
  } else {
    // last column Y = <X, 1/sqrt(d)> + noise
    std::mt19937_64 rng(derive_seed(gl.seed, 1));
    std::normal_distribution<double> nd;
    Matrix xy(data.n(), data.d() + 1);
    xy.leftCols(data.d()) = data.samples;
    xy.col(data.d()) = data.samples * (Vector::Ones(data.d()) / std::sqrt(static_cast<double>(data.d())));
    for (int i = 0; i < data.n(); ++i) xy(i, data.d()) += g.noise * nd(rng);
    write_matrix(os, xy);
  }
  emit(gl.out, os.str());
}

struct CovOpts {
  std::string in;
  int k = 0;
  double delta = 1e-3;
  double trsigma = 0.0;
  double opnorm = 0.0;
  double L = std::sqrt(105.0);
  double eps = 1e-3;
  int nit = -1;
  bool no_truncate = false;
  std::string basis = "partial";
};

void run_cov(const Globals& gl, const CovOpts& o) {
  Dataset data = read_dataset(o.in);
  CovConfig cfg;
  cfg.k = o.k > 0 ? o.k : buckets_for_delta(o.delta);
  cfg.epsilon = o.eps;
  cfg.nit = o.nit;
  cfg.basis = parse_basis(o.basis);
  std::string alpha_source = "none";
  if (!o.no_truncate) {
    if (o.trsigma > 0.0 && o.opnorm > 0.0) {
      cfg.alpha = compute_truncation_alpha(o.trsigma, o.opnorm, o.L, data.n(), cfg.k);
      alpha_source = "given";
    } else {
      // estimate TrSigma and ||Sigma|| on the first half, fit on the second
      const int h = data.n() / 2;
      Dataset first, second;
      first.samples = data.samples.topRows(h);
      second.samples = data.samples.bottomRows(data.n() - h);
      cfg.alpha = split_truncation_alpha(first, second.n(), cfg.k, o.L);
      data = second;
      alpha_source = "sample_split";
    }
  }
  const CovResult res = estimate_covariance(data, cfg);
  json j;
  j["sigma_hat"] = to_json(res.sigma_hat);
  j["d_star"] = res.d_star;
  j["iterations"] = res.iterations;
  j["nit"] = res.nit;
  j["k"] = cfg.k;
  j["alpha"] = std::isinf(cfg.alpha) ? json(nullptr) : json(cfg.alpha);
  j["alpha_source"] = alpha_source;
  j["n_used"] = data.n();
  json trace = json::array();
  for (const auto& t : res.trace) trace.push_back({{"t", t.t}, {"d_t", t.d_t}, {"sigma", to_json(t.sigma)}});
  j["trace"] = trace;
  emit(gl.out, j.dump(2) + "\n");
}

struct RegressOpts {
  std::string in;
  double delta = 1e-3;
  int k = 0;
  std::string basis = "partial";
};

void run_regress(const Globals& gl, const RegressOpts& o) {
  const Matrix xy = read_dataset(o.in).samples;
  if (xy.cols() < 2) throw InvalidArgument("regression input needs d + 1 >= 2 columns (last column is Y)");
  const Matrix X = xy.leftCols(xy.cols() - 1);
  const Vector Y = xy.col(xy.cols() - 1);
  RegConfig cfg = RegConfig::for_delta(o.delta);
  if (o.k > 0) cfg.k = o.k;
  cfg.basis = parse_basis(o.basis);
  const auto data = RegDataset::with_default_alpha(X, Y, cfg.k, cfg.c0);
  const RegResult res = estimate_regression(data, cfg);
  json j;
  j["f_hat"] = to_json(res.f_hat);
  j["ols"] = to_json(res.ols);
  j["steps"] = res.steps;
  j["certified"] = res.certified;
  j["stalled"] = res.stalled;
  j["message"] = res.message;
  j["k"] = cfg.k;
  j["radius"] = regression_radius(data, cfg);
  emit(gl.out, j.dump(2) + "\n");
}

struct MeanOpts {
  std::string in;
  double delta = 1e-2;
  std::string norm = "l2";
  double p = 0.1;
};

void run_mean(const Globals& gl, const MeanOpts& o) {
  const Dataset data = read_dataset(o.in);
  const auto oracle = make_norm_oracle(o.norm);
  MeanConfig cfg;
  cfg.delta = o.delta;
  cfg.p = o.p;
  const MeanResult res = estimate_mean_norm(data, cfg, *oracle);
  json j;
  j["mu"] = to_json(res.mu);
  j["r"] = res.r;
  j["k"] = res.k;
  j["norm"] = o.norm;
  j["probes"] = res.probes;
  emit(gl.out, j.dump(2) + "\n");
}

struct RoadOpts {
  int d = 8;
  int m = 1000;
  std::vector<double> lambda{0.5};
  std::string kase = "planted";
  int trials = 20;
  std::string test = "both";
};

std::vector<std::string> road_tests(const std::string& t) {
  if (t == "both") return {"spectral", "sos"};
  if (t == "spectral" || t == "sos") return {t};
  throw InvalidArgument("unknown test '" + t + "' (expected spectral, sos or both)");
}

SpikeLabel apply_test(const std::string& t, const BlockMixtureInstance& inst, double lambda) {
  return t == "spectral" ? subset_spectral_test(inst, lambda) : sos_spike_test(inst, lambda);
}

void run_road_gen(const Globals& gl, const RoadOpts& o) {
  const auto inst = gen_block_mixture(o.d, o.m, o.lambda.front(), parse_spike_label(o.kase), gl.seed);
  std::ostringstream os;
  write_matrix(os, inst.Y);
  emit(gl.out, os.str());
}

void run_road_test(const Globals& gl, const RoadOpts& o) {
  const auto label = parse_spike_label(o.kase);
  const double lambda = o.lambda.front();
  std::ostringstream os;
  os << "trial,case,test,label,correct\n";
  for (int t = 0; t < o.trials; ++t) {
    const auto inst = gen_block_mixture(o.d, o.m, lambda, label, derive_seed(gl.seed, t));
    for (const auto& name : road_tests(o.test)) {
      const auto got = apply_test(name, inst, lambda);
      os << t << ',' << to_string(label) << ',' << name << ',' << to_string(got) << ',' << (got == label) << '\n';
    }
  }
  emit(gl.out, os.str());
}

// Accuracy over `trials` null and `trials` planted instances per lambda.
void run_road_sweep(const Globals& gl, const RoadOpts& o) {
  std::ostringstream os;
  os << "lambda,test,accuracy,trials\n";
  for (std::size_t li = 0; li < o.lambda.size(); ++li) {
    const double lambda = o.lambda[li];
    for (const auto& name : road_tests(o.test)) {
      int correct = 0;
      for (int c = 0; c < 2; ++c) {
        const auto label = c ? SpikeLabel::planted : SpikeLabel::null;
        for (int t = 0; t < o.trials; ++t) {
          const auto seed = derive_seed(gl.seed, (li * 2 + c) * 1000003ULL + t);
          correct += apply_test(name, gen_block_mixture(o.d, o.m, lambda, label, seed), lambda) == label;
        }
      }
      os << lambda << ',' << name << ',' << static_cast<double>(correct) / (2.0 * o.trials) << ',' << 2 * o.trials
         << '\n';
    }
  }
  emit(gl.out, os.str());
}

struct BenchOpts {
  std::string task = "mean1d";
  GenOpts gen;
  std::vector<double> deltas{0.01};
  int trials = 100;
  std::vector<std::string> estimators;
  std::string norm = "l2";
  std::string summary;
};

void run_bench(const Globals& gl, BenchOpts o) {
  BenchConfig cfg;
  cfg.task = parse_bench_task(o.task);
  if (cfg.task == BenchTask::mean1d) o.gen.d = 1;
  cfg.dist = make_spec(o.gen);
  cfg.n = o.gen.n;
  cfg.deltas = o.deltas;
  cfg.trials = o.trials;
  cfg.seed = gl.seed;
  cfg.estimators = o.estimators;
  cfg.noise = o.gen.noise;
  cfg.norm = o.norm;
  const BenchReport rep = run_tail_benchmark(cfg);
  std::ostringstream csv, sum;
  write_bench_csv(csv, rep);
  emit(gl.out, csv.str());
  write_bench_summary(sum, cfg, rep);
  std::string path = o.summary;
  if (path.empty() && !gl.out.empty() && gl.out != "-") path = gl.out + ".summary.txt";
  if (path.empty()) {
    std::cerr << sum.str();
  } else {
    emit(path, sum.str());
  }
}

struct SdpOpts {
  std::string in;
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  int max_iter = 200;
};

void run_sdp(const Globals& gl, const SdpOpts& o) {
  std::ifstream f(o.in);
  if (!f) throw Error("cannot open '" + o.in + "'");
  const sdp::Problem p = sdp::read_problem(f);
  sdp::Options opts;
  opts.gap_tol = o.gap_tol;
  opts.feas_tol = o.feas_tol;
  opts.max_iter = o.max_iter;
  opts.verbose = gl.verbose;
  const sdp::Solution s = sdp::solve(p, opts);
  std::ostringstream os;
  sdp::write_solution(os, s);
  emit(gl.out, os.str());
}

void add_gen_options(CLI::App* c, GenOpts& g) {
  c->add_option("--dist", g.dist, "gaussian, product_t, product_rademacher, lognormal_product, pareto, point_mass");
  c->add_option("--d", g.d, "dimension");
  c->add_option("--n", g.n, "sample count");
  c->add_option("--nu", g.nu, "product_t degrees of freedom");
  c->add_option("--shape", g.shape, "pareto tail index");
  c->add_option("--log-sigma", g.log_sigma, "lognormal log-scale");
  c->add_option("--point", g.point, "point_mass location")->delimiter(',');
  c->add_option("--noise", g.noise, "regression noise level");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sum-of-squares median-of-means estimators"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals gl;
  app.add_option("--seed", gl.seed, "master random seed");
  app.add_option("--out", gl.out, "output path (stdout when omitted)");
  app.add_option("--config", gl.config, "flat key = value file; keys are flag names");
  app.add_flag("--verbose", gl.verbose, "log solver progress and warnings");

  GenOpts gen;
  auto* c_gen = app.add_subcommand("gen", "sample a dataset");
  add_gen_options(c_gen, gen);
  c_gen->add_flag("--response", gen.response, "append Y = <X, 1/sqrt(d)> + noise as the last column");

  CovOpts cov;
  auto* c_cov = app.add_subcommand("cov", "covariance estimation");
  c_cov->add_option("--in", cov.in, "dataset file")->required();
  c_cov->add_option("--k", cov.k, "bucket count (default ceil(3 log2(1/delta)))");
  c_cov->add_option("--delta", cov.delta, "failure probability");
  c_cov->add_option("--trsigma", cov.trsigma, "trace of Sigma for the truncation level");
  c_cov->add_option("--opnorm", cov.opnorm, "spectral norm of Sigma for the truncation level");
  c_cov->add_option("--L", cov.L, "hypercontractivity constant");
  c_cov->add_option("--eps", cov.eps, "target accuracy");
  c_cov->add_option("--nit", cov.nit, "iteration cap (-1: automatic)");
  c_cov->add_flag("--no-truncate", cov.no_truncate, "skip norm truncation");
  c_cov->add_option("--basis", cov.basis, "partial or full");

  RegressOpts reg;
  auto* c_reg = app.add_subcommand("regress", "linear regression");
  c_reg->add_option("--in", reg.in, "dataset file with Y in the last column")->required();
  c_reg->add_option("--delta", reg.delta, "failure probability");
  c_reg->add_option("--k", reg.k, "bucket count (default ceil(3 log2(1/delta)))");
  c_reg->add_option("--basis", reg.basis, "partial or full");

  MeanOpts mean;
  auto* c_mean = app.add_subcommand("mean", "mean estimation in a general norm");
  c_mean->add_option("--in", mean.in, "dataset file")->required();
  c_mean->add_option("--delta", mean.delta, "failure probability");
  c_mean->add_option("--norm", mean.norm, "l2, l1 or linf");
  c_mean->add_option("--p", mean.p, "central fraction");

  RoadOpts road;
  auto* c_road = app.add_subcommand("roadblock", "single-spike block mixtures");
  c_road->require_subcommand(1);
  c_road->fallthrough();
  auto add_road = [&](CLI::App* c) {
    c->fallthrough();
    c->add_option("--d", road.d, "dimension and block count");
    c->add_option("--m", road.m, "samples per block");
    c->add_option("--lambda", road.lambda, "spike strength(s)")->delimiter(',');
    c->add_option("--case", road.kase, "null or planted");
    c->add_option("--trials", road.trials, "trials per case");
    c->add_option("--test", road.test, "spectral, sos or both");
  };
  auto* r_gen = c_road->add_subcommand("gen", "write one instance");
  auto* r_test = c_road->add_subcommand("test", "label seeded instances");
  auto* r_sweep = c_road->add_subcommand("sweep", "accuracy per lambda");
  for (auto* c : {r_gen, r_test, r_sweep}) add_road(c);

  BenchOpts bench;
  auto* c_bench = app.add_subcommand("bench", "tail-probability benchmark");
  c_bench->add_option("--task", bench.task, "mean1d, cov, regress or mean_norm");
  add_gen_options(c_bench, bench.gen);
  c_bench->add_option("--delta", bench.deltas, "confidence grid")->delimiter(',');
  c_bench->add_option("--trials", bench.trials, "trials");
  c_bench->add_option("--estimators", bench.estimators, "subset of the task's estimators")->delimiter(',');
  c_bench->add_option("--norm", bench.norm, "mean_norm target norm");
  c_bench->add_option("--summary", bench.summary, "run summary path (default <out>.summary.txt)");

  SdpOpts sdpo;
  auto* c_sdp = app.add_subcommand("sdp", "solve an SDP file");
  c_sdp->add_option("--in", sdpo.in, "problem file")->required();
  c_sdp->add_option("--gap-tol", sdpo.gap_tol, "relative gap tolerance");
  c_sdp->add_option("--feas-tol", sdpo.feas_tol, "feasibility tolerance");
  c_sdp->add_option("--max-iter", sdpo.max_iter, "iteration cap");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
      if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (!path.empty()) args = merge_config_args(args, read_flat_config(path));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (gl.verbose) set_log_level(LogLevel::info);
    if (*c_gen) run_gen(gl, gen);
    if (*c_cov) run_cov(gl, cov);
    if (*c_reg) run_regress(gl, reg);
    if (*c_mean) run_mean(gl, mean);
    if (*r_gen) run_road_gen(gl, road);
    if (*r_test) run_road_test(gl, road);
    if (*r_sweep) run_road_sweep(gl, road);
    if (*c_bench) run_bench(gl, bench);
    if (*c_sdp) run_sdp(gl, sdpo);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
