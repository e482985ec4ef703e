#include <catch_amalgamated.hpp>

#include "sosmom/sdp.hpp"

#include <random>
#include <sstream>

using namespace sosmom;
using namespace sosmom::sdp;
using Catch::Approx;

namespace {

Problem trace_one_2x2() {
  Problem p;
  p.block_sizes = {2};
  SparseSym tr;
  tr.add(0, 0, 0, 1.0);
  tr.add(0, 1, 1, 1.0);
  p.constraints = {tr};
  p.rhs = Vector::Constant(1, 1.0);
  return p;
}

// Random maximize <C,X> s.t. Tr X = 1 over one PSD block: optimum lambda_max(C).
Problem random_eig_problem(int n, std::mt19937_64& rng, Matrix& c_dense) {
  std::normal_distribution<double> g;
  c_dense = Matrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) c_dense(i, j) = c_dense(j, i) = g(rng);
  Problem p;
  p.block_sizes = {n};
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) p.objective.add(0, i, j, c_dense(i, j));
  SparseSym tr;
  for (int i = 0; i < n; ++i) tr.add(0, i, i, 1.0);
  p.constraints = {tr};
  p.rhs = Vector::Constant(1, 1.0);
  return p;
}

}  // namespace

TEST_CASE("maximize X11 with unit trace hits the extreme point") {
  Problem p = trace_one_2x2();
  p.objective.add(0, 0, 0, 1.0);
  const Solution s = solve(p);
  REQUIRE(s.status == Status::optimal);
  CHECK(s.objective() == Approx(1.0).margin(1e-7));
  CHECK(s.X[0](0, 0) == Approx(1.0).margin(1e-6));
  CHECK(s.X[0](1, 1) == Approx(0.0).margin(1e-6));
  CHECK(std::abs(s.X[0](0, 1)) < 1e-6);
}

TEST_CASE("minimize trace subject to fixed trace") {
  Problem p;
  p.block_sizes = {2};
  SparseSym c;
  c.add(0, 0, 0, 1.0);
  c.add(0, 1, 1, 1.0);
  p.constraints = {c};
  p.rhs = Vector::Constant(1, 2.0);
  // minimize Tr X == maximize -Tr X
  p.objective.add(0, 0, 0, -1.0);
  p.objective.add(0, 1, 1, -1.0);
  const Solution s = solve(p);
  REQUIRE(s.status == Status::optimal);
  CHECK(-s.objective() == Approx(2.0).margin(1e-7));
}

TEST_CASE("off-diagonal objective matches brute force over angles") {
  Problem p = trace_one_2x2();
  p.objective.add(0, 0, 1, 1.0);  // X12 + X21
  const Solution s = solve(p);
  REQUIRE(s.status == Status::optimal);
  // rank-one X = vv', v = (cos t, sin t): value sin(2t)
  double best = -1.0;
  for (int i = 0; i <= 100000; ++i) {
    const double t = M_PI * i / 100000.0;
    best = std::max(best, 2.0 * std::cos(t) * std::sin(t));
  }
  CHECK(s.objective() == Approx(best).margin(1e-7));
  CHECK(s.objective() == Approx(1.0).margin(1e-7));
}

TEST_CASE("random eigenvalue programs match the eigensolver") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix c;
    const Problem p = random_eig_problem(2 + trial % 6, rng, c);
    const Solution s = solve(p);
    REQUIRE(s.status == Status::optimal);
    CHECK(s.objective() == Approx(lambda_max(c)).margin(1e-6));
    CHECK(s.dual_objective == Approx(lambda_max(c)).margin(1e-6));
  }
}

TEST_CASE("optimal status implies the documented tolerances") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix c;
    const Problem p = random_eig_problem(4, rng, c);
    const Solution s = solve(p);
    REQUIRE(s.status == Status::optimal);
    CHECK(s.relative_gap <= 1e-6);
    CHECK(s.primal_residual <= 1e-6 * (1.0 + p.rhs.cwiseAbs().maxCoeff()));
    for (const auto& b : s.X) CHECK(lambda_min(b) >= -1e-8);
  }
}

TEST_CASE("weak duality along feasible iterates") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix c;
    const Problem p = random_eig_problem(5, rng, c);
    const Solution s = solve(p);
    REQUIRE(s.status == Status::optimal);
    for (const auto& it : s.history) {
      if (it.primal_infeasibility <= 1e-9 && it.dual_infeasibility <= 1e-9) {
        CHECK(it.primal_objective <= it.dual_objective + 1e-8);
      }
    }
    CHECK(s.primal_objective <= s.dual_objective + 1e-8);
  }
}

TEST_CASE("slack blocks model scalar inequalities") {
  // maximize X11 s.t. Tr X = 1, X11 + s = 0.3, s >= 0  -> 0.3
  Problem p = trace_one_2x2();
  p.block_sizes = {2, 1};
  p.objective.add(0, 0, 0, 1.0);
  SparseSym ineq;
  ineq.add(0, 0, 0, 1.0);
  ineq.add(1, 0, 0, 1.0);
  p.constraints.push_back(ineq);
  p.rhs = Vector(2);
  p.rhs << 1.0, 0.3;
  const Solution s = solve(p);
  REQUIRE(s.status == Status::optimal);
  CHECK(s.objective() == Approx(0.3).margin(1e-7));
}

TEST_CASE("permuting constraints leaves the objective unchanged") {
  Problem p;
  p.block_sizes = {3, 1};
  p.objective.add(0, 0, 1, 1.0);
  p.objective.add(0, 2, 2, 0.5);
  SparseSym tr, a, b;
  for (int i = 0; i < 3; ++i) tr.add(0, i, i, 1.0);
  a.add(0, 0, 0, 1.0);
  a.add(1, 0, 0, 1.0);  // X00 <= 0.4
  b.add(0, 1, 2, 1.0);  // 2 X12 = 0.1
  p.constraints = {tr, a, b};
  p.rhs = Vector(3);
  p.rhs << 1.0, 0.4, 0.1;
  const Solution s1 = solve(p);
  Problem q = p;
  q.constraints = {b, tr, a};
  q.rhs << 0.1, 1.0, 0.4;
  const Solution s2 = solve(q);
  REQUIRE(s1.status == Status::optimal);
  REQUIRE(s2.status == Status::optimal);
  CHECK(std::abs(s1.objective() - s2.objective()) <= 1e-8);
}

TEST_CASE("redundant constraints are pruned") {
  Problem p = trace_one_2x2();
  p.objective.add(0, 0, 0, 1.0);
  SparseSym twice;
  twice.add(0, 0, 0, 2.0);
  twice.add(0, 1, 1, 2.0);
  p.constraints.push_back(twice);
  p.rhs = Vector(2);
  p.rhs << 1.0, 2.0;
  const Solution s = solve(p);
  REQUIRE(s.status == Status::optimal);
  CHECK(s.kept_constraints.size() == 1);
  CHECK(s.objective() == Approx(1.0).margin(1e-7));
}

TEST_CASE("inconsistent redundant rows are reported as infeasible") {
  Problem p = trace_one_2x2();
  SparseSym twice;
  twice.add(0, 0, 0, 2.0);
  twice.add(0, 1, 1, 2.0);
  p.constraints.push_back(twice);
  p.rhs = Vector(2);
  p.rhs << 1.0, 3.0;
  CHECK(solve(p).status == Status::infeasible_suspected);
}

TEST_CASE("infeasible programs do not report optimal") {
  // Tr X = -1 has no PSD solution
  Problem p = trace_one_2x2();
  p.rhs(0) = -1.0;
  p.objective.add(0, 0, 0, 1.0);
  const Solution s = solve(p);
  CHECK(s.status != Status::optimal);
}

TEST_CASE("structural errors throw") {
  Problem p = trace_one_2x2();
  p.rhs = Vector::Zero(2);
  CHECK_THROWS_AS(solve(p), InvalidArgument);
  Problem q = trace_one_2x2();
  q.objective.add(0, 0, 5, 1.0);
  CHECK_THROWS_AS(solve(q), InvalidArgument);
}

TEST_CASE("solver is deterministic") {
  std::mt19937_64 rng(3);
  Matrix c;
  const Problem p = random_eig_problem(4, rng, c);
  const Solution a = solve(p), b = solve(p);
  CHECK(a.objective() == b.objective());
  CHECK(a.X[0] == b.X[0]);
}

TEST_CASE("problem file round trip") {
  std::mt19937_64 rng(9);
  Matrix c;
  Problem p = random_eig_problem(3, rng, c);
  p.block_sizes.push_back(1);
  SparseSym ineq;
  ineq.add(0, 0, 0, 1.0);
  ineq.add(1, 0, 0, 1.0);
  p.constraints.push_back(ineq);
  p.rhs.conservativeResize(2);
  p.rhs(1) = 0.7;
  std::stringstream ss;
  write_problem(ss, p);
  const Problem q = read_problem(ss);
  REQUIRE(q.block_sizes == p.block_sizes);
  REQUIRE(q.rhs == p.rhs);
  REQUIRE(q.constraints.size() == p.constraints.size());
  CHECK(solve(q).objective() == solve(p).objective());

  std::stringstream out;
  write_solution(out, solve(p));
  CHECK(out.str().rfind("status optimal", 0) == 0);
}

TEST_CASE("problem parser reports line numbers") {
  std::istringstream empty("");
  CHECK_THROWS_WITH(read_problem(empty), Catch::Matchers::ContainsSubstring("missing header"));
  std::istringstream bad("1\n2\n1\n1.0\n1 1 1 x 2\n");
  try {
    read_problem(bad);
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
  }
}
