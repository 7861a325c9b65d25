#include <doctest.h>

#include <cmath>
#include <limits>

#include "arqpc/problems.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace arqpc;

namespace {

Problem square_problem() {
  Problem prob;
  prob.n = 1;
  prob.p = 3;
  prob.f_oracle = [](std::span<const double> x, int degree) { return fixture::Poly1{{0, 0, 1}}.taylor(x[0], degree); };
  prob.x0 = Vector{1.0};
  return prob;
}

}  // namespace

TEST_CASE("objective values") {
  Problem fig = figure1_problem(2);
  EvalCounters ec;
  CHECK(eval_w(fig, std::vector<double>{0.0}, ec) == 0.0);
  CHECK(eval_w(fig, std::vector<double>{1.0}, ec) == doctest::Approx(1.6).epsilon(1e-15));
  CHECK(eval_w(square_problem(), std::vector<double>{1.0}, ec) == 1.0);
  CHECK(ec.w_evals == 3);
  CHECK(ec.deriv_evals == 0);
}

TEST_CASE("figure1 Taylor data at the origin") {
  Problem fig = figure1_problem(2);
  EvalCounters ec;
  TaylorBundle b = taylor_at(fig, std::vector<double>{0.0}, 2, ec);
  CHECK(ec.deriv_evals == 1);
  // T_f(0, s) = -0.4 s and T_c(0, s) = s - s^2.
  CHECK(b.f.terms[0].entry(0) == 0.0);
  CHECK(b.f.terms[1].entry(0) == doctest::Approx(-0.4));
  CHECK(b.f.terms[2].entry(0) == 0.0);
  const TaylorPoly& c = b.c.components[0];
  CHECK(c.terms[0].entry(0) == 0.0);
  CHECK(c.terms[1].entry(0) == doctest::Approx(1.0));
  CHECK(c.terms[2].entry(0) / 2.0 == doctest::Approx(-1.0));
}

TEST_CASE("Taylor data of simple functions") {
  Problem prob;
  prob.n = 1;
  prob.p = 3;
  prob.f_oracle = [](std::span<const double> x, int degree) { return fixture::Poly1{{0, 0, 0, 1}}.taylor(x[0], degree); };
  EvalCounters ec;
  TaylorBundle b = taylor_at(prob, std::vector<double>{1.0}, 3, ec);
  const double expect[] = {1, 3, 6, 6};
  for (int l = 0; l <= 3; ++l) CHECK(b.f.terms[l].entry(0) == expect[l]);
  // Finite-difference cross-check of the derivative column.
  for (int l = 1; l <= 3; ++l) {
    auto g = [&](double h) {
      EvalCounters e2;
      return taylor_at(prob, std::vector<double>{1.0 + h}, 3, e2).f.terms[l - 1].entry(0);
    };
    CHECK(oracle::central_diff(g, 0.0) == doctest::Approx(expect[l]).epsilon(1e-6));
  }

  prob.f_oracle = [](std::span<const double> x, int degree) { return fixture::Poly1{{2.5}}.taylor(x[0], degree); };
  b = taylor_at(prob, std::vector<double>{-0.3}, 3, ec);
  CHECK(b.f.terms[0].entry(0) == 2.5);
  for (int l = 1; l <= 3; ++l) CHECK(b.f.terms[l].entry(0) == 0.0);
}

TEST_CASE("feasibility is enforced by rejection") {
  Problem q = quadratic_problem(2);
  EvalCounters ec;
  CHECK_THROWS_AS(eval_w(q, std::vector<double>{3.0, 0.0}, ec), InfeasiblePoint);
  CHECK_THROWS_AS(taylor_at(q, std::vector<double>{0.0, -2.5}, 2, ec), InfeasiblePoint);
  CHECK(ec.w_evals == 0);
}

TEST_CASE("oracle failures surface as oracle errors") {
  Problem prob = square_problem();
  prob.f_oracle = [](std::span<const double>, int) -> TaylorPoly { throw std::runtime_error("boom"); };
  EvalCounters ec;
  CHECK_THROWS_AS(eval_w(prob, std::vector<double>{0.0}, ec), OracleError);
}

TEST_CASE("feasible sets") {
  FeasibleSet box = FeasibleSet::box(Vector{-1.0, 0.0}, Vector{1.0, 2.0});
  CHECK(box.member(std::vector<double>{0.5, 1.0}));
  CHECK_FALSE(box.member(std::vector<double>{1.5, 1.0}));
  Vector pr = box.project(std::vector<double>{1.5, -1.0});
  CHECK(pr[0] == 1.0);
  CHECK(pr[1] == 0.0);
  FeasibleSet ball = FeasibleSet::l2_ball(Vector{0.0, 0.0}, 2.0);
  Vector pb = ball.project(std::vector<double>{3.0, 4.0});
  CHECK(pb[0] == doctest::Approx(1.2));
  CHECK(pb[1] == doctest::Approx(1.6));
  FeasibleSet line = FeasibleSet::box(Vector{-1.0}, Vector{3.0});
  auto [lo, hi] = line.interval_1d(0.5);
  CHECK(lo == -1.5);
  CHECK(hi == 2.5);
  auto [alo, ahi] = FeasibleSet::all().interval_1d(0.0);
  CHECK(std::isinf(alo));
  CHECK(std::isinf(ahi));
}

TEST_CASE("combined Lipschitz constants") {
  Problem prob = square_problem();
  prob.p = 2;
  prob.lipschitz_f = {1, 1, 1};
  CHECK(*lw_constant(prob) == 1.0);

  Problem comp = figure1_problem(2);
  comp.lipschitz_f = {1, 2};
  comp.lipschitz_c = {1, 1};
  CHECK(*lw_constant(comp) == 3.0);
  CHECK_FALSE(lwp_constant(comp).has_value());

  comp.lipschitz_c = {1};
  CHECK_FALSE(lw_constant(comp).has_value());
  comp.lipschitz_c = {1, std::numeric_limits<double>::quiet_NaN()};
  CHECK_FALSE(lw_constant(comp).has_value());
}

TEST_CASE("Taylor remainder bounds on smooth samples") {
  oracle::Rng rng(31);
  int samples = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.integer(1, 3);
    const int p = rng.integer(1, 4);
    fixture::Sines sn = fixture::random_sines(rng, n, 3);
    std::vector<double> x = rng.vec(n, -2, 2), s = rng.vec(n, -1, 1);
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = x[i] + s[i];
    TaylorPoly t = sn.taylor(x, p);
    const double r = norm2(s), L = sn.lipschitz(p);
    CHECK(std::abs(sn.value(xs) - eval_taylor(t, s)) <= L / oracle::fact(p + 1) * std::pow(r, p + 1) + 1e-12);
    TaylorPoly at = sn.taylor(xs, p);
    for (int j = 1; j <= p; ++j) {
      SymTensor diff = shift_derivative(t, s, j);
      for (int i = 0; i < diff.size(); ++i) diff.entry(i) -= at.terms[j].entry(i);
      CHECK(diff.operator_norm() <= L / oracle::fact(p - j + 1) * std::pow(r, p - j + 1) + 1e-12);
    }
    ++samples;
  }
  CHECK(samples == 200);
}

TEST_CASE("problem registry") {
  for (const auto& name : problem_names()) {
    ProblemOptions po;
    po.p = 2;
    po.q = name == "wc-cor64" ? 1 : 2;
    po.eps = 0.25;
    Problem prob = make_problem(name, po);
    CHECK_NOTHROW(prob.validate());
    EvalCounters ec;
    CHECK(std::isfinite(eval_w(prob, prob.x0, ec)));
  }
  CHECK_THROWS_AS(make_problem("no-such-problem"), UnknownProblem);
}

TEST_CASE("validation catches malformed problems") {
  Problem prob = square_problem();
  prob.lipschitz_f = {0.5};
  CHECK_THROWS_AS(prob.validate(), InvalidArgument);
  prob = square_problem();
  prob.p = 0;
  CHECK_THROWS_AS(prob.validate(), InvalidArgument);
  prob = figure1_problem(2);
  prob.c_oracle = nullptr;
  CHECK_THROWS_AS(prob.validate(), InvalidArgument);
}

TEST_CASE("univariate shortcuts agree with the generic evaluators") {
  oracle::Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    fixture::Sines sn = fixture::random_sines(rng, 1, 2);
    const int p = rng.integer(1, 4);
    Problem prob = fixture::sines_problem(sn, p, {0.0});
    const double x = rng.uniform(-2, 2);
    double xv[] = {x};
    EvalCounters a, b;
    CHECK(eval_w_1d(prob, x, a) == eval_w(prob, xv, b));
    double jet[8];
    taylor_at_1d(prob, x, p, jet, a);
    TaylorBundle tb = taylor_at(prob, xv, p, b);
    for (int l = 0; l <= p; ++l) CHECK(jet[l] == tb.f.terms[l].entry(0));
    CHECK(a.w_evals == b.w_evals);
    CHECK(a.deriv_evals == b.deriv_evals);
  }
}
