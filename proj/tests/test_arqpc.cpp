#include <doctest.h>

#include <cmath>

#include "arqpc/problems.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace arqpc;

namespace {

Problem square_problem() {
  Problem prob;
  prob.name = "square";
  prob.n = 1;
  prob.p = 2;
  prob.f_oracle = [](std::span<const double> x, int degree) { return fixture::Poly1{{0, 0, 1}}.taylor(x[0], degree); };
  prob.lipschitz_f = {1, 2, 1};
  prob.w_low = 0.0;
  prob.x0 = Vector{1.0};
  return prob;
}

IterationRecord synthetic(long long k, bool success) {
  IterationRecord r;
  r.k = k;
  r.success = success;
  return r;
}

void check_same_trace(const RunResult& a, const RunResult& b) {
  REQUIRE(a.trace.size() == b.trace.size());
  CHECK(a.termination == b.termination);
  CHECK(a.w_final == b.w_final);
  CHECK(a.counters.w_evals == b.counters.w_evals);
  CHECK(a.counters.deriv_evals == b.counters.deriv_evals);
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    const IterationRecord &u = a.trace[i], &v = b.trace[i];
    CHECK(u.x[0] == v.x[0]);
    CHECK(u.w == v.w);
    CHECK(u.sigma == v.sigma);
    CHECK(u.s[0] == v.s[0]);
    CHECK(u.rho == v.rho);
    CHECK(u.success == v.success);
    REQUIRE(u.delta_s.size() == v.delta_s.size());
    for (std::size_t j = 0; j < u.delta_s.size(); ++j) CHECK(u.delta_s[j] == v.delta_s[j]);
    REQUIRE(u.phi.size() == v.phi.size());
    for (std::size_t j = 0; j < u.phi.size(); ++j) CHECK(u.phi[j] == v.phi[j]);
  }
}

}  // namespace

TEST_CASE("acceptance ratio") {
  CHECK(rho(1.0, 0.5, 1.0) == 0.5);
  CHECK(rho(2.0, 1.0, 1.0) == 1.0);
  CHECK_THROWS_AS(rho(1.0, 0.5, 0.0), DegenerateDenominator);
  CHECK_THROWS_AS(rho(1.0, 0.5, -1.0), DegenerateDenominator);
}

TEST_CASE("regularization update") {
  AlgoParams prm = AlgoParams::with_eps(1, 0.1);
  CHECK(sigma_update(1.0, 0.95, prm) == 0.5);
  CHECK(sigma_update(1.0, 0.5, prm) == 1.0);
  CHECK(sigma_update(1.0, -2.0, prm) == 2.0);
  prm.sigma_min = 0.8;
  prm.sigma0 = 1.0;
  CHECK(sigma_update(1.0, 0.95, prm) == 0.8);
}

TEST_CASE("parameter validation") {
  AlgoParams prm = AlgoParams::with_eps(2, 0.1);
  CHECK_NOTHROW(prm.validate());
  prm.eps = Vector{0.1};
  CHECK_THROWS_AS(prm.validate(), InvalidArgument);
  prm = AlgoParams::with_eps(1, 1.5);
  CHECK_THROWS_AS(prm.validate(), InvalidArgument);
  prm = AlgoParams::with_eps(1, 0.1);
  prm.gamma3 = 1.5;
  CHECK_THROWS_AS(prm.validate(), InvalidArgument);
  prm = AlgoParams::with_eps(1, 0.1);
  prm.sigma_min = 2.0;
  CHECK_THROWS_AS(prm.validate(), InvalidArgument);
}

TEST_CASE("iteration bound on synthetic traces") {
  AlgoParams prm = AlgoParams::with_eps(1, 0.1);
  std::vector<IterationRecord> all_good;
  for (int k = 0; k < 10; ++k) all_good.push_back(synthetic(k, true));
  CHECK(iteration_bound_check(all_good, prm.sigma0, prm));

  // With γ1 = 1/2, γ2 = 2 each success buys two iterations and every doubling
  // of σ_max over σ_0 one more.
  std::vector<IterationRecord> alternating;
  for (int k = 0; k < 10; ++k) alternating.push_back(synthetic(k, k % 2 == 0));
  CHECK(iteration_bound_check(alternating, prm.sigma0, prm));

  std::vector<IterationRecord> failures;
  for (int k = 0; k < 3; ++k) failures.push_back(synthetic(k, false));
  CHECK(iteration_bound_check(failures, 8.0 * prm.sigma0, prm));
  CHECK_FALSE(iteration_bound_check(failures, 4.0 * prm.sigma0, prm));

  std::vector<IterationRecord> late;
  for (int k = 0; k < 4; ++k) late.push_back(synthetic(k, k == 3));
  CHECK_FALSE(iteration_bound_check(late, 4.0 * prm.sigma0, prm));
  CHECK(iteration_bound_check(late, 8.0 * prm.sigma0, prm));
}

TEST_CASE("square converges to its minimizer") {
  Problem prob = square_problem();
  AlgoParams prm = AlgoParams::with_eps(1, 1e-3);
  RunResult r = run(prob, prm);
  CHECK(r.termination == Termination::step1);
  CHECK(r.certificate.pass);
  double eps[] = {1e-3};
  Certificate again = strong_check(prob, r.x_final, eps, r.certificate.orders.size() ? std::vector<double>{r.certificate.orders[0].delta} : std::vector<double>{1.0});
  CHECK(again.pass);
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i].w <= r.trace[i - 1].w);
  CHECK(r.counters.w_evals == r.iterations + 1);
  CHECK(r.counters.deriv_evals == r.successes + 1);
}

TEST_CASE("a start at the minimizer stops immediately") {
  Problem q = quadratic_problem(2);
  q.x0 = Vector{-0.6, 0.8};
  RunResult r = run(q, AlgoParams::with_eps(1, 1e-3));
  CHECK(r.termination == Termination::step1);
  CHECK(r.iterations == 0);
  CHECK(r.counters.w_evals == 1);
  CHECK(r.counters.deriv_evals == 1);
}

TEST_CASE("runs on random smooth problems keep their invariants") {
  oracle::Rng rng(303);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = rng.integer(1, 2), p = rng.integer(1, 3), q = std::min(p, rng.integer(1, 2));
    fixture::Sines sn = fixture::random_sines(rng, n, 3);
    Problem prob = fixture::sines_problem(sn, p, rng.vec(n, -1, 1));
    AlgoParams prm = AlgoParams::with_eps(q, 1e-2);
    prm.sigma0 = 0.05;
    prm.sigma_min = 0.05;
    RunResult r = run(prob, prm);
    CHECK(r.termination != Termination::budget);
    CHECK(r.counters.w_evals == r.iterations + 1);
    CHECK(r.counters.deriv_evals == r.successes + 1);
    CHECK(iteration_bound_check(r.trace, r.sigma_max, prm));
    const double lwp = *lwp_constant(prob);
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
      const IterationRecord& it = r.trace[i];
      CHECK(it.sigma <= std::max(prm.sigma0, prm.gamma3 * lwp / (1 - prm.eta2)) + 1e-12);
      CHECK(it.taylor_dec >= it.sigma / oracle::fact(p + 1) * std::pow(it.step_norm, p + 1) - 1e-10);
      if (i + 1 < r.trace.size()) {
        const IterationRecord& nx = r.trace[i + 1];
        CHECK(nx.w <= it.w);
        if (it.success) {
          CHECK(nx.w < it.w);
          REQUIRE(nx.delta.size() == it.delta_s.size());
          for (std::size_t j = 0; j < nx.delta.size(); ++j) CHECK(nx.delta[j] == it.delta_s[j]);
        } else {
          for (std::size_t j = 0; j < nx.delta.size(); ++j) CHECK(nx.delta[j] == it.delta[j]);
          CHECK(nx.x[0] == it.x[0]);
        }
      }
    }
  }
}

TEST_CASE("the scalar loop reproduces the generic loop") {
  RunOptions generic;
  generic.generic_loop = true;

  oracle::Rng rng(404);
  for (int trial = 0; trial < 4; ++trial) {
    const int p = rng.integer(1, 3), q = std::min(p, 2);
    Problem prob = fixture::sines_problem(fixture::random_sines(rng, 1, 3), p, {rng.uniform(-1, 1)});
    AlgoParams prm = AlgoParams::with_eps(q, 1e-3);
    prm.sigma0 = 0.1;
    prm.sigma_min = 0.1;
    check_same_trace(run(prob, prm), run(prob, prm, generic));
  }

  WorstCaseInstance inst = build_thm61(2, 1, 0.25);
  Problem wc = worstcase_problem(inst, ReplayMode::interpolant);
  check_same_trace(run(wc, replay_params(inst)), run(wc, replay_params(inst), generic));
}

TEST_CASE("composite runs") {
  Problem fig = figure1_problem(3);
  AlgoParams prm = AlgoParams::with_eps(2, 0.05);
  RunResult r = run(fig, prm);
  CHECK(r.termination != Termination::budget);
  CHECK(r.certificate.pass);
  CHECK(r.counters.w_evals == r.iterations + 1);

  Problem rb = rosenbrock_problem(2);
  RunResult rr = run(rb, AlgoParams::with_eps(1, 1e-2));
  CHECK(rr.termination != Termination::budget);
  CHECK(rr.w_final < 24.2);
}

TEST_CASE("budget stops keep the trace") {
  Problem rb = rosenbrock_problem(2);
  AlgoParams prm = AlgoParams::with_eps(1, 1e-6);
  prm.max_iters = 3;
  RunResult r = run(rb, prm);
  CHECK(r.termination == Termination::budget);
  CHECK(r.iterations == 3);
  CHECK(r.trace.size() == 3);
  CHECK_FALSE(r.message.empty());
}

TEST_CASE("invalid starts are rejected") {
  Problem q = quadratic_problem(2);
  q.x0 = Vector{5.0, 0.0};
  CHECK_THROWS_AS(run(q, AlgoParams::with_eps(1, 1e-3)), InvalidArgument);
  Problem s = square_problem();
  CHECK_THROWS_AS(run(s, AlgoParams::with_eps(3, 1e-3)), InvalidArgument);
}

TEST_CASE("callbacks see every iteration") {
  Problem s = square_problem();
  long long seen = 0;
  RunOptions opt;
  opt.keep_trace = false;
  opt.on_iteration = [&](const IterationRecord& r) { CHECK(r.k == seen++); };
  RunResult r = run(s, AlgoParams::with_eps(1, 1e-3), opt);
  CHECK(seen == r.iterations);
  CHECK(r.trace.empty());
}
