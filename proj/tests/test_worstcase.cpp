#include <doctest.h>

#include <cmath>

#include "arqpc/problems.hpp"
#include "support/oracles.hpp"

using namespace arqpc;

TEST_CASE("sequence lengths and constants") {
  WorstCaseInstance a = build_thm61(1, 1, 0.25);
  CHECK(a.k_eps() == 16);
  CHECK(a.zeta() == 0.5);
  CHECK(a.sigma() == 1.0);
  CHECK(a.designated_delta() == 1.0);

  WorstCaseInstance b = build_thm61(2, 1, 0.25);
  CHECK(b.k_eps() == 8);
  CHECK(b.step(0) == doctest::Approx(0.70710678118654752).epsilon(1e-15));
  CHECK(b.sigma() == 2.0);

  WorstCaseInstance c = build_thm63(3, 3, 0.5);
  CHECK(c.k_eps() == 16);
  CHECK(c.sigma() == 6.0);
  CHECK(c.designated_delta() == 0.5);

  WorstCaseInstance d = build_thm63(2, 3, 0.25);
  CHECK(d.k_eps() == 512);
  CHECK(d.step(0) == doctest::Approx(0.0722).epsilon(1e-3));

  WorstCaseInstance e = build_cor64(2, 0.25);
  CHECK(e.kind() == WorstCaseKind::cor64);
  CHECK(e.k_eps() == b.k_eps());
  CHECK(e.step(3) == b.step(3));

  CHECK(ceil_power(0.1, 2.0) == 100);
  CHECK(ceil_power(0.3, 1.5) == 7);
}

TEST_CASE("instance validation") {
  CHECK_THROWS_AS(build_thm63(2, 2, 0.6), InvalidArgument);
  CHECK_THROWS_AS(build_thm61(1, 2, 0.25), InvalidArgument);
  CHECK_THROWS_AS(build_thm61(2, 1, 1.0), InvalidArgument);
  CHECK_THROWS_AS(build_worstcase(WorstCaseKind::cor64, 2, 2, 0.25), InvalidArgument);
  CHECK_THROWS_AS(worstcase_kind_from_name("thm99"), InvalidArgument);
  CHECK(worstcase_kind_from_name("thm63") == WorstCaseKind::thm63);
}

TEST_CASE("node values stay within the initial bracket") {
  for (auto inst : {build_thm61(1, 1, 0.1), build_thm61(3, 2, 0.2), build_thm63(2, 2, 0.3), build_cor64(2, 0.1)}) {
    std::vector<Node> nodes = inst.nodes();
    REQUIRE(static_cast<long long>(nodes.size()) == inst.k_eps() + 1);
    CHECK(nodes.front().jet[0] == inst.f0_start());
    for (std::size_t i = 1; i < nodes.size(); ++i) {
      CHECK(nodes[i].jet[0] < nodes[i - 1].jet[0]);
      CHECK(nodes[i].x > nodes[i - 1].x);
      CHECK(nodes[i - 1].jet[0] - nodes[i].jet[0] ==
            doctest::Approx(inst.f0_decrement(static_cast<long long>(i) - 1)).epsilon(1e-12));
    }
    CHECK(nodes.back().jet[0] >= 0.0);
    CHECK(nodes.back().s == 0.0);
  }
}

TEST_CASE("Hermite interpolant reproduces the node jets") {
  for (auto inst : {build_thm61(2, 1, 0.25), build_thm61(3, 3, 0.3), build_thm63(3, 2, 0.4)}) {
    std::vector<Node> nodes = inst.nodes();
    HermiteInterpolant hi(nodes);
    CHECK(hi.p() == inst.p());
    CHECK(static_cast<int>(hi.local_coefficients(0).size()) == 2 * inst.p() + 2);
    for (const Node& nd : nodes) {
      TaylorPoly t = hi.taylor(nd.x, inst.p());
      for (int l = 0; l <= inst.p(); ++l)
        CHECK(std::abs(t.terms[l].entry(0) - nd.jet[l]) <= 1e-8 * std::max(1.0, std::abs(nd.jet[l])));
    }
    // Continuity of derivatives 0..p across an interior knot.
    const double xk = nodes[1].x, h = 1e-9;
    TaylorPoly left = hi.taylor(xk - h, inst.p()), right = hi.taylor(xk + h, inst.p());
    for (int l = 0; l < inst.p(); ++l) CHECK(left.terms[l].entry(0) == doctest::Approx(right.terms[l].entry(0)).epsilon(1e-6));
  }
}

TEST_CASE("interpolant construction checks its input") {
  CHECK_THROWS_AS(HermiteInterpolant(std::vector<Node>{}), InvalidArgument);
  std::vector<Node> bad = build_thm61(1, 1, 0.25).nodes();
  std::swap(bad[0], bad[1]);
  CHECK_THROWS_AS(HermiteInterpolant{bad}, InvalidArgument);
  bad = build_thm61(1, 1, 0.25).nodes();
  bad[2].jet.pop_back();
  CHECK_THROWS_AS(HermiteInterpolant{bad}, InvalidArgument);
}

TEST_CASE("the measure stays above threshold until the last node") {
  for (auto inst : {build_thm61(2, 1, 0.25), build_thm61(3, 2, 0.3), build_thm63(3, 3, 0.5), build_thm63(2, 2, 0.3)}) {
    const int q = inst.q();
    const double delta = inst.designated_delta();
    std::vector<Node> nodes = inst.nodes();
    for (const Node& nd : nodes) {
      PhiValue ph = phi_smooth_1d(nd.jet.data(), q, FeasibleSet::all(), nd.x, delta);
      const double thr = strong_threshold(inst.eps(), delta, q);
      if (nd.k < inst.k_eps())
        CHECK(ph.value > thr + ph.gap);
      else
        CHECK(ph.value <= thr + ph.gap);
    }
  }
}

TEST_CASE("node replays take exactly the designated number of iterations") {
  struct Case {
    WorstCaseKind kind;
    int p, q;
    double eps;
  };
  for (Case c : {Case{WorstCaseKind::thm61, 2, 1, 0.25}, Case{WorstCaseKind::thm61, 3, 2, 0.1},
                 Case{WorstCaseKind::thm63, 3, 3, 0.5}, Case{WorstCaseKind::thm63, 2, 2, 0.2},
                 Case{WorstCaseKind::cor64, 2, 1, 0.1}}) {
    WorstCaseInstance inst = build_worstcase(c.kind, c.p, c.q, c.eps);
    ReplayOptions ro;
    ro.keep_trace = true;
    ReplayResult r = replay(inst, ro);
    CHECK(r.match);
    CHECK(r.run.iterations == inst.k_eps());
    CHECK(r.run.successes == inst.k_eps());
    CHECK(r.run.counters.w_evals == inst.k_eps() + 1);
    CHECK(r.run.counters.deriv_evals == inst.k_eps() + 1);
    CHECK(r.run.termination == Termination::step1);
    for (const IterationRecord& it : r.run.trace) {
      CHECK(it.hook_used);
      CHECK(it.sigma == inst.sigma());
      CHECK(it.s[0] == inst.step(it.k));
    }
  }
}

TEST_CASE("replay mismatches report where they diverge") {
  ReplayMismatch m("diverged", 7);
  CHECK(m.divergent_k == 7);
  CHECK(std::string(m.what()) == "diverged");
  // A sequence with q > p cannot be replayed.
  CHECK_THROWS_AS(replay(build_thm63(2, 3, 0.25)), InvalidArgument);
}

TEST_CASE("the solver on the interpolant follows the sequence") {
  for (double eps : {0.25, 0.177}) {
    WorstCaseInstance inst = build_thm61(2, 1, eps);
    std::vector<Node> nodes = inst.nodes();
    ReplayOptions ro;
    ro.mode = ReplayMode::interpolant;
    ro.keep_trace = true;
    ReplayResult r = replay(inst, ro);
    CHECK(r.match);
    CHECK(r.run.iterations == inst.k_eps());
    CHECK(std::abs(r.run.x_final[0] - r.terminal_x) <= 1e-6);
    for (const IterationRecord& it : r.run.trace) CHECK(std::abs(it.x[0] - nodes[it.k].x) <= 1e-6);
  }
}

TEST_CASE("streaming cursor matches the materialized nodes") {
  WorstCaseInstance inst = build_thm61(3, 2, 0.2);
  std::vector<Node> nodes = inst.nodes();
  NodeCursor cur(inst);
  double out[8];
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    CHECK(cur.x() == nodes[i].x);
    cur.jet(cur.x(), inst.p(), out);
    for (int l = 0; l <= inst.p(); ++l) CHECK(out[l] == nodes[i].jet[l]);
    cur.jet(cur.next_x(), inst.p(), out);
  }
  CHECK(cur.k() == inst.k_eps());
}
